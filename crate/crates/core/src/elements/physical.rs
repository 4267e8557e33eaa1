//! Floating-point transfer of the reference spaces to physical cells.
//!
//! Every family is tabulated once at a shared probe set on the reference
//! element: the vertices, Gauss points on each edge and face, and an
//! Alfeld-split interior rule that also serves assembly. A physical cell
//! maps these tables by the appropriate Piola transform, evaluates its
//! degrees of freedom from the mapped tables and inverts the resulting DOF
//! matrix to obtain the nodal basis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, Matrix3, Vector3};

use super::dofs::{dof_counts, DofCounts, Entity};
use super::reference::{raw_space, RawSpace};
use super::{ElementConfig, Field, SpaceKind};
use crate::assembly::quadrature::{SegmentRule, TetRule, TriangleRule};
use crate::bubbles::s_layer;
use crate::error::{Error, Result};
use crate::mesh::{cross, norm, normalize, sub, AffineMap, LOCAL_EDGES, LOCAL_FACES};
use crate::polyalg::poincare::koszul2;
use crate::polyalg::{
    monomials_upto, powers, EchelonBasis, FloatPoly, MonomialIndex, Poly, VecPoly, Q,
};

/// Reference probe points shared by all families of one quadrature degree.
#[derive(Clone, Debug)]
pub struct Probes {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    /// Alfeld subtet used to evaluate piecewise fields at each point.
    pub pieces: Vec<usize>,
    pub vertex: [usize; 4],
    /// `(probe, s, weight)` along local edge `j`, weights summing to 1.
    pub edges: [Vec<(usize, f64, f64)>; 6],
    /// `(probe, (s, t), weight)` on local face `i`, weights summing to 1.
    pub faces: [Vec<(usize, [f64; 2], f64)>; 4],
    /// `(probe, weight)` over the cell, weights summing to 1.
    pub interior: Vec<(usize, f64)>,
}

impl Probes {
    pub fn new(degree: usize) -> Self {
        let rv: [[f64; 3]; 4] = [[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut points = Vec::new();
        let mut pieces = Vec::new();
        let mut push = |x: [f64; 3], piece: usize| {
            points.push(x);
            pieces.push(piece);
            points.len() - 1
        };
        let vertex = std::array::from_fn(|i| push(rv[i], (i + 1) % 4));
        let seg = SegmentRule::new(degree);
        let edges = std::array::from_fn(|j| {
            let [a, b] = LOCAL_EDGES[j];
            let piece = (0..4).find(|p| *p != a && *p != b).expect("edge piece");
            seg.points
                .iter()
                .zip(&seg.weights)
                .map(|(&s, &w)| {
                    let x = std::array::from_fn(|d| rv[a][d] + s * (rv[b][d] - rv[a][d]));
                    (push(x, piece), s, w)
                })
                .collect()
        });
        let tri = TriangleRule::new(degree);
        let faces = std::array::from_fn(|i| {
            let [a, b, c] = LOCAL_FACES[i];
            tri.points
                .iter()
                .zip(&tri.weights)
                .map(|(st, &w)| {
                    let x = std::array::from_fn(|d| {
                        rv[a][d] + st[0] * (rv[b][d] - rv[a][d]) + st[1] * (rv[c][d] - rv[a][d])
                    });
                    (push(x, i), *st, w)
                })
                .collect()
        });
        let interior = TetRule::new(degree)
            .alfeld()
            .into_iter()
            .map(|(x, w, piece)| (push(x, piece), 6.0 * w))
            .collect();
        Self {
            degree,
            points,
            pieces,
            vertex,
            edges,
            faces,
            interior,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cached probe set for a quadrature degree.
    pub fn cached(degree: usize) -> Arc<Probes> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Probes>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        cache
            .lock()
            .expect("probe cache")
            .entry(degree)
            .or_insert_with(|| Arc::new(Probes::new(degree)))
            .clone()
    }
}

/// Geometry of one cell with vertices in ascending global order.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub vertices: [[f64; 3]; 4],
    pub map: AffineMap,
    pub volume: f64,
    pub edge_tangent: [[f64; 3]; 6],
    pub edge_length: [f64; 6],
    pub face_t1: [[f64; 3]; 4],
    pub face_t2: [[f64; 3]; 4],
    pub face_normal: [[f64; 3]; 4],
    pub face_area: [f64; 4],
    pub face_centroid: [[f64; 3]; 4],
}

impl CellGeometry {
    pub fn new(vertices: [[f64; 3]; 4]) -> Result<Self> {
        let map = AffineMap::from_vertices(&vertices);
        let scale = LOCAL_EDGES
            .iter()
            .map(|e| norm(&sub(&vertices[e[1]], &vertices[e[0]])))
            .fold(0.0, f64::max);
        if !(map.det.abs() > 1e-14 * scale.powi(3)) {
            return Err(Error::DegenerateSimplex);
        }
        let edge_tangent = LOCAL_EDGES.map(|[a, b]| normalize(&sub(&vertices[b], &vertices[a])));
        let edge_length = LOCAL_EDGES.map(|[a, b]| norm(&sub(&vertices[b], &vertices[a])));
        let mut face_t1 = [[0.0; 3]; 4];
        let mut face_t2 = [[0.0; 3]; 4];
        let mut face_normal = [[0.0; 3]; 4];
        let mut face_area = [0.0; 4];
        let mut face_centroid = [[0.0; 3]; 4];
        for (i, [a, b, c]) in LOCAL_FACES.iter().enumerate() {
            let d1 = sub(&vertices[*b], &vertices[*a]);
            let d2 = sub(&vertices[*c], &vertices[*a]);
            let cr = cross(&d1, &d2);
            face_t1[i] = normalize(&d1);
            face_normal[i] = normalize(&cr);
            face_t2[i] = cross(&face_normal[i], &face_t1[i]);
            face_area[i] = 0.5 * norm(&cr);
            face_centroid[i] =
                std::array::from_fn(|d| (vertices[*a][d] + vertices[*b][d] + vertices[*c][d]) / 3.0);
        }
        Ok(Self {
            vertices,
            volume: map.det.abs() / 6.0,
            map,
            edge_tangent,
            edge_length,
            face_t1,
            face_t2,
            face_normal,
            face_area,
            face_centroid,
        })
    }

    pub fn reference() -> Self {
        Self::new([[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
            .expect("reference cell")
    }

    /// Face bubble directions `det(B) B⁻¹ n_i`, whose contravariant image is
    /// parallel to the face normal.
    pub fn face_directions(&self) -> [[f64; 3]; 4] {
        self.face_normal.map(|n| {
            let d = self.map.det * (self.map.b_inv * Vector3::from(n));
            [d[0], d[1], d[2]]
        })
    }

    pub fn to_physical(&self, x: &[f64; 3]) -> [f64; 3] {
        self.map.apply(x)
    }
}

/// One degree of freedom as a weighted sum of input quantities at probes.
#[derive(Clone, Debug)]
pub struct DofRow {
    pub entity: Entity,
    pub label: String,
    /// `(probe, quantity, weight)`.
    pub terms: Vec<(usize, usize, f64)>,
}

impl DofRow {
    fn new(entity: Entity, label: String) -> Self {
        Self {
            entity,
            label,
            terms: Vec::new(),
        }
    }

    /// Apply to data laid out as `data[probe * stride + quantity]`.
    pub fn apply(&self, data: &[f64], stride: usize) -> f64 {
        self.terms
            .iter()
            .map(|&(p, q, w)| w * data[p * stride + q])
            .sum()
    }
}

fn face_monomials(deg: i64) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    if deg < 0 {
        return out;
    }
    for d in 0..=deg as i32 {
        for a in (0..=d).rev() {
            out.push((a, d - a));
        }
    }
    out
}

fn factorial(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Mean of `s^a t^b` over the unit triangle.
fn triangle_mean(a: i32, b: i32) -> f64 {
    2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Builds the DOF rows of a family on a cell.
fn dof_rows(kind: SpaceKind, c: ElementConfig, g: &CellGeometry, pr: &Probes) -> Vec<DofRow> {
    let (r, k) = (c.r as i64, c.k as i64);
    let mut rows = Vec::new();
    let binv_t = g.map.b_inv_t;
    let phys: Vec<[f64; 3]> = pr.points.iter().map(|x| g.to_physical(x)).collect();
    match kind {
        SpaceKind::Sigma | SpaceKind::W => {
            let (ve, ed, fa, int) = if kind == SpaceKind::Sigma {
                (true, r - 2, r - 3, r - 4)
            } else {
                (false, -1, -1, k - 1)
            };
            if ve {
                for i in 0..4 {
                    let mut row = DofRow::new(Entity::Vertex(i), format!("vertex {i} value"));
                    row.terms.push((pr.vertex[i], 0, 1.0));
                    rows.push(row);
                }
            }
            for j in 0..6 {
                for m in 0..=ed.max(-1) {
                    let mut row = DofRow::new(Entity::Edge(j), format!("edge {j} moment s^{m}"));
                    for &(p, s, w) in &pr.edges[j] {
                        row.terms.push((p, 0, w * s.powi(m as i32)));
                    }
                    rows.push(row);
                }
            }
            for i in 0..4 {
                for (a, b) in face_monomials(fa) {
                    let mut row =
                        DofRow::new(Entity::Face(i), format!("face {i} moment s^{a} t^{b}"));
                    for &(p, st, w) in &pr.faces[i] {
                        row.terms.push((p, 0, w * st[0].powi(a) * st[1].powi(b)));
                    }
                    rows.push(row);
                }
            }
            if int >= 0 {
                for e in monomials_upto(int as usize) {
                    let mono = FloatPoly::from_exact(&Poly::monomial(e, Q::from_integer(1.into())));
                    let mut row = DofRow::new(Entity::Interior, format!("interior moment {e:?}"));
                    for &(p, w) in &pr.interior {
                        let pw = powers(&pr.points[p], int as usize);
                        row.terms.push((p, 0, w * mono.eval_powers(&pw)));
                    }
                    rows.push(row);
                }
            }
        }
        SpaceKind::SigmaPlus => {
            for i in 0..4 {
                for (cc, ax) in AXES.iter().enumerate() {
                    let mut row = DofRow::new(Entity::Vertex(i), format!("vertex {i} value {ax}"));
                    row.terms.push((pr.vertex[i], cc, 1.0));
                    rows.push(row);
                }
            }
            for j in 0..6 {
                for m in 0..=(k - 2).max(-1) {
                    for (cc, ax) in AXES.iter().enumerate() {
                        let mut row =
                            DofRow::new(Entity::Edge(j), format!("edge {j} moment s^{m} {ax}"));
                        for &(p, s, w) in &pr.edges[j] {
                            row.terms.push((p, cc, w * s.powi(m as i32)));
                        }
                        rows.push(row);
                    }
                }
            }
            for i in 0..4 {
                for (a, b) in face_monomials(k - 3) {
                    for (cc, ax) in AXES.iter().enumerate() {
                        let mut row = DofRow::new(
                            Entity::Face(i),
                            format!("face {i} moment s^{a} t^{b} {ax}"),
                        );
                        for &(p, st, w) in &pr.faces[i] {
                            row.terms.push((p, cc, w * st[0].powi(a) * st[1].powi(b)));
                        }
                        rows.push(row);
                    }
                }
                if k <= 2 {
                    let n = g.face_normal[i];
                    let mut row = DofRow::new(Entity::Face(i), format!("face {i} normal flux"));
                    for &(p, _, w) in &pr.faces[i] {
                        for (cc, nc) in n.iter().enumerate() {
                            row.terms.push((p, cc, w * nc));
                        }
                    }
                    rows.push(row);
                }
            }
            if k >= 4 {
                for e in monomials_upto((k - 4) as usize) {
                    let mono = FloatPoly::from_exact(&Poly::monomial(e, Q::from_integer(1.into())));
                    for (cc, ax) in AXES.iter().enumerate() {
                        let mut row =
                            DofRow::new(Entity::Interior, format!("interior moment {e:?} {ax}"));
                        for &(p, w) in &pr.interior {
                            let pw = powers(&pr.points[p], (k - 4) as usize);
                            row.terms.push((p, cc, w * mono.eval_powers(&pw)));
                        }
                        rows.push(row);
                    }
                }
            }
            if k >= 2 {
                for (j, s) in s_layer(c.k - 1).iter().enumerate() {
                    let grad: Vec<FloatPoly> = s.grad().0.iter().map(FloatPoly::from_exact).collect();
                    let mut row =
                        DofRow::new(Entity::Interior, format!("interior gradient moment {j}"));
                    for &(p, w) in &pr.interior {
                        let pw = powers(&pr.points[p], c.k);
                        let gh = Vector3::new(grad[0].eval_powers(&pw), grad[1].eval_powers(&pw), grad[2].eval_powers(&pw));
                        let gp = binv_t * gh;
                        for cc in 0..3 {
                            row.terms.push((p, cc, w * gp[cc]));
                        }
                    }
                    rows.push(row);
                }
            }
        }
        SpaceKind::V => {
            for i in 0..4 {
                for (cc, ax) in AXES.iter().enumerate() {
                    let mut row = DofRow::new(Entity::Vertex(i), format!("vertex {i} curl {ax}"));
                    row.terms.push((pr.vertex[i], 3 + cc, 1.0));
                    rows.push(row);
                }
            }
            for j in 0..6 {
                let tau = g.edge_tangent[j];
                let len = g.edge_length[j];
                for m in 0..=(r - 1) {
                    let mut row =
                        DofRow::new(Entity::Edge(j), format!("edge {j} tangential moment s^{m}"));
                    for &(p, s, w) in &pr.edges[j] {
                        for cc in 0..3 {
                            row.terms.push((p, cc, len * w * s.powi(m as i32) * tau[cc]));
                        }
                    }
                    rows.push(row);
                }
                for m in 0..=(k - 2).max(-1) {
                    for (cc, ax) in AXES.iter().enumerate() {
                        let mut row =
                            DofRow::new(Entity::Edge(j), format!("edge {j} curl moment s^{m} {ax}"));
                        // (1/len)∫ ds = Σ w.
                        for &(p, s, w) in &pr.edges[j] {
                            row.terms.push((p, 3 + cc, w * s.powi(m as i32)));
                        }
                        rows.push(row);
                    }
                }
            }
            for i in 0..4 {
                let area = g.face_area[i];
                let n = g.face_normal[i];
                for (a, b) in face_monomials(k - 3) {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    let mean = triangle_mean(a, b);
                    let mut row = DofRow::new(
                        Entity::Face(i),
                        format!("face {i} normal curl moment s^{a} t^{b} - mean"),
                    );
                    for &(p, st, w) in &pr.faces[i] {
                        let q = st[0].powi(a) * st[1].powi(b) - mean;
                        for cc in 0..3 {
                            row.terms.push((p, 3 + cc, area * w * q * n[cc]));
                        }
                    }
                    rows.push(row);
                }
                for (t, name) in [(g.face_t1[i], "t1"), (g.face_t2[i], "t2")] {
                    for (a, b) in face_monomials(k - 3) {
                        let mut row = DofRow::new(
                            Entity::Face(i),
                            format!("face {i} curl {name} moment s^{a} t^{b}"),
                        );
                        for &(p, st, w) in &pr.faces[i] {
                            let q = st[0].powi(a) * st[1].powi(b);
                            for cc in 0..3 {
                                row.terms.push((p, 3 + cc, w * q * t[cc]));
                            }
                        }
                        rows.push(row);
                    }
                }
                let cf = g.face_centroid[i];
                for (a, b) in face_monomials(r - 3) {
                    let mut row = DofRow::new(
                        Entity::Face(i),
                        format!("face {i} tangential moment s^{a} t^{b} (x - c)"),
                    );
                    for &(p, st, w) in &pr.faces[i] {
                        let q = st[0].powi(a) * st[1].powi(b);
                        let xc = sub(&phys[p], &cf);
                        for cc in 0..3 {
                            row.terms.push((p, cc, w * q * xc[cc]));
                        }
                    }
                    rows.push(row);
                }
            }
            let vol = g.volume;
            if k >= 5 {
                for (j, qh) in interior_curl_weights(c.k - 5).iter().enumerate() {
                    let fq: Vec<FloatPoly> = qh.0.iter().map(FloatPoly::from_exact).collect();
                    let mut row =
                        DofRow::new(Entity::Interior, format!("interior curl moment {j}"));
                    for &(p, w) in &pr.interior {
                        let pw = powers(&pr.points[p], c.k);
                        let v = binv_t * Vector3::new(fq[0].eval_powers(&pw), fq[1].eval_powers(&pw), fq[2].eval_powers(&pw));
                        for cc in 0..3 {
                            row.terms.push((p, 3 + cc, vol * w * v[cc]));
                        }
                    }
                    rows.push(row);
                }
            }
            if r >= 4 {
                let b = g.map.b / g.map.det;
                for e in monomials_upto((r - 4) as usize) {
                    let mono = FloatPoly::from_exact(&Poly::monomial(e, Q::from_integer(1.into())));
                    let mut row =
                        DofRow::new(Entity::Interior, format!("interior moment {e:?} x"));
                    for &(p, w) in &pr.interior {
                        let x = pr.points[p];
                        let pw = powers(&x, c.r);
                        let v = b * (Vector3::from(x) * mono.eval_powers(&pw));
                        for cc in 0..3 {
                            row.terms.push((p, cc, vol * w * v[cc]));
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Independent members of `P_m³ × x`.
fn interior_curl_weights(m: usize) -> Vec<VecPoly> {
    let index = MonomialIndex::new(m + 1);
    let mut ech = EchelonBasis::new(3 * index.len());
    let mut out = Vec::new();
    for e in monomials_upto(m) {
        for c in 0..3 {
            let v = koszul2(&VecPoly::along(Poly::monomial(e, Q::from_integer(1.into())), c));
            let flat: Vec<Q> = v.0.iter().flat_map(|p| p.coeffs_in(&index)).collect();
            if ech.insert(&flat) {
                out.push(v);
            }
        }
    }
    out
}

/// Exact derived quantities of one generator, per piece, in tabulation order.
fn derived(kind: SpaceKind, f: &Field) -> [Vec<FloatPoly>; 4] {
    std::array::from_fn(|piece| match (kind, f) {
        (SpaceKind::Sigma, Field::Scalar(p)) => {
            let p = &p.pieces[piece];
            let g = p.grad();
            std::iter::once(p)
                .chain(g.0.iter())
                .map(FloatPoly::from_exact)
                .collect()
        }
        (SpaceKind::W, Field::Scalar(p)) => vec![FloatPoly::from_exact(&p.pieces[piece])],
        (SpaceKind::SigmaPlus, Field::Vector(v)) => {
            let v = &v.pieces[piece];
            let mut out: Vec<FloatPoly> = v.0.iter().map(FloatPoly::from_exact).collect();
            for a in 0..3 {
                for b in 0..3 {
                    out.push(FloatPoly::from_exact(&v.0[a].deriv(b)));
                }
            }
            out
        }
        (SpaceKind::V, Field::Vector(v)) => {
            let v = &v.pieces[piece];
            let cu = v.curl();
            let mut out: Vec<FloatPoly> = v.0.iter().chain(cu.0.iter()).map(FloatPoly::from_exact).collect();
            for a in 0..3 {
                for b in 0..3 {
                    out.push(FloatPoly::from_exact(&cu.0[a].deriv(b)));
                }
            }
            out
        }
        _ => panic!("field type does not match {kind:?}"),
    })
}

fn tabulate(kind: SpaceKind, f: &Field, probes: &Probes, deg: usize) -> Vec<f64> {
    let d = derived(kind, f);
    let nq = kind.tab_len();
    let mut out = vec![0.0; probes.len() * nq];
    for (p, (x, piece)) in probes.points.iter().zip(&probes.pieces).enumerate() {
        let pw = powers(x, deg);
        for (q, fp) in d[*piece].iter().enumerate() {
            out[p * nq + q] = fp.eval_powers(&pw);
        }
    }
    out
}

/// Maps reference quantities at one point to the physical cell.
fn piola(kind: SpaceKind, map: &AffineMap, inp: &[f64], out: &mut [f64]) {
    let mat = |s: &[f64]| Matrix3::from_fn(|a, b| s[3 * a + b]);
    let put = |out: &mut [f64], m: &Matrix3<f64>| {
        for a in 0..3 {
            for b in 0..3 {
                out[3 * a + b] = m[(a, b)];
            }
        }
    };
    let vec = |s: &[f64]| Vector3::new(s[0], s[1], s[2]);
    match kind {
        SpaceKind::W => out[0] = inp[0],
        SpaceKind::Sigma => {
            out[0] = inp[0];
            let g = map.b_inv_t * vec(&inp[1..4]);
            out[1..4].copy_from_slice(g.as_slice());
        }
        SpaceKind::SigmaPlus => {
            let v = map.b * vec(&inp[0..3]) / map.det;
            out[0..3].copy_from_slice(v.as_slice());
            let j = map.b * mat(&inp[3..12]) * map.b_inv / map.det;
            put(&mut out[3..12], &j);
        }
        SpaceKind::V => {
            let u = map.b_inv_t * vec(&inp[0..3]);
            out[0..3].copy_from_slice(u.as_slice());
            let c = map.b * vec(&inp[3..6]) / map.det;
            out[3..6].copy_from_slice(c.as_slice());
            let j = map.b * mat(&inp[6..15]) * map.b_inv / map.det;
            put(&mut out[6..15], &j);
        }
    }
}

/// A local space tabulated at the probe set of one quadrature degree.
#[derive(Debug)]
pub struct Family {
    pub kind: SpaceKind,
    pub config: ElementConfig,
    pub raw: Arc<RawSpace>,
    pub counts: DofCounts,
    pub probes: Arc<Probes>,
    tab_fixed: Vec<Vec<f64>>,
    tab_groups: Vec<[Vec<f64>; 3]>,
    tab_interior: Vec<Vec<f64>>,
}

impl Family {
    pub fn new(kind: SpaceKind, config: ElementConfig, quad_degree: usize) -> Result<Self> {
        let raw = raw_space(kind, config)?;
        let probes = Probes::cached(quad_degree);
        let deg = raw.max_degree() + 1;
        let tab_fixed = raw.fixed.iter().map(|f| tabulate(kind, f, &probes, deg)).collect();
        let tab_groups = raw
            .face_groups
            .iter()
            .map(|g| {
                std::array::from_fn(|c| tabulate(kind, &Field::Vector(g[c].clone()), &probes, deg))
            })
            .collect();
        let tab_interior = raw.interior.iter().map(|f| tabulate(kind, f, &probes, deg)).collect();
        Ok(Self {
            kind,
            config,
            counts: dof_counts(kind, config),
            raw,
            probes,
            tab_fixed,
            tab_groups,
            tab_interior,
        })
    }

    /// Cached family for a kind, configuration and quadrature degree.
    pub fn cached(kind: SpaceKind, config: ElementConfig, quad_degree: usize) -> Result<Arc<Family>> {
        type Key = (SpaceKind, ElementConfig, usize);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Family>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (kind, config, quad_degree);
        if let Some(f) = cache.lock().expect("family cache").get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(Family::new(kind, config, quad_degree)?);
        cache.lock().expect("family cache").insert(key, f.clone());
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.raw.dim()
    }

    /// Reference tables of the raw basis for given face directions,
    /// `nprobes·tab_len × dim`.
    pub fn reference_tables(&self, dirs: &[[f64; 3]; 4]) -> DMatrix<f64> {
        let nq = self.kind.tab_len();
        let rows = self.probes.len() * nq;
        let mut m = DMatrix::zeros(rows, self.dim());
        let mut col = 0;
        for t in &self.tab_fixed {
            m.column_mut(col).copy_from_slice(t);
            col += 1;
        }
        for (g, d) in self.tab_groups.iter().zip(dirs) {
            for i in 0..rows {
                m[(i, col)] = d[0] * g[0][i] + d[1] * g[1][i] + d[2] * g[2][i];
            }
            col += 1;
        }
        for t in &self.tab_interior {
            m.column_mut(col).copy_from_slice(t);
            col += 1;
        }
        m
    }

    pub fn cell_element(&self, geom: &CellGeometry) -> Result<CellElement> {
        self.cell_element_with_directions(geom, &geom.face_directions())
    }

    pub fn cell_element_with_directions(
        &self,
        geom: &CellGeometry,
        dirs: &[[f64; 3]; 4],
    ) -> Result<CellElement> {
        let nq = self.kind.tab_len();
        let n = self.dim();
        let reference = self.reference_tables(dirs);
        let mut raw = DMatrix::zeros(reference.nrows(), n);
        for j in 0..n {
            let src = reference.column(j);
            let mut dst = vec![0.0; nq];
            for p in 0..self.probes.len() {
                piola(self.kind, &geom.map, &src.as_slice()[p * nq..(p + 1) * nq], &mut dst);
                for q in 0..nq {
                    raw[(p * nq + q, j)] = dst[q];
                }
            }
        }
        let dofs = dof_rows(self.kind, self.config, geom, &self.probes);
        if dofs.len() != n {
            return Err(Error::Dimension {
                what: format!("{} DOFs {}", self.kind.name(), self.config),
                expected: n,
                got: dofs.len(),
            });
        }
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = raw.column(j);
            for (i, row) in dofs.iter().enumerate() {
                a[(i, j)] = row.apply(col.as_slice(), nq);
            }
        }
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = smax / smin;
        if !(smin > 1e-13 * smax) {
            let v_t = svd.v_t.as_ref().expect("right singular vectors");
            let imin = svd.singular_values.imin();
            let mut null: Vec<(f64, usize)> =
                (0..n).map(|j| (v_t[(imin, j)], j)).filter(|(c, _)| c.abs() > 1e-6).collect();
            null.sort_by(|x, y| y.0.abs().total_cmp(&x.0.abs()));
            return Err(Error::NotUnisolvent {
                what: format!("{} {}", self.kind.name(), self.config),
                null: null
                    .into_iter()
                    .map(|(c, j)| format!("{c:+.6e} * raw basis {j}"))
                    .collect(),
            });
        }
        let coeffs = a.try_inverse().ok_or(Error::SingularMap)?;
        let nodal = &raw * &coeffs;
        Ok(CellElement {
            kind: self.kind,
            n,
            nodal,
            coeffs,
            condition,
            dofs,
        })
    }
}

/// Nodal basis of one family on one cell.
#[derive(Clone, Debug)]
pub struct CellElement {
    pub kind: SpaceKind,
    pub n: usize,
    /// Physical quantities of the nodal basis, `nprobes·tab_len × n`.
    pub nodal: DMatrix<f64>,
    /// Inverse DOF matrix: nodal basis in terms of the mapped raw basis.
    pub coeffs: DMatrix<f64>,
    /// 2-norm condition number of the DOF matrix.
    pub condition: f64,
    pub dofs: Vec<DofRow>,
}

impl CellElement {
    /// DOF values of data given as `data[probe * stride + quantity]`.
    pub fn apply_dofs(&self, data: &[f64], stride: usize) -> Vec<f64> {
        self.dofs.iter().map(|r| r.apply(data, stride)).collect()
    }

    /// Quantity `q` of nodal function `j` at probe `p`.
    pub fn value(&self, p: usize, q: usize, j: usize) -> f64 {
        self.nodal[(p * self.kind.tab_len() + q, j)]
    }

    /// Largest deviation of `ℓ_i(φ_j)` from `δ_ij`.
    pub fn biorthogonality_error(&self) -> f64 {
        let nq = self.kind.tab_len();
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            let col = self.nodal.column(j);
            for (i, row) in self.dofs.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((row.apply(col.as_slice(), nq) - target).abs());
            }
        }
        worst
    }
}

/// Default quadrature degree `2·max(r, k+1) + 2`, raised to integrate the
/// mass matrix of every family exactly. A requested degree below that
/// requirement is rejected.
pub fn quadrature_degree(config: ElementConfig, requested: Option<usize>) -> Result<usize> {
    let mut required = 0;
    for kind in SpaceKind::ALL {
        required = required.max(2 * raw_space(kind, config)?.max_degree());
    }
    let default = (2 * config.r.max(config.k + 1) + 2).max(required);
    match requested {
        None => Ok(default),
        Some(q) if q < required => Err(Error::InvalidConfig(format!(
            "quadrature degree {q} is below the required {required} for {config}"
        ))),
        Some(q) => Ok(q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(r: usize, k: usize) -> ElementConfig {
        ElementConfig::new(r, k).unwrap()
    }

    #[test]
    fn probe_weights_sum_to_one() {
        let p = Probes::new(6);
        for e in &p.edges {
            assert!((e.iter().map(|x| x.2).sum::<f64>() - 1.0).abs() < 1e-14);
        }
        for f in &p.faces {
            assert!((f.iter().map(|x| x.2).sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert!((p.interior.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn lowest_order_unisolvent_on_reference() {
        let c = cfg(1, 1);
        let q = quadrature_degree(c, None).unwrap();
        let g = CellGeometry::reference();
        for kind in SpaceKind::ALL {
            let fam = Family::cached(kind, c, q).unwrap();
            let el = fam.cell_element(&g).unwrap();
            assert!(el.biorthogonality_error() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn w_lowest_order_is_indicator() {
        let c = cfg(1, 1);
        let q = quadrature_degree(c, None).unwrap();
        let g = CellGeometry::new([[0.0; 3], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.3, 0.2, 1.5]]).unwrap();
        let el = Family::cached(SpaceKind::W, c, q).unwrap().cell_element(&g).unwrap();
        for p in 0..el.nodal.nrows() {
            assert!((el.nodal[(p, 0)] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn low_quadrature_rejected() {
        assert!(quadrature_degree(cfg(1, 1), Some(2)).is_err());
    }
}
