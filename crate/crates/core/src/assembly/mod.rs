//! Global DOF numbering, assembled operators, interpolation, boundary
//! restriction and error norms.
//!
//! Cells of a structured mesh fall into a handful of congruence classes
//! under translation. Local elements, local matrices and local derivative
//! operators are computed once per class and scattered per cell.

pub mod dofmap;
pub mod quadrature;
pub mod sample;
pub mod sparse;

pub use dofmap::GlobalDofMap;
pub use sample::{
    CurlOf, DivOf, FieldSample, GradOf, PolyField, PolyScalar, ScalarSample, ZeroField,
};
pub use sparse::{numerical_rank, write_vector, Coo, Csr};

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::elements::physical::{quadrature_degree, Probes};
use crate::elements::{CellElement, CellGeometry, ElementConfig, Family, SpaceKind};
use crate::error::Result;
use crate::mesh::Mesh;

pub fn kind_index(kind: SpaceKind) -> usize {
    match kind {
        SpaceKind::Sigma => 0,
        SpaceKind::V => 1,
        SpaceKind::SigmaPlus => 2,
        SpaceKind::W => 3,
    }
}

/// Bilinear forms available for assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    /// `(u, v)` on any space.
    Mass(SpaceKind),
    /// `(∇∇×u, ∇∇×v) + (u, v)` on `V`.
    GradCurl,
    /// `(∇u, ∇v)` on `Σ⁺`.
    VectorLaplace,
    /// `(∇u, ∇v) + (u, v)` on `Σ⁺`.
    H1Gram,
    /// `(∇·v, q)` with rows in `W` and columns in `Σ⁺`.
    DivPressure,
}

impl Form {
    fn spaces(self) -> (SpaceKind, SpaceKind) {
        match self {
            Form::Mass(k) => (k, k),
            Form::GradCurl => (SpaceKind::V, SpaceKind::V),
            Form::VectorLaplace | Form::H1Gram => (SpaceKind::SigmaPlus, SpaceKind::SigmaPlus),
            Form::DivPressure => (SpaceKind::W, SpaceKind::SigmaPlus),
        }
    }
}

/// Exterior derivatives of the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Derivative {
    Grad,
    Curl,
    Div,
}

impl Derivative {
    pub fn source(self) -> SpaceKind {
        match self {
            Derivative::Grad => SpaceKind::Sigma,
            Derivative::Curl => SpaceKind::V,
            Derivative::Div => SpaceKind::SigmaPlus,
        }
    }

    pub fn target(self) -> SpaceKind {
        match self {
            Derivative::Grad => SpaceKind::V,
            Derivative::Curl => SpaceKind::SigmaPlus,
            Derivative::Div => SpaceKind::W,
        }
    }
}

/// Global derivative matrix with the largest disagreement between cells
/// sharing a target DOF.
#[derive(Clone, Debug)]
pub struct DiscreteDerivative {
    pub matrix: Csr,
    pub discrepancy: f64,
}

/// Norms of `u − u_h` per space.
///
/// | space | `value` | `first` | `second` |
/// |---|---|---|---|
/// | `Σ` | `‖e‖` | `‖∇e‖` | 0 |
/// | `V` | `‖e‖` | `‖∇×e‖` | `|∇×e|₁` |
/// | `Σ⁺` | `‖e‖` | `|e|₁` | `‖∇·e‖` |
/// | `W` | `‖e‖` | 0 | 0 |
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl ErrorNorms {
    /// `(‖e‖² + ‖∇×e‖²)^{1/2}` for `V`.
    pub fn h_curl(&self) -> f64 {
        self.value.hypot(self.first)
    }
}

/// Target for interpolation.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Scalar(&'a dyn ScalarSample),
    Vector(&'a dyn FieldSample),
}

/// Local objects shared by all cells congruent under translation.
#[derive(Debug)]
pub struct CellClass {
    pub geometry: CellGeometry,
    pub elements: [CellElement; 4],
    /// Nodal quantities at the interior probes, `nint·tab_len × n`.
    interior: [DMatrix<f64>; 4],
    /// Probes referenced by each family's DOFs.
    dof_probes: [Vec<usize>; 4],
}

/// All four discrete spaces on one mesh.
#[derive(Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub config: ElementConfig,
    pub quad_degree: usize,
    pub families: [Arc<Family>; 4],
    pub maps: [GlobalDofMap; 4],
    pub cell_class: Vec<usize>,
    pub classes: Vec<CellClass>,
}

fn class_key(geom: &CellGeometry, scale: f64) -> Vec<i64> {
    geom.map.b.iter().map(|v| (v / scale * 1e9).round() as i64).collect()
}

impl Discretization {
    pub fn new(mesh: Mesh, config: ElementConfig, quad: Option<usize>) -> Result<Self> {
        let quad_degree = quadrature_degree(config, quad)?;
        let families = [
            Family::cached(SpaceKind::Sigma, config, quad_degree)?,
            Family::cached(SpaceKind::V, config, quad_degree)?,
            Family::cached(SpaceKind::SigmaPlus, config, quad_degree)?,
            Family::cached(SpaceKind::W, config, quad_degree)?,
        ];
        let maps = SpaceKind::ALL.map(|k| GlobalDofMap::new(&mesh, k, config));
        let geoms: Vec<CellGeometry> = (0..mesh.cells.len())
            .map(|c| CellGeometry::new(mesh.cell_vertices(c)))
            .collect::<Result<_>>()?;
        let scale = geoms
            .iter()
            .map(|g| g.edge_length.iter().copied().fold(0.0, f64::max))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut keys: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut reps = Vec::new();
        let cell_class = geoms
            .iter()
            .enumerate()
            .map(|(c, g)| {
                *keys.entry(class_key(g, scale)).or_insert_with(|| {
                    reps.push(c);
                    reps.len() - 1
                })
            })
            .collect();
        let classes = reps
            .par_iter()
            .map(|&c| build_class(&families, geoms[c].clone()))
            .collect::<Result<Vec<_>>>()?;
        log::debug!(
            "discretization {config} on {} cells: {} classes, quadrature degree {quad_degree}",
            mesh.cells.len(),
            classes.len()
        );
        Ok(Self {
            mesh,
            config,
            quad_degree,
            families,
            maps,
            cell_class,
            classes,
        })
    }

    pub fn structured(n: usize, config: ElementConfig) -> Result<Self> {
        Self::new(Mesh::structured_cube(n)?, config, None)
    }

    pub fn map(&self, kind: SpaceKind) -> &GlobalDofMap {
        &self.maps[kind_index(kind)]
    }

    pub fn n_dofs(&self, kind: SpaceKind) -> usize {
        self.map(kind).n_dofs
    }

    pub fn element(&self, kind: SpaceKind, cell: usize) -> &CellElement {
        &self.classes[self.cell_class[cell]].elements[kind_index(kind)]
    }

    /// Largest DOF-matrix condition number over all classes and spaces.
    pub fn max_condition(&self) -> f64 {
        self.classes
            .iter()
            .flat_map(|c| c.elements.iter().map(|e| e.condition))
            .fold(0.0, f64::max)
    }

    fn probes(&self) -> &Probes {
        &self.families[0].probes
    }

    /// Local matrix of a form on one class.
    fn local_matrix(&self, form: Form, class: &CellClass) -> DMatrix<f64> {
        let pr = self.probes();
        let vol = class.geometry.volume;
        let weights: Vec<f64> = pr.interior.iter().map(|&(_, w)| w * vol).collect();
        let (rk, ck) = form.spaces();
        let select = |kind: SpaceKind, qs: &[Vec<(usize, f64)>]| {
            combine(&class.interior[kind_index(kind)], kind.tab_len(), qs)
        };
        let gram = |kind: SpaceKind, range: std::ops::Range<usize>| {
            let qs: Vec<Vec<(usize, f64)>> = range.map(|q| vec![(q, 1.0)]).collect();
            let g = select(kind, &qs);
            weighted_gram(&g, &g, &weights, qs.len())
        };
        match form {
            Form::Mass(kind) => gram(kind, 0..if kind.is_vector() { 3 } else { 1 }),
            Form::GradCurl => gram(SpaceKind::V, 6..15) + gram(SpaceKind::V, 0..3),
            Form::VectorLaplace => gram(SpaceKind::SigmaPlus, 3..12),
            Form::H1Gram => gram(SpaceKind::SigmaPlus, 3..12) + gram(SpaceKind::SigmaPlus, 0..3),
            Form::DivPressure => {
                let q = select(rk, &[vec![(0, 1.0)]]);
                let d = select(ck, &[vec![(3, 1.0), (7, 1.0), (11, 1.0)]]);
                weighted_gram(&q, &d, &weights, 1)
            }
        }
    }

    /// Assembles a bilinear form over all cells.
    pub fn assemble(&self, form: Form) -> Csr {
        let locals: Vec<DMatrix<f64>> =
            self.classes.par_iter().map(|c| self.local_matrix(form, c)).collect();
        let (rk, ck) = form.spaces();
        let (rmap, cmap) = (self.map(rk), self.map(ck));
        let mut coo = Coo::new(rmap.n_dofs, cmap.n_dofs);
        for c in 0..self.mesh.cells.len() {
            let m = &locals[self.cell_class[c]];
            let (rd, cd) = (&rmap.cell_dofs[c], &cmap.cell_dofs[c]);
            for (i, &gi) in rd.iter().enumerate() {
                for (j, &gj) in cd.iter().enumerate() {
                    let v = m[(i, j)];
                    if v != 0.0 {
                        coo.push(gi, gj, v);
                    }
                }
            }
        }
        coo.to_csr()
    }

    /// `(f, φ_i)` for the basis of a vector space, or of a scalar space
    /// when `f` is given through [`Target::Scalar`].
    pub fn load(&self, kind: SpaceKind, f: Target<'_>) -> Vec<f64> {
        let pr = self.probes();
        let nq = kind.tab_len();
        let map = self.map(kind);
        let per_cell: Vec<Vec<f64>> = (0..self.mesh.cells.len())
            .into_par_iter()
            .map(|c| {
                let class = &self.classes[self.cell_class[c]];
                let g = &class.geometry;
                let shift = self.shift(c, g);
                let m = &class.interior[kind_index(kind)];
                let mut out = vec![0.0; m.ncols()];
                for (ip, &(p, w)) in pr.interior.iter().enumerate() {
                    let x = add(&g.to_physical(&pr.points[p]), &shift);
                    let wv = w * g.volume;
                    let vals: Vec<f64> = match f {
                        Target::Scalar(s) => vec![s.value(&x)],
                        Target::Vector(v) => v.value(&x).to_vec(),
                    };
                    for (j, o) in out.iter_mut().enumerate() {
                        let s: f64 = vals.iter().enumerate().map(|(q, fv)| fv * m[(ip * nq + q, j)]).sum();
                        *o += wv * s;
                    }
                }
                out
            })
            .collect();
        let mut b = vec![0.0; map.n_dofs];
        for (c, loc) in per_cell.iter().enumerate() {
            for (i, &gi) in map.cell_dofs[c].iter().enumerate() {
                b[gi] += loc[i];
            }
        }
        b
    }

    /// Translation from a class representative to cell `c`.
    fn shift(&self, c: usize, rep: &CellGeometry) -> [f64; 3] {
        let v0 = self.mesh.vertices[self.mesh.cells[c][0]];
        std::array::from_fn(|d| v0[d] - rep.vertices[0][d])
    }

    /// Global matrix of `d`, built by applying target DOFs to derivatives
    /// of source nodal functions cell by cell. Shared target DOFs are
    /// overwritten; the largest disagreement is reported.
    pub fn discrete_d(&self, d: Derivative) -> DiscreteDerivative {
        let (sk, tk) = (d.source(), d.target());
        let (smap, tmap) = (self.map(sk), self.map(tk));
        let locals: Vec<DMatrix<f64>> = self.classes.iter().map(|c| local_derivative(d, c)).collect();
        let mut entries: HashMap<(usize, usize), f64> = HashMap::new();
        let mut discrepancy: f64 = 0.0;
        for c in 0..self.mesh.cells.len() {
            let m = &locals[self.cell_class[c]];
            for (i, &gi) in tmap.cell_dofs[c].iter().enumerate() {
                for (j, &gj) in smap.cell_dofs[c].iter().enumerate() {
                    let v = m[(i, j)];
                    match entries.entry((gi, gj)) {
                        std::collections::hash_map::Entry::Occupied(e) => {
                            discrepancy = discrepancy.max((e.get() - v).abs());
                        }
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(v);
                        }
                    }
                }
            }
        }
        let mut coo = Coo::new(tmap.n_dofs, smap.n_dofs);
        let scale = entries.values().fold(0.0f64, |m, v| m.max(v.abs()));
        for ((i, j), v) in entries {
            if v.abs() > 1e-14 * scale {
                coo.push(i, j, v);
            }
        }
        DiscreteDerivative {
            matrix: coo.to_csr(),
            discrepancy,
        }
    }

    /// Canonical interpolant: global DOFs evaluated on the target.
    pub fn interpolate(&self, kind: SpaceKind, f: Target<'_>) -> Vec<f64> {
        let pr = self.probes();
        let stride = kind.input_len();
        let ki = kind_index(kind);
        let map = self.map(kind);
        let per_cell: Vec<Vec<f64>> = (0..self.mesh.cells.len())
            .into_par_iter()
            .map(|c| {
                let class = &self.classes[self.cell_class[c]];
                let g = &class.geometry;
                let shift = self.shift(c, g);
                let mut data = vec![0.0; pr.len() * stride];
                for &p in &class.dof_probes[ki] {
                    let x = add(&g.to_physical(&pr.points[p]), &shift);
                    let slot = &mut data[p * stride..(p + 1) * stride];
                    match f {
                        Target::Scalar(s) => slot[0] = s.value(&x),
                        Target::Vector(v) => {
                            slot[..3].copy_from_slice(&v.value(&x));
                            if stride == 6 {
                                slot[3..].copy_from_slice(&v.curl(&x));
                            }
                        }
                    }
                }
                class.elements[ki].apply_dofs(&data, stride)
            })
            .collect();
        let mut out = vec![0.0; map.n_dofs];
        for (c, loc) in per_cell.iter().enumerate() {
            for (i, &gi) in map.cell_dofs[c].iter().enumerate() {
                out[gi] = loc[i];
            }
        }
        out
    }

    /// Norms of `f − u_h` by the interior quadrature.
    pub fn errors(&self, kind: SpaceKind, coeffs: &[f64], f: Target<'_>) -> ErrorNorms {
        let pr = self.probes();
        let nq = kind.tab_len();
        let ki = kind_index(kind);
        let map = self.map(kind);
        assert_eq!(coeffs.len(), map.n_dofs);
        let parts: Vec<[f64; 3]> = (0..self.mesh.cells.len())
            .into_par_iter()
            .map(|c| {
                let class = &self.classes[self.cell_class[c]];
                let g = &class.geometry;
                let shift = self.shift(c, g);
                let m = &class.interior[ki];
                let local: Vec<f64> = map.cell_dofs[c].iter().map(|&i| coeffs[i]).collect();
                let vals = m * nalgebra::DVector::from_vec(local);
                let mut acc = [0.0; 3];
                for (ip, &(p, w)) in pr.interior.iter().enumerate() {
                    let x = add(&g.to_physical(&pr.points[p]), &shift);
                    let h = &vals.as_slice()[ip * nq..(ip + 1) * nq];
                    let e = exact_quantities(kind, f, &x);
                    let groups = error_groups(kind);
                    for (slot, range) in groups.iter().enumerate() {
                        let s: f64 = match range {
                            Group::Range(r) => r.clone().map(|q| (e[q] - h[q]).powi(2)).sum(),
                            Group::Trace => {
                                let t = |v: &[f64]| v[3] + v[7] + v[11];
                                (t(&e) - t(h)).powi(2)
                            }
                            Group::None => 0.0,
                        };
                        acc[slot] += w * g.volume * s;
                    }
                }
                acc
            })
            .collect();
        let mut sum = [0.0; 3];
        for p in &parts {
            for i in 0..3 {
                sum[i] += p[i];
            }
        }
        ErrorNorms {
            value: sum[0].sqrt(),
            first: sum[1].sqrt(),
            second: sum[2].sqrt(),
        }
    }

    /// `‖∇·u_h‖` for `u_h ∈ Σ⁺`.
    pub fn div_norm(&self, coeffs: &[f64]) -> f64 {
        self.errors(SpaceKind::SigmaPlus, coeffs, Target::Vector(&ZeroField)).second
    }
}

fn add(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

enum Group {
    Range(std::ops::Range<usize>),
    Trace,
    None,
}

fn error_groups(kind: SpaceKind) -> [Group; 3] {
    match kind {
        SpaceKind::Sigma => [Group::Range(0..1), Group::Range(1..4), Group::None],
        SpaceKind::V => [Group::Range(0..3), Group::Range(3..6), Group::Range(6..15)],
        SpaceKind::SigmaPlus => [Group::Range(0..3), Group::Range(3..12), Group::Trace],
        SpaceKind::W => [Group::Range(0..1), Group::None, Group::None],
    }
}

/// Exact quantities in the tabulation layout of `kind`.
fn exact_quantities(kind: SpaceKind, f: Target<'_>, x: &[f64; 3]) -> Vec<f64> {
    match (kind, f) {
        (SpaceKind::Sigma, Target::Scalar(s)) => {
            let g = s.grad(x);
            vec![s.value(x), g[0], g[1], g[2]]
        }
        (SpaceKind::W, Target::Scalar(s)) => vec![s.value(x)],
        (SpaceKind::SigmaPlus, Target::Vector(v)) => {
            let mut out = v.value(x).to_vec();
            out.extend(v.jacobian(x).iter().flatten());
            out
        }
        (SpaceKind::V, Target::Vector(v)) => {
            let mut out = v.value(x).to_vec();
            out.extend(v.curl(x));
            out.extend(v.grad_curl(x).iter().flatten());
            out
        }
        _ => panic!("target type does not match {kind:?}"),
    }
}

fn build_class(families: &[Arc<Family>; 4], geometry: CellGeometry) -> Result<CellClass> {
    let elements = [
        families[0].cell_element(&geometry)?,
        families[1].cell_element(&geometry)?,
        families[2].cell_element(&geometry)?,
        families[3].cell_element(&geometry)?,
    ];
    let pr = &families[0].probes;
    let interior = std::array::from_fn(|i| {
        let el = &elements[i];
        let nq = el.kind.tab_len();
        let mut m = DMatrix::zeros(pr.interior.len() * nq, el.n);
        for (ip, &(p, _)) in pr.interior.iter().enumerate() {
            for q in 0..nq {
                m.row_mut(ip * nq + q).copy_from(&el.nodal.row(p * nq + q));
            }
        }
        m
    });
    let dof_probes = std::array::from_fn(|i| {
        let mut ps: Vec<usize> =
            elements[i].dofs.iter().flat_map(|r| r.terms.iter().map(|t| t.0)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    });
    Ok(CellClass {
        geometry,
        elements,
        interior,
        dof_probes,
    })
}

/// Rows `ip·len(qs) + s` hold the `s`-th linear combination of quantities.
fn combine(m: &DMatrix<f64>, nq: usize, qs: &[Vec<(usize, f64)>]) -> DMatrix<f64> {
    let nint = m.nrows() / nq;
    let mut out = DMatrix::zeros(nint * qs.len(), m.ncols());
    for ip in 0..nint {
        for (s, comb) in qs.iter().enumerate() {
            for &(q, c) in comb.iter() {
                let src = m.row(ip * nq + q) * c;
                let mut dst = out.row_mut(ip * qs.len() + s);
                dst += src;
            }
        }
    }
    out
}

/// `Aᵀ diag(w ⊗ 1_len) B`.
fn weighted_gram(a: &DMatrix<f64>, b: &DMatrix<f64>, w: &[f64], len: usize) -> DMatrix<f64> {
    let mut bw = b.clone();
    for (ip, &wi) in w.iter().enumerate() {
        for s in 0..len {
            bw.row_mut(ip * len + s).scale_mut(wi);
        }
    }
    a.transpose() * bw
}

/// Local derivative matrix `ℓ_i^target(d φ_j^source)` on one class.
fn local_derivative(d: Derivative, class: &CellClass) -> DMatrix<f64> {
    let (sk, tk) = (d.source(), d.target());
    let src = &class.elements[kind_index(sk)];
    let tgt = &class.elements[kind_index(tk)];
    let (snq, stride) = (sk.tab_len(), tk.input_len());
    let nprobes = src.nodal.nrows() / snq;
    let mut out = DMatrix::zeros(tgt.n, src.n);
    let mut data = vec![0.0; nprobes * stride];
    for j in 0..src.n {
        let col = src.nodal.column(j);
        let col = col.as_slice();
        for p in 0..nprobes {
            let s = &col[p * snq..(p + 1) * snq];
            let slot = &mut data[p * stride..(p + 1) * stride];
            match d {
                // Σ: [φ, ∇φ] → V input [u, curl u] with curl ∇φ = 0.
                Derivative::Grad => {
                    slot[..3].copy_from_slice(&s[1..4]);
                    slot[3..6].fill(0.0);
                }
                // V: [u, curl u, ...] → Σ⁺ input [u].
                Derivative::Curl => slot.copy_from_slice(&s[3..6]),
                // Σ⁺: [u, J] → W input [q].
                Derivative::Div => slot[0] = s[3] + s[7] + s[11],
            }
        }
        let vals = tgt.apply_dofs(&data, stride);
        out.column_mut(j).copy_from_slice(&vals);
    }
    out
}

/// Restricts a square operator to the interior DOFs of `map`.
pub fn restrict_square(a: &Csr, map: &GlobalDofMap) -> Csr {
    let idx = map.interior_dofs();
    a.restrict(&idx, &idx)
}

/// Restricts rows and columns to interior DOFs of the respective maps.
pub fn restrict_rect(a: &Csr, rows: &GlobalDofMap, cols: &GlobalDofMap) -> Csr {
    a.restrict(&rows.interior_dofs(), &cols.interior_dofs())
}

/// Entries of `x` on interior DOFs.
pub fn restrict_vector(x: &[f64], map: &GlobalDofMap) -> Vec<f64> {
    map.interior_dofs().iter().map(|&i| x[i]).collect()
}

/// Scatters interior values back into a full vector with zero boundary.
pub fn extend_vector(x: &[f64], map: &GlobalDofMap) -> Vec<f64> {
    let mut out = vec![0.0; map.n_dofs];
    for (v, i) in x.iter().zip(map.interior_dofs()) {
        out[i] = *v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(r: usize, k: usize) -> ElementConfig {
        ElementConfig::new(r, k).unwrap()
    }

    #[test]
    fn structured_mesh_has_six_classes() {
        let d = Discretization::structured(2, cfg(1, 1)).unwrap();
        assert_eq!(d.classes.len(), 6);
    }

    #[test]
    fn w_mass_row_sums_are_volumes() {
        let d = Discretization::structured(2, cfg(1, 1)).unwrap();
        let m = d.assemble(Form::Mass(SpaceKind::W));
        for c in 0..d.mesh.cells.len() {
            let s: f64 = m.row(c).map(|(_, v)| v).sum();
            assert!((s - d.mesh.cell_volume(c)).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_property_of_derivatives() {
        let d = Discretization::structured(1, cfg(1, 1)).unwrap();
        let g = d.discrete_d(Derivative::Grad);
        let c = d.discrete_d(Derivative::Curl);
        let v = d.discrete_d(Derivative::Div);
        assert!(g.discrepancy < 1e-10 && c.discrepancy < 1e-10 && v.discrepancy < 1e-10);
        assert!(c.matrix.mul(&g.matrix).max_abs() < 1e-12);
        assert!(v.matrix.mul(&c.matrix).max_abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        use crate::polyalg::{qi, Poly, VecPoly};
        let x = Poly::var(0);
        let z = Poly::var(2);
        let u = VecPoly::new(z.clone(), x.clone() + Poly::constant(qi(2)), &x - &z);
        let f = PolyField::new(&u);
        // V contains P_1³ once r ≥ 2; Σ⁺ always does.
        for (c, kind) in [(cfg(2, 1), SpaceKind::V), (cfg(1, 1), SpaceKind::SigmaPlus)] {
            let d = Discretization::structured(2, c).unwrap();
            let coeffs = d.interpolate(kind, Target::Vector(&f));
            let e = d.errors(kind, &coeffs, Target::Vector(&f));
            assert!(e.value < 1e-12 && e.first < 1e-11, "{kind:?} {e:?}");
        }
    }

    #[test]
    fn gradcurl_form_sees_only_mass_on_gradients() {
        let d = Discretization::structured(1, cfg(1, 1)).unwrap();
        let a = d.assemble(Form::GradCurl);
        let m = d.assemble(Form::Mass(SpaceKind::V));
        let g = d.discrete_d(Derivative::Grad).matrix;
        let phi: Vec<f64> = (0..d.n_dofs(SpaceKind::Sigma)).map(|i| (i as f64 * 0.7).sin()).collect();
        let u = g.mul_vec(&phi);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let ea = dot(&u, &a.mul_vec(&u));
        let em = dot(&u, &m.mul_vec(&u));
        assert!((ea - em).abs() < 1e-12 * em.abs().max(1.0));
    }
}
