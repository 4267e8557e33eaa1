//! Individual checks. Each returns its claims in a fixed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tag, Claim};
use crate::assembly::{
    numerical_rank, restrict_rect, CurlOf, Derivative, Discretization, DivOf,
    FieldSample, GradOf, PolyField, PolyScalar, ScalarSample, Target,
};
use crate::bubbles::{face_bubbles, scaled_normal};
use crate::elements::physical::quadrature_degree;
use crate::elements::reference::expected_dim;
use crate::elements::{
    exactness_table, poly_inclusion_degree, raw_space, CellGeometry, ElementConfig, Family, SpaceKind,
};
use crate::mesh::{aspect_ratio, Mesh};
use crate::polyalg::{
    monomials_upto, poincare1, poincare2, poincare3, q, qi, PiecewiseVec, Poly, VecPoly, Q,
};
use crate::problems::{CosPressure, SeparableField};

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Polynomial of degree at most `deg` with small integer coefficients.
pub(crate) fn random_poly(rng: &mut impl Rng, deg: usize) -> Poly {
    let mut p = Poly::zero();
    for e in monomials_upto(deg) {
        let c: i64 = rng.random_range(-3..=3);
        if c != 0 {
            p.add_term(e, qi(c));
        }
    }
    p
}

pub(crate) fn random_vec_poly(rng: &mut impl Rng, deg: usize) -> VecPoly {
    VecPoly::new(random_poly(rng, deg), random_poly(rng, deg), random_poly(rng, deg))
}

fn random_point(rng: &mut impl Rng) -> [Q; 3] {
    std::array::from_fn(|_| q(rng.random_range(-4..=4), rng.random_range(1..=5)))
}

/// Jittered regular tetrahedron with random size and position. The regular
/// tetrahedron has aspect ratio `2√6 ≈ 4.9`; jittered cells above 8 are
/// rejected.
pub fn random_shape_regular_cell(rng: &mut impl Rng) -> [[f64; 3]; 4] {
    const REGULAR: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    loop {
        let scale = rng.random_range(0.05..1.0);
        let shift: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let v: [[f64; 3]; 4] = REGULAR.map(|p| {
            std::array::from_fn(|d| shift[d] + scale * (p[d] + rng.random_range(-0.3..0.3)))
        });
        if aspect_ratio(&v) < 8.0 {
            return v;
        }
    }
}

pub fn dimensions(c: ElementConfig) -> Vec<Claim> {
    let id = format!("dimensions.{}", tag(c));
    let anchor = "local space dimensions agree with the closed-form counts";
    let mut dims = Vec::new();
    for kind in SpaceKind::ALL {
        match raw_space(kind, c) {
            Ok(s) => dims.push(s.dim()),
            Err(e) => return vec![Claim::error(id, anchor, &e)],
        }
    }
    let expect: Vec<usize> = SpaceKind::ALL.iter().map(|&k| expected_dim(k, c)).collect();
    let mut ok = dims == expect;
    if (c.r, c.k) == (1, 1) {
        ok &= dims == [4, 18, 16, 1];
    }
    vec![Claim::exact(id, anchor, ok, format!("{c}: dims {dims:?}, expected {expect:?}"))]
}

pub fn bubbles() -> Vec<Claim> {
    let anchor = "modified face bubble has constant divergence |ñ|²/20 and the trace of B_i ñ_i";
    let fb = match face_bubbles() {
        Ok(v) => v,
        Err(e) => return vec![Claim::error("bubbles", anchor, &e)],
    };
    fb.iter()
        .map(|b| {
            let n = scaled_normal(b.index);
            // Flux of B_i ñ_i through face i divided by |K|: ∫_F λλλ = |F|/60,
            // |F| = |ñ|/2 and |K| = 1/6.
            let nn: Q = n.iter().map(|x| x * x).sum();
            let expect = nn / qi(20);
            let div = b.modified.div();
            let constant = div.pieces.iter().all(|p| *p == Poly::constant(expect.clone()));
            let raw = PiecewiseVec::single(b.raw.clone());
            let traces = (0..4).all(|f| b.modified.boundary_trace(f) == raw.boundary_trace(f));
            let split = !b.modified.is_single();
            Claim::exact(
                format!("bubbles.face{}", b.index),
                anchor,
                constant && traces && split,
                format!(
                    "divergence {} (expected {expect}), traces match: {traces}, piecewise: {split}",
                    b.divergence
                ),
            )
        })
        .collect()
}

/// Null-homotopy and `𝔭∘𝔭 = 0` on random polynomials of degree `deg`
/// about random rational base points.
pub fn poincare(deg: usize, samples: usize, seed: u64) -> Claim {
    let mut rng = rng(seed, 100 + deg as u64);
    let mut failures = Vec::new();
    for s in 0..samples {
        let w = random_point(&mut rng);
        let u = random_vec_poly(&mut rng, deg);
        let p = random_poly(&mut rng, deg);
        let checks = [
            (&poincare1(&u, &w).grad() + &poincare2(&u.curl(), &w)) == u,
            (&poincare2(&u, &w).curl() + &poincare3(&u.div(), &w)) == u,
            poincare3(&p, &w).div() == p,
            &poincare1(&p.grad(), &w) + &Poly::constant(p.eval(&w)) == p,
            poincare1(&poincare2(&u, &w), &w).is_zero(),
            poincare2(&poincare3(&p, &w), &w).is_zero(),
        ];
        for (i, ok) in checks.iter().enumerate() {
            if !ok {
                failures.push((s, i));
            }
        }
    }
    Claim::new(
        format!("poincare.deg{deg}"),
        "d𝔭 + 𝔭d = id and 𝔭∘𝔭 = 0 for the ray-integral operators",
        failures.len() as f64,
        0.0,
        format!(
            "{samples} samples of degree {deg}; failing (sample, identity): {:?}",
            &failures[..failures.len().min(5)]
        ),
    )
}

pub fn exactness(c: ElementConfig) -> Vec<Claim> {
    let id = format!("exactness.{}", tag(c));
    let anchor = "local sequence Σ → V → Σ⁺ → W is exact on the reference cell";
    match exactness_table(c) {
        Ok(t) => vec![Claim::exact(
            id,
            anchor,
            t.is_exact(),
            format!(
                "{c}: dims ({}, {}, {}, {}), ranks grad {} curl {} div {}, alternating sum {}",
                t.dim_sigma, t.dim_v, t.dim_sigma_plus, t.dim_w, t.rank_grad, t.rank_curl, t.rank_div,
                t.alternating_sum
            ),
        )],
        Err(e) => vec![Claim::error(id, anchor, &e)],
    }
}

pub const CONDITION_BOUND: f64 = 1e8;

pub fn unisolvence(c: ElementConfig, cells: usize, seed: u64) -> Vec<Claim> {
    let anchor = "degrees of freedom are unisolvent on shape-regular cells";
    let qd = match quadrature_degree(c, None) {
        Ok(q) => q,
        Err(e) => return vec![Claim::error(format!("unisolvence.{}", tag(c)), anchor, &e)],
    };
    let mut rng = rng(seed, 200 + 10 * c.r as u64 + c.k as u64);
    let geoms: Vec<CellGeometry> = (0..cells)
        .filter_map(|_| CellGeometry::new(random_shape_regular_cell(&mut rng)).ok())
        .collect();
    SpaceKind::ALL
        .iter()
        .map(|&kind| {
            let id = format!("unisolvence.{}.{}", tag(c), kind.name());
            let fam = match Family::cached(kind, c, qd) {
                Ok(f) => f,
                Err(e) => return Claim::error(id, anchor, &e),
            };
            let mut worst: f64 = 0.0;
            let mut biorth: f64 = 0.0;
            for g in &geoms {
                match fam.cell_element(g) {
                    Ok(el) => {
                        worst = worst.max(el.condition);
                        biorth = biorth.max(el.biorthogonality_error());
                    }
                    Err(e) => return Claim::error(id, anchor, &e),
                }
            }
            let measured = if biorth < 1e-8 { worst } else { f64::INFINITY };
            Claim::new(
                id,
                anchor,
                measured,
                CONDITION_BOUND,
                format!(
                    "{c}: max DOF-matrix condition {worst:.3e} over {} cells, biorthogonality error {biorth:.1e}",
                    geoms.len()
                ),
            )
        })
        .collect()
}

/// Relative tolerance for the products of consecutive discrete derivatives.
pub const PRODUCT_TOL: f64 = 1e-12;
/// Relative singular-value cutoff for numerical ranks.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug)]
struct Ranks {
    dims: [usize; 4],
    grad: usize,
    curl: usize,
    div: usize,
}

impl Ranks {
    /// Exactness with `H⁰ = ℝ` and `H³ = 0` (free) or `H⁰ = 0` and
    /// `H³ = ℝ` (boundary restricted, mean-zero pressures).
    fn check(&self, restricted: bool) -> bool {
        let [s, v, sp, w] = self.dims;
        let (h0, h3) = if restricted { (0, 1) } else { (1, 0) };
        let alt = s as i64 - v as i64 + sp as i64 - w as i64;
        self.grad + h0 == s
            && v - self.curl == self.grad
            && self.curl == sp - self.div
            && self.div + h3 == w
            && alt == h0 as i64 - h3 as i64
    }
}

pub fn global(c: ElementConfig, n: usize) -> Vec<Claim> {
    let base = format!("global.{}.N{n}", tag(c));
    let anchor_c = "D_curl·D_grad = 0 and D_div·D_curl = 0 on the global spaces";
    let anchor_e = "global complex is exact on the cube: rank identities and Euler sum";
    let anchor_b = "boundary-restricted complex is exact with mean-zero pressures";
    let disc = match Discretization::structured(n, c) {
        Ok(d) => d,
        Err(e) => return vec![Claim::error(format!("{base}.complex"), anchor_c, &e)],
    };
    let dg = disc.discrete_d(Derivative::Grad);
    let dc = disc.discrete_d(Derivative::Curl);
    let dd = disc.discrete_d(Derivative::Div);
    let rel = |a: &crate::assembly::Csr, b: &crate::assembly::Csr| {
        let s = a.max_abs() * b.max_abs();
        if s == 0.0 {
            0.0
        } else {
            a.mul(b).max_abs() / s
        }
    };
    let cg = rel(&dc.matrix, &dg.matrix);
    let dcurl = rel(&dd.matrix, &dc.matrix);
    let conformity = [&dg, &dc, &dd]
        .iter()
        .map(|d| d.discrepancy / d.matrix.max_abs().max(1.0))
        .fold(0.0, f64::max);
    let mut out = vec![Claim::new(
        format!("{base}.complex"),
        anchor_c,
        cg.max(dcurl).max(conformity),
        PRODUCT_TOL,
        format!(
            "{c}: |DcDg|/(|Dc||Dg|) = {cg:.2e}, |DdDc|/(|Dd||Dc|) = {dcurl:.2e}, shared-DOF disagreement {conformity:.2e}"
        ),
    )];

    let kinds = SpaceKind::ALL;
    let dims = kinds.map(|k| disc.n_dofs(k));
    let rank = |m: &crate::assembly::Csr| numerical_rank(&m.to_dense(), RANK_TOL);
    let free = Ranks {
        dims,
        grad: rank(&dg.matrix),
        curl: rank(&dc.matrix),
        div: rank(&dd.matrix),
    };
    out.push(Claim::exact(
        format!("{base}.exact"),
        anchor_e,
        free.check(false),
        format!("{c}: dims {:?}, ranks grad {} curl {} div {}", free.dims, free.grad, free.curl, free.div),
    ));

    let (ms, mv, mp, mw) = (
        disc.map(SpaceKind::Sigma),
        disc.map(SpaceKind::V),
        disc.map(SpaceKind::SigmaPlus),
        disc.map(SpaceKind::W),
    );
    let bc = Ranks {
        dims: kinds.map(|k| disc.map(k).n_interior()),
        grad: rank(&restrict_rect(&dg.matrix, mv, ms)),
        curl: rank(&restrict_rect(&dc.matrix, mp, mv)),
        div: rank(&restrict_rect(&dd.matrix, mw, mp)),
    };
    out.push(Claim::exact(
        format!("{base}.exact_bc"),
        anchor_b,
        bc.check(true),
        format!("{c}: interior dims {:?}, ranks grad {} curl {} div {}", bc.dims, bc.grad, bc.curl, bc.div),
    ));
    out
}

/// Relative tolerance of the commuting identities.
pub const COMMUTING_TOL: f64 = 1e-10;

/// Quadrature degree for the commuting check. The trigonometric field is
/// resolved to round-off at this degree on `N = 2`.
const COMMUTING_QUADRATURE: usize = 24;

/// `u` with component `a` scaled by `s[a]`; not divergence-free when the
/// scales differ.
struct Stretch<'a>(&'a dyn FieldSample, [f64; 3]);

impl FieldSample for Stretch<'_> {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        let u = self.0.value(x);
        std::array::from_fn(|a| self.1[a] * u[a])
    }
    fn jacobian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let j = self.0.jacobian(x);
        std::array::from_fn(|a| j[a].map(|v| self.1[a] * v))
    }
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// The three commuting identities `r_V ∇ = D_grad r_Σ`, `r_Σ⁺ ∇× = D_curl r_V`
/// and `r_W ∇· = D_div r_Σ⁺` on random polynomial fields and the
/// trigonometric test field.
pub fn commuting(c: ElementConfig, n: usize, fields: usize, seed: u64) -> Vec<Claim> {
    let base = format!("commuting.{}.N{n}", tag(c));
    let anchors = [
        "interpolants commute with grad: r_V ∇p = ∇ r_Σ p",
        "interpolants commute with curl: r_Σ⁺ ∇×u = ∇× r_V u",
        "interpolants commute with div: r_W ∇·w = ∇· r_Σ⁺ w",
    ];
    let disc = match Mesh::structured_cube(n).and_then(|m| Discretization::new(m, c, Some(COMMUTING_QUADRATURE))) {
        Ok(d) => d,
        Err(e) => return vec![Claim::error(format!("{base}.grad"), anchors[0], &e)],
    };
    let dg = disc.discrete_d(Derivative::Grad).matrix;
    let dc = disc.discrete_d(Derivative::Curl).matrix;
    let dd = disc.discrete_d(Derivative::Div).matrix;
    let grad_err = |p: &dyn ScalarSample| {
        let lhs = disc.interpolate(SpaceKind::V, Target::Vector(&GradOf(p)));
        let rhs = dg.mul_vec(&disc.interpolate(SpaceKind::Sigma, Target::Scalar(p)));
        rel_diff(&lhs, &rhs)
    };
    let curl_err = |u: &dyn FieldSample| {
        let lhs = disc.interpolate(SpaceKind::SigmaPlus, Target::Vector(&CurlOf(u)));
        let rhs = dc.mul_vec(&disc.interpolate(SpaceKind::V, Target::Vector(u)));
        rel_diff(&lhs, &rhs)
    };
    let div_err = |w: &dyn FieldSample| {
        let lhs = disc.interpolate(SpaceKind::W, Target::Scalar(&DivOf(w)));
        let rhs = dd.mul_vec(&disc.interpolate(SpaceKind::SigmaPlus, Target::Vector(w)));
        rel_diff(&lhs, &rhs)
    };

    let deg = c.r.max(c.k + 1);
    let mut rng = rng(seed, 300 + 10 * c.r as u64 + c.k as u64);
    let mut worst = [0.0f64; 3];
    for _ in 0..fields {
        let p = PolyScalar::new(&random_poly(&mut rng, deg));
        let u = PolyField::new(&random_vec_poly(&mut rng, deg));
        let w = PolyField::new(&random_vec_poly(&mut rng, deg));
        worst[0] = worst[0].max(grad_err(&p));
        worst[1] = worst[1].max(curl_err(&u));
        worst[2] = worst[2].max(div_err(&w));
    }
    let trig = SeparableField::quadcurl_solution();
    let trig_err = [
        grad_err(&CosPressure),
        curl_err(&trig),
        div_err(&Stretch(&trig, [1.0, 2.0, 3.0])),
    ];
    ["grad", "curl", "div"]
        .iter()
        .enumerate()
        .map(|(i, name)| {
            Claim::new(
                format!("{base}.{name}"),
                anchors[i],
                worst[i].max(trig_err[i]),
                COMMUTING_TOL,
                format!(
                    "{c}: {fields} random fields of degree {deg}: {:.2e}; trigonometric field: {:.2e}",
                    worst[i], trig_err[i]
                ),
            )
        })
        .collect()
}

/// Polynomial reproduction of each interpolant on a perturbed mesh.
pub fn reproduction(c: ElementConfig, seed: u64) -> Vec<Claim> {
    let anchor = "interpolants reproduce the contained polynomial spaces";
    let id = format!("reproduction.{}", tag(c));
    let mut rng = rng(seed, 400 + 10 * c.r as u64 + c.k as u64);
    let mesh = match perturbed_cube(&mut rng) {
        Ok(m) => m,
        Err(e) => return vec![Claim::error(id, anchor, &e)],
    };
    let disc = match Discretization::new(mesh, c, None) {
        Ok(d) => d,
        Err(e) => return vec![Claim::error(id, anchor, &e)],
    };
    let degrees = [c.r, poly_inclusion_degree(c), c.k, c.k - 1];
    SpaceKind::ALL
        .iter()
        .zip(degrees)
        .map(|(&kind, deg)| {
            let rel = if kind.is_vector() {
                let u = PolyField::new(&random_vec_poly(&mut rng, deg));
                let x = disc.interpolate(kind, Target::Vector(&u));
                let e = disc.errors(kind, &x, Target::Vector(&u));
                let z = disc.errors(kind, &vec![0.0; x.len()], Target::Vector(&u));
                e.value / z.value.max(f64::MIN_POSITIVE)
            } else {
                let p = PolyScalar::new(&random_poly(&mut rng, deg));
                let x = disc.interpolate(kind, Target::Scalar(&p));
                let e = disc.errors(kind, &x, Target::Scalar(&p));
                let z = disc.errors(kind, &vec![0.0; x.len()], Target::Scalar(&p));
                e.value / z.value.max(f64::MIN_POSITIVE)
            };
            Claim::new(
                format!("{id}.{}", kind.name()),
                anchor,
                rel,
                1e-10,
                format!("{c}: relative L² error interpolating a random degree-{deg} polynomial"),
            )
        })
        .collect()
}

/// Unit cube with `N = 2` and randomly displaced interior vertex, so that
/// no two cells are translates of each other.
fn perturbed_cube(rng: &mut impl Rng) -> crate::Result<Mesh> {
    let m = Mesh::structured_cube(2)?;
    let mut vertices = m.vertices.clone();
    for (i, v) in vertices.iter_mut().enumerate() {
        if !m.boundary_vertices[i] {
            for x in v.iter_mut() {
                *x += rng.random_range(-0.1..0.1);
            }
        }
    }
    Mesh::from_cells(vertices, m.cells.clone())
}

/// Observed interpolation rates on the trigonometric field against the
/// expected orders `r`, `k+1` and `k` for `‖u − r_h u‖`, `‖∇×(u − r_h u)‖`
/// and `|∇×(u − r_h u)|₁`.
pub fn rates(c: ElementConfig, levels: &[usize]) -> Vec<Claim> {
    let anchor = [
        "interpolation error ‖u − r_h u‖ = O(h^min{s+r−k−1, r})",
        "interpolation error ‖∇×(u − r_h u)‖ = O(h^min{s, k+1})",
        "interpolation error |∇×(u − r_h u)|₁ = O(h^min{s−1, k})",
    ];
    let names = ["value", "curl", "grad_curl"];
    let id = |i: usize| format!("rates.{}.{}", tag(c), names[i]);
    if levels.len() < 2 {
        let e = crate::Error::InvalidConfig("rate check needs two levels".into());
        return (0..3).map(|i| Claim::error(id(i), anchor[i], &e)).collect();
    }
    let u = SeparableField::quadcurl_solution();
    let mut errs = Vec::new();
    for &n in levels {
        let disc = match Discretization::structured(n, c) {
            Ok(d) => d,
            Err(e) => return (0..3).map(|i| Claim::error(id(i), anchor[i], &e)).collect(),
        };
        let x = disc.interpolate(SpaceKind::V, Target::Vector(&u));
        let e = disc.errors(SpaceKind::V, &x, Target::Vector(&u));
        errs.push([e.value, e.first, e.second]);
    }
    let (n1, n2) = (levels[levels.len() - 2], levels[levels.len() - 1]);
    let (e1, e2) = (errs[errs.len() - 2], errs[errs.len() - 1]);
    let expected = [c.r as f64, (c.k + 1) as f64, c.k as f64];
    (0..3)
        .map(|i| {
            let observed = crate::problems::rate(e1[i], e2[i], n1, n2);
            Claim::at_least(
                id(i),
                anchor[i],
                observed,
                expected[i] - 0.3,
                format!(
                    "{c}: N {n1}→{n2}: errors {:.4e} → {:.4e}, rate {observed:.3}, expected {}",
                    e1[i], e2[i], expected[i]
                ),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(r: usize, k: usize) -> ElementConfig {
        ElementConfig::new(r, k).unwrap()
    }

    fn all_pass(claims: &[Claim]) -> bool {
        !claims.is_empty() && claims.iter().all(Claim::passed)
    }

    #[test]
    fn lowest_order_checks_pass() {
        let c = cfg(1, 1);
        assert!(all_pass(&dimensions(c)));
        assert!(all_pass(&exactness(c)));
        assert!(all_pass(&global(c, 1)));
        assert!(all_pass(&bubbles()));
    }

    #[test]
    fn poincare_low_degree() {
        assert!(poincare(2, 5, 7).passed());
    }

    #[test]
    fn random_cells_are_shape_regular() {
        let mut r = rng(3, 0);
        for _ in 0..20 {
            let cell = random_shape_regular_cell(&mut r);
            assert!(aspect_ratio(&cell) < 8.0);
        }
    }

    #[test]
    fn rng_streams_differ() {
        let a: u64 = rng(1, 0).random();
        let b: u64 = rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, rng(1, 0).random::<u64>());
    }
}
