//! Bubble fields on the Alfeld split of the reference tetrahedron.
//!
//! * [`build_split_space`]: continuous piecewise polynomials on the split,
//!   optionally with zero trace on the boundary.
//! * [`solve_div`]: a zero-trace continuous field with prescribed divergence,
//!   selected as the minimiser of the H¹ seminorm.
//! * [`face_bubbles`]: face bubbles corrected to constant divergence.
//! * [`interior_bubbles`]: zero-trace fields whose divergences span the
//!   mean-free homogeneous layers.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyalg::integrate::split_moments;
use crate::polyalg::piecewise::{subtet_vertices, Continuity, PiecewisePoly, PiecewiseVec};
use crate::polyalg::poly::factorial;
use crate::polyalg::{
    dim_h3, homogeneous_monomials, integrate_piecewise, integrate_reference, q, qi, AffineMapQ,
    MonomialIndex, Poly, QMatrix, VecPoly, Q,
};

/// Continuous piecewise-`P_m` scalar functions on the reference split.
#[derive(Clone, Debug)]
pub struct SplitC0Space {
    pub degree: usize,
    pub zero_trace: bool,
    pub basis: Vec<PiecewisePoly>,
}

impl SplitC0Space {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the vector-valued counterpart.
    pub fn vector_dim(&self) -> usize {
        3 * self.basis.len()
    }
}

/// Bernstein basis of continuous piecewise-`P_m` functions on the split.
///
/// Every domain point of the split carries one basis function, equal to the
/// local Bernstein polynomial on each subtet containing the point. Dropping
/// the domain points on the boundary of the tetrahedron gives the zero-trace
/// subspace.
pub fn build_split_space(m: usize, zero_trace: bool) -> Result<SplitC0Space> {
    if m == 0 {
        return Err(Error::InvalidConfig("split space degree must be >= 1".into()));
    }
    // Local barycentrics of each subtet; the center is local vertex `i`.
    let bary: Vec<[Poly; 4]> = (0..4)
        .map(|i| {
            let v = subtet_vertices(i);
            let map = AffineMapQ::from_vertices(&v).expect("subtets are non-degenerate");
            let [y1, y2, y3] = map.inverse_forms();
            let y0 = &(&(&Poly::one() - &y1) - &y2) - &y3;
            [y0, y1, y2, y3]
        })
        .collect();
    let multi: Vec<[usize; 4]> = {
        let mut out = Vec::new();
        for a in 0..=m {
            for b in 0..=m - a {
                for c in 0..=m - a - b {
                    out.push([a, b, c, m - a - b - c]);
                }
            }
        }
        out
    };
    let mfact = factorial(m);
    let mut points: BTreeMap<[Q; 3], [Poly; 4]> = BTreeMap::new();
    for i in 0..4 {
        let v = subtet_vertices(i);
        for alpha in &multi {
            if zero_trace && alpha[i] == 0 {
                continue;
            }
            let xi: [Q; 3] = std::array::from_fn(|c| {
                let mut s = Q::zero();
                for j in 0..4 {
                    s += &v[j][c] * qi(alpha[j] as i64);
                }
                s / qi(m as i64)
            });
            let denom: num_bigint::BigInt = alpha.iter().map(|&a| factorial(a)).product();
            let mut b = Poly::constant(Q::new(mfact.clone(), denom));
            for j in 0..4 {
                for _ in 0..alpha[j] {
                    b = &b * &bary[i][j];
                }
            }
            points.entry(xi).or_default()[i] = b;
        }
    }
    let basis = points
        .into_values()
        .map(|pieces| PiecewisePoly::new(pieces, Continuity::C0))
        .collect();
    Ok(SplitC0Space {
        degree: m,
        zero_trace,
        basis,
    })
}

/// Exact minimum-energy divergence solver for one degree.
///
/// A particular solution `x₀` of `Dx = p` is corrected within `ker D = span N`
/// so that `x = x₀ + Ny` minimises `xᵀGx`, with `G = diag(S, S, S)` the
/// scalar stiffness repeated on the three components.
struct DivSolver {
    space: SplitC0Space,
    /// Pieces × P_{k-1} monomials.
    target_index: MonomialIndex,
    d: QMatrix,
    null: QMatrix,
    /// `-(NᵀGN)⁻¹ NᵀG`.
    correction: QMatrix,
}

impl DivSolver {
    fn new(k: usize) -> Result<Self> {
        let space = build_split_space(k, true)?;
        let n = space.dim();
        let nx = 3 * n;
        let target_index = MonomialIndex::new(k - 1);
        let nt = target_index.len();
        let moments = split_moments();

        let grads: Vec<PiecewiseVec> = space.basis.iter().map(PiecewisePoly::grad).collect();
        let mut g = QMatrix::zeros(nx, nx);
        for a in 0..n {
            for b in a..n {
                let mut acc = Q::zero();
                for piece in 0..4 {
                    acc += moments
                        .integrate(piece, &grads[a].pieces[piece].dot(&grads[b].pieces[piece]));
                }
                for c in 0..3 {
                    g[(c * n + a, c * n + b)] = acc.clone();
                    g[(c * n + b, c * n + a)] = acc.clone();
                }
            }
        }

        // Row (piece, monomial); column (c, a) holds the coefficient of ∂_c φ_a.
        let mut d = QMatrix::zeros(4 * nt, nx);
        for c in 0..3 {
            for a in 0..n {
                for piece in 0..4 {
                    let der = space.basis[a].pieces[piece].deriv(c);
                    for (e, v) in der.terms() {
                        let row = piece * nt + target_index.index(e).expect("degree k-1");
                        d[(row, c * n + a)] = v.clone();
                    }
                }
            }
        }
        let null_vecs = d.nullspace();
        let mut null = QMatrix::zeros(nx, null_vecs.len());
        for (j, v) in null_vecs.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                null[(i, j)] = x.clone();
            }
        }
        let ntg = null.transpose().mul(&g);
        let h = ntg.mul(&null);
        let h_inv = h
            .inverse()
            .ok_or_else(|| Error::NoPreimage("singular split stiffness".into()))?;
        let mut correction = h_inv.mul(&ntg);
        for i in 0..correction.rows {
            for j in 0..correction.cols {
                correction[(i, j)] = -correction[(i, j)].clone();
            }
        }
        Ok(Self {
            space,
            target_index,
            d,
            null,
            correction,
        })
    }

    fn solve_many(&self, targets: &[PiecewisePoly]) -> Result<Vec<PiecewiseVec>> {
        let nt = self.target_index.len();
        let (rows, nx) = (self.d.rows, self.d.cols);
        let m = targets.len();
        let mut aug = QMatrix::zeros(rows, nx + m);
        for i in 0..rows {
            for j in 0..nx {
                aug[(i, j)] = self.d[(i, j)].clone();
            }
        }
        for (t, p) in targets.iter().enumerate() {
            for piece in 0..4 {
                for (e, v) in p.pieces[piece].terms() {
                    let Some(ix) = self.target_index.index(e) else {
                        return Err(Error::NoPreimage(format!(
                            "target degree exceeds {}",
                            self.space.degree - 1
                        )));
                    };
                    aug[(piece * nt + ix, nx + t)] = v.clone();
                }
            }
        }
        let pivots = aug.rref();
        if pivots.iter().any(|&p| p >= nx) {
            return Err(Error::NoPreimage(format!(
                "divergence target outside the image of the degree-{} zero-trace split space",
                self.space.degree
            )));
        }
        let n = self.space.dim();
        let mut out = Vec::with_capacity(m);
        for t in 0..m {
            let mut x = vec![Q::zero(); nx];
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = aug[(r, nx + t)].clone();
            }
            let y = self.correction.mul_vec(&x);
            let shift = self.null.mul_vec(&y);
            for (xi, si) in x.iter_mut().zip(shift) {
                *xi += si;
            }
            let comps: [PiecewisePoly; 3] = std::array::from_fn(|c| {
                let mut comp = PiecewisePoly::new(Default::default(), Continuity::C0);
                for a in 0..n {
                    let coef = &x[c * n + a];
                    if coef.is_zero() {
                        continue;
                    }
                    for piece in 0..4 {
                        comp.pieces[piece] += &self.space.basis[a].pieces[piece].scale(coef);
                    }
                }
                comp
            });
            let [c0, c1, c2] = comps;
            let pieces = std::array::from_fn(|i| {
                VecPoly::new(c0.pieces[i].clone(), c1.pieces[i].clone(), c2.pieces[i].clone())
            });
            out.push(PiecewiseVec::new(pieces, Continuity::C0));
        }
        Ok(out)
    }
}

fn div_solver(k: usize) -> Result<Arc<DivSolver>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DivSolver>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("solver cache").get(&k) {
        return Ok(s.clone());
    }
    let s = Arc::new(DivSolver::new(k)?);
    cache.lock().expect("solver cache").insert(k, s.clone());
    Ok(s)
}

/// Zero-trace continuous piecewise-`P_k` field with divergence `p`.
///
/// `p` must be piecewise `P_{k-1}` with zero mean. Among all solutions the
/// one of least H¹ seminorm is returned.
pub fn solve_div(p: &PiecewisePoly, k: usize) -> Result<PiecewiseVec> {
    Ok(solve_div_many(std::slice::from_ref(p), k)?.remove(0))
}

pub fn solve_div_many(ps: &[PiecewisePoly], k: usize) -> Result<Vec<PiecewiseVec>> {
    if k == 0 {
        return Err(Error::InvalidConfig("solve_div needs k >= 1".into()));
    }
    for p in ps {
        let mean = integrate_piecewise(p);
        if !mean.is_zero() {
            return Err(Error::NotMeanZero(mean.to_string()));
        }
    }
    div_solver(k)?.solve_many(ps)
}

/// Reference barycentric coordinates `λ_0..λ_3`.
pub fn barycentrics() -> [Poly; 4] {
    let x = Poly::var(0);
    let y = Poly::var(1);
    let z = Poly::var(2);
    let l0 = &(&(&Poly::one() - &x) - &y) - &z;
    [l0, x, y, z]
}

/// Scalar face bubble: product of the barycentrics of the face's vertices.
pub fn face_bubble_scalar(i: usize) -> Poly {
    let l = barycentrics();
    let mut p = Poly::one();
    for (j, lj) in l.iter().enumerate() {
        if j != i {
            p = &p * lj;
        }
    }
    p
}

/// Outward normal of reference face `i`, scaled by twice the face area so it
/// stays rational: `(1,1,1)` for face 0 and `-e_i` otherwise.
pub fn scaled_normal(i: usize) -> [Q; 3] {
    if i == 0 {
        [qi(1), qi(1), qi(1)]
    } else {
        let mut v = [qi(0), qi(0), qi(0)];
        v[i - 1] = qi(-1);
        v
    }
}

#[derive(Clone, Debug)]
pub struct FaceBubble {
    pub index: usize,
    /// `B_i ñ_i`.
    pub raw: VecPoly,
    pub modified: PiecewiseVec,
    pub divergence: Q,
}

/// Directionally corrected bubbles `B_i e_c - w_{i,c}` with constant
/// divergence, for each face `i` and Cartesian direction `c`.
pub fn directional_face_bubbles() -> Result<Arc<Vec<[PiecewiseVec; 3]>>> {
    static CACHE: OnceLock<Arc<Vec<[PiecewiseVec; 3]>>> = OnceLock::new();
    if let Some(v) = CACHE.get() {
        return Ok(v.clone());
    }
    let vol = q(1, 6);
    let mut targets = Vec::with_capacity(12);
    let mut raws = Vec::with_capacity(12);
    for i in 0..4 {
        let b = face_bubble_scalar(i);
        for c in 0..3 {
            let raw = VecPoly::along(b.clone(), c);
            let d = raw.div();
            let mean = integrate_reference(&d) / &vol;
            let mut t = d;
            t -= &Poly::constant(mean);
            targets.push(PiecewisePoly::single(t));
            raws.push(raw);
        }
    }
    let corrections = solve_div_many(&targets, 3)?;
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        out.push(std::array::from_fn(|c| {
            let raw = PiecewiseVec::single(raws[3 * i + c].clone());
            let mut m = raw.sub(&corrections[3 * i + c]);
            m.continuity = Continuity::C0;
            m
        }));
    }
    let v = Arc::new(out);
    let _ = CACHE.set(v.clone());
    Ok(v)
}

/// Combination `Σ_c d_c β_{i,c}` of directional bubbles.
pub fn combine_directional(group: &[PiecewiseVec; 3], d: &[Q; 3]) -> PiecewiseVec {
    let mut out = group[0].scale(&d[0]);
    out = out.add(&group[1].scale(&d[1]));
    out = out.add(&group[2].scale(&d[2]));
    out.continuity = Continuity::C0;
    out
}

/// The four normal face bubbles with constant divergence.
pub fn face_bubbles() -> Result<Vec<FaceBubble>> {
    let groups = directional_face_bubbles()?;
    (0..4)
        .map(|i| {
            let n = scaled_normal(i);
            let modified = combine_directional(&groups[i], &n);
            let b = face_bubble_scalar(i);
            let raw = VecPoly::new(
                b.scale(&n[0]),
                b.scale(&n[1]),
                b.scale(&n[2]),
            );
            let div = modified.div();
            let divergence = div.pieces[0].coeff(&[0, 0, 0]);
            Ok(FaceBubble {
                index: i,
                raw,
                modified,
                divergence,
            })
        })
        .collect()
}

/// Homogeneous layer basis of `S_k`: `H_k` for `k = 1`, `H_k ⊕ H_{k-1}` otherwise.
pub fn s_layer(k: usize) -> Vec<Poly> {
    let mut out: Vec<Poly> = homogeneous_monomials(k)
        .into_iter()
        .map(|e| Poly::monomial(e, Q::one()))
        .collect();
    if k >= 2 {
        out.extend(
            homogeneous_monomials(k - 1)
                .into_iter()
                .map(|e| Poly::monomial(e, Q::one())),
        );
    }
    out
}

/// Mean-free version of [`s_layer`] on the reference tetrahedron.
pub fn s_layer_mean_free(k: usize) -> Vec<Poly> {
    let vol = q(1, 6);
    s_layer(k)
        .into_iter()
        .map(|p| {
            let mean = integrate_reference(&p) / &vol;
            &p - &Poly::constant(mean)
        })
        .collect()
}

pub fn dim_s_layer(k: usize) -> usize {
    if k == 0 {
        0
    } else if k == 1 {
        dim_h3(1)
    } else {
        dim_h3(k as i64) + dim_h3(k as i64 - 1)
    }
}

#[derive(Clone, Debug)]
pub struct InteriorBubble {
    pub order: usize,
    pub target: Poly,
    pub field: PiecewiseVec,
}

/// Zero-trace bubbles of order `k + 1` with divergences `g_j ∈ S̊_k`.
pub fn interior_bubbles(k: usize) -> Result<Arc<Vec<InteriorBubble>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<InteriorBubble>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("bubble cache").get(&k) {
        return Ok(v.clone());
    }
    if k == 0 {
        return Err(Error::InvalidConfig("interior bubbles need k >= 1".into()));
    }
    let targets = s_layer_mean_free(k);
    let pw: Vec<PiecewisePoly> = targets.iter().cloned().map(PiecewisePoly::single).collect();
    let fields = solve_div_many(&pw, k + 1)?;
    let v = Arc::new(
        targets
            .into_iter()
            .zip(fields)
            .map(|(target, field)| InteriorBubble {
                order: k + 1,
                target,
                field,
            })
            .collect::<Vec<_>>(),
    );
    cache.lock().expect("bubble cache").insert(k, v.clone());
    Ok(v)
}

/// Text dump of a piecewise field's coefficient tables.
pub fn dump_bubble(name: &str, f: &PiecewiseVec) -> String {
    format!("## {name}\n{}", f.dump())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_space_dims() {
        assert_eq!(build_split_space(1, false).unwrap().dim(), 5);
        assert_eq!(build_split_space(1, false).unwrap().vector_dim(), 15);
        assert_eq!(build_split_space(1, true).unwrap().dim(), 1);
        assert_eq!(build_split_space(1, true).unwrap().vector_dim(), 3);
    }

    #[test]
    fn split_space_members_are_c0() {
        for zt in [false, true] {
            let s = build_split_space(2, zt).unwrap();
            for b in &s.basis {
                assert!(b.is_continuous());
                if zt {
                    assert!(b.has_zero_trace());
                }
            }
        }
    }

    #[test]
    fn solve_div_zero() {
        let v = solve_div(&PiecewisePoly::single(Poly::zero()), 2).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn solve_div_rejects_nonzero_mean() {
        let err = solve_div(&PiecewisePoly::single(Poly::one()), 2).unwrap_err();
        assert!(matches!(err, Error::NotMeanZero(_)));
    }

    #[test]
    fn solve_div_k1_indicator_pattern() {
        // Subtets have equal volume, so e_0 - e_1 indicators are mean-free.
        let mut pieces: [Poly; 4] = Default::default();
        pieces[0] = Poly::one();
        pieces[1] = -Poly::one();
        let p = PiecewisePoly::new(pieces, Continuity::L2);
        let v = solve_div(&p, 1).unwrap();
        assert_eq!(v.div().pieces, p.pieces);
        assert!(v.has_zero_trace());
        assert!(v.is_continuous());
    }

    #[test]
    fn face_bubble_divergence_constants() {
        let fb = face_bubbles().unwrap();
        assert_eq!(fb[0].divergence, q(3, 20));
        for b in &fb[1..] {
            assert_eq!(b.divergence, q(1, 20));
        }
        for b in &fb {
            let d = b.modified.div();
            assert!(d.pieces.iter().all(|p| *p == Poly::constant(b.divergence.clone())));
            let raw = PiecewiseVec::single(b.raw.clone());
            for f in 0..4 {
                assert_eq!(b.modified.boundary_trace(f), raw.boundary_trace(f));
            }
            assert!(!b.modified.is_single());
        }
    }

    #[test]
    fn interior_bubble_counts() {
        assert_eq!(interior_bubbles(1).unwrap().len(), 3);
        assert_eq!(dim_s_layer(2), 9);
    }
}
