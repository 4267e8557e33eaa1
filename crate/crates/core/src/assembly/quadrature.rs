//! Gauss–Jacobi based conical product rules on the reference segment,
//! triangle and tetrahedron, plus the Alfeld-split interior rule.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::polyalg::piecewise::{reference_vertices, split_center};
use crate::polyalg::q_to_f64;

/// Nodes and weights of the `n`-point Gauss–Jacobi rule on `[0, 1]` for the
/// weight `(1 - t)^alpha`, via Golub–Welsch.
pub fn gauss_jacobi01(n: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let a = f64::from(alpha);
    let b = 0.0;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let nf = i as f64;
        let s = 2.0 * nf + a + b;
        j[(i, i)] = if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if i + 1 < n {
            let m = nf + 1.0;
            let s = 2.0 * m + a + b;
            let num = 4.0 * m * (m + a) * (m + b) * (m + a + b);
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    // μ₀ = ∫_{-1}^{1} (1-s)^α ds = 2^{α+1}/(α+1); the map to [0,1] contributes 2^{-(α+1)}.
    let mu0_unit = 1.0 / (a + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + eig.eigenvalues[i]) / 2.0, mu0_unit * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Rule on `[0, 1]` with weights summing to 1.
#[derive(Clone, Debug)]
pub struct SegmentRule {
    pub degree: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SegmentRule {
    pub fn new(degree: usize) -> Self {
        let (points, weights) = gauss_jacobi01(points_for_degree(degree), 0);
        Self {
            degree,
            points,
            weights,
        }
    }
}

/// Rule on the triangle `{s, t ≥ 0, s + t ≤ 1}` with weights summing to 1.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub degree: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    pub fn new(degree: usize) -> Self {
        let n = points_for_degree(degree);
        let (u, wu) = gauss_jacobi01(n, 1);
        let (v, wv) = gauss_jacobi01(n, 0);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (ui, wi) in u.iter().zip(&wu) {
            for (vj, wj) in v.iter().zip(&wv) {
                points.push([*ui, vj * (1.0 - ui)]);
                // ∫(1-u) du = 1/2 is the triangle area.
                weights.push(2.0 * wi * wj);
            }
        }
        Self {
            degree,
            points,
            weights,
        }
    }
}

/// Rule on the reference tetrahedron with weights summing to `1/6`.
#[derive(Clone, Debug)]
pub struct TetRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TetRule {
    pub fn new(degree: usize) -> Self {
        let n = points_for_degree(degree);
        let (u, wu) = gauss_jacobi01(n, 2);
        let (v, wv) = gauss_jacobi01(n, 1);
        let (w, ww) = gauss_jacobi01(n, 0);
        let mut points = Vec::with_capacity(n * n * n);
        let mut weights = Vec::with_capacity(n * n * n);
        for (ui, wi) in u.iter().zip(&wu) {
            for (vj, wj) in v.iter().zip(&wv) {
                for (wk, wwk) in w.iter().zip(&ww) {
                    let x = *ui;
                    let y = vj * (1.0 - ui);
                    let z = wk * (1.0 - ui) * (1.0 - vj);
                    points.push([x, y, z]);
                    weights.push(wi * wj * wwk);
                }
            }
        }
        Self {
            degree,
            points,
            weights,
        }
    }

    /// The rule mapped into each subtetrahedron of the reference Alfeld split.
    /// Returns `(point, weight, piece)` with weights summing to `1/6`.
    pub fn alfeld(&self) -> Vec<([f64; 3], f64, usize)> {
        let c = split_center().map(|x| q_to_f64(&x));
        let verts = reference_vertices().map(|v| v.map(|x| q_to_f64(&x)));
        let mut out = Vec::with_capacity(4 * self.points.len());
        for piece in 0..4 {
            let mut sv = verts;
            sv[piece] = c;
            for (p, w) in self.points.iter().zip(&self.weights) {
                let l = [1.0 - p[0] - p[1] - p[2], p[0], p[1], p[2]];
                let mut x = [0.0; 3];
                for (li, vi) in l.iter().zip(&sv) {
                    for d in 0..3 {
                        x[d] += li * vi[d];
                    }
                }
                out.push((x, w / 4.0, piece));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{integrate_reference, monomials_upto, Poly};
    use num_traits::One;

    #[test]
    fn segment_integrates_polynomials() {
        let r = SegmentRule::new(7);
        for m in 0..=7 {
            let s: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(m)).sum();
            assert!((s - 1.0 / (m as f64 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn triangle_integrates_polynomials() {
        let r = TriangleRule::new(6);
        for a in 0..=6i32 {
            for b in 0..=(6 - a) {
                let s: f64 = r
                    .points
                    .iter()
                    .zip(&r.weights)
                    .map(|(p, w)| w * p[0].powi(a) * p[1].powi(b))
                    .sum();
                // Mean over the triangle: 2·a!b!/(a+b+2)!.
                let fact = |n: i32| (1..=n).map(f64::from).product::<f64>();
                let exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
                assert!((s - exact).abs() < 1e-14, "{a} {b}");
            }
        }
    }

    #[test]
    fn tet_matches_exact_monomials() {
        let r = TetRule::new(8);
        assert!((r.weights.iter().sum::<f64>() - 1.0 / 6.0).abs() < 1e-15);
        for e in monomials_upto(8) {
            let p = Poly::monomial(e, One::one());
            let exact = q_to_f64(&integrate_reference(&p));
            let s: f64 = r
                .points
                .iter()
                .zip(&r.weights)
                .map(|(x, w)| w * p.eval_f64(x))
                .sum();
            assert!((s - exact).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn alfeld_rule_is_exact_for_piecewise() {
        use crate::bubbles::build_split_space;
        use crate::polyalg::integrate_piecewise;
        let rule = TetRule::new(4).alfeld();
        let space = build_split_space(4, false).unwrap();
        for b in space.basis.iter().take(20) {
            let exact = q_to_f64(&integrate_piecewise(b));
            let s: f64 = rule.iter().map(|(x, w, i)| w * b.pieces[*i].eval_f64(x)).sum();
            assert!((s - exact).abs() < 1e-14);
        }
    }
}
