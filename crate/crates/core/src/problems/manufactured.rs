//! Trigonometric manufactured solutions with closed-form derivatives.
//!
//! Every component is a sum of separable terms `c · f₁(x₁) f₂(x₂) f₃(x₃)`
//! with each factor a trigonometric monomial sum `Σ a · sin(πt)^m cos(πt)^n`.
//! Partial derivatives of any order are products of exact one-dimensional
//! derivatives, so `∇×u`, `∇∇×u` and the forcing terms are exact.

use std::f64::consts::PI;

use crate::assembly::{FieldSample, ScalarSample};

/// `Σ a · sin(πt)^m cos(πt)^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trig1d(pub Vec<(u32, u32, f64)>);

impl Trig1d {
    pub fn sin_cos(m: u32, n: u32) -> Self {
        Self(vec![(m, n, 1.0)])
    }

    pub fn deriv(&self) -> Self {
        let mut out: Vec<(u32, u32, f64)> = Vec::new();
        let mut push = |m: u32, n: u32, a: f64| {
            if a == 0.0 {
                return;
            }
            match out.iter_mut().find(|t| t.0 == m && t.1 == n) {
                Some(t) => t.2 += a,
                None => out.push((m, n, a)),
            }
        };
        for &(m, n, a) in &self.0 {
            if m > 0 {
                push(m - 1, n + 1, a * PI * m as f64);
            }
            if n > 0 {
                push(m + 1, n - 1, -a * PI * n as f64);
            }
        }
        out.retain(|t| t.2 != 0.0);
        Self(out)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (s, c) = (PI * t).sin_cos();
        self.0.iter().map(|&(m, n, a)| a * s.powi(m as i32) * c.powi(n as i32)).sum()
    }
}

/// One separable term with derivative tables up to a fixed order.
#[derive(Clone, Debug)]
struct Separable {
    coef: f64,
    /// `derivs[axis][order]`.
    derivs: [Vec<Trig1d>; 3],
}

impl Separable {
    fn new(coef: f64, factors: [Trig1d; 3], max_order: usize) -> Self {
        let derivs = factors.map(|f| {
            let mut v = vec![f];
            for _ in 0..max_order {
                let d = v.last().expect("factor").deriv();
                v.push(d);
            }
            v
        });
        Self { coef, derivs }
    }

    fn partial(&self, alpha: [usize; 3], x: &[f64; 3]) -> f64 {
        self.coef * (0..3).map(|i| self.derivs[i][alpha[i]].eval(x[i])).product::<f64>()
    }
}

/// Vector field given component-wise by separable terms.
#[derive(Clone, Debug)]
pub struct SeparableField {
    comps: [Vec<Separable>; 3],
}

const MAX_ORDER: usize = 5;

fn unit(i: usize) -> [usize; 3] {
    let mut a = [0; 3];
    a[i] = 1;
    a
}

fn second(i: usize) -> [usize; 3] {
    let mut a = [0; 3];
    a[i] = 2;
    a
}

fn plus(a: [usize; 3], b: [usize; 3]) -> [usize; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

impl SeparableField {
    /// The divergence-free field from the quad-curl experiments:
    /// `u = (a(x₁,x₂,x₃), a(x₂,x₃,x₁), −2a(x₃,x₁,x₂))` with
    /// `a(x,y,z) = sin³(πx) sin²(πy) sin²(πz) cos(πy) cos(πz)`.
    pub fn quadcurl_solution() -> Self {
        let h = Trig1d::sin_cos(3, 0);
        let g = Trig1d::sin_cos(2, 1);
        let term = |coef: f64, lead: usize| {
            let mut f = [g.clone(), g.clone(), g.clone()];
            f[lead] = h.clone();
            vec![Separable::new(coef, f, MAX_ORDER)]
        };
        Self {
            comps: [term(1.0, 0), term(1.0, 1), term(-2.0, 2)],
        }
    }

    /// `∂^α u_c`.
    pub fn partial(&self, c: usize, alpha: [usize; 3], x: &[f64; 3]) -> f64 {
        self.comps[c].iter().map(|t| t.partial(alpha, x)).sum()
    }

    /// `∂^α (∇×u)_a`.
    pub fn curl_partial(&self, a: usize, alpha: [usize; 3], x: &[f64; 3]) -> f64 {
        let (i, j) = ((a + 1) % 3, (a + 2) % 3);
        self.partial(j, plus(alpha, unit(i)), x) - self.partial(i, plus(alpha, unit(j)), x)
    }

    /// `∂^α (Δ∇×u)_a`.
    fn lap_curl_partial(&self, a: usize, alpha: [usize; 3], x: &[f64; 3]) -> f64 {
        (0..3)
            .map(|b| self.curl_partial(a, plus(alpha, second(b)), x))
            .sum()
    }

    /// `∇×Δ∇×u`.
    pub fn curl_lap_curl(&self, x: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|a| {
            let (i, j) = ((a + 1) % 3, (a + 2) % 3);
            self.lap_curl_partial(j, unit(i), x) - self.lap_curl_partial(i, unit(j), x)
        })
    }

    /// `Δu`.
    pub fn laplacian(&self, x: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|c| (0..3).map(|b| self.partial(c, second(b), x)).sum())
    }
}

impl FieldSample for SeparableField {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|c| self.partial(c, [0; 3], x))
    }
    fn jacobian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.partial(a, unit(b), x)))
    }
    fn curl(&self, x: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|a| self.curl_partial(a, [0; 3], x))
    }
    fn grad_curl(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.curl_partial(a, unit(b), x)))
    }
    fn div(&self, x: &[f64; 3]) -> f64 {
        (0..3).map(|c| self.partial(c, unit(c), x)).sum()
    }
}

/// `f = −∇×Δ∇×u + u`.
pub struct QuadCurlForcing<'a>(pub &'a SeparableField);

impl FieldSample for QuadCurlForcing<'_> {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        let u = self.0.value(x);
        let c = self.0.curl_lap_curl(x);
        std::array::from_fn(|a| u[a] - c[a])
    }
}

/// Mean-zero pressure `cos(πx₁) cos(πx₂) cos(πx₃)`.
pub struct CosPressure;

impl ScalarSample for CosPressure {
    fn value(&self, x: &[f64; 3]) -> f64 {
        x.iter().map(|t| (PI * t).cos()).product()
    }
    fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        let c = x.map(|t| (PI * t).cos());
        let s = x.map(|t| (PI * t).sin());
        std::array::from_fn(|d| {
            let mut v = -PI * s[d];
            for e in 0..3 {
                if e != d {
                    v *= c[e];
                }
            }
            v
        })
    }
}

/// `f = −νΔu + ∇p`.
pub struct StokesForcing<'a> {
    pub velocity: &'a SeparableField,
    pub pressure: &'a dyn ScalarSample,
    pub viscosity: f64,
}

impl FieldSample for StokesForcing<'_> {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        let l = self.velocity.laplacian(x);
        let g = self.pressure.grad(x);
        std::array::from_fn(|a| -self.viscosity * l[a] + g[a])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::sample::fd_jacobian;

    #[test]
    fn trig_derivative_matches_difference() {
        let f = Trig1d::sin_cos(3, 2);
        let d = f.deriv();
        let t = 0.37;
        let h = 1e-6;
        let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        assert!((d.eval(t) - fd).abs() < 1e-7);
    }

    #[test]
    fn solution_is_divergence_free() {
        let u = SeparableField::quadcurl_solution();
        for x in [[0.1, 0.5, 0.9], [0.33, 0.71, 0.2], [0.6, 0.6, 0.05]] {
            assert!(u.div(&x).abs() < 1e-12);
        }
    }

    #[test]
    fn curl_matches_difference() {
        let u = SeparableField::quadcurl_solution();
        let x = [0.23, 0.61, 0.47];
        let j = fd_jacobian(|y| u.value(y), &x);
        let c = crate::assembly::sample::curl_from_jacobian(&j);
        let e = u.curl(&x);
        for a in 0..3 {
            assert!((c[a] - e[a]).abs() < 1e-8);
        }
    }

    /// Central second differences of `f` summed over the axes.
    fn fd_laplacian(f: impl Fn(&[f64; 3]) -> [f64; 3], x: &[f64; 3], h: f64) -> [f64; 3] {
        let f0 = f(x);
        let mut out = [0.0; 3];
        for b in 0..3 {
            let (mut xp, mut xm) = (*x, *x);
            xp[b] += h;
            xm[b] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            for a in 0..3 {
                out[a] += (fp[a] - 2.0 * f0[a] + fm[a]) / (h * h);
            }
        }
        out
    }

    #[test]
    fn laplacian_matches_difference() {
        let u = SeparableField::quadcurl_solution();
        for x in [[0.23, 0.61, 0.47], [0.8, 0.15, 0.55]] {
            let fd = fd_laplacian(|y| u.value(y), &x, 1e-4);
            let e = u.laplacian(&x);
            for a in 0..3 {
                assert!((fd[a] - e[a]).abs() < 1e-4 * (1.0 + e[a].abs()), "{fd:?} {e:?}");
            }
        }
    }

    #[test]
    fn fourth_order_term_matches_bilaplacian() {
        // For divergence-free u, ∇×Δ∇×u = −Δ²u.
        let u = SeparableField::quadcurl_solution();
        for x in [[0.23, 0.61, 0.47], [0.8, 0.15, 0.55]] {
            let fd = fd_laplacian(|y| u.laplacian(y), &x, 1e-4);
            let e = u.curl_lap_curl(&x);
            let scale = e.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for a in 0..3 {
                assert!((fd[a] + e[a]).abs() < 1e-5 * scale, "{fd:?} {e:?}");
            }
        }
    }
}
