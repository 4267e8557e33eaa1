//! Evaluable fields used as interpolation targets and exact solutions.

use crate::polyalg::{FloatPoly, Poly, VecPoly};

const FD_STEP: f64 = 1e-5;

fn shifted(x: &[f64; 3], d: usize, h: f64) -> [f64; 3] {
    let mut y = *x;
    y[d] += h;
    y
}

/// Central-difference Jacobian `J[a][b] = ∂_b f_a`.
pub fn fd_jacobian(f: impl Fn(&[f64; 3]) -> [f64; 3], x: &[f64; 3]) -> [[f64; 3]; 3] {
    let mut j = [[0.0; 3]; 3];
    for b in 0..3 {
        let p = f(&shifted(x, b, FD_STEP));
        let m = f(&shifted(x, b, -FD_STEP));
        for a in 0..3 {
            j[a][b] = (p[a] - m[a]) / (2.0 * FD_STEP);
        }
    }
    j
}

pub fn curl_from_jacobian(j: &[[f64; 3]; 3]) -> [f64; 3] {
    [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]]
}

/// A smooth vector field with its derivatives. Defaults use central
/// differences; implementors with closed forms override them.
pub trait FieldSample: Sync {
    fn value(&self, x: &[f64; 3]) -> [f64; 3];

    /// `J[a][b] = ∂_b u_a`.
    fn jacobian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        fd_jacobian(|y| self.value(y), x)
    }

    fn curl(&self, x: &[f64; 3]) -> [f64; 3] {
        curl_from_jacobian(&self.jacobian(x))
    }

    /// `G[a][b] = ∂_b (curl u)_a`.
    fn grad_curl(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        fd_jacobian(|y| self.curl(y), x)
    }

    fn div(&self, x: &[f64; 3]) -> f64 {
        let j = self.jacobian(x);
        j[0][0] + j[1][1] + j[2][2]
    }
}

/// A smooth scalar field with its gradient.
pub trait ScalarSample: Sync {
    fn value(&self, x: &[f64; 3]) -> f64;

    fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|d| {
            (self.value(&shifted(x, d, FD_STEP)) - self.value(&shifted(x, d, -FD_STEP)))
                / (2.0 * FD_STEP)
        })
    }
}

/// `∇φ` as a vector field; its curl vanishes identically.
pub struct GradOf<'a>(pub &'a dyn ScalarSample);

impl FieldSample for GradOf<'_> {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        self.0.grad(x)
    }
    fn curl(&self, _: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
    fn grad_curl(&self, _: &[f64; 3]) -> [[f64; 3]; 3] {
        [[0.0; 3]; 3]
    }
}

/// `∇×u` as a vector field; its divergence vanishes identically.
pub struct CurlOf<'a>(pub &'a dyn FieldSample);

impl FieldSample for CurlOf<'_> {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        self.0.curl(x)
    }
    fn jacobian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        self.0.grad_curl(x)
    }
    fn div(&self, _: &[f64; 3]) -> f64 {
        0.0
    }
}

/// `∇·u` as a scalar field.
pub struct DivOf<'a>(pub &'a dyn FieldSample);

impl ScalarSample for DivOf<'_> {
    fn value(&self, x: &[f64; 3]) -> f64 {
        self.0.div(x)
    }
}

/// The zero vector field.
pub struct ZeroField;

impl FieldSample for ZeroField {
    fn value(&self, _: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
    fn jacobian(&self, _: &[f64; 3]) -> [[f64; 3]; 3] {
        [[0.0; 3]; 3]
    }
    fn grad_curl(&self, _: &[f64; 3]) -> [[f64; 3]; 3] {
        [[0.0; 3]; 3]
    }
}

/// Polynomial vector field with exact derivatives.
#[derive(Clone, Debug)]
pub struct PolyField {
    u: [FloatPoly; 3],
    jac: [[FloatPoly; 3]; 3],
    curl: [FloatPoly; 3],
    grad_curl: [[FloatPoly; 3]; 3],
}

impl PolyField {
    pub fn new(u: &VecPoly) -> Self {
        let c = u.curl();
        Self {
            u: u.0.each_ref().map(FloatPoly::from_exact),
            jac: std::array::from_fn(|a| std::array::from_fn(|b| FloatPoly::from_exact(&u.0[a].deriv(b)))),
            curl: c.0.each_ref().map(FloatPoly::from_exact),
            grad_curl: std::array::from_fn(|a| {
                std::array::from_fn(|b| FloatPoly::from_exact(&c.0[a].deriv(b)))
            }),
        }
    }
}

impl FieldSample for PolyField {
    fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        self.u.each_ref().map(|p| p.eval(x))
    }
    fn jacobian(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        self.jac.each_ref().map(|r| r.each_ref().map(|p| p.eval(x)))
    }
    fn curl(&self, x: &[f64; 3]) -> [f64; 3] {
        self.curl.each_ref().map(|p| p.eval(x))
    }
    fn grad_curl(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        self.grad_curl.each_ref().map(|r| r.each_ref().map(|p| p.eval(x)))
    }
}

/// Polynomial scalar field with exact gradient.
#[derive(Clone, Debug)]
pub struct PolyScalar {
    p: FloatPoly,
    grad: [FloatPoly; 3],
}

impl PolyScalar {
    pub fn new(p: &Poly) -> Self {
        Self {
            p: FloatPoly::from_exact(p),
            grad: p.grad().0.each_ref().map(FloatPoly::from_exact),
        }
    }
}

impl ScalarSample for PolyScalar {
    fn value(&self, x: &[f64; 3]) -> f64 {
        self.p.eval(x)
    }
    fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        self.grad.each_ref().map(|p| p.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{q, Poly};

    #[test]
    fn poly_field_derivatives_match_finite_differences() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let z = Poly::var(2);
        let u = VecPoly::new(&(&x * &y) * &z, &(&y * &y) * &x, (&z * &x).scale(&q(3, 2)));
        let f = PolyField::new(&u);
        let p = [0.3, -0.2, 0.7];
        let exact = f.curl(&p);
        let fd = curl_from_jacobian(&fd_jacobian(|y| f.value(y), &p));
        for a in 0..3 {
            assert!((exact[a] - fd[a]).abs() < 1e-8);
        }
        let gc = f.grad_curl(&p);
        let gfd = fd_jacobian(|y| f.curl(y), &p);
        for a in 0..3 {
            for b in 0..3 {
                assert!((gc[a][b] - gfd[a][b]).abs() < 1e-8);
            }
        }
    }
}
