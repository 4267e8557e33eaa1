//! Exact affine maps `x = B x̂ + b` and the Piola-type transfers of fields.

use num_traits::{One, Zero};

use super::integrate::det3;
use super::poly::{Poly, VecPoly, Q};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    /// `u ∘ F = B^{-T} û` (curl-type fields).
    Covariant,
    /// `u ∘ F = B û / det B` (div-type fields and curls).
    Contravariant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineMapQ {
    pub b: [[Q; 3]; 3],
    pub t: [Q; 3],
    pub det: Q,
    pub b_inv: [[Q; 3]; 3],
}

fn transpose(m: &[[Q; 3]; 3]) -> [[Q; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

impl AffineMapQ {
    pub fn new(b: [[Q; 3]; 3], t: [Q; 3]) -> Result<Self> {
        let cols = transpose(&b);
        let det = det3(&cols[0], &cols[1], &cols[2]);
        if det.is_zero() {
            return Err(Error::SingularMap);
        }
        // Adjugate / det.
        let b_inv = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                (&b[r0][c0] * &b[r1][c1] - &b[r0][c1] * &b[r1][c0]) / &det
            })
        });
        Ok(Self { b, t, det, b_inv })
    }

    pub fn identity() -> Self {
        let b = std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { Q::one() } else { Q::zero() })
        });
        Self::new(b, Default::default()).expect("identity is invertible")
    }

    /// Map sending the reference vertices onto `v`.
    pub fn from_vertices(v: &[[Q; 3]; 4]) -> Result<Self> {
        let b = std::array::from_fn(|i| std::array::from_fn(|j| &v[j + 1][i] - &v[0][i]));
        Self::new(b, v[0].clone())
    }

    pub fn apply(&self, x: &[Q; 3]) -> [Q; 3] {
        std::array::from_fn(|i| {
            let mut s = self.t[i].clone();
            for j in 0..3 {
                s += &self.b[i][j] * &x[j];
            }
            s
        })
    }

    /// Coordinates `x(x̂)` as polynomials in `x̂`.
    pub fn forward_forms(&self) -> [Poly; 3] {
        std::array::from_fn(|i| Poly::affine(self.t[i].clone(), self.b[i].clone()))
    }

    /// Coordinates `x̂(x)` as polynomials in `x`.
    pub fn inverse_forms(&self) -> [Poly; 3] {
        std::array::from_fn(|i| {
            let mut c0 = Q::zero();
            for j in 0..3 {
                c0 -= &self.b_inv[i][j] * &self.t[j];
            }
            Poly::affine(c0, self.b_inv[i].clone())
        })
    }

    /// Reference representative of a physical field.
    pub fn pullback_vec(&self, u: &VecPoly, kind: FieldKind) -> VecPoly {
        let composed = u.substitute(&self.forward_forms());
        match kind {
            FieldKind::Scalar => composed,
            // û = B^T (u ∘ F)
            FieldKind::Covariant => composed.transform(&transpose(&self.b)),
            // û = det B^{-1} (u ∘ F)
            FieldKind::Contravariant => composed.transform(&self.b_inv).scale(&self.det),
        }
    }

    /// Physical field from a reference representative.
    pub fn pushforward_vec(&self, uh: &VecPoly, kind: FieldKind) -> VecPoly {
        let mapped = match kind {
            FieldKind::Scalar => uh.clone(),
            FieldKind::Covariant => uh.transform(&transpose(&self.b_inv)),
            FieldKind::Contravariant => uh.transform(&self.b).scale(&(Q::one() / &self.det)),
        };
        mapped.substitute(&self.inverse_forms())
    }

    pub fn pullback_scalar(&self, p: &Poly) -> Poly {
        p.substitute(&self.forward_forms())
    }

    pub fn pushforward_scalar(&self, p: &Poly) -> Poly {
        p.substitute(&self.inverse_forms())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::poly::{q, qi};

    fn sample_map() -> AffineMapQ {
        let b = [
            [qi(2), qi(1), qi(0)],
            [q(1, 3), qi(1), qi(-1)],
            [qi(0), q(1, 2), qi(3)],
        ];
        AffineMapQ::new(b, [qi(1), q(-1, 2), qi(2)]).unwrap()
    }

    fn sample_field() -> VecPoly {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let z = Poly::var(2);
        VecPoly::new(&x * &y, &(&z * &z) + &x, &y - &(&x * &z))
    }

    #[test]
    fn identity_is_noop() {
        let id = AffineMapQ::identity();
        let u = sample_field();
        for kind in [FieldKind::Scalar, FieldKind::Covariant, FieldKind::Contravariant] {
            assert_eq!(id.pullback_vec(&u, kind), u);
        }
    }

    #[test]
    fn pull_push_roundtrip() {
        let m = sample_map();
        let u = sample_field();
        for kind in [FieldKind::Scalar, FieldKind::Covariant, FieldKind::Contravariant] {
            assert_eq!(m.pushforward_vec(&m.pullback_vec(&u, kind), kind), u);
        }
    }

    #[test]
    fn curl_of_covariant_is_contravariant() {
        let m = sample_map();
        let uh = sample_field();
        let lhs = m.pushforward_vec(&uh, FieldKind::Covariant).curl();
        let rhs = m.pushforward_vec(&uh.curl(), FieldKind::Contravariant);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn singular_rejected() {
        let b = [[qi(1), qi(2), qi(3)], [qi(2), qi(4), qi(6)], [qi(0), qi(0), qi(1)]];
        assert!(matches!(AffineMapQ::new(b, Default::default()), Err(Error::SingularMap)));
    }
}
