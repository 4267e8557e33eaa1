//! Exact integration of polynomials over simplices.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::piecewise::{subtet_vertices, Piecewise, PiecewisePoly};
use super::poly::{exp_degree, factorial, homogeneous_monomials, Exp, Poly, Q};
use crate::error::{Error, Result};

/// Integral of a polynomial over a simplex of any dimension 1..=3.
///
/// For segments and triangles the measure is generally irrational, so the
/// exact mean value is returned together with the squared measure.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexIntegral {
    pub mean: Q,
    pub measure_sq: Q,
}

impl SimplexIntegral {
    pub fn value_f64(&self) -> f64 {
        super::poly::q_to_f64(&self.mean) * super::poly::q_to_f64(&self.measure_sq).sqrt()
    }
}

fn sub3(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    std::array::from_fn(|i| &a[i] - &b[i])
}

fn dot3(a: &[Q; 3], b: &[Q; 3]) -> Q {
    &(&a[0] * &b[0] + &a[1] * &b[1]) + &a[2] * &b[2]
}

pub fn cross3(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn det3(a: &[Q; 3], b: &[Q; 3], c: &[Q; 3]) -> Q {
    dot3(a, &cross3(b, c))
}

/// Forms `x = v0 + sum_j (v_j - v0) y_j` in the simplex's local variables.
fn simplex_forms(verts: &[[Q; 3]]) -> [Poly; 3] {
    std::array::from_fn(|c| {
        let mut lin: [Q; 3] = Default::default();
        for j in 1..verts.len() {
            lin[j - 1] = &verts[j][c] - &verts[0][c];
        }
        Poly::affine(verts[0][c].clone(), lin)
    })
}

/// Integral of `y^e` over the unit simplex of dimension `dim` (variables past
/// `dim` must have zero exponent).
fn unit_simplex_monomial(e: &Exp, dim: usize) -> Q {
    let n: usize = exp_degree(e);
    let num = factorial(e[0] as usize) * factorial(e[1] as usize) * factorial(e[2] as usize);
    Q::new(num, factorial(n + dim))
}

fn integrate_unit(p: &Poly, dim: usize) -> Q {
    let mut s = Q::zero();
    for (e, c) in p.terms() {
        s += c * unit_simplex_monomial(e, dim);
    }
    s
}

/// Exact integral over a tetrahedron.
pub fn integrate_tet(p: &Poly, verts: &[[Q; 3]; 4]) -> Result<Q> {
    let d = det3(
        &sub3(&verts[1], &verts[0]),
        &sub3(&verts[2], &verts[0]),
        &sub3(&verts[3], &verts[0]),
    );
    if d.is_zero() {
        return Err(Error::DegenerateSimplex);
    }
    let local = p.substitute(&simplex_forms(verts));
    Ok(integrate_unit(&local, 3) * d.abs())
}

/// Exact mean over a triangle, with its squared area.
pub fn integrate_triangle(p: &Poly, verts: &[[Q; 3]; 3]) -> Result<SimplexIntegral> {
    let n = cross3(&sub3(&verts[1], &verts[0]), &sub3(&verts[2], &verts[0]));
    let area_sq = dot3(&n, &n) / Q::from_integer(4.into());
    if area_sq.is_zero() {
        return Err(Error::DegenerateSimplex);
    }
    let local = p.substitute(&simplex_forms(verts));
    // The unit triangle has area 1/2.
    Ok(SimplexIntegral {
        mean: integrate_unit(&local, 2) * Q::from_integer(2.into()),
        measure_sq: area_sq,
    })
}

/// Exact mean over a segment, with its squared length.
pub fn integrate_segment(p: &Poly, verts: &[[Q; 3]; 2]) -> Result<SimplexIntegral> {
    let t = sub3(&verts[1], &verts[0]);
    let len_sq = dot3(&t, &t);
    if len_sq.is_zero() {
        return Err(Error::DegenerateSimplex);
    }
    let local = p.substitute(&simplex_forms(verts));
    Ok(SimplexIntegral {
        mean: integrate_unit(&local, 1),
        measure_sq: len_sq,
    })
}

/// Integral over the reference tetrahedron, piece by piece over the split.
pub fn integrate_piecewise(p: &PiecewisePoly) -> Q {
    let cache = split_moments();
    p.pieces
        .iter()
        .enumerate()
        .map(|(i, piece)| cache.integrate(i, piece))
        .fold(Q::zero(), |a, b| a + b)
}

/// Integral of a single polynomial over the reference tetrahedron.
pub fn integrate_reference(p: &Poly) -> Q {
    let mut s = Q::zero();
    for (e, c) in p.terms() {
        s += c * unit_simplex_monomial(e, 3);
    }
    s
}

/// Monomial moments `∫_{T_i} x^α` over the four subtets of the reference split.
#[derive(Debug, Default)]
pub struct SplitMoments {
    tables: [std::sync::RwLock<HashMap<Exp, Q>>; 4],
}

impl SplitMoments {
    pub fn moment(&self, i: usize, e: &Exp) -> Q {
        if let Some(v) = self.tables[i].read().expect("moment cache").get(e) {
            return v.clone();
        }
        // Fill every monomial of this degree at once.
        let deg = exp_degree(e);
        let verts = subtet_vertices(i);
        let forms = simplex_forms(&verts);
        let jac = det3(
            &sub3(&verts[1], &verts[0]),
            &sub3(&verts[2], &verts[0]),
            &sub3(&verts[3], &verts[0]),
        )
        .abs();
        let mut fresh = Vec::new();
        for m in homogeneous_monomials(deg) {
            let local = Poly::monomial(m, Q::from_integer(1.into())).substitute(&forms);
            fresh.push((m, integrate_unit(&local, 3) * &jac));
        }
        let mut t = self.tables[i].write().expect("moment cache");
        for (m, v) in fresh {
            t.insert(m, v);
        }
        t[e].clone()
    }

    pub fn integrate(&self, i: usize, p: &Poly) -> Q {
        let mut s = Q::zero();
        for (e, c) in p.terms() {
            s += c * self.moment(i, e);
        }
        s
    }

    pub fn integrate_piecewise<T>(&self, p: &Piecewise<T>, f: impl Fn(&T) -> Poly) -> Q {
        let mut s = Q::zero();
        for (i, piece) in p.pieces.iter().enumerate() {
            s += self.integrate(i, &f(piece));
        }
        s
    }
}

/// Process-wide moment cache for the reference split.
pub fn split_moments() -> &'static SplitMoments {
    static CACHE: std::sync::OnceLock<SplitMoments> = std::sync::OnceLock::new();
    CACHE.get_or_init(SplitMoments::default)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::piecewise::reference_vertices;
    use crate::polyalg::poly::{q, qi};

    fn lambdas() -> [Poly; 4] {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let z = Poly::var(2);
        let l0 = &(&(&Poly::one() - &x) - &y) - &z;
        [l0, x, y, z]
    }

    #[test]
    fn reference_volume() {
        let v = integrate_tet(&Poly::one(), &reference_vertices()).unwrap();
        assert_eq!(v, q(1, 6));
    }

    #[test]
    fn product_of_barycentrics() {
        let [a, b, c, d] = lambdas();
        let p = &(&(&a * &b) * &c) * &d;
        assert_eq!(integrate_tet(&p, &reference_vertices()).unwrap(), q(1, 5040));
        assert_eq!(integrate_reference(&p), q(1, 5040));
    }

    #[test]
    fn face_barycentric_mean() {
        // On face 0 the barycentrics are x, y, z; mean = 2!·(1!1!1!)/5! = 1/60.
        let p = &(&Poly::var(0) * &Poly::var(1)) * &Poly::var(2);
        let f = [
            [qi(1), qi(0), qi(0)],
            [qi(0), qi(1), qi(0)],
            [qi(0), qi(0), qi(1)],
        ];
        let r = integrate_triangle(&p, &f).unwrap();
        assert_eq!(r.mean, q(1, 60));
        assert_eq!(r.measure_sq, q(3, 4));
    }

    #[test]
    fn degenerate_rejected() {
        let v: [[Q; 3]; 4] = Default::default();
        assert!(matches!(integrate_tet(&Poly::one(), &v), Err(Error::DegenerateSimplex)));
    }

    #[test]
    fn split_moments_sum_to_whole() {
        let p = &(&Poly::var(0) * &Poly::var(0)) * &Poly::var(2);
        let whole = integrate_reference(&p);
        let split = integrate_piecewise(&PiecewisePoly::single(p));
        assert_eq!(whole, split);
        let vols: Vec<Q> = (0..4).map(|i| split_moments().moment(i, &[0, 0, 0])).collect();
        assert!(vols.iter().all(|v| *v == q(1, 24)));
    }
}
