//! Poincaré operators for the 3D de Rham complex and the Koszul operator.
//!
//! Each operator integrates along rays from a base point `W`. After shifting
//! `y = x - W`, a homogeneous component of degree `m` contributes with a
//! closed-form factor `1/(m + j)`.

use super::piecewise::{split_center, Continuity, Piecewise, PiecewisePoly, PiecewiseVec};
use super::poly::{qi, Poly, VecPoly, Q};
use crate::error::{Error, Result};

fn neg(w: &[Q; 3]) -> [Q; 3] {
    std::array::from_fn(|i| -w[i].clone())
}

/// Homogeneous parts of the three components about the base point.
fn shifted_parts(u: &VecPoly, w: &[Q; 3]) -> Vec<VecPoly> {
    let shifted = u.translate(w);
    let parts: [Vec<Poly>; 3] = std::array::from_fn(|i| shifted.0[i].homogeneous_parts());
    let n = parts.iter().map(Vec::len).max().unwrap_or(0);
    (0..n)
        .map(|m| VecPoly(std::array::from_fn(|i| parts[i].get(m).cloned().unwrap_or_default())))
        .collect()
}

/// `𝔭¹u(x) = ∫₀¹ u(W + t(x−W))·(x−W) dt`.
pub fn poincare1(u: &VecPoly, w: &[Q; 3]) -> Poly {
    let y = VecPoly::position();
    let mut out = Poly::zero();
    for (m, um) in shifted_parts(u, w).iter().enumerate() {
        out += &um.dot(&y).scale(&Q::new(1.into(), (m as i64 + 1).into()));
    }
    out.translate(&neg(w))
}

/// `𝔭²u(x) = ∫₀¹ t u(W + t(x−W)) × (x−W) dt`.
pub fn poincare2(u: &VecPoly, w: &[Q; 3]) -> VecPoly {
    let y = VecPoly::position();
    let mut out = VecPoly::zero();
    for (m, um) in shifted_parts(u, w).iter().enumerate() {
        out += &um.cross(&y).scale(&Q::new(1.into(), (m as i64 + 2).into()));
    }
    out.translate(&neg(w))
}

/// `𝔭³u(x) = ∫₀¹ t² u(W + t(x−W)) (x−W) dt`.
pub fn poincare3(u: &Poly, w: &[Q; 3]) -> VecPoly {
    let y = VecPoly::position();
    let shifted = u.translate(w);
    let mut out = VecPoly::zero();
    for (m, um) in shifted.homogeneous_parts().iter().enumerate() {
        out += &y.mul_scalar(um).scale(&Q::new(1.into(), (m as i64 + 3).into()));
    }
    out.translate(&neg(w))
}

/// Koszul operator `κu = u × x`.
pub fn koszul2(u: &VecPoly) -> VecPoly {
    u.cross(&VecPoly::position())
}

fn check_center(w: &[Q; 3]) -> Result<()> {
    if *w == split_center() {
        Ok(())
    } else {
        Err(Error::BaseNotCenter)
    }
}

fn out_continuity<T>(p: &Piecewise<T>) -> Continuity {
    match p.continuity {
        Continuity::Single => Continuity::Single,
        _ => Continuity::L2,
    }
}

/// Piecewise `𝔭¹`; rays from the split center stay inside one subtet.
pub fn poincare1_piecewise(u: &PiecewiseVec, w: &[Q; 3]) -> Result<PiecewisePoly> {
    if u.continuity != Continuity::Single {
        check_center(w)?;
    }
    let mut out = u.map(|p| poincare1(p, w));
    out.continuity = out_continuity(u);
    Ok(out)
}

pub fn poincare2_piecewise(u: &PiecewiseVec, w: &[Q; 3]) -> Result<PiecewiseVec> {
    if u.continuity != Continuity::Single {
        check_center(w)?;
    }
    let mut out = u.map(|p| poincare2(p, w));
    out.continuity = out_continuity(u);
    Ok(out)
}

pub fn poincare3_piecewise(u: &PiecewisePoly, w: &[Q; 3]) -> Result<PiecewiseVec> {
    if u.continuity != Continuity::Single {
        check_center(w)?;
    }
    let mut out = u.map(|p| poincare3(p, w));
    out.continuity = out_continuity(u);
    Ok(out)
}

/// The origin as a base point.
pub fn origin() -> [Q; 3] {
    [qi(0), qi(0), qi(0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::poly::q;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }
    fn z() -> Poly {
        Poly::var(2)
    }

    #[test]
    fn p1_of_gradient() {
        let u = (&x() * &y()).grad();
        assert_eq!(poincare1(&u, &origin()), &x() * &y());
    }

    #[test]
    fn p1_of_y_e1() {
        let u = VecPoly::along(y(), 0);
        assert_eq!(poincare1(&u, &origin()), (&x() * &y()).scale(&q(1, 2)));
    }

    #[test]
    fn p2_of_constant() {
        let u = VecPoly::constant([qi(0), qi(0), qi(1)]);
        let expect = VecPoly::new(y().scale(&q(-1, 2)), x().scale(&q(1, 2)), Poly::zero());
        assert_eq!(poincare2(&u, &origin()), expect);
    }

    #[test]
    fn homotopy_on_y_e1() {
        let u = VecPoly::along(y(), 0);
        let a = poincare1(&u, &origin()).grad();
        let b = poincare2(&u.curl(), &origin());
        assert_eq!(a, VecPoly::new(y().scale(&q(1, 2)), x().scale(&q(1, 2)), Poly::zero()));
        assert_eq!(b, VecPoly::new(y().scale(&q(1, 2)), x().scale(&q(-1, 2)), Poly::zero()));
        assert_eq!(&a + &b, u);
    }

    #[test]
    fn p3_of_one() {
        let expect = VecPoly::position().scale(&q(1, 3));
        assert_eq!(poincare3(&Poly::one(), &origin()), expect);
    }

    #[test]
    fn koszul_examples() {
        let u = VecPoly::constant([qi(1), qi(0), qi(0)]);
        assert_eq!(koszul2(&u), VecPoly::new(Poly::zero(), -z(), y()));
        let radial = VecPoly::position().mul_scalar(&(&x() + &z()));
        assert!(koszul2(&radial).is_zero());
    }

    #[test]
    fn piecewise_requires_center() {
        let mut f = PiecewiseVec::single(VecPoly::position());
        f.continuity = Continuity::C0;
        assert!(matches!(poincare2_piecewise(&f, &origin()), Err(Error::BaseNotCenter)));
        assert!(poincare2_piecewise(&f, &split_center()).is_ok());
    }
}
