//! Exact polynomial and piecewise-polynomial algebra over the rationals:
//! differential operators, Poincaré and Koszul operators, simplex
//! integration, affine pullbacks and exact dense linear algebra.

pub mod affine;
pub mod integrate;
pub mod linalg;
pub mod piecewise;
pub mod poincare;
pub mod poly;

pub use affine::{AffineMapQ, FieldKind};
pub use integrate::{
    integrate_piecewise, integrate_reference, integrate_segment, integrate_tet,
    integrate_triangle, split_moments, SimplexIntegral,
};
pub use linalg::{EchelonBasis, QMatrix};
pub use piecewise::{Continuity, Piecewise, PiecewisePoly, PiecewiseVec};
pub use poincare::{koszul2, poincare1, poincare2, poincare3};
pub use poly::{
    dim_h3, dim_p2, dim_p3, powers, FloatPoly, homogeneous_monomials, monomials_upto, q, q_to_f64, qi, Exp,
    MonomialIndex, Poly, VecPoly, Q,
};
