//! Finite elements for the discrete Stokes complex
//!
//! ```text
//! Σ^r --grad--> V^{r-1,k+1} --curl--> Σ^{+,k} --div--> W^{k-1}
//! ```
//!
//! on tetrahedral meshes: Lagrange elements, grad-curl conforming elements,
//! divergence-free Stokes velocity elements built from Alfeld-split bubbles,
//! and discontinuous pressures. Construction runs in exact rational
//! arithmetic; assembly and solvers run in `f64`.

pub mod assembly;
pub mod bubbles;
pub mod elements;
pub mod error;
pub mod mesh;
pub mod polyalg;
pub mod problems;
pub mod verify;

pub use error::{Error, Result};
