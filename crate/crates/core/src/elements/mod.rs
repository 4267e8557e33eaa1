//! The four local spaces `Σ^r`, `V^{r-1,k+1}`, `Σ^{+,k}`, `W^{k-1}`, their
//! degrees of freedom, nodal bases and Piola transfer to physical cells.

pub mod dofs;
pub mod physical;
pub mod reference;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{MonomialIndex, PiecewisePoly, PiecewiseVec, Q};

pub use dofs::{dof_counts, DofCounts};
pub use physical::{CellElement, CellGeometry, Family};
pub use reference::{exactness_table, poly_inclusion_degree, raw_space, ExactnessTable, RawSpace};

/// Element family parameters: `k ≥ 1` and `r ∈ {k, k+1, k+2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementConfig {
    pub r: usize,
    pub k: usize,
}

impl ElementConfig {
    pub fn new(r: usize, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidConfig(format!("k must be at least 1, got {k}")));
        }
        if r < k || r > k + 2 {
            return Err(Error::InvalidConfig(format!(
                "r must be one of k, k+1, k+2 (k = {k}), got {r}"
            )));
        }
        Ok(Self { r, k })
    }

    /// Configurations exercised by the verification suite.
    pub fn standard() -> Vec<Self> {
        [(1, 1), (2, 1), (3, 1), (2, 2), (3, 3)]
            .into_iter()
            .map(|(r, k)| Self { r, k })
            .collect()
    }
}

impl std::fmt::Display for ElementConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(r={}, k={})", self.r, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpaceKind {
    /// Lagrange `Σ^r`.
    Sigma,
    /// Grad-curl conforming `V^{r-1,k+1}`.
    V,
    /// Stokes velocity `Σ^{+,k}`.
    SigmaPlus,
    /// Discontinuous pressure `W^{k-1}`.
    W,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [SpaceKind::Sigma, SpaceKind::V, SpaceKind::SigmaPlus, SpaceKind::W];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Sigma => "Sigma",
            SpaceKind::V => "V",
            SpaceKind::SigmaPlus => "SigmaPlus",
            SpaceKind::W => "W",
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, SpaceKind::V | SpaceKind::SigmaPlus)
    }

    /// Number of field quantities the degrees of freedom read:
    /// value (and curl for `V`).
    pub fn input_len(self) -> usize {
        match self {
            SpaceKind::Sigma | SpaceKind::W => 1,
            SpaceKind::SigmaPlus => 3,
            SpaceKind::V => 6,
        }
    }

    /// Number of tabulated quantities per point:
    /// `Σ`: value, gradient; `V`: value, curl, gradient of curl;
    /// `Σ⁺`: value, gradient; `W`: value.
    pub fn tab_len(self) -> usize {
        match self {
            SpaceKind::Sigma => 4,
            SpaceKind::V => 15,
            SpaceKind::SigmaPlus => 12,
            SpaceKind::W => 1,
        }
    }
}

/// Exact scalar or vector field on the reference Alfeld split.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Scalar(PiecewisePoly),
    Vector(PiecewiseVec),
}

impl Field {
    pub fn degree(&self) -> usize {
        match self {
            Field::Scalar(p) => p.degree().unwrap_or(0),
            Field::Vector(v) => v.degree().unwrap_or(0),
        }
    }

    pub fn as_vector(&self) -> &PiecewiseVec {
        match self {
            Field::Vector(v) => v,
            Field::Scalar(_) => panic!("expected a vector field"),
        }
    }

    pub fn as_scalar(&self) -> &PiecewisePoly {
        match self {
            Field::Scalar(p) => p,
            Field::Vector(_) => panic!("expected a scalar field"),
        }
    }

    /// Coefficients in `pieces × components × monomials up to index.degree`.
    pub fn flatten(&self, index: &MonomialIndex) -> Vec<Q> {
        let mut out = Vec::new();
        match self {
            Field::Scalar(p) => {
                for piece in &p.pieces {
                    out.extend(piece.coeffs_in(index));
                }
            }
            Field::Vector(v) => {
                for piece in &v.pieces {
                    for c in &piece.0 {
                        out.extend(c.coeffs_in(index));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(ElementConfig::new(3, 1).is_ok());
        assert!(ElementConfig::new(1, 1).is_ok());
        assert!(matches!(ElementConfig::new(4, 1), Err(Error::InvalidConfig(_))));
        assert!(matches!(ElementConfig::new(1, 2), Err(Error::InvalidConfig(_))));
        assert!(matches!(ElementConfig::new(1, 0), Err(Error::InvalidConfig(_))));
    }
}
