//! Degree-of-freedom counts per mesh entity.

use serde::Serialize;

use super::{ElementConfig, SpaceKind};
use crate::bubbles::dim_s_layer;
use crate::polyalg::{dim_p2, dim_p3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Face(usize),
    Interior,
}

/// DOFs attached to each vertex, edge, face and to the cell interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DofCounts {
    pub vertex: usize,
    pub edge: usize,
    pub face: usize,
    pub interior: usize,
}

impl DofCounts {
    /// Local total on one tetrahedron.
    pub fn local_total(&self) -> usize {
        4 * self.vertex + 6 * self.edge + 4 * self.face + self.interior
    }
}

fn p1(d: i64) -> usize {
    if d < 0 {
        0
    } else {
        d as usize + 1
    }
}

pub fn dof_counts(kind: SpaceKind, c: ElementConfig) -> DofCounts {
    let (r, k) = (c.r as i64, c.k as i64);
    match kind {
        SpaceKind::Sigma => DofCounts {
            vertex: 1,
            edge: p1(r - 2),
            face: dim_p2(r - 3),
            interior: dim_p3(r - 4),
        },
        SpaceKind::SigmaPlus => DofCounts {
            vertex: 3,
            edge: 3 * p1(k - 2),
            face: 3 * dim_p2(k - 3) + usize::from(k <= 2),
            interior: 3 * dim_p3(k - 4) + if k >= 2 { dim_s_layer(c.k - 1) } else { 0 },
        },
        SpaceKind::W => DofCounts {
            vertex: 0,
            edge: 0,
            face: 0,
            interior: dim_p3(k - 1),
        },
        SpaceKind::V => DofCounts {
            vertex: 3,
            edge: p1(r - 1) + 3 * p1(k - 2),
            face: dim_p2(k - 3).saturating_sub(1) + 2 * dim_p2(k - 3) + dim_p2(r - 3),
            interior: (3 * dim_p3(k - 5) - dim_p3(k - 6)) + dim_p3(r - 4),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::reference::expected_dim;

    #[test]
    fn counts_match_dimensions() {
        for c in ElementConfig::standard() {
            for kind in SpaceKind::ALL {
                assert_eq!(
                    dof_counts(kind, c).local_total(),
                    expected_dim(kind, c),
                    "{kind:?} {c}"
                );
            }
        }
    }

    #[test]
    fn lowest_order_layout() {
        let c = ElementConfig::new(1, 1).unwrap();
        let v = dof_counts(SpaceKind::V, c);
        assert_eq!((v.vertex, v.edge, v.face, v.interior), (3, 1, 0, 0));
        let s = dof_counts(SpaceKind::SigmaPlus, c);
        assert_eq!((s.vertex, s.edge, s.face, s.interior), (3, 0, 1, 0));
    }

    #[test]
    fn higher_order_layout() {
        let c = ElementConfig::new(3, 3).unwrap();
        let v = dof_counts(SpaceKind::V, c);
        assert_eq!((v.vertex, v.edge, v.face, v.interior), (3, 3 + 6, 3, 0));
        let c = ElementConfig::new(2, 2).unwrap();
        let v = dof_counts(SpaceKind::V, c);
        assert_eq!((v.vertex, v.edge, v.face, v.interior), (3, 2 + 3, 0, 0));
    }
}
