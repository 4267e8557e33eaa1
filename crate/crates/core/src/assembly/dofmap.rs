//! Entity-based global numbering.
//!
//! DOFs are numbered block-wise: all vertex DOFs, then edges, faces and
//! cell interiors, each entity contributing a contiguous run. Cells list
//! their vertices in ascending global order, so local entities are always
//! traversed in their global orientation and every parity is `+1`.

use serde::Serialize;

use crate::elements::{dof_counts, DofCounts, ElementConfig, SpaceKind};
use crate::mesh::Mesh;

#[derive(Clone, Debug, Serialize)]
pub struct GlobalDofMap {
    pub kind: SpaceKind,
    pub counts: DofCounts,
    pub n_dofs: usize,
    pub edge_offset: usize,
    pub face_offset: usize,
    pub cell_offset: usize,
    /// Local-to-global indices per cell, in local DOF order.
    pub cell_dofs: Vec<Vec<usize>>,
    /// Orientation parity of each local DOF.
    pub cell_signs: Vec<Vec<i8>>,
    /// DOFs attached to boundary vertices, edges or faces.
    pub boundary: Vec<bool>,
}

impl GlobalDofMap {
    pub fn new(mesh: &Mesh, kind: SpaceKind, config: ElementConfig) -> Self {
        let counts = dof_counts(kind, config);
        let edge_offset = mesh.vertices.len() * counts.vertex;
        let face_offset = edge_offset + mesh.edges.len() * counts.edge;
        let cell_offset = face_offset + mesh.faces.len() * counts.face;
        let n_dofs = cell_offset + mesh.cells.len() * counts.interior;
        let mut boundary = vec![false; n_dofs];
        let mut mark = |start: usize, len: usize, flag: bool| {
            if flag {
                boundary[start..start + len].fill(true);
            }
        };
        for (v, &b) in mesh.boundary_vertices.iter().enumerate() {
            mark(v * counts.vertex, counts.vertex, b);
        }
        for (e, &b) in mesh.boundary_edges.iter().enumerate() {
            mark(edge_offset + e * counts.edge, counts.edge, b);
        }
        for (f, &b) in mesh.boundary_faces.iter().enumerate() {
            mark(face_offset + f * counts.face, counts.face, b);
        }
        let cell_dofs: Vec<Vec<usize>> = (0..mesh.cells.len())
            .map(|c| {
                let mut d = Vec::with_capacity(counts.local_total());
                for &v in &mesh.cells[c] {
                    d.extend(v * counts.vertex..(v + 1) * counts.vertex);
                }
                for &e in &mesh.cell_edges[c] {
                    let s = edge_offset + e * counts.edge;
                    d.extend(s..s + counts.edge);
                }
                for &f in &mesh.cell_faces[c] {
                    let s = face_offset + f * counts.face;
                    d.extend(s..s + counts.face);
                }
                let s = cell_offset + c * counts.interior;
                d.extend(s..s + counts.interior);
                d
            })
            .collect();
        let cell_signs = cell_dofs.iter().map(|d| vec![1; d.len()]).collect();
        Self {
            kind,
            counts,
            n_dofs,
            edge_offset,
            face_offset,
            cell_offset,
            cell_dofs,
            cell_signs,
            boundary,
        }
    }

    /// Indices of DOFs not on the boundary, ascending.
    pub fn interior_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs).filter(|&i| !self.boundary[i]).collect()
    }

    pub fn n_interior(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(r: usize, k: usize) -> ElementConfig {
        ElementConfig::new(r, k).unwrap()
    }

    #[test]
    fn lagrange_linear_counts_vertices() {
        let m = Mesh::structured_cube(1).unwrap();
        assert_eq!(GlobalDofMap::new(&m, SpaceKind::Sigma, cfg(1, 1)).n_dofs, 8);
    }

    #[test]
    fn lowest_order_v_counts() {
        let m = Mesh::structured_cube(1).unwrap();
        let map = GlobalDofMap::new(&m, SpaceKind::V, cfg(1, 1));
        assert_eq!(map.n_dofs, 3 * 8 + 19);
        // The body diagonal is the only interior entity carrying DOFs.
        assert_eq!(map.n_interior(), 1);
    }

    #[test]
    fn shared_entities_share_indices() {
        let m = Mesh::structured_cube(2).unwrap();
        let map = GlobalDofMap::new(&m, SpaceKind::SigmaPlus, cfg(1, 1));
        for (f, cells) in m.face_cells.iter().enumerate() {
            let ids: Vec<Vec<usize>> = cells
                .iter()
                .map(|&c| {
                    let i = m.cell_faces[c].iter().position(|&x| x == f).unwrap();
                    let base = 4 * 3;
                    vec![map.cell_dofs[c][base + i]]
                })
                .collect();
            assert!(ids.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn alternating_sums() {
        for n in 1..=3 {
            let m = Mesh::structured_cube(n).unwrap();
            for c in ElementConfig::standard() {
                let d: Vec<i64> = SpaceKind::ALL
                    .iter()
                    .map(|&k| GlobalDofMap::new(&m, k, c).n_dofs as i64)
                    .collect();
                assert_eq!(-1 + d[0] - d[1] + d[2] - d[3], 0, "N={n} {c}");
                let b: Vec<i64> = SpaceKind::ALL
                    .iter()
                    .map(|&k| GlobalDofMap::new(&m, k, c).n_interior() as i64)
                    .collect();
                assert_eq!(b[0] - b[1] + b[2] - (b[3] - 1), 0, "N={n} {c} boundary");
            }
        }
    }
}
