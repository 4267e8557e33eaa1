//! Tetrahedral meshes of the unit cube with globally oriented entities.
//!
//! Cells store ascending global vertex ids. Local edge `j` of a cell joins
//! local vertices [`LOCAL_EDGES`]`[j]`, local face `i` is opposite local
//! vertex `i`. Because cells are sorted, every local entity is traversed in
//! its global orientation.

mod affine;
mod io;

pub use affine::AffineMap;
pub use io::{read_mesh, write_mesh};

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyalg::{AffineMapQ, Q};

/// Local vertex pairs of the six cell edges.
pub const LOCAL_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local vertex triples of the four cell faces; face `i` omits vertex `i`.
pub const LOCAL_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub cells: Vec<[usize; 4]>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<[usize; 3]>,
    pub cell_edges: Vec<[usize; 6]>,
    pub cell_faces: Vec<[usize; 4]>,
    /// `+1` when the local edge runs in its global direction.
    pub cell_edge_signs: Vec<[i8; 6]>,
    pub face_cells: Vec<Vec<usize>>,
    pub boundary_vertices: Vec<bool>,
    pub boundary_edges: Vec<bool>,
    pub boundary_faces: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MeshCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub cells: usize,
    pub boundary_vertices: usize,
    pub boundary_edges: usize,
    pub boundary_faces: usize,
    /// `V − E + F − C`; 1 for a ball.
    pub euler: i64,
    /// `V − E + F` of the boundary surface; 2 for a sphere.
    pub boundary_euler: i64,
}

/// Unit tangent of an edge and orthonormal frame of a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceFrame {
    pub t1: [f64; 3],
    pub t2: [f64; 3],
    pub n: [f64; 3],
}

pub fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

impl Mesh {
    /// Kuhn subdivision of `N^3` subcubes into six tetrahedra each.
    pub fn structured_cube(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("mesh level N must be >= 1".into()));
        }
        let m = n + 1;
        let id = |a: usize, b: usize, c: usize| a + m * b + m * m * c;
        let h = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity(m * m * m);
        for c in 0..m {
            for b in 0..m {
                for a in 0..m {
                    vertices.push([a as f64 * h, b as f64 * h, c as f64 * h]);
                }
            }
        }
        const PERMS: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut cells = Vec::with_capacity(6 * n * n * n);
        for c in 0..n {
            for b in 0..n {
                for a in 0..n {
                    for perm in PERMS {
                        let mut p = [a, b, c];
                        let mut cell = [id(a, b, c), 0, 0, 0];
                        for (s, &ax) in perm.iter().enumerate() {
                            p[ax] += 1;
                            cell[s + 1] = id(p[0], p[1], p[2]);
                        }
                        cells.push(cell);
                    }
                }
            }
        }
        Self::from_cells(vertices, cells)
    }

    /// Build topology from vertex coordinates and cells (vertex ids are
    /// sorted per cell).
    pub fn from_cells(vertices: Vec<[f64; 3]>, cells: Vec<[usize; 4]>) -> Result<Self> {
        let nv = vertices.len();
        let mut sorted_cells = Vec::with_capacity(cells.len());
        for c in cells {
            if c.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidConfig(format!("cell {c:?} references a missing vertex")));
            }
            let mut s = c;
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidConfig(format!("cell {c:?} repeats a vertex")));
            }
            sorted_cells.push(s);
        }
        let cells = sorted_cells;

        let mut edge_ids: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let mut face_ids: BTreeMap<[usize; 3], usize> = BTreeMap::new();
        for c in &cells {
            for e in LOCAL_EDGES {
                edge_ids.insert([c[e[0]], c[e[1]]], 0);
            }
            for f in LOCAL_FACES {
                face_ids.insert([c[f[0]], c[f[1]], c[f[2]]], 0);
            }
        }
        let edges: Vec<[usize; 2]> = edge_ids.keys().copied().collect();
        let faces: Vec<[usize; 3]> = face_ids.keys().copied().collect();
        for (i, v) in edge_ids.values_mut().enumerate() {
            *v = i;
        }
        for (i, v) in face_ids.values_mut().enumerate() {
            *v = i;
        }

        let mut cell_edges = Vec::with_capacity(cells.len());
        let mut cell_faces = Vec::with_capacity(cells.len());
        let mut face_cells = vec![Vec::new(); faces.len()];
        for (ci, c) in cells.iter().enumerate() {
            cell_edges.push(LOCAL_EDGES.map(|e| edge_ids[&[c[e[0]], c[e[1]]]]));
            let fs = LOCAL_FACES.map(|f| face_ids[&[c[f[0]], c[f[1]], c[f[2]]]]);
            for &f in &fs {
                face_cells[f].push(ci);
            }
            cell_faces.push(fs);
        }
        if let Some(f) = face_cells.iter().position(|cs| cs.len() > 2) {
            return Err(Error::InvalidConfig(format!("face {f} has more than two cells")));
        }
        let cell_edge_signs = vec![[1i8; 6]; cells.len()];

        let boundary_faces: Vec<bool> = face_cells.iter().map(|cs| cs.len() == 1).collect();
        let mut boundary_edges = vec![false; edges.len()];
        let mut boundary_vertices = vec![false; nv];
        for (fi, f) in faces.iter().enumerate() {
            if !boundary_faces[fi] {
                continue;
            }
            for &v in f {
                boundary_vertices[v] = true;
            }
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                boundary_edges[edge_ids[&[f[a], f[b]]]] = true;
            }
        }

        let mesh = Self {
            vertices,
            cells,
            edges,
            faces,
            cell_edges,
            cell_faces,
            cell_edge_signs,
            face_cells,
            boundary_vertices,
            boundary_edges,
            boundary_faces,
        };
        for c in 0..mesh.cells.len() {
            if mesh.cell_volume(c) <= 0.0 {
                return Err(Error::DegenerateSimplex);
            }
        }
        Ok(mesh)
    }

    pub fn counts(&self) -> MeshCounts {
        let nb = |v: &[bool]| v.iter().filter(|&&b| b).count();
        let (v, e, f, k) = (
            self.vertices.len(),
            self.edges.len(),
            self.faces.len(),
            self.cells.len(),
        );
        let (bv, be, bf) = (
            nb(&self.boundary_vertices),
            nb(&self.boundary_edges),
            nb(&self.boundary_faces),
        );
        MeshCounts {
            vertices: v,
            edges: e,
            faces: f,
            cells: k,
            boundary_vertices: bv,
            boundary_edges: be,
            boundary_faces: bf,
            euler: v as i64 - e as i64 + f as i64 - k as i64,
            boundary_euler: bv as i64 - be as i64 + bf as i64,
        }
    }

    pub fn cell_vertices(&self, c: usize) -> [[f64; 3]; 4] {
        self.cells[c].map(|v| self.vertices[v])
    }

    pub fn cell_map(&self, c: usize) -> AffineMap {
        AffineMap::from_vertices(&self.cell_vertices(c))
    }

    /// Exact version of [`Mesh::cell_map`]; coordinates are converted from
    /// their binary representation without rounding.
    pub fn cell_map_exact(&self, c: usize) -> Result<AffineMapQ> {
        let v = self.cell_vertices(c).map(|p| p.map(f64_to_q));
        AffineMapQ::from_vertices(&v)
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.cell_map(c).det.abs() / 6.0
    }

    pub fn edge_tangent(&self, e: usize) -> [f64; 3] {
        let [a, b] = self.edges[e];
        normalize(&sub(&self.vertices[b], &self.vertices[a]))
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        norm(&sub(&self.vertices[b], &self.vertices[a]))
    }

    pub fn face_frame(&self, f: usize) -> FaceFrame {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v]);
        let d1 = sub(&b, &a);
        let t1 = normalize(&d1);
        let n = normalize(&cross(&d1, &sub(&c, &a)));
        FaceFrame {
            t1,
            t2: cross(&n, &t1),
            n,
        }
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v]);
        0.5 * norm(&cross(&sub(&b, &a), &sub(&c, &a)))
    }

    pub fn face_centroid(&self, f: usize) -> [f64; 3] {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v]);
        std::array::from_fn(|i| (a[i] + b[i] + c[i]) / 3.0)
    }

    pub fn alfeld(&self, c: usize) -> AlfeldSplit {
        AlfeldSplit::new(c, self.cell_vertices(c))
    }

    /// Largest ratio of circumscribed edge length to inscribed radius, a
    /// shape-regularity indicator.
    pub fn max_aspect(&self) -> f64 {
        (0..self.cells.len())
            .map(|c| aspect_ratio(&self.cell_vertices(c)))
            .fold(0.0, f64::max)
    }
}

/// Longest edge over inradius.
pub fn aspect_ratio(v: &[[f64; 3]; 4]) -> f64 {
    let vol = AffineMap::from_vertices(v).det.abs() / 6.0;
    let area: f64 = LOCAL_FACES
        .iter()
        .map(|f| 0.5 * norm(&cross(&sub(&v[f[1]], &v[f[0]]), &sub(&v[f[2]], &v[f[0]]))))
        .sum();
    let inradius = 3.0 * vol / area;
    let hmax = LOCAL_EDGES
        .iter()
        .map(|e| norm(&sub(&v[e[1]], &v[e[0]])))
        .fold(0.0, f64::max);
    hmax / inradius
}

pub fn f64_to_q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Barycentric subdivision of a cell into four subtets.
#[derive(Clone, Debug)]
pub struct AlfeldSplit {
    pub cell: usize,
    pub center: [f64; 3],
    /// Subtet `i` replaces parent vertex `i` by the center.
    pub subtets: [[[f64; 3]; 4]; 4],
}

impl AlfeldSplit {
    pub fn new(cell: usize, v: [[f64; 3]; 4]) -> Self {
        let center = std::array::from_fn(|i| (v[0][i] + v[1][i] + v[2][i] + v[3][i]) / 4.0);
        let subtets = std::array::from_fn(|i| {
            let mut s = v;
            s[i] = center;
            s
        });
        Self {
            cell,
            center,
            subtets,
        }
    }

    pub fn volumes(&self) -> [f64; 4] {
        self.subtets.map(|s| AffineMap::from_vertices(&s).det.abs() / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_counts() {
        let m = Mesh::structured_cube(1).unwrap();
        let c = m.counts();
        assert_eq!((c.vertices, c.edges, c.faces, c.cells), (8, 19, 18, 6));
        assert_eq!(c.euler, 1);
        assert_eq!(c.boundary_euler, 2);
        // Only the body diagonal is interior.
        assert_eq!(c.edges - c.boundary_edges, 1);
        let interior: Vec<_> = (0..m.edges.len()).filter(|&e| !m.boundary_edges[e]).collect();
        assert_eq!(m.edges[interior[0]], [0, 7]);
    }

    #[test]
    fn n2_counts() {
        let c = Mesh::structured_cube(2).unwrap().counts();
        assert_eq!((c.vertices, c.cells), (27, 48));
        assert_eq!(c.euler, 1);
    }

    #[test]
    fn zero_level_rejected() {
        assert!(Mesh::structured_cube(0).is_err());
    }

    #[test]
    fn face_cell_incidence() {
        let m = Mesh::structured_cube(2).unwrap();
        for (f, cs) in m.face_cells.iter().enumerate() {
            assert_eq!(cs.len() == 1, m.boundary_faces[f]);
            assert!(!cs.is_empty() && cs.len() <= 2);
        }
    }

    #[test]
    fn frames_orthonormal() {
        let m = Mesh::structured_cube(1).unwrap();
        for f in 0..m.faces.len() {
            let fr = m.face_frame(f);
            for v in [fr.t1, fr.t2, fr.n] {
                assert!((norm(&v) - 1.0).abs() < 1e-14);
            }
            assert!(dot(&fr.t1, &fr.t2).abs() < 1e-14);
            assert!(dot(&fr.t1, &fr.n).abs() < 1e-14);
            assert!(dot(&fr.t2, &fr.n).abs() < 1e-14);
        }
    }

    #[test]
    fn cell_order_does_not_change_frames() {
        let m = Mesh::structured_cube(1).unwrap();
        let mut cells = m.cells.clone();
        for c in cells.iter_mut() {
            c.reverse();
        }
        let m2 = Mesh::from_cells(m.vertices.clone(), cells).unwrap();
        for f in 0..m.faces.len() {
            assert_eq!(m.face_frame(f), m2.face_frame(f));
        }
    }

    #[test]
    fn alfeld_volumes() {
        let m = Mesh::structured_cube(1).unwrap();
        let s = m.alfeld(0);
        let total: f64 = s.volumes().iter().sum();
        assert!((total - m.cell_volume(0)).abs() < 1e-15);
        let r = AlfeldSplit::new(0, [[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        for v in r.volumes() {
            assert!((v - 1.0 / 24.0).abs() < 1e-15);
        }
        assert_eq!(r.center, [0.25; 3]);
    }

    #[test]
    fn maps_reproduce_vertices() {
        let m = Mesh::structured_cube(2).unwrap();
        let refv = [[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for c in 0..m.cells.len() {
            let f = m.cell_map(c);
            for (i, r) in refv.iter().enumerate() {
                let x = f.apply(r);
                assert_eq!(x, m.vertices[m.cells[c][i]]);
            }
        }
    }
}
