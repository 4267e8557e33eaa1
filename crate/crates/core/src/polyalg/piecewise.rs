//! Fields on the Alfeld split of the reference tetrahedron.
//!
//! Subtet `i` is the reference tetrahedron with vertex `i` replaced by the
//! barycenter, so it carries boundary face `i` (the face opposite vertex `i`).

use num_traits::Zero;

use super::poly::{q, qi, Poly, VecPoly, Q};

/// Reference vertices `0, e_1, e_2, e_3`.
pub fn reference_vertices() -> [[Q; 3]; 4] {
    let z = || qi(0);
    let o = || qi(1);
    [[z(), z(), z()], [o(), z(), z()], [z(), o(), z()], [z(), z(), o()]]
}

/// Barycenter of the reference tetrahedron.
pub fn split_center() -> [Q; 3] {
    [q(1, 4), q(1, 4), q(1, 4)]
}

pub fn subtet_vertices(i: usize) -> [[Q; 3]; 4] {
    let mut v = reference_vertices();
    v[i] = split_center();
    v
}

/// Reference vertices of boundary face `i` (ascending vertex order, vertex `i` omitted).
pub fn boundary_face_vertices(i: usize) -> [[Q; 3]; 3] {
    let v = reference_vertices();
    let idx: Vec<usize> = (0..4).filter(|&j| j != i).collect();
    [v[idx[0]].clone(), v[idx[1]].clone(), v[idx[2]].clone()]
}

/// Internal split faces `(center, v_a, v_b)` with the two subtets sharing them.
pub fn internal_faces() -> Vec<([[Q; 3]; 3], usize, usize)> {
    let v = reference_vertices();
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            let others: Vec<usize> = (0..4).filter(|&j| j != a && j != b).collect();
            out.push((
                [split_center(), v[a].clone(), v[b].clone()],
                others[0],
                others[1],
            ));
        }
    }
    out
}

/// Affine forms mapping `(s, t)` (variables 0 and 1) onto the plane through
/// the three points.
pub fn plane_forms(p: &[[Q; 3]; 3]) -> [Poly; 3] {
    std::array::from_fn(|c| {
        Poly::affine(
            p[0][c].clone(),
            [
                &p[1][c] - &p[0][c],
                &p[2][c] - &p[0][c],
                Q::zero(),
            ],
        )
    })
}

/// Barycentric coordinates on the reference tetrahedron.
pub fn barycentric(x: &[f64; 3]) -> [f64; 4] {
    [1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]]
}

/// Index of the subtet containing `x` (the one whose replaced vertex has the
/// smallest barycentric weight).
pub fn locate_subtet(x: &[f64; 3]) -> usize {
    let l = barycentric(x);
    let mut best = 0;
    for i in 1..4 {
        if l[i] < l[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Continuity {
    /// One polynomial on the whole tetrahedron.
    Single,
    /// Continuous across internal split faces.
    C0,
    /// No inter-subtet condition.
    L2,
}

/// Anything with an exact restriction to a plane and a zero test.
pub trait FieldValue: Clone + PartialEq {
    fn substitute_forms(&self, forms: &[Poly; 3]) -> Self;
    fn is_zero_field(&self) -> bool;
    fn sub_field(&self, other: &Self) -> Self;
}

impl FieldValue for Poly {
    fn substitute_forms(&self, forms: &[Poly; 3]) -> Self {
        self.substitute(forms)
    }
    fn is_zero_field(&self) -> bool {
        self.is_zero()
    }
    fn sub_field(&self, other: &Self) -> Self {
        self - other
    }
}

impl FieldValue for VecPoly {
    fn substitute_forms(&self, forms: &[Poly; 3]) -> Self {
        self.substitute(forms)
    }
    fn is_zero_field(&self) -> bool {
        self.is_zero()
    }
    fn sub_field(&self, other: &Self) -> Self {
        self - other
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piecewise<T> {
    pub pieces: [T; 4],
    pub continuity: Continuity,
}

pub type PiecewisePoly = Piecewise<Poly>;
pub type PiecewiseVec = Piecewise<VecPoly>;

impl<T: FieldValue> Piecewise<T> {
    pub fn single(p: T) -> Self {
        Self {
            pieces: [p.clone(), p.clone(), p.clone(), p],
            continuity: Continuity::Single,
        }
    }

    pub fn new(pieces: [T; 4], continuity: Continuity) -> Self {
        Self { pieces, continuity }
    }

    pub fn is_single(&self) -> bool {
        self.pieces.iter().all(|p| *p == self.pieces[0])
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(T::is_zero_field)
    }

    /// Exact trace agreement on every internal face of the split.
    pub fn is_continuous(&self) -> bool {
        internal_faces().iter().all(|(f, a, b)| {
            let forms = plane_forms(f);
            self.pieces[*a]
                .sub_field(&self.pieces[*b])
                .substitute_forms(&forms)
                .is_zero_field()
        })
    }

    /// Restriction of the field to boundary face `i`, in face parameters `(s, t)`.
    pub fn boundary_trace(&self, i: usize) -> T {
        self.pieces[i].substitute_forms(&plane_forms(&boundary_face_vertices(i)))
    }

    pub fn has_zero_trace(&self) -> bool {
        (0..4).all(|i| self.boundary_trace(i).is_zero_field())
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Piecewise<U> {
        Piecewise {
            pieces: std::array::from_fn(|i| f(&self.pieces[i])),
            continuity: self.continuity,
        }
    }

    pub fn zip_with<F: Fn(&T, &T) -> T>(&self, other: &Self, f: F) -> Self {
        let continuity = if self.continuity == other.continuity {
            self.continuity
        } else if self.continuity == Continuity::L2 || other.continuity == Continuity::L2 {
            Continuity::L2
        } else {
            Continuity::C0
        };
        Piecewise {
            pieces: std::array::from_fn(|i| f(&self.pieces[i], &other.pieces[i])),
            continuity,
        }
    }
}

impl PiecewisePoly {
    pub fn grad(&self) -> PiecewiseVec {
        self.map(Poly::grad)
    }

    pub fn eval_f64(&self, x: &[f64; 3]) -> f64 {
        self.pieces[locate_subtet(x)].eval_f64(x)
    }

    pub fn degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(Poly::degree).max()
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, p) in self.pieces.iter().enumerate() {
            s.push_str(&format!("# subtet {i}\n"));
            let d = p.dump();
            if !d.is_empty() {
                s.push_str(&d);
                s.push('\n');
            }
        }
        s
    }
}

impl PiecewiseVec {
    pub fn curl(&self) -> PiecewiseVec {
        let mut out = self.map(VecPoly::curl);
        if out.continuity == Continuity::C0 {
            out.continuity = Continuity::L2;
        }
        out
    }

    pub fn div(&self) -> PiecewisePoly {
        let mut out = self.map(VecPoly::div);
        if out.continuity == Continuity::C0 {
            out.continuity = Continuity::L2;
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64; 3]) -> [f64; 3] {
        self.pieces[locate_subtet(x)].eval_f64(x)
    }

    pub fn degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(VecPoly::degree).max()
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, p) in self.pieces.iter().enumerate() {
            s.push_str(&format!("# subtet {i}\n"));
            s.push_str(&p.dump());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_matches_subtets() {
        // Near vertex 0 the subtet lacking vertex 0 cannot contain the point.
        assert_ne!(locate_subtet(&[0.01, 0.01, 0.01]), 0);
        // Centroid of boundary face 0 lies in subtet 0.
        assert_eq!(locate_subtet(&[0.33, 0.33, 0.33]), 0);
        assert_eq!(locate_subtet(&[0.0, 0.3, 0.3]), 1);
    }

    #[test]
    fn global_poly_is_continuous() {
        let p = &Poly::var(0) * &Poly::var(1);
        let f = PiecewisePoly::single(p);
        assert!(f.is_continuous());
        assert!(!f.has_zero_trace());
    }

    #[test]
    fn indicator_is_discontinuous() {
        let mut pieces: [Poly; 4] = Default::default();
        pieces[0] = Poly::one();
        let f = PiecewisePoly::new(pieces, Continuity::L2);
        assert!(!f.is_continuous());
    }

    #[test]
    fn internal_face_count() {
        assert_eq!(internal_faces().len(), 6);
    }
}
