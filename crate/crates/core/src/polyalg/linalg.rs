//! Exact dense linear algebra over the rationals.

use num_traits::{One, Zero};

use super::poly::{q_to_f64, Q};

/// Row-major dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    /// Matrix whose rows are the given vectors (all of length `cols`).
    pub fn from_rows(rows: &[Vec<Q>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.data[i * cols..(i + 1) * cols].clone_from_slice(r);
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| q_to_f64(&self[(i, j)]))
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = Q::one() / &self[(r, c)];
            for j in c..self.cols {
                if !self[(r, j)].is_zero() {
                    let v = &self[(r, j)] * &inv;
                    self[(r, j)] = v;
                }
            }
            let pivot_row: Vec<(usize, Q)> = (c..self.cols)
                .filter(|&j| !self[(r, j)].is_zero())
                .map(|j| (j, self[(r, j)].clone()))
                .collect();
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for (j, v) in &pivot_row {
                    let d = &f * v;
                    self[(i, *j)] -= d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[(r, free)].clone();
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `A x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Some(QMatrix::zeros(0, 0));
        }
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Incrementally built reduced echelon basis of a subspace of `Q^n`.
///
/// Supports membership tests and coordinates of members with respect to the
/// inserted (not reduced) vectors.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    n: usize,
    /// Reduced rows with their pivot column.
    rows: Vec<(usize, Vec<Q>)>,
    /// For each reduced row, its expression in terms of inserted vectors.
    combos: Vec<Vec<Q>>,
    inserted: usize,
}

impl EchelonBasis {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            combos: Vec::new(),
            inserted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Reduce `v` against the basis; returns remainder and the combination
    /// (over inserted vectors) that was subtracted.
    fn reduce(&self, v: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let mut rem = v.to_vec();
        let mut combo = vec![Q::zero(); self.inserted];
        for ((p, row), c) in self.rows.iter().zip(&self.combos) {
            if rem[*p].is_zero() {
                continue;
            }
            let f = rem[*p].clone();
            for (r, a) in rem.iter_mut().zip(row) {
                if !a.is_zero() {
                    *r -= &f * a;
                }
            }
            for (k, a) in combo.iter_mut().zip(c) {
                if !a.is_zero() {
                    *k += &f * a;
                }
            }
        }
        (rem, combo)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).0.iter().all(Zero::is_zero)
    }

    /// Insert `v`; returns `false` (and leaves the basis unchanged) when `v`
    /// is already in the span.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.n);
        let (mut rem, mut combo) = self.reduce(v);
        let Some(p) = rem.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        // rem = v - sum combo_k inserted_k; normalize.
        let inv = Q::one() / &rem[p];
        for r in rem.iter_mut() {
            if !r.is_zero() {
                *r *= &inv;
            }
        }
        for c in combo.iter_mut() {
            *c = -&*c * &inv;
        }
        combo.push(inv.clone());
        for c in self.combos.iter_mut() {
            c.push(Q::zero());
        }
        self.inserted += 1;
        // Keep existing rows reduced with respect to the new pivot.
        for (row, c) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            if row.1[p].is_zero() {
                continue;
            }
            let f = row.1[p].clone();
            for (a, b) in row.1.iter_mut().zip(&rem) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
            for (a, b) in c.iter_mut().zip(&combo) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        self.rows.push((p, rem));
        self.combos.push(combo);
        true
    }

    /// Coordinates of `v` in terms of the accepted inserted vectors, or
    /// `None` if `v` is outside the span.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); self.inserted];
        for ((p, _), c) in self.rows.iter().zip(&self.combos) {
            if v[*p].is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(c) {
                if !a.is_zero() {
                    *o += &v[*p] * a;
                }
            }
        }
        if self.contains(v) {
            Some(out)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::poly::qi;

    fn m(rows: &[&[i64]]) -> QMatrix {
        let cols = rows[0].len();
        let r: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect();
        QMatrix::from_rows(&r, cols)
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(3));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(a.solve(&[qi(1), qi(2)]).is_none());
        let x = a.solve(&[qi(3), qi(3)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![qi(3), qi(3)]);
    }

    #[test]
    fn echelon_coords() {
        let mut b = EchelonBasis::new(3);
        assert!(b.insert(&[qi(1), qi(1), qi(0)]));
        assert!(b.insert(&[qi(0), qi(1), qi(1)]));
        assert!(!b.insert(&[qi(1), qi(2), qi(1)]));
        assert!(b.insert(&[qi(0), qi(0), qi(2)]));
        let v = [qi(2), qi(5), qi(7)];
        let c = b.coords(&v).unwrap();
        // c0 (1,1,0) + c1 (0,1,1) + c2 (0,0,2) = (2,5,7)
        assert_eq!(c, vec![qi(2), qi(3), qi(2)]);
    }
}
