//! Preconditioned conjugate gradients for SPD sparse systems.

use serde::{Deserialize, Serialize};

use crate::assembly::Csr;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preconditioner {
    Jacobi,
    #[default]
    Ic0,
}

impl std::str::FromStr for Preconditioner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jacobi" => Ok(Self::Jacobi),
            "ic0" => Ok(Self::Ic0),
            other => Err(Error::Parse(format!("unknown preconditioner {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative residual target `‖b − Ax‖ ≤ tol·‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            preconditioner: Preconditioner::Ic0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Zero-fill incomplete Cholesky of the unit-diagonal scaling
/// `D^{-1/2} A D^{-1/2} + αI ≈ L Lᵀ`. The shift `α` starts at zero and is
/// raised until no pivot breaks down.
#[derive(Clone, Debug)]
pub struct Ic0 {
    n: usize,
    scale: Vec<f64>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
    pub shift: f64,
}

impl Ic0 {
    pub fn new(a: &Csr) -> Self {
        let n = a.nrows;
        let scale: Vec<f64> = a
            .diagonal()
            .iter()
            .map(|d| if *d > 0.0 { 1.0 / d.sqrt() } else { 1.0 })
            .collect();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut lower = Vec::new();
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    col_idx.push(j);
                    lower.push(v * scale[i] * scale[j]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let mut shift = 0.0;
        loop {
            if let Some(vals) = factor(n, &row_ptr, &col_idx, &lower, shift) {
                return Self {
                    n,
                    scale,
                    row_ptr,
                    col_idx,
                    vals,
                    shift,
                };
            }
            shift = if shift == 0.0 { 1e-3 } else { 2.0 * shift };
        }
    }

    /// Solves `D^{1/2} L Lᵀ D^{1/2} z = r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        for i in 0..self.n {
            z[i] = r[i] * self.scale[i];
        }
        for i in 0..self.n {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut v = z[i];
            for p in s..e - 1 {
                v -= self.vals[p] * z[self.col_idx[p]];
            }
            z[i] = v / self.vals[e - 1];
        }
        for i in (0..self.n).rev() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            z[i] /= self.vals[e - 1];
            let zi = z[i];
            for p in s..e - 1 {
                z[self.col_idx[p]] -= self.vals[p] * zi;
            }
        }
        for i in 0..self.n {
            z[i] *= self.scale[i];
        }
    }
}

/// Row-wise IC(0) on a lower pattern with diagonal last in each row.
/// `None` on a nonpositive pivot.
fn factor(n: usize, row_ptr: &[usize], col_idx: &[usize], lower: &[f64], shift: f64) -> Option<Vec<f64>> {
    let mut vals = lower.to_vec();
    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let (s, e) = (row_ptr[i], row_ptr[i + 1]);
        if e == s || col_idx[e - 1] != i {
            return None;
        }
        vals[e - 1] += shift;
        for p in s..e {
            pos[col_idx[p]] = p;
        }
        for p in s..e {
            let j = col_idx[p];
            // L_ij = (A_ij − Σ_{k<j} L_ik L_jk) / L_jj
            let mut sum = vals[p];
            for q in row_ptr[j]..row_ptr[j + 1] {
                let k = col_idx[q];
                if k >= j {
                    break;
                }
                if pos[k] != usize::MAX {
                    sum -= vals[pos[k]] * vals[q];
                }
            }
            if j < i {
                vals[p] = sum / vals[row_ptr[j + 1] - 1];
            } else if sum > 1e-12 {
                vals[p] = sum.sqrt();
            } else {
                return None;
            }
        }
        for p in s..e {
            pos[col_idx[p]] = usize::MAX;
        }
    }
    Some(vals)
}

enum Precond {
    Jacobi(Vec<f64>),
    Ic0(Ic0),
}

impl Precond {
    fn new(a: &Csr, kind: Preconditioner) -> Self {
        match kind {
            Preconditioner::Jacobi => Precond::Jacobi(
                a.diagonal().iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect(),
            ),
            Preconditioner::Ic0 => Precond::Ic0(Ic0::new(a)),
        }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Precond::Jacobi(d) => {
                for i in 0..r.len() {
                    z[i] = d[i] * r[i];
                }
            }
            Precond::Ic0(ic) => ic.apply(r, z),
        }
    }
}

/// Solves `A x = b` from `x = 0`.
pub fn pcg(a: &Csr, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    let n = b.len();
    assert_eq!(a.nrows, n);
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, SolveStats { iterations: 0, residual: 0.0 }));
    }
    let m = Precond::new(a, opts.preconditioner);
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rel = 1.0;
    for it in 1..=opts.max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotConverged { iterations: it, residual: rel });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= opts.tol {
            // Confirm with the true residual.
            let ax = a.mul_vec(&x);
            let true_rel = b.iter().zip(&ax).map(|(bi, ai)| (bi - ai).powi(2)).sum::<f64>().sqrt() / bnorm;
            if true_rel <= opts.tol {
                return Ok((x, SolveStats { iterations: it, residual: true_rel }));
            }
            r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual: rel,
    })
}
