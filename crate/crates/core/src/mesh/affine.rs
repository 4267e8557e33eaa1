use nalgebra::{Matrix3, Vector3};

/// Floating-point cell map `x = B x̂ + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub b: Matrix3<f64>,
    pub t: Vector3<f64>,
    pub det: f64,
    pub b_inv: Matrix3<f64>,
    pub b_inv_t: Matrix3<f64>,
}

impl AffineMap {
    pub fn new(b: Matrix3<f64>, t: Vector3<f64>) -> Self {
        let det = b.determinant();
        let b_inv = b.try_inverse().unwrap_or_else(Matrix3::zeros);
        Self {
            b,
            t,
            det,
            b_inv,
            b_inv_t: b_inv.transpose(),
        }
    }

    pub fn from_vertices(v: &[[f64; 3]; 4]) -> Self {
        let b = Matrix3::from_fn(|i, j| v[j + 1][i] - v[0][i]);
        Self::new(b, Vector3::from(v[0]))
    }

    pub fn apply(&self, x: &[f64; 3]) -> [f64; 3] {
        let y = self.b * Vector3::from(*x) + self.t;
        [y[0], y[1], y[2]]
    }

    pub fn apply_inverse(&self, x: &[f64; 3]) -> [f64; 3] {
        let y = self.b_inv * (Vector3::from(*x) - self.t);
        [y[0], y[1], y[2]]
    }
}
