//! Model problems on the unit cube: the quad-curl problem
//! `−∇×Δ∇×u + u = f` in `V_h^0`, the Stokes problem with the `Σ⁺–W` pair,
//! the discrete inf-sup constant and the convergence harness.

pub mod manufactured;
pub mod report;
pub mod solver;

pub use manufactured::{CosPressure, QuadCurlForcing, SeparableField, StokesForcing, Trig1d};
pub use report::{rate, sci, ConvergenceReport, ConvergenceRow};
pub use solver::{pcg, Ic0, Preconditioner, SolveStats, SolverOptions};

use std::time::Instant;

use nalgebra::{Cholesky, SymmetricEigen};
use serde::Serialize;

use crate::assembly::{
    extend_vector, restrict_square, restrict_vector, Csr, Discretization,
    ErrorNorms, FieldSample, Form, ScalarSample, Target,
};
use crate::elements::{ElementConfig, SpaceKind};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Clone, Debug, Serialize)]
pub struct QuadCurlProblem {
    pub n: usize,
    pub config: ElementConfig,
    pub solver: SolverOptions,
    /// Overrides the default quadrature degree.
    pub quadrature: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadCurlSolution {
    pub n: usize,
    pub config: ElementConfig,
    /// Unknowns after boundary restriction.
    pub dofs: usize,
    /// Full coefficient vector in `V_h`, zero on boundary DOFs.
    #[serde(skip)]
    pub coeffs: Vec<f64>,
    /// `value = ‖e‖`, `first = ‖∇×e‖`, `second = |∇×e|₁`.
    pub errors: ErrorNorms,
    pub stats: SolveStats,
    pub seconds: f64,
}

/// Solves `a(u_h, v) = (f, v)` on `V_h^0` for forcing `f`.
pub fn solve_quadcurl_with(
    disc: &Discretization,
    forcing: &dyn FieldSample,
    exact: &dyn FieldSample,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, ErrorNorms, SolveStats)> {
    let map = disc.map(SpaceKind::V);
    let a = restrict_square(&disc.assemble(Form::GradCurl), map);
    let b = restrict_vector(&disc.load(SpaceKind::V, Target::Vector(forcing)), map);
    let (x, stats) = pcg(&a, &b, opts)?;
    let coeffs = extend_vector(&x, map);
    let errors = disc.errors(SpaceKind::V, &coeffs, Target::Vector(exact));
    Ok((coeffs, errors, stats))
}

/// Quad-curl problem with the trigonometric manufactured solution.
pub fn solve_quadcurl(problem: &QuadCurlProblem) -> Result<QuadCurlSolution> {
    let start = Instant::now();
    let disc = Discretization::new(Mesh::structured_cube(problem.n)?, problem.config, problem.quadrature)?;
    let u = SeparableField::quadcurl_solution();
    let (coeffs, errors, stats) = solve_quadcurl_with(&disc, &QuadCurlForcing(&u), &u, &problem.solver)?;
    log::info!(
        "quadcurl {} N={} dofs={} iterations={} errors {:?}",
        problem.config,
        problem.n,
        disc.map(SpaceKind::V).n_interior(),
        stats.iterations,
        errors
    );
    Ok(QuadCurlSolution {
        n: problem.n,
        config: problem.config,
        dofs: disc.map(SpaceKind::V).n_interior(),
        coeffs,
        errors,
        stats,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesProblem {
    pub n: usize,
    pub k: usize,
    pub viscosity: f64,
    pub solver: SolverOptions,
    /// Overrides the default quadrature degree.
    pub quadrature: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesSolution {
    pub n: usize,
    pub k: usize,
    pub velocity_dofs: usize,
    pub pressure_dofs: usize,
    #[serde(skip)]
    pub velocity: Vec<f64>,
    #[serde(skip)]
    pub pressure: Vec<f64>,
    /// `‖∇·u_h‖`.
    pub div_norm: f64,
    /// `value = ‖u − u_h‖`, `first = |u − u_h|₁`.
    pub velocity_errors: ErrorNorms,
    pub pressure_error: f64,
    pub outer_iterations: usize,
    pub seconds: f64,
}

impl StokesSolution {
    pub const CSV_HEADER: &'static str =
        "N,k,velocity_dofs,pressure_dofs,div_norm,velocity_l2,velocity_h1,pressure_l2,outer_iterations";

    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            self.n,
            self.k,
            self.velocity_dofs,
            self.pressure_dofs,
            sci(self.div_norm),
            sci(self.velocity_errors.value),
            sci(self.velocity_errors.first),
            sci(self.pressure_error),
            self.outer_iterations
        )
    }
}

/// Operators of the Stokes pair on one mesh.
struct StokesSystem {
    a: Csr,
    b: Csr,
    mass_diag: Vec<f64>,
    constant: Vec<f64>,
    mass_w: Csr,
}

impl StokesSystem {
    fn new(disc: &Discretization, viscosity: f64) -> Self {
        let vmap = disc.map(SpaceKind::SigmaPlus);
        let wmap = disc.map(SpaceKind::W);
        let mut a = restrict_square(&disc.assemble(Form::VectorLaplace), vmap);
        a.vals.iter_mut().for_each(|v| *v *= viscosity);
        let all_w: Vec<usize> = (0..wmap.n_dofs).collect();
        let b = disc.assemble(Form::DivPressure).restrict(&all_w, &vmap.interior_dofs());
        let mass_w = disc.assemble(Form::Mass(SpaceKind::W));
        let constant = disc.interpolate(SpaceKind::W, Target::Scalar(&One));
        Self {
            a,
            b,
            mass_diag: mass_w.diagonal(),
            constant,
            mass_w,
        }
    }

    /// Removes the component along the constant pressure.
    fn project(&self, r: &mut [f64]) {
        let z = &self.constant;
        let c = dot(z, r) / dot(z, z);
        r.iter_mut().zip(z).for_each(|(ri, zi)| *ri -= c * zi);
    }

    /// Shifts a pressure to zero mean.
    fn mean_zero(&self, p: &mut [f64]) {
        let mz = self.mass_w.mul_vec(&self.constant);
        let c = dot(&mz, p) / dot(&mz, &self.constant);
        p.iter_mut().zip(&self.constant).for_each(|(pi, zi)| *pi -= c * zi);
    }
}

struct One;

impl ScalarSample for One {
    fn value(&self, _: &[f64; 3]) -> f64 {
        1.0
    }
    fn grad(&self, _: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Family whose `Σ⁺ × W` pair is used for Stokes at order `k`.
pub fn stokes_config(k: usize) -> Result<ElementConfig> {
    ElementConfig::new(k, k)
}

/// Solves `ν(∇u, ∇v) − (p, ∇·v) = (f, v)`, `(∇·u, q) = 0` by conjugate
/// gradients on the pressure Schur complement, preconditioned by the
/// pressure mass diagonal.
pub fn solve_stokes_with(
    disc: &Discretization,
    viscosity: f64,
    forcing: &dyn FieldSample,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let sys = StokesSystem::new(disc, viscosity);
    let vmap = disc.map(SpaceKind::SigmaPlus);
    let f = restrict_vector(&disc.load(SpaceKind::SigmaPlus, Target::Vector(forcing)), vmap);
    let inner = SolverOptions {
        tol: (opts.tol * 1e-3).max(1e-14),
        ..*opts
    };
    let solve_a = |rhs: &[f64]| pcg(&sys.a, rhs, &inner).map(|r| r.0);
    let bt = sys.b.transpose();
    let schur = |p: &[f64]| -> Result<Vec<f64>> {
        let w = solve_a(&bt.mul_vec(p))?;
        let mut out = sys.b.mul_vec(&w);
        sys.project(&mut out);
        Ok(out)
    };
    let af = solve_a(&f)?;
    let mut g: Vec<f64> = sys.b.mul_vec(&af).iter().map(|v| -v).collect();
    sys.project(&mut g);
    let np = g.len();
    let mut p = vec![0.0; np];
    let gnorm = dot(&g, &g).sqrt();
    let mut iterations = 0;
    if gnorm > 0.0 {
        let precond = |r: &[f64]| -> Vec<f64> {
            let mut z: Vec<f64> = r.iter().zip(&sys.mass_diag).map(|(ri, d)| ri / d).collect();
            sys.project(&mut z);
            z
        };
        let mut r = g.clone();
        let mut z = precond(&r);
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        loop {
            iterations += 1;
            let sd = schur(&d)?;
            let alpha = rz / dot(&d, &sd);
            for i in 0..np {
                p[i] += alpha * d[i];
                r[i] -= alpha * sd[i];
            }
            let rel = dot(&r, &r).sqrt() / gnorm;
            if rel <= opts.tol {
                break;
            }
            if iterations >= opts.max_iter {
                return Err(Error::NotConverged { iterations, residual: rel });
            }
            z = precond(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..np {
                d[i] = z[i] + beta * d[i];
            }
        }
    }
    sys.mean_zero(&mut p);
    let rhs: Vec<f64> = f.iter().zip(bt.mul_vec(&p)).map(|(a, b)| a + b).collect();
    let u = solve_a(&rhs)?;
    Ok((extend_vector(&u, vmap), p, iterations))
}

/// Stokes problem with the trigonometric velocity and cosine pressure.
pub fn solve_stokes(problem: &StokesProblem) -> Result<StokesSolution> {
    let start = Instant::now();
    let disc = Discretization::new(Mesh::structured_cube(problem.n)?, stokes_config(problem.k)?, problem.quadrature)?;
    let u = SeparableField::quadcurl_solution();
    let forcing = StokesForcing {
        velocity: &u,
        pressure: &CosPressure,
        viscosity: problem.viscosity,
    };
    let (velocity, pressure, outer_iterations) =
        solve_stokes_with(&disc, problem.viscosity, &forcing, &problem.solver)?;
    let velocity_errors = disc.errors(SpaceKind::SigmaPlus, &velocity, Target::Vector(&u));
    let pressure_error = disc.errors(SpaceKind::W, &pressure, Target::Scalar(&CosPressure)).value;
    Ok(StokesSolution {
        n: problem.n,
        k: problem.k,
        velocity_dofs: disc.map(SpaceKind::SigmaPlus).n_interior(),
        pressure_dofs: disc.n_dofs(SpaceKind::W),
        div_norm: disc.div_norm(&velocity),
        velocity,
        pressure,
        velocity_errors,
        pressure_error,
        outer_iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Discrete inf-sup constant of `Σ_h^{+,0} × W̊_h` in the full `H¹` norm:
/// the square root of the smallest eigenvalue of `B A₁⁻¹ Bᵀ` relative to
/// the pressure mass matrix on mean-zero pressures. Dense; for small meshes.
pub fn inf_sup_constant(n: usize, k: usize) -> Result<f64> {
    let disc = Discretization::structured(n, stokes_config(k)?)?;
    let vmap = disc.map(SpaceKind::SigmaPlus);
    let wmap = disc.map(SpaceKind::W);
    let a1 = restrict_square(&disc.assemble(Form::H1Gram), vmap).to_dense();
    let all_w: Vec<usize> = (0..wmap.n_dofs).collect();
    let b = disc
        .assemble(Form::DivPressure)
        .restrict(&all_w, &vmap.interior_dofs())
        .to_dense();
    let m = disc.assemble(Form::Mass(SpaceKind::W)).to_dense();
    let chol_a = Cholesky::new(a1).ok_or_else(|| Error::Eigen("H1 Gram matrix not SPD".into()))?;
    let s = &b * chol_a.solve(&b.transpose());
    let chol_m = Cholesky::new(m).ok_or_else(|| Error::Eigen("pressure mass not SPD".into()))?;
    let l = chol_m.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("singular mass factor".into()))?;
    let mut c = &linv * s * linv.transpose();
    c = (&c + c.transpose()) * 0.5;
    // L⁻¹ S L⁻ᵀ annihilates Lᵀz for the constant pressure z; lift that
    // eigenvalue above the spectrum.
    let z = nalgebra::DVector::from_vec(disc.interpolate(SpaceKind::W, Target::Scalar(&One)));
    let v = l.transpose() * z;
    let v = &v / v.norm();
    let shift = c.trace() + 1.0;
    c += &v * v.transpose() * shift;
    let eig = SymmetricEigen::try_new(c, 1e-14, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigen solver did not converge".into()))?;
    let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmin > 0.0) {
        return Err(Error::Eigen(format!("nonpositive Schur eigenvalue {lmin:e}")));
    }
    Ok(lmin.sqrt())
}

/// Problems supported by the convergence harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Quadcurl,
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadcurl" => Ok(Self::Quadcurl),
            other => Err(Error::Parse(format!("unknown problem {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub problem: ProblemKind,
    pub config: ElementConfig,
    pub levels: Vec<usize>,
    pub solver: SolverOptions,
    pub quadrature: Option<usize>,
}

/// Solves on each level in order and reports consecutive-level rates.
pub fn run_convergence(study: &ConvergenceStudy) -> Result<ConvergenceReport> {
    let mut rows = Vec::new();
    for &n in &study.levels {
        let sol = solve_quadcurl(&QuadCurlProblem {
            n,
            config: study.config,
            solver: study.solver,
            quadrature: study.quadrature,
        })?;
        rows.push(ConvergenceRow::new(n, sol.dofs, &sol.errors, sol.seconds));
    }
    Ok(ConvergenceReport::new(study.config, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::ZeroField;

    fn cfg(r: usize, k: usize) -> ElementConfig {
        ElementConfig::new(r, k).unwrap()
    }

    #[test]
    fn zero_forcing_gives_zero_quadcurl() {
        let d = Discretization::structured(2, cfg(1, 1)).unwrap();
        let (c, _, st) = solve_quadcurl_with(&d, &ZeroField, &ZeroField, &SolverOptions::default()).unwrap();
        assert!(c.iter().all(|v| *v == 0.0));
        assert_eq!(st.iterations, 0);
    }

    #[test]
    fn zero_forcing_gives_zero_stokes() {
        let d = Discretization::structured(2, cfg(1, 1)).unwrap();
        let (u, p, _) = solve_stokes_with(&d, 1.0, &ZeroField, &SolverOptions::default()).unwrap();
        assert!(u.iter().chain(&p).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn stokes_velocity_is_divergence_free() {
        let sol = solve_stokes(&StokesProblem {
            n: 2,
            k: 1,
            viscosity: 1.0,
            solver: SolverOptions::default(),
            quadrature: None,
        })
        .unwrap();
        assert!(sol.div_norm <= 1e-9, "{}", sol.div_norm);
    }

    #[test]
    fn inf_sup_positive_on_one_cell_cube() {
        let a = inf_sup_constant(1, 1).unwrap();
        assert!(a > 0.0 && a.is_finite());
    }
}
