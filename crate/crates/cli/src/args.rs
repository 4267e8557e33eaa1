//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stokesfem", version, about = "Grad-curl conforming elements and divergence-free Stokes pairs on tetrahedra")]
pub struct Cli {
    /// Key-value config file supplementing the flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (default: available parallelism; 1 for reproducible baselines).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structured meshes of the unit cube.
    Mesh {
        #[command(subcommand)]
        cmd: MeshCmd,
    },
    /// Local element spaces.
    Element {
        #[command(subcommand)]
        cmd: ElementCmd,
    },
    /// Run verification checks: `all` or one of dimensions, bubbles,
    /// poincare, exactness, unisolvence, global, commuting, reproduction, rates.
    Verify(VerifyArgs),
    /// Solve a model problem with its manufactured solution.
    Solve {
        #[command(subcommand)]
        cmd: SolveCmd,
    },
    /// Quad-curl errors and rates over a sequence of meshes.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Subcommand)]
pub enum MeshCmd {
    /// Entity counts and Euler characteristics as JSON.
    Info(MeshArgs),
    /// Write the mesh in the plain-text exchange format.
    Export(MeshArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Subdivisions per axis.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ElementCmd {
    /// Dimensions, DOF counts per entity and the exactness rank table as JSON.
    Info(FamilyArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all` or a check name.
    pub check: String,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Mesh level for the global and commuting checks.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Mesh levels for the global and rate checks, e.g. `4,8`.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// Seed for random polynomials, fields and cells.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the JSON report here.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Relative residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// `ic0` or `jacobi`.
    #[arg(long)]
    pub preconditioner: Option<String>,
    /// Quadrature degree override.
    #[arg(long)]
    pub quadrature: Option<usize>,
    /// CSV output file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// JSON output file.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    /// `(∇×)⁴u = f` on V_h with homogeneous boundary conditions.
    Quadcurl {
        #[arg(long = "N")]
        n: Option<usize>,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Stokes with the exactly divergence-free pair `Σ⁺ × W`.
    Stokes {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        viscosity: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Model problem; only `quadcurl` is supported.
    #[arg(long)]
    pub problem: Option<String>,
    /// Mesh levels, e.g. `2,4,8`.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}
