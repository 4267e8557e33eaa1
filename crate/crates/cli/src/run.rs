//! Resolution of flags and config file into a validated [`RunConfig`], and
//! its execution.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::json;
use stokesfem::elements::{dof_counts, exactness_table, physical::quadrature_degree, ElementConfig, SpaceKind};
use stokesfem::mesh::{write_mesh, Mesh};
use stokesfem::problems::{
    run_convergence, solve_quadcurl, solve_stokes, stokes_config, ConvergenceReport, ConvergenceRow,
    ConvergenceStudy, Preconditioner, ProblemKind, QuadCurlProblem, SolverOptions, StokesProblem,
};
use stokesfem::verify::{verify, Check, VerifyOptions};

use crate::args::{Cli, Command, ElementCmd, FamilyArgs, Format, MeshCmd, SolveCmd, SolverArgs};
use crate::error::{CliError, CliResult};
use crate::settings::Settings;

#[derive(Clone, Debug)]
pub enum Task {
    MeshInfo { n: usize },
    MeshExport { n: usize, out: PathBuf },
    ElementInfo { config: ElementConfig },
    Verify { checks: Vec<Check>, options: VerifyOptions },
    Quadcurl(QuadCurlProblem),
    Stokes(StokesProblem),
    Convergence(ConvergenceStudy),
}

/// Everything a run needs, validated before any computation starts.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub task: Task,
    pub format: Format,
    /// CSV output (solve, convergence).
    pub csv: Option<PathBuf>,
    /// JSON output (verify, solve, convergence).
    pub json: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn required<T>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| invalid(format!("missing --{name}")))
}

fn level(v: Option<usize>) -> CliResult<usize> {
    match required(v, "N")? {
        0 => Err(invalid("--N must be positive")),
        n => Ok(n),
    }
}

fn family(s: &Settings, f: &FamilyArgs) -> CliResult<ElementConfig> {
    let r = required(s.pick(f.r, "r")?, "r")?;
    let k = required(s.pick(f.k, "k")?, "k")?;
    Ok(ElementConfig::new(r, k)?)
}

fn solver(s: &Settings, a: &SolverArgs) -> CliResult<SolverOptions> {
    let mut o = SolverOptions::default();
    if let Some(t) = s.pick(a.tol, "tol")? {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("--tol must be positive, got {t}")));
        }
        o.tol = t;
    }
    if let Some(m) = s.pick(a.max_iter, "max_iter")? {
        if m == 0 {
            return Err(invalid("--max-iter must be positive"));
        }
        o.max_iter = m;
    }
    if let Some(p) = s.pick::<String>(a.preconditioner.clone(), "preconditioner")? {
        o.preconditioner = p.parse::<Preconditioner>()?;
    }
    Ok(o)
}

fn quadrature(s: &Settings, a: &SolverArgs, config: ElementConfig) -> CliResult<Option<usize>> {
    let q = s.pick(a.quadrature, "quadrature")?;
    if q.is_some() {
        quadrature_degree(config, q)?;
    }
    Ok(q)
}

fn positive_levels(levels: Vec<usize>) -> CliResult<Vec<usize>> {
    if levels.is_empty() || levels.contains(&0) {
        return Err(invalid(format!("levels must be positive, got {levels:?}")));
    }
    Ok(levels)
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> CliResult<Self> {
        let s = match &cli.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let threads = s.pick(cli.threads, "threads")?;
        if threads == Some(0) {
            return Err(invalid("--threads must be positive"));
        }
        let format = s.pick(cli.format, "format")?;
        let (task, csv, json, default_format) = match cli.command {
            Command::Mesh { cmd } => match cmd {
                MeshCmd::Info(a) => (Task::MeshInfo { n: level(s.pick(a.n, "N")?)? }, None, None, Format::Json),
                MeshCmd::Export(a) => {
                    let n = level(s.pick(a.n, "N")?)?;
                    let out = required(s.pick(a.out, "out")?, "out")?;
                    (Task::MeshExport { n, out }, None, None, Format::Json)
                }
            },
            Command::Element {
                cmd: ElementCmd::Info(f),
            } => (Task::ElementInfo { config: family(&s, &f)? }, None, None, Format::Json),
            Command::Verify(a) => {
                let checks = match a.check.as_str() {
                    "all" => Check::ALL.to_vec(),
                    name => vec![name.parse::<Check>()?],
                };
                let mut options = VerifyOptions::default();
                let (r, k) = (s.pick(a.family.r, "r")?, s.pick(a.family.k, "k")?);
                match (r, k) {
                    (Some(r), Some(k)) => options = VerifyOptions::single(ElementConfig::new(r, k)?),
                    (None, None) => {}
                    _ => return Err(invalid("--r and --k must be given together")),
                }
                if let Some(n) = s.pick(a.n, "N")? {
                    let n = level(Some(n))?;
                    options.levels = vec![n];
                    options.commuting_level = n;
                }
                if let Some(l) = s.pick_list(a.levels, "levels")? {
                    let l = positive_levels(l)?;
                    options.rate_levels = l.clone();
                    options.levels = l;
                }
                if options.rate_levels.len() < 2 && checks.contains(&Check::Rates) {
                    return Err(invalid("the rates check needs at least two levels"));
                }
                if let Some(seed) = s.pick(a.seed, "seed")? {
                    options.seed = seed;
                }
                let json = s.pick(a.json, "json")?;
                (Task::Verify { checks, options }, None, json, Format::Table)
            }
            Command::Solve { cmd } => match cmd {
                SolveCmd::Quadcurl { n, family: f, solver: a } => {
                    let config = family(&s, &f)?;
                    let problem = QuadCurlProblem {
                        n: level(s.pick(n, "N")?)?,
                        config,
                        solver: solver(&s, &a)?,
                        quadrature: quadrature(&s, &a, config)?,
                    };
                    (Task::Quadcurl(problem), s.pick(a.out, "out")?, s.pick(a.json, "json")?, Format::Json)
                }
                SolveCmd::Stokes { n, k, viscosity, solver: a } => {
                    let k = required(s.pick(k, "k")?, "k")?;
                    let config = stokes_config(k)?;
                    let viscosity = s.pick(viscosity, "viscosity")?.unwrap_or(1.0);
                    if !(viscosity > 0.0 && viscosity.is_finite()) {
                        return Err(invalid(format!("--viscosity must be positive, got {viscosity}")));
                    }
                    let problem = StokesProblem {
                        n: level(s.pick(n, "N")?)?,
                        k,
                        viscosity,
                        solver: solver(&s, &a)?,
                        quadrature: quadrature(&s, &a, config)?,
                    };
                    (Task::Stokes(problem), s.pick(a.out, "out")?, s.pick(a.json, "json")?, Format::Json)
                }
            },
            Command::Convergence(a) => {
                let problem: ProblemKind = s.pick(a.problem, "problem")?.unwrap_or_else(|| "quadcurl".into()).parse()?;
                let config = family(&s, &a.family)?;
                let levels = positive_levels(required(s.pick_list(a.levels, "levels")?, "levels")?)?;
                let study = ConvergenceStudy {
                    problem,
                    config,
                    levels,
                    solver: solver(&s, &a.solver)?,
                    quadrature: quadrature(&s, &a.solver, config)?,
                };
                (
                    Task::Convergence(study),
                    s.pick(a.solver.out, "out")?,
                    s.pick(a.solver.json, "json")?,
                    Format::Table,
                )
            }
        };
        Ok(Self {
            task,
            format: format.unwrap_or(default_format),
            csv,
            json,
            threads,
        })
    }

    /// Runs the task, writes requested files and returns the stdout text.
    pub fn execute(&self) -> CliResult<String> {
        match &self.task {
            Task::MeshInfo { n } => {
                let counts = Mesh::structured_cube(*n)?.counts();
                let ok = counts.euler == 1 && counts.boundary_euler == 2;
                Ok(pretty(&json!({ "N": n, "counts": counts, "euler_check": ok })))
            }
            Task::MeshExport { n, out } => {
                let mesh = Mesh::structured_cube(*n)?;
                let file = create(out)?;
                write_mesh(&mesh, BufWriter::new(file))?;
                Ok(pretty(&json!({ "N": n, "out": out, "counts": mesh.counts() })))
            }
            Task::ElementInfo { config } => {
                let table = exactness_table(*config)?;
                let counts: serde_json::Map<String, serde_json::Value> = SpaceKind::ALL
                    .iter()
                    .map(|&kind| {
                        let c = dof_counts(kind, *config);
                        (kind.name().to_string(), json!({ "per_entity": c, "local_total": c.local_total() }))
                    })
                    .collect();
                Ok(pretty(&json!({
                    "r": config.r,
                    "k": config.k,
                    "dimensions": [table.dim_sigma, table.dim_v, table.dim_sigma_plus, table.dim_w],
                    "dof_counts": counts,
                    "exact": table.is_exact(),
                    "exactness": table,
                })))
            }
            Task::Verify { checks, options } => {
                let report = verify(checks, options);
                if let Some(p) = &self.json {
                    write(p, &report.to_json())?;
                }
                let text = match self.format {
                    Format::Json => report.to_json() + "\n",
                    Format::Table => report.to_table(),
                };
                let failed = report.failures().count();
                if failed > 0 {
                    print!("{text}");
                    return Err(CliError::Verification(failed));
                }
                Ok(text)
            }
            Task::Quadcurl(problem) => {
                let sol = solve_quadcurl(problem)?;
                let report = ConvergenceReport::new(
                    problem.config,
                    vec![ConvergenceRow::new(sol.n, sol.dofs, &sol.errors, sol.seconds)],
                );
                if let Some(p) = &self.csv {
                    write(p, &report.to_csv())?;
                }
                let body = pretty(&sol);
                if let Some(p) = &self.json {
                    write(p, &body)?;
                }
                Ok(match self.format {
                    Format::Json => body,
                    Format::Table => report.to_table(),
                })
            }
            Task::Stokes(problem) => {
                let sol = solve_stokes(problem)?;
                if let Some(p) = &self.csv {
                    write(p, &sol.to_csv())?;
                }
                let body = pretty(&sol);
                if let Some(p) = &self.json {
                    write(p, &body)?;
                }
                Ok(match self.format {
                    Format::Json => body,
                    Format::Table => sol.to_csv(),
                })
            }
            Task::Convergence(study) => {
                let report = run_convergence(study)?;
                if let Some(p) = &self.csv {
                    write(p, &report.to_csv())?;
                }
                if let Some(p) = &self.json {
                    write(p, &report.to_json())?;
                }
                Ok(match self.format {
                    Format::Json => report.to_json() + "\n",
                    Format::Table => report.to_table(),
                })
            }
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output") + "\n"
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}
