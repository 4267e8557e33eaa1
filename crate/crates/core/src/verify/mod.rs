//! Verification suite for the structural properties of the complex.
//!
//! Each check produces one or more [`Claim`]s. Rational constructions are
//! checked by exact equality; checks that pass through quadrature or
//! floating-point assembly carry an explicit tolerance. Failures are report
//! entries, never panics.

mod checks;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elements::ElementConfig;
use crate::error::{Error, Result};

pub use checks::random_shape_regular_cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// Direction of the comparison between `measured` and `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One verified statement with its evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    /// Stable identifier, e.g. `exactness.r2k1`.
    pub id: String,
    /// The mathematical statement being checked.
    pub anchor: String,
    pub status: Status,
    /// Measured quantity; `0` for exact checks that hold.
    pub measured: f64,
    /// Pass threshold for `measured` (inclusive); `0` for exact checks.
    pub tolerance: f64,
    pub bound: Bound,
    /// Configuration and numeric evidence.
    pub context: String,
}

impl Claim {
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        measured: f64,
        tolerance: f64,
        context: impl Into<String>,
    ) -> Self {
        let status = if measured <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            id: id.into(),
            anchor: anchor.into(),
            status,
            measured,
            tolerance,
            bound: Bound::AtMost,
            context: context.into(),
        }
    }

    /// Passes iff `measured ≥ minimum`.
    pub fn at_least(
        id: impl Into<String>,
        anchor: impl Into<String>,
        measured: f64,
        minimum: f64,
        context: impl Into<String>,
    ) -> Self {
        let mut c = Self::new(id, anchor, measured, minimum, context);
        c.bound = Bound::AtLeast;
        c.status = if measured >= minimum {
            Status::Pass
        } else {
            Status::Fail
        };
        c
    }

    /// A claim that passes iff `ok`, measured as 0 or 1.
    pub fn exact(id: impl Into<String>, anchor: impl Into<String>, ok: bool, context: impl Into<String>) -> Self {
        Self::new(id, anchor, if ok { 0.0 } else { 1.0 }, 0.0, context)
    }

    /// A claim that could not be evaluated.
    pub fn error(id: impl Into<String>, anchor: impl Into<String>, err: &Error) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            status: Status::Fail,
            measured: f64::NAN,
            tolerance: 0.0,
            bound: Bound::AtMost,
            context: format!("error: {err}"),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claims: Vec<Claim>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(claims: Vec<Claim>) -> Self {
        let passed = claims.iter().all(Claim::passed);
        Self { claims, passed }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }

    pub fn to_table(&self) -> String {
        let w = self.claims.iter().map(|c| c.id.len()).max().unwrap_or(2).max(2);
        let mut out = format!("{:<w$}  {:<6} {:>12} {:>12}  context\n", "id", "status", "measured", "bound");
        for c in &self.claims {
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            out += &format!(
                "{:<w$}  {:<6} {:>12.4e} {op} {:>9.2e}  {}\n",
                c.id, c.status, c.measured, c.tolerance, c.context
            );
        }
        let failed = self.failures().count();
        out += &format!("{} claims, {} failed\n", self.claims.len(), failed);
        out
    }
}

/// The groups of claims that can be run on their own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Dimensions,
    Bubbles,
    Poincare,
    Exactness,
    Unisolvence,
    Global,
    Commuting,
    Reproduction,
    Rates,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Dimensions,
        Check::Bubbles,
        Check::Poincare,
        Check::Exactness,
        Check::Unisolvence,
        Check::Global,
        Check::Commuting,
        Check::Reproduction,
        Check::Rates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Dimensions => "dimensions",
            Check::Bubbles => "bubbles",
            Check::Poincare => "poincare",
            Check::Exactness => "exactness",
            Check::Unisolvence => "unisolvence",
            Check::Global => "global",
            Check::Commuting => "commuting",
            Check::Reproduction => "reproduction",
            Check::Rates => "rates",
        }
    }
}

impl std::str::FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Families for the local and global checks.
    pub configs: Vec<ElementConfig>,
    /// Mesh levels for the global exactness check.
    pub levels: Vec<usize>,
    /// Mesh level for the commuting-diagram check.
    pub commuting_level: usize,
    /// Families for the interpolation-rate check.
    pub rate_configs: Vec<ElementConfig>,
    /// Two or more levels for the interpolation-rate check.
    pub rate_levels: Vec<usize>,
    /// Random polynomials per degree in the Poincaré check.
    pub poincare_samples: usize,
    pub poincare_max_degree: usize,
    /// Random cells per family in the unisolvence check.
    pub cells: usize,
    /// Random polynomial fields in the commuting check.
    pub fields: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let cfg = |r, k| ElementConfig { r, k };
        Self {
            configs: ElementConfig::standard(),
            levels: vec![1, 2],
            commuting_level: 2,
            rate_configs: vec![cfg(1, 1), cfg(2, 1)],
            rate_levels: vec![4, 8],
            poincare_samples: 100,
            poincare_max_degree: 5,
            cells: 10,
            fields: 10,
            seed: 0x5eed,
        }
    }
}

impl VerifyOptions {
    /// Options restricted to one family.
    pub fn single(config: ElementConfig) -> Self {
        Self {
            configs: vec![config],
            rate_configs: vec![config],
            ..Self::default()
        }
    }
}

/// Runs one group of checks. Independent claims run in parallel and are
/// returned in a fixed order.
pub fn run_check(check: Check, opts: &VerifyOptions) -> Vec<Claim> {
    match check {
        Check::Dimensions => per_config(&opts.configs, checks::dimensions),
        Check::Bubbles => checks::bubbles(),
        Check::Poincare => (0..=opts.poincare_max_degree)
            .into_par_iter()
            .map(|d| checks::poincare(d, opts.poincare_samples, opts.seed))
            .collect(),
        Check::Exactness => per_config(&opts.configs, checks::exactness),
        Check::Unisolvence => per_config(&opts.configs, |c| checks::unisolvence(c, opts.cells, opts.seed)),
        Check::Global => {
            let jobs: Vec<(ElementConfig, usize)> = opts
                .configs
                .iter()
                .flat_map(|&c| opts.levels.iter().map(move |&n| (c, n)))
                .collect();
            jobs.into_par_iter()
                .map(|(c, n)| checks::global(c, n))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect()
        }
        Check::Commuting => per_config(&opts.configs, |c| {
            checks::commuting(c, opts.commuting_level, opts.fields, opts.seed)
        }),
        Check::Reproduction => per_config(&opts.configs, |c| checks::reproduction(c, opts.seed)),
        Check::Rates => per_config(&opts.rate_configs, |c| checks::rates(c, &opts.rate_levels)),
    }
}

fn per_config<F>(configs: &[ElementConfig], f: F) -> Vec<Claim>
where
    F: Fn(ElementConfig) -> Vec<Claim> + Sync,
{
    configs
        .par_iter()
        .map(|&c| f(c))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn verify(checks: &[Check], opts: &VerifyOptions) -> VerificationReport {
    let claims = checks
        .iter()
        .flat_map(|&c| {
            log::info!("verify: {}", c.name());
            run_check(c, opts)
        })
        .collect();
    VerificationReport::new(claims)
}

pub fn verify_all(opts: &VerifyOptions) -> VerificationReport {
    verify(&Check::ALL, opts)
}

/// Short tag for a family, e.g. `r2k1`.
pub fn tag(c: ElementConfig) -> String {
    format!("r{}k{}", c.r, c.k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_bounds() {
        assert!(Claim::new("a", "", 1e-12, 1e-10, "").passed());
        assert!(!Claim::new("a", "", f64::NAN, 1e-10, "").passed());
        assert!(Claim::at_least("a", "", 2.0, 1.7, "").passed());
        assert!(!Claim::at_least("a", "", 1.0, 1.7, "").passed());
        assert!(!Claim::exact("a", "", false, "").passed());
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert!("nope".parse::<Check>().is_err());
    }

    #[test]
    fn report_summarizes_failures() {
        let r = VerificationReport::new(vec![
            Claim::exact("x.ok", "", true, ""),
            Claim::exact("x.bad", "", false, ""),
        ]);
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
        assert!(r.to_table().ends_with("2 claims, 1 failed\n"));
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
