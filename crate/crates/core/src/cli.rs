//! Command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when any fails, 2 for usage
//! or configuration errors, 3 when a check aborts (a partial report is
//! still written).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::chart::{courant_bracket, ChartPoint, FnForm, FormField};
use crate::error::{GcxError, Result};
use crate::expr::{FormExpr, VectorExpr};
use crate::models::{BumpProfile, LogModelParams, SurgeryGeometry};
use crate::multilinear::{GcVector, Multiform};
use crate::spinor::{check_nondegenerate, normal_form, NormalForm, DEFAULT_TOL};
use crate::verify::{self, CheckConfig, CheckReport, Group};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gcx", version, about = "Numerical checks for generalized complex surgery in dimension 4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a group of checks and write a JSON report.
    Check(CheckArgs),
    /// Decompose a pure spinor read from JSON as e^(B+i omega) ^ Omega.
    NormalForm(InputArgs),
    /// Evaluate an H-twisted Courant bracket of two expression fields at a point.
    Bracket(InputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    LocalModel,
    Surgery,
    Quotient,
    Locus,
    Bfield,
    Algebra,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Smooth,
    Septic,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub group: GroupArg,
    #[arg(long, env = "GCX_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Tolerance for first-derivative identities; second-derivative checks use 10x.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub r_out: f64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Smooth)]
    pub profile: ProfileArg,
    /// Quotient multiplicity; without it the quotient checks use (1,0), (2,1), (3,2), (5,2).
    #[arg(long)]
    pub m: Option<u32>,
    /// Quotient twist, coprime with m (defaults to 1 when only --m is given).
    #[arg(long, requires = "m", allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// JSON file with overrides for any of the flags above.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "gcx-report.json")]
    pub output: PathBuf,
    /// Worker threads; reports do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Write the result here as well as to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Configuration file accepted by `check --input`; every key is optional.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub r_min: Option<f64>,
    pub r_out: Option<f64>,
    pub profile: Option<BumpProfile>,
    pub quotients: Option<Vec<LogModelParams>>,
}

/// Everything `run` needs, validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub groups: Vec<Group>,
    pub check: CheckConfig,
    pub output: PathBuf,
    pub jobs: Option<usize>,
}

fn group_of(g: GroupArg) -> Vec<Group> {
    match g {
        GroupArg::LocalModel => vec![Group::LocalModel],
        GroupArg::Surgery => vec![Group::Surgery],
        GroupArg::Quotient => vec![Group::Quotient],
        GroupArg::Locus => vec![Group::Locus],
        GroupArg::Bfield => vec![Group::Bfield],
        GroupArg::Algebra => vec![Group::Algebra],
        GroupArg::All => Group::ALL.to_vec(),
    }
}

impl RunConfig {
    pub fn from_args(a: &CheckArgs) -> Result<Self> {
        let file = match &a.input {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| GcxError::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| GcxError::Parse(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let tol = file.tol.unwrap_or(a.tol);
        let profile = file.profile.unwrap_or(match a.profile {
            ProfileArg::Smooth => BumpProfile::Smooth,
            ProfileArg::Septic => BumpProfile::Septic,
        });
        let quotients = match (a.m, file.quotients) {
            (Some(m), _) => vec![LogModelParams::new(m, a.k.unwrap_or(1))?],
            (None, Some(q)) => q,
            (None, None) => CheckConfig::default().quotients,
        };
        let check = CheckConfig {
            seed: file.seed.unwrap_or(a.seed),
            samples: file.samples.unwrap_or(a.samples),
            tol,
            tol2: 10.0 * tol,
            geometry: SurgeryGeometry {
                r_min: file.r_min.unwrap_or(a.r_min),
                r_out: file.r_out.unwrap_or(a.r_out),
                profile,
            },
            quotients,
        };
        check.validate()?;
        if a.jobs == Some(0) {
            return Err(GcxError::InvalidArgument("--jobs must be at least 1".into()));
        }
        Ok(RunConfig { groups: group_of(a.group), check, output: a.output.clone(), jobs: a.jobs })
    }
}

/// Outcome of `run`: reports gathered and the exit status they imply.
#[derive(Debug)]
pub struct RunOutcome {
    pub reports: Vec<CheckReport>,
    pub aborted: Option<GcxError>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.aborted.is_some() {
            EXIT_ABORT
        } else if self.reports.iter().all(|r| r.pass) {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Run the configured checks on a pool with the requested thread count.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| GcxError::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        let mut reports = Vec::new();
        for &g in &cfg.groups {
            match verify::run_group(&cfg.check, g) {
                Ok(r) => reports.extend(r),
                Err((partial, e)) => {
                    reports.extend(partial);
                    return RunOutcome { reports, aborted: Some(e) };
                }
            }
        }
        RunOutcome { reports, aborted: None }
    }))
}

pub fn write_reports(path: &Path, reports: &[CheckReport]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(reports).map_err(|e| GcxError::Internal(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| GcxError::Internal(format!("cannot write {}: {e}", path.display())))
}

pub fn summary_line(r: &CheckReport) -> String {
    format!("{} {:<36} max_residual={:.3e} samples={}", if r.pass { "PASS" } else { "FAIL" }, r.check, r.max_residual, r.samples)
}

/// Input of the `bracket` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketInput {
    pub u: VectorExpr,
    pub v: VectorExpr,
    #[serde(rename = "H", default)]
    pub h: Option<FormExpr>,
    pub point: Vec<f64>,
}

pub fn bracket_from_json(text: &str) -> Result<GcVector> {
    let input: BracketInput = serde_json::from_str(text).map_err(|e| GcxError::Parse(e.to_string()))?;
    input.u.validate()?;
    input.v.validate()?;
    let n = input.u.dim;
    if input.v.dim != n || input.point.len() != n {
        return Err(GcxError::DimensionMismatch { expected: n, got: if input.v.dim != n { input.v.dim } else { input.point.len() } });
    }
    let h: Box<dyn FormField> = match input.h {
        Some(h) => {
            h.validate()?;
            Box::new(h)
        }
        None => Box::new(FnForm::zero(n)),
    };
    courant_bracket(&input.u, &input.v, &h, &ChartPoint::new("input", input.point, 0))
}

/// Normal form plus the nondegeneracy flag, as printed by `normal-form`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormOutput {
    #[serde(flatten)]
    pub normal_form: NormalForm,
    pub nondegenerate: bool,
}

pub fn normal_form_from_json(text: &str) -> Result<NormalFormOutput> {
    let rho: Multiform = serde_json::from_str(text).map_err(|e| GcxError::Parse(e.to_string()))?;
    let nf = normal_form(&rho, DEFAULT_TOL)?;
    let nondegenerate = check_nondegenerate(&nf, DEFAULT_TOL);
    Ok(NormalFormOutput { normal_form: nf, nondegenerate })
}

fn usage_code(e: &GcxError) -> i32 {
    match e {
        GcxError::InvalidArgument(_) | GcxError::Parse(_) | GcxError::DimensionMismatch { .. } | GcxError::UnsupportedDimension(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn emit(value: &impl Serialize, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| GcxError::Internal(e.to_string()))?;
    println!("{text}");
    if let Some(path) = output {
        fs::write(path, format!("{text}\n")).map_err(|e| GcxError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| GcxError::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

/// Entry point; returns the process exit status.
pub fn main_with(cli: Cli) -> i32 {
    match cli.command {
        Command::Check(args) => {
            let cfg = match RunConfig::from_args(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            let outcome = match run(&cfg) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ABORT;
                }
            };
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for r in &outcome.reports {
                let _ = writeln!(out, "{}", summary_line(r));
            }
            if let Err(e) = write_reports(&cfg.output, &outcome.reports) {
                eprintln!("error: {e}");
                return EXIT_ABORT;
            }
            if let Some(e) = &outcome.aborted {
                eprintln!("error: check aborted: {e}");
            }
            let failed = outcome.reports.iter().filter(|r| !r.pass).count();
            let _ = writeln!(out, "{} checks, {} failed, report written to {}", outcome.reports.len(), failed, cfg.output.display());
            outcome.exit_code()
        }
        Command::NormalForm(args) => {
            let result = read_input(&args.input).and_then(|t| normal_form_from_json(&t)).and_then(|nf| emit(&nf, args.output.as_deref()));
            match result {
                Ok(()) => EXIT_PASS,
                Err(e) => {
                    eprintln!("error: {e}");
                    usage_code(&e)
                }
            }
        }
        Command::Bracket(args) => {
            let result = read_input(&args.input).and_then(|t| bracket_from_json(&t)).and_then(|v| emit(&v, args.output.as_deref()));
            match result {
                Ok(()) => EXIT_PASS,
                Err(e) => {
                    eprintln!("error: {e}");
                    usage_code(&e)
                }
            }
        }
    }
}
