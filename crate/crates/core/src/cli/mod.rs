//! Command-line frontend: experiment configs, subcommands, and report
//! serialization.

mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agr::{
    find_recovery_step, verify_proposition, AgrQuery, PropositionReport, RecoveryResult, RecoveryStatus, StepWindow,
    WirePoint, DEFAULT_LIFTS, DEFAULT_M_MAX,
};
use crate::error::{Error, Result};
use crate::exactnum::{parse_coord, PFp, Prime};
use crate::maps::{parse_param_list, validate_params_over, FamilyKind, MapFamily, ValidationReport};
use crate::orbits::{portrait_with, Explorer, PhasePortrait};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_WINDOW: StepWindow = StepWindow { start: -8, end: 8 };
pub const DEFAULT_MAX_STEPS: u64 = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

fn default_m_max() -> u32 {
    DEFAULT_M_MAX
}

fn default_lifts() -> u32 {
    DEFAULT_LIFTS
}

/// An experiment as read from `--config` and overridden by flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilyKind,
    pub params: BTreeMap<String, String>,
    pub primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_window: Option<StepWindow>,
    #[serde(default = "default_m_max")]
    pub m_max: u32,
    #[serde(default = "default_lifts")]
    pub lifts_per_residue: u32,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<WirePoint>,
}

/// Config fields with every value parsed and checked.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub family: MapFamily,
    pub primes: Vec<Prime>,
    pub window: StepWindow,
    pub m_max: u32,
    pub lifts: u32,
    pub seed: u64,
    pub max_steps: u64,
    pub points: Vec<WirePoint>,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Resolved> {
        let family = MapFamily::from_params(self.family, &self.params)?;
        if self.primes.is_empty() {
            return Err(Error::Parse("at least one prime is required".into()));
        }
        let primes = self.primes.iter().map(|&p| Prime::new(p)).collect::<Result<Vec<_>>>()?;
        let window = match self.n_window {
            Some(w) => StepWindow::new(w.start, w.end)?,
            None if family.is_autonomous() => StepWindow::single(0),
            None => DEFAULT_WINDOW,
        };
        let r = Resolved {
            family,
            primes,
            window,
            m_max: self.m_max,
            lifts: self.lifts_per_residue,
            seed: self.rng_seed,
            max_steps: self.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
            points: self.points.clone(),
        };
        r.query(r.primes[0]).check()?;
        Ok(r)
    }

    /// The config as it will be echoed: parameters in canonical form and
    /// defaults filled in.
    pub fn normalized(&self, r: &Resolved) -> ExperimentConfig {
        ExperimentConfig {
            family: r.family.kind(),
            params: r.family.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            primes: r.primes.iter().map(|p| p.get()).collect(),
            n_window: Some(r.window),
            max_steps: Some(r.max_steps),
            ..self.clone()
        }
    }
}

impl Resolved {
    pub fn query(&self, p: Prime) -> AgrQuery {
        AgrQuery::new(self.family.clone(), p)
            .with_window(self.window)
            .with_m_max(self.m_max)
            .with_lifts(self.lifts)
            .with_seed(self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoverRun {
    pub prime: Prime,
    pub results: Vec<RecoveryResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", content = "runs", rename_all = "snake_case")]
pub enum RunResults {
    Verify(Vec<PropositionReport>),
    Recover(Vec<RecoverRun>),
    Portrait(Vec<PhasePortrait>),
    ParamsCheck(Vec<ValidationReport>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub results: RunResults,
    pub passed: bool,
    /// Present only with `--timing`, so that reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl ReportEnvelope {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "agrlab", version, about = "Almost good reduction checker for plane rational maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan every residue point and check the recovery cases.
    Verify(RunArgs),
    /// Search the minimal recovery step at given residue points.
    Recover(RunArgs),
    /// Cycle and transient statistics of the extended reduced dynamics.
    Portrait(RunArgs),
    /// Check the family's parameter hypotheses.
    ParamsCheck(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// qrt, qp3, qp4 or hv.
    #[arg(long)]
    pub family: Option<String>,
    /// Parameters as key=value pairs, e.g. a=1,b=2/3.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long = "prime", visible_alias = "primes", value_delimiter = ',')]
    pub primes: Vec<u64>,
    /// Step window: a..b, a..=b or n (both ends inclusive).
    #[arg(long = "n", allow_hyphen_values = true)]
    pub n_window: Option<String>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long)]
    pub lifts: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Orbit step budget for portrait.
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Residue point x,y for recover; repeatable.
    #[arg(long = "point")]
    pub points: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Record wall-clock duration in the report.
    #[arg(long)]
    pub timing: bool,
}

pub fn parse_point(s: &str) -> Result<WirePoint> {
    let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected x,y, got {s:?}")))?;
    Ok((parse_coord(x)?, parse_coord(y)?))
}

impl RunArgs {
    /// Merges the config file and flags into one config.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Error::Parse(format!("config: {e}")))?
            }
            None => {
                let family = self.family.as_deref().ok_or_else(|| Error::Parse("--family is required".into()))?;
                ExperimentConfig {
                    family: family.parse()?,
                    params: BTreeMap::new(),
                    primes: Vec::new(),
                    n_window: None,
                    m_max: DEFAULT_M_MAX,
                    lifts_per_residue: DEFAULT_LIFTS,
                    rng_seed: 0,
                    format: OutputFormat::Json,
                    max_steps: None,
                    points: Vec::new(),
                }
            }
        };
        if let Some(f) = &self.family {
            cfg.family = f.parse()?;
        }
        if let Some(p) = &self.params {
            cfg.params = parse_param_list(p)?;
        }
        if !self.primes.is_empty() {
            cfg.primes = self.primes.clone();
        }
        if let Some(w) = &self.n_window {
            cfg.n_window = Some(w.parse()?);
        }
        if let Some(m) = self.m_max {
            cfg.m_max = m;
        }
        if let Some(l) = self.lifts {
            cfg.lifts_per_residue = l;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(s) = self.max_steps {
            cfg.max_steps = Some(s);
        }
        if !self.points.is_empty() {
            cfg.points = self.points.iter().map(|s| parse_point(s)).collect::<Result<_>>()?;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        Ok(cfg)
    }
}

/// A failure that ends the run with a given exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: e.to_string() }
}

fn domain_failure(r: &Resolved, p: Prime) -> std::result::Result<Vec<crate::maps::ResiduePoint>, Failure> {
    let mut out = Vec::new();
    for &(x, y) in &r.points {
        let pt = (x.to_pfp(p).map_err(usage)?, y.to_pfp(p).map_err(usage)?);
        if let (PFp::Infinity, _) | (_, PFp::Infinity) = pt {
            return Err(Failure {
                code: EXIT_VIOLATION,
                message: format!("point ({x}, {y}) is outside the domain: violates finite coordinates (D lies in Z_p^2)"),
            });
        }
        out.push(pt);
    }
    Ok(out)
}

/// Runs one subcommand on a config.
pub fn execute(command: &Command, cfg: &ExperimentConfig) -> std::result::Result<ReportEnvelope, Failure> {
    let r = cfg.resolve().map_err(usage)?;
    let is_recover = matches!(command, Command::Recover(_));
    if is_recover && r.points.is_empty() {
        return Err(usage("recover needs at least one --point"));
    }
    if !is_recover && !r.points.is_empty() {
        return Err(usage("--point only applies to recover"));
    }
    let (results, passed) = match command {
        Command::ParamsCheck(_) => {
            let reps: Vec<ValidationReport> =
                r.primes.iter().map(|&p| validate_params_over(&r.family, p, r.window.iter())).collect();
            let ok = reps.iter().all(ValidationReport::passed);
            (RunResults::ParamsCheck(reps), ok)
        }
        Command::Verify(_) => {
            let mut reps = Vec::new();
            for &p in &r.primes {
                let rep = verify_proposition(&r.query(p)).map_err(usage)?;
                if !rep.validation.passed() {
                    return Err(usage(format!(
                        "parameter hypotheses fail for p={p}: {}",
                        rep.validation.violations.join("; ")
                    )));
                }
                reps.push(rep);
            }
            let ok = reps.iter().all(PropositionReport::passed);
            (RunResults::Verify(reps), ok)
        }
        Command::Recover(_) => {
            let mut runs = Vec::new();
            for &p in &r.primes {
                let pts = domain_failure(&r, p)?;
                let q = r.query(p);
                let results = pts
                    .par_iter()
                    .map(|&pt| find_recovery_step(&q, pt, r.window.start))
                    .collect::<Result<Vec<_>>>()
                    .map_err(usage)?;
                runs.push(RecoverRun { prime: p, results });
            }
            let ok = runs.iter().flat_map(|run| &run.results).all(|x| x.status == RecoveryStatus::Recovered);
            (RunResults::Recover(runs), ok)
        }
        Command::Portrait(_) => {
            let mut out = Vec::new();
            for &p in &r.primes {
                let ex = Explorer::new(r.family.clone(), p, r.window.start, r.m_max, r.seed).map_err(usage)?;
                out.push(portrait_with(&ex, r.window.start, r.max_steps as usize).map_err(usage)?);
            }
            let ok = out.iter().all(|ph| ph.unrecoverable == 0);
            (RunResults::Portrait(out), ok)
        }
    };
    Ok(ReportEnvelope {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.normalized(&r),
        results,
        passed,
        duration_ms: None,
    })
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(v) = std::env::var("AGRLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("AGRLAB_THREADS={v:?} is not a positive integer")))?;
    // A pool already built by an earlier run in this process is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Entry point shared by the binary and tests. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run_command(&cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn run_command(command: &Command, stdout: &mut dyn Write) -> std::result::Result<i32, Failure> {
    configure_threads()?;
    let args = match command {
        Command::Verify(a) | Command::Recover(a) | Command::Portrait(a) | Command::ParamsCheck(a) => a,
    };
    let cfg = args.config().map_err(usage)?;
    let started = Instant::now();
    let mut env = execute(command, &cfg)?;
    if args.timing {
        env.duration_ms = Some(started.elapsed().as_millis() as u64);
    }
    let text = render::render(&env, env.config.format).map_err(usage)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(text.as_bytes()).map_err(usage)?,
    }
    Ok(env.exit_code())
}
