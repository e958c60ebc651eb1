//! Command-line front end.
//!
//! Every subcommand writes a table (CSV or JSON) to `--out` or stdout and
//! maps its outcome to an exit code: 0 success, 2 configuration error,
//! 3 a requested level could not be solved, 4 oracle verification failed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{effective_quantum_number, Branch, PhysicalSystem, QuantumState, Validation};
use crate::oracle::{verify_level, OracleConfig};
use crate::spectra::{sweep_levels, SweepParam, SweepRange};
use crate::spectra::{principal_level, solve_kg_energy, EnergyLevel, LevelKind, Method};
use crate::wavefun::RadialWaveFunction;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_ROOT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

const UNITS_PAGE: &str = "\
All inputs and outputs are in natural units: hbar = c = M = e = 1.

  energy      E [J]   = E * M c^2
  length      r [m]   = r * hbar / (M c)
  --b         omega_c = e B / (M c); B [T] = b * M^2 c^2 / (e hbar)
  --v0        V0 [J]  = v0 * M c^2
  --r0        r0 [m]  = r0 * hbar / (M c)
  --xi        Phi_AB  = xi * h c / e   (flux quanta)

Relativistic levels include the rest energy; non-relativistic ones do not.
";

#[derive(Debug, Parser)]
#[command(name = "kgpho", version, about = "Klein-Gordon pseudoharmonic levels in magnetic and flux fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels for a range of states.
    Spectrum(SpectrumArgs),
    /// Sampled radial wave function of one state.
    Wavefunction(WavefunctionArgs),
    /// Check levels against the finite-difference oracle.
    Verify(VerifyArgs),
    /// Levels over a grid of one system parameter.
    Sweep(SweepArgs),
    /// Print SI conversion formulas.
    Units,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchArg {
    Positive,
    Negative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitArg {
    None,
    Nonrel,
    KgPho,
    KgHo,
    NonrelHo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParamArg {
    B,
    Xi,
    V0,
}

/// Inclusive integer range written `lo..hi` or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange<T> {
    pub lo: T,
    pub hi: T,
}

impl<T> FromStr for IndexRange<T>
where
    T: FromStr + PartialOrd + Copy,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("`{t}` is not a valid integer"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("range `{s}` is empty"));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Potential depth V0 in units of Mc^2.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub v0: f64,
    /// Equilibrium radius r0 in Compton wavelengths.
    #[arg(long = "r0", default_value_t = 1.0, allow_negative_numbers = true)]
    pub r0: f64,
    /// Cyclotron energy hbar*omega_c / Mc^2.
    #[arg(long = "b", default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Aharonov-Bohm flux in flux quanta.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub xi: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Equation to solve.
    #[arg(long, value_enum, default_value_t = BranchArg::Positive)]
    pub branch: BranchArg,
    /// Closed-form limit; overrides --branch when set.
    #[arg(long, value_enum, default_value_t = LimitArg::None)]
    pub limit: LimitArg,
    /// Report m' warnings for non-integer flux or m' < 1.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StatesArgs {
    /// Radial quantum numbers, `lo..hi` inclusive.
    #[arg(long, default_value = "0")]
    pub n: IndexRange<u32>,
    /// Magnetic quantum numbers, `lo..hi` inclusive.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub m: IndexRange<i32>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Relative tolerance for oracle agreement.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Points (cells for the default scheme) of the coarsest oracle grid.
    #[arg(long = "grid-n", default_value_t = 4000)]
    pub grid_n: usize,
    /// Outer radius of the oracle grid.
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub states: StatesArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Also run the oracle on every level.
    #[arg(long)]
    pub verify: bool,
    /// Emit every root of the relativistic equations, not just the principal one.
    #[arg(long = "all-roots")]
    pub all_roots: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub m: i32,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Radial exponent; with --gamma, skips the level solve.
    #[arg(long, requires = "gamma", allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, requires = "beta", allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Number of uniform samples on [0, r_max].
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Outer sampling radius; defaults to where the tail is negligible.
    #[arg(long = "r-max", allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub states: StatesArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// JSON spectrum report to re-check instead of solving.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub states: StatesArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Parameter to vary.
    #[arg(long, value_enum)]
    pub param: SweepParamArg,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Configuration echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub v0: f64,
    pub r0: f64,
    pub b: f64,
    pub xi: f64,
    pub n: [u32; 2],
    pub m: [i32; 2],
    pub branch: BranchArg,
    pub limit: LimitArg,
    pub method: Method,
    pub strict: bool,
    pub verify: bool,
    pub tol: f64,
    pub grid_n: usize,
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub branch: String,
    pub n: u32,
    pub m: i32,
    pub m_eff: f64,
    pub energy: Option<f64>,
    pub residual: Option<f64>,
    pub principal: Option<bool>,
    pub oracle_dev: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub branch: String,
    pub n: u32,
    pub m: i32,
    pub m_eff: f64,
    pub energy: Option<f64>,
    pub oracle_dev: Option<f64>,
    pub convergence_ratio: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutRow {
    pub param: String,
    pub value: f64,
    pub n: u32,
    pub m: i32,
    pub energy: Option<f64>,
    pub delta_e: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub r: f64,
    pub g: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveMeta {
    pub n: u32,
    pub beta: f64,
    pub gamma: f64,
    pub r_max: f64,
    pub norm_constant: f64,
    pub integrated_norm: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report<T> {
    pub config: RunConfig,
    pub levels: Vec<T>,
}

#[derive(Debug, Serialize)]
struct WaveReport<'a> {
    config: &'a RunConfig,
    samples: &'a [SampleRow],
    meta: &'a WaveMeta,
}

/// Configuration problem, reported with exit code 2.
#[derive(Debug)]
struct ConfigError(String);

impl ConfigError {
    fn flag(flag: &str, msg: impl std::fmt::Display) -> Self {
        Self(format!("{flag}: {msg}"))
    }
}

impl From<io::Error> for ConfigError {
    fn from(e: io::Error) -> Self {
        Self(format!("output: {e}"))
    }
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Spectrum(a) => run_spectrum(&a),
        Command::Wavefunction(a) => run_wavefunction(&a),
        Command::Verify(a) => run_verify(&a),
        Command::Sweep(a) => run_sweep(&a),
        Command::Units => {
            print!("{UNITS_PAGE}");
            Ok(EXIT_OK)
        }
    };
    match result {
        Ok(code) => code,
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
    }
}

fn method_of(args: &MethodArgs) -> Method {
    match args.limit {
        LimitArg::Nonrel => Method::Nonrel,
        LimitArg::KgPho => Method::KgPho,
        LimitArg::KgHo => Method::KgHo,
        LimitArg::NonrelHo => Method::NonrelHo,
        LimitArg::None => match args.branch {
            BranchArg::Positive => Method::Positive,
            BranchArg::Negative => Method::Negative,
            BranchArg::Free => Method::Free,
        },
    }
}

fn finite(flag: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::flag(flag, format!("{x} is not finite")))
    }
}

fn build_system(a: &SystemArgs) -> Result<PhysicalSystem, ConfigError> {
    let sys = PhysicalSystem {
        v0: finite("--v0", a.v0)?,
        rho0: finite("--r0", a.r0)?,
        b_field: finite("--b", a.b)?,
        flux_xi: finite("--xi", a.xi)?,
    };
    if sys.rho0 <= 0.0 {
        return Err(ConfigError::flag("--r0", "must be positive"));
    }
    if sys.v0 < 0.0 {
        return Err(ConfigError::flag("--v0", "must be non-negative"));
    }
    if sys.b_field < 0.0 {
        return Err(ConfigError::flag("--b", "must be non-negative"));
    }
    Ok(sys)
}

fn build_oracle(a: &OracleArgs) -> Result<OracleConfig, ConfigError> {
    if !(finite("--tol", a.tol)? > 0.0) {
        return Err(ConfigError::flag("--tol", "must be positive"));
    }
    if a.grid_n < 100 {
        return Err(ConfigError::flag("--grid-n", "needs at least 100 points"));
    }
    if let Some(r) = a.r_max {
        if !(finite("--r-max", r)? > 0.0) {
            return Err(ConfigError::flag("--r-max", "must be positive"));
        }
    }
    Ok(OracleConfig {
        n_points: a.grid_n,
        r_max: a.r_max,
        tol: a.tol,
        ..OracleConfig::default()
    })
}

fn states_of(s: &StatesArgs) -> Vec<(u32, i32)> {
    (s.n.lo..=s.n.hi)
        .flat_map(|n| (s.m.lo..=s.m.hi).map(move |m| (n, m)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_config(
    command: &str,
    sys: &PhysicalSystem,
    states: &StatesArgs,
    method: &MethodArgs,
    verify: bool,
    oracle: &OracleConfig,
) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        v0: sys.v0,
        r0: sys.rho0,
        b: sys.b_field,
        xi: sys.flux_xi,
        n: [states.n.lo, states.n.hi],
        m: [states.m.lo, states.m.hi],
        branch: method.branch,
        limit: method.limit,
        method: method_of(method),
        strict: method.strict,
        verify,
        tol: oracle.tol,
        grid_n: oracle.n_points,
        r_max: oracle.r_max,
    }
}

fn oracle_from_config(c: &RunConfig) -> OracleConfig {
    OracleConfig {
        n_points: c.grid_n,
        r_max: c.r_max,
        tol: c.tol,
        ..OracleConfig::default()
    }
}

fn error_status(e: &Error) -> &'static str {
    match e {
        Error::NoRoot(_) => "no_root",
        Error::Degenerate(_) => "degenerate",
        _ => "domain_error",
    }
}

/// Strict-mode warnings for `m`, printed to stderr.
fn strict_warnings(m: i32, xi: f64, strict: bool) -> bool {
    if !strict {
        return false;
    }
    let (_, warnings) = effective_quantum_number(m, xi, Validation::Strict);
    for w in &warnings {
        eprintln!("warning: m = {m}: {w}");
    }
    !warnings.is_empty()
}

fn opt(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Shortest round-trip decimal, identical to the JSON encoding.
fn fmt_f64(x: f64) -> String {
    serde_json::Number::from_f64(x)
        .map(|n| n.to_string())
        .unwrap_or_default()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, ConfigError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| ConfigError::flag("--out", format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv(
    out: &mut dyn Write,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), ConfigError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e: csv::Error| ConfigError(format!("output: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), ConfigError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| ConfigError(format!("output: {e}")))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn level_row(kind: LevelKind, state: &QuantumState, res: &Result<EnergyLevel, Error>, warned: bool) -> LevelRow {
    match res {
        Ok(l) => LevelRow {
            branch: l.kind.to_string(),
            n: state.n,
            m: state.m,
            m_eff: state.m_eff,
            energy: opt(l.energy),
            residual: opt(l.residual),
            principal: Some(l.principal),
            oracle_dev: l.oracle_dev.and_then(opt),
            status: if warned { "domain_warning" } else { "ok" }.to_string(),
        },
        Err(e) => LevelRow {
            branch: kind.to_string(),
            n: state.n,
            m: state.m,
            m_eff: state.m_eff,
            energy: None,
            residual: None,
            principal: None,
            oracle_dev: None,
            status: error_status(e).to_string(),
        },
    }
}

/// Levels of one state: the principal level, or every root with `all_roots`.
fn solve_state(
    sys: &PhysicalSystem,
    state: &QuantumState,
    method: Method,
    all_roots: bool,
) -> Vec<Result<EnergyLevel, Error>> {
    let branch = match method {
        Method::Positive => Some(Branch::Positive),
        Method::Negative if sys.v0 != 0.0 => Some(Branch::Negative),
        _ => None,
    };
    match (all_roots, branch) {
        (true, Some(b)) => match solve_kg_energy(sys, state, b) {
            Ok(v) if v.is_empty() => vec![Err(Error::NoRoot("no sign change in the scan window".into()))],
            Ok(v) => v.into_iter().map(Ok).collect(),
            Err(e) => vec![Err(e)],
        },
        _ => vec![principal_level(sys, state, method)],
    }
}

fn run_spectrum(a: &SpectrumArgs) -> Result<i32, ConfigError> {
    let sys = build_system(&a.system)?;
    let oracle = build_oracle(&a.oracle)?;
    let method = method_of(&a.method);
    let kind = method.kind(&sys);
    let config = run_config("spectrum", &sys, &a.states, &a.method, a.verify, &oracle);

    let states = states_of(&a.states);
    let solved: Vec<(QuantumState, Vec<Result<EnergyLevel, Error>>)> = states
        .par_iter()
        .map(|&(n, m)| {
            let state = sys.state(n, m);
            let mut levels = solve_state(&sys, &state, method, a.all_roots);
            if a.verify {
                for l in levels.iter_mut().flatten() {
                    if verify_level(&sys, l, &oracle).is_err() {
                        l.oracle_dev = None;
                    }
                }
            }
            (state, levels)
        })
        .collect();

    let mut code = EXIT_OK;
    let mut rows = Vec::new();
    for (state, levels) in &solved {
        let warned = strict_warnings(state.m, sys.flux_xi, a.method.strict);
        for res in levels {
            let mut row = level_row(kind, state, res, warned);
            match res {
                Err(e) => {
                    eprintln!("n = {}, m = {}: {e}", state.n, state.m);
                    code = EXIT_NO_ROOT;
                }
                Ok(l) if a.verify => {
                    let pass = l.oracle_dev.is_some_and(|d| d <= oracle.tol);
                    if !pass {
                        row.status = "verify_failed".to_string();
                        if code == EXIT_OK {
                            code = EXIT_VERIFY;
                        }
                    }
                }
                Ok(_) => {}
            }
            rows.push(row);
        }
    }

    let mut out = open_out(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => write_csv(
            &mut out,
            &["branch", "n", "m", "m_eff", "energy", "residual", "principal", "oracle_dev", "status"],
            rows.iter().map(|r| {
                vec![
                    r.branch.clone(),
                    r.n.to_string(),
                    r.m.to_string(),
                    fmt_f64(r.m_eff),
                    fmt_opt(r.energy),
                    fmt_opt(r.residual),
                    r.principal.map(|p| p.to_string()).unwrap_or_default(),
                    fmt_opt(r.oracle_dev),
                    r.status.clone(),
                ]
            }),
        )?,
        Format::Json => write_json(&mut out, &Report { config, levels: rows })?,
    }
    out.flush()?;
    Ok(code)
}

fn run_wavefunction(a: &WavefunctionArgs) -> Result<i32, ConfigError> {
    if a.samples < 2 {
        return Err(ConfigError::flag("--samples", "needs at least 2 samples"));
    }
    let sys = build_system(&a.system)?;
    let wf = match (a.beta, a.gamma) {
        (Some(beta), Some(gamma)) => RadialWaveFunction::new(a.n, finite("--beta", beta)?, finite("--gamma", gamma)?)
            .map_err(|e| ConfigError::flag("--beta/--gamma", e))?,
        _ => {
            let state = sys.state(a.n, a.m);
            strict_warnings(a.m, sys.flux_xi, a.method.strict);
            let level = match principal_level(&sys, &state, method_of(&a.method)) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("n = {}, m = {}: {e}", a.n, a.m);
                    return Ok(EXIT_NO_ROOT);
                }
            };
            match RadialWaveFunction::for_level(&sys, &level) {
                Ok(wf) => wf,
                Err(e) => {
                    eprintln!("n = {}, m = {}: {e}", a.n, a.m);
                    return Ok(EXIT_NO_ROOT);
                }
            }
        }
    };
    let r_max = match a.r_max {
        Some(r) if finite("--r-max", r)? > 0.0 => r,
        Some(_) => return Err(ConfigError::flag("--r-max", "must be positive")),
        None => wf.default_r_max(),
    };

    let last = (a.samples - 1) as f64;
    let samples: Vec<SampleRow> = (0..a.samples)
        .map(|i| {
            let r = if i + 1 == a.samples { r_max } else { r_max * i as f64 / last };
            let g = wf.eval(r);
            SampleRow { r, g, density: g * g * r }
        })
        .collect();
    let meta = WaveMeta {
        n: wf.n,
        beta: wf.beta,
        gamma: wf.gamma,
        r_max,
        norm_constant: wf.norm,
        integrated_norm: wf.numerical_norm(r_max),
    };

    let states = StatesArgs {
        n: IndexRange { lo: a.n, hi: a.n },
        m: IndexRange { lo: a.m, hi: a.m },
    };
    let config = run_config("wavefunction", &sys, &states, &a.method, false, &OracleConfig::default());
    let mut out = open_out(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => {
            write_csv(
                &mut out,
                &["r", "g", "density"],
                samples
                    .iter()
                    .map(|s| vec![fmt_f64(s.r), fmt_f64(s.g), fmt_f64(s.density)]),
            )?;
            writeln!(
                out,
                "# n={} beta={} gamma={} r_max={} norm_constant={} integrated_norm={}",
                meta.n,
                fmt_f64(meta.beta),
                fmt_f64(meta.gamma),
                fmt_f64(meta.r_max),
                fmt_f64(meta.norm_constant),
                fmt_f64(meta.integrated_norm)
            )?;
        }
        Format::Json => write_json(
            &mut out,
            &WaveReport {
                config: &config,
                samples: &samples,
                meta: &meta,
            },
        )?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn read_report(path: &Path) -> Result<Report<LevelRow>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::flag("--input", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::flag("--input", e))
}

fn run_verify(a: &VerifyArgs) -> Result<i32, ConfigError> {
    // (system, oracle, config, levels to check)
    let (sys, oracle, config, levels): (_, _, _, Vec<(QuantumState, LevelKind, Result<EnergyLevel, Error>)>) =
        match &a.input {
            Some(path) => {
                let report = read_report(path)?;
                let c = report.config;
                let sys = build_system(&SystemArgs {
                    v0: c.v0,
                    r0: c.r0,
                    b: c.b,
                    xi: c.xi,
                })?;
                let oracle = oracle_from_config(&c);
                let levels = report
                    .levels
                    .iter()
                    .map(|row| {
                        let state = sys.state(row.n, row.m);
                        let kind = LevelKind::parse(&row.branch).unwrap_or_else(|| c.method.kind(&sys));
                        let level = match row.energy {
                            Some(energy) => Ok(EnergyLevel {
                                energy,
                                kind,
                                state,
                                residual: row.residual.unwrap_or(f64::NAN),
                                principal: row.principal.unwrap_or(true),
                                oracle_dev: None,
                            }),
                            None => Err(Error::NoRoot(format!("input row status {}", row.status))),
                        };
                        (state, kind, level)
                    })
                    .collect();
                let config = RunConfig {
                    command: "verify".into(),
                    ..c
                };
                (sys, oracle, config, levels)
            }
            None => {
                let sys = build_system(&a.system)?;
                let oracle = build_oracle(&a.oracle)?;
                let method = method_of(&a.method);
                let kind = method.kind(&sys);
                let config = run_config("verify", &sys, &a.states, &a.method, true, &oracle);
                let levels = states_of(&a.states)
                    .into_iter()
                    .map(|(n, m)| {
                        let state = sys.state(n, m);
                        (state, kind, principal_level(&sys, &state, method))
                    })
                    .collect();
                (sys, oracle, config, levels)
            }
        };
    if levels.is_empty() {
        return Err(ConfigError::flag("--n/--m", "no states to verify"));
    }

    let checked: Vec<(VerifyRow, i32)> = levels
        .par_iter()
        .map(|(state, kind, res)| {
            let mut row = VerifyRow {
                branch: kind.to_string(),
                n: state.n,
                m: state.m,
                m_eff: state.m_eff,
                energy: None,
                oracle_dev: None,
                convergence_ratio: None,
                status: String::new(),
            };
            let code = match res {
                Err(e) => {
                    row.status = error_status(e).to_string();
                    EXIT_NO_ROOT
                }
                Ok(level) => {
                    let mut level = *level;
                    row.energy = opt(level.energy);
                    match verify_level(&sys, &mut level, &oracle) {
                        Ok(v) => {
                            row.oracle_dev = opt(v.deviation);
                            row.convergence_ratio = opt(v.convergence_ratio);
                            if v.deviation <= oracle.tol {
                                row.status = "ok".into();
                                EXIT_OK
                            } else {
                                row.status = "tolerance_exceeded".into();
                                EXIT_VERIFY
                            }
                        }
                        Err(e) => {
                            row.status = format!("oracle_{}", error_status(&e));
                            EXIT_VERIFY
                        }
                    }
                }
            };
            (row, code)
        })
        .collect();

    let mut code = EXIT_OK;
    for (row, c) in &checked {
        if *c != EXIT_OK {
            eprintln!("n = {}, m = {}: {}", row.n, row.m, row.status);
        }
        code = match (code, *c) {
            (EXIT_NO_ROOT, _) | (_, EXIT_NO_ROOT) => EXIT_NO_ROOT,
            (EXIT_OK, c) => c,
            (c, _) => c,
        };
    }
    let rows: Vec<VerifyRow> = checked.into_iter().map(|(r, _)| r).collect();

    let mut out = open_out(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => write_csv(
            &mut out,
            &["branch", "n", "m", "m_eff", "energy", "oracle_dev", "convergence_ratio", "status"],
            rows.iter().map(|r| {
                vec![
                    r.branch.clone(),
                    r.n.to_string(),
                    r.m.to_string(),
                    fmt_f64(r.m_eff),
                    fmt_opt(r.energy),
                    fmt_opt(r.oracle_dev),
                    fmt_opt(r.convergence_ratio),
                    r.status.clone(),
                ]
            }),
        )?,
        Format::Json => write_json(&mut out, &Report { config, levels: rows })?,
    }
    out.flush()?;
    Ok(code)
}

fn run_sweep(a: &SweepArgs) -> Result<i32, ConfigError> {
    let sys = build_system(&a.system)?;
    let method = method_of(&a.method);
    if a.steps < 2 {
        return Err(ConfigError::flag("--steps", "needs at least 2 steps"));
    }
    let (vary, name) = match a.param {
        SweepParamArg::B => (SweepParam::BField, "b"),
        SweepParamArg::Xi => (SweepParam::FluxXi, "xi"),
        SweepParamArg::V0 => (SweepParam::V0, "v0"),
    };
    let range = SweepRange {
        lo: finite("--from", a.from)?,
        hi: finite("--to", a.to)?,
        steps: a.steps,
    };
    let rows = sweep_levels(&sys, vary, range, &states_of(&a.states), method)
        .map_err(|e| ConfigError::flag("--param", e))?;

    let out_rows: Vec<SweepOutRow> = rows
        .iter()
        .map(|r| {
            let xi = if vary == SweepParam::FluxXi { r.param } else { sys.flux_xi };
            let warned = strict_warnings(r.state.m, xi, a.method.strict);
            let (energy, status) = match &r.level {
                Ok(l) => (opt(l.energy), if warned { "domain_warning" } else { "ok" }),
                Err(e) => (None, error_status(e)),
            };
            SweepOutRow {
                param: name.to_string(),
                value: r.param,
                n: r.state.n,
                m: r.state.m,
                energy,
                delta_e: r.delta_e.and_then(opt),
                status: status.to_string(),
            }
        })
        .collect();
    let any_ok = rows.iter().any(|r| r.level.is_ok());

    let config = run_config("sweep", &sys, &a.states, &a.method, false, &OracleConfig::default());
    let mut out = open_out(a.output.out.as_deref())?;
    match a.output.format {
        Format::Csv => write_csv(
            &mut out,
            &["param", "value", "n", "m", "energy", "delta_e", "status"],
            out_rows.iter().map(|r| {
                vec![
                    r.param.clone(),
                    fmt_f64(r.value),
                    r.n.to_string(),
                    r.m.to_string(),
                    fmt_opt(r.energy),
                    fmt_opt(r.delta_e),
                    r.status.clone(),
                ]
            }),
        )?,
        Format::Json => write_json(&mut out, &Report { config, levels: out_rows })?,
    }
    out.flush()?;
    Ok(if any_ok { EXIT_OK } else { EXIT_NO_ROOT })
}
