//! `curved-nbody`: classify, solve, scan and verify collinear relative
//! equilibria on the unit-curvature stereographic plane.

mod output;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use curved_nbody::dynamics::{rigid_rotation_state, write_trajectory_csv};
use curved_nbody::family7::{ExistenceSearch, SevenBodyCase};
use curved_nbody::verify::{self, BodyRecord, Family};
use curved_nbody::{family5, family7, familyn, Body, Configuration, ErrorClass, IntegrationSettings};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use crate::output::{cell, to_json};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Args(String),
    #[error(transparent)]
    Core(#[from] curved_nbody::Error),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },
    #[error("malformed configuration: {0}")]
    Config(serde_json::Error),
    #[error("output failed: {0}")]
    Output(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Args(_) => "InvalidArguments",
            CliError::Core(e) => e.kind(),
            CliError::Input { .. } => "InputUnreadable",
            CliError::Config(_) => "MalformedConfiguration",
            CliError::Output(_) => "OutputFailed",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Args(_) | CliError::Input { .. } | CliError::Config(_) => 1,
            CliError::Core(e) => match e.class() {
                ErrorClass::BadInput => 1,
                ErrorClass::Refusal => 2,
                ErrorClass::Numerical => 3,
            },
            CliError::Output(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "curved-nbody", version, about = "Collinear relative equilibria of the curved n-body problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a position tuple and report the existence verdict.
    Classify(ClassifyArgs),
    /// Solve the reduced equations for the masses.
    Solve(SolveArgs),
    /// Scan one coordinate of a seven-body case for positive masses (CSV).
    Search(SearchArgs),
    /// Tabulate five-body verdicts on a grid (CSV).
    Scan(ScanArgs),
    /// Check a configuration with masses for rigid rotation.
    Verify(VerifyArgs),
    /// Sample a lemma inequality.
    Lemma(LemmaArgs),
    /// Estimate the fraction of positions admitting positive masses.
    Measure(MeasureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Five,
    Seven,
    N,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    /// One member of the family satisfying the summed equation, picked by `--mu`.
    #[value(alias = "paper")]
    Aggregated,
}

#[derive(clap::Args)]
struct ClassifyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Increasing radii of the mirror pairs, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    positions: Vec<f64>,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Origin mass for the one-parameter family (`--method aggregated`).
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    case: String,
    /// Fixed coordinates, e.g. `x=2,z=4`.
    #[arg(long)]
    fixed: String,
    /// Scanned coordinate (`y` or `z`, depending on the case).
    #[arg(long)]
    scan: String,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    /// Open interval `lo,hi` of the scanned coordinate.
    #[arg(long, value_parser = parse_pair)]
    range: Option<(f64, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_negative_numbers = true)]
    a_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    a_max: f64,
    #[arg(long, allow_negative_numbers = true)]
    r_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    periods: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Also write the integrated trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(clap::Args)]
struct LemmaArgs {
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(clap::Args)]
struct MeasureArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Radii are sampled as increasing tuples in `(lo, hi)`.
    #[arg(long, value_parser = parse_pair, default_value = "1,5")]
    bounds: (f64, f64),
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    bodies: Vec<BodyRecord>,
    #[serde(default)]
    omega: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Args(e.render().to_string().trim().to_string()));
        }
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let code = e.exit_code();
    let body = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NBODY_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Args(format!("NBODY_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Args(format!("cannot configure thread pool: {e}")))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Classify(args) => classify(args),
        Command::Solve(args) => solve(args),
        Command::Search(args) => search(args),
        Command::Scan(args) => scan(args),
        Command::Verify(args) => verify_cmd(args),
        Command::Lemma(args) => {
            let audit = verify::lemma_audit(&args.name, args.samples, args.seed)?;
            emit_json(&audit)
        }
        Command::Measure(args) => measure(args),
    }
}

fn emit_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", to_json(value)?)?;
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn classify(args: ClassifyArgs) -> Result<()> {
    let p = &args.positions;
    let verdict = match args.family {
        FamilyArg::Five => match p[..] {
            [a, r] => family5::region_verdict(a, r)?,
            _ => return Err(CliError::Args(format!("five bodies need 2 positions, got {}", p.len()))),
        },
        FamilyArg::Seven => match p[..] {
            [x, y, z] => family7::region_verdict(x, y, z)?,
            _ => return Err(CliError::Args(format!("seven bodies need 3 positions, got {}", p.len()))),
        },
        FamilyArg::N => familyn::region_verdict(p)?,
    };
    emit_json(&verdict)
}

fn require(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| CliError::Args(format!("--{flag} is required")))
}

fn solve(args: SolveArgs) -> Result<()> {
    let solution = match (args.family, args.method) {
        (FamilyArg::Five, MethodArg::Exact) => {
            family5::solve_masses_exact(require(args.a, "a")?, require(args.r, "r")?)?
        }
        (FamilyArg::Five, MethodArg::Aggregated) => {
            family5::solve_masses_aggregated(require(args.a, "a")?, require(args.r, "r")?, require(args.mu, "mu")?)?
        }
        (FamilyArg::Seven, MethodArg::Exact) => {
            family7::solve_masses_exact7(require(args.x, "x")?, require(args.y, "y")?, require(args.z, "z")?)?
        }
        (FamilyArg::Seven, MethodArg::Aggregated) => {
            return Err(CliError::Args("--method aggregated is only defined for --family five".into()))
        }
        (FamilyArg::N, _) => return Err(CliError::Args("solve supports --family five or seven".into())),
    };
    emit_json(&solution)
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'"));
    Ok((num(lo)?, num(hi)?))
}

fn parse_fixed(spec: &str) -> Result<BTreeMap<char, f64>> {
    let mut map = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Args(format!("expected name=value in --fixed, got '{part}'")))?;
        let key = match key.trim() {
            "x" => 'x',
            "y" => 'y',
            "z" => 'z',
            other => return Err(CliError::Args(format!("unknown coordinate '{other}' in --fixed"))),
        };
        let value: f64 =
            value.trim().parse().map_err(|_| CliError::Args(format!("bad number '{value}' in --fixed")))?;
        if map.insert(key, value).is_some() {
            return Err(CliError::Args(format!("coordinate {key} given twice in --fixed")));
        }
    }
    Ok(map)
}

fn search(args: SearchArgs) -> Result<()> {
    if args.family != FamilyArg::Seven {
        return Err(CliError::Args("search supports --family seven".into()));
    }
    let case = SevenBodyCase::from_name(&args.case)
        .ok_or_else(|| CliError::Args(format!("unknown seven-body case '{}'", args.case)))?;
    let scanned = case.scanned_coordinate().ok_or_else(|| curved_nbody::Error::WrongCase {
        expected: "a case with claimed existence".into(),
        found: case.name().into(),
    })?;
    if args.scan != scanned.to_string() {
        return Err(CliError::Args(format!("case {} scans {scanned}, not '{}'", case.name(), args.scan)));
    }
    let fixed = parse_fixed(&args.fixed)?;
    let names: &[char] = if scanned == 'y' { &['x', 'z'] } else { &['x', 'y'] };
    if fixed.len() != 2 || names.iter().any(|k| !fixed.contains_key(k)) {
        return Err(CliError::Args(format!("--fixed must give exactly {}={}", names[0], names[1])));
    }
    let report = family7::existence_search(&ExistenceSearch {
        case,
        fixed: (fixed[&names[0]], fixed[&names[1]]),
        range: args.range,
        points: args.points,
    })?;
    let mut w = csv::Writer::from_writer(sink(&args.out)?);
    w.write_record([&scanned.to_string(), "mu", "M", "m", "residual", "positive", "argument_conditions_met"])?;
    for p in &report.samples {
        let sol = p.solution.as_ref();
        w.write_record([
            cell(Some(p.value)),
            cell(sol.and_then(|s| s.mu)),
            cell(sol.and_then(|s| s.big_m)),
            cell(sol.and_then(|s| s.m)),
            cell(sol.map(|s| s.full_residual_max)),
            p.certified_positive().to_string(),
            p.argument_conditions_met.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn scan(args: ScanArgs) -> Result<()> {
    if args.family != FamilyArg::Five {
        return Err(CliError::Args("scan supports --family five".into()));
    }
    let bounds_ok = 0.0 < args.a_min && args.a_min <= args.a_max && 0.0 < args.r_min && args.r_min <= args.r_max;
    if !bounds_ok || !args.a_max.is_finite() || !args.r_max.is_finite() || args.grid == 0 {
        return Err(CliError::Args("scan needs 0 < min <= max for a and r and a positive --grid".into()));
    }
    let cells: Vec<(f64, f64)> = grid(args.a_min, args.a_max, args.grid)
        .into_iter()
        .flat_map(|a| grid(args.r_min, args.r_max, args.grid).into_iter().map(move |r| (a, r)))
        .filter(|(a, r)| a < r)
        .collect();
    let rows: Vec<[String; 8]> = cells
        .par_iter()
        .map(|&(a, r)| match family5::region_verdict(a, r) {
            Ok(v) => {
                let sol = v.exact_solution.as_ref();
                [
                    cell(Some(a)),
                    cell(Some(r)),
                    v.case,
                    v.exists.map(|b| b.to_string()).unwrap_or_default(),
                    cell(sol.and_then(|s| s.mu)),
                    cell(sol.and_then(|s| s.m)),
                    cell(sol.map(|s| s.full_residual_max)),
                    v.certified_positive_solution.to_string(),
                ]
            }
            Err(e) => [
                cell(Some(a)),
                cell(Some(r)),
                e.kind().to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                false.to_string(),
            ],
        })
        .collect();
    let mut w = csv::Writer::from_writer(sink(&args.out)?);
    w.write_record(["a", "r", "case", "exists", "mu_exact", "m_exact", "residual", "certified_positive"])?;
    for row in &rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn verify_cmd(args: VerifyArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input).map_err(|source| CliError::Input { path: args.input.clone(), source })?;
    let file: ConfigFile = serde_json::from_str(&text).map_err(CliError::Config)?;
    let bodies = file
        .bodies
        .iter()
        .map(|b| Body::formal(b.mass, Complex64::new(b.re, b.im)))
        .collect::<curved_nbody::Result<Vec<_>>>()?;
    let config = Configuration::new(bodies)?;
    let report = verify::verify_configuration(&config, file.omega, args.periods, args.tol)?;
    if let (Some(path), Some(omega)) = (&args.trajectory, report.omega) {
        let period = std::f64::consts::TAU / omega;
        let settings = IntegrationSettings {
            rel_tol: 1e-13,
            abs_tol: 1e-13,
            max_step: period / 400.0,
            t_final: args.periods * period,
            samples: (200.0 * args.periods).ceil() as usize + 1,
        };
        let trajectory = curved_nbody::integrate(&config, &rigid_rotation_state(&config, omega), &settings)?;
        let file = File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        write_trajectory_csv(io::BufWriter::new(file), &config, &trajectory)?;
    }
    emit_json(&report)
}

fn measure(args: MeasureArgs) -> Result<()> {
    let family = match args.family {
        FamilyArg::Five => Family::Five,
        FamilyArg::Seven => Family::Seven,
        FamilyArg::N => return Err(CliError::Args("measure supports --family five or seven".into())),
    };
    let estimate = verify::measure_estimate(family, args.bounds, args.samples, args.seed)?;
    emit_json(&estimate)
}
