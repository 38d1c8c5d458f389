//! `plurigreen`: evaluate, scan and verify pluricomplex Green function
//! envelopes from JSON experiment configs.

mod config;
mod grid;
mod output;
mod record;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use plurigreen_core::verify::{self, ext_real, Suite, SuiteReport};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::ExperimentConfig;
use grid::GridSpec;
use record::{Record, Report};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or grid; exit 2.
    Usage(String),
    /// Unreadable input or unwritable output; exit 3.
    Io(String),
    /// The optimizer or a numerical routine failed; exit 1.
    Compute(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "plurigreen", version, about = "Pluricomplex Green functions by disc envelopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Bounds and closed form at one point.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Real and imaginary parts: x1r,x1i,x2r,x2i,...
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Overrides the optimizer seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One record per grid point.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// A grid name from the config, or axes such as -0.9:0.9:21,0,0.5,0
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Runs a verification suite; exits 1 if any case fails.
    Verify {
        /// Suite name, also accepted as --suite.
        name: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("plurigreen: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PLURIGREEN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("PLURIGREEN_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Returns whether everything passed.
fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Eval {
            config,
            point,
            seed,
            format,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let x = grid::parse_point(&point)?;
            let seed = seed.unwrap_or(cfg.optimizer.seed);
            let rec = record::evaluate(&cfg, "0".into(), &x, seed)?;
            if !rec.inside {
                return Err(CliError::Usage(format!("point {point} is not inside the domain")));
            }
            let report = Report {
                seed,
                config_hash: cfg.hash(),
                records: vec![rec],
            };
            let bytes = match format {
                Format::Text => text(&report).into_bytes(),
                Format::Json => output::json(&report),
                Format::Csv => output::csv(&report.records)?,
                Format::Svg => return Err(CliError::Usage("eval has no SVG output".into())),
            };
            emit(out.as_deref(), &bytes)?;
            Ok(true)
        }
        Command::Scan {
            config,
            grid,
            out,
            format,
            seed,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let spec = GridSpec::parse(cfg.grids.get(&grid).unwrap_or(&grid))?;
            if spec.dim() != cfg.domain.dim() {
                return Err(CliError::Usage(format!(
                    "grid has {} coordinates, the domain {}",
                    spec.dim(),
                    cfg.domain.dim()
                )));
            }
            let seed = seed.unwrap_or(cfg.optimizer.seed);
            let points = spec.points();
            let width = points.len().to_string().len();
            let mut records = points
                .par_iter()
                .enumerate()
                .map(|(i, p)| record::evaluate(&cfg, format!("{i:0width$}"), &grid::point_from_reals(p)?, seed))
                .collect::<Result<Vec<Record>, _>>()?;
            records.sort_by(|a, b| a.key.cmp(&b.key));
            let report = Report {
                seed,
                config_hash: cfg.hash(),
                records,
            };
            let bytes = match format {
                Format::Csv => output::csv(&report.records)?,
                Format::Json => output::json(&report),
                Format::Svg => output::svg(&report, &spec)?,
                Format::Text => text(&report).into_bytes(),
            };
            emit(Some(&out), &bytes)?;
            Ok(true)
        }
        Command::Verify {
            name,
            suite,
            seed,
            format,
            out,
        } => {
            let name = match (name, suite) {
                (Some(a), Some(b)) if a != b => {
                    return Err(CliError::Usage(format!("conflicting suites {a:?} and {b:?}")))
                }
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => return Err(CliError::Usage("no suite given".into())),
            };
            let suite: Suite = name.parse().map_err(|_| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                CliError::Usage(format!("unknown suite {name:?}; expected one of {}", names.join(", ")))
            })?;
            let report = verify::run_suite(suite, seed).map_err(|e| CliError::Compute(e.to_string()))?;
            let doc = VerifyDocument::new(report);
            let bytes = match format {
                Format::Json => output::json(&doc),
                Format::Csv => verify_csv(&doc)?,
                Format::Text => verify_text(&doc).into_bytes(),
                Format::Svg => return Err(CliError::Usage("verify has no SVG output".into())),
            };
            emit(out.as_deref(), &bytes)?;
            Ok(doc.passed)
        }
    }
}

#[derive(Serialize)]
struct VerifyDocument {
    suite: Suite,
    seed: u64,
    /// Hash of the suite name, seed and search budgets.
    config_hash: String,
    passed: bool,
    cases: Vec<verify::CaseRecord>,
}

impl VerifyDocument {
    fn new(r: SuiteReport) -> Self {
        let descriptor = format!(
            "{}:{}:{}:{}:{}:{}",
            r.suite,
            r.seed,
            verify::HYPERPLANE_ITERATIONS,
            verify::SUITE_ITERATIONS,
            verify::SUITE_DEGREE,
            verify::BOUNDARY_DEGREE
        );
        VerifyDocument {
            passed: r.passed(),
            suite: r.suite,
            seed: r.seed,
            config_hash: hex::encode(Sha256::digest(descriptor.as_bytes())),
            cases: r.cases,
        }
    }
}

fn verify_csv(doc: &VerifyDocument) -> Result<Vec<u8>, CliError> {
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "case", "check", "expected", "observed", "tolerance", "pass"])
        .map_err(io)?;
    for c in &doc.cases {
        w.write_record([
            doc.suite.name().to_string(),
            c.case.clone(),
            format!("{:?}", c.check).to_lowercase(),
            ext_real::to_string(c.expected),
            ext_real::to_string(c.observed),
            ext_real::to_string(c.tolerance),
            c.pass.to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn verify_text(doc: &VerifyDocument) -> String {
    let mut s = format!("suite {} seed {} config {}\n", doc.suite, doc.seed, doc.config_hash);
    for c in &doc.cases {
        s += &format!(
            "{:<4} {:<32} {:?} expected {} observed {} tol {}\n",
            if c.pass { "ok" } else { "FAIL" },
            c.case,
            c.check,
            ext_real::to_string(c.expected),
            ext_real::to_string(c.observed),
            c.tolerance
        );
    }
    let failed = doc.cases.iter().filter(|c| !c.pass).count();
    s += &format!("{} cases, {failed} failed\n", doc.cases.len());
    s
}

fn text(report: &Report) -> String {
    let f = |v: f64| if v.is_nan() { "n/a".to_string() } else { ext_real::to_string(v) };
    let mut s = String::new();
    for r in &report.records {
        let coords: Vec<String> = r
            .point
            .chunks(2)
            .map(|c| format!("{}{:+}i", c[0], c[1]))
            .collect();
        s += &format!("point        ({})\n", coords.join(", "));
        s += &format!("closed form  {}\n", f(r.closed_form));
        s += &format!("lower        {}\n", f(r.lower));
        s += &format!("upper        {}\n", f(r.upper));
        s += &format!("bracket      {}\n", f(r.bracket));
        s += &format!("evaluations  {} (converged: {})\n", r.evaluations, r.converged);
        for p in &r.poles {
            s += &format!("pole         {}{:+}i weight {}\n", p.re, p.im, p.weight);
        }
    }
    s += &format!("seed {} config {}\n", report.seed, report.config_hash);
    s
}
