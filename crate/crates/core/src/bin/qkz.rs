use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qkz::error::QkzError;
use qkz::harness::export::{self, parse_epsilon, parse_window, parse_word};
use qkz::harness::{run_suite, RunConfig, Status, Suite};
use qkz::numerics::linalg::c;

/// Numerical checks and exports for boundary qKZ and qKZB equations.
#[derive(Parser)]
#[command(name = "qkz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite: hecke, trig, series, connection, baxter, face, qkzb or all.
    Check {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Power-series solutions.
    Series {
        #[command(subcommand)]
        action: SeriesAction,
    },
    /// Connection matrices.
    Connection {
        #[command(subcommand)]
        action: ConnectionAction,
    },
    /// Face weights of the eight-vertex SOS model.
    Face {
        #[command(subcommand)]
        action: FaceAction,
    },
}

#[derive(Subcommand)]
enum SeriesAction {
    /// Export the coefficients of one basis solution.
    Build {
        /// Signs, e.g. +- or +1,-1; the length fixes the rank.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: String,
        #[arg(long)]
        height: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ConnectionAction {
    /// Extract the connection matrix of a Weyl group word at rank 2.
    Extract {
        /// Simple reflections, e.g. 1,2,1.
        #[arg(long)]
        word: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum FaceAction {
    /// Tabulate all admissible face weights in a height window.
    Table {
        #[arg(long, allow_hyphen_values = true, default_value = "-3:3")]
        window: String,
        /// Spectral parameter as re,im.
        #[arg(long, default_value = "0.2,0.1", allow_hyphen_values = true)]
        z: String,
        /// Dynamical parameter as re,im.
        #[arg(long, default_value = "0.3,-0.1", allow_hyphen_values = true)]
        xi: String,
        #[command(flatten)]
        common: Common,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SKIP: u8 = 3;

fn load(path: Option<&PathBuf>) -> Result<RunConfig, QkzError> {
    let cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cfg = cfg.with_env()?;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_complex(s: &str) -> Result<qkz::C64, QkzError> {
    let bad = || QkzError::InvalidInput(format!("`{s}` must look like 0.2,-0.1"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok(c(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), QkzError> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| QkzError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_for(e: &QkzError) -> u8 {
    match e {
        QkzError::Config(_) | QkzError::InvalidInput(_) => EXIT_CONFIG,
        QkzError::NonGeneric(_) => EXIT_SKIP,
        _ => EXIT_FAIL,
    }
}

fn run(cli: Cli) -> Result<u8, QkzError> {
    match cli.command {
        Command::Check { suite, config, seed, json } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = load(config.as_ref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = run_suite(suite, &cfg)?;
            for case in &report.cases {
                let mark = match case.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                let res = case.residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
                let note = case.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default();
                eprintln!("{mark}  {:<32} residual {res:>10}  tol {:.0e}{note}", case.id, case.tolerance);
            }
            let s = &report.summary;
            eprintln!("{}: {} passed, {} failed, {} skipped", report.suite, s.passed, s.failed, s.skipped);
            if let Some(p) = json {
                emit(&report.to_json(), Some(&p))?;
            }
            Ok(report.exit_code() as u8)
        }
        Command::Series { action: SeriesAction::Build { epsilon, height, common } } => {
            let cfg = load(common.config.as_ref())?;
            let eps = parse_epsilon(&epsilon)?;
            emit(&export::to_json(&export::series_coefficients(&cfg, &eps, height)?), common.out.as_ref())?;
            Ok(0)
        }
        Command::Connection { action: ConnectionAction::Extract { word, common } } => {
            let cfg = load(common.config.as_ref())?;
            let word = parse_word(&word)?;
            let z = export::default_connection_point(&cfg);
            let doc = export::connection_matrices(&cfg, &word, &z)?;
            emit(&export::to_json(&doc), common.out.as_ref())?;
            Ok(0)
        }
        Command::Face { action: FaceAction::Table { window, z, xi, common } } => {
            let cfg = load(common.config.as_ref())?;
            let doc = export::face_weights(&cfg, parse_window(&window)?, parse_complex(&z)?, parse_complex(&xi)?)?;
            emit(&export::to_json(&doc), common.out.as_ref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qkz: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
