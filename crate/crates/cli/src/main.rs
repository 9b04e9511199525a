//! `borelsum` command-line front end.
//!
//! Exit status: 0 on success, 1 when a computation fails (a single-line JSON
//! error object is printed on stdout), 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use borelsum_core::{Error, SolverConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming a default solver settings file.
pub const CONFIG_ENV: &str = "BORELSUM_CONFIG";

#[derive(Parser, Debug)]
#[command(name = "borelsum", version, about = "Borel summation and Harry Dym singularity toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Solver settings file (`key = value` lines); defaults to $BORELSUM_CONFIG.
    #[arg(long, global = true, value_name = "PATH", env = CONFIG_ENV)]
    pub settings: Option<PathBuf>,
    /// Override one setting; repeatable. Applied after the settings file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format for the tabular commands.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact formal series of the first Painlevé equation.
    P1Series {
        #[arg(long, default_value_t = 3)]
        terms: usize,
        /// Sign of the square-root branch: principal or negative.
        #[arg(long, default_value = "principal")]
        branch: String,
    },
    /// Heat-kernel and Borel-plane solutions of the heat equation side by side.
    HeatDemo {
        #[arg(long, default_value = "gaussian")]
        datum: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// `start:stop:step`.
        #[arg(long, default_value = "-3:3:0.5", allow_hyphen_values = true)]
        x_range: String,
    },
    /// Borel–Padé–Laplace sum of a coefficient file.
    BorelSum {
        /// JSON array of `a_1, a_2, …` (numbers or `[re, im]` pairs).
        #[arg(long, value_name = "FILE")]
        coeffs: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
        t: String,
        #[arg(long, value_name = "M,N")]
        pade: Option<String>,
    },
    /// Picard iteration for the regularised evolution problem.
    IltSolve {
        /// JSON problem description.
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
    /// Exact outer coefficients `c_0 … c_N` of the Harry Dym series.
    HdCoeffs {
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Evaluate the truncated outer series.
    HdEval {
        #[arg(long, allow_hyphen_values = true, value_name = "RE[,IM]")]
        x: String,
        #[arg(long, allow_hyphen_values = true, value_name = "RE[,IM]")]
        t: String,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Integrate the inner hierarchy along a ray.
    HdInner {
        #[arg(long, allow_hyphen_values = true)]
        ray_deg: Option<f64>,
        #[arg(long)]
        eta_max: Option<f64>,
        #[arg(long)]
        eta_min: Option<f64>,
        #[arg(long, default_value_t = 4)]
        orders: usize,
    },
    /// Singularity positions for a range of branch indices.
    HdSingularities {
        /// `first:last`.
        #[arg(long, default_value = "1:40", allow_hyphen_values = true)]
        n: String,
        /// Stokes constant; fitted from the numerical solution when absent.
        #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
        stokes: Option<String>,
        /// Skip the numerical approach and exponent fit.
        #[arg(long)]
        no_fit: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Io(_) => "io",
        }
    }
}

/// Defaults, then the settings file, then `--set` overrides.
pub fn load_config(g: &Global) -> Result<SolverConfig, CliError> {
    let mut cfg = SolverConfig::default();
    if let Some(p) = &g.settings {
        cfg.merge_file(p)?;
    }
    for kv in &g.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(body).and_then(|_| o.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = load_config(&cli.global)
        .and_then(|cfg| commands::run(&cli.command, cfg, cli.global.format))
        .and_then(|body| emit(&cli.global.out, &body));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            println!("{obj}");
            ExitCode::from(1)
        }
    }
}
