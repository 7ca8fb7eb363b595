//! Command-line surface: matrix ingestion, profiles, suites and CSV output.
//!
//! Exit codes: 0 success, 1 mathematical check failure, 2 usage or parse
//! error.

pub mod commands;
pub mod matrix_file;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::averaging::TestFunction;
use crate::error::{Error, Result};
use crate::herglotz::EpsSchedule;
use crate::matkit::DEFAULT_RANK_TOL;
use crate::oplog::{Branch, QuadratureConfig};
use crate::shift::GridSpec;

pub use matrix_file::{read_matrix, write_matrix, MatrixFile};
pub use suites::{run_suite, Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const THREADS_ENV: &str = "KREIN_SHIFT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "krein-shift",
    version,
    about = "Spectral shift functions and operators for finite Hermitian pairs"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Initial ε of the boundary-value schedule.
    #[arg(long, global = true)]
    pub eps0: Option<f64>,
    /// Relative Cauchy tolerance of the ε-schedule.
    #[arg(long = "conv-tol", global = true)]
    pub conv_tol: Option<f64>,
    /// Relative tolerance of the logarithm quadrature.
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    /// Relative rank cutoff for the signed factorization of V.
    #[arg(long = "rank-tol", global = true)]
    pub rank_tol: Option<f64>,
    /// Seed for the random suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `min:max:count`, `AUTO` or `auto:count`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// `a:b` parameter interval for averaging.
    #[arg(long = "s-range", global = true, allow_hyphen_values = true)]
    pub s_range: Option<String>,
    /// `poly:c0,c1,...`, `gauss:center,width` or `imres:re,im`.
    #[arg(long = "f", global = true, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ξ, ξ±, oracle and determinant columns on a grid.
    Xi {
        #[arg(long)]
        h0: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Logarithm of a dissipative (or, with --anti, anti-dissipative) matrix.
    Logm {
        #[arg(long)]
        t: PathBuf,
        /// Branch of the eigenvalue cross-check.
        #[arg(long, default_value = "log")]
        branch: String,
        #[arg(long)]
        anti: bool,
    },
    /// Seeded invariant suite: logm, herglotz, trace, chain, average, op-average, example39 or all.
    Check { suite: String },
    /// Both sides of the spectral averaging identity along V0 + s·V1.
    Average {
        #[arg(long)]
        h0: PathBuf,
        /// Direction V1.
        #[arg(long)]
        v: PathBuf,
        /// Offset V0 (zero if omitted).
        #[arg(long)]
        v0: Option<PathBuf>,
    },
    /// Operator-valued averaging residual for H0 + s·KK*.
    OpAverage {
        #[arg(long)]
        h0: PathBuf,
        #[arg(long)]
        k: PathBuf,
    },
}

/// Tolerances and options shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sched: EpsSchedule,
    pub quad: QuadratureConfig,
    pub rank_tol: f64,
    pub seed: u64,
    pub grid: GridSpec,
    pub s_range: (f64, f64),
    pub f: Option<TestFunction>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sched: EpsSchedule::default(),
            quad: QuadratureConfig::default(),
            rank_tol: DEFAULT_RANK_TOL,
            seed: DEFAULT_SEED,
            grid: GridSpec::Auto { count: 64 },
            s_range: (0.0, 1.0),
            f: None,
        }
    }
}

pub fn parse_s_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parse(format!("s-range '{s}' is not a:b with a < b"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self> {
        let mut c = RunConfig::default();
        if let Some(e) = a.eps0 {
            c.sched.eps0 = e;
        }
        if let Some(t) = a.conv_tol {
            c.sched.conv_tol = t;
        }
        if let Some(t) = a.rel_tol {
            c.quad.rel_tol = t;
        }
        if let Some(t) = a.rank_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Parse(format!("rank-tol must lie in (0,1), got {t}")));
            }
            c.rank_tol = t;
        }
        if let Some(s) = a.seed {
            c.seed = s;
        }
        if let Some(g) = &a.grid {
            c.grid = g.parse()?;
        }
        if let Some(r) = &a.s_range {
            c.s_range = parse_s_range(r)?;
        }
        if let Some(f) = &a.f {
            c.f = Some(f.parse()?);
        }
        c.sched
            .validate()
            .map_err(|e| Error::Parse(e.to_string()))?;
        c.quad.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(c)
    }
}

/// Output of one command: text for the output stream, diagnostics for the
/// error stream, and the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Exit status for a library error: malformed input is a usage error,
/// everything else a mathematical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::DimensionMismatch(_)
        | Error::NotSquare { .. }
        | Error::NotHermitian { .. }
        | Error::NonFinite => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: exit_code(e),
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let cfg = match RunConfig::from_args(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                code: EXIT_USAGE,
                ..failure(&e)
            }
        }
    };
    let result = match &cli.command {
        Command::Xi { h0, v } => commands::cmd_xi(h0, v, &cfg),
        Command::Logm { t, branch, anti } => match branch.parse::<Branch>() {
            Ok(b) => commands::cmd_logm(t, b, *anti, &cfg),
            Err(e) => Err(e),
        },
        Command::Check { suite } => match suite.parse::<Suite>() {
            Ok(s) => Ok(commands::cmd_check(s, &cfg)),
            Err(e) => Err(e),
        },
        Command::Average { h0, v, v0 } => commands::cmd_average(h0, v, v0.as_deref(), &cfg),
        Command::OpAverage { h0, k } => commands::cmd_op_average(h0, k, &cfg),
    };
    result.unwrap_or_else(|e| failure(&e))
}

/// Sets the global rayon pool from `KREIN_SHIFT_THREADS` (0 or unset means
/// automatic).
pub fn init_threads() -> Result<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("{THREADS_ENV}='{s}' is not a count")))?,
        Err(_) => 0,
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Constraint(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Parses `args`, runs the command and writes its output. Returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = execute(&cli);
    let mut code = outcome.code;
    match &cli.common.out {
        Some(path) if !outcome.stdout.is_empty() => {
            if let Err(e) = std::fs::write(path, &outcome.stdout) {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                code = EXIT_USAGE;
            }
        }
        _ => {
            let _ = out.write_all(outcome.stdout.as_bytes());
        }
    }
    let _ = err.write_all(outcome.stderr.as_bytes());
    code
}
