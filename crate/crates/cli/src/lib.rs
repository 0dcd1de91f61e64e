//! `fracvar` command-line driver.
//!
//! Exit codes: `0` every row passed, `1` some row failed its tolerance,
//! `2` usage or configuration error.

pub mod config;
pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fracvar::veccalc::Identity;
use serde::Serialize;

use config::{CommonArgs, ConfigError, Format, RunConfig, DEFAULT_ALPHAS};
use output::{write_rows, Row};
use suites::{StringData, DEFAULT_IDENTITIES, STRING_ALPHAS};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fracvar", version, about = "Checks and experiments for the Jumarie fractional calculus of variations")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Both fundamental theorems for 1, t, t², t³, sin t, eᵗ on [0, 1].
    Ftc,
    /// Product rule on every pair of the ftc functions.
    Leibniz,
    /// Green, Gauss and planar Stokes on seeded polynomials over two boxes.
    Theorems {
        /// Maximum total degree of the random polynomials (Gauss uses at most 2).
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Vector identities on a 3×3×3 interior grid.
    Identities {
        /// Comma-separated identities among i, ii, iii, iv, v.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_IDENTITIES.to_vec())]
        identity: Vec<Identity>,
    },
    /// Euler-Lagrange residuals, natural boundary traces and first variations.
    El,
    /// Vibrating-string order sweep with tensor sine modes.
    String(StringArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StringArgs {
    /// Sine modes per axis; the ansatz has modes² terms.
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    /// Prescribed end shapes.
    #[arg(long, value_enum, default_value_t = StringData::Wave)]
    pub data: StringData,
    /// Lattice side of the solution grid.
    #[arg(long, default_value_t = 21)]
    pub grid_size: usize,
    /// Solution grid path [default: next to --out, else string_grid.<format>].
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Optional per-order summary (action, residual, coefficients).
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Optional optimizer trace (alpha, iter, value, grad_norm).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

/// Parses `args` and runs the subcommand; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(rows) => {
            let failed = rows.iter().filter(|r| !r.pass).count();
            eprintln!("{} rows, {} failed", rows.len(), failed);
            if failed == 0 {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli) -> Result<Vec<Row>, ConfigError> {
    let defaults: &[f64] = match cli.command {
        Command::String(_) => &STRING_ALPHAS,
        _ => &DEFAULT_ALPHAS,
    };
    let cfg = RunConfig::resolve(&cli.common, defaults)?;
    let rows = match &cli.command {
        Command::Ftc => suites::ftc(&cfg)?,
        Command::Leibniz => suites::leibniz(&cfg)?,
        Command::Theorems { degree } => suites::theorems(&cfg, *degree)?,
        Command::Identities { identity } => {
            if identity.is_empty() {
                return Err(ConfigError("identity list is empty".into()));
            }
            suites::identities(&cfg, identity)?
        }
        Command::El => suites::el(&cfg)?,
        Command::String(args) => return run_string(&cfg, args),
    };
    emit(&rows, cfg.format, cfg.out.as_deref())?;
    Ok(rows)
}

fn run_string(cfg: &RunConfig, args: &StringArgs) -> Result<Vec<Row>, ConfigError> {
    if args.modes == 0 || args.grid_size < 2 {
        return Err(ConfigError("--modes must be positive and --grid-size at least 2".into()));
    }
    let run = suites::string(cfg, args.data, args.modes, args.grid_size)?;
    let grid_path = args.grid.clone().unwrap_or_else(|| sibling(cfg.out.as_deref(), "grid", cfg.format));
    emit(&run.rows, cfg.format, cfg.out.as_deref())?;
    emit(&run.grid, cfg.format, Some(&grid_path))?;
    if let Some(p) = &args.sweep {
        emit(&run.sweep, cfg.format, Some(p))?;
    }
    if let Some(p) = &args.trace {
        emit(&run.trace, cfg.format, Some(p))?;
    }
    Ok(run.rows)
}

/// `<stem>_<tag>.<ext>` beside `out`, or `string_<tag>.<ext>` in the
/// working directory.
fn sibling(out: Option<&Path>, tag: &str, format: Format) -> PathBuf {
    match out {
        Some(p) => {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "string".into());
            p.with_file_name(format!("{stem}_{tag}.{}", format.extension()))
        }
        None => PathBuf::from(format!("string_{tag}.{}", format.extension())),
    }
}

fn emit<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> Result<(), ConfigError> {
    write_rows(rows, format, path).map_err(|e| {
        let target = path.map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into());
        ConfigError(format!("{target}: {e}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Some(Path::new("out/run.csv")), "grid", Format::Csv), PathBuf::from("out/run_grid.csv"));
        assert_eq!(sibling(None, "grid", Format::Json), PathBuf::from("string_grid.json"));
    }

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from(["fracvar", "identities", "--identity", "ii,v", "--alpha", "0.5"]).unwrap();
        match cli.command {
            Command::Identities { identity } => assert_eq!(identity, vec![Identity::CurlGrad, Identity::DivGrad]),
            _ => panic!("wrong subcommand"),
        }
        assert_eq!(cli.common.alpha.as_deref(), Some("0.5"));
        assert!(Cli::try_parse_from(["fracvar", "nope"]).is_err());
    }
}
