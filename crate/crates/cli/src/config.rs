//! Run configuration: defaults, optional TOML file, command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fracvar::core1d::{Alpha, DEFAULT_CHEB_DEGREE, DEFAULT_ORDER};
use fracvar::field::AxisBox;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Options shared by every subcommand. Flags override the config file,
/// which overrides the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Comma-separated orders in (0, 1]. Default: 0.25,0.5,0.75,0.9
    /// (string: 0.9,0.95,0.99,1).
    #[arg(long, global = true, value_name = "LIST")]
    pub alpha: Option<String>,
    /// Gauss-Jacobi nodes per axis [default: 40].
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Chebyshev surrogate degree [default: 32].
    #[arg(long, global = true)]
    pub cheb_degree: Option<usize>,
    /// Box extents x0,x1,y0,y1,z0,z1 replacing the suite's own boxes.
    /// Planar suites use the first two axes.
    #[arg(long = "box", global = true, value_name = "EXTENTS")]
    pub bx: Option<String>,
    /// Report format [default: csv].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Report path [default: stdout].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized cases [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative tolerance replacing every per-check default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// TOML file with any of the keys alpha, order, cheb_degree, box,
    /// format, out, seed, tol.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<Vec<f64>>,
    order: Option<usize>,
    cheb_degree: Option<usize>,
    #[serde(rename = "box")]
    bx: Option<Vec<f64>>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    tol: Option<f64>,
}

/// Configuration problem; always maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<fracvar::Error> for ConfigError {
    fn from(e: fracvar::Error) -> Self {
        ConfigError(e.to_string())
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alphas: Vec<Alpha>,
    pub order: usize,
    pub cheb_degree: usize,
    /// Three-dimensional override box.
    pub bx: Option<AxisBox>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
}

pub const DEFAULT_ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 0.9];

impl RunConfig {
    pub fn resolve(args: &CommonArgs, default_alphas: &[f64]) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let alphas = match (&args.alpha, file.alpha) {
            (Some(list), _) => parse_list(list, "--alpha")?,
            (None, Some(list)) => list,
            (None, None) => default_alphas.to_vec(),
        };
        if alphas.is_empty() {
            return Err(ConfigError("alpha list is empty".into()));
        }
        let alphas = alphas.into_iter().map(Alpha::new).collect::<Result<Vec<_>, _>>()?;
        let order = args.order.or(file.order).unwrap_or(DEFAULT_ORDER);
        if order == 0 {
            return Err(ConfigError("quadrature order must be positive".into()));
        }
        let cheb_degree = args.cheb_degree.or(file.cheb_degree).unwrap_or(DEFAULT_CHEB_DEGREE);
        if cheb_degree < 2 {
            return Err(ConfigError("Chebyshev degree must be at least 2".into()));
        }
        let extents = match (&args.bx, file.bx) {
            (Some(s), _) => Some(parse_list(s, "--box")?),
            (None, b) => b,
        };
        let bx = extents.map(|e| parse_box(&e)).transpose()?;
        let tol = args.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0) {
                return Err(ConfigError(format!("tolerance {t} must be positive")));
            }
        }
        Ok(RunConfig {
            alphas,
            order,
            cheb_degree,
            bx,
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            out: args.out.clone().or(file.out),
            seed: args.seed.or(file.seed).unwrap_or(0),
            tol,
        })
    }

    /// `--tol` if given, otherwise the check's own tolerance.
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// The override box, or `defaults`.
    pub fn boxes(&self, defaults: Vec<AxisBox>) -> Vec<AxisBox> {
        match &self.bx {
            Some(b) => vec![b.clone()],
            None => defaults,
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| ConfigError(format!("{flag}: cannot parse {t:?} as a number"))))
        .collect()
}

fn parse_box(e: &[f64]) -> Result<AxisBox, ConfigError> {
    if e.len() != 6 {
        return Err(ConfigError(format!("--box needs 6 numbers, got {}", e.len())));
    }
    Ok(AxisBox::new(&[e[0], e[2], e[4]], &[e[1], e[3], e[5]])?)
}

/// First two axes of a box.
pub fn planar(bx: &AxisBox) -> AxisBox {
    AxisBox::new(&bx.lo()[..2], &bx.hi()[..2]).expect("sub-box of a valid box")
}
