//! Report rows and their CSV/JSON serialization.

use std::io::{self, Write};
use std::path::Path;

use fracvar::ResidualReport;
use serde::Serialize;

use crate::config::Format;

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub check_id: String,
    pub alpha: f64,
    pub case_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub pass: bool,
}

impl Row {
    pub fn from_report(check_id: &str, alpha: f64, case_id: impl Into<String>, r: &ResidualReport, tol: f64) -> Self {
        Row {
            check_id: check_id.to_string(),
            alpha,
            case_id: case_id.into(),
            lhs: tidy(r.lhs),
            rhs: tidy(r.rhs),
            abs_residual: tidy(r.abs_residual),
            rel_residual: tidy(r.rel_residual),
            pass: r.passes(tol),
        }
    }

    /// Row judged on the absolute residual.
    pub fn absolute(check_id: &str, alpha: f64, case_id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let r = ResidualReport::new(lhs, rhs, "");
        let mut row = Row::from_report(check_id, alpha, case_id, &r, tol);
        row.pass = r.abs_residual.is_finite() && r.abs_residual < tol;
        row
    }
}

/// Folds `-0.0` into `0.0` so equal runs print identically.
pub fn tidy(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Writes `rows` to `path`, or stdout when `path` is `None`.
pub fn write_rows<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p)?;
            let mut w = io::BufWriter::new(file);
            serialize(rows, format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            serialize(rows, format, &mut w)?;
            w.flush()
        }
    }
}

pub fn serialize<T: Serialize, W: Write>(rows: &[T], format: Format, w: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv::WriterBuilder::new().has_headers(true).from_writer(w);
            for row in rows {
                out.serialize(row).map_err(io::Error::other)?;
            }
            out.flush()
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, rows).map_err(io::Error::other)?;
            writeln!(w)
        }
    }
}
