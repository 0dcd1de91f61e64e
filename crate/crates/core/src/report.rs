use std::fmt;

/// Both sides of a verified identity and how far apart they are.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    /// `abs_residual / max(1, |lhs|, |rhs|)`.
    pub rel_residual: f64,
    pub meta: String,
}

impl ResidualReport {
    pub fn new(lhs: f64, rhs: f64, meta: impl Into<String>) -> Self {
        let abs_residual = (lhs - rhs).abs();
        let rel_residual = abs_residual / 1f64.max(lhs.abs()).max(rhs.abs());
        ResidualReport { lhs, rhs, abs_residual, rel_residual, meta: meta.into() }
    }

    /// Residual is finite and below `tol` in the relative measure.
    pub fn passes(&self, tol: f64) -> bool {
        self.rel_residual.is_finite() && self.rel_residual < tol
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lhs={:.15e} rhs={:.15e} abs={:.3e} rel={:.3e}",
            self.meta, self.lhs, self.rhs, self.abs_residual, self.rel_residual
        )
    }
}
