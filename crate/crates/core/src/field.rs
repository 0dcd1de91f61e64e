//! Boxes and the fields evaluated on them.
//!
//! Axes are numbered from zero throughout the crate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Axis-aligned box `Π [lo_i, hi_i]` of dimension 1, 2 or 3.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension { expected: lo.len(), got: hi.len() });
        }
        if lo.is_empty() || lo.len() > MAX_DIM {
            return Err(Error::InvalidParameter(format!("box dimension {} not in 1..=3", lo.len())));
        }
        for (&a, &b) in lo.iter().zip(hi) {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInterval { a, b });
            }
        }
        Ok(AxisBox { lo: lo.to_vec(), hi: hi.to_vec() })
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(&vec![0.0; dim], &vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::Dimension { expected: dim, got: self.dim() })
        }
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("axis {axis} out of range for a {}-d box", self.dim())))
        }
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: p.len() });
        }
        for i in 0..self.dim() {
            if !(p[i] >= self.lo[i] && p[i] <= self.hi[i]) {
                return Err(Error::OutOfDomain { x: p[i], a: self.lo[i], b: self.hi[i] });
            }
        }
        Ok(())
    }

    /// `n` evenly spaced points per axis strictly inside the box.
    pub fn interior_grid(&self, n: usize) -> Vec<Vec<f64>> {
        let axis_pts: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| {
                (1..=n)
                    .map(|k| self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (n + 1) as f64)
                    .collect()
            })
            .collect();
        let mut out = vec![Vec::new()];
        for pts in &axis_pts {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    pts.iter().map(move |&v| {
                        let mut q = prefix.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for AxisBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lo.iter().zip(&self.hi).map(|(a, b)| format!("[{a},{b}]")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Nonempty strictly increasing set of axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisSubset(Vec<usize>);

impl AxisSubset {
    pub fn new(indices: &[usize], dim: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("axis subset must be nonempty".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= dim) {
            return Err(Error::InvalidParameter(format!("axis subset {indices:?} invalid for dimension {dim}")));
        }
        Ok(AxisSubset(indices.to_vec()))
    }

    pub fn all(dim: usize) -> Self {
        AxisSubset((0..dim).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `f(x) = (x_axis - origin)^exponent · smooth(x)` with `smooth` regular
/// along `axis`.
#[derive(Clone)]
pub struct PowerForm {
    pub axis: usize,
    pub origin: f64,
    pub exponent: f64,
    pub smooth: Arc<ScalarField>,
}

/// Continuous scalar function of `dim` variables.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    eval: FieldFn,
    partials: Option<Vec<FieldFn>>,
    form: Option<PowerForm>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("partials", &self.partials.is_some())
            .field("power_form", &self.form.as_ref().map(|p| (p.axis, p.exponent)))
            .finish()
    }
}

impl ScalarField {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { dim, eval: Arc::new(f), partials: None, form: None }
    }

    pub fn from_fn(dim: usize, eval: FieldFn) -> Self {
        ScalarField { dim, eval, partials: None, form: None }
    }

    /// Attaches analytic classical partials, one per axis.
    pub fn with_partials(mut self, partials: Vec<FieldFn>) -> Self {
        assert_eq!(partials.len(), self.dim, "one partial per axis");
        self.partials = Some(partials);
        self
    }

    pub fn with_power_form(mut self, form: PowerForm) -> Self {
        self.form = Some(form);
        self
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let zero: FieldFn = Arc::new(|_| 0.0);
        ScalarField::new(dim, move |_| c).with_partials(vec![zero; dim])
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let partials = (0..dim)
            .map(|i| -> FieldFn {
                let v = if i == axis { 1.0 } else { 0.0 };
                Arc::new(move |_| v)
            })
            .collect();
        ScalarField::new(dim, move |p| p[axis]).with_partials(partials)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.eval)(p)
    }

    pub fn partial(&self, axis: usize) -> Option<&FieldFn> {
        self.partials.as_ref().map(|v| &v[axis])
    }

    pub fn has_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn power_form(&self) -> Option<&PowerForm> {
        self.form.as_ref()
    }

    /// Same values, analytic partials dropped (forces surrogate paths).
    pub fn without_partials(&self) -> Self {
        ScalarField { dim: self.dim, eval: self.eval.clone(), partials: None, form: None }
    }

    fn zip(&self, other: &ScalarField, op: fn(f64, f64) -> f64) -> FieldFn {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Arc::new(move |p| op(f(p), g(p)))
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let mut out = ScalarField::from_fn(self.dim, self.zip(other, |a, b| a + b));
        if let (Some(pf), Some(pg)) = (&self.partials, &other.partials) {
            out.partials = Some(
                pf.iter()
                    .zip(pg)
                    .map(|(a, b)| {
                        let (a, b) = (a.clone(), b.clone());
                        Arc::new(move |p: &[f64]| a(p) + b(p)) as FieldFn
                    })
                    .collect(),
            );
        }
        out
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let f = self.eval.clone();
        let mut out = ScalarField::new(self.dim, move |p| c * f(p));
        if let Some(pf) = &self.partials {
            out.partials = Some(
                pf.iter()
                    .map(|a| {
                        let a = a.clone();
                        Arc::new(move |p: &[f64]| c * a(p)) as FieldFn
                    })
                    .collect(),
            );
        }
        if let Some(form) = &self.form {
            out.form = Some(PowerForm { smooth: Arc::new(form.smooth.scale(c)), ..form.clone() });
        }
        out
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.add(&other.scale(-1.0))
    }

    /// Pointwise product with product-rule partials when both factors have them.
    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        let mut out = ScalarField::from_fn(self.dim, self.zip(other, |a, b| a * b));
        if let (Some(pf), Some(pg)) = (&self.partials, &other.partials) {
            out.partials = Some(
                pf.iter()
                    .zip(pg)
                    .map(|(df, dg)| {
                        let (f, g, df, dg) = (self.eval.clone(), other.eval.clone(), df.clone(), dg.clone());
                        Arc::new(move |p: &[f64]| df(p) * g(p) + f(p) * dg(p)) as FieldFn
                    })
                    .collect(),
            );
        }
        out
    }

    /// Embeds a 2-d field into 3-d by reading axes `(u, v)` of the 3-d point.
    /// Used to restrict a 3-d field to a coordinate plane and back.
    pub fn restrict_to_plane(&self, normal: usize, offset: f64, in_plane: [usize; 2]) -> ScalarField {
        assert_eq!(self.dim, 3);
        let lift = move |q: &[f64]| {
            let mut p = [0.0; 3];
            p[normal] = offset;
            p[in_plane[0]] = q[0];
            p[in_plane[1]] = q[1];
            p
        };
        let f = self.eval.clone();
        let mut out = ScalarField::new(2, move |q| f(&lift(q)));
        if let Some(pf) = &self.partials {
            out.partials = Some(
                in_plane
                    .iter()
                    .map(|&ax| {
                        let d = pf[ax].clone();
                        Arc::new(move |q: &[f64]| d(&lift(q))) as FieldFn
                    })
                    .collect(),
            );
        }
        out
    }
}

/// Multivariate polynomial `Σ c · Π x_i^{e_i}` with analytic partials.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(f64, [u32; MAX_DIM])>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(f64, [u32; MAX_DIM])>) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Polynomial { dim, terms }
    }

    pub fn monomial(dim: usize, exps: [u32; MAX_DIM]) -> Self {
        Self::new(dim, vec![(1.0, exps)])
    }

    /// All exponent vectors of total degree `<= max_degree` in graded order.
    pub fn monomial_exponents(dim: usize, max_degree: u32) -> Vec<[u32; MAX_DIM]> {
        let mut out = Vec::new();
        for deg in 0..=max_degree {
            for i in 0..=deg {
                for j in 0..=(deg - i) {
                    let k = deg - i - j;
                    let e = [i, j, k];
                    if e[dim..].iter().all(|&x| x == 0) {
                        out.push(e);
                    }
                }
            }
        }
        out.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(*e)));
        out.dedup();
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * (0..self.dim).map(|i| p[i].powi(e[i] as i32)).product::<f64>())
            .sum()
    }

    pub fn derivative(&self, axis: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[axis] > 0)
            .map(|&(c, mut e)| {
                let k = e[axis];
                e[axis] -= 1;
                (c * k as f64, e)
            })
            .collect();
        Polynomial { dim: self.dim, terms }
    }

    pub fn to_field(&self) -> ScalarField {
        let partials = (0..self.dim)
            .map(|i| {
                let d = self.derivative(i);
                Arc::new(move |p: &[f64]| d.eval(p)) as FieldFn
            })
            .collect();
        let me = self.clone();
        ScalarField::new(self.dim, move |p| me.eval(p)).with_partials(partials)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, e)| {
                let mono: Vec<String> = (0..self.dim)
                    .filter(|&i| e[i] > 0)
                    .map(|i| if e[i] == 1 { names[i].to_string() } else { format!("{}^{}", names[i], e[i]) })
                    .collect();
                if mono.is_empty() {
                    format!("{c}")
                } else if *c == 1.0 {
                    mono.join("*")
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
