//! Fractional partial derivatives and integral operators on boxes.

use std::sync::Arc;

use crate::core1d::{Calculus, DerivTerm};
use crate::error::{Error, Result};
use crate::field::{AxisBox, AxisSubset, PowerForm, ScalarField, MAX_DIM};

/// Which half of the boundary integral on a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinePart {
    /// `α ∫_a^b [f(t, c) - f(t, d)] (b - t)^(α-1) dt`
    AlongX,
    /// `α ∫_c^d [f(b, t) - f(a, t)] (d - t)^(α-1) dt`
    AlongY,
}

/// Pair of integrated axes of a face-difference surface operator on a
/// parallelepiped; the remaining axis carries the difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FacePair {
    XY,
    XZ,
    YZ,
}

impl FacePair {
    /// `(first, second, normal)` axes.
    pub fn axes(self) -> (usize, usize, usize) {
        match self {
            FacePair::XY => (0, 1, 2),
            FacePair::XZ => (0, 2, 1),
            FacePair::YZ => (1, 2, 0),
        }
    }
}

fn buf(point: &[f64]) -> [f64; MAX_DIM] {
    let mut q = [0.0; MAX_DIM];
    q[..point.len()].copy_from_slice(point);
    q
}

fn check_field(f: &ScalarField, bx: &AxisBox) -> Result<()> {
    if f.dim() == bx.dim() {
        Ok(())
    } else {
        Err(Error::Dimension { expected: bx.dim(), got: f.dim() })
    }
}

impl Calculus {
    /// `D^α[axis] f` at `point`, lower limit `bx.lo()[axis]`.
    pub fn frac_partial(&self, f: &ScalarField, bx: &AxisBox, axis: usize, point: &[f64]) -> Result<f64> {
        check_field(f, bx)?;
        bx.check_axis(axis)?;
        bx.check_point(point)?;
        Ok(self.partial_at(f, bx.lo()[axis], bx.hi()[axis], axis, point))
    }

    /// `Θ` with `D^α[axis] f = (x_axis - a_axis)^(1-α) Θ`.
    pub fn frac_partial_scaled(&self, f: &ScalarField, bx: &AxisBox, axis: usize, point: &[f64]) -> Result<f64> {
        check_field(f, bx)?;
        bx.check_axis(axis)?;
        bx.check_point(point)?;
        if f.power_form().is_some_and(|p| p.axis == axis) {
            return Err(Error::InvalidParameter(format!("field is singular along axis {axis}")));
        }
        Ok(self.scaled_partial_at(f, bx.lo()[axis], bx.hi()[axis], axis, point))
    }

    /// `D^α[axis] f` as a field on `bx`, carrying its endpoint power so that
    /// a second derivative along the same axis stays accurate.
    pub fn frac_partial_field(&self, f: &ScalarField, bx: &AxisBox, axis: usize) -> Result<ScalarField> {
        check_field(f, bx)?;
        bx.check_axis(axis)?;
        let (a, b) = (bx.lo()[axis], bx.hi()[axis]);
        let calc = self.clone();
        let g = f.clone();
        let field = ScalarField::new(f.dim(), move |p| calc.partial_at(&g, a, b, axis, p));
        let smooth_along_axis = f.power_form().is_none_or(|p| p.axis != axis);
        if self.is_classical() || !smooth_along_axis {
            return Ok(field);
        }
        let calc = self.clone();
        let g = f.clone();
        let theta = ScalarField::new(f.dim(), move |p| calc.scaled_partial_at(&g, a, b, axis, p));
        Ok(field.with_power_form(PowerForm {
            axis,
            origin: a,
            exponent: 1.0 - self.a(),
            smooth: Arc::new(theta),
        }))
    }

    pub(crate) fn partial_at(&self, f: &ScalarField, a: f64, b: f64, axis: usize, point: &[f64]) -> f64 {
        let n = point.len();
        let base = buf(point);
        let x = point[axis];
        let at = move |t: f64| {
            let mut q = base;
            q[axis] = t;
            q
        };
        if let Some(form) = f.power_form().filter(|p| p.axis == axis && p.origin == a) {
            let s = |t: f64| form.smooth.eval(&at(t)[..n]);
            let ds = form.smooth.partial(axis).map(|d| move |t: f64| d(&at(t)[..n]));
            return match &ds {
                Some(d) => self.derivative_power_form(a, x, form.exponent, &s, Some(d)),
                None => self.derivative_power_form(a, x, form.exponent, &s, None),
            };
        }
        let df = self.slice_slope(f, a, b, axis, point);
        self.derivative_terms(a, x, &[DerivTerm { exponent: 0.0, remainder: &*df }])
    }

    pub(crate) fn scaled_partial_at(&self, f: &ScalarField, a: f64, b: f64, axis: usize, point: &[f64]) -> f64 {
        let df = self.slice_slope(f, a, b, axis, point);
        self.derivative_scaled_from(&*df, a, point[axis])
    }

    /// Classical slope of the slice through `point` along `axis`, analytic
    /// when available, otherwise from a surrogate on `[a, x]`.
    fn slice_slope<'f>(
        &self,
        f: &'f ScalarField,
        a: f64,
        b: f64,
        axis: usize,
        point: &[f64],
    ) -> Box<dyn Fn(f64) -> f64 + 'f> {
        let n = point.len();
        let base = buf(point);
        let at = move |t: f64| {
            let mut q = base;
            q[axis] = t;
            q
        };
        match f.partial(axis) {
            Some(d) => Box::new(move |t| d(&at(t)[..n])),
            None => {
                let x = point[axis];
                let hi = if x > a { x } else { b };
                let c = self.surrogate(|t| f.eval(&at(t)[..n]), a, hi).derivative();
                Box::new(move |t| c.eval(t))
            }
        }
    }

    /// Iterated `(dt)^α` integral of `Π (t_k - lo_k)^γ_k f` over the axes
    /// listed in `axes`, from `lo[k]` to `point[k]`. Coordinates of `point`
    /// off those axes stay frozen.
    pub fn tensor_integral(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        point: &[f64],
        lo: &[f64],
        axes: &[usize],
        gammas: &[f64],
    ) -> f64 {
        debug_assert_eq!(axes.len(), gammas.len());
        let n = point.len();
        self.tensor_rec(f, buf(point), n, lo, axes, gammas)
    }

    fn tensor_rec(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        q: [f64; MAX_DIM],
        n: usize,
        lo: &[f64],
        axes: &[usize],
        gammas: &[f64],
    ) -> f64 {
        match axes.split_first() {
            None => f(&q[..n]),
            Some((&ax, rest)) => self.integral_weighted(
                |t| {
                    let mut r = q;
                    r[ax] = t;
                    self.tensor_rec(f, r, n, lo, rest, &gammas[1..])
                },
                lo[ax],
                q[ax],
                gammas[0],
            ),
        }
    }

    /// `I^α_{R_Ξ}[k_1..k_s] f` with uppers `point[k]` for `k ∈ Ξ` and the
    /// remaining coordinates of `point` frozen.
    pub fn frac_multi_integral(&self, f: &ScalarField, bx: &AxisBox, subset: &AxisSubset, point: &[f64]) -> Result<f64> {
        check_field(f, bx)?;
        bx.check_point(point)?;
        if subset.indices().iter().any(|&k| k >= bx.dim()) {
            return Err(Error::InvalidParameter(format!("axis subset {:?} exceeds box", subset.indices())));
        }
        let gammas = vec![0.0; subset.indices().len()];
        Ok(self.tensor_integral(&|p| f.eval(p), point, bx.lo(), subset.indices(), &gammas))
    }

    /// `I^α_R f` over the whole box.
    pub fn frac_volume_integral(&self, f: &ScalarField, bx: &AxisBox) -> Result<f64> {
        check_field(f, bx)?;
        Ok(self.volume_integral_with_powers(&|p| f.eval(p), bx, &vec![0.0; bx.dim()]))
    }

    /// `I^α_R [Π (t_i - a_i)^γ_i g]` for a plain closure `g`.
    pub fn volume_integral_with_powers(&self, g: &dyn Fn(&[f64]) -> f64, bx: &AxisBox, gammas: &[f64]) -> f64 {
        let axes: Vec<usize> = (0..bx.dim()).collect();
        self.tensor_integral(g, bx.hi(), bx.lo(), &axes, gammas)
    }

    /// One half of the boundary integral on a rectangle.
    pub fn frac_line_integral_2d(&self, f: &ScalarField, bx: &AxisBox, part: LinePart) -> Result<f64> {
        bx.require_dim(2)?;
        check_field(f, bx)?;
        let (a, c) = (bx.lo()[0], bx.lo()[1]);
        let (b, d) = (bx.hi()[0], bx.hi()[1]);
        Ok(match part {
            LinePart::AlongX => self.integral(|t| f.eval(&[t, c]) - f.eval(&[t, d]), a, b),
            LinePart::AlongY => self.integral(|t| f.eval(&[b, t]) - f.eval(&[a, t]), c, d),
        })
    }

    /// `I^α_∂R[1] f + I^α_∂R[2] g`, the left side of Green's theorem.
    pub fn frac_line_integral_pair(&self, f: &ScalarField, g: &ScalarField, bx: &AxisBox) -> Result<f64> {
        Ok(self.frac_line_integral_2d(f, bx, LinePart::AlongX)? + self.frac_line_integral_2d(g, bx, LinePart::AlongY)?)
    }

    /// Face-difference operator `I^α_∂W[i, j] f` on a parallelepiped:
    /// the `(i, j)` integral of `f|_{x_k = hi} - f|_{x_k = lo}`.
    pub fn frac_surface_integral_3d(&self, f: &ScalarField, bx: &AxisBox, pair: FacePair) -> Result<f64> {
        bx.require_dim(3)?;
        check_field(f, bx)?;
        let (i, j, k) = pair.axes();
        let (lo_k, hi_k) = (bx.lo()[k], bx.hi()[k]);
        let diff = |p: &[f64]| {
            let mut q = [p[0], p[1], p[2]];
            q[k] = hi_k;
            let top = f.eval(&q);
            q[k] = lo_k;
            top - f.eval(&q)
        };
        Ok(self.tensor_integral(&diff, bx.hi(), bx.lo(), &[i, j], &[0.0, 0.0]))
    }
}
