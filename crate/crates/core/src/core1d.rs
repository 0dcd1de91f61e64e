//! One-dimensional Jumarie derivative and `(dt)^α` integral.
//!
//! For `f` continuously differentiable the derivative is evaluated in its
//! integrated-by-parts form
//!
//! ```text
//! f^(α)(x) = 1/Γ(1-α) ∫_a^x (x-t)^(-α) f'(t) dt
//! ```
//!
//! which avoids differentiating a singular integral numerically. Every kernel
//! is absorbed into a Gauss–Jacobi weight after the map `t = a + (x - a) s`,
//! so no kernel value is evaluated at `t = x`.
//!
//! Results that come out of one operator and feed another keep their
//! endpoint behaviour explicit: `f^(α)(t) = (t - a)^(1-α) Θ(t)` with `Θ`
//! smooth, and `∫_a^t f (dt)^α = (t - a)^α Φ(t)` with `Φ` smooth. Nested
//! operators integrate those powers exactly with two-sided Jacobi rules.

use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::chebyshev::Chebyshev;
use crate::error::{Error, Result};
use crate::quadrature::{JacobiRule, RuleCache};
use crate::report::ResidualReport;

/// Default number of quadrature nodes per axis.
pub const DEFAULT_ORDER: usize = 40;
/// Default degree of Chebyshev slice surrogates.
pub const DEFAULT_CHEB_DEGREE: usize = 32;

/// Fractional order in `(0, 1]`; `1` selects the classical operators.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidOrder(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// `α! = Γ(1 + α)`.
    pub fn factorial(self) -> f64 {
        gamma_factorial(self)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `Γ(1 + α)`.
pub fn gamma_factorial(alpha: Alpha) -> f64 {
    if alpha.is_classical() {
        1.0
    } else {
        gamma(1.0 + alpha.0)
    }
}

/// Gauss–Jacobi rule for the weight `(1 - t)^(α-1)` on `[0, 1]`.
pub fn build_jacobi_rule(alpha: Alpha, order: usize) -> Result<JacobiRule> {
    JacobiRule::new(alpha.0 - 1.0, 0.0, order)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a < b && a.is_finite() && b.is_finite() {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if x >= self.a && x <= self.b {
            Ok(())
        } else {
            Err(Error::OutOfDomain { x, a: self.a, b: self.b })
        }
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function with an optional analytic first derivative.
#[derive(Clone)]
pub struct Function1D {
    eval: RealFn,
    deriv: Option<RealFn>,
}

impl fmt::Debug for Function1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function1D")
            .field("deriv", &self.deriv.is_some())
            .finish_non_exhaustive()
    }
}

impl Function1D {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Function1D { eval: Arc::new(f), deriv: None }
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(df));
        self
    }

    pub fn constant(c: f64) -> Self {
        Function1D::new(move |_| c).with_derivative(|_| 0.0)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn deriv(&self, t: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(t))
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// Pointwise product; carries a derivative when both factors do.
    pub fn product(&self, other: &Function1D) -> Function1D {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let eval: RealFn = Arc::new(move |t| f(t) * g(t));
        let deriv = match (&self.deriv, &other.deriv) {
            (Some(df), Some(dg)) => {
                let (f, g, df, dg) = (self.eval.clone(), other.eval.clone(), df.clone(), dg.clone());
                Some(Arc::new(move |t| df(t) * g(t) + f(t) * dg(t)) as RealFn)
            }
            _ => None,
        };
        Function1D { eval, deriv }
    }
}

/// One term `(t - a)^exponent R(t)` of a slice derivative `g'(t)`.
pub struct DerivTerm<'a> {
    pub exponent: f64,
    pub remainder: &'a dyn Fn(f64) -> f64,
}

/// Fractional operators of a fixed order with their quadrature settings.
///
/// Cheap to clone; the rule cache is shared.
#[derive(Debug, Clone)]
pub struct Calculus {
    alpha: Alpha,
    order: usize,
    cheb_degree: usize,
    inv_gamma_1m: f64,
    rules: Arc<RuleCache>,
}

impl Calculus {
    pub fn new(alpha: Alpha) -> Self {
        let inv_gamma_1m = if alpha.is_classical() { 0.0 } else { 1.0 / gamma(1.0 - alpha.0) };
        Calculus {
            alpha,
            order: DEFAULT_ORDER,
            cheb_degree: DEFAULT_CHEB_DEGREE,
            inv_gamma_1m,
            rules: Arc::new(RuleCache::new()),
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.max(1);
        self
    }

    pub fn with_cheb_degree(mut self, degree: usize) -> Self {
        self.cheb_degree = degree;
        self
    }

    /// Same settings at a different order.
    pub fn at_alpha(&self, alpha: Alpha) -> Self {
        Calculus::new(alpha).with_order(self.order).with_cheb_degree(self.cheb_degree)
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.alpha.0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cheb_degree(&self) -> usize {
        self.cheb_degree
    }

    pub fn is_classical(&self) -> bool {
        self.alpha.is_classical()
    }

    /// Cached rule for `(1 - s)^p s^q`.
    pub fn rule(&self, p: f64, q: f64) -> Arc<JacobiRule> {
        self.rules
            .get(p, q, self.order)
            .unwrap_or_else(|e| panic!("internal quadrature rule ({p}, {q}): {e}"))
    }

    pub fn surrogate<F: FnMut(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Chebyshev {
        Chebyshev::fit(f, lo, hi, self.cheb_degree)
    }

    /// `α ∫_a^x (x - t)^(α-1) (t - a)^γ f(t) dt`, the `(dt)^α` integral of
    /// `(t - a)^γ f(t)`.
    pub fn integral_weighted<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, x: f64, gamma: f64) -> f64 {
        let len = x - a;
        if len == 0.0 {
            return 0.0;
        }
        let al = self.alpha.0;
        let rule = self.rule(al - 1.0, gamma);
        al * len.powf(al + gamma) * rule.integrate(|s| f(a + len * s))
    }

    /// `∫_a^x f(t) (dt)^α`.
    pub fn integral<F: FnMut(f64) -> f64>(&self, f: F, a: f64, x: f64) -> f64 {
        self.integral_weighted(f, a, x, 0.0)
    }

    /// Jumarie derivative at `x` of a slice `g` on `[a, x]` whose classical
    /// derivative is `g'(t) = Σ (t - a)^γ_j R_j(t)`, each `R_j` smooth.
    pub fn derivative_terms(&self, a: f64, x: f64, terms: &[DerivTerm<'_>]) -> f64 {
        let len = x - a;
        if self.is_classical() {
            return terms
                .iter()
                .map(|t| if t.exponent == 0.0 { (t.remainder)(x) } else { len.powf(t.exponent) * (t.remainder)(x) })
                .sum();
        }
        let al = self.alpha.0;
        terms
            .iter()
            .map(|t| {
                let rule = self.rule(-al, t.exponent);
                let scale = len.powf(1.0 - al + t.exponent);
                if scale == 0.0 {
                    return 0.0;
                }
                self.inv_gamma_1m * scale * rule.integrate(|s| (t.remainder)(a + len * s))
            })
            .sum()
    }

    /// `Θ(x)` with `f^(α)(x) = (x - a)^(1-α) Θ(x)`, given `f'`.
    pub fn derivative_scaled_from<D: Fn(f64) -> f64>(&self, df: D, a: f64, x: f64) -> f64 {
        if self.is_classical() {
            return df(x);
        }
        let len = x - a;
        let rule = self.rule(-self.alpha.0, 0.0);
        self.inv_gamma_1m * rule.integrate(|s| df(a + len * s))
    }

    /// Jumarie derivative of `g(t) = g(a) + (t - a)^β S(t)` at `x`.
    ///
    /// `β = 0` means `g = S` is smooth. `ds` defaults to a Chebyshev
    /// surrogate of `S` on `[a, x]`.
    pub fn derivative_power_form(
        &self,
        a: f64,
        x: f64,
        beta: f64,
        s: &dyn Fn(f64) -> f64,
        ds: Option<&dyn Fn(f64) -> f64>,
    ) -> f64 {
        let surrogate;
        let zero = |_: f64| 0.0;
        let ds: &dyn Fn(f64) -> f64 = match ds {
            Some(d) => d,
            None if x > a => {
                surrogate = self.surrogate(s, a, x).derivative();
                &|t| surrogate.eval(t)
            }
            // only the (t-a)^(β-1) term survives at the left end
            None => &zero,
        };
        if beta == 0.0 {
            self.derivative_terms(a, x, &[DerivTerm { exponent: 0.0, remainder: ds }])
        } else {
            let lead = |t: f64| beta * s(t);
            self.derivative_terms(
                a,
                x,
                &[
                    DerivTerm { exponent: beta - 1.0, remainder: &lead },
                    DerivTerm { exponent: beta, remainder: ds },
                ],
            )
        }
    }

    /// Classical derivative of `f` from its analytic form or a surrogate on `[a, x]`.
    fn slope_source<'f>(&self, f: &'f Function1D, a: f64, x: f64) -> Box<dyn Fn(f64) -> f64 + 'f> {
        match &f.deriv {
            Some(d) => Box::new(move |t| d(t)),
            None => {
                let hi = if x > a { x } else { a + 1.0 };
                let c = self.surrogate(|t| f.eval(t), a, hi).derivative();
                Box::new(move |t| c.eval(t))
            }
        }
    }

    /// `∫_a^x f(t) (dt)^α`.
    pub fn dt_alpha_integral(&self, f: &Function1D, iv: &Interval, x: f64) -> Result<f64> {
        iv.check(x)?;
        Ok(self.integral(|t| f.eval(t), iv.a, x))
    }

    /// Jumarie derivative `f^(α)(x)` with lower limit `iv.a()`.
    ///
    /// Uses the analytic derivative when present, otherwise a Chebyshev
    /// surrogate of `f` on `[a, x]`. At `x = a` returns the right limit.
    pub fn jumarie_derivative(&self, f: &Function1D, iv: &Interval, x: f64) -> Result<f64> {
        iv.check(x)?;
        let df = self.slope_source(f, iv.a, x);
        Ok(self.derivative_terms(iv.a, x, &[DerivTerm { exponent: 0.0, remainder: &*df }]))
    }

    /// `Θ(x) = (x - a)^(α-1) f^(α)(x)`, smooth up to `x = a`.
    pub fn jumarie_derivative_scaled(&self, f: &Function1D, iv: &Interval, x: f64) -> Result<f64> {
        iv.check(x)?;
        let df = self.slope_source(f, iv.a, x);
        Ok(self.derivative_scaled_from(&*df, iv.a, x))
    }

    /// `D^α [∫_a^(·) f (dt)^α](x)` against `α! f(x)`.
    pub fn check_ftc1(&self, f: &Function1D, iv: &Interval, x: f64) -> Result<ResidualReport> {
        iv.check(x)?;
        let a = iv.a;
        if x <= a {
            return Err(Error::InvalidParameter("check_ftc1 needs x > a".into()));
        }
        let al = self.alpha.0;
        // ∫_a^t f (dt)^α = (t - a)^α Φ(t)
        let kernel = self.rule(al - 1.0, 0.0);
        let phi = |t: f64| al * kernel.integrate(|s| f.eval(a + (t - a) * s));
        let dphi_exact = f.deriv.as_ref().map(|d| {
            let d = d.clone();
            let kernel = kernel.clone();
            move |t: f64| al * kernel.integrate(|s| s * d(a + (t - a) * s))
        });
        let lhs = match &dphi_exact {
            Some(d) => self.derivative_power_form(a, x, al, &phi, Some(d)),
            None => self.derivative_power_form(a, x, al, &phi, None),
        };
        let rhs = self.alpha.factorial() * f.eval(x);
        Ok(ResidualReport::new(lhs, rhs, format!("ftc1 alpha={} x={x}", self.alpha)))
    }

    /// `∫_a^x f^(α)(t) (dt)^α` against `α! (f(x) - f(a))`.
    pub fn check_ftc2(&self, f: &Function1D, iv: &Interval, x: f64) -> Result<ResidualReport> {
        iv.check(x)?;
        let a = iv.a;
        let df = self.slope_source(f, a, iv.b);
        let gamma = if self.is_classical() { 0.0 } else { 1.0 - self.alpha.0 };
        let lhs = self.integral_weighted(|t| self.derivative_scaled_from(&*df, a, t), a, x, gamma);
        let rhs = self.alpha.factorial() * (f.eval(x) - f.eval(a));
        Ok(ResidualReport::new(lhs, rhs, format!("ftc2 alpha={} x={x}", self.alpha)))
    }

    /// `(fg)^(α)` against `f^(α) g + f g^(α)`.
    pub fn check_leibniz(&self, f: &Function1D, g: &Function1D, iv: &Interval, x: f64) -> Result<ResidualReport> {
        let fg = f.product(g);
        let lhs = self.jumarie_derivative(&fg, iv, x)?;
        let rhs = self.jumarie_derivative(f, iv, x)? * g.eval(x) + f.eval(x) * self.jumarie_derivative(g, iv, x)?;
        Ok(ResidualReport::new(lhs, rhs, format!("leibniz alpha={} x={x}", self.alpha)))
    }
}

/// Fractional finite-difference quotient at step `h`:
/// `h^(-α) Σ_k (-1)^k C(α, k) g(x + (α - k) h)` with `g = f - f(a)` on
/// `[a, b]` and `g = 0` to the left of `a`, so the sum ends once samples
/// leave the interval.
pub fn jumarie_derivative_series(f: &Function1D, iv: &Interval, x: f64, alpha: Alpha, h: f64) -> Result<f64> {
    iv.check(x)?;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step h = {h} must be positive")));
    }
    let al = alpha.0;
    let top = x + al * h;
    if top > iv.b {
        return Err(Error::OutOfDomain { x: top, a: iv.a, b: iv.b });
    }
    let fa = f.eval(iv.a);
    let mut coeff = 1.0;
    let mut sum = 0.0;
    let mut k = 0usize;
    loop {
        let t = x + (al - k as f64) * h;
        if t < iv.a || coeff == 0.0 {
            break;
        }
        sum += coeff * (f.eval(t) - fa);
        coeff *= (k as f64 - al) / (k as f64 + 1.0);
        k += 1;
    }
    Ok(sum / h.powf(al))
}

/// Series quotient extrapolated over `h = (x - a) / (n0 · 10^j)`, `j < levels`,
/// eliminating successive integer powers of `h`.
pub fn jumarie_derivative_extrapolated(
    f: &Function1D,
    iv: &Interval,
    x: f64,
    alpha: Alpha,
    n0: usize,
    levels: usize,
) -> Result<f64> {
    if x <= iv.a {
        return Ok(0.0);
    }
    let mut table = Vec::with_capacity(levels);
    for j in 0..levels {
        let h = (x - iv.a) / (n0 as f64 * 10f64.powi(j as i32));
        table.push(jumarie_derivative_series(f, iv, x, alpha, h)?);
    }
    for p in 1..levels {
        let r = 10f64.powi(p as i32);
        for j in (p..levels).rev() {
            table[j] = (r * table[j] - table[j - 1]) / (r - 1.0);
        }
    }
    Ok(table[levels - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn calc(a: f64) -> Calculus {
        Calculus::new(Alpha::new(a).unwrap())
    }

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.5).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(1.0).unwrap().is_classical());
    }

    #[test]
    fn gamma_factorial_values() {
        assert_eq!(gamma_factorial(Alpha::new(1.0).unwrap()), 1.0);
        let half = gamma_factorial(Alpha::new(0.5).unwrap());
        assert!((half - 0.886_226_925_452_758).abs() < 1e-14);
        assert!((gamma_factorial(Alpha::new(1e-12).unwrap()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jacobi_rule_mass() {
        let r = build_jacobi_rule(Alpha::new(0.5).unwrap(), 1).unwrap();
        assert!((r.weights()[0] - 2.0).abs() < 1e-14);
        let r = build_jacobi_rule(Alpha::new(0.9).unwrap(), 10).unwrap();
        let s: f64 = r.weights().iter().sum();
        assert!((s - 1.0 / 0.9).abs() < 1e-13);
    }

    #[test]
    fn integral_of_constants_and_identity() {
        let c = calc(0.5);
        let one = Function1D::constant(1.0);
        assert!((c.dt_alpha_integral(&one, &unit(), 1.0).unwrap() - 1.0).abs() < 1e-14);
        let three = Function1D::constant(3.0);
        let x: f64 = 0.37;
        assert!((c.dt_alpha_integral(&three, &unit(), x).unwrap() - 3.0 * x.sqrt()).abs() < 1e-14);
        let id = Function1D::new(|t| t);
        assert!((c.dt_alpha_integral(&id, &unit(), 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(c.dt_alpha_integral(&id, &unit(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn integral_rejects_outside_point() {
        let c = calc(0.5);
        let id = Function1D::new(|t| t);
        assert!(matches!(c.dt_alpha_integral(&id, &unit(), 1.5), Err(Error::OutOfDomain { .. })));
        assert!(c.jumarie_derivative(&id, &unit(), -0.1).is_err());
    }

    #[test]
    fn derivative_of_constant_is_exactly_zero() {
        for &a in &[0.25, 0.5, 0.9, 1.0] {
            let c = calc(a);
            let k = Function1D::constant(7.0);
            assert_eq!(c.jumarie_derivative(&k, &unit(), 0.6).unwrap(), 0.0);
            // no analytic derivative: surrogate of a constant is flat
            let k = Function1D::new(|_| 7.0);
            assert!(c.jumarie_derivative(&k, &unit(), 0.6).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_of_identity() {
        let c = calc(0.5);
        let id = Function1D::new(|t| t).with_derivative(|_| 1.0);
        let d = c.jumarie_derivative(&id, &unit(), 1.0).unwrap();
        assert!((d - 1.128_379_167_095_512_6).abs() < 1e-13);
        assert_eq!(c.jumarie_derivative(&id, &unit(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn classical_mode_returns_first_derivative() {
        let c = calc(1.0);
        let f = Function1D::new(f64::sin).with_derivative(f64::cos);
        assert_eq!(c.jumarie_derivative(&f, &unit(), 0.4).unwrap(), 0.4f64.cos());
        let f = Function1D::new(f64::sin);
        assert!((c.jumarie_derivative(&f, &unit(), 0.4).unwrap() - 0.4f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn series_basic_cases() {
        let a = Alpha::new(0.5).unwrap();
        let k = Function1D::constant(2.0);
        assert_eq!(jumarie_derivative_series(&k, &unit(), 0.5, a, 1e-3).unwrap(), 0.0);
        let iv = Interval::new(0.0, 2.0).unwrap();
        let id = Function1D::new(|t| t);
        let d = jumarie_derivative_series(&id, &iv, 1.0, a, 1e-3).unwrap();
        assert!((d - 1.128_379_167).abs() / 1.128 < 5e-3);
        let one = Alpha::new(1.0).unwrap();
        let f = Function1D::new(f64::exp);
        let h = 1e-3;
        let d = jumarie_derivative_series(&f, &iv, 0.3, one, h).unwrap();
        assert!((d - ((0.3 + h).exp() - 0.3f64.exp()) / h).abs() < 1e-9);
    }

    #[test]
    fn series_errors() {
        let a = Alpha::new(0.5).unwrap();
        let id = Function1D::new(|t| t);
        assert!(jumarie_derivative_series(&id, &unit(), 0.5, a, 0.0).is_err());
        assert!(jumarie_derivative_series(&id, &unit(), 1.0, a, 1e-3).is_err());
    }

    #[test]
    fn ftc_examples() {
        let iv = unit();
        let r = calc(0.5).check_ftc1(&Function1D::constant(1.0), &iv, 0.7).unwrap();
        assert!((r.rhs - 0.886_226_925_452_758).abs() < 1e-14);
        assert!(r.abs_residual < 1e-6, "{r}");
        let sq = Function1D::new(|t| t * t).with_derivative(|t| 2.0 * t);
        assert!(calc(0.75).check_ftc1(&sq, &iv, 0.5).unwrap().abs_residual < 1e-6);
        assert!(calc(1.0).check_ftc1(&sq, &iv, 0.5).unwrap().abs_residual < 1e-10);

        let id = Function1D::new(|t| t).with_derivative(|_| 1.0);
        let r = calc(0.5).check_ftc2(&id, &iv, 1.0).unwrap();
        assert!(r.abs_residual < 1e-6, "{r}");
        let r = calc(0.5).check_ftc2(&Function1D::constant(2.0), &iv, 1.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let cube = Function1D::new(|t| t.powi(3)).with_derivative(|t| 3.0 * t * t);
        assert!(calc(0.25).check_ftc2(&cube, &iv, 1.0).unwrap().abs_residual < 1e-5);
    }

    #[test]
    fn ftc1_needs_interior_point() {
        assert!(calc(0.5).check_ftc1(&Function1D::constant(1.0), &unit(), 0.0).is_err());
    }

    #[test]
    fn leibniz_with_constant_factor_and_classical_mode() {
        let one = Function1D::constant(1.0);
        let g = Function1D::new(f64::exp).with_derivative(f64::exp);
        assert!(calc(0.5).check_leibniz(&one, &g, &unit(), 0.8).unwrap().abs_residual < 1e-12);
        let id = Function1D::new(|t| t).with_derivative(|_| 1.0);
        assert!(calc(1.0).check_leibniz(&id, &id, &unit(), 0.8).unwrap().abs_residual < 1e-10);
    }
}
