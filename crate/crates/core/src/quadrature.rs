//! Gauss–Jacobi rules on `[0, 1]` for the weight `(1 - t)^p * t^q`.
//!
//! Every singular kernel of the fractional operators is a power of the
//! distance to one end of the integration range, so after an affine map the
//! kernel becomes a Jacobi weight and the remaining integrand is smooth.
//! Nodes come from a Golub–Welsch eigen-solve, are polished by Newton steps
//! on the orthonormal three-term recurrence, and the weights are recomputed
//! from the Christoffel function.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Gaussian rule for `∫_0^1 (1 - t)^p t^q f(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    right_exp: f64,
    left_exp: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    /// Builds the `n`-point rule for weight `(1 - t)^right_exp * t^left_exp`.
    pub fn new(right_exp: f64, left_exp: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
        }
        if !(right_exp > -1.0 && left_exp > -1.0) || !right_exp.is_finite() || !left_exp.is_finite() {
            return Err(Error::Quadrature(format!(
                "weight exponents ({right_exp}, {left_exp}) must exceed -1"
            )));
        }
        let rec = Recurrence::new(right_exp, left_exp, n);
        let mut nodes = golub_welsch_nodes(&rec)?;
        for x in nodes.iter_mut() {
            *x = newton_polish(&rec, *x)?;
        }
        nodes.sort_by(|a, b| a.total_cmp(b));
        let weights: Vec<f64> = nodes.iter().map(|&x| christoffel_weight(&rec, x)).collect();

        for w in nodes.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Quadrature("nodes collapsed during refinement".into()));
            }
        }
        if nodes.first().is_some_and(|&x| x <= 0.0) || nodes.last().is_some_and(|&x| x >= 1.0) {
            return Err(Error::Quadrature("node escaped the open unit interval".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Quadrature("non-positive weight".into()));
        }
        Ok(JacobiRule { right_exp, left_exp, nodes, weights })
    }

    /// Gauss–Legendre on `[0, 1]`.
    pub fn legendre(n: usize) -> Result<Self> {
        Self::new(0.0, 0.0, n)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Exponent of the `(1 - t)` factor.
    pub fn right_exp(&self) -> f64 {
        self.right_exp
    }

    /// Exponent of the `t` factor.
    pub fn left_exp(&self) -> f64 {
        self.left_exp
    }

    /// `Σ w_i f(t_i)`.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Exact value of `∫_0^1 (1 - t)^p t^q dt = B(q + 1, p + 1)`.
    pub fn total_mass(&self) -> f64 {
        beta_fn(self.left_exp + 1.0, self.right_exp + 1.0)
    }
}

pub(crate) fn beta_fn(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Orthonormal recurrence coefficients on `[0, 1]`.
struct Recurrence {
    diag: Vec<f64>,
    /// `off[k]` couples degrees `k` and `k + 1`.
    off: Vec<f64>,
    mass: f64,
}

impl Recurrence {
    fn new(p: f64, q: f64, n: usize) -> Self {
        // Classical monic Jacobi coefficients on [-1, 1] for (1-x)^p (1+x)^q,
        // then mapped through t = (1 + x) / 2.
        let (a, b) = (p, q);
        let s = a + b;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n);
        for k in 0..n {
            let kf = k as f64;
            let ak = if k == 0 {
                (b - a) / (s + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
            };
            diag.push(0.5 * (1.0 + ak));
            let m = kf + 1.0;
            let bk = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + s)
                    / ((2.0 * m + s).powi(2) * (2.0 * m + s + 1.0) * (2.0 * m + s - 1.0))
            };
            off.push(0.5 * bk.sqrt());
        }
        Recurrence { diag, off, mass: beta_fn(q + 1.0, p + 1.0) }
    }

    fn n(&self) -> usize {
        self.diag.len()
    }

    /// Orthonormal `p_n(x)` and its derivative together with `Σ_{k<n} p_k(x)^2`.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.n();
        let mut p_prev = 0.0;
        let mut dp_prev = 0.0;
        let mut p = 1.0 / self.mass.sqrt();
        let mut dp = 0.0;
        let mut sumsq = 0.0;
        for k in 0..n {
            sumsq += p * p;
            let prev_off = if k == 0 { 0.0 } else { self.off[k - 1] };
            let p_next = ((x - self.diag[k]) * p - prev_off * p_prev) / self.off[k];
            let dp_next = (p + (x - self.diag[k]) * dp - prev_off * dp_prev) / self.off[k];
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
        }
        (p, dp, sumsq)
    }
}

fn golub_welsch_nodes(rec: &Recurrence) -> Result<Vec<f64>> {
    let n = rec.n();
    if n == 1 {
        return Ok(vec![rec.diag[0]]);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = rec.diag[k];
        if k + 1 < n {
            m[(k, k + 1)] = rec.off[k];
            m[(k + 1, k)] = rec.off[k];
        }
    }
    let eig = m
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Quadrature("tridiagonal eigen-solve did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

fn newton_polish(rec: &Recurrence, mut x: f64) -> Result<f64> {
    for _ in 0..8 {
        let (p, dp, _) = rec.eval(x);
        if dp == 0.0 || !dp.is_finite() {
            return Err(Error::Quadrature("vanishing derivative in Newton refinement".into()));
        }
        let step = p / dp;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    Ok(x)
}

fn christoffel_weight(rec: &Recurrence, x: f64) -> f64 {
    let (_, _, sumsq) = rec.eval(x);
    1.0 / sumsq
}

/// Thread-safe memo of rules keyed by exponents and order.
#[derive(Debug, Default)]
pub struct RuleCache {
    rules: Mutex<HashMap<(u64, u64, usize), Arc<JacobiRule>>>,
}

impl RuleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, right_exp: f64, left_exp: f64, n: usize) -> Result<Arc<JacobiRule>> {
        let key = (right_exp.to_bits(), left_exp.to_bits(), n);
        if let Some(rule) = self.rules.lock().expect("rule cache poisoned").get(&key) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(JacobiRule::new(right_exp, left_exp, n)?);
        self.rules
            .lock()
            .expect("rule cache poisoned")
            .insert(key, Arc::clone(&rule));
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn single_node_mass() {
        let r = JacobiRule::new(-0.5, 0.0, 1).unwrap();
        assert_eq!(r.order(), 1);
        assert!(rel(r.weights()[0], 2.0) < 1e-14);
    }

    #[test]
    fn monomials_exact_up_to_degree_2n_minus_1() {
        for &(p, q) in &[(-0.5, 0.0), (-0.1, 0.0), (-0.75, 0.0), (-0.9, 0.1), (-0.25, -0.75), (0.5, 0.5), (0.0, 0.0)] {
            for &n in &[1usize, 5, 20, 40] {
                let r = JacobiRule::new(p, q, n).unwrap();
                for k in 0..(2 * n) {
                    let got = r.integrate(|t| t.powi(k as i32));
                    let exact = beta_fn(q + 1.0 + k as f64, p + 1.0);
                    assert!(rel(got, exact) < 1e-12, "p={p} q={q} n={n} k={k}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn nodes_sorted_inside_unit_interval() {
        let r = JacobiRule::new(-0.9, -0.9, 60).unwrap();
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes()[0] > 0.0 && *r.nodes().last().unwrap() < 1.0);
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(JacobiRule::new(-1.0, 0.0, 4).is_err());
        assert!(JacobiRule::new(0.0, 0.0, 0).is_err());
    }

    #[test]
    fn cache_returns_shared_rule() {
        let c = RuleCache::new();
        let a = c.get(-0.5, 0.0, 10).unwrap();
        let b = c.get(-0.5, 0.0, 10).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
