//! Chebyshev interpolants used as smooth surrogates of one-dimensional slices.
//!
//! Samples are taken at first-kind Chebyshev points, which never touch the
//! interval ends. That matters for the smooth factors `S(t)` in
//! `(t - a)^β S(t)` representations, whose defining quotient is `0/0` at `a`.

use std::f64::consts::PI;

/// Polynomial interpolant `Σ c_k T_k(u)` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolates `f` at `degree + 1` first-kind points of `[lo, hi]`.
    pub fn fit<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, degree: usize) -> Self {
        let samples: Vec<f64> = Self::points(lo, hi, degree).into_iter().map(f).collect();
        Self::from_values(&samples, lo, hi)
    }

    /// The `degree + 1` first-kind points of `[lo, hi]`, in the order
    /// expected by [`Chebyshev::from_values`].
    pub fn points(lo: f64, hi: f64, degree: usize) -> Vec<f64> {
        let mf = (degree + 1) as f64;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        (0..=degree).map(|j| mid + half * (PI * (j as f64 + 0.5) / mf).cos()).collect()
    }

    /// Interpolant through values sampled at [`Chebyshev::points`].
    pub fn from_values(samples: &[f64], lo: f64, hi: f64) -> Self {
        let m = samples.len();
        let mf = m as f64;
        if samples.iter().all(|&v| v == samples[0]) {
            let mut coeffs = vec![0.0; m];
            coeffs[0] = samples[0];
            return Chebyshev { lo, hi, coeffs };
        }
        let coeffs = (0..m)
            .map(|k| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * (PI * k as f64 * (j as f64 + 0.5) / mf).cos())
                    .sum();
                if k == 0 {
                    s / mf
                } else {
                    2.0 * s / mf
                }
            })
            .collect();
        Chebyshev { lo, hi, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Clenshaw evaluation. Points slightly outside `[lo, hi]` extrapolate.
    pub fn eval(&self, t: f64) -> f64 {
        let u = (2.0 * t - self.lo - self.hi) / (self.hi - self.lo);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + u * b1 - b2
    }

    /// Exact derivative of the interpolant.
    pub fn derivative(&self) -> Chebyshev {
        let n = self.coeffs.len();
        if n == 1 {
            return Chebyshev { lo: self.lo, hi: self.hi, coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let scale = 2.0 / (self.hi - self.lo);
        d.iter_mut().for_each(|c| *c *= scale);
        Chebyshev { lo: self.lo, hi: self.hi, coeffs: d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials() {
        let p = |t: f64| 1.0 - 2.0 * t + 3.0 * t.powi(3) - 0.5 * t.powi(5);
        let dp = |t: f64| -2.0 + 9.0 * t * t - 2.5 * t.powi(4);
        let c = Chebyshev::fit(p, -1.0, 2.0, 8);
        let d = c.derivative();
        for i in 0..=20 {
            let t = -1.0 + 3.0 * i as f64 / 20.0;
            assert!((c.eval(t) - p(t)).abs() < 1e-12);
            assert!((d.eval(t) - dp(t)).abs() < 1e-11);
        }
    }

    #[test]
    fn spectral_on_analytic() {
        let c = Chebyshev::fit(f64::exp, 0.0, 1.0, 32);
        let d = c.derivative();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((c.eval(t) - t.exp()).abs() < 1e-14);
            assert!((d.eval(t) - t.exp()).abs() < 1e-11);
        }
    }

    #[test]
    fn constant_derivative_is_zero() {
        let c = Chebyshev::fit(|_| 4.0, 0.0, 1.0, 0);
        assert_eq!(c.derivative().eval(0.3), 0.0);
    }
}
