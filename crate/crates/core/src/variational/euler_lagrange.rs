//! Euler–Lagrange residuals.
//!
//! Along the slice through `x` on axis `i`, the composite
//! `g(t) = ∂L(.., D[i] w(t), ..)` sees `D[i] w = (t - a)^β Θ(t)` with
//! `β = 1 - α`. Writing `s = ((t - a)/(x - a))^β`, `g(t) = G(t, s)` with
//! `G` smooth in `t`. `G` is interpolated as a polynomial in `s`, so
//! `g(t) = Σ_k ((t - a)/(x - a))^(kβ) H_k(t)` and every term of `g'` has
//! an explicit endpoint power for the Jacobi rules.

use std::sync::OnceLock;

use nalgebra::SMatrix;

use super::lagrangian::Lagrangian;
use super::{VariationalProblem2D, VariationalProblem3D};
use crate::chebyshev::Chebyshev;
use crate::core1d::{Calculus, DerivTerm};
use crate::error::{Error, Result};
use crate::field::{AxisBox, ScalarField};

const S_COUNT: usize = 5;
const S_NODES: [f64; S_COUNT] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Inverse Vandermonde matrix on `S_NODES`: samples to monomial coefficients.
fn s_inverse() -> &'static SMatrix<f64, S_COUNT, S_COUNT> {
    static INV: OnceLock<SMatrix<f64, S_COUNT, S_COUNT>> = OnceLock::new();
    INV.get_or_init(|| {
        SMatrix::<f64, S_COUNT, S_COUNT>::from_fn(|r, c| S_NODES[r].powi(c as i32))
            .try_inverse()
            .expect("distinct interpolation nodes")
    })
}

impl Calculus {
    /// `D^α g(x)` for `g(t) = G(t, ((t - a)/(x - a))^β)`; `sample(t, out)`
    /// writes `G(t, s_j)` for the five nodes `s_j` in `[0, 1]`.
    pub(crate) fn derivative_of_composite(&self, a: f64, x: f64, sample: &dyn Fn(f64, &mut [f64; S_COUNT])) -> f64 {
        let deg = self.cheb_degree();
        let pts = Chebyshev::points(a, x, deg);
        let mut out = [0.0; S_COUNT];
        if self.is_classical() {
            let vals: Vec<f64> = pts
                .iter()
                .map(|&t| {
                    sample(t, &mut out);
                    out[S_COUNT - 1]
                })
                .collect();
            return Chebyshev::from_values(&vals, a, x).derivative().eval(x);
        }
        let inv = s_inverse();
        let mut coeff_vals = vec![Vec::with_capacity(pts.len()); S_COUNT];
        for &t in &pts {
            sample(t, &mut out);
            let h = inv * nalgebra::SVector::<f64, S_COUNT>::from(out);
            for k in 0..S_COUNT {
                coeff_vals[k].push(h[k]);
            }
        }
        let beta = 1.0 - self.a();
        let len = x - a;
        let hk: Vec<Chebyshev> = coeff_vals.iter().map(|v| Chebyshev::from_values(v, a, x)).collect();
        let dhk: Vec<Chebyshev> = hk.iter().map(Chebyshev::derivative).collect();
        let mut total = 0.0;
        for k in 0..S_COUNT {
            if hk[k].coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            let scale = len.powf(-(k as f64) * beta);
            let smooth = |t: f64| scale * dhk[k].eval(t);
            if k == 0 {
                total += self.derivative_terms(a, x, &[DerivTerm { exponent: 0.0, remainder: &smooth }]);
            } else {
                let kb = k as f64 * beta;
                let lead = |t: f64| kb * scale * hk[k].eval(t);
                total += self.derivative_terms(
                    a,
                    x,
                    &[DerivTerm { exponent: kb - 1.0, remainder: &lead }, DerivTerm { exponent: kb, remainder: &smooth }],
                );
            }
        }
        total
    }

    /// `∂_w L - Σ_i D^α[i] ∂_{p_i} L` at an interior point.
    pub(crate) fn el_residual_generic<const N: usize>(
        &self,
        lag: &Lagrangian<N>,
        bx: &AxisBox,
        w: &ScalarField,
        point: &[f64],
    ) -> Result<f64> {
        let d = Lagrangian::<N>::DIM;
        bx.require_dim(d)?;
        if w.dim() != d {
            return Err(Error::Dimension { expected: d, got: w.dim() });
        }
        bx.check_point(point)?;
        if (0..d).any(|i| !(point[i] > bx.lo()[i] && point[i] < bx.hi()[i])) {
            return Err(Error::InvalidParameter("Euler-Lagrange residual needs an interior point".into()));
        }
        let ws = Lagrangian::<N>::w_slot();
        let args = |p: &[f64], skip: Option<usize>| {
            let mut z = [0.0; N];
            z[..d].copy_from_slice(p);
            z[ws] = w.eval(p);
            for j in 0..d {
                if Some(j) != skip {
                    z[ws + 1 + j] = self.partial_at(w, bx.lo()[j], bx.hi()[j], j, p);
                }
            }
            z
        };
        let mut res = lag.partial(0, &args(point, None));
        let beta = if self.is_classical() { 0.0 } else { 1.0 - self.a() };
        for i in 0..d {
            let (a, b, x) = (bx.lo()[i], bx.hi()[i], point[i]);
            let smax = (x - a).powf(beta);
            let sample = |t: f64, out: &mut [f64; S_COUNT]| {
                let mut p = [0.0; 3];
                p[..d].copy_from_slice(point);
                p[i] = t;
                let p = &p[..d];
                let mut z = args(p, Some(i));
                let theta = self.scaled_partial_at(w, a, b, i, p);
                for (j, o) in out.iter_mut().enumerate() {
                    z[ws + 1 + i] = smax * S_NODES[j] * theta;
                    *o = lag.partial(1 + i, &z);
                }
            };
            res -= self.derivative_of_composite(a, x, &sample);
        }
        Ok(res)
    }
}

impl VariationalProblem2D {
    /// `∂₃L - D^α[1] ∂₄L - D^α[2] ∂₅L` at an interior point.
    pub fn el_residual(&self, w: &ScalarField, point: [f64; 2]) -> Result<f64> {
        self.calculus().el_residual_generic(self.lagrangian(), self.domain(), w, &point)
    }

    /// Largest `|EL residual|` over the `n × n` interior grid.
    pub fn max_el_residual(&self, w: &ScalarField, n: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in self.domain().interior_grid(n) {
            worst = worst.max(self.el_residual(w, [p[0], p[1]])?.abs());
        }
        Ok(worst)
    }

    /// `∂₄L` on `x = a`, `x = b` and `∂₅L` on `y = c`, `y = d`, with fractional
    /// arguments at the lower limits taken as right limits.
    pub fn natural_boundary_residuals(&self, w: &ScalarField, samples: usize) -> Result<NaturalBoundaryTraces> {
        if self.boundary().is_some() {
            return Err(Error::Usage("natural boundary conditions apply to free-boundary problems only".into()));
        }
        if w.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: w.dim() });
        }
        if samples < 2 {
            return Err(Error::InvalidParameter("need at least two samples per edge".into()));
        }
        let bx = self.domain();
        let (a, c) = (bx.lo()[0], bx.lo()[1]);
        let (b, d) = (bx.hi()[0], bx.hi()[1]);
        let calc = self.calculus();
        let eval = |p: [f64; 2], slot: usize| {
            let z = [
                p[0],
                p[1],
                w.eval(&p),
                calc.partial_at(w, a, b, 0, &p),
                calc.partial_at(w, c, d, 1, &p),
            ];
            self.lagrangian().partial(slot, &z)
        };
        let lin = |lo: f64, hi: f64| (0..samples).map(move |k| lo + (hi - lo) * k as f64 / (samples - 1) as f64);
        Ok(NaturalBoundaryTraces {
            left: lin(c, d).map(|y| eval([a, y], 1)).collect(),
            right: lin(c, d).map(|y| eval([b, y], 1)).collect(),
            bottom: lin(a, b).map(|x| eval([x, c], 2)).collect(),
            top: lin(a, b).map(|x| eval([x, d], 2)).collect(),
        })
    }
}

impl VariationalProblem3D {
    /// `∂₄L - D^α[1] ∂₅L - D^α[2] ∂₆L - D^α[3] ∂₇L` at an interior point.
    pub fn el_residual(&self, w: &ScalarField, point: [f64; 3]) -> Result<f64> {
        self.calculus().el_residual_generic(self.lagrangian(), self.domain(), w, &point)
    }
}

/// Natural boundary traces sampled evenly along each edge, corners included.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalBoundaryTraces {
    /// `∂₄L` on `x = a`.
    pub left: Vec<f64>,
    /// `∂₄L` on `x = b`.
    pub right: Vec<f64>,
    /// `∂₅L` on `y = c`.
    pub bottom: Vec<f64>,
    /// `∂₅L` on `y = d`.
    pub top: Vec<f64>,
}

impl NaturalBoundaryTraces {
    pub fn max_abs(&self) -> f64 {
        [&self.left, &self.right, &self.bottom, &self.top]
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}
