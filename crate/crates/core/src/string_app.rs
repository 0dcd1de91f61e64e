//! The fractional vibrating string: action, equation of motion and
//! order sweeps.
//!
//! The action `½ I_R(σ (D_t w)² - τ (D_x w)²)` is stationary, not minimal,
//! at the physical motion, so solves go through
//! [`VariationalProblem2D::ritz_stationary`].

use std::sync::Arc;

use crate::core1d::{Alpha, Calculus, Function1D};
use crate::error::{Error, Result};
use crate::field::{AxisBox, FieldFn, ScalarField};
use crate::variational::{transfinite_base, Lagrangian2D, RitzAnsatz, RitzSolution, TraceRow, VariationalProblem2D};

const END_TOL: f64 = 1e-12;
/// Interior grid side used for the residual column of a sweep.
pub const SWEEP_EL_GRID: usize = 9;

/// String of length `L` under tension `τ` with density `σ(x)`, observed
/// between `t₁` and `t₂` with both end configurations prescribed.
#[derive(Debug, Clone)]
pub struct StringProblem {
    length: f64,
    t1: f64,
    t2: f64,
    sigma: Function1D,
    sigma_const: Option<f64>,
    tau: f64,
    initial: Function1D,
    fin: Function1D,
    calc: Calculus,
}

impl StringProblem {
    pub fn new(
        length: f64,
        (t1, t2): (f64, f64),
        sigma: Function1D,
        tau: f64,
        initial_shape: Function1D,
        final_shape: Function1D,
        calc: Calculus,
    ) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!("string length {length} must be positive")));
        }
        if !(t1 < t2) {
            return Err(Error::InvalidInterval { a: t1, b: t2 });
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tension {tau} must be positive")));
        }
        for k in 0..=32 {
            let x = length * k as f64 / 32.0;
            let s = sigma.eval(x);
            if !(s > 0.0) {
                return Err(Error::InvalidParameter(format!("density sigma({x}) = {s} must be positive")));
            }
        }
        for (name, shape) in [("initial", &initial_shape), ("final", &final_shape)] {
            if shape.eval(0.0).abs() > END_TOL || shape.eval(length).abs() > END_TOL {
                return Err(Error::Admissibility(format!("{name} shape must vanish at both ends")));
            }
        }
        Ok(StringProblem {
            length,
            t1,
            t2,
            sigma,
            sigma_const: None,
            tau,
            initial: initial_shape,
            fin: final_shape,
            calc,
        })
    }

    /// Uniform density `σ`.
    pub fn uniform(
        length: f64,
        window: (f64, f64),
        sigma: f64,
        tau: f64,
        initial_shape: Function1D,
        final_shape: Function1D,
        calc: Calculus,
    ) -> Result<Self> {
        let mut p = Self::new(length, window, Function1D::constant(sigma), tau, initial_shape, final_shape, calc)?;
        p.sigma_const = Some(sigma);
        Ok(p)
    }

    /// `L = 1`, `τ = σ = 1` on `t ∈ [0, ½]` with end shapes taken from
    /// `sin(πx) cos(πt)`.
    pub fn standing_wave(calc: Calculus) -> Self {
        use std::f64::consts::PI;
        let t2 = 0.5;
        let c2 = (PI * t2).cos();
        Self::uniform(
            1.0,
            (0.0, t2),
            1.0,
            1.0,
            Function1D::new(|x| (PI * x).sin()).with_derivative(|x| PI * (PI * x).cos()),
            Function1D::new(move |x| c2 * (PI * x).sin()).with_derivative(move |x| c2 * PI * (PI * x).cos()),
            calc,
        )
        .expect("valid standing wave")
    }

    pub fn with_calculus(&self, calc: Calculus) -> Self {
        StringProblem { calc, ..self.clone() }
    }

    pub fn alpha(&self) -> Alpha {
        self.calc.alpha()
    }

    pub fn calculus(&self) -> &Calculus {
        &self.calc
    }

    pub fn domain(&self) -> AxisBox {
        AxisBox::new(&[0.0, self.t1], &[self.length, self.t2]).expect("validated extents")
    }

    /// `½(σ(x) q² - τ p²)`.
    pub fn lagrangian(&self) -> Lagrangian2D {
        let (s0, s1, s2) = (self.sigma.clone(), self.sigma.clone(), self.tau);
        let tau = self.tau;
        Lagrangian2D::new(
            move |z| 0.5 * (s0.eval(z[0]) * z[4] * z[4] - tau * z[3] * z[3]),
            |_| 0.0,
            move |z| -s2 * z[3],
            move |z| s1.eval(z[0]) * z[4],
        )
        .expect("string Lagrangian is consistent")
    }

    /// Linear-in-time blend of the two end shapes; it matches every edge.
    pub fn boundary_data(&self) -> ScalarField {
        let (t1, span) = (self.t1, self.t2 - self.t1);
        let (u0, u1) = (self.initial.clone(), self.fin.clone());
        let (v0, v1) = (u0.clone(), u1.clone());
        let value = move |p: &[f64]| {
            let s = (p[1] - t1) / span;
            (1.0 - s) * u0.eval(p[0]) + s * u1.eval(p[0])
        };
        let field = ScalarField::new(2, value);
        if !(self.initial.has_derivative() && self.fin.has_derivative()) {
            return field;
        }
        let (d0, d1) = (self.initial.clone(), self.fin.clone());
        let dx: FieldFn = Arc::new(move |p| {
            let s = (p[1] - t1) / span;
            (1.0 - s) * d0.deriv(p[0]).unwrap_or(0.0) + s * d1.deriv(p[0]).unwrap_or(0.0)
        });
        let dt: FieldFn = Arc::new(move |p| (v1.eval(p[0]) - v0.eval(p[0])) / span);
        field.with_partials(vec![dx, dt])
    }

    pub fn problem(&self) -> VariationalProblem2D {
        VariationalProblem2D::new(self.lagrangian(), self.domain(), self.calc.clone())
            .and_then(|p| p.with_boundary(self.boundary_data()))
            .expect("string boundary data is admissible")
    }

    /// Transfinite base plus `n × n` tensor sine modes.
    pub fn ansatz(&self, n: usize) -> RitzAnsatz {
        let bx = self.domain();
        let base = transfinite_base(&bx, &self.boundary_data());
        RitzAnsatz::tensor_sine(&bx, n, base).expect("sine modes vanish on the boundary")
    }

    /// Fractional action of `w`.
    pub fn string_action(&self, w: &ScalarField) -> Result<f64> {
        self.problem().eval_functional(w)
    }

    /// `τ D_x D_x w - σ D_t D_t w` for uniform density.
    pub fn string_eom_residual(&self, w: &ScalarField, point: [f64; 2]) -> Result<f64> {
        let sigma = self
            .sigma_const
            .ok_or_else(|| Error::InvalidParameter("equation of motion needs uniform density".into()))?;
        let bx = self.domain();
        if !(point[0] > 0.0 && point[0] < self.length && point[1] > self.t1 && point[1] < self.t2) {
            return Err(Error::InvalidParameter("equation of motion needs an interior point".into()));
        }
        let dx = self.calc.frac_partial_field(w, &bx, 0)?;
        let dt = self.calc.frac_partial_field(w, &bx, 1)?;
        Ok(self.tau * self.calc.frac_partial(&dx, &bx, 0, &point)?
            - sigma * self.calc.frac_partial(&dt, &bx, 1, &point)?)
    }

    /// Stationary point of the action over `ansatz`.
    pub fn solve(&self, ansatz: &RitzAnsatz, tol: f64) -> Result<RitzSolution> {
        self.problem().ritz_stationary(ansatz, tol, 20)
    }
}

/// One row of an order sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub action: f64,
    pub max_el_residual: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub coeffs: Vec<f64>,
    pub trace: Vec<TraceRow>,
    /// Failure reported for this order, if any; the sweep carries on.
    pub error: Option<String>,
}

/// Solves `template` at every order in `alphas`. Order `1` uses the
/// classical operators.
pub fn alpha_sweep(template: &StringProblem, alphas: &[Alpha], ansatz: &RitzAnsatz, tol: f64) -> Vec<SweepRow> {
    alphas
        .iter()
        .map(|&alpha| {
            let prob = template.with_calculus(template.calculus().at_alpha(alpha));
            let run = || -> Result<SweepRow> {
                let sol = prob.solve(ansatz, tol)?;
                let resid = if ansatz.is_empty() {
                    0.0
                } else {
                    prob.problem().max_el_residual(&sol.surface(), SWEEP_EL_GRID)?
                };
                Ok(SweepRow {
                    alpha: alpha.value(),
                    action: sol.value,
                    max_el_residual: resid,
                    grad_norm: sol.grad_norm,
                    converged: sol.converged,
                    coeffs: sol.coeffs().to_vec(),
                    trace: sol.trace.clone(),
                    error: None,
                })
            };
            run().unwrap_or_else(|e| SweepRow {
                alpha: alpha.value(),
                action: f64::NAN,
                max_el_residual: f64::NAN,
                grad_norm: f64::NAN,
                converged: false,
                coeffs: Vec::new(),
                trace: Vec::new(),
                error: Some(e.to_string()),
            })
        })
        .collect()
}

/// `w` sampled on an `nx × nt` lattice covering the closed domain, as
/// `(x, t, w)` rows with `t` fastest.
pub fn solution_grid(w: &ScalarField, bx: &AxisBox, nx: usize, nt: usize) -> Vec<[f64; 3]> {
    let lin = |lo: f64, hi: f64, n: usize, k: usize| if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(nx * nt);
    for i in 0..nx {
        let x = lin(bx.lo()[0], bx.hi()[0], nx, i);
        for j in 0..nt {
            let t = lin(bx.lo()[1], bx.hi()[1], nt, j);
            out.push([x, t, w.eval(&[x, t])]);
        }
    }
    out
}
