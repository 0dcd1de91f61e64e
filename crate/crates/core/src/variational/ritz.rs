//! Direct (Ritz) solution of the two-dimensional problems over a finite
//! span of modes.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{boundary_samples, Nodes, Table, VariationalProblem2D};
use crate::error::{Error, Result};
use crate::field::{AxisBox, FieldFn, ScalarField};

const MODE_BOUNDARY_TOL: f64 = 1e-12;
/// Relative singular-value cutoff of the stationary solve.
const PINV_RCOND: f64 = 1e-10;

/// `w = base + Σ c_m mode_m`.
#[derive(Debug, Clone)]
pub struct RitzAnsatz {
    base: ScalarField,
    modes: Vec<ScalarField>,
    coeffs: Vec<f64>,
}

impl RitzAnsatz {
    /// Modes must vanish on the boundary of `bx`.
    pub fn new(bx: &AxisBox, base: ScalarField, modes: Vec<ScalarField>) -> Result<Self> {
        bx.require_dim(2)?;
        for (m, mode) in modes.iter().enumerate() {
            if let Some(p) = boundary_samples(bx).into_iter().find(|p| mode.eval(p).abs() > MODE_BOUNDARY_TOL) {
                return Err(Error::Admissibility(format!("mode {m} is nonzero at ({}, {})", p[0], p[1])));
            }
        }
        Ok(Self::unconstrained(base, modes))
    }

    /// Ansatz for free-boundary problems; modes are not checked.
    pub fn unconstrained(base: ScalarField, modes: Vec<ScalarField>) -> Self {
        let coeffs = vec![0.0; modes.len()];
        RitzAnsatz { base, modes, coeffs }
    }

    /// `n × n` tensor sine modes, ordered with the `y` index fastest.
    pub fn tensor_sine(bx: &AxisBox, n: usize, base: ScalarField) -> Result<Self> {
        let modes = (1..=n).flat_map(|k| (1..=n).map(move |l| (k, l))).map(|(k, l)| sine_mode(bx, k, l)).collect();
        Self::new(bx, base, modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn base(&self) -> &ScalarField {
        &self.base
    }

    pub fn modes(&self) -> &[ScalarField] {
        &self.modes
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn with_coeffs(mut self, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != self.modes.len() {
            return Err(Error::Dimension { expected: self.modes.len(), got: coeffs.len() });
        }
        self.coeffs = coeffs.to_vec();
        Ok(self)
    }

    /// The represented surface.
    pub fn surface(&self) -> ScalarField {
        self.modes
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0.0)
            .fold(self.base.clone(), |acc, (m, &c)| acc.add(&m.scale(c)))
    }
}

/// `sin(kπ(x - a)/(b - a)) · sin(lπ(y - c)/(d - c))` with analytic partials.
pub fn sine_mode(bx: &AxisBox, k: usize, l: usize) -> ScalarField {
    let (a, c) = (bx.lo()[0], bx.lo()[1]);
    let kx = k as f64 * PI / (bx.hi()[0] - a);
    let ly = l as f64 * PI / (bx.hi()[1] - c);
    let dx: FieldFn = Arc::new(move |p| kx * (kx * (p[0] - a)).cos() * (ly * (p[1] - c)).sin());
    let dy: FieldFn = Arc::new(move |p| ly * (kx * (p[0] - a)).sin() * (ly * (p[1] - c)).cos());
    ScalarField::new(2, move |p| (kx * (p[0] - a)).sin() * (ly * (p[1] - c)).sin()).with_partials(vec![dx, dy])
}

/// Shifted Legendre value and derivative on `[0, 1]`.
fn legendre(n: usize, u: f64) -> (f64, f64) {
    let t = 2.0 * u - 1.0;
    let (mut p0, mut p1) = (1.0, t);
    let (mut d0, mut d1) = (0.0, 1.0);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        (p0, p1, d0, d1) = (p1, p2, d1, d2);
    }
    (p1, 2.0 * d1)
}

/// Tensor Legendre products of total degree `<= degree`, for free-boundary
/// problems.
pub fn legendre_modes(bx: &AxisBox, degree: usize) -> Vec<ScalarField> {
    let (a, c) = (bx.lo()[0], bx.lo()[1]);
    let (wx, wy) = (bx.hi()[0] - a, bx.hi()[1] - c);
    let mut out = Vec::new();
    for total in 0..=degree {
        for i in (0..=total).rev() {
            let j = total - i;
            let uv = move |p: &[f64]| (legendre(i, (p[0] - a) / wx), legendre(j, (p[1] - c) / wy));
            let dx: FieldFn = Arc::new(move |p| {
                let ((_, di), (pj, _)) = uv(p);
                di / wx * pj
            });
            let dy: FieldFn = Arc::new(move |p| {
                let ((pi, _), (_, dj)) = uv(p);
                pi * dj / wy
            });
            out.push(
                ScalarField::new(2, move |p| {
                    let ((pi, _), (pj, _)) = uv(p);
                    pi * pj
                })
                .with_partials(vec![dx, dy]),
            );
        }
    }
    out
}

/// Bilinear-blending (Coons) interpolant of `φ` from the four edges.
/// Analytic partials are carried over when `φ` has them.
pub fn transfinite_base(bx: &AxisBox, phi: &ScalarField) -> ScalarField {
    let (a, c) = (bx.lo()[0], bx.lo()[1]);
    let (b, d) = (bx.hi()[0], bx.hi()[1]);
    let (wx, wy) = (b - a, d - c);
    let f = phi.clone();
    let corners = [f.eval(&[a, c]), f.eval(&[b, c]), f.eval(&[a, d]), f.eval(&[b, d])];
    let g = f.clone();
    let value = move |p: &[f64]| {
        let (x, y) = (p[0], p[1]);
        let (u, v) = ((x - a) / wx, (y - c) / wy);
        (1.0 - u) * g.eval(&[a, y]) + u * g.eval(&[b, y]) + (1.0 - v) * g.eval(&[x, c]) + v * g.eval(&[x, d])
            - ((1.0 - u) * (1.0 - v) * corners[0]
                + u * (1.0 - v) * corners[1]
                + (1.0 - u) * v * corners[2]
                + u * v * corners[3])
    };
    let mut out = ScalarField::new(2, value);
    if let (Some(fx), Some(fy)) = (phi.partial(0).cloned(), phi.partial(1).cloned()) {
        let g = f.clone();
        let dx: FieldFn = Arc::new(move |p| {
            let (x, y) = (p[0], p[1]);
            let v = (y - c) / wy;
            (g.eval(&[b, y]) - g.eval(&[a, y])) / wx + (1.0 - v) * fx(&[x, c]) + v * fx(&[x, d])
                - ((1.0 - v) * (corners[1] - corners[0]) + v * (corners[3] - corners[2])) / wx
        });
        let g = f;
        let dy: FieldFn = Arc::new(move |p| {
            let (x, y) = (p[0], p[1]);
            let u = (x - a) / wx;
            (1.0 - u) * fy(&[a, y]) + u * fy(&[b, y]) + (g.eval(&[x, d]) - g.eval(&[x, c])) / wy
                - ((1.0 - u) * (corners[2] - corners[0]) + u * (corners[3] - corners[1])) / wy
        });
        out = out.with_partials(vec![dx, dy]);
    }
    out
}

/// One optimizer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub value: f64,
    pub grad_norm: f64,
}

/// Outcome of a Ritz solve. A non-converged run still carries its best
/// iterate.
#[derive(Debug, Clone)]
pub struct RitzSolution {
    pub ansatz: RitzAnsatz,
    pub value: f64,
    /// `max_m |dJ/dc_m|` at the returned coefficients.
    pub grad_norm: f64,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

impl RitzSolution {
    pub fn coeffs(&self) -> &[f64] {
        self.ansatz.coeffs()
    }

    pub fn surface(&self) -> ScalarField {
        self.ansatz.surface()
    }
}

/// Node tables of the base and every mode; `J` and its gradient in the
/// coefficients are then cheap.
struct Discrete<'p> {
    prob: &'p VariationalProblem2D,
    nodes: Nodes,
    base: Table,
    modes: Vec<Table>,
}

impl<'p> Discrete<'p> {
    fn new(prob: &'p VariationalProblem2D, ansatz: &RitzAnsatz) -> Result<Self> {
        prob.check_admissible(ansatz.base())?;
        for m in ansatz.modes() {
            prob.check_variation(m)?;
        }
        let nodes = prob.nodes();
        let base = prob.table(&nodes, ansatz.base());
        let modes: Vec<Table> = ansatz.modes().iter().map(|m| prob.table(&nodes, m)).collect();
        let d = Discrete { prob, nodes, base, modes };
        d.check_independent()?;
        Ok(d)
    }

    fn check_independent(&self) -> Result<()> {
        let m = self.modes.len();
        if m == 0 {
            return Ok(());
        }
        let gram = DMatrix::from_fn(m, m, |i, j| {
            (0..self.nodes.len()).map(|k| self.nodes.weight(k) * self.modes[i].v[k] * self.modes[j].v[k]).sum::<f64>()
        });
        let ev = gram.symmetric_eigenvalues();
        let (lo, hi) = (ev.min(), ev.max());
        if !(lo > 1e-13 * hi) {
            return Err(Error::Singular(format!("modes are linearly dependent (Gram eigenvalues {lo:.3e}..{hi:.3e})")));
        }
        Ok(())
    }

    fn table(&self, c: &[f64]) -> Table {
        let mut t = self.base.clone();
        for (tm, &cm) in self.modes.iter().zip(c) {
            t.axpy(cm, tm);
        }
        t
    }

    fn value(&self, c: &[f64]) -> f64 {
        self.prob.functional_from_table(&self.nodes, &self.table(c))
    }

    fn gradient(&self, c: &[f64]) -> DVector<f64> {
        let dl = self.prob.weighted_partials(&self.nodes, &self.table(c));
        DVector::from_iterator(self.modes.len(), self.modes.iter().map(|m| VariationalProblem2D::pair(&dl, m)))
    }

    /// Hessian from gradient differences; exact for quadratic functionals.
    fn hessian(&self, c: &DVector<f64>, g: &DVector<f64>) -> DMatrix<f64> {
        let m = c.len();
        let step = 1e-3 * c.amax().max(1.0);
        let mut h = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut cj = c.clone();
            cj[j] += step;
            h.set_column(j, &((self.gradient(cj.as_slice()) - g) / step));
        }
        (&h + h.transpose()) * 0.5
    }
}

impl VariationalProblem2D {
    /// `dJ/dc_m` for every mode at the given coefficients.
    pub fn mode_gradient(&self, ansatz: &RitzAnsatz) -> Result<Vec<f64>> {
        let d = Discrete::new(self, ansatz)?;
        Ok(d.gradient(ansatz.coeffs()).as_slice().to_vec())
    }

    /// Quasi-Newton (BFGS) descent on `c ↦ J(base + Σ c_m mode_m)`, starting
    /// from the ansatz coefficients, until `max |dJ/dc_m| < tol`.
    pub fn ritz_minimize(&self, ansatz: &RitzAnsatz, tol: f64, max_iters: usize) -> Result<RitzSolution> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        let d = Discrete::new(self, ansatz)?;
        let m = ansatz.len();
        let mut x = DVector::from_column_slice(ansatz.coeffs());
        let mut f = d.value(x.as_slice());
        let mut g = d.gradient(x.as_slice());
        let mut trace = vec![TraceRow { iter: 0, value: f, grad_norm: g.amax() }];
        let mut hinv = DMatrix::<f64>::identity(m, m);
        let mut first = true;
        let mut converged = m == 0 || g.amax() < tol;
        let mut iter = 0;
        while !converged && iter < max_iters {
            iter += 1;
            let mut dir = -(&hinv * &g);
            let mut slope = g.dot(&dir);
            if !(slope < 0.0) {
                hinv = DMatrix::identity(m, m);
                dir = -g.clone();
                slope = -g.norm_squared();
            }
            let Some((xn, fnew, gn)) = line_search(&d, &x, f, &dir, slope) else {
                break;
            };
            let s = &xn - &x;
            let y = &gn - &g;
            let sy = s.dot(&y);
            if sy > 1e-300 {
                if first {
                    hinv *= sy / y.norm_squared();
                    first = false;
                }
                let rho = 1.0 / sy;
                let eye = DMatrix::<f64>::identity(m, m);
                let left = &eye - rho * &s * y.transpose();
                let right = &eye - rho * &y * s.transpose();
                hinv = &left * &hinv * &right + rho * &s * s.transpose();
            }
            (x, f, g) = (xn, fnew, gn);
            trace.push(TraceRow { iter, value: f, grad_norm: g.amax() });
            converged = g.amax() < tol;
        }
        Ok(RitzSolution {
            ansatz: ansatz.clone().with_coeffs(x.as_slice())?,
            value: f,
            grad_norm: g.amax(),
            converged,
            trace,
        })
    }

    /// Stationary point of `J` over the ansatz by Newton steps on
    /// `∇_c J = 0`, with a pseudo-inverse for directions along which `J`
    /// is flat. For a quadratic `J` one step lands on the solution. Saddle
    /// points are accepted.
    pub fn ritz_stationary(&self, ansatz: &RitzAnsatz, tol: f64, max_iters: usize) -> Result<RitzSolution> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        let d = Discrete::new(self, ansatz)?;
        let mut x = DVector::from_column_slice(ansatz.coeffs());
        let mut g = d.gradient(x.as_slice());
        let mut trace = vec![TraceRow { iter: 0, value: d.value(x.as_slice()), grad_norm: g.amax() }];
        let mut converged = ansatz.is_empty() || g.amax() < tol;
        let mut iter = 0;
        while !converged && iter < max_iters {
            iter += 1;
            let h = d.hessian(&x, &g);
            let svd = h.svd(true, true);
            let cutoff = PINV_RCOND * svd.singular_values.max();
            let step = svd.solve(&g, cutoff).map_err(|e| Error::Singular(e.to_string()))?;
            let xn = &x - step;
            let gn = d.gradient(xn.as_slice());
            let stalled = gn.amax() >= g.amax() && iter > 1;
            (x, g) = (xn, gn);
            trace.push(TraceRow { iter, value: d.value(x.as_slice()), grad_norm: g.amax() });
            converged = g.amax() < tol;
            if stalled {
                break;
            }
        }
        Ok(RitzSolution {
            value: d.value(x.as_slice()),
            ansatz: ansatz.clone().with_coeffs(x.as_slice())?,
            grad_norm: g.amax(),
            converged,
            trace,
        })
    }
}

/// Secant step along `dir` (exact for quadratics), safeguarded by Armijo
/// backtracking.
fn line_search(
    d: &Discrete<'_>,
    x: &DVector<f64>,
    f: f64,
    dir: &DVector<f64>,
    slope: f64,
) -> Option<(DVector<f64>, f64, DVector<f64>)> {
    const ARMIJO: f64 = 1e-4;
    let try_step = |t: f64| {
        let xt = x + dir * t;
        let ft = d.value(xt.as_slice());
        (xt, ft)
    };
    let (x1, f1) = try_step(1.0);
    let g1 = d.gradient(x1.as_slice());
    let curvature = g1.dot(dir) - slope;
    let mut best: Option<(DVector<f64>, f64, DVector<f64>)> = None;
    if curvature > 0.0 {
        let ts = -slope / curvature;
        if (ts - 1.0).abs() > 1e-12 {
            let (xs, fs) = try_step(ts);
            if fs <= f + ARMIJO * ts * slope && fs <= f1 {
                let gs = d.gradient(xs.as_slice());
                best = Some((xs, fs, gs));
            }
        }
    }
    if best.is_none() && f1 <= f + ARMIJO * slope {
        best = Some((x1, f1, g1));
    }
    if best.is_none() {
        let mut t = 0.5;
        for _ in 0..50 {
            let (xt, ft) = try_step(t);
            if ft <= f + ARMIJO * t * slope {
                let gt = d.gradient(xt.as_slice());
                best = Some((xt, ft, gt));
                break;
            }
            t *= 0.5;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::super::Lagrangian2D;
    use super::*;
    use crate::core1d::{Alpha, Calculus};
    use crate::field::Polynomial;

    fn calc(a: f64) -> Calculus {
        Calculus::new(Alpha::new(a).unwrap()).with_order(24)
    }

    fn unit() -> AxisBox {
        AxisBox::unit(2).unwrap()
    }

    #[test]
    fn sine_modes_vanish_and_differentiate() {
        let bx = AxisBox::new(&[-1.0, 0.5], &[2.0, 1.5]).unwrap();
        let m = sine_mode(&bx, 2, 3);
        for p in boundary_samples(&bx) {
            assert!(m.eval(&p).abs() < 1e-14);
        }
        let p = [0.3, 0.8];
        let h = 1e-6;
        let fd = (m.eval(&[p[0] + h, p[1]]) - m.eval(&[p[0] - h, p[1]])) / (2.0 * h);
        assert!((m.partial(0).unwrap()(&p) - fd).abs() < 1e-7);
        assert!(RitzAnsatz::new(&bx, ScalarField::constant(2, 0.0), vec![ScalarField::constant(2, 1.0)]).is_err());
    }

    #[test]
    fn legendre_derivatives() {
        let bx = AxisBox::new(&[0.0, -1.0], &[2.0, 1.0]).unwrap();
        let modes = legendre_modes(&bx, 3);
        assert_eq!(modes.len(), 10);
        let p = [0.7, 0.2];
        let h = 1e-6;
        for m in &modes {
            for axis in 0..2 {
                let (mut up, mut dn) = (p, p);
                up[axis] += h;
                dn[axis] -= h;
                let fd = (m.eval(&up) - m.eval(&dn)) / (2.0 * h);
                assert!((m.partial(axis).unwrap()(&p) - fd).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn transfinite_matches_boundary() {
        let bx = AxisBox::new(&[0.0, 0.0], &[1.0, 0.5]).unwrap();
        let phi = Polynomial::new(2, vec![(1.0, [2, 1, 0]), (-3.0, [0, 3, 0]), (1.0, [1, 0, 0])]).to_field();
        let base = transfinite_base(&bx, &phi);
        for p in boundary_samples(&bx) {
            assert!((base.eval(&p) - phi.eval(&p)).abs() < 1e-14);
        }
        // bilinear-blending reproduces polynomials of degree <= 1 in each variable separately
        let bil = Polynomial::new(2, vec![(2.0, [1, 1, 0]), (1.0, [0, 1, 0])]).to_field();
        let b2 = transfinite_base(&bx, &bil);
        let p = [0.3, 0.2];
        assert!((b2.eval(&p) - bil.eval(&p)).abs() < 1e-14);
        assert!((b2.partial(0).unwrap()(&p) - bil.partial(0).unwrap()(&p)).abs() < 1e-14);
        assert!((b2.partial(1).unwrap()(&p) - bil.partial(1).unwrap()(&p)).abs() < 1e-14);
    }

    #[test]
    fn zero_data_gives_zero_minimizer() {
        let prob = VariationalProblem2D::new(Lagrangian2D::dirichlet(), unit(), calc(0.7))
            .unwrap()
            .with_boundary(ScalarField::constant(2, 0.0))
            .unwrap();
        let ansatz = RitzAnsatz::tensor_sine(&unit(), 2, ScalarField::constant(2, 0.0))
            .unwrap()
            .with_coeffs(&[0.3, -0.2, 0.1, 0.5])
            .unwrap();
        let sol = prob.ritz_minimize(&ansatz, 1e-10, 50).unwrap();
        assert!(sol.converged);
        assert!(sol.coeffs().iter().all(|c| c.abs() < 1e-9));
        assert!(sol.value.abs() < 1e-15);
    }

    #[test]
    fn quadratic_converges_quickly() {
        let lag = Lagrangian2D::new(
            |z| 0.5 * (z[3] * z[3] + z[4] * z[4]) - z[0] * z[1] * z[2],
            |z| -z[0] * z[1],
            |z| z[3],
            |z| z[4],
        )
        .unwrap();
        let prob = VariationalProblem2D::new(lag, unit(), calc(0.6))
            .unwrap()
            .with_boundary(ScalarField::constant(2, 0.0))
            .unwrap();
        let ansatz = RitzAnsatz::tensor_sine(&unit(), 3, ScalarField::constant(2, 0.0)).unwrap();
        let sol = prob.ritz_minimize(&ansatz, 1e-10, 9 + 5).unwrap();
        assert!(sol.converged, "{:?}", sol.trace.last());
        let stat = prob.ritz_stationary(&ansatz, 1e-10, 5).unwrap();
        for (a, b) in sol.coeffs().iter().zip(stat.coeffs()) {
            assert!((a - b).abs() < 1e-8);
        }
        for g in prob.mode_gradient(&sol.ansatz).unwrap() {
            assert!(g.abs() < 1e-9);
        }
    }

    #[test]
    fn dependent_modes_are_rejected() {
        let prob = VariationalProblem2D::new(Lagrangian2D::dirichlet(), unit(), calc(0.5)).unwrap();
        let m = sine_mode(&unit(), 1, 1);
        let ansatz = RitzAnsatz::unconstrained(ScalarField::constant(2, 0.0), vec![m.clone(), m.scale(2.0)]);
        assert!(matches!(prob.ritz_minimize(&ansatz, 1e-8, 10), Err(Error::Singular(_))));
    }

    #[test]
    fn empty_ansatz_returns_base() {
        let prob = VariationalProblem2D::new(Lagrangian2D::potential(), unit(), calc(0.5)).unwrap();
        let ansatz = RitzAnsatz::unconstrained(ScalarField::constant(2, 2.0), vec![]);
        let sol = prob.ritz_minimize(&ansatz, 1e-8, 10).unwrap();
        assert!(sol.converged && (sol.value - 2.0).abs() < 1e-13);
    }
}
