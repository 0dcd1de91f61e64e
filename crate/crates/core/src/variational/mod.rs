//! Fractional variational functionals on rectangles and parallelepipeds.

mod euler_lagrange;
mod lagrangian;
mod ritz;

pub use euler_lagrange::NaturalBoundaryTraces;
pub use lagrangian::{LagFn, Lagrangian, Lagrangian2D, Lagrangian3D};
pub use ritz::{legendre_modes, sine_mode, transfinite_base, RitzAnsatz, RitzSolution, TraceRow};

use crate::core1d::Calculus;
use crate::error::{Error, Result};
use crate::field::{AxisBox, ScalarField};
use crate::report::ResidualReport;

/// Points per edge used for boundary sampling.
const EDGE_SAMPLES: usize = 17;
const ADMISSIBLE_TOL: f64 = 1e-9;

/// `J(w) = I^α_R L(x, y, w, D^α[1] w, D^α[2] w)` on a rectangle, with
/// optional Dirichlet data `φ` on the boundary.
#[derive(Debug, Clone)]
pub struct VariationalProblem2D {
    lagrangian: Lagrangian2D,
    bx: AxisBox,
    calc: Calculus,
    boundary: Option<ScalarField>,
}

/// Tensor quadrature nodes of `I^α_R` on a rectangle.
#[derive(Debug, Clone)]
pub(crate) struct Nodes {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
}

impl Nodes {
    fn axis(calc: &Calculus, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let al = calc.a();
        let rule = calc.rule(al - 1.0, 0.0);
        let len = hi - lo;
        let scale = al * len.powf(al);
        (
            rule.nodes().iter().map(|s| lo + len * s).collect(),
            rule.weights().iter().map(|w| scale * w).collect(),
        )
    }

    pub fn new(calc: &Calculus, bx: &AxisBox) -> Self {
        let (xs, wx) = Self::axis(calc, bx.lo()[0], bx.hi()[0]);
        let (ys, wy) = Self::axis(calc, bx.lo()[1], bx.hi()[1]);
        Nodes { xs, ys, wx, wy }
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        let ny = self.ys.len();
        [self.xs[k / ny], self.ys[k % ny]]
    }

    pub fn weight(&self, k: usize) -> f64 {
        let ny = self.ys.len();
        self.wx[k / ny] * self.wy[k % ny]
    }
}

/// Value and both fractional partials of a field at every node.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Table {
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl Table {
    pub fn zeros(n: usize) -> Self {
        Table { v: vec![0.0; n], p: vec![0.0; n], q: vec![0.0; n] }
    }

    pub fn axpy(&mut self, c: f64, other: &Table) {
        for (dst, src) in [(&mut self.v, &other.v), (&mut self.p, &other.p), (&mut self.q, &other.q)] {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += c * s);
        }
    }
}

impl VariationalProblem2D {
    /// Free-boundary problem; see [`VariationalProblem2D::with_boundary`].
    pub fn new(lagrangian: Lagrangian2D, bx: AxisBox, calc: Calculus) -> Result<Self> {
        bx.require_dim(2)?;
        Ok(VariationalProblem2D { lagrangian, bx, calc, boundary: None })
    }

    /// Prescribes `w = φ` on the boundary. `φ` is read on the boundary only
    /// and must be continuous around the corners.
    pub fn with_boundary(mut self, phi: ScalarField) -> Result<Self> {
        if phi.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: phi.dim() });
        }
        let eps = 1e-10 * (self.bx.hi()[0] - self.bx.lo()[0]).max(self.bx.hi()[1] - self.bx.lo()[1]);
        for &x in &[self.bx.lo()[0], self.bx.hi()[0]] {
            for &y in &[self.bx.lo()[1], self.bx.hi()[1]] {
                let sx = if x == self.bx.lo()[0] { eps } else { -eps };
                let sy = if y == self.bx.lo()[1] { eps } else { -eps };
                let corner = phi.eval(&[x, y]);
                let along_x = phi.eval(&[x + sx, y]);
                let along_y = phi.eval(&[x, y + sy]);
                if (along_x - corner).abs().max((along_y - corner).abs()) > ADMISSIBLE_TOL {
                    return Err(Error::Admissibility(format!("boundary data discontinuous at corner ({x}, {y})")));
                }
            }
        }
        self.boundary = Some(phi);
        Ok(self)
    }

    pub fn lagrangian(&self) -> &Lagrangian2D {
        &self.lagrangian
    }

    pub fn domain(&self) -> &AxisBox {
        &self.bx
    }

    pub fn calculus(&self) -> &Calculus {
        &self.calc
    }

    pub fn boundary(&self) -> Option<&ScalarField> {
        self.boundary.as_ref()
    }

    /// Same problem at another order or quadrature setting.
    pub fn with_calculus(&self, calc: Calculus) -> Self {
        VariationalProblem2D { calc, ..self.clone() }
    }

    /// Boundary points sampled for admissibility checks.
    pub fn boundary_samples(&self) -> Vec<[f64; 2]> {
        boundary_samples(&self.bx)
    }

    /// Errors unless `w` matches the boundary data at sampled points.
    pub fn check_admissible(&self, w: &ScalarField) -> Result<()> {
        if w.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: w.dim() });
        }
        if let Some(phi) = &self.boundary {
            for p in self.boundary_samples() {
                let (wv, pv) = (w.eval(&p), phi.eval(&p));
                if !((wv - pv).abs() <= ADMISSIBLE_TOL * pv.abs().max(1.0)) {
                    return Err(Error::Admissibility(format!(
                        "w({}, {}) = {wv} but boundary data is {pv}",
                        p[0], p[1]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_variation(&self, h: &ScalarField) -> Result<()> {
        if h.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: h.dim() });
        }
        if self.boundary.is_some() {
            for p in self.boundary_samples() {
                if h.eval(&p).abs() > ADMISSIBLE_TOL {
                    return Err(Error::Admissibility(format!("variation nonzero at ({}, {})", p[0], p[1])));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn nodes(&self) -> Nodes {
        Nodes::new(&self.calc, &self.bx)
    }

    pub(crate) fn table(&self, nodes: &Nodes, w: &ScalarField) -> Table {
        let (lo, hi) = (self.bx.lo(), self.bx.hi());
        let n = nodes.len();
        let mut t = Table::zeros(n);
        for k in 0..n {
            let pt = nodes.point(k);
            t.v[k] = w.eval(&pt);
            t.p[k] = self.calc.partial_at(w, lo[0], hi[0], 0, &pt);
            t.q[k] = self.calc.partial_at(w, lo[1], hi[1], 1, &pt);
        }
        t
    }

    fn args(nodes: &Nodes, t: &Table, k: usize) -> [f64; 5] {
        let [x, y] = nodes.point(k);
        [x, y, t.v[k], t.p[k], t.q[k]]
    }

    pub(crate) fn functional_from_table(&self, nodes: &Nodes, t: &Table) -> f64 {
        (0..nodes.len()).map(|k| nodes.weight(k) * self.lagrangian.value(&Self::args(nodes, t, k))).sum()
    }

    /// `(∂₃L, ∂₄L, ∂₅L)` times the node weight, at every node.
    pub(crate) fn weighted_partials(&self, nodes: &Nodes, t: &Table) -> Table {
        let n = nodes.len();
        let mut out = Table::zeros(n);
        for k in 0..n {
            let z = Self::args(nodes, t, k);
            let wk = nodes.weight(k);
            out.v[k] = wk * self.lagrangian.partial(0, &z);
            out.p[k] = wk * self.lagrangian.partial(1, &z);
            out.q[k] = wk * self.lagrangian.partial(2, &z);
        }
        out
    }

    pub(crate) fn pair(dl: &Table, h: &Table) -> f64 {
        let mut s = 0.0;
        for k in 0..dl.v.len() {
            s += dl.v[k] * h.v[k] + dl.p[k] * h.p[k] + dl.q[k] * h.q[k];
        }
        s
    }

    /// `J(w)`.
    pub fn eval_functional(&self, w: &ScalarField) -> Result<f64> {
        self.check_admissible(w)?;
        let nodes = self.nodes();
        Ok(self.functional_from_table(&nodes, &self.table(&nodes, w)))
    }

    /// First variation `d/dε J(w + εh)` at `ε = 0`.
    pub fn gateaux_derivative(&self, w: &ScalarField, h: &ScalarField) -> Result<f64> {
        self.check_admissible(w)?;
        self.check_variation(h)?;
        let nodes = self.nodes();
        let dl = self.weighted_partials(&nodes, &self.table(&nodes, w));
        Ok(Self::pair(&dl, &self.table(&nodes, h)))
    }
}

pub(crate) fn boundary_samples(bx: &AxisBox) -> Vec<[f64; 2]> {
    let (a, c) = (bx.lo()[0], bx.lo()[1]);
    let (b, d) = (bx.hi()[0], bx.hi()[1]);
    let mut out = Vec::with_capacity(4 * EDGE_SAMPLES);
    for i in 0..EDGE_SAMPLES {
        let u = i as f64 / (EDGE_SAMPLES - 1) as f64;
        let (x, y) = (a + (b - a) * u, c + (d - c) * u);
        out.extend([[x, c], [x, d], [a, y], [b, y]]);
    }
    out
}

fn boundary_samples_3d(bx: &AxisBox) -> Vec<[f64; 3]> {
    let m = 7;
    let mut out = Vec::new();
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        for side in [bx.lo()[k], bx.hi()[k]] {
            for u in 0..m {
                for v in 0..m {
                    let mut p = [0.0; 3];
                    p[k] = side;
                    p[i] = bx.lo()[i] + (bx.hi()[i] - bx.lo()[i]) * u as f64 / (m - 1) as f64;
                    p[j] = bx.lo()[j] + (bx.hi()[j] - bx.lo()[j]) * v as f64 / (m - 1) as f64;
                    out.push(p);
                }
            }
        }
    }
    out
}

/// `L(x, y, z, w, p, q, r)` on a parallelepiped.
#[derive(Debug, Clone)]
pub struct VariationalProblem3D {
    lagrangian: Lagrangian3D,
    bx: AxisBox,
    calc: Calculus,
}

impl VariationalProblem3D {
    pub fn new(lagrangian: Lagrangian3D, bx: AxisBox, calc: Calculus) -> Result<Self> {
        bx.require_dim(3)?;
        Ok(VariationalProblem3D { lagrangian, bx, calc })
    }

    pub fn lagrangian(&self) -> &Lagrangian3D {
        &self.lagrangian
    }

    pub fn domain(&self) -> &AxisBox {
        &self.bx
    }

    pub fn calculus(&self) -> &Calculus {
        &self.calc
    }
}

impl Calculus {
    /// `I^α_R [u · D^α[axis] f]` with the endpoint power of the derivative
    /// kept inside the rule.
    fn integral_against_partial(&self, u: &ScalarField, f: &ScalarField, bx: &AxisBox, axis: usize) -> f64 {
        let (a, b) = (bx.lo()[axis], bx.hi()[axis]);
        let mut gammas = vec![0.0; bx.dim()];
        if !self.is_classical() {
            gammas[axis] = 1.0 - self.a();
        }
        self.volume_integral_with_powers(&|p| u.eval(p) * self.scaled_partial_at(f, a, b, axis, p), bx, &gammas)
    }

    /// Two-dimensional integration by parts for `h = 0` on the boundary:
    /// `I_R[G D[1]h - F D[2]h]` against `-I_R[(D[1]G - D[2]F) h]`.
    pub fn check_lemma_2d(
        &self,
        f: &ScalarField,
        g: &ScalarField,
        h: &ScalarField,
        bx: &AxisBox,
    ) -> Result<ResidualReport> {
        bx.require_dim(2)?;
        for s in [f, g, h] {
            if s.dim() != 2 {
                return Err(Error::Dimension { expected: 2, got: s.dim() });
            }
        }
        if boundary_samples(bx).iter().any(|p| h.eval(p).abs() > ADMISSIBLE_TOL) {
            return Err(Error::Admissibility("h must vanish on the boundary".into()));
        }
        let lhs = self.integral_against_partial(g, h, bx, 0) - self.integral_against_partial(f, h, bx, 1);
        let rhs = -(self.integral_against_partial(h, g, bx, 0) - self.integral_against_partial(h, f, bx, 1));
        Ok(ResidualReport::new(lhs, rhs, format!("lemma2d alpha={} box={bx}", self.alpha())))
    }

    /// Three-dimensional integration by parts for `η = 0` on the boundary:
    /// `I_W[A D[1]η + B D[2]η + C D[3]η]` against
    /// `-I_W[(D[1]A + D[2]B + D[3]C) η]`.
    pub fn check_lemma_3d(&self, coeffs: [&ScalarField; 3], eta: &ScalarField, bx: &AxisBox) -> Result<ResidualReport> {
        bx.require_dim(3)?;
        for s in coeffs.iter().chain([&eta]) {
            if s.dim() != 3 {
                return Err(Error::Dimension { expected: 3, got: s.dim() });
            }
        }
        if boundary_samples_3d(bx).iter().any(|p| eta.eval(p).abs() > ADMISSIBLE_TOL) {
            return Err(Error::Admissibility("eta must vanish on the boundary".into()));
        }
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (i, c) in coeffs.iter().enumerate() {
            lhs += self.integral_against_partial(c, eta, bx, i);
            rhs -= self.integral_against_partial(eta, c, bx, i);
        }
        Ok(ResidualReport::new(lhs, rhs, format!("lemma3d alpha={} box={bx}", self.alpha())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::Alpha;
    use crate::field::Polynomial;

    fn calc(a: f64) -> Calculus {
        Calculus::new(Alpha::new(a).unwrap())
    }

    fn unit() -> AxisBox {
        AxisBox::unit(2).unwrap()
    }

    #[test]
    fn functional_examples() {
        for a in [0.3, 0.5, 1.0] {
            let prob = VariationalProblem2D::new(Lagrangian2D::potential(), unit(), calc(a)).unwrap();
            let j = prob.eval_functional(&ScalarField::constant(2, 1.0)).unwrap();
            assert!((j - 1.0).abs() < 1e-13, "{j}");
        }
        let lp = Lagrangian2D::new(|z| z[3], |_| 0.0, |_| 1.0, |_| 0.0).unwrap();
        let prob = VariationalProblem2D::new(lp, unit(), calc(1.0)).unwrap();
        assert!((prob.eval_functional(&ScalarField::coordinate(2, 0)).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn functional_converges_in_order() {
        let xy = Polynomial::monomial(2, [1, 1, 0]).to_field();
        let j = |n| {
            VariationalProblem2D::new(Lagrangian2D::dirichlet(), unit(), calc(0.5).with_order(n))
                .unwrap()
                .eval_functional(&xy)
                .unwrap()
        };
        assert!((j(40) - j(80)).abs() < 1e-6);
    }

    #[test]
    fn admissibility_is_enforced() {
        let phi = Polynomial::monomial(2, [1, 0, 0]).to_field();
        let prob = VariationalProblem2D::new(Lagrangian2D::dirichlet(), unit(), calc(0.5))
            .unwrap()
            .with_boundary(phi.clone())
            .unwrap();
        assert!(prob.eval_functional(&phi).is_ok());
        assert!(matches!(prob.eval_functional(&ScalarField::constant(2, 0.0)), Err(Error::Admissibility(_))));
        let bump = Polynomial::new(2, vec![(1.0, [1, 1, 0])]).to_field();
        assert!(prob.gateaux_derivative(&phi, &bump).is_err());
        let jump = ScalarField::new(2, |p| if p[0] > 0.0 { 1.0 } else { 0.0 });
        assert!(VariationalProblem2D::new(Lagrangian2D::dirichlet(), unit(), calc(0.5))
            .unwrap()
            .with_boundary(jump)
            .is_err());
    }

    #[test]
    fn gateaux_matches_central_difference() {
        let lag = Lagrangian2D::new(
            |z| 0.5 * (z[3] * z[3] + z[4] * z[4]) + z[2].powi(4) / 4.0 - z[0] * z[2],
            |z| z[2].powi(3) - z[0],
            |z| z[3],
            |z| z[4],
        )
        .unwrap();
        let prob = VariationalProblem2D::new(lag, unit(), calc(0.75)).unwrap();
        let w = Polynomial::new(2, vec![(1.0, [2, 1, 0]), (-0.5, [0, 1, 0]), (0.3, [0, 0, 0])]).to_field();
        let h = Polynomial::new(2, vec![(1.0, [1, 2, 0]), (0.2, [1, 0, 0])]).to_field();
        let eps = 1e-5;
        let fd = (prob.eval_functional(&w.add(&h.scale(eps))).unwrap()
            - prob.eval_functional(&w.add(&h.scale(-eps))).unwrap())
            / (2.0 * eps);
        let g = prob.gateaux_derivative(&w, &h).unwrap();
        assert!((g - fd).abs() / g.abs().max(1.0) < 1e-7, "{g} vs {fd}");
        assert_eq!(prob.gateaux_derivative(&w, &ScalarField::constant(2, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn lemma_holds_classically() {
        let bubble = Polynomial::new(2, vec![(1.0, [1, 1, 0]), (-1.0, [2, 1, 0]), (-1.0, [1, 2, 0]), (1.0, [2, 2, 0])])
            .to_field();
        let f = Polynomial::new(2, vec![(1.0, [0, 2, 0]), (2.0, [1, 0, 0])]).to_field();
        let g = Polynomial::new(2, vec![(1.0, [3, 0, 0]), (-1.0, [1, 1, 0])]).to_field();
        let r = calc(1.0).check_lemma_2d(&f, &g, &bubble, &unit()).unwrap();
        assert!(r.passes(1e-12), "{r}");
        assert!(calc(1.0).check_lemma_2d(&f, &g, &f, &unit()).is_err());
    }
}
