//! Fractional gradient, divergence and curl on a parallelepiped.
//!
//! Every operator depends on the box through the lower corner, which is the
//! lower limit of each slice derivative.

use std::fmt;
use std::str::FromStr;

use crate::core1d::Calculus;
use crate::error::{Error, Result};
use crate::field::{AxisBox, ScalarField};
use crate::ndops::FacePair;
use crate::report::ResidualReport;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

/// `F = [F_x, F_y, F_z]`, each component a 3-d field.
#[derive(Debug, Clone)]
pub struct VectorField3 {
    components: [ScalarField; 3],
}

impl VectorField3 {
    pub fn new(fx: ScalarField, fy: ScalarField, fz: ScalarField) -> Result<Self> {
        for c in [&fx, &fy, &fz] {
            if c.dim() != 3 {
                return Err(Error::Dimension { expected: 3, got: c.dim() });
            }
        }
        Ok(VectorField3 { components: [fx, fy, fz] })
    }

    pub fn constant(c: [f64; 3]) -> Self {
        VectorField3 { components: c.map(|v| ScalarField::constant(3, v)) }
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn eval(&self, p: &[f64]) -> Vec3 {
        Vec3::new(self.components[0].eval(p), self.components[1].eval(p), self.components[2].eval(p))
    }

    /// `f F`.
    pub fn scaled_by(&self, f: &ScalarField) -> VectorField3 {
        VectorField3 { components: [0, 1, 2].map(|i| f.mul(&self.components[i])) }
    }
}

/// The relations checked by [`Calculus::check_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `Div(fF) = f Div F + F · Grad f`
    ProductDivergence,
    /// `Curl(Grad f) = 0`
    CurlGrad,
    /// `Div(Curl F) = 0`
    DivCurl,
    /// `Grad(fg) = g Grad f + f Grad g`
    ProductGradient,
    /// `Div(Grad f) = Σ D[i] D[i] f`
    DivGrad,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::ProductDivergence,
        Identity::CurlGrad,
        Identity::DivCurl,
        Identity::ProductGradient,
        Identity::DivGrad,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Identity::ProductDivergence => "i",
            Identity::CurlGrad => "ii",
            Identity::DivCurl => "iii",
            Identity::ProductGradient => "iv",
            Identity::DivGrad => "v",
        }
    }

    /// Relations that hold for every smooth input, as opposed to the
    /// product rules, which inherit the one-dimensional Leibniz rule.
    pub fn is_structural(self) -> bool {
        matches!(self, Identity::CurlGrad | Identity::DivCurl | Identity::DivGrad)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|id| id.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown identity {s:?}, expected one of i, ii, iii, iv, v")))
    }
}

/// Inputs of an identity check; each identity reads the ones it needs.
#[derive(Debug, Clone)]
pub struct IdentityInputs {
    pub f: ScalarField,
    pub g: ScalarField,
    pub field: VectorField3,
}

impl Calculus {
    pub fn frac_grad(&self, f: &ScalarField, bx: &AxisBox, p: &[f64]) -> Result<Vec3> {
        bx.require_dim(3)?;
        Ok(Vec3::new(
            self.frac_partial(f, bx, 0, p)?,
            self.frac_partial(f, bx, 1, p)?,
            self.frac_partial(f, bx, 2, p)?,
        ))
    }

    pub fn frac_div(&self, field: &VectorField3, bx: &AxisBox, p: &[f64]) -> Result<f64> {
        bx.require_dim(3)?;
        let mut s = 0.0;
        for i in 0..3 {
            s += self.frac_partial(field.component(i), bx, i, p)?;
        }
        Ok(s)
    }

    pub fn frac_curl(&self, field: &VectorField3, bx: &AxisBox, p: &[f64]) -> Result<Vec3> {
        bx.require_dim(3)?;
        let d = |comp: usize, axis: usize| self.frac_partial(field.component(comp), bx, axis, p);
        Ok(Vec3::new(d(2, 1)? - d(1, 2)?, d(0, 2)? - d(2, 0)?, d(1, 0)? - d(0, 1)?))
    }

    /// `(I_∂W, F) = I[2,3] F_x + I[1,3] F_y + I[1,2] F_z`.
    pub fn frac_flux(&self, field: &VectorField3, bx: &AxisBox) -> Result<f64> {
        Ok(self.frac_surface_integral_3d(field.component(0), bx, FacePair::YZ)?
            + self.frac_surface_integral_3d(field.component(1), bx, FacePair::XZ)?
            + self.frac_surface_integral_3d(field.component(2), bx, FacePair::XY)?)
    }

    pub fn frac_grad_field(&self, f: &ScalarField, bx: &AxisBox) -> Result<VectorField3> {
        bx.require_dim(3)?;
        VectorField3::new(
            self.frac_partial_field(f, bx, 0)?,
            self.frac_partial_field(f, bx, 1)?,
            self.frac_partial_field(f, bx, 2)?,
        )
    }

    pub fn frac_curl_field(&self, field: &VectorField3, bx: &AxisBox) -> Result<VectorField3> {
        bx.require_dim(3)?;
        let d = |comp: usize, axis: usize| self.frac_partial_field(field.component(comp), bx, axis);
        VectorField3::new(d(2, 1)?.sub(&d(1, 2)?), d(0, 2)?.sub(&d(2, 0)?), d(1, 0)?.sub(&d(0, 1)?))
    }

    /// Evaluates both sides of `which` at every point and returns the worst
    /// component residual.
    pub fn check_identity(
        &self,
        which: Identity,
        inputs: &IdentityInputs,
        bx: &AxisBox,
        points: &[[f64; 3]],
    ) -> Result<ResidualReport> {
        bx.require_dim(3)?;
        if points.is_empty() {
            return Err(Error::InvalidParameter("identity check needs sample points".into()));
        }
        let IdentityInputs { f, g, field } = inputs;
        let mut worst: Option<(f64, f64)> = None;
        let mut keep = |lhs: f64, rhs: f64| {
            if worst.is_none_or(|(l, r)| (lhs - rhs).abs() > (l - r).abs() || (lhs - rhs).is_nan()) {
                worst = Some((lhs, rhs));
            }
        };
        match which {
            Identity::ProductDivergence => {
                let ff = field.scaled_by(f);
                for p in points {
                    let lhs = self.frac_div(&ff, bx, p)?;
                    let rhs = f.eval(p) * self.frac_div(field, bx, p)? + field.eval(p).dot(self.frac_grad(f, bx, p)?);
                    keep(lhs, rhs);
                }
            }
            Identity::CurlGrad => {
                let grad = self.frac_grad_field(f, bx)?;
                for p in points {
                    for v in self.frac_curl(&grad, bx, p)?.to_array() {
                        keep(v, 0.0);
                    }
                }
            }
            Identity::DivCurl => {
                let curl = self.frac_curl_field(field, bx)?;
                for p in points {
                    keep(self.frac_div(&curl, bx, p)?, 0.0);
                }
            }
            Identity::ProductGradient => {
                let fg = f.mul(g);
                for p in points {
                    let lhs = self.frac_grad(&fg, bx, p)?.to_array();
                    let gf = self.frac_grad(f, bx, p)?.to_array();
                    let gg = self.frac_grad(g, bx, p)?.to_array();
                    let (fv, gv) = (f.eval(p), g.eval(p));
                    for i in 0..3 {
                        keep(lhs[i], gv * gf[i] + fv * gg[i]);
                    }
                }
            }
            Identity::DivGrad => {
                let grad = self.frac_grad_field(f, bx)?;
                for p in points {
                    let lhs = self.frac_div(&grad, bx, p)?;
                    let mut rhs = 0.0;
                    for i in 0..3 {
                        let inner = self.frac_partial_field(f, bx, i)?;
                        rhs += self.frac_partial(&inner, bx, i, p)?;
                    }
                    keep(lhs, rhs);
                }
            }
        }
        let (lhs, rhs) = worst.expect("points is nonempty");
        Ok(ResidualReport::new(
            lhs,
            rhs,
            format!("identity ({which}) alpha={} box={bx} points={}", self.alpha(), points.len()),
        ))
    }
}

/// The `n × n × n` interior grid of a box as fixed-size points.
pub fn interior_points(bx: &AxisBox, n: usize) -> Vec<[f64; 3]> {
    bx.interior_grid(n).into_iter().map(|p| [p[0], p[1], p[2]]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::Alpha;
    use crate::field::Polynomial;
    use statrs::function::gamma::gamma;

    fn calc(a: f64) -> Calculus {
        Calculus::new(Alpha::new(a).unwrap())
    }

    fn poly(terms: Vec<(f64, [u32; 3])>) -> ScalarField {
        Polynomial::new(3, terms).to_field()
    }

    #[test]
    fn grad_examples() {
        let c = calc(0.5);
        let bx = AxisBox::unit(3).unwrap();
        let f = poly(vec![(1.0, [1, 0, 0]), (1.0, [0, 1, 0]), (1.0, [0, 0, 1])]);
        let g = c.frac_grad(&f, &bx, &[1.0, 1.0, 1.0]).unwrap();
        for v in g.to_array() {
            assert!((v - 1.0 / gamma(1.5)).abs() < 1e-13);
        }
        let k = ScalarField::constant(3, 2.5);
        assert_eq!(c.frac_grad(&k, &bx, &[0.3, 0.2, 0.9]).unwrap(), Vec3::default());
    }

    #[test]
    fn div_examples() {
        let bx = AxisBox::unit(3).unwrap();
        let id = VectorField3::new(
            ScalarField::coordinate(3, 0),
            ScalarField::coordinate(3, 1),
            ScalarField::coordinate(3, 2),
        )
        .unwrap();
        let d = calc(0.5).frac_div(&id, &bx, &[1.0, 1.0, 1.0]).unwrap();
        assert!((d - 3.0 / gamma(1.5)).abs() < 1e-12);
        let f = VectorField3::new(
            poly(vec![(1.0, [1, 0, 0])]),
            poly(vec![(1.0, [0, 2, 0])]),
            poly(vec![(1.0, [0, 0, 3])]),
        )
        .unwrap();
        assert!((calc(1.0).frac_div(&f, &bx, &[1.0, 1.0, 1.0]).unwrap() - 6.0).abs() < 1e-13);
        assert_eq!(calc(0.3).frac_div(&VectorField3::constant([1.0, 2.0, 3.0]), &bx, &[0.5; 3]).unwrap(), 0.0);
    }

    #[test]
    fn curl_examples() {
        let bx = AxisBox::new(&[-1.0; 3], &[1.0; 3]).unwrap();
        let rot = VectorField3::new(
            poly(vec![(-1.0, [0, 1, 0])]),
            poly(vec![(1.0, [1, 0, 0])]),
            ScalarField::constant(3, 0.0),
        )
        .unwrap();
        let c = calc(1.0).frac_curl(&rot, &bx, &[0.2, -0.4, 0.7]).unwrap();
        assert_eq!(c, Vec3::new(0.0, 0.0, 2.0));

        let unit = AxisBox::unit(3).unwrap();
        let f = VectorField3::new(ScalarField::constant(3, 0.0), ScalarField::constant(3, 0.0), poly(vec![(1.0, [1, 1, 0])]))
            .unwrap();
        let c = calc(0.5).frac_curl(&f, &unit, &[1.0; 3]).unwrap();
        let k = 1.0 / gamma(1.5);
        assert!((c.x - k).abs() < 1e-13 && (c.y + k).abs() < 1e-13 && c.z == 0.0);
    }

    #[test]
    fn flux_examples() {
        let bx = AxisBox::unit(3).unwrap();
        let x = VectorField3::new(ScalarField::coordinate(3, 0), ScalarField::constant(3, 0.0), ScalarField::constant(3, 0.0))
            .unwrap();
        assert!((calc(0.5).frac_flux(&x, &bx).unwrap() - 1.0).abs() < 1e-13);
        let id = VectorField3::new(
            ScalarField::coordinate(3, 0),
            ScalarField::coordinate(3, 1),
            ScalarField::coordinate(3, 2),
        )
        .unwrap();
        assert!((calc(1.0).frac_flux(&id, &bx).unwrap() - 3.0).abs() < 1e-13);
        assert_eq!(calc(0.7).frac_flux(&VectorField3::constant([4.0, 5.0, 6.0]), &bx).unwrap(), 0.0);
    }

    #[test]
    fn curl_grad_vanishes() {
        let bx = AxisBox::unit(3).unwrap();
        let f = poly(vec![(1.0, [1, 1, 1])]);
        let inputs = IdentityInputs { f: f.clone(), g: f, field: VectorField3::constant([0.0; 3]) };
        let r = calc(0.5).check_identity(Identity::CurlGrad, &inputs, &bx, &interior_points(&bx, 3)).unwrap();
        assert!(r.abs_residual < 1e-5, "{r}");
    }

    #[test]
    fn product_rules_with_constant_factor() {
        let bx = AxisBox::unit(3).unwrap();
        let field = VectorField3::new(
            poly(vec![(1.0, [2, 1, 0])]),
            poly(vec![(1.0, [0, 1, 2])]),
            poly(vec![(-2.0, [1, 0, 1])]),
        )
        .unwrap();
        let inputs = IdentityInputs { f: ScalarField::constant(3, 1.0), g: poly(vec![(1.0, [1, 2, 0])]), field };
        let c = calc(0.5);
        let pts = interior_points(&bx, 2);
        assert!(c.check_identity(Identity::ProductDivergence, &inputs, &bx, &pts).unwrap().abs_residual < 1e-12);
        assert!(c.check_identity(Identity::ProductGradient, &inputs, &bx, &pts).unwrap().abs_residual < 1e-12);
    }

    #[test]
    fn region_dependence() {
        let f = poly(vec![(1.0, [2, 0, 0])]);
        let c = calc(0.5);
        let p = [0.5, 0.5, 0.5];
        let g0 = c.frac_grad(&f, &AxisBox::unit(3).unwrap(), &p).unwrap();
        let g1 = c.frac_grad(&f, &AxisBox::new(&[-1.0, 0.0, 0.0], &[1.0; 3]).unwrap(), &p).unwrap();
        assert!((g0.x - g1.x).abs() > 1e-3);
    }

    #[test]
    fn identity_labels_round_trip() {
        for id in Identity::ALL {
            assert_eq!(id.label().parse::<Identity>().unwrap(), id);
        }
        assert!("vi".parse::<Identity>().is_err());
    }
}
