//! Green, Gauss and flat-patch Stokes theorems, both sides computed
//! independently. The boundary sides never touch a derivative.

use crate::core1d::Calculus;
use crate::error::{Error, Result};
use crate::field::{AxisBox, ScalarField};
use crate::report::ResidualReport;
use crate::veccalc::VectorField3;

/// Flat parallelogram in 3-d given by a corner and two edge vectors.
///
/// Only rectangles whose edges run along coordinate axes in the positive
/// direction are supported.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub origin: [f64; 3],
    pub edge_u: [f64; 3],
    pub edge_v: [f64; 3],
}

/// A [`Patch`] resolved to coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisPatch {
    /// In-plane axes; the patch normal is `e_u × e_v`.
    pub axes: [usize; 2],
    pub normal: usize,
    pub offset: f64,
    pub rect: AxisBox,
}

impl Patch {
    pub fn new(origin: [f64; 3], edge_u: [f64; 3], edge_v: [f64; 3]) -> Self {
        Patch { origin, edge_u, edge_v }
    }

    pub fn resolve(&self) -> Result<AxisPatch> {
        let axis_of = |e: &[f64; 3]| -> Result<usize> {
            let nonzero: Vec<usize> = (0..3).filter(|&i| e[i] != 0.0).collect();
            match nonzero.as_slice() {
                [i] if e[*i] > 0.0 => Ok(*i),
                _ => Err(Error::UnsupportedSurface(format!(
                    "edge {e:?} is not a positive coordinate direction"
                ))),
            }
        };
        let (u, v) = (axis_of(&self.edge_u)?, axis_of(&self.edge_v)?);
        if u == v {
            return Err(Error::UnsupportedSurface("patch edges are parallel".into()));
        }
        let normal = 3 - u - v;
        let lo = [self.origin[u], self.origin[v]];
        let hi = [lo[0] + self.edge_u[u], lo[1] + self.edge_v[v]];
        Ok(AxisPatch { axes: [u, v], normal, offset: self.origin[normal], rect: AxisBox::new(&lo, &hi)? })
    }
}

impl Calculus {
    /// `I_∂R[1] f + I_∂R[2] g` against `(1/α!) I_R[D[1] g - D[2] f]`.
    pub fn check_green(&self, f: &ScalarField, g: &ScalarField, bx: &AxisBox) -> Result<ResidualReport> {
        bx.require_dim(2)?;
        for h in [f, g] {
            if h.dim() != 2 {
                return Err(Error::Dimension { expected: 2, got: h.dim() });
            }
        }
        let lhs = self.frac_line_integral_pair(f, g, bx)?;
        let rhs = (self.integral_of_partial(g, bx, 0) - self.integral_of_partial(f, bx, 1)) / self.alpha().factorial();
        Ok(ResidualReport::new(lhs, rhs, format!("green alpha={} box={bx} order={}", self.alpha(), self.order())))
    }

    /// `(I_∂W, F)` against `(1/α!) I_W Div F`.
    pub fn check_gauss(&self, field: &VectorField3, bx: &AxisBox) -> Result<ResidualReport> {
        bx.require_dim(3)?;
        let lhs = self.frac_flux(field, bx)?;
        let rhs = (0..3).map(|i| self.integral_of_partial(field.component(i), bx, i)).sum::<f64>()
            / self.alpha().factorial();
        Ok(ResidualReport::new(lhs, rhs, format!("gauss alpha={} box={bx} order={}", self.alpha(), self.order())))
    }

    /// Stokes on a flat axis-aligned patch, reduced to Green's theorem for
    /// the in-plane components of `field`.
    pub fn check_stokes_planar(&self, field: &VectorField3, patch: &Patch) -> Result<ResidualReport> {
        let p = patch.resolve()?;
        let [u, v] = p.axes;
        let fu = field.component(u).restrict_to_plane(p.normal, p.offset, p.axes);
        let fv = field.component(v).restrict_to_plane(p.normal, p.offset, p.axes);
        let mut r = self.check_green(&fu, &fv, &p.rect)?;
        r.meta = format!(
            "stokes alpha={} plane=x{}={} rect={} order={}",
            self.alpha(),
            p.normal + 1,
            p.offset,
            p.rect,
            self.order()
        );
        Ok(r)
    }

    /// `I^α_R [D^α[axis] f]`, keeping the endpoint power of the inner
    /// derivative inside the outer rule.
    pub(crate) fn integral_of_partial(&self, f: &ScalarField, bx: &AxisBox, axis: usize) -> f64 {
        let (a, b) = (bx.lo()[axis], bx.hi()[axis]);
        let mut gammas = vec![0.0; bx.dim()];
        if !self.is_classical() {
            gammas[axis] = 1.0 - self.a();
        }
        self.volume_integral_with_powers(&|p| self.scaled_partial_at(f, a, b, axis, p), bx, &gammas)
    }
}
