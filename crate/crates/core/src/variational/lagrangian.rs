use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type LagFn<const N: usize> = Arc<dyn Fn(&[f64; N]) -> f64 + Send + Sync>;

/// Sample points used by the construction-time consistency check.
const CHECK_SAMPLES: usize = 12;
const CHECK_TOL: f64 = 1e-6;

/// Lagrangian `L(x_1..x_d, w, p_1..p_d)` with its partials in `w` and in
/// each `p_i`. `N = 2d + 1`.
///
/// Construction compares every supplied partial against a centered
/// difference of `L` at pseudo-random points with coordinates in `[0, 1]`
/// and the remaining arguments in `[-1, 1]`.
#[derive(Clone)]
pub struct Lagrangian<const N: usize> {
    l: LagFn<N>,
    partials: Vec<LagFn<N>>,
}

/// `L(x, y, w, p, q)`.
pub type Lagrangian2D = Lagrangian<5>;
/// `L(x, y, z, w, p, q, r)`.
pub type Lagrangian3D = Lagrangian<7>;

impl<const N: usize> fmt::Debug for Lagrangian<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lagrangian<{N}>")
    }
}

impl<const N: usize> Lagrangian<N> {
    /// Number of independent variables.
    pub const DIM: usize = (N - 1) / 2;

    /// `partials[0] = ∂L/∂w`, `partials[i] = ∂L/∂p_i`.
    pub fn from_parts(l: LagFn<N>, partials: Vec<LagFn<N>>) -> Result<Self> {
        if partials.len() != Self::DIM + 1 {
            return Err(Error::Dimension { expected: Self::DIM + 1, got: partials.len() });
        }
        let lag = Lagrangian { l, partials };
        let err = lag.consistency_error();
        if !(err < CHECK_TOL) {
            return Err(Error::Lagrangian(format!(
                "supplied partials disagree with finite differences (relative error {err:.3e})"
            )));
        }
        Ok(lag)
    }

    #[inline]
    pub fn value(&self, z: &[f64; N]) -> f64 {
        (self.l)(z)
    }

    /// `k = 0` is `∂L/∂w`; `k = i ≥ 1` is `∂L/∂p_i`.
    #[inline]
    pub fn partial(&self, k: usize, z: &[f64; N]) -> f64 {
        (self.partials[k])(z)
    }

    /// Index of the `w` slot in the argument array.
    pub const fn w_slot() -> usize {
        (N - 1) / 2
    }

    /// `-L`, turning a maximization into a minimization.
    pub fn negated(&self) -> Self {
        let l = self.l.clone();
        Lagrangian {
            l: Arc::new(move |z| -l(z)),
            partials: self
                .partials
                .iter()
                .map(|d| {
                    let d = d.clone();
                    Arc::new(move |z: &[f64; N]| -d(z)) as LagFn<N>
                })
                .collect(),
        }
    }

    /// Largest relative gap between a supplied partial and a centered
    /// difference of `L`.
    pub fn consistency_error(&self) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst: f64 = 0.0;
        for _ in 0..CHECK_SAMPLES {
            let mut z = [0.0f64; N];
            for (i, v) in z.iter_mut().enumerate() {
                *v = if i < Self::DIM { rng.random_range(0.0..1.0) } else { rng.random_range(-1.0..1.0) };
            }
            for k in 0..=Self::DIM {
                let slot = Self::w_slot() + k;
                let h = 1e-5 * z[slot].abs().max(1.0);
                let (mut up, mut dn) = (z, z);
                up[slot] += h;
                dn[slot] -= h;
                let fd = (self.value(&up) - self.value(&dn)) / (2.0 * h);
                let d = self.partial(k, &z);
                let err = (d - fd).abs() / 1f64.max(d.abs()).max(fd.abs());
                worst = if err.is_nan() { f64::NAN } else { worst.max(err) };
            }
        }
        worst
    }
}

fn lag<const N: usize>(f: impl Fn(&[f64; N]) -> f64 + Send + Sync + 'static) -> LagFn<N> {
    Arc::new(f)
}

impl Lagrangian<5> {
    pub fn new(
        l: impl Fn(&[f64; 5]) -> f64 + Send + Sync + 'static,
        d3: impl Fn(&[f64; 5]) -> f64 + Send + Sync + 'static,
        d4: impl Fn(&[f64; 5]) -> f64 + Send + Sync + 'static,
        d5: impl Fn(&[f64; 5]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::from_parts(lag(l), vec![lag(d3), lag(d4), lag(d5)])
    }

    /// `½(p² + q²)`.
    pub fn dirichlet() -> Self {
        Self::new(|z| 0.5 * (z[3] * z[3] + z[4] * z[4]), |_| 0.0, |z| z[3], |z| z[4]).expect("consistent")
    }

    /// `w`.
    pub fn potential() -> Self {
        Self::new(|z| z[2], |_| 1.0, |_| 0.0, |_| 0.0).expect("consistent")
    }
}

impl Lagrangian<7> {
    pub fn new(
        l: impl Fn(&[f64; 7]) -> f64 + Send + Sync + 'static,
        d4: impl Fn(&[f64; 7]) -> f64 + Send + Sync + 'static,
        d5: impl Fn(&[f64; 7]) -> f64 + Send + Sync + 'static,
        d6: impl Fn(&[f64; 7]) -> f64 + Send + Sync + 'static,
        d7: impl Fn(&[f64; 7]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::from_parts(lag(l), vec![lag(d4), lag(d5), lag(d6), lag(d7)])
    }

    /// `½(p² + q² + r²)`.
    pub fn dirichlet() -> Self {
        Self::new(
            |z| 0.5 * (z[4] * z[4] + z[5] * z[5] + z[6] * z[6]),
            |_| 0.0,
            |z| z[4],
            |z| z[5],
            |z| z[6],
        )
        .expect("consistent")
    }

    /// `w`.
    pub fn potential() -> Self {
        Self::new(|z| z[3], |_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0).expect("consistent")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistent_lagrangians_build() {
        let l = Lagrangian2D::new(
            |z| z[2].powi(3) + z[0] * z[3] * z[4] + z[4].sin(),
            |z| 3.0 * z[2] * z[2],
            |z| z[0] * z[4],
            |z| z[0] * z[3] + z[4].cos(),
        );
        assert!(l.is_ok());
        assert_eq!(Lagrangian2D::w_slot(), 2);
        assert_eq!(Lagrangian3D::w_slot(), 3);
        assert_eq!(Lagrangian3D::DIM, 3);
    }

    #[test]
    fn wrong_partial_is_rejected() {
        let l = Lagrangian2D::new(|z| z[3] * z[3], |_| 0.0, |z| z[3], |_| 0.0);
        assert!(matches!(l, Err(Error::Lagrangian(_))));
        let nan = Lagrangian2D::new(|_| f64::NAN, |_| 0.0, |_| 0.0, |_| 0.0);
        assert!(nan.is_err());
    }

    #[test]
    fn negation() {
        let l = Lagrangian2D::dirichlet().negated();
        let z = [0.1, 0.2, 0.3, 2.0, -1.0];
        assert_eq!(l.value(&z), -2.5);
        assert_eq!(l.partial(1, &z), -2.0);
    }
}
