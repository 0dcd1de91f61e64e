//! Jumarie fractional calculus on boxes: one-dimensional operators,
//! fractional partial derivatives and box integrals, vector calculus with
//! Green/Gauss/Stokes checks, and the calculus of variations for multiple
//! integrals with a vibrating-string application.
//!
//! ```
//! use fracvar::core1d::{Alpha, Calculus, Function1D, Interval};
//!
//! let calc = Calculus::new(Alpha::new(0.5)?);
//! let t = Function1D::new(|t| t).with_derivative(|_| 1.0);
//! let d = calc.jumarie_derivative(&t, &Interval::new(0.0, 1.0)?, 1.0)?;
//! // D^½ t = t^½ / Γ(3/2)
//! assert!((d - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
//! # Ok::<(), fracvar::Error>(())
//! ```

pub mod chebyshev;
pub mod core1d;
pub mod error;
pub mod field;
pub mod ndops;
pub mod quadrature;
pub mod report;
pub mod string_app;
pub mod theorems;
pub mod variational;
pub mod veccalc;

pub use error::{Error, Result};
pub use report::ResidualReport;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/operators.md")]
    pub struct Operators;
    #[doc = include_str!("../../../book/src/boxes.md")]
    pub struct Boxes;
    #[doc = include_str!("../../../book/src/theorems.md")]
    pub struct Theorems;
    #[doc = include_str!("../../../book/src/variational.md")]
    pub struct Variational;
    #[doc = include_str!("../../../book/src/string.md")]
    pub struct String;
}
