//! Fractional velocities, Hölder-exponent classification, and local
//! fractional derivatives, with exact self-affine curve fixtures.
//!
//! The core object is the one-sided difference quotient Δ±f / ε^β. The
//! [`velocity`] module classifies its limit along a geometric schedule of
//! scales as zero, finite, or divergent, and extrapolates the finite value.
//! [`ifs`] evaluates De Rham-type curves exactly at dyadic rationals
//! (arbitrary-precision arithmetic, no iteration error), which gives the
//! estimators something with a known non-trivial Hölder exponent to be
//! checked against. [`lfd`] connects the velocity to Riemann-Liouville
//! integrals and Kolwankar-Gangal derivatives by adaptive quadrature with
//! endpoint-singularity handling, [`langevin`] generates paths driven by a
//! fractional-order noise term, and [`expr`] parses the small expression
//! language used by the command-line tool.
//!
//! ```
//! use fracvel::{Classification, EstimatorSchedule, RealFunction, Side};
//!
//! let f = RealFunction::power(0.5); // x^{1/2} on x > 0, zero elsewhere
//! let est = fracvel::velocity::estimate_velocity(
//!     &f,
//!     0.0,
//!     0.5,
//!     Side::Forward,
//!     &EstimatorSchedule::default(),
//! )
//! .unwrap();
//! assert_eq!(est.classification, Classification::Finite);
//! assert!((est.value - 1.0).abs() < 1e-6);
//! ```
//!
//! The [`acceptance`] module is the library's executable verification
//! suite; the CLI exposes it as `fracvel verify`.

pub mod acceptance;
pub mod dyadic;
pub mod error;
pub mod expr;
pub mod func;
pub mod ifs;
pub mod langevin;
pub mod lfd;
pub mod series;
pub mod special;
pub mod velocity;

mod quad;
mod seq;

pub use dyadic::DyadicRational;
pub use error::{Error, Result};
pub use expr::{parse_function, FunctionExpr};
pub use func::{RealFunction, SingularityHint};
pub use ifs::{DigitSumConvention, Family, IFSSpec, SwapParity, MAX_DEPTH};
pub use langevin::{Oscillation, PathSpec, ScalingCheck};
pub use lfd::{EquivalenceReport, LFDResult, QuadScheme, QuadratureConfig};
pub use series::{FractionalPowerSeries, SeriesSign, SeriesTerm};
pub use velocity::{
    AlgebraRule, Classification, EstimatorSchedule, RuleCheck, Side, VelocityEstimate,
};
