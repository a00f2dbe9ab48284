//! Evaluatable real-valued functions of one real variable.
//!
//! `RealFunction` wraps an arbitrary closure together with an optional
//! endpoint-singularity hint that the quadrature layer uses to pick a
//! regularizing substitution.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Power-law behavior near a point: |f(at + s)| = O(s^{gamma - 1}) as s → 0⁺.
///
/// `gamma > 0` means the singularity is integrable; `gamma = 1` is a bounded
/// endpoint and `gamma > 1` a vanishing one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityHint {
    pub at: f64,
    pub gamma: f64,
}

/// A real function `f: ℝ → ℝ` that may fail outside its domain.
#[derive(Clone)]
pub struct RealFunction {
    f: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    hint: Option<SingularityHint>,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("RealFunction")
            .field("hint", &self.hint)
            .finish_non_exhaustive()
    }
}

impl RealFunction {
    /// Wraps an infallible closure.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(move |x| Ok(f(x))),
            hint: None,
        }
    }

    /// Wraps a closure that may reject arguments with a domain error.
    pub fn try_from_fn(f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            hint: None,
        }
    }

    /// The constant function.
    pub fn constant(c: f64) -> Self {
        Self::from_fn(move |_| c)
    }

    /// x^alpha on x ≥ 0, extended by zero to the left.
    ///
    /// The zero extension makes one-sided difference quotients from the left
    /// well-defined at 0 (they vanish identically).
    pub fn power(alpha: f64) -> Self {
        Self::from_fn(move |x| if x > 0.0 { x.powf(alpha) } else { 0.0 })
            .with_singularity(0.0, 1.0 + alpha)
    }

    /// x^{alpha-1} on x > 0, zero elsewhere.
    ///
    /// The classic fixture on which the fractional fundamental theorem fails:
    /// integrating at order 1-alpha gives a constant, so differentiating at
    /// order alpha returns 0 instead of recovering the function.
    pub fn counterexample_h(alpha: f64) -> Self {
        Self::from_fn(move |x| if x > 0.0 { x.powf(alpha - 1.0) } else { 0.0 })
            .with_singularity(0.0, alpha)
    }

    /// Attaches an endpoint-singularity hint (see [`SingularityHint`]).
    pub fn with_singularity(mut self, at: f64, gamma: f64) -> Self {
        self.hint = Some(SingularityHint { at, gamma });
        self
    }

    /// The attached hint, if any.
    pub fn singularity(&self) -> Option<SingularityHint> {
        self.hint
    }

    /// Evaluates the function; non-finite results become domain errors.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.f)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                x,
                reason: "evaluation produced a non-finite value".into(),
            })
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &RealFunction) -> RealFunction {
        let (f, g) = (self.clone(), other.clone());
        RealFunction::try_from_fn(move |x| Ok(f.eval(x)? + g.eval(x)?))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &RealFunction) -> RealFunction {
        let (f, g) = (self.clone(), other.clone());
        RealFunction::try_from_fn(move |x| Ok(f.eval(x)? * g.eval(x)?))
    }

    /// Pointwise quotient; evaluation fails where the denominator vanishes.
    pub fn div(&self, other: &RealFunction) -> RealFunction {
        let (f, g) = (self.clone(), other.clone());
        RealFunction::try_from_fn(move |x| {
            let d = g.eval(x)?;
            if d == 0.0 {
                return Err(Error::Domain {
                    x,
                    reason: "division by zero".into(),
                });
            }
            Ok(f.eval(x)? / d)
        })
    }

    /// Composition self ∘ inner.
    pub fn compose(&self, inner: &RealFunction) -> RealFunction {
        let (f, g) = (self.clone(), inner.clone());
        RealFunction::try_from_fn(move |x| f.eval(g.eval(x)?))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: f64) -> RealFunction {
        let f = self.clone();
        RealFunction::try_from_fn(move |x| Ok(c * f.eval(x)?))
    }
}
