//! Fractional power series c0 + Σ c_i (±x + b_i)^{α_i} with strictly
//! ascending positive exponents, and their velocities in closed form.
//!
//! The exponent set doubles as the local Hölder spectrum: at a point where a
//! base vanishes, the smallest vanishing exponent controls the one-sided
//! regularity, and the velocity at exactly that order is the term's
//! coefficient on the side the base opens toward (0 on the other side).

use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::velocity::{Classification, Side, VelocityEstimate};

/// Global reflection convention: bases are (+x + b) or (−x + b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum SeriesSign {
    Plus,
    Minus,
}

/// One term c · (±x + b)^{alpha}.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesTerm {
    pub c: f64,
    pub b: f64,
    pub alpha: f64,
}

/// Truncated fractional power series.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FractionalPowerSeries {
    c0: f64,
    terms: Vec<SeriesTerm>,
    sign: SeriesSign,
}

/// How close two stored (b, alpha) pairs must be to count as like terms:
/// exact equality, no fuzzy matching, so construction is deterministic.
fn like(a: &SeriesTerm, b: &SeriesTerm) -> bool {
    a.b == b.b && a.alpha == b.alpha
}

impl FractionalPowerSeries {
    /// Builds a series, merging like terms (exactly equal b and alpha),
    /// dropping zero coefficients, and sorting by exponent. Exponents must be
    /// positive, all numbers finite, and after merging no two distinct terms
    /// may share an exponent.
    pub fn new(c0: f64, terms: Vec<SeriesTerm>, sign: SeriesSign) -> Result<Self> {
        if !c0.is_finite() {
            return Err(Error::Param("constant term must be finite".into()));
        }
        let mut merged: Vec<SeriesTerm> = Vec::new();
        for t in terms {
            if !(t.alpha > 0.0) {
                return Err(Error::Param(format!(
                    "exponent must be positive, got {}",
                    t.alpha
                )));
            }
            if !t.c.is_finite() || !t.b.is_finite() || !t.alpha.is_finite() {
                return Err(Error::Param("series terms must be finite".into()));
            }
            if let Some(existing) = merged.iter_mut().find(|e| like(e, &t)) {
                existing.c += t.c;
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| t.c != 0.0);
        merged.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).expect("finite exponents"));
        for w in merged.windows(2) {
            if w[0].alpha == w[1].alpha {
                return Err(Error::Param(format!(
                    "exponents must be strictly ascending; {} appears twice",
                    w[0].alpha
                )));
            }
        }
        Ok(FractionalPowerSeries {
            c0,
            terms: merged,
            sign,
        })
    }

    /// Convenience constructor for a single term c·x^{alpha}.
    pub fn monomial(c: f64, alpha: f64) -> Result<Self> {
        Self::new(0.0, vec![SeriesTerm { c, b: 0.0, alpha }], SeriesSign::Plus)
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    pub fn sign(&self) -> SeriesSign {
        self.sign
    }

    fn base(&self, term: &SeriesTerm, x: f64) -> f64 {
        match self.sign {
            SeriesSign::Plus => x + term.b,
            SeriesSign::Minus => -x + term.b,
        }
    }

    /// Evaluates the series; any negative base is a domain error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut acc = self.c0;
        for t in &self.terms {
            let base = self.base(t, x);
            if base < 0.0 {
                return Err(Error::Domain {
                    x,
                    reason: format!("negative base {base} for exponent {}", t.alpha),
                });
            }
            acc += t.c * base.powf(t.alpha);
        }
        Ok(acc)
    }

    /// The exponent set, ascending.
    pub fn holder_spectrum(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.alpha).collect()
    }

    /// Closed-form β-velocity at x, β ∈ (0, 1).
    ///
    /// The side a vanishing base opens toward is determined by the global
    /// sign: Plus-bases grow forward, Minus-bases grow backward. On the
    /// opening side the classification follows the leading vanishing
    /// exponent α₁ (zero below it, divergent above it, finite at it with
    /// the value the defining quotient converges to: +c forward, −c
    /// backward since the backward increment is f(x) − f(x−ε)); on the
    /// other side, and at points where no base vanishes, the velocity is
    /// finitely zero for every β < 1.
    pub fn closed_form_velocity(&self, x: f64, beta: f64, side: Side) -> Result<VelocityEstimate> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Param(format!(
                "closed form covers orders in (0, 1), got {beta}"
            )));
        }
        // must be inside the evaluation domain
        self.eval(x)?;
        let vanish_tol = 4.0 * f64::EPSILON * (1.0 + x.abs());
        let leading = self
            .terms
            .iter()
            .filter(|t| self.base(t, x).abs() <= vanish_tol)
            .min_by(|a, b| a.alpha.partial_cmp(&b.alpha).expect("finite exponents"));

        let opening = match self.sign {
            SeriesSign::Plus => Side::Forward,
            SeriesSign::Minus => Side::Backward,
        };
        let finite = |value: f64, slope: f64| VelocityEstimate {
            side,
            beta,
            classification: Classification::Finite,
            value,
            fitted_slope: slope,
            residual: 0.0,
            samples: Vec::new(),
        };
        let class = |classification: Classification, slope: f64| VelocityEstimate {
            side,
            beta,
            classification,
            value: 0.0,
            fitted_slope: slope,
            residual: 0.0,
            samples: Vec::new(),
        };
        match leading {
            None => Ok(finite(0.0, 1.0)),
            Some(t) if side != opening => Ok(finite(0.0, t.alpha)),
            Some(t) => {
                if beta < t.alpha {
                    Ok(class(Classification::Zero, t.alpha))
                } else if beta > t.alpha {
                    Ok(class(Classification::Divergent, t.alpha))
                } else {
                    let value = match self.sign {
                        SeriesSign::Plus => t.c,
                        SeriesSign::Minus => -t.c,
                    };
                    Ok(finite(value, t.alpha))
                }
            }
        }
    }

    /// Sum of two series. Signs must agree unless one side has no terms.
    pub fn series_add(&self, other: &FractionalPowerSeries) -> Result<FractionalPowerSeries> {
        let sign = if self.terms.is_empty() {
            other.sign
        } else if other.terms.is_empty() {
            self.sign
        } else if self.sign == other.sign {
            self.sign
        } else {
            return Err(Error::Param(
                "cannot add series with opposite reflection conventions".into(),
            ));
        };
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().copied());
        FractionalPowerSeries::new(self.c0 + other.c0, terms, sign)
    }

    /// Wraps the series as an evaluatable function.
    pub fn to_real_function(&self) -> RealFunction {
        let s = self.clone();
        RealFunction::try_from_fn(move |x| s.eval(x))
    }
}
