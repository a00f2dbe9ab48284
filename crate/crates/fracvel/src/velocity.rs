//! Difference-quotient machinery: one-sided differences, oscillation,
//! fractional variation, velocity estimation with order classification,
//! scale velocity, and the algebra of finite fractional velocities.
//!
//! The central object is [`estimate_velocity`]: it samples the variation
//! Δ±f(x)/ε^β along a geometric schedule ε_n, fits the decay exponent of the
//! increments, and classifies the β-velocity as zero, finite (with an
//! accelerated limit value), divergent, or inconclusive.

use std::fmt;

use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::seq;

/// Direction of the one-sided increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Side {
    Forward,
    Backward,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Forward => "forward",
            Side::Backward => "backward",
        })
    }
}

/// Outcome of a limit classification.
///
/// `Finite` means the quotient stabilized to a value (possibly 0 when the
/// increments vanish identically); `Zero`/`Divergent` mean the quotient
/// provably drifts to 0/∞ because the increments decay at the wrong rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Classification {
    Zero,
    Finite,
    Divergent,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Zero => "zero",
            Classification::Finite => "finite",
            Classification::Divergent => "divergent",
            Classification::Inconclusive => "inconclusive",
        })
    }
}

/// Geometric sampling schedule ε_n = eps0 · ratio^n, n = 0..levels, plus the
/// two tolerances of the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorSchedule {
    pub eps0: f64,
    pub ratio: f64,
    pub levels: u32,
    /// Half-width of the band around β within which the fitted increment
    /// exponent is considered compatible with a finite quotient.
    pub zero_band: f64,
    /// Maximum gap between the last two accelerated quotients for the limit
    /// to count as stabilized.
    pub value_tol: f64,
}

impl Default for EstimatorSchedule {
    fn default() -> Self {
        EstimatorSchedule {
            eps0: 0.0625,
            ratio: 0.5,
            levels: 40,
            zero_band: 0.05,
            value_tol: 1e-4,
        }
    }
}

impl EstimatorSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0 <= 1.0) {
            return Err(Error::Param(format!(
                "eps0 must lie in (0, 1], got {}",
                self.eps0
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Param(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if !(2..=60).contains(&self.levels) {
            return Err(Error::Param(format!(
                "levels must lie in [2, 60], got {}",
                self.levels
            )));
        }
        if !(self.zero_band > 0.0) || !(self.value_tol > 0.0) {
            return Err(Error::Param(
                "zero_band and value_tol must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn eps(&self, n: u32) -> f64 {
        self.eps0 * self.ratio.powi(n as i32)
    }
}

/// Result of a velocity (or velocity-like limit) estimation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VelocityEstimate {
    pub side: Side,
    pub beta: f64,
    pub classification: Classification,
    /// Extrapolated limit; meaningful only when `classification` is finite.
    pub value: f64,
    /// Fitted decay exponent of the raw increments (∞ when they vanish
    /// identically, NaN when there were too few usable samples to fit).
    pub fitted_slope: f64,
    /// Gap between the last two accelerated quotients.
    pub residual: f64,
    /// (ε_n, variation value) pairs actually sampled.
    pub samples: Vec<(f64, f64)>,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Param(format!("order must lie in (0, 1], got {beta}")));
    }
    Ok(())
}

fn check_positive(v: f64, name: &str) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::Param(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// One-sided difference: forward f(x+ε) − f(x), backward f(x) − f(x−ε).
pub fn delta(f: &RealFunction, x: f64, eps: f64, side: Side) -> Result<f64> {
    check_positive(eps, "eps")?;
    match side {
        Side::Forward => Ok(f.eval(x + eps)? - f.eval(x)?),
        Side::Backward => Ok(f.eval(x)? - f.eval(x - eps)?),
    }
}

/// Fractional variation Δ±f(x)/ε^β at a single scale.
pub fn frac_variation(f: &RealFunction, x: f64, eps: f64, beta: f64, side: Side) -> Result<f64> {
    check_beta(beta)?;
    Ok(delta(f, x, eps, side)? / eps.powf(beta))
}

/// Oscillation sup−inf of f over the one-sided interval of radius ε, sampled
/// on a dyadic grid of 2^grid_density + 1 points. Exact for monotone f; a
/// lower bound on the true oscillation otherwise.
pub fn oscillation(
    f: &RealFunction,
    x: f64,
    eps: f64,
    side: Side,
    grid_density: u32,
) -> Result<f64> {
    check_positive(eps, "eps")?;
    if !(1..=24).contains(&grid_density) {
        return Err(Error::Param(format!(
            "grid_density must lie in [1, 24], got {grid_density}"
        )));
    }
    let (lo, hi) = match side {
        Side::Forward => (x, x + eps),
        Side::Backward => (x - eps, x),
    };
    let n = (1usize << grid_density) + 1;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for i in 0..n {
        let t = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
        let v = f.eval(t)?;
        min = min.min(v);
        max = max.max(v);
    }
    Ok(max - min)
}

/// Noise floor for increments of f near x: a small multiple of the rounding
/// error of the function values entering the differences.
pub(crate) fn increment_noise_floor(fx: f64, far: f64) -> f64 {
    64.0 * f64::EPSILON * fx.abs().max(far.abs()).max(1.0)
}

pub(crate) fn build_estimate(
    side: Side,
    beta: f64,
    c: seq::Classified,
    samples: Vec<(f64, f64)>,
) -> VelocityEstimate {
    VelocityEstimate {
        side,
        beta,
        classification: c.classification,
        value: c.value,
        fitted_slope: c.fitted_slope,
        residual: c.residual,
        samples,
    }
}

/// Estimates the β-velocity of f at x on one side along the schedule.
///
/// Samples the increments at ε_n, fits their decay exponent, and classifies;
/// a finite classification carries the Aitken-accelerated quotient as value.
/// The sign of the increments is preserved in the value.
pub fn estimate_velocity(
    f: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
) -> Result<VelocityEstimate> {
    sched.validate()?;
    check_beta(beta)?;
    let fx = f.eval(x)?;
    let mut increments = Vec::with_capacity(sched.levels as usize);
    let mut far = 0.0f64;
    for n in 0..sched.levels {
        let eps = sched.eps(n);
        let other = match side {
            Side::Forward => f.eval(x + eps)?,
            Side::Backward => f.eval(x - eps)?,
        };
        if n == 0 {
            far = other;
        }
        let d = match side {
            Side::Forward => other - fx,
            Side::Backward => fx - other,
        };
        increments.push((eps, d));
    }
    let floor = increment_noise_floor(fx, far);
    let c = seq::classify_increments(&increments, beta, sched.zero_band, sched.value_tol, floor);
    let samples = increments
        .iter()
        .map(|&(e, d)| (e, d / e.powf(beta)))
        .collect();
    Ok(build_estimate(side, beta, c, samples))
}

/// Residuals of the fractional Taylor expansion with candidate coefficient K:
/// forward (f(x+ε) − f(x) − Kε^β)/ε^β, backward (f(x−ε) − f(x) + Kε^β)/ε^β.
/// They tend to 0 along the schedule exactly when K is the β-velocity.
pub fn taylor_lagrange_residual(
    f: &RealFunction,
    x: f64,
    beta: f64,
    k: f64,
    side: Side,
    sched: &EstimatorSchedule,
) -> Result<Vec<(f64, f64)>> {
    sched.validate()?;
    check_beta(beta)?;
    let mut out = Vec::with_capacity(sched.levels as usize);
    for n in 0..sched.levels {
        let eps = sched.eps(n);
        let v = frac_variation(f, x, eps, beta, side)?;
        let r = match side {
            Side::Forward => v - k,
            Side::Backward => k - v,
        };
        out.push((eps, r));
    }
    Ok(out)
}

/// Central difference of f at y with step h.
pub(crate) fn central_diff(f: &RealFunction, y: f64, h: f64) -> Result<f64> {
    let d = (f.eval(y + h)? - f.eval(y - h)?) / (2.0 * h);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::DegenerateDerivative { x: y })
    }
}

/// Scale velocity at a single scale: (ε^s / (1−s)) · f′(x±ε) for operator
/// order s ∈ [0, 1), and plainly f′(x±ε) at the classical order s = 1 (where
/// the fractional weight 1−s degenerates to 0). The derivative is a central
/// difference with step `deriv_step`.
///
/// Pairing: the scale velocity of order 1−β tends to the β-velocity whenever
/// either limit exists.
pub fn scale_velocity(
    f: &RealFunction,
    x: f64,
    eps: f64,
    order: f64,
    side: Side,
    deriv_step: f64,
) -> Result<f64> {
    check_positive(eps, "eps")?;
    check_positive(deriv_step, "deriv_step")?;
    if !(0.0..=1.0).contains(&order) {
        return Err(Error::Param(format!(
            "operator order must lie in [0, 1], got {order}"
        )));
    }
    let y = match side {
        Side::Forward => x + eps,
        Side::Backward => x - eps,
    };
    let d = central_diff(f, y, deriv_step)?;
    if order == 1.0 {
        return Ok(d);
    }
    Ok(eps.powf(order) / (1.0 - order) * d)
}

/// Bracket [f,g] at order β: the limit of the product of the two β/2
/// variations, classified like a velocity. An identically vanishing product
/// classifies as zero.
pub fn velocity_bracket(
    f: &RealFunction,
    g: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
) -> Result<VelocityEstimate> {
    sched.validate()?;
    check_beta(beta)?;
    let fx = f.eval(x)?;
    let gx = g.eval(x)?;
    let mut increments = Vec::with_capacity(sched.levels as usize);
    let mut far = 0.0f64;
    for n in 0..sched.levels {
        let eps = sched.eps(n);
        let df = delta(f, x, eps, side)?;
        let dg = delta(g, x, eps, side)?;
        if n == 0 {
            far = df * dg;
        }
        increments.push((eps, df * dg));
    }
    let floor = increment_noise_floor(fx * gx, far);
    let mut c = seq::classify_increments(&increments, beta, sched.zero_band, sched.value_tol, floor);
    if c.degenerate_zero {
        // a product of increments that never moves has a vanishing bracket
        c.classification = Classification::Zero;
    }
    let samples = increments
        .iter()
        .map(|&(e, d)| (e, d / e.powf(beta)))
        .collect();
    Ok(build_estimate(side, beta, c, samples))
}

/// Derivative-form evaluation of the β-velocity: classifies the sequence
/// (1/β) ε_n^{1−β} f′(x±ε_n) along the schedule, with f′ taken by central
/// difference of step `deriv_step_frac`·ε_n.
pub fn basic_evaluation(
    f: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
    deriv_step_frac: f64,
) -> Result<VelocityEstimate> {
    sched.validate()?;
    check_beta(beta)?;
    if !(deriv_step_frac > 0.0 && deriv_step_frac < 1.0) {
        return Err(Error::Param(format!(
            "deriv_step_frac must lie in (0, 1), got {deriv_step_frac}"
        )));
    }
    let mut increments = Vec::with_capacity(sched.levels as usize);
    let mut quotients = Vec::with_capacity(sched.levels as usize);
    let mut far = 0.0f64;
    for n in 0..sched.levels {
        let eps = sched.eps(n);
        let y = match side {
            Side::Forward => x + eps,
            Side::Backward => x - eps,
        };
        let d = central_diff(f, y, deriv_step_frac * eps)?;
        let q = d * eps.powf(1.0 - beta) / beta;
        if n == 0 {
            far = q * eps.powf(beta);
        }
        // pseudo-increment q·ε^β puts the sequence in increment form so the
        // one shared classifier applies
        increments.push((eps, q * eps.powf(beta)));
        quotients.push((eps, q));
    }
    let floor = increment_noise_floor(0.0, far);
    let c = seq::classify_increments(&increments, beta, sched.zero_band, sched.value_tol, floor);
    Ok(build_estimate(side, beta, c, quotients))
}

/// Algebra rules for finite velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum AlgebraRule {
    /// ∂(f·g) = ∂f·g + ∂g·f ± [f,g]
    Product,
    /// ∂(f/g) = (∂f·g − ∂g·f ∓ [f,g]) / g²
    Quotient,
    /// outer f ∈ C¹, inner g Hölder: ∂(f∘g) = f′(g(x))·∂g(x)
    ChainSmoothOuter,
    /// outer f Hölder, inner g ∈ C¹ increasing: ∂(f∘g) = ∂f(g(x))·g′(x)^β
    ChainSmoothInner,
}

/// Outcome of an algebra-rule check: the directly estimated velocity of the
/// combined function against the rule's assembly from component velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RuleCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

// A zero-band classification is still a finitely existing velocity (= 0);
// only divergent or inconclusive components disqualify the rule.
fn finite_velocity(
    f: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
    role: &str,
) -> Result<f64> {
    let est = estimate_velocity(f, x, beta, side, sched)?;
    match est.classification {
        Classification::Finite => Ok(est.value),
        Classification::Zero => Ok(0.0),
        other => Err(Error::RuleInapplicable(format!(
            "{role} velocity classified {other} at x = {x}, order {beta}"
        ))),
    }
}

fn bracket_value(
    f: &RealFunction,
    g: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
) -> Result<f64> {
    let est = velocity_bracket(f, g, x, beta, side, sched)?;
    match est.classification {
        Classification::Zero => Ok(0.0),
        Classification::Finite => Ok(est.value),
        other => Err(Error::RuleInapplicable(format!(
            "bracket classified {other} at x = {x}, order {beta}"
        ))),
    }
}

/// Checks one algebra rule at (x, β, side): returns the measured velocity of
/// the combined function (lhs), the rule's prediction from the component
/// velocities (rhs), and |lhs − rhs|.
pub fn check_algebra_rule(
    rule: AlgebraRule,
    f: &RealFunction,
    g: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
) -> Result<RuleCheck> {
    sched.validate()?;
    check_beta(beta)?;
    let sign = match side {
        Side::Forward => 1.0,
        Side::Backward => -1.0,
    };
    // step for the C¹ factors in the chain and assembled terms
    let smooth_h = sched.eps0 / 64.0;
    let (lhs, rhs) = match rule {
        AlgebraRule::Product => {
            let vf = finite_velocity(f, x, beta, side, sched, "first-factor")?;
            let vg = finite_velocity(g, x, beta, side, sched, "second-factor")?;
            let br = bracket_value(f, g, x, beta, side, sched)?;
            let lhs = finite_velocity(&f.mul(g), x, beta, side, sched, "product")?;
            let rhs = vf * g.eval(x)? + vg * f.eval(x)? + sign * br;
            (lhs, rhs)
        }
        AlgebraRule::Quotient => {
            let gx = g.eval(x)?;
            if gx.abs() < 1e-12 {
                return Err(Error::RuleInapplicable(format!(
                    "quotient rule needs g(x) != 0, got g({x}) = {gx}"
                )));
            }
            let vf = finite_velocity(f, x, beta, side, sched, "numerator")?;
            let vg = finite_velocity(g, x, beta, side, sched, "denominator")?;
            let br = bracket_value(f, g, x, beta, side, sched)?;
            let lhs = finite_velocity(&f.div(g), x, beta, side, sched, "quotient")?;
            let rhs = (vf * gx - vg * f.eval(x)? - sign * br) / (gx * gx);
            (lhs, rhs)
        }
        AlgebraRule::ChainSmoothOuter => {
            let gx = g.eval(x)?;
            let vg = finite_velocity(g, x, beta, side, sched, "inner")?;
            let fp = central_diff(f, gx, smooth_h)?;
            let lhs = finite_velocity(&f.compose(g), x, beta, side, sched, "composition")?;
            (lhs, fp * vg)
        }
        AlgebraRule::ChainSmoothInner => {
            let gx = g.eval(x)?;
            let gp = central_diff(g, x, smooth_h)?;
            if !(gp > 0.0) {
                return Err(Error::RuleInapplicable(format!(
                    "inner-smooth chain rule needs g'(x) > 0, got {gp}"
                )));
            }
            let vf = finite_velocity(f, gx, beta, side, sched, "outer")?;
            let lhs = finite_velocity(&f.compose(g), x, beta, side, sched, "composition")?;
            (lhs, vf * gp.powf(beta))
        }
    };
    Ok(RuleCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}
