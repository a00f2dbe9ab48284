//! De Rham and Neidinger singular functions.
//!
//! Exact evaluation at dyadic rationals by unrolling the two-branch
//! functional equations along the binary digits, iterative approximants for
//! real arguments, the closed-form fractional velocity at dyadic points, and
//! a scale-sequence estimator that reads the velocity off the iterates.

use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::seq;
use crate::velocity::{
    build_estimate, increment_noise_floor, scale_velocity, Classification, EstimatorSchedule,
    Side, VelocityEstimate,
};

/// Hard ceiling on iteration depth and digit-walk length.
pub const MAX_DEPTH: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Family {
    DeRham,
    DeRhamReparam,
    Neidinger,
}

/// One self-affine curve: family, parameter and iteration budget.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IFSSpec {
    pub family: Family,
    pub a: f64,
    pub depth: u32,
}

impl IFSSpec {
    pub fn new(family: Family, a: f64, depth: u32) -> Result<Self> {
        let spec = IFSSpec { family, a, depth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        // the reparametrized family admits the classical endpoint a = 1
        // (every iterate is the identity), the raw families do not
        let ok = match self.family {
            Family::DeRhamReparam => self.a > 0.0 && self.a <= 1.0,
            _ => self.a > 0.0 && self.a < 1.0,
        };
        if !self.a.is_finite() || !ok {
            return Err(Error::Param(format!(
                "curve parameter out of range: {}",
                self.a
            )));
        }
        if self.depth == 0 {
            return Err(Error::Param("iteration depth must be at least 1".into()));
        }
        check_depth(self.depth, MAX_DEPTH)?;
        Ok(())
    }
}

/// Which recursion depth (counted from the outermost call, depth 1) uses the
/// swapped parameter 1−a in the Neidinger alternation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum SwapParity {
    #[default]
    Even,
    Odd,
}

impl SwapParity {
    fn param(self, a: f64, depth: u32) -> f64 {
        let swapped = match self {
            SwapParity::Even => depth % 2 == 0,
            SwapParity::Odd => depth % 2 == 1,
        };
        if swapped {
            1.0 - a
        } else {
            a
        }
    }
}

/// Exponent convention for the closed-form velocity at a dyadic point with
/// digit sum s: the digit sum itself, or one less.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum DigitSumConvention {
    /// (2^β − 1)^s; consistent with velocity 1 at x = 0 and confirmed by the
    /// exact-increment oracle.
    #[default]
    DigitSum,
    /// (2^β − 1)^{s−1}.
    DigitSumMinusOne,
}

fn check_depth(n: u32, max: u32) -> Result<()> {
    if n > max {
        Err(Error::Depth {
            requested: n,
            max,
        })
    } else {
        Ok(())
    }
}

fn check_level(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Param("iteration level must be at least 1".into()));
    }
    check_depth(n, MAX_DEPTH)
}

fn check_unit(x: f64) -> Result<()> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            x,
            reason: "curve argument must lie in [0, 1]".into(),
        });
    }
    Ok(())
}

fn check_open_param(a: f64) -> Result<()> {
    if !a.is_finite() || !(a > 0.0 && a < 1.0) {
        return Err(Error::Param(format!(
            "curve parameter must lie in (0, 1), got {a}"
        )));
    }
    Ok(())
}

/// Exact curve value at a dyadic rational, by walking its binary digits
/// most-significant first: digit 0 scales by a, digit 1 scales by 1−a and
/// shifts by the accumulated a.
pub fn derham_eval_exact(a: f64, x: &DyadicRational) -> Result<f64> {
    check_open_param(a)?;
    if x.is_one() {
        return Ok(1.0);
    }
    let mut scale = 1.0;
    let mut value = 0.0;
    for d in x.digits() {
        if d == 1 {
            value += scale * a;
            scale *= 1.0 - a;
        } else {
            scale *= a;
        }
    }
    Ok(value)
}

/// Exact curve value at an f64 argument (every f64 in [0, 1] is dyadic).
pub fn derham_eval_exact_f64(a: f64, x: f64) -> Result<f64> {
    derham_eval_exact(a, &DyadicRational::from_f64(x)?)
}

/// n-th iterate of the reparametrized system: seed x^a, branch scale 2^{−a}.
/// Converges to the curve with parameter 2^{−a}.
pub fn derham_reparam_iterate(a: f64, n: u32, x: f64) -> Result<f64> {
    if !a.is_finite() || !(a > 0.0 && a <= 1.0) {
        return Err(Error::Param(format!(
            "reparametrized exponent must lie in (0, 1], got {a}"
        )));
    }
    check_level(n)?;
    check_unit(x)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    let p = (-a).exp2();
    let mut coef = 1.0;
    let mut offset = 0.0;
    let mut y = x;
    for _ in 0..n {
        if y >= 0.5 {
            offset += coef * p;
            coef *= 1.0 - p;
            y = 2.0 * y - 1.0;
        } else {
            coef *= p;
            y = 2.0 * y;
        }
    }
    Ok(coef * y.powf(a) + offset)
}

/// n-th Neidinger iterate with the default alternation (odd depths from the
/// top use a, even depths 1−a). Seed is the identity.
pub fn neidinger_iterate(a: f64, n: u32, x: f64) -> Result<f64> {
    neidinger_iterate_with(a, n, x, SwapParity::default())
}

pub fn neidinger_iterate_with(a: f64, n: u32, x: f64, parity: SwapParity) -> Result<f64> {
    check_open_param(a)?;
    check_level(n)?;
    check_unit(x)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    let mut coef = 1.0;
    let mut offset = 0.0;
    let mut y = x;
    for d in 1..=n {
        let p = parity.param(a, d);
        if y >= 0.5 {
            offset += coef * p;
            coef *= 1.0 - p;
            y = 2.0 * y - 1.0;
        } else {
            coef *= p;
            y = 2.0 * y;
        }
    }
    Ok(coef * y + offset)
}

/// Closed-form forward velocity of the curve with parameter a ∈ (1/2, 1) at
/// a dyadic point, under the default digit-sum convention.
///
/// The critical order is β_c = −log₂ a. Below it the velocity is zero; at
/// it, the value is (2^{β_c} − 1)^s with s the digit sum of x; above it the
/// increments outgrow ε^β and the quotient diverges.
pub fn derham_velocity_closed_form(
    a: f64,
    x: &DyadicRational,
    beta: f64,
) -> Result<VelocityEstimate> {
    derham_velocity_closed_form_with(a, x, beta, DigitSumConvention::default())
}

pub fn derham_velocity_closed_form_with(
    a: f64,
    x: &DyadicRational,
    beta: f64,
    convention: DigitSumConvention,
) -> Result<VelocityEstimate> {
    let beta_c = check_velocity_param(a)?;
    check_order(beta)?;
    let classification = if (beta - beta_c).abs() <= 1e-9 {
        Classification::Finite
    } else if beta < beta_c {
        Classification::Zero
    } else {
        Classification::Divergent
    };
    let value = if classification == Classification::Finite {
        let s = x.digit_sum();
        let e = match convention {
            DigitSumConvention::DigitSum => s as i32,
            DigitSumConvention::DigitSumMinusOne => s as i32 - 1,
        };
        (beta.exp2() - 1.0).powi(e)
    } else {
        0.0
    };
    Ok(VelocityEstimate {
        side: Side::Forward,
        beta,
        classification,
        value,
        fitted_slope: beta_c,
        residual: 0.0,
        samples: Vec::new(),
    })
}

/// Closed-form velocity for a real argument. Arguments whose reduced binary
/// expansion runs past 52 bits are generic reals for this purpose: the
/// velocity is zero up to the critical order, and the closed form says
/// nothing above it.
pub fn derham_velocity_closed_form_real(a: f64, x: f64, beta: f64) -> Result<VelocityEstimate> {
    let beta_c = check_velocity_param(a)?;
    check_order(beta)?;
    let xd = DyadicRational::from_f64(x)?;
    if xd.exponent() <= 52 {
        return derham_velocity_closed_form(a, &xd, beta);
    }
    let classification = if beta <= beta_c + 1e-9 {
        Classification::Zero
    } else {
        Classification::Inconclusive
    };
    Ok(VelocityEstimate {
        side: Side::Forward,
        beta,
        classification,
        value: 0.0,
        fitted_slope: beta_c,
        residual: 0.0,
        samples: Vec::new(),
    })
}

fn check_velocity_param(a: f64) -> Result<f64> {
    check_open_param(a)?;
    if (a - 0.5).abs() < 1e-12 {
        return Err(Error::Param(
            "a = 1/2 is the identity curve; no fractional velocity to take".into(),
        ));
    }
    if a < 0.5 {
        return Err(Error::Param(format!(
            "critical order -log2({a}) exceeds 1; velocity queries cover a in (1/2, 1)"
        )));
    }
    Ok(-a.log2())
}

fn check_order(beta: f64) -> Result<()> {
    if !beta.is_finite() || !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Param(format!(
            "velocity order must lie in (0, 1], got {beta}"
        )));
    }
    Ok(())
}

/// Forward velocity at a dyadic point measured from exact increments
/// Δ_n = R(x + 2^{−n}) − R(x) over n ∈ [n_start, n_end], classified with the
/// standard bands. Levels where x + 2^{−n} leaves [0, 1] are skipped.
pub fn derham_velocity_exact_sweep(
    a: f64,
    x: &DyadicRational,
    beta: f64,
    n_start: u32,
    n_end: u32,
    zero_band: f64,
    value_tol: f64,
) -> Result<VelocityEstimate> {
    check_open_param(a)?;
    check_order(beta)?;
    if n_start == 0 || n_start > n_end {
        return Err(Error::Param(format!(
            "level window [{n_start}, {n_end}] must be nonempty and start at 1 or later"
        )));
    }
    check_depth(n_end, MAX_DEPTH)?;
    if !(zero_band > 0.0) || !(value_tol > 0.0) {
        return Err(Error::Param("classification bands must be positive".into()));
    }
    let fx = derham_eval_exact(a, x)?;
    let mut increments = Vec::new();
    for n in n_start..=n_end {
        let Some(xp) = x.add_pow2(n) else { continue };
        let eps = (-(n as f64)).exp2();
        increments.push((eps, derham_eval_exact(a, &xp)? - fx));
    }
    if increments.is_empty() {
        return Err(Error::InsufficientData(
            "every probe x + 2^-n leaves the unit interval".into(),
        ));
    }
    let floor = increment_noise_floor(fx, 1.0);
    let classified = seq::classify_increments(&increments, beta, zero_band, value_tol, floor);
    let samples = increments
        .iter()
        .map(|&(e, d)| (e, d / e.powf(beta)))
        .collect();
    Ok(build_estimate(Side::Forward, beta, classified, samples))
}

/// Forward velocity read off the iterate sequence: at level n the scale
/// velocity of f_n is taken at matched scale ε_n ≈ 2^{−n}, and the resulting
/// sequence is classified like ordinary increments. ε_n sits at 15/16 of the
/// dyadic cell so the difference window stays clear of the iterate's kinks.
pub fn velocity_via_scale_sequence(
    spec: &IFSSpec,
    x: f64,
    beta: f64,
    levels: u32,
) -> Result<VelocityEstimate> {
    spec.validate()?;
    check_order(beta)?;
    check_unit(x)?;
    if levels == 0 {
        return Err(Error::Param("need at least one level".into()));
    }
    if levels > spec.depth {
        return Err(Error::Depth {
            requested: levels,
            max: spec.depth,
        });
    }
    let exponent = match spec.family {
        Family::DeRham => {
            if spec.a <= 0.5 {
                return Err(Error::Param(format!(
                    "critical order -log2({}) exceeds 1; scale-sequence queries cover a in (1/2, 1)",
                    spec.a
                )));
            }
            -spec.a.log2()
        }
        Family::DeRhamReparam => spec.a,
        Family::Neidinger => spec.a,
    };
    let order = 1.0 - beta;
    let mut pseudo = Vec::new();
    for n in 1..=levels {
        let eps = 0.9375 * (-(n as f64)).exp2();
        let h = eps / 64.0;
        if x + eps + h > 1.0 {
            continue;
        }
        let family = spec.family;
        let f_n = RealFunction::try_from_fn(move |y| match family {
            Family::Neidinger => neidinger_iterate(exponent, n, y),
            _ => derham_reparam_iterate(exponent, n, y),
        });
        let s = scale_velocity(&f_n, x, eps, order, Side::Forward, h)?;
        pseudo.push((eps, s * eps.powf(beta)));
    }
    if pseudo.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} usable levels below x = {x}; need at least 4",
            pseudo.len()
        )));
    }
    let sched = EstimatorSchedule::default();
    let floor = increment_noise_floor(0.0, 1.0);
    let classified =
        seq::classify_increments(&pseudo, beta, sched.zero_band, sched.value_tol, floor);
    let samples = pseudo
        .iter()
        .map(|&(e, d)| (e, d / e.powf(beta)))
        .collect();
    Ok(build_estimate(Side::Forward, beta, classified, samples))
}

/// Level-n forward velocity of the Neidinger iterates at x, computed exactly
/// by the branch-factor recursion with the indicator seed at 0. Requires the
/// existence condition a = 2^{−β} or 1 − a = 2^{−β}.
pub fn neidinger_velocity_iterate(a: f64, beta: f64, n: u32, x: f64) -> Result<f64> {
    neidinger_velocity_iterate_with(a, beta, n, x, SwapParity::default())
}

pub fn neidinger_velocity_iterate_with(
    a: f64,
    beta: f64,
    n: u32,
    x: f64,
    parity: SwapParity,
) -> Result<f64> {
    check_open_param(a)?;
    check_order(beta)?;
    check_level(n)?;
    check_unit(x)?;
    let target = (-beta).exp2();
    if (a - target).abs() > 1e-9 && ((1.0 - a) - target).abs() > 1e-9 {
        return Err(Error::Param(format!(
            "velocity of the level-n iterates exists only when a = 2^-beta or 1-a = 2^-beta; \
             got a = {a}, beta = {beta}"
        )));
    }
    let gain = beta.exp2();
    let mut v = 1.0;
    let mut y = x;
    for d in 1..=n {
        let p = parity.param(a, d);
        if y >= 0.5 {
            v *= (1.0 - p) * gain;
            y = 2.0 * y - 1.0;
        } else {
            v *= p * gain;
            y = 2.0 * y;
        }
    }
    // indicator seed: dyadic arguments shallower than n have doubled down to
    // exactly 0 here, everything else seeds 0
    Ok(if y == 0.0 { v } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity::estimate_velocity;
    use num_bigint::BigUint;

    fn dy(num: u64, exp: u32) -> DyadicRational {
        DyadicRational::new(BigUint::from(num), exp).unwrap()
    }

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn exact_eval_examples() {
        assert_eq!(derham_eval_exact(0.7, &DyadicRational::half()).unwrap(), 0.7);
        assert_eq!(derham_eval_exact(0.3, &DyadicRational::zero()).unwrap(), 0.0);
        assert_eq!(derham_eval_exact(0.3, &DyadicRational::one()).unwrap(), 1.0);
        // one unrolling step: R(3/4) = (1-a) R(1/2) + a
        let a = 0.7;
        let r34 = derham_eval_exact(a, &dy(3, 2)).unwrap();
        assert!((r34 - ((1.0 - a) * a + a)).abs() < 1e-15);
    }

    #[test]
    fn functional_equation_holds_exactly() {
        let a = 0.7;
        for k in 0..=256u32 {
            let x = k as f64 / 512.0;
            let lhs = derham_eval_exact_f64(a, x).unwrap();
            let rhs = a * derham_eval_exact_f64(a, 2.0 * x).unwrap();
            assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON, "x = {x}");
        }
        for k in 256..=512u32 {
            let x = k as f64 / 512.0;
            let lhs = derham_eval_exact_f64(a, x).unwrap();
            let rhs = (1.0 - a) * derham_eval_exact_f64(a, 2.0 * x - 1.0).unwrap() + a;
            assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON, "x = {x}");
        }
    }

    #[test]
    fn exact_eval_is_strictly_increasing() {
        for &a in &[0.3, SQRT_HALF, 0.9] {
            let mut prev = -1.0;
            for k in 0..=512u32 {
                let v = derham_eval_exact_f64(a, k as f64 / 512.0).unwrap();
                assert!(v > prev, "a = {a}, k = {k}");
                prev = v;
            }
        }
    }

    #[test]
    fn reparam_iterates_converge_to_the_reparametrized_curve() {
        // limit curve parameter is 2^{-a}
        let a = 1.0;
        assert!((derham_reparam_iterate(a, 30, 0.5).unwrap() - 0.5).abs() < 1e-9);
        let a = 0.5;
        let target = derham_eval_exact_f64((-0.5f64).exp2(), 0.5).unwrap();
        assert!((derham_reparam_iterate(a, 40, 0.5).unwrap() - target).abs() < 1e-9);
        let target = derham_eval_exact_f64((-0.5f64).exp2(), 0.8125).unwrap();
        assert!((derham_reparam_iterate(a, 60, 0.8125).unwrap() - target).abs() < 1e-9);
    }

    #[test]
    fn iterate_boundaries_are_exact() {
        for n in [1, 3, 17] {
            assert_eq!(derham_reparam_iterate(0.6, n, 0.0).unwrap(), 0.0);
            assert_eq!(derham_reparam_iterate(0.6, n, 1.0).unwrap(), 1.0);
            assert_eq!(neidinger_iterate(0.3, n, 0.0).unwrap(), 0.0);
            assert_eq!(neidinger_iterate(0.3, n, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn neidinger_half_parameter_is_identity() {
        for k in 0..=64u32 {
            let x = k as f64 / 64.0;
            for n in [1, 5, 20] {
                assert_eq!(neidinger_iterate(0.5, n, x).unwrap(), x);
            }
        }
    }

    #[test]
    fn neidinger_midpoint_value_is_a() {
        for n in [1, 2, 9, 30] {
            assert_eq!(neidinger_iterate(0.3, n, 0.5).unwrap(), 0.3);
        }
        assert_eq!(
            neidinger_iterate_with(0.3, 9, 0.5, SwapParity::Odd).unwrap(),
            0.7
        );
    }

    #[test]
    fn iterates_contract_at_the_branch_rate() {
        // grid with deep binary tails so the extremal digit patterns appear
        let grid: Vec<f64> = (0..=512).map(|i| (i as f64 + 1.0 / 3.0) / 513.0).collect();
        for &(a, neid) in &[(0.3f64, true), (0.4, true), (0.7, false), (0.5, false)] {
            let rate = if neid {
                a.max(1.0 - a)
            } else {
                let p = (-a).exp2();
                p.max(1.0 - p)
            };
            for n in 2..=9u32 {
                let mut sup: f64 = 0.0;
                for &x in &grid {
                    let (lo, hi) = if neid {
                        (
                            neidinger_iterate(a, n, x).unwrap(),
                            neidinger_iterate(a, n + 1, x).unwrap(),
                        )
                    } else {
                        (
                            derham_reparam_iterate(a, n, x).unwrap(),
                            derham_reparam_iterate(a, n + 1, x).unwrap(),
                        )
                    };
                    sup = sup.max((hi - lo).abs());
                }
                assert!(
                    sup <= 1.5 * rate.powi(n as i32),
                    "a = {a}, neid = {neid}, n = {n}, sup = {sup}"
                );
            }
        }
    }

    #[test]
    fn neidinger_depth_regression_bound() {
        // points with deep binary tails; on purely dyadic grids of depth ≤ 8
        // the two iterates agree exactly and the sup is trivially 0
        let a = 0.3;
        let rate: f64 = 0.7;
        let mut sup: f64 = 0.0;
        for i in 0..=256u32 {
            let x = (i as f64 + 1.0 / 3.0) / 257.4;
            let d = neidinger_iterate(a, 16, x).unwrap() - neidinger_iterate(a, 8, x).unwrap();
            sup = sup.max(d.abs());
        }
        assert!(sup > 0.0 && sup <= rate.powi(8), "sup = {sup}");
    }

    #[test]
    fn closed_form_velocity_examples() {
        let a = SQRT_HALF;
        // digit sum 1 at 1/2, 2 at 3/4
        let half = derham_velocity_closed_form(a, &DyadicRational::half(), 0.5).unwrap();
        assert_eq!(half.classification, Classification::Finite);
        assert!((half.value - 0.41421356237309505).abs() < 1e-12);
        let est = derham_velocity_closed_form(a, &dy(3, 2), 0.5).unwrap();
        assert_eq!(est.classification, Classification::Finite);
        assert!((est.value - 0.1715728752538099).abs() < 1e-12);
        let low = derham_velocity_closed_form(a, &dy(3, 2), 0.25).unwrap();
        assert_eq!(low.classification, Classification::Zero);
        let high = derham_velocity_closed_form(a, &dy(3, 2), 0.6).unwrap();
        assert_eq!(high.classification, Classification::Divergent);
        // at the origin the digit sum is 0 and the velocity is exactly 1
        let origin = derham_velocity_closed_form(a, &DyadicRational::zero(), 0.5).unwrap();
        assert_eq!(origin.value, 1.0);
        // the alternate convention keeps one factor less
        let alt = derham_velocity_closed_form_with(
            a,
            &dy(3, 2),
            0.5,
            DigitSumConvention::DigitSumMinusOne,
        )
        .unwrap();
        assert!((alt.value - 0.41421356237309505).abs() < 1e-12);
    }

    #[test]
    fn closed_form_rejects_out_of_range_parameters() {
        assert!(derham_velocity_closed_form(0.5, &dy(3, 2), 0.5).is_err());
        assert!(derham_velocity_closed_form(0.3, &dy(3, 2), 0.5).is_err());
        assert!(derham_velocity_closed_form(1.2, &dy(3, 2), 0.5).is_err());
    }

    #[test]
    fn closed_form_real_arguments() {
        let a = SQRT_HALF;
        let est = derham_velocity_closed_form_real(a, 0.75, 0.5).unwrap();
        assert_eq!(est.classification, Classification::Finite);
        // a generic real (full-depth mantissa) counts as non-dyadic
        let nd = derham_velocity_closed_form_real(a, 1.0 / 3.0, 0.5).unwrap();
        assert_eq!(nd.classification, Classification::Zero);
        let nd_hi = derham_velocity_closed_form_real(a, 1.0 / 3.0, 0.7).unwrap();
        assert_eq!(nd_hi.classification, Classification::Inconclusive);
    }

    #[test]
    fn exact_sweep_matches_the_closed_form_at_dyadics() {
        let a = SQRT_HALF;
        for (x, s) in [
            (DyadicRational::half(), 1u64),
            (dy(3, 2), 2),
            (dy(5, 3), 2),
            (dy(13, 4), 3),
        ] {
            assert_eq!(x.digit_sum(), s);
            let est = derham_velocity_exact_sweep(
                a,
                &x,
                0.5,
                x.exponent() + 1,
                24,
                0.05,
                1e-4,
            )
            .unwrap();
            let closed = derham_velocity_closed_form(a, &x, 0.5).unwrap();
            assert_eq!(est.classification, Classification::Finite, "x = {x}");
            assert!(
                (est.value - closed.value).abs() < 1e-6,
                "x = {x}: sweep {} vs closed {}",
                est.value,
                closed.value
            );
        }
    }

    #[test]
    fn exact_sweep_dichotomy_around_the_critical_order() {
        let a = SQRT_HALF;
        let x = dy(3, 2);
        let lo = derham_velocity_exact_sweep(a, &x, 0.4, 3, 24, 0.05, 1e-4).unwrap();
        assert_eq!(lo.classification, Classification::Zero);
        let hi = derham_velocity_exact_sweep(a, &x, 0.6, 3, 24, 0.05, 1e-4).unwrap();
        assert_eq!(hi.classification, Classification::Divergent);
    }

    #[test]
    fn exact_sweep_agrees_with_the_generic_estimator() {
        // independent cross-check: the generic f64 estimator on the exact
        // curve evaluation, along the same dyadic scales
        let a = SQRT_HALF;
        let f = RealFunction::try_from_fn(move |y| derham_eval_exact_f64(a, y));
        let sched = EstimatorSchedule {
            eps0: 0.125,
            ratio: 0.5,
            levels: 22,
            ..EstimatorSchedule::default()
        };
        let est = estimate_velocity(&f, 0.75, 0.5, Side::Forward, &sched).unwrap();
        let sweep = derham_velocity_exact_sweep(a, &dy(3, 2), 0.5, 3, 24, 0.05, 1e-4).unwrap();
        assert_eq!(est.classification, Classification::Finite);
        assert!((est.value - sweep.value).abs() < 1e-4);
    }

    #[test]
    fn scale_sequence_at_the_origin_is_one() {
        for &a in &[1.0f64 / 3.0, 0.5, 0.7] {
            let spec = IFSSpec::new(Family::DeRhamReparam, a, 64).unwrap();
            let est = velocity_via_scale_sequence(&spec, 0.0, a, 24).unwrap();
            assert_eq!(est.classification, Classification::Finite, "a = {a}");
            assert!((est.value - 1.0).abs() < 1e-3, "a = {a}: {}", est.value);
        }
    }

    #[test]
    fn scale_sequence_classical_limit_matches_plain_derivative() {
        let spec = IFSSpec::new(Family::DeRhamReparam, 1.0, 64).unwrap();
        let est = velocity_via_scale_sequence(&spec, 0.25, 1.0, 20).unwrap();
        assert_eq!(est.classification, Classification::Finite);
        assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn scale_sequence_matches_closed_form_at_dyadic_points() {
        let a = SQRT_HALF;
        let spec = IFSSpec::new(Family::DeRham, a, 64).unwrap();
        for (x, xd) in [(0.5, DyadicRational::half()), (0.75, dy(3, 2))] {
            let est = velocity_via_scale_sequence(&spec, x, 0.5, 20).unwrap();
            let closed = derham_velocity_closed_form(a, &xd, 0.5).unwrap();
            assert_eq!(est.classification, Classification::Finite, "x = {x}");
            assert!(
                (est.value - closed.value).abs() < 5e-2,
                "x = {x}: {} vs {}",
                est.value,
                closed.value
            );
        }
    }

    #[test]
    fn scale_sequence_depth_budget_is_enforced() {
        let spec = IFSSpec::new(Family::DeRhamReparam, 0.5, 8).unwrap();
        assert!(matches!(
            velocity_via_scale_sequence(&spec, 0.0, 0.5, 9),
            Err(Error::Depth { requested: 9, max: 8 })
        ));
    }

    #[test]
    fn neidinger_velocity_iterate_examples() {
        let beta: f64 = 1.0 / 3.0;
        let a = (-beta).exp2();
        // one level at the origin: single branch-0 factor a·2^β = 1
        let v1 = neidinger_velocity_iterate(a, beta, 1, 0.0).unwrap();
        assert!((v1 - 1.0).abs() < 1e-14);
        // nine levels: the four even depths contribute (1-a)·2^β each
        let v9 = neidinger_velocity_iterate(a, beta, 9, 0.0).unwrap();
        assert!((v9 - 0.004564212019450513).abs() < 1e-14, "{v9}");
        let expected = ((1.0 - a) * beta.exp2()).powi(4);
        assert!((v9 - expected).abs() < 1e-15);
        // non-dyadic arguments never reach the indicator seed
        assert_eq!(neidinger_velocity_iterate(a, beta, 9, 1.0 / 3.0).unwrap(), 0.0);
        // dyadic deeper than n behaves the same
        assert_eq!(neidinger_velocity_iterate(a, beta, 3, 1.0 / 16.0).unwrap(), 0.0);
        // existence condition
        assert!(neidinger_velocity_iterate(0.4, beta, 5, 0.0).is_err());
        // the mirrored condition 1-a = 2^-beta is accepted
        assert!(neidinger_velocity_iterate(1.0 - a, beta, 5, 0.0).is_ok());
    }

    #[test]
    fn neidinger_velocity_swap_parity_flips_the_factor_pattern() {
        let beta: f64 = 1.0 / 3.0;
        let a = (-beta).exp2();
        let odd = neidinger_velocity_iterate_with(a, beta, 9, 0.0, SwapParity::Odd).unwrap();
        let expected = ((1.0 - a) * beta.exp2()).powi(5);
        assert!((odd - expected).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(IFSSpec::new(Family::DeRham, 0.0, 4).is_err());
        assert!(IFSSpec::new(Family::DeRham, 1.0, 4).is_err());
        assert!(IFSSpec::new(Family::DeRhamReparam, 1.0, 4).is_ok());
        assert!(IFSSpec::new(Family::Neidinger, 0.3, 0).is_err());
        assert!(IFSSpec::new(Family::Neidinger, 0.3, MAX_DEPTH + 1).is_err());
        assert!(matches!(
            derham_reparam_iterate(0.5, MAX_DEPTH + 1, 0.5),
            Err(Error::Depth { .. })
        ));
    }
}
