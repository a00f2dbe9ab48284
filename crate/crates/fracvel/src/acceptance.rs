//! Executable verification suite.
//!
//! Twelve numbered criteria exercise the library end to end: closed forms
//! against numerical estimators, exact curve fixtures against sweeps, and
//! the derivative/velocity equivalence. Each criterion reports pass/fail
//! with a one-line measurement summary, so the CLI `verify` subcommand and
//! the integration tests share one implementation.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::ifs::{self, DigitSumConvention, Family, IFSSpec};
use crate::langevin::{self, Oscillation, PathSpec};
use crate::lfd::{self, QuadratureConfig};
use crate::series::{FractionalPowerSeries, SeriesSign, SeriesTerm};
use crate::special;
use crate::velocity::{
    self, AlgebraRule, Classification, EstimatorSchedule, Side,
};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    /// One-line measurement summary (or the error that aborted the run).
    pub detail: String,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub runtime: Duration,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:02} {:<38} {}  [{:.1} ms] {}",
            self.id,
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            self.runtime.as_secs_f64() * 1e3,
            self.detail,
        )
    }
}

/// Criterion names, in id order (ids are 1-based).
pub const CRITERIA: [&str; 12] = [
    "power-velocity-both-sides",
    "order-threshold-dichotomy",
    "reparam-origin-velocity",
    "digit-sum-closed-form",
    "iterate-contraction-and-shape",
    "fundamental-theorem-counterexample",
    "lfd-velocity-equivalence",
    "integral-average-beta-identity",
    "algebra-rules-and-basic-evaluation",
    "langevin-partition-scaling",
    "set-of-change-grid",
    "integral-semigroup",
];

/// Runs one criterion by 1-based id. An id outside 1..=12 is a parameter
/// error; a criterion whose computation errs is a failing result, not an
/// error, so a broken build still yields a full table.
pub fn run_criterion(id: u32) -> Result<CriterionResult> {
    let body: fn() -> Result<(bool, String)> = match id {
        1 => c01_power_velocity,
        2 => c02_threshold_dichotomy,
        3 => c03_reparam_origin,
        4 => c04_digit_sum_closed_form,
        5 => c05_contraction_and_shape,
        6 => c06_fundamental_theorem_counterexample,
        7 => c07_lfd_velocity_equivalence,
        8 => c08_integral_average_identity,
        9 => c09_algebra_rules,
        10 => c10_langevin_scaling,
        11 => c11_set_of_change_grid,
        12 => c12_integral_semigroup,
        _ => {
            return Err(Error::Param(format!(
                "criterion id must lie in 1..=12, got {id}"
            )))
        }
    };
    let start = Instant::now();
    let (pass, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("aborted: {e}")),
    };
    Ok(CriterionResult {
        id,
        name: CRITERIA[(id - 1) as usize],
        pass,
        detail,
        runtime: start.elapsed(),
    })
}

/// Runs the full suite in id order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=12)
        .map(|id| run_criterion(id).expect("ids 1..=12 are valid"))
        .collect()
}

fn c01_power_velocity() -> Result<(bool, String)> {
    let f = RealFunction::power(0.5);
    let sched = EstimatorSchedule::default();
    let start = Instant::now();
    let fwd = velocity::estimate_velocity(&f, 0.0, 0.5, Side::Forward, &sched)?;
    let back = velocity::estimate_velocity(&f, 0.0, 0.5, Side::Backward, &sched)?;
    let elapsed = start.elapsed();
    let pass = fwd.classification == Classification::Finite
        && (fwd.value - 1.0).abs() <= 1e-6
        && back.classification == Classification::Finite
        && back.value.abs() <= 1e-12
        && elapsed < Duration::from_millis(1);
    Ok((
        pass,
        format!(
            "forward {:.9} ({}), backward {:e} ({}), both sides in {:.0} us",
            fwd.value,
            fwd.classification,
            back.value,
            back.classification,
            elapsed.as_secs_f64() * 1e6,
        ),
    ))
}

fn c02_threshold_dichotomy() -> Result<(bool, String)> {
    let f = RealFunction::power(0.5);
    let sched = EstimatorSchedule::default();
    let mut got = Vec::new();
    for beta in [0.4, 0.5, 0.6] {
        got.push(velocity::estimate_velocity(&f, 0.0, beta, Side::Forward, &sched)?.classification);
    }
    let want = [
        Classification::Zero,
        Classification::Finite,
        Classification::Divergent,
    ];
    let pass = got == want;
    Ok((
        pass,
        format!(
            "orders 0.4/0.5/0.6 classify {}/{}/{}",
            got[0], got[1], got[2]
        ),
    ))
}

fn c03_reparam_origin() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut pass = true;
    for a in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
        let spec = IFSSpec::new(Family::DeRhamReparam, a, 64)?;
        let est = ifs::velocity_via_scale_sequence(&spec, 0.0, a, 24)?;
        pass &= est.classification == Classification::Finite;
        worst = worst.max((est.value - 1.0).abs());
    }
    let elapsed = start.elapsed();
    pass &= worst <= 1e-3 && elapsed < Duration::from_secs(1);
    Ok((
        pass,
        format!(
            "origin velocity off 1 by at most {:.2e} across three parameters, {:.0} ms total",
            worst,
            elapsed.as_secs_f64() * 1e3,
        ),
    ))
}

fn c04_digit_sum_closed_form() -> Result<(bool, String)> {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let beta = 0.5;
    let conventions = [
        DigitSumConvention::DigitSum,
        DigitSumConvention::DigitSumMinusOne,
    ];
    let mut gap = [0.0f64; 2];
    let mut all_finite = true;
    for x in [0.5, 0.75, 0.625, 0.8125] {
        let xd = DyadicRational::from_f64(x)?;
        let est =
            ifs::derham_velocity_exact_sweep(a, &xd, beta, xd.exponent() + 1, 24, 0.05, 1e-4)?;
        all_finite &= est.classification == Classification::Finite;
        for (g, conv) in gap.iter_mut().zip(conventions) {
            let closed = ifs::derham_velocity_closed_form_with(a, &xd, beta, conv)?;
            *g = g.max((est.value - closed.value).abs());
        }
    }
    let convention = if gap[0] <= 5e-2 {
        Some(("digit-sum", gap[0]))
    } else if gap[1] <= 5e-2 {
        Some(("digit-sum-minus-one", gap[1]))
    } else {
        None
    };
    let mut all_zero = true;
    for x in [1.0 / 3.0, 0.2, 1.0 / 7.0] {
        let xd = DyadicRational::from_f64(x)?;
        let est = ifs::derham_velocity_exact_sweep(a, &xd, beta, 1, 24, 0.05, 1e-4)?;
        all_zero &= est.classification == Classification::Zero;
    }
    let pass = all_finite && convention.is_some() && all_zero;
    let detail = match convention {
        Some((name, g)) => format!(
            "dyadic probes finite, convention {name} within {g:.2e}; non-dyadic probes classify zero: {all_zero}"
        ),
        None => format!(
            "no single convention fits: gaps {:.2e} / {:.2e}",
            gap[0], gap[1]
        ),
    };
    Ok((pass, detail))
}

fn c05_contraction_and_shape() -> Result<(bool, String)> {
    let mut pass = true;
    let mut ratios = Vec::new();
    for a in [0.3, 0.4] {
        // sup distance between successive iterates on an off-dyadic grid
        let m = 8192usize;
        let grid: Vec<f64> = (0..m).map(|i| (i as f64 + 1.0 / 3.0) / m as f64).collect();
        let mut prev: Vec<f64> = Vec::new();
        let mut sups = Vec::new();
        for n in 2..=10u32 {
            let cur: Vec<f64> = grid
                .iter()
                .map(|&x| ifs::neidinger_iterate(a, n, x))
                .collect::<Result<_>>()?;
            if !prev.is_empty() {
                let sup = cur
                    .iter()
                    .zip(&prev)
                    .map(|(c, p)| (c - p).abs())
                    .fold(0.0f64, f64::max);
                sups.push(sup);
            }
            prev = cur;
        }
        // least-squares slope of ln(sup) against level index
        let k = sups.len() as f64;
        let mean_i = (sups.len() - 1) as f64 / 2.0;
        let mean_l = sups.iter().map(|s| s.ln()).sum::<f64>() / k;
        let (mut num, mut den) = (0.0, 0.0);
        for (i, s) in sups.iter().enumerate() {
            let di = i as f64 - mean_i;
            num += di * (s.ln() - mean_l);
            den += di * di;
        }
        let ratio = (num / den).exp();
        let q = a.max(1.0 - a);
        pass &= (ratio - q).abs() <= 0.05;
        ratios.push(ratio);

        // depth-8 shape: monotone, pinned endpoints, midpoint and quarter
        // values are the products of the per-level parameters on their path
        let depth = 8;
        let mut monotone = true;
        let mut last = f64::NEG_INFINITY;
        for i in 0..=1024 {
            let v = ifs::neidinger_iterate(a, depth, i as f64 / 1024.0)?;
            monotone &= v >= last;
            last = v;
        }
        let end0 = ifs::neidinger_iterate(a, depth, 0.0)?;
        let end1 = ifs::neidinger_iterate(a, depth, 1.0)?;
        let mid = ifs::neidinger_iterate(a, depth, 0.5)?;
        let quarter = ifs::neidinger_iterate(a, depth, 0.25)?;
        pass &= monotone
            && end0 == 0.0
            && end1 == 1.0
            && (mid - a).abs() <= 1e-15
            && (quarter - a * (1.0 - a)).abs() <= 1e-15;
    }
    Ok((
        pass,
        format!(
            "fitted contraction ratios {:.4} (target 0.7) and {:.4} (target 0.6); depth-8 shape checks hold",
            ratios[0], ratios[1],
        ),
    ))
}

fn c06_fundamental_theorem_counterexample() -> Result<(bool, String)> {
    let alpha = 0.6;
    let gamma_alpha = 1.4891922488128171; // gamma(0.6)
    let h = RealFunction::counterexample_h(alpha);
    let q = QuadratureConfig::default();
    let mut pass = true;
    let mut int_gap = 0.0f64;
    for x in [0.25, 0.5, 1.0] {
        let i = lfd::rl_integral(&h, 0.0, x, 1.0 - alpha, Side::Forward, &q)?;
        int_gap = int_gap.max((i - gamma_alpha).abs());
    }
    pass &= int_gap <= 1e-4;
    let mut deriv_sup = 0.0f64;
    for x in [0.25, 0.5] {
        let d = lfd::rl_derivative(&h, 0.0, x, alpha, Side::Forward, &q)?;
        deriv_sup = deriv_sup.max(d.abs());
    }
    pass &= deriv_sup <= 1e-3;
    // derivative of (gamma(alpha)/gamma(2 alpha)) x^{2 alpha - 1} recovers
    // x^{alpha - 1}; the constant is applied to the result by linearity
    let g = RealFunction::power(2.0 * alpha - 1.0);
    let scale = special::gamma(alpha) / special::gamma(2.0 * alpha);
    let mut rel = 0.0f64;
    for x in [0.25, 0.5] {
        let d = lfd::rl_derivative(&g, 0.0, x, alpha, Side::Forward, &q)? * scale;
        let want = x.powf(alpha - 1.0);
        rel = rel.max((d - want).abs() / want.abs());
    }
    pass &= rel <= 1e-3;
    Ok((
        pass,
        format!(
            "integral hits gamma(0.6) within {int_gap:.2e}; derivative of the counterexample stays below {deriv_sup:.2e}; power identity within {rel:.2e} relative",
        ),
    ))
}

fn c07_lfd_velocity_equivalence() -> Result<(bool, String)> {
    let gamma_three_halves = 0.8862269254527580;
    let f = RealFunction::power(0.5);
    let sched = EstimatorSchedule::default();
    let q = QuadratureConfig::default();
    let report = lfd::equivalence_report(&f, 0.0, 0.5, Side::Forward, &sched, &q)?;
    let gap = (report.gamma_ratio - gamma_three_halves).abs();
    let smooth = RealFunction::from_fn(|x| x * x);
    let vel = velocity::estimate_velocity(&smooth, 0.25, 0.5, Side::Forward, &sched)?;
    let deriv = lfd::kg_lfd(&smooth, 0.25, 0.5, Side::Forward, &q)?;
    let both_zero = vel.classification == Classification::Zero
        && deriv.classification == Classification::Zero;
    let pass = gap <= 1e-3 && both_zero;
    Ok((
        pass,
        format!(
            "gamma ratio {:.7} off gamma(1.5) by {:.2e}; smooth square classifies {}/{}",
            report.gamma_ratio, gap, vel.classification, deriv.classification,
        ),
    ))
}

fn c08_integral_average_identity() -> Result<(bool, String)> {
    let a = 0.25;
    let q = QuadratureConfig::default();
    let mut rel = 0.0f64;
    for k in [1.0, 2.0] {
        for beta in [0.3, 0.5, 0.7] {
            for h in [0.1, 0.01] {
                let f = RealFunction::try_from_fn(move |x| {
                    Ok(if x > a { k * (x - a).powf(beta) } else { 0.0 })
                });
                let got = lfd::integral_average(&f, a, h, beta, &q)?;
                let want = k * special::beta(1.0 + beta, 1.0 - beta) * h.powf(beta);
                rel = rel.max((got - want).abs() / want.abs());
            }
        }
    }
    let pass = rel <= 1e-6;
    Ok((
        pass,
        format!("12-case grid matches K B(1+b,1-b) h^b within {rel:.2e} relative"),
    ))
}

fn series_fn(c0: f64, c: f64, beta: f64, smooth: f64) -> Result<RealFunction> {
    let terms = vec![
        SeriesTerm {
            c,
            b: 0.0,
            alpha: beta,
        },
        SeriesTerm {
            c: smooth,
            b: 1.0,
            alpha: 1.5,
        },
    ];
    Ok(FractionalPowerSeries::new(c0, terms, SeriesSign::Plus)?.to_real_function())
}

fn c09_algebra_rules() -> Result<(bool, String)> {
    let sched = EstimatorSchedule::default();
    let mut pass = true;
    let mut worked_res = 0.0f64;

    let root = RealFunction::power(0.5);
    let affine = RealFunction::from_fn(|x| 1.0 + x);
    let doubler = RealFunction::from_fn(|x| 2.0 * x);
    let two = RealFunction::constant(2.0);
    let worked = [
        (AlgebraRule::Product, &root, &affine),
        (AlgebraRule::ChainSmoothInner, &root, &doubler),
        (AlgebraRule::Quotient, &root, &two),
    ];
    for (rule, f, g) in worked {
        let r = velocity::check_algebra_rule(rule, f, g, 0.0, 0.5, Side::Forward, &sched)?;
        worked_res = worked_res.max(r.residual);
    }
    pass &= worked_res <= 1e-3;

    let mut rng = StdRng::seed_from_u64(42);
    let mut rule_res = 0.0f64;
    let mut eval_gap = 0.0f64;
    for k in 0..20 {
        let beta = rng.gen_range(0.35..0.65);
        let f = series_fn(
            rng.gen_range(-1.5..1.5),
            rng.gen_range(0.5..1.5),
            beta,
            rng.gen_range(-1.0..1.0),
        )?;
        let g = series_fn(
            rng.gen_range(0.75..1.75),
            rng.gen_range(0.5..1.5),
            beta,
            rng.gen_range(-0.5..0.5),
        )?;
        let rule = if k % 2 == 0 {
            AlgebraRule::Product
        } else {
            AlgebraRule::Quotient
        };
        let r = velocity::check_algebra_rule(rule, &f, &g, 0.0, beta, Side::Forward, &sched)?;
        rule_res = rule_res.max(r.residual);
        for func in [&f, &g] {
            let est = velocity::estimate_velocity(func, 0.0, beta, Side::Forward, &sched)?;
            let basic =
                velocity::basic_evaluation(func, 0.0, beta, Side::Forward, &sched, 1.0 / 64.0)?;
            pass &= est.classification == Classification::Finite
                && basic.classification == Classification::Finite;
            eval_gap = eval_gap.max((est.value - basic.value).abs());
        }
    }
    pass &= rule_res <= 1e-3 && eval_gap <= 1e-3;
    Ok((
        pass,
        format!(
            "worked examples residual {worked_res:.2e}; 20 random pairs residual {rule_res:.2e}; derivative-form gap {eval_gap:.2e}",
        ),
    ))
}

fn c10_langevin_scaling() -> Result<(bool, String)> {
    let mut exact = true;
    for (n, want) in [(4u32, 2.0f64), (16, 4.0), (64, 8.0)] {
        let r = langevin::partition_scaling_check(1.0, 0.5, n)?;
        exact &= r.ratio == want;
    }
    let steps = 1u32 << 16;
    let spec = PathSpec {
        beta: 0.4,
        steps,
        dt: 1.0 / steps as f64,
        drift: Arc::new(|_, _| 0.0),
        noise_amp: 1.0,
        oscillation: Oscillation::Alternating,
        seed: 7,
        x0: 0.0,
    };
    let path = langevin::generate_path(&spec)?;
    let exponent = langevin::path_holder_exponent(&path, 9)?;
    let pass = exact && (exponent - 0.4).abs() <= 0.05;
    Ok((
        pass,
        format!(
            "partition ratios 2/4/8 exact: {exact}; 65536-step alternating path exponent {exponent:.4}",
        ),
    ))
}

fn c11_set_of_change_grid() -> Result<(bool, String)> {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let beta = 0.5;
    let n_points = 1024usize;
    let mut zero = 0usize;
    let mut finite_nonzero = 0usize;
    for i in 0..n_points {
        let x = (i as f64 + 1.0 / 3.0) / n_points as f64;
        let xd = DyadicRational::from_f64(x)?;
        let est = ifs::derham_velocity_exact_sweep(a, &xd, beta, 1, 26, 0.05, 1e-4)?;
        match est.classification {
            Classification::Zero => zero += 1,
            Classification::Finite if est.value.abs() > 1e-6 => finite_nonzero += 1,
            _ => {}
        }
    }
    let mut probes_finite = true;
    for x in [0.5, 0.75, 0.625, 0.8125] {
        let xd = DyadicRational::from_f64(x)?;
        let est =
            ifs::derham_velocity_exact_sweep(a, &xd, beta, xd.exponent() + 1, 26, 0.05, 1e-4)?;
        probes_finite &=
            est.classification == Classification::Finite && est.value.abs() > 1e-3;
    }
    let share = zero as f64 / n_points as f64;
    let pass = share >= 0.99 && finite_nonzero == 0 && probes_finite;
    Ok((
        pass,
        format!(
            "{zero}/{n_points} grid points classify zero ({:.1}%), {finite_nonzero} finite nonzero off the dyadic probes; injected probes finite: {probes_finite}",
            100.0 * share,
        ),
    ))
}

fn c12_integral_semigroup() -> Result<(bool, String)> {
    let q = QuadratureConfig::default();
    let fixtures = [
        RealFunction::constant(1.0),
        RealFunction::power(1.0),
        RealFunction::power(0.5),
    ];
    let mut rel = 0.0f64;
    for f in &fixtures {
        let inner = lfd::rl_integral_fn(f, 0.0, 0.4, Side::Forward, &q)?;
        for x in [0.25, 0.5, 1.0] {
            let nested = lfd::rl_integral(&inner, 0.0, x, 0.3, Side::Forward, &q)?;
            let direct = lfd::rl_integral(f, 0.0, x, 0.7, Side::Forward, &q)?;
            rel = rel.max((nested - direct).abs() / direct.abs());
        }
    }
    let pass = rel <= 1e-5;
    Ok((
        pass,
        format!("nested order 0.3 after 0.4 matches direct 0.7 within {rel:.2e} relative"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_id_rejected() {
        assert!(run_criterion(0).is_err());
        assert!(run_criterion(13).is_err());
    }

    #[test]
    fn names_align_with_ids() {
        let r = run_criterion(2).unwrap();
        assert_eq!(r.id, 2);
        assert_eq!(r.name, "order-threshold-dichotomy");
        assert!(r.pass, "{}", r.detail);
    }

    #[test]
    fn display_row_carries_verdict() {
        let r = run_criterion(2).unwrap();
        let row = r.to_string();
        assert!(row.contains("criterion 02"));
        assert!(row.contains("pass"));
    }
}
