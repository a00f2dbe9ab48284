//! Riemann-Liouville differintegrals with singular-kernel quadrature, and
//! the local fractional derivative obtained from the integral average.
//!
//! The weight singularities are never sampled directly: either a power
//! substitution flattens them before a Gauss-Legendre rule is applied, or a
//! Gauss-Jacobi rule absorbs them into its weight function. Both paths sit
//! behind [`QuadScheme`].

use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::quad;
use crate::seq;
use crate::special;
use crate::velocity::{self, Classification, EstimatorSchedule, Side, VelocityEstimate};

/// How the quadrature layer treats the singular kernel weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum QuadScheme {
    /// Power substitution that flattens the endpoint singularity, followed
    /// by Gauss-Legendre with automatic node doubling.
    #[default]
    Substitution,
    /// Gauss-Jacobi rule whose weight function carries the singularity.
    JacobiWeight,
}

/// Quadrature and limit-schedule configuration for the differintegral layer.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureConfig {
    /// Starting rule size; doubles until the two-grid estimate stabilizes.
    pub nodes: usize,
    pub scheme: QuadScheme,
    /// Schedule driving h → 0 limits and difference steps.
    pub h_schedule: EstimatorSchedule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes: 64,
            scheme: QuadScheme::Substitution,
            h_schedule: EstimatorSchedule {
                eps0: 0.125,
                ratio: 0.5,
                levels: 24,
                zero_band: 0.05,
                value_tol: 1e-4,
            },
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::Param(format!(
                "quadrature needs at least 8 nodes, got {}",
                self.nodes
            )));
        }
        self.h_schedule.validate()
    }
}

/// A local fractional derivative estimate at one point, one side.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LFDResult {
    pub side: Side,
    pub beta: f64,
    /// The derivative when the classification is finite; 0 for zero; NaN
    /// otherwise.
    pub value: f64,
    pub classification: Classification,
    /// The integral averages (h, M_a(h)) that drove the limit.
    pub m_samples: Vec<(f64, f64)>,
    pub residual: f64,
}

/// Velocity and local-derivative estimates side by side, with their ratio.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivalenceReport {
    pub velocity: VelocityEstimate,
    pub lfd: LFDResult,
    /// lfd.value / velocity.value; equals Γ(1+β) when both limits exist.
    pub gamma_ratio: f64,
}

fn check_open_order(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Param(format!(
            "differintegral order must lie in (0, 1), got {beta}"
        )));
    }
    Ok(())
}

/// Unwraps one adaptive piece, downgrading a node-cap failure to its best
/// estimate plus a capped flag so split integrals can report a combined
/// estimate instead of a one-sided one.
fn best_effort(res: Result<f64>) -> Result<(f64, bool)> {
    match res {
        Ok(v) => Ok((v, false)),
        Err(Error::Quadrature { estimate, .. }) => Ok((estimate, true)),
        Err(e) => Err(e),
    }
}

fn capped(total: f64, hit_cap: bool) -> Result<f64> {
    if hit_cap {
        Err(Error::Quadrature {
            estimate: total,
            nodes: quad::MAX_NODES,
        })
    } else {
        Ok(total)
    }
}

/// Applies a constant factor to a quadrature outcome, including the estimate
/// carried inside a node-cap error.
fn scale_outcome(res: Result<f64>, scale: f64) -> Result<f64> {
    match res {
        Ok(v) => Ok(v * scale),
        Err(Error::Quadrature { estimate, nodes }) => Err(Error::Quadrature {
            estimate: estimate * scale,
            nodes,
        }),
        Err(e) => Err(e),
    }
}

/// ∫₀¹ g(u)(1-u)^{-beta} du where g vanishes like u^mu at 0.
///
/// Substitution path: v = (1-u)^{1-beta} absorbs the weight on [1/2, 1]
/// exactly; z = u^min(mu,1) flattens g's own kink on [0, 1/2]. Jacobi path:
/// one weighted rule on the whole interval with g's kink divided out.
fn weighted01(
    q: &QuadratureConfig,
    beta: f64,
    mu: f64,
    g: &dyn Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let mu = if mu.is_finite() && mu > 0.0 { mu } else { 1.0 };
    match q.scheme {
        QuadScheme::Substitution => {
            let e = 1.0 - beta;
            let mut upper_integrand = |v: f64| g(1.0 - v.powf(1.0 / e));
            let (upper, cap_u) = best_effort(quad::adaptive_gl(
                q.nodes,
                0.0,
                0.5f64.powf(e),
                &mut upper_integrand,
            ))?;
            let m = mu.min(1.0);
            let lower = if m >= 1.0 {
                let mut plain = |u: f64| Ok(g(u)? * (1.0 - u).powf(-beta));
                quad::adaptive_gl(q.nodes, 0.0, 0.5, &mut plain)
            } else {
                let mut flattened = |z: f64| {
                    let u = z.powf(1.0 / m);
                    Ok(g(u)? * (1.0 - u).powf(-beta) * z.powf(1.0 / m - 1.0) / m)
                };
                quad::adaptive_gl(q.nodes, 0.0, 0.5f64.powf(m), &mut flattened)
            };
            let (lower, cap_l) = best_effort(lower)?;
            capped(upper / e + lower, cap_u || cap_l)
        }
        QuadScheme::JacobiWeight => {
            let mut divided = |t: f64| {
                let u = 0.5 * (1.0 + t);
                Ok(g(u)? * u.powf(-mu))
            };
            let sum = quad::adaptive_gj(q.nodes, -beta, mu, &mut divided);
            scale_outcome(sum, (beta - mu - 1.0).exp2())
        }
    }
}

/// Exponent hint for f at the far endpoint `a`: |f(a+s)| = O(s^{gamma-1}).
fn far_end_exponent(f: &RealFunction, a: f64) -> Result<f64> {
    let gamma = f
        .singularity()
        .filter(|h| (h.at - a).abs() <= 1e-12 * (1.0 + a.abs()))
        .map(|h| h.gamma)
        .unwrap_or(1.0);
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Param(format!(
            "endpoint exponent hint must be positive, got {gamma}"
        )));
    }
    Ok(gamma)
}

/// Riemann-Liouville integral of order `beta` with base point `a`,
/// evaluated at `x`: (1/Γ(β)) ∫ f(t)(x-t)^{β-1} dt over [a, x] (forward)
/// or f(t)(t-x)^{β-1} over [x, a] (backward).
///
/// Integrable endpoint singularities of f at `a` are announced through the
/// function's singularity hint and flattened by substitution (or absorbed
/// into the Jacobi weight).
pub fn rl_integral(
    f: &RealFunction,
    a: f64,
    x: f64,
    beta: f64,
    side: Side,
    q: &QuadratureConfig,
) -> Result<f64> {
    q.validate()?;
    check_open_order(beta)?;
    let len = match side {
        Side::Forward => x - a,
        Side::Backward => a - x,
    };
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::Domain {
            x,
            reason: "evaluation point must lie strictly inside the integration side".into(),
        });
    }
    let gamma = far_end_exponent(f, a)?;
    let raw = match q.scheme {
        QuadScheme::Substitution => rl_substitution(f, x, beta, side, len, gamma, q),
        QuadScheme::JacobiWeight => rl_jacobi(f, a, beta, side, len, gamma, q),
    };
    scale_outcome(raw, 1.0 / special::gamma(beta))
}

/// ∫ f(t)(x-t)^{β-1}dt after w = (x-t)^β, which removes the weight exactly:
/// (1/β)∫₀^{len^β} f(x ∓ w^{1/β}) dw, split at the midpoint so the far half
/// can flatten f's own endpoint power when one is hinted.
fn rl_substitution(
    f: &RealFunction,
    x: f64,
    beta: f64,
    side: Side,
    len: f64,
    gamma: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let sgn = match side {
        Side::Forward => -1.0,
        Side::Backward => 1.0,
    };
    let m_total = len.powf(beta);
    let eval_w = |w: f64| f.eval(x + sgn * w.powf(1.0 / beta));
    let mut near = |w: f64| eval_w(w);
    let (near_val, cap_n) =
        best_effort(quad::adaptive_gl(q.nodes, 0.0, 0.5 * m_total, &mut near))?;
    let integer_gamma = (gamma - gamma.round()).abs() < 1e-9 && gamma >= 0.5;
    let far_res = if integer_gamma {
        let mut far = |w: f64| eval_w(w);
        quad::adaptive_gl(q.nodes, 0.5 * m_total, m_total, &mut far)
    } else {
        // w = M - v^p with p = ceil(γ)/γ turns the (M-w)^{γ-1} factor into
        // an integer power of v; the jacobian keeps the product bounded.
        let p = gamma.ceil() / gamma;
        let mut far = |v: f64| Ok(eval_w(m_total - v.powf(p))? * p * v.powf(p - 1.0));
        quad::adaptive_gl(q.nodes, 0.0, (0.5 * m_total).powf(1.0 / p), &mut far)
    };
    let (far_val, cap_f) = best_effort(far_res)?;
    capped((near_val + far_val) / beta, cap_n || cap_f)
}

/// Same integral under a Gauss-Jacobi rule: the kernel power maps to the
/// (1-s) exponent and f's hinted endpoint power to the (1+s) exponent.
fn rl_jacobi(
    f: &RealFunction,
    a: f64,
    beta: f64,
    side: Side,
    len: f64,
    gamma: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let sgn = match side {
        Side::Forward => 1.0,
        Side::Backward => -1.0,
    };
    let mut divided = |s: f64| {
        let t = a + sgn * len * 0.5 * (1.0 + s);
        Ok(f.eval(t)? * (1.0 + s).powf(1.0 - gamma))
    };
    let sum = quad::adaptive_gj(q.nodes, beta - 1.0, gamma - 1.0, &mut divided);
    scale_outcome(sum, (0.5 * len).powf(beta))
}

/// Riemann-Liouville derivative of order `beta`: d/dx of the order-(1-β)
/// integral, by Richardson-extrapolated central differences with steps from
/// q.h_schedule. The backward side carries the leading minus sign.
pub fn rl_derivative(
    f: &RealFunction,
    a: f64,
    x: f64,
    beta: f64,
    side: Side,
    q: &QuadratureConfig,
) -> Result<f64> {
    q.validate()?;
    check_open_order(beta)?;
    let len = match side {
        Side::Forward => x - a,
        Side::Backward => a - x,
    };
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::Domain {
            x,
            reason: "evaluation point must lie strictly inside the integration side".into(),
        });
    }
    let r = q.h_schedule.ratio;
    let h0 = q.h_schedule.eps0.min(0.25 * len);
    let integral_at = |y: f64| rl_integral(f, a, y, 1.0 - beta, side, q);
    let mut diffs = [0.0f64; 3];
    for (k, d) in diffs.iter_mut().enumerate() {
        let h = h0 * r.powi(k as i32);
        *d = (integral_at(x + h)? - integral_at(x - h)?) / (2.0 * h);
    }
    let r2 = r * r;
    let e0 = (diffs[1] - r2 * diffs[0]) / (1.0 - r2);
    let e1 = (diffs[2] - r2 * diffs[1]) / (1.0 - r2);
    let value = (e1 - r2 * r2 * e0) / (1.0 - r2 * r2);
    if !value.is_finite() {
        return Err(Error::DegenerateDerivative { x });
    }
    Ok(match side {
        Side::Forward => value,
        Side::Backward => -value,
    })
}

/// Wraps x ↦ rl_integral(f, a, x, …) as a function, carrying the endpoint
/// exponent forward: integrating at order β raises it by β, which keeps
/// nested integrals' substitutions sharp.
pub fn rl_integral_fn(
    f: &RealFunction,
    a: f64,
    beta: f64,
    side: Side,
    q: &QuadratureConfig,
) -> Result<RealFunction> {
    q.validate()?;
    check_open_order(beta)?;
    let gamma = far_end_exponent(f, a)?;
    let inner = f.clone();
    let q = q.clone();
    Ok(
        RealFunction::try_from_fn(move |x| rl_integral(&inner, a, x, beta, side, &q))
            .with_singularity(a, gamma + beta),
    )
}

/// The integral average M_a(h) = ∫₀¹ (f(a+hu) - f(a))(1-u)^{-β} du.
pub fn integral_average(
    f: &RealFunction,
    a: f64,
    h: f64,
    beta: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    q.validate()?;
    check_open_order(beta)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain {
            x: h,
            reason: "averaging width must be positive".into(),
        });
    }
    let fa = f.eval(a)?;
    weighted01(q, beta, beta, &|u| Ok(f.eval(a + h * u)? - fa))
}

fn classify_m_samples(
    samples: &[(f64, f64)],
    beta: f64,
    fa: f64,
    sched: &EstimatorSchedule,
) -> seq::Classified {
    let floor = velocity::increment_noise_floor(fa, 1.0);
    let mut c = seq::classify_increments(samples, beta, sched.zero_band, sched.value_tol, floor);
    // An average that never rises above rounding noise vanishes faster than
    // any power; for a derivative that is a plain zero, not a finite limit.
    if c.degenerate_zero {
        c.classification = Classification::Zero;
    }
    c
}

/// Kolwankar-Gangal local fractional derivative at `a`: the β-velocity of
/// h ↦ M_a(h) at h = 0, divided by Γ(1-β). Classification semantics follow
/// the velocity estimator.
pub fn kg_lfd(
    f: &RealFunction,
    a: f64,
    beta: f64,
    side: Side,
    q: &QuadratureConfig,
) -> Result<LFDResult> {
    q.validate()?;
    check_open_order(beta)?;
    let sched = &q.h_schedule;
    let fa = f.eval(a)?;
    let mut samples = Vec::with_capacity(sched.levels as usize);
    for n in 0..sched.levels {
        let h = sched.eps(n);
        let average = match side {
            Side::Forward => weighted01(q, beta, beta, &|u| Ok(f.eval(a + h * u)? - fa)),
            Side::Backward => weighted01(q, beta, beta, &|u| Ok(fa - f.eval(a - h * u)?)),
        };
        match average {
            Ok(m) => samples.push((h, m)),
            // A node-capped average (rough integrands never meet the
            // two-grid target) still carries its best estimate; the limit
            // classifier's residual gate judges the leftover noise.
            Err(Error::Quadrature { estimate, .. }) => samples.push((h, estimate)),
            Err(e) => return Err(e),
        }
    }
    let c = classify_m_samples(&samples, beta, fa, sched);
    let value = match c.classification {
        Classification::Finite => c.value / special::gamma(1.0 - beta),
        Classification::Zero => 0.0,
        _ => f64::NAN,
    };
    Ok(LFDResult {
        side,
        beta,
        value,
        classification: c.classification,
        m_samples: samples,
        residual: c.residual,
    })
}

/// Bounded-variation form of the local fractional derivative:
/// (1/(β Γ(1-β))) · lim_{h→0} h^{1-β} ∫₀¹ u f'(a+hu)(1-u)^{-β} du.
///
/// The stored samples are (h, W(h)·h^β) where W is the windowed integral
/// above; W·h^β equals β·M_a(h) when both forms apply, so the limit runs
/// through the same classifier as [`kg_lfd`].
pub fn kg_lfd_bv(
    f: &RealFunction,
    fprime: &RealFunction,
    a: f64,
    beta: f64,
    q: &QuadratureConfig,
) -> Result<LFDResult> {
    q.validate()?;
    check_open_order(beta)?;
    let sched = &q.h_schedule;
    let fa = f.eval(a)?;
    let mut samples = Vec::with_capacity(sched.levels as usize);
    for n in 0..sched.levels {
        let h = sched.eps(n);
        let windowed =
            weighted01(q, beta, beta, &|u| Ok(u * fprime.eval(a + h * u)?));
        match windowed {
            Ok(w) => samples.push((h, w * h)),
            Err(Error::Quadrature { estimate, .. }) => samples.push((h, estimate * h)),
            Err(e) => return Err(e),
        }
    }
    let c = classify_m_samples(&samples, beta, fa, sched);
    let value = match c.classification {
        Classification::Finite => c.value / (beta * special::gamma(1.0 - beta)),
        Classification::Zero => 0.0,
        _ => f64::NAN,
    };
    Ok(LFDResult {
        side: Side::Forward,
        beta,
        value,
        classification: c.classification,
        m_samples: samples,
        residual: c.residual,
    })
}

/// Runs the velocity estimator and the local-derivative estimator on the
/// same point and reports their ratio, which equals Γ(1+β) whenever both
/// limits exist and the velocity is nonzero.
pub fn equivalence_report(
    f: &RealFunction,
    a: f64,
    beta: f64,
    side: Side,
    sched: &EstimatorSchedule,
    q: &QuadratureConfig,
) -> Result<EquivalenceReport> {
    let vel = velocity::estimate_velocity(f, a, beta, side, sched)?;
    let lfd = kg_lfd(f, a, beta, side, q)?;
    if vel.classification != Classification::Finite
        || lfd.classification != Classification::Finite
    {
        return Err(Error::RatioUndefined(
            "both the velocity and the local derivative must classify finite".into(),
        ));
    }
    if vel.value.abs() <= 1e-12 {
        return Err(Error::RatioUndefined(
            "velocity is numerically zero".into(),
        ));
    }
    Ok(EquivalenceReport {
        gamma_ratio: lfd.value / vel.value,
        velocity: vel,
        lfd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs;

    const GAMMA_0_6: f64 = 1.489_192_248_812_817_1;
    const GAMMA_1_5: f64 = 0.886_226_925_452_758;

    fn both_schemes() -> [QuadratureConfig; 2] {
        let sub = QuadratureConfig::default();
        let jac = QuadratureConfig {
            scheme: QuadScheme::JacobiWeight,
            ..QuadratureConfig::default()
        };
        [sub, jac]
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn integral_of_one_is_power_over_gamma() {
        let f = RealFunction::constant(1.0);
        for q in both_schemes() {
            for beta in [0.3, 0.5, 0.7] {
                for x in [0.25, 1.0] {
                    let got = rl_integral(&f, 0.0, x, beta, Side::Forward, &q).unwrap();
                    let exact = x.powf(beta) / special::gamma(1.0 + beta);
                    assert!(rel(got, exact) < 1e-7, "beta={beta} x={x}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn integral_of_singular_fixture_is_constant_gamma() {
        let h = RealFunction::counterexample_h(0.6);
        for q in both_schemes() {
            for x in [0.25, 0.5, 1.0] {
                let got = rl_integral(&h, 0.0, x, 0.4, Side::Forward, &q).unwrap();
                assert!(
                    rel(got, GAMMA_0_6) < 1e-6,
                    "x={x}: {got} vs {GAMMA_0_6} ({:?})",
                    q.scheme
                );
            }
        }
    }

    #[test]
    fn integral_of_zero_is_zero() {
        let f = RealFunction::constant(0.0);
        let q = QuadratureConfig::default();
        assert_eq!(rl_integral(&f, 0.0, 1.0, 0.5, Side::Forward, &q).unwrap(), 0.0);
    }

    #[test]
    fn backward_integral_mirrors_forward() {
        // ∫_x^1 (t-x)^{β-1} dt / Γ(β) = (1-x)^β / Γ(1+β).
        let f = RealFunction::constant(1.0);
        for q in both_schemes() {
            let got = rl_integral(&f, 1.0, 0.5, 0.4, Side::Backward, &q).unwrap();
            let exact = 0.5f64.powf(0.4) / special::gamma(1.4);
            assert!(rel(got, exact) < 1e-7, "{got} vs {exact}");
        }
    }

    #[test]
    fn integral_rejects_wrong_side_and_coincident_points() {
        let f = RealFunction::constant(1.0);
        let q = QuadratureConfig::default();
        assert!(matches!(
            rl_integral(&f, 0.0, 0.0, 0.5, Side::Forward, &q),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            rl_integral(&f, 0.0, -0.5, 0.5, Side::Forward, &q),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            rl_integral(&f, 0.0, 0.5, 0.5, Side::Backward, &q),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn config_validation_floors_node_count() {
        let mut q = QuadratureConfig::default();
        q.nodes = 7;
        assert!(q.validate().is_err());
        q.nodes = 8;
        assert!(q.validate().is_ok());
    }

    #[test]
    fn derivative_of_singular_fixture_vanishes() {
        // Differentiation at the fixture's own order annihilates it: the
        // order-0.4 integral is constant in x.
        let h = RealFunction::counterexample_h(0.6);
        let q = QuadratureConfig::default();
        for x in [0.25, 0.5] {
            let got = rl_derivative(&h, 0.0, x, 0.6, Side::Forward, &q).unwrap();
            assert!(got.abs() < 1e-3, "x={x}: {got}");
        }
    }

    #[test]
    fn derivative_inverts_integral_on_smooth_input() {
        let one = RealFunction::constant(1.0);
        let q = QuadratureConfig::default();
        let integrated = rl_integral_fn(&one, 0.0, 0.6, Side::Forward, &q).unwrap();
        let got = rl_derivative(&integrated, 0.0, 0.5, 0.6, Side::Forward, &q).unwrap();
        assert!((got - 1.0).abs() < 1e-4, "{got}");
    }

    #[test]
    fn derivative_power_identity() {
        // Γ(α)/Γ(2α) · D^α x^{2α-1} = x^{α-1} with α = 0.6.
        let f = RealFunction::power(0.2);
        let q = QuadratureConfig::default();
        let scale = GAMMA_0_6 / special::gamma(1.2);
        for x in [0.25f64, 0.5] {
            let got = scale * rl_derivative(&f, 0.0, x, 0.6, Side::Forward, &q).unwrap();
            let exact = x.powf(-0.4);
            assert!(rel(got, exact) < 1e-4, "x={x}: {got} vs {exact}");
        }
    }

    #[test]
    fn backward_derivative_of_constant() {
        // -d/dx of ∫_x^1 (t-x)^{0.6}dt/Γ(1.6) = (1-x)^{-0.4}/Γ(0.6).
        let f = RealFunction::constant(1.0);
        let q = QuadratureConfig::default();
        let got = rl_derivative(&f, 1.0, 0.5, 0.4, Side::Backward, &q).unwrap();
        let exact = 0.5f64.powf(-0.4) / special::gamma(0.6);
        assert!(rel(got, exact) < 1e-4, "{got} vs {exact}");
    }

    #[test]
    fn average_of_holder_power_is_beta_integral() {
        let a = 0.25;
        for q in both_schemes() {
            for k in [1.0f64, 2.0] {
                for beta in [0.3f64, 0.5, 0.7] {
                    for h in [0.1f64, 0.01] {
                        let f = RealFunction::from_fn(move |x| {
                            if x >= a {
                                1.0 + k * (x - a).powf(beta)
                            } else {
                                1.0
                            }
                        });
                        let got = integral_average(&f, a, h, beta, &q).unwrap();
                        let exact =
                            k * special::beta(1.0 + beta, 1.0 - beta) * h.powf(beta);
                        assert!(
                            rel(got, exact) < 1e-6,
                            "K={k} beta={beta} h={h} ({:?}): {got} vs {exact}",
                            q.scheme
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn average_of_constant_and_linear() {
        let q = QuadratureConfig::default();
        let c = RealFunction::constant(3.0);
        assert_eq!(integral_average(&c, 0.2, 0.1, 0.5, &q).unwrap(), 0.0);
        // f = a + (x - a): M_a(h) = h B(2, 1-β) = h / ((1-β)(2-β)).
        let a = 0.2;
        let lin = RealFunction::from_fn(move |x| x);
        for beta in [0.3f64, 0.5] {
            let got = integral_average(&lin, a, 0.05, beta, &q).unwrap();
            let exact = 0.05 / ((1.0 - beta) * (2.0 - beta));
            assert!(rel(got, exact) < 1e-8, "beta={beta}: {got} vs {exact}");
        }
        assert!(integral_average(&c, 0.2, 0.0, 0.5, &q).is_err());
    }

    #[test]
    fn lfd_of_matching_power_is_gamma() {
        let f = RealFunction::power(0.5);
        for q in both_schemes() {
            let out = kg_lfd(&f, 0.0, 0.5, Side::Forward, &q).unwrap();
            assert_eq!(out.classification, Classification::Finite);
            assert!(
                (out.value - GAMMA_1_5).abs() < 1e-6,
                "{} ({:?})",
                out.value,
                q.scheme
            );
            assert!(!out.m_samples.is_empty());
        }
    }

    #[test]
    fn lfd_of_smooth_and_constant_is_zero() {
        let q = QuadratureConfig::default();
        let sq = RealFunction::from_fn(|x| x * x);
        let out = kg_lfd(&sq, 0.0, 0.5, Side::Forward, &q).unwrap();
        assert_eq!(out.classification, Classification::Zero);
        assert_eq!(out.value, 0.0);
        let c = RealFunction::constant(7.0);
        let out = kg_lfd(&c, 0.3, 0.5, Side::Forward, &q).unwrap();
        assert_eq!(out.classification, Classification::Zero);
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn backward_lfd_keeps_the_sign_of_the_decrease() {
        // |x|^{1/2} falls toward 0 from the left, so the backward difference
        // f(a) - f(a-hu) is negative and the derivative is -Γ(1.5).
        let f = RealFunction::from_fn(|x| x.abs().sqrt());
        let q = QuadratureConfig::default();
        let out = kg_lfd(&f, 0.0, 0.5, Side::Backward, &q).unwrap();
        assert_eq!(out.classification, Classification::Finite);
        assert!((out.value + GAMMA_1_5).abs() < 1e-6, "{}", out.value);
    }

    #[test]
    fn bv_form_matches_integral_average_form() {
        let f = RealFunction::power(0.5);
        let fp = RealFunction::power(-0.5).scale(0.5);
        let q = QuadratureConfig::default();
        let direct = kg_lfd(&f, 0.0, 0.5, Side::Forward, &q).unwrap();
        let bv = kg_lfd_bv(&f, &fp, 0.0, 0.5, &q).unwrap();
        assert_eq!(bv.classification, Classification::Finite);
        assert!((bv.value - GAMMA_1_5).abs() < 1e-3, "{}", bv.value);
        assert!((bv.value - direct.value).abs() < 1e-3);
    }

    #[test]
    fn bv_form_of_linear_and_oversmooth_powers_is_zero() {
        let q = QuadratureConfig::default();
        let lin = RealFunction::from_fn(|x| 2.0 * x + 1.0);
        let lp = RealFunction::constant(2.0);
        let out = kg_lfd_bv(&lin, &lp, 0.25, 0.5, &q).unwrap();
        assert_eq!(out.classification, Classification::Zero);
        // x^{0.75} at β = 0.5: the windowed integral scales like h^{0.25}.
        let f = RealFunction::power(0.75);
        let fp = RealFunction::power(-0.25).scale(0.75);
        let out = kg_lfd_bv(&f, &fp, 0.0, 0.5, &q).unwrap();
        assert_eq!(out.classification, Classification::Zero);
    }

    #[test]
    fn equivalence_ratio_is_gamma_on_power_fixture() {
        let f = RealFunction::power(0.5);
        let sched = EstimatorSchedule::default();
        let q = QuadratureConfig::default();
        let report = equivalence_report(&f, 0.0, 0.5, Side::Forward, &sched, &q).unwrap();
        assert!(
            (report.gamma_ratio - GAMMA_1_5).abs() < 1e-3,
            "{}",
            report.gamma_ratio
        );
    }

    #[test]
    fn equivalence_undefined_for_constants() {
        let f = RealFunction::constant(2.0);
        let sched = EstimatorSchedule::default();
        let q = QuadratureConfig::default();
        assert!(matches!(
            equivalence_report(&f, 0.0, 0.5, Side::Forward, &sched, &q),
            Err(Error::RatioUndefined(_))
        ));
    }

    #[test]
    fn equivalence_on_self_affine_curve() {
        // The curve with contraction 2^{-1/2} has critical order 1/2; at a
        // dyadic point both estimators see the same finite limit, so the
        // ratio still lands near Γ(1.5).
        let a = 0.5f64.sqrt();
        let f = RealFunction::try_from_fn(move |x| ifs::derham_eval_exact_f64(a, x));
        let sched = EstimatorSchedule::default();
        let q = QuadratureConfig::default();
        let report = equivalence_report(&f, 0.5, 0.5, Side::Forward, &sched, &q).unwrap();
        assert!(
            (report.gamma_ratio - GAMMA_1_5).abs() < 5e-2,
            "{}",
            report.gamma_ratio
        );
    }

    #[test]
    fn integral_semigroup_on_smooth_inputs() {
        let q = QuadratureConfig::default();
        let fixtures = [
            RealFunction::constant(1.0),
            RealFunction::power(1.0),
            RealFunction::power(0.5),
        ];
        for f in fixtures {
            let inner = rl_integral_fn(&f, 0.0, 0.4, Side::Forward, &q).unwrap();
            for x in [0.25f64, 0.5, 1.0] {
                let nested = rl_integral(&inner, 0.0, x, 0.3, Side::Forward, &q).unwrap();
                let direct = rl_integral(&f, 0.0, x, 0.7, Side::Forward, &q).unwrap();
                assert!(
                    rel(nested, direct) < 1e-5,
                    "x={x}: {nested} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn reconstruction_succeeds_only_through_the_integral_side() {
        // D^α(I^α 1) = 1 holds (previous test); here the reverse order on
        // the singular fixture: D^α h is uniformly tiny, so I^α(D^α h) is
        // bounded by sup|D^α h|·x^α/Γ(1+α), far below h itself.
        let h = RealFunction::counterexample_h(0.6);
        let q = QuadratureConfig::default();
        let mut sup = 0.0f64;
        for x in [0.2, 0.35, 0.5, 0.65, 0.8] {
            let d = rl_derivative(&h, 0.0, x, 0.6, Side::Forward, &q)
                .unwrap()
                .abs();
            sup = sup.max(d);
        }
        assert!(sup < 1e-3, "derivative magnitude {sup}");
        let reconstruction_bound = sup / special::gamma(1.6);
        let target = h.eval(0.5).unwrap();
        assert!(
            reconstruction_bound < 0.01 * target,
            "bound {reconstruction_bound} vs value {target}"
        );
    }

    #[test]
    fn finite_derivative_points_are_isolated() {
        // Wherever the local derivative is finite and nonzero, flanking
        // points classify zero.
        let q = QuadratureConfig::default();
        let kink = RealFunction::from_fn(|x| 1.0 + (x - 0.5).abs().sqrt());
        let at = kg_lfd(&kink, 0.5, 0.5, Side::Forward, &q).unwrap();
        assert_eq!(at.classification, Classification::Finite);
        assert!(at.value > 0.5);
        for probe in [0.45, 0.55] {
            let off = kg_lfd(&kink, probe, 0.5, Side::Forward, &q).unwrap();
            assert_eq!(off.classification, Classification::Zero, "probe {probe}");
        }
        let power = RealFunction::power(0.5);
        for probe in [0.05, 0.2] {
            let off = kg_lfd(&power, probe, 0.5, Side::Forward, &q).unwrap();
            assert_eq!(off.classification, Classification::Zero, "probe {probe}");
        }
    }
}
