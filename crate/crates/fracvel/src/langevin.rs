//! Paths driven by a fractional-order update rule, and the partition
//! arithmetic showing why their noise coefficient must oscillate in sign.

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::velocity;

/// Longest admissible total time span steps·dt.
pub const HORIZON: f64 = 1e6;

/// Sign process of the noise coefficient B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Oscillation {
    /// Deterministic ±σ alternation, starting positive.
    #[default]
    Alternating,
    /// Seeded fair ±σ coin per step.
    RandomSign,
    /// Constant +σ; kept for demonstrating the scaling violation.
    Constant,
}

/// Drift coefficient a(x, t).
pub type Drift = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Specification of one path x_{k+1} = x_k + a(x_k, t_k)·dt + B_k·dt^β.
#[derive(Clone)]
pub struct PathSpec {
    /// Order of the noise term, in (0, 1].
    pub beta: f64,
    pub steps: u32,
    pub dt: f64,
    pub drift: Drift,
    /// Magnitude σ ≥ 0 of the noise coefficient.
    pub noise_amp: f64,
    pub oscillation: Oscillation,
    /// Seed for the random-sign process; ignored by the other modes.
    pub seed: u64,
    pub x0: f64,
}

impl fmt::Debug for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathSpec")
            .field("beta", &self.beta)
            .field("steps", &self.steps)
            .field("dt", &self.dt)
            .field("noise_amp", &self.noise_amp)
            .field("oscillation", &self.oscillation)
            .field("seed", &self.seed)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Param(format!(
                "noise order must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if self.steps == 0 {
            return Err(Error::Param("a path needs at least one step".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Param(format!(
                "step size must be positive, got {}",
                self.dt
            )));
        }
        if !(self.noise_amp >= 0.0) || !self.noise_amp.is_finite() {
            return Err(Error::Param(format!(
                "noise amplitude must be nonnegative, got {}",
                self.noise_amp
            )));
        }
        if self.steps as f64 * self.dt > HORIZON {
            return Err(Error::Param(format!(
                "total span {} exceeds the horizon {HORIZON}",
                self.steps as f64 * self.dt
            )));
        }
        if !self.x0.is_finite() {
            return Err(Error::Param("starting point must be finite".into()));
        }
        Ok(())
    }
}

/// Generates the path as (t, x) pairs, length steps + 1 including the start.
pub fn generate_path(spec: &PathSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let mut rng = StdRng::seed_from_u64(spec.seed);
    let gain = spec.dt.powf(spec.beta);
    let mut out = Vec::with_capacity(spec.steps as usize + 1);
    let mut x = spec.x0;
    out.push((0.0, x));
    for k in 0..spec.steps {
        let t = k as f64 * spec.dt;
        let b = match spec.oscillation {
            Oscillation::Alternating => {
                if k % 2 == 0 {
                    spec.noise_amp
                } else {
                    -spec.noise_amp
                }
            }
            Oscillation::RandomSign => {
                if rng.gen_bool(0.5) {
                    spec.noise_amp
                } else {
                    -spec.noise_amp
                }
            }
            Oscillation::Constant => spec.noise_amp,
        };
        x += (spec.drift)(x, t) * spec.dt + b * gain;
        out.push(((k + 1) as f64 * spec.dt, x));
    }
    Ok(out)
}

/// One-step versus N-fold-refined difference quotients of a constant-B path.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingCheck {
    /// Quotient over the macro step: B itself.
    pub lhs: f64,
    /// Quotient after refining into N micro steps: N^{1-β}·B.
    pub rhs: f64,
    /// rhs/lhs = N^{1-β}; 1 exactly when β = 1. Reported as 1 for B = 0.
    pub ratio: f64,
    pub zero_input: bool,
}

/// The partition identity behind the sign-oscillation requirement: a
/// constant coefficient inflates the refined quotient by N^{1-β}, so the
/// two can agree only when β = 1 or B = 0.
pub fn partition_scaling_check(bval: f64, beta: f64, n: u32) -> Result<ScalingCheck> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Param(format!(
            "noise order must lie in (0, 1], got {beta}"
        )));
    }
    if n < 2 {
        return Err(Error::Param(format!(
            "refinement factor must be at least 2, got {n}"
        )));
    }
    if bval == 0.0 {
        return Ok(ScalingCheck {
            lhs: 0.0,
            rhs: 0.0,
            ratio: 1.0,
            zero_input: true,
        });
    }
    let ratio = ((n as f64).log2() * (1.0 - beta)).exp2();
    Ok(ScalingCheck {
        lhs: bval,
        rhs: ratio * bval,
        ratio,
        zero_input: false,
    })
}

const LAGS: [usize; 5] = [1, 2, 4, 8, 16];

/// Median over interior probe points of a through-origin log-log regression
/// of |x(t+τ) - x(t)| on τ, over lags {1, 2, 4, 8, 16} steps.
///
/// Increments below the rounding floor are dropped (exact cancellations of
/// an alternating path would otherwise contaminate the fit); a path whose
/// increments never rise above the floor has no measurable exponent.
pub fn path_holder_exponent(path: &[(f64, f64)], probes: u32) -> Result<f64> {
    if probes == 0 {
        return Err(Error::Param("probe count must be positive".into()));
    }
    if path.len() < 2 * probes as usize {
        return Err(Error::InsufficientData(format!(
            "path of {} points cannot support {probes} probes",
            path.len()
        )));
    }
    let n = path.len();
    // Exclude 5% margins so every increment endpoint stays interior.
    let margin = (n as f64 * 0.05).ceil() as usize;
    let lo = margin;
    let max_lag = LAGS[LAGS.len() - 1];
    let hi = match n.checked_sub(1 + margin + max_lag) {
        Some(h) if h >= lo => h,
        _ => {
            return Err(Error::InsufficientData(
                "margins leave no interior probe window".into(),
            ))
        }
    };
    let mut slopes = Vec::with_capacity(probes as usize);
    for p in 0..probes as usize {
        let i = if probes == 1 {
            (lo + hi) / 2
        } else {
            lo + (hi - lo) * p / (probes as usize - 1)
        };
        let (ti, xi) = path[i];
        let mut num = 0.0;
        let mut den = 0.0;
        for &lag in &LAGS {
            let (tj, xj) = path[i + lag];
            let eps = tj - ti;
            let dx = (xj - xi).abs();
            if !(eps > 0.0) || dx <= velocity::increment_noise_floor(xi, xj) {
                continue;
            }
            let le = eps.ln();
            num += le * dx.ln();
            den += le * le;
        }
        if den > 0.0 {
            slopes.push(num / den);
        }
    }
    if slopes.is_empty() {
        return Err(Error::InsufficientData(
            "no increment rose above the rounding floor at any probe".into(),
        ));
    }
    slopes.sort_by(f64::total_cmp);
    let m = slopes.len();
    Ok(if m % 2 == 1 {
        slopes[m / 2]
    } else {
        0.5 * (slopes[m / 2 - 1] + slopes[m / 2])
    })
}
