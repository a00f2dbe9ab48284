//! Shared sequence analysis: log-log slope fitting, Aitken acceleration and
//! the classification bands used by every limit estimator in the crate.
//!
//! Input is a list of (ε_n, Δ_n) pairs with ε strictly decreasing, Δ the raw
//! increment at scale ε. Classification compares the fitted decay exponent of
//! |Δ| against the query order β:
//!   slope ≈ β (within `zero_band`)  → the quotient Δ/ε^β has a chance to
//!                                      converge; accept as finite only when
//!                                      the accelerated quotient stabilizes,
//!   slope > β + band                → quotient → 0,
//!   slope < β - band                → quotient diverges.

use crate::velocity::Classification;

#[derive(Debug, Clone)]
pub(crate) struct Classified {
    pub classification: Classification,
    pub value: f64,
    pub fitted_slope: f64,
    pub residual: f64,
    /// All increments were at or below the noise floor; the quotient is an
    /// exact zero rather than a fitted limit.
    pub degenerate_zero: bool,
}

/// Least-squares slope of ln|y| against ln(x) over `pts`.
pub(crate) fn fit_log_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pts {
        let lx = x.ln();
        let ly = y.abs().ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// One pass of Aitken Δ² acceleration. Plateaus (vanishing second difference
/// relative to the sequence scale) are passed through unchanged: the sequence
/// has already converged there and the update would divide by noise.
fn aitken_once(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len().saturating_sub(2));
    for w in v.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let den = (c - b) - (b - a);
        let scale = a.abs().max(b.abs()).max(c.abs()).max(f64::MIN_POSITIVE);
        if den.abs() <= 1e-12 * scale {
            out.push(c);
        } else {
            out.push(c - (c - b) * (c - b) / den);
        }
    }
    out
}

/// Accelerates a quotient sequence twice and reports (limit, residual), the
/// residual being the gap between the last two accelerated entries.
pub(crate) fn extrapolate(v: &[f64]) -> (f64, f64) {
    let mut cur: Vec<f64> = v.to_vec();
    for _ in 0..2 {
        if cur.len() >= 3 {
            cur = aitken_once(&cur);
        }
    }
    let value = *cur.last().expect("extrapolate on empty sequence");
    let residual = if cur.len() >= 2 {
        (cur[cur.len() - 1] - cur[cur.len() - 2]).abs()
    } else {
        0.0
    };
    (value, residual)
}

/// Classifies raw increments against order `beta`. `noise_floor` is the
/// absolute magnitude below which an increment is indistinguishable from
/// rounding error of the underlying evaluations.
pub(crate) fn classify_increments(
    samples: &[(f64, f64)],
    beta: f64,
    zero_band: f64,
    value_tol: f64,
    noise_floor: f64,
) -> Classified {
    // Increments that never rise above the noise floor: the function does not
    // move on this side at any sampled scale, so the quotient is exactly 0.
    if samples.iter().all(|&(_, d)| d.abs() <= noise_floor) {
        return Classified {
            classification: Classification::Finite,
            value: 0.0,
            fitted_slope: f64::INFINITY,
            residual: 0.0,
            degenerate_zero: true,
        };
    }

    // Usable prefix: once an increment falls to the noise floor, everything
    // after it is rounding noise.
    let usable: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .take_while(|&(_, d)| d.abs() > noise_floor && d.is_finite())
        .collect();

    if usable.len() < 4 {
        let slope = fit_log_slope(&usable);
        return Classified {
            classification: Classification::Inconclusive,
            value: 0.0,
            fitted_slope: slope,
            residual: f64::INFINITY,
            degenerate_zero: false,
        };
    }

    // Fit on the asymptotic tail; early levels are routinely pre-asymptotic.
    let k = (usable.len() / 2).clamp(3, 12).min(usable.len());
    let tail = &usable[usable.len() - k..];
    let slope = fit_log_slope(tail);

    if (slope - beta).abs() <= zero_band {
        let quotients: Vec<f64> = tail.iter().map(|&(e, d)| d / e.powf(beta)).collect();
        let (value, residual) = extrapolate(&quotients);
        if residual <= value_tol && value.is_finite() {
            Classified {
                classification: Classification::Finite,
                value,
                fitted_slope: slope,
                residual,
                degenerate_zero: false,
            }
        } else {
            Classified {
                classification: Classification::Inconclusive,
                value: 0.0,
                fitted_slope: slope,
                residual,
                degenerate_zero: false,
            }
        }
    } else if slope > beta + zero_band {
        Classified {
            classification: Classification::Zero,
            value: 0.0,
            fitted_slope: slope,
            residual: 0.0,
            degenerate_zero: false,
        }
    } else {
        Classified {
            classification: Classification::Divergent,
            value: 0.0,
            fitted_slope: slope,
            residual: 0.0,
            degenerate_zero: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric_samples(beta: f64, coeff: f64, levels: u32) -> Vec<(f64, f64)> {
        (0..levels)
            .map(|n| {
                let e = 0.0625 * 0.5f64.powi(n as i32);
                (e, coeff * e.powf(beta))
            })
            .collect()
    }

    #[test]
    fn pure_power_classifies_finite_with_exact_value() {
        let s = geometric_samples(0.5, 1.0, 40);
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-14);
        assert_eq!(c.classification, Classification::Finite);
        assert!((c.value - 1.0).abs() < 1e-12);
        assert!((c.fitted_slope - 0.5).abs() < 1e-9);
        assert!(c.residual <= 1e-4);
    }

    #[test]
    fn faster_decay_classifies_zero() {
        let s = geometric_samples(0.75, 1.0, 40);
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-14);
        assert_eq!(c.classification, Classification::Zero);
    }

    #[test]
    fn slower_decay_classifies_divergent() {
        let s = geometric_samples(0.3, 1.0, 40);
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-14);
        assert_eq!(c.classification, Classification::Divergent);
    }

    #[test]
    fn all_zero_increments_are_an_exact_finite_zero() {
        let s: Vec<(f64, f64)> = (0..20).map(|n| (0.5f64.powi(n), 0.0)).collect();
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-14);
        assert_eq!(c.classification, Classification::Finite);
        assert_eq!(c.value, 0.0);
        assert!(c.degenerate_zero);
    }

    #[test]
    fn aitken_accelerates_geometric_corrections() {
        // quotient 2 + eps^0.25 converges slowly; acceleration nails the limit
        let s: Vec<(f64, f64)> = (0..40)
            .map(|n| {
                let e = 0.0625 * 0.5f64.powi(n);
                (e, (2.0 + e.powf(0.25)) * e.powf(0.5))
            })
            .collect();
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-14);
        assert_eq!(c.classification, Classification::Finite);
        assert!((c.value - 2.0).abs() < 1e-5, "value {}", c.value);
    }

    #[test]
    fn too_few_usable_samples_is_inconclusive() {
        let s = geometric_samples(0.5, 1.0, 3);
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-14);
        assert_eq!(c.classification, Classification::Inconclusive);
    }

    #[test]
    fn noise_floor_truncates_the_usable_prefix() {
        // increments collapse to rounding noise after level 9
        let s: Vec<(f64, f64)> = (0..30)
            .map(|n| {
                let e = 0.0625 * 0.5f64.powi(n);
                let d = if n < 10 { e.powf(0.5) } else { 1e-17 };
                (e, d)
            })
            .collect();
        let c = classify_increments(&s, 0.5, 0.05, 1e-4, 1e-15);
        assert_eq!(c.classification, Classification::Finite);
        assert!((c.value - 1.0).abs() < 1e-9);
    }
}
