//! Gauss quadrature rules and an adaptive two-grid integration driver.
//!
//! Node/weight tables are cached per rule size (and per Jacobi exponent
//! pair), so repeated integrals at the same size cost one table lookup.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::special;

/// Relative agreement target between successive node doublings.
const REL_TARGET: f64 = 1e-8;
/// Hard cap on rule size before giving up with a quadrature error.
pub(crate) const MAX_NODES: usize = 4096;

type Rule = Arc<Vec<(f64, f64)>>;

fn gl_cache() -> &'static Mutex<HashMap<usize, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn gj_cache() -> &'static Mutex<HashMap<(usize, u64, u64), Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending by node.
pub(crate) fn gauss_legendre(n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Param("quadrature rule needs at least one node".into()));
    }
    if let Some(rule) = gl_cache().lock().expect("quadrature cache lock").get(&n) {
        return Ok(rule.clone());
    }
    let mut pairs = vec![(0.0f64, 0.0f64); n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = pk;
            }
            dp = if n == 1 {
                1.0
            } else {
                nf * (x * p1 - p0) / (x * x - 1.0)
            };
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Roots come out descending in i; mirror to fill both halves.
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let rule = Arc::new(pairs);
    gl_cache()
        .lock()
        .expect("quadrature cache lock")
        .insert(n, rule.clone());
    Ok(rule)
}

/// Gauss-Jacobi nodes and weights on [-1, 1] for the weight
/// (1-x)^alpha (1+x)^beta, ascending by node.
pub(crate) fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Param("quadrature rule needs at least one node".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Param(format!(
            "Jacobi exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = gj_cache().lock().expect("quadrature cache lock").get(&key) {
        return Ok(rule.clone());
    }

    // Golub-Welsch: eigenvalues of the symmetric tridiagonal recurrence
    // matrix are the nodes; squared first eigenvector components scaled by
    // the zeroth moment are the weights.
    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n];
    let ab = alpha + beta;
    diag[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let denom = 2.0 * kf + ab;
        diag[k] = (beta * beta - alpha * alpha) / (denom * (denom + 2.0));
        // The generic off-diagonal is 0/0 at k=1 when α+β = -1; the reduced
        // first coefficient removes that singularity.
        off[k - 1] = if k == 1 {
            (4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt()
        } else {
            (2.0 / denom)
                * ((kf * (kf + alpha) * (kf + beta) * (kf + ab))
                    / ((denom + 1.0) * (denom - 1.0)))
                    .sqrt()
        };
    }
    off[n - 1] = 0.0;
    let mut z = vec![0.0f64; n];
    z[0] = 1.0;
    tridiag_eigen(&mut diag, &mut off, &mut z)?;

    let mu0 = (ab + 1.0).exp2() * special::beta(alpha + 1.0, beta + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&z)
        .map(|(&x, &zi)| (x, mu0 * zi * zi))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = Arc::new(pairs);
    gj_cache()
        .lock()
        .expect("quadrature cache lock")
        .insert(key, rule.clone());
    Ok(rule)
}

/// Implicit-shift QL for a symmetric tridiagonal matrix, rotating `z` along.
///
/// On return `d` holds the eigenvalues and `z` the first row of the
/// eigenvector matrix (given `z = e_1` on entry).
fn tridiag_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Param(
                    "tridiagonal eigenvalue iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Fixed-size Gauss-Legendre integral of `f` over [a, b].
pub(crate) fn integrate_gl(
    n: usize,
    a: f64,
    b: f64,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let rule = gauss_legendre(n)?;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in rule.iter() {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

/// Integrates `f` over [a, b], doubling the rule size until two successive
/// results agree to the internal relative target.
pub(crate) fn adaptive_gl(
    start: usize,
    a: f64,
    b: f64,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut n = start.clamp(8, MAX_NODES);
    let mut prev = integrate_gl(n, a, b, f)?;
    while n < MAX_NODES {
        n *= 2;
        let cur = integrate_gl(n, a, b, f)?;
        if (cur - prev).abs() <= REL_TARGET * cur.abs() + 1e-300 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        estimate: prev,
        nodes: n,
    })
}

/// Weighted integral sum Σ w_i g(x_i) under a Jacobi rule, doubling until
/// two successive sizes agree.
pub(crate) fn adaptive_gj(
    start: usize,
    alpha: f64,
    beta: f64,
    g: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let mut n = start.clamp(8, MAX_NODES);
    let mut prev = apply_rule(&gauss_jacobi(n, alpha, beta)?, g)?;
    while n < MAX_NODES {
        n *= 2;
        let cur = apply_rule(&gauss_jacobi(n, alpha, beta)?, g)?;
        if (cur - prev).abs() <= REL_TARGET * cur.abs() + 1e-300 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        estimate: prev,
        nodes: n,
    })
}

fn apply_rule(rule: &Rule, g: &mut dyn FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for &(x, w) in rule.iter() {
        acc += w * g(x)?;
    }
    Ok(acc)
}
