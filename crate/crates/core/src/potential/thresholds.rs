//! Exponent thresholds above which the spear minimizer is unique
//! (`alpha_dag`) and above which the quantitative spacing estimates hold
//! (`alpha_star`).
//!
//! Both are the largest zero of an explicit function of `alpha` that tends
//! to `-inf` (or a negative constant) as `alpha -> beta+` and to `+inf` as
//! `alpha -> inf`. The zero is bracketed by scanning offsets
//! `alpha = beta + 10 tol * 1.5^k` up to an offset of [`SCAN_CAP`], keeping
//! the last sign change seen, and then refined by bisection.

use super::zeta_unchecked;
use crate::error::{Error, Result};

/// Default bisection tolerance on `alpha`.
pub const ROOT_TOL: f64 = 1e-8;

/// Largest offset `alpha - beta` examined by the bracketing scan. Both
/// threshold functions stay positive beyond it for any `beta` of interest.
pub const SCAN_CAP: f64 = 1e6;

/// `F_beta(alpha)`: positive exactly when the uniform Hessian dominance gap
/// is positive.
pub fn convexity_margin(alpha: f64, beta: f64) -> f64 {
    let z_b = zeta_unchecked(beta);
    let z_b1 = zeta_unchecked(beta + 1.0);
    f_beta(alpha, beta, z_b, z_b1)
}

/// `G_beta(alpha)`: positive exactly when the contraction factor of the
/// inverse-decay estimate (decay exponent `beta`) drops below one.
pub fn rate_margin(alpha: f64, beta: f64) -> f64 {
    let c = GConsts::new(beta);
    c.eval(alpha, beta)
}

fn f_beta(alpha: f64, beta: f64, z_b: f64, z_b1: f64) -> f64 {
    alpha - beta - z_b.powf((beta + 2.0) / (alpha - beta)) * (beta + 1.0) * (z_b1 + z_b - 2.0)
}

struct GConsts {
    z_b: f64,
    z_b1: f64,
    inv_r: f64,
}

impl GConsts {
    fn new(beta: f64) -> Self {
        let z_b = zeta_unchecked(beta);
        let z_b1 = zeta_unchecked(beta + 1.0);
        let z_2b = zeta_unchecked(2.0 * beta);
        let delta = 2.0 * (1.0 + 2f64.powf(beta)) * z_b;
        let inv_r = 2.0 / (delta + (delta * delta + 8.0 * z_2b).sqrt());
        Self { z_b, z_b1, inv_r }
    }

    fn eval(&self, alpha: f64, beta: f64) -> f64 {
        let ratio = beta * (alpha - beta)
            / ((beta + 1.0) * self.z_b.powf((beta + 2.0) / (alpha - beta)));
        self.inv_r * (ratio - beta * (self.z_b1 - 1.0)) - 1.0
    }
}

/// Largest zero of `F_beta`.
pub fn alpha_dag(beta: f64, tol: f64) -> Result<f64> {
    check_args(beta, tol)?;
    let z_b = zeta_unchecked(beta);
    let z_b1 = zeta_unchecked(beta + 1.0);
    largest_zero(|a| f_beta(a, beta, z_b, z_b1), beta, tol, "alpha_dag")
}

/// Largest zero of `G_beta`.
pub fn alpha_star(beta: f64, tol: f64) -> Result<f64> {
    check_args(beta, tol)?;
    let c = GConsts::new(beta);
    largest_zero(|a| c.eval(a, beta), beta, tol, "alpha_star")
}

fn check_args(beta: f64, tol: f64) -> Result<()> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("threshold requires beta > 1, got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("threshold requires tol > 0, got {tol}")));
    }
    Ok(())
}

fn largest_zero(f: impl Fn(f64) -> f64, beta: f64, tol: f64, what: &str) -> Result<f64> {
    let mut offset = 10.0 * tol;
    let mut prev = (beta + offset, f(beta + offset));
    let mut bracket = None;
    while offset < SCAN_CAP {
        offset = (offset * 1.5).min(SCAN_CAP);
        let x = beta + offset;
        let fx = f(x);
        if (prev.1 <= 0.0) != (fx <= 0.0) {
            bracket = Some((prev.0, x));
        }
        prev = (x, fx);
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Bracketing(format!("{what}: no sign change for beta = {beta} below offset {SCAN_CAP}"))
    })?;
    let lo_neg = f(lo) <= 0.0;
    // stop well inside the tolerance so the midpoint residual is small
    while hi - lo > 0.25 * tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm <= 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
