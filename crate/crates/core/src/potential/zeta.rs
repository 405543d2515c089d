//! Riemann zeta function on the real half-line `s > 1`.
//!
//! The sum is truncated after `K - 1` terms and the remainder is replaced by
//! its Euler-Maclaurin expansion
//!
//! ```text
//! sum_{k >= K} k^-s ~ K^(1-s)/(s-1) + K^-s/2 + s K^(-s-1)/12
//! ```
//!
//! whose error is bounded by `s(s+1)(s+2) K^(-s-3) / 720`. `K` is the
//! smallest integer (at least 8) that pushes this bound below the tolerance.

use crate::error::{Error, Result};

/// Default absolute tolerance for zeta evaluations.
pub const ZETA_TOL: f64 = 1e-12;

/// Hard ceiling on the number of summed terms.
const MAX_TERMS: f64 = 5.0e7;

/// `zeta(s)` to absolute accuracy `tol`.
pub fn zeta(s: f64, tol: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("zeta requires s > 1, got {s}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("zeta requires tol > 0, got {tol}")));
    }
    let cutoff = cutoff_for(s, tol);
    Ok(zeta_with_cutoff(s, cutoff))
}

/// Infallible shorthand used for internally validated exponents.
pub(crate) fn zeta_unchecked(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    zeta_with_cutoff(s, cutoff_for(s, ZETA_TOL))
}

/// `zeta(s) - 1` to relative accuracy about `ZETA_TOL`, resolving the
/// excess over one even when it is far below machine epsilon.
pub(crate) fn zeta_minus_one(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    // the excess is at least 2^-s
    let cutoff = cutoff_for(s, ZETA_TOL * 2f64.powf(-s));
    let k = cutoff as f64;
    let tail = k.powf(1.0 - s) / (s - 1.0) + 0.5 * k.powf(-s) + s * k.powf(-s - 1.0) / 12.0;
    let head: f64 = (2..cutoff).rev().map(|n| (n as f64).powf(-s)).sum();
    head + tail
}

fn cutoff_for(s: f64, tol: f64) -> u64 {
    let coeff = s * (s + 1.0) * (s + 2.0) / 720.0;
    // coeff * K^-(s+3) <= tol
    let k = (coeff / tol).powf(1.0 / (s + 3.0)).ceil();
    k.clamp(8.0, MAX_TERMS) as u64
}

fn zeta_with_cutoff(s: f64, cutoff: u64) -> f64 {
    let k = cutoff as f64;
    let tail = k.powf(1.0 - s) / (s - 1.0) + 0.5 * k.powf(-s) + s * k.powf(-s - 1.0) / 12.0;
    // smallest terms first
    let head: f64 = (1..cutoff).rev().map(|n| (n as f64).powf(-s)).sum();
    head + tail
}
