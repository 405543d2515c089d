//! Large-`N` behavior of the spear minimizer.
//!
//! In the bulk the spacings approach `h_bar` at rate `N^(1 - beta)`, while
//! the end spacing tends to `h_tilde` instead. [`refined_bounds`] checks the
//! two-sided envelope for one solution, [`fit_refined_constants`] extracts
//! the empirical constants from a sweep, and [`asymptotic_report`] tabulates
//! center and boundary spacings with fitted log-log slopes.

use serde::{Deserialize, Serialize};

use super::{solve_spear, SpearSolution};
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::potential::{alpha_star, characteristic_distances, LJParams, ROOT_TOL};

/// Envelope check for a single solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedBounds {
    pub n: usize,
    /// `beta >= 3` and `alpha > alpha_star(beta)`.
    pub hypotheses_hold: bool,
    pub min_spacing: f64,
    pub max_spacing: f64,
    /// `min_k h_k - h_bar`; positive when the lower bound holds.
    pub lower_margin: f64,
    /// `max_k h_k - h_tilde`; the upper bound allows `C / N^beta`.
    pub upper_excess: f64,
    /// `h_tilde + (h_hat - h_tilde) / 2 - max_k h_k`; positive inside the loose envelope.
    pub envelope_margin: f64,
}

pub fn refined_bounds(sol: &SpearSolution, p: &LJParams) -> RefinedBounds {
    let d = characteristic_distances(p);
    let h = sol.spacing.as_slice();
    let min = h.iter().copied().fold(f64::INFINITY, f64::min);
    let max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    RefinedBounds {
        n: sol.spacing.n_particles(),
        hypotheses_hold: hypotheses_hold(p),
        min_spacing: min,
        max_spacing: max,
        lower_margin: min - d.h_bar,
        upper_excess: max - d.h_tilde,
        envelope_margin: d.h_tilde + 0.5 * (d.h_hat - d.h_tilde) - max,
    }
}

fn hypotheses_hold(p: &LJParams) -> bool {
    p.beta() >= 3.0 && alpha_star(p.beta(), ROOT_TOL).is_ok_and(|s| p.alpha() > s)
}

/// Empirical constants of the envelope `h_bar + c / N^(beta-1) <= h_k <= h_tilde + C / N^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedFit {
    /// Smallest `(min_k h_k - h_bar) N^(beta - 1)` over the sweep.
    pub c_lower: f64,
    /// Smallest `C >= 0` with `max_k h_k <= h_tilde + C / N^beta` over the sweep.
    pub c_upper: f64,
}

pub fn fit_refined_constants(reports: &[RefinedBounds], p: &LJParams) -> Option<RefinedFit> {
    if reports.is_empty() {
        return None;
    }
    let beta = p.beta();
    let c_lower = reports
        .iter()
        .map(|r| r.lower_margin * (r.n as f64).powf(beta - 1.0))
        .fold(f64::INFINITY, f64::min);
    let c_upper = reports
        .iter()
        .map(|r| (r.upper_excess * (r.n as f64).powf(beta)).max(0.0))
        .fold(0.0, f64::max);
    Some(RefinedFit { c_lower, c_upper })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub n: usize,
    /// `h_{floor(N/2)}` (1-based index).
    pub center: f64,
    /// `h_{floor(N/4)}`.
    pub quarter: f64,
    /// `h_1`.
    pub boundary: f64,
    pub center_error: f64,
    pub quarter_error: f64,
    /// `|h_1 - h_tilde|`.
    pub boundary_to_tilde: f64,
    /// `|h_1 - h_bar|`.
    pub boundary_to_bar: f64,
    pub min_spacing: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTable {
    pub hypotheses_hold: bool,
    pub rows: Vec<AsymptoticRow>,
    /// Log-log slope of `|h_{N/2} - h_bar|` against `N`.
    pub center_slope: Option<f64>,
    /// Log-log slope of `|h_1 - h_tilde|` against `N`.
    pub boundary_slope: Option<f64>,
}

pub fn asymptotic_report(p: &LJParams, ns: &[usize], tol: f64, max_iter: usize) -> Result<AsymptoticTable> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("particle counts must be strictly increasing".into()));
    }
    if ns.first().is_some_and(|&n| n < 4) {
        return Err(Error::Domain("asymptotic sweeps need N >= 4".into()));
    }
    let d = characteristic_distances(p);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let sol = solve_spear(n, p, tol, max_iter)?;
        let h = sol.spacing.as_slice();
        let center = h[n / 2 - 1];
        let quarter = h[(n / 4).max(1) - 1];
        let boundary = h[0];
        rows.push(AsymptoticRow {
            n,
            center,
            quarter,
            boundary,
            center_error: (center - d.h_bar).abs(),
            quarter_error: (quarter - d.h_bar).abs(),
            boundary_to_tilde: (boundary - d.h_tilde).abs(),
            boundary_to_bar: (boundary - d.h_bar).abs(),
            min_spacing: h.iter().copied().fold(f64::INFINITY, f64::min),
            iterations: sol.iterations,
        });
    }
    let ns_f: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let center: Vec<f64> = rows.iter().map(|r| r.center_error).collect();
    let boundary: Vec<f64> = rows.iter().map(|r| r.boundary_to_tilde).collect();
    Ok(AsymptoticTable {
        hypotheses_hold: hypotheses_hold(p),
        center_slope: loglog_slope(&ns_f, &center),
        boundary_slope: loglog_slope(&ns_f, &boundary),
        rows,
    })
}
