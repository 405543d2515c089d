//! Rings: `N` particles equally spaced on a circle with tangential spins.
//!
//! By symmetry every position gradient is radial and every spin gradient is
//! parallel to the spin, so the ring is critical exactly when the radial
//! function `r -> A_N / r^(alpha+1) - B_N / r^(beta+1)` vanishes, where
//!
//! ```text
//! A_N = alpha A / 2^(alpha+1) * sum_{j=1}^{N-1} sin(j pi / N)^-alpha
//! B_N = beta / 2^(beta+1)     * sum_{j=1}^{N-1} [(B - B0) cos^2(j pi / N) + B0] sin(j pi / N)^-beta
//! ```
//!
//! The critical radius is `(A_N / B_N)^(1 / (alpha - beta))`. Both sums are
//! accumulated relative to their largest term (`j = 1`) with compensated
//! addition, and the radius is formed from logarithms so that large
//! exponents and large `N` do not overflow.

use serde::{Deserialize, Serialize};

use crate::dynamics::{energy_gradient, Particle, SystemState, Vec3};
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::potential::{characteristic_distances, LJParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSolution {
    pub n: usize,
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub radius: f64,
    /// `2 r sin(pi / N)`.
    pub nn_distance: f64,
    /// Zero of the radial function found by bisection.
    pub bisection_radius: f64,
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.carry += if self.sum.abs() >= x.abs() { (self.sum - t) + x } else { (x - t) + self.sum };
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln A_N` and `ln B_N`.
fn log_sums(n: usize, p: &LJParams) -> (f64, f64) {
    let (alpha, beta) = (p.alpha(), p.beta());
    let step = std::f64::consts::PI / n as f64;
    let s1 = step.sin();
    let weight = |x: f64| (p.b() - p.b0()) * x.cos().powi(2) + p.b0();
    let mut a = Accumulator::default();
    let mut b = Accumulator::default();
    for j in 1..n {
        let x = j as f64 * step;
        let ratio = s1 / x.sin();
        a.add(ratio.powf(alpha));
        b.add(weight(x) * ratio.powf(beta));
    }
    let ln2 = std::f64::consts::LN_2;
    let ln_a = (alpha * p.a()).ln() - (alpha + 1.0) * ln2 - alpha * s1.ln() + a.total().ln();
    let ln_b = beta.ln() - (beta + 1.0) * ln2 - beta * s1.ln() + b.total().ln();
    (ln_a, ln_b)
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParams { key: "N", reason: format!("need N >= {min}, got {n}") });
    }
    Ok(())
}

/// `(A_N, B_N)`.
pub fn ring_sums(n: usize, p: &LJParams) -> Result<(f64, f64)> {
    check_n(n, 2)?;
    let (ln_a, ln_b) = log_sums(n, p);
    Ok((ln_a.exp(), ln_b.exp()))
}

/// `A_N / r^(alpha+1) - B_N / r^(beta+1)`, scaled by `r^(beta+1) / B_N`.
fn scaled_radial(r: f64, ln_a: f64, ln_b: f64, gap: f64) -> f64 {
    (ln_a - ln_b - gap * r.ln()).exp() - 1.0
}

fn bisect_radius(ln_a: f64, ln_b: f64, gap: f64) -> f64 {
    let f = |r: f64| scaled_radial(r, ln_a, ln_b, gap);
    // the scaled function decreases from +inf to -1
    let (mut lo, mut hi) = (1.0, 1.0);
    while f(lo) <= 0.0 {
        lo *= 0.5;
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn ring_radius(n: usize, p: &LJParams) -> Result<RingSolution> {
    check_n(n, 2)?;
    let (ln_a, ln_b) = log_sums(n, p);
    let gap = p.alpha() - p.beta();
    let radius = ((ln_a - ln_b) / gap).exp();
    Ok(RingSolution {
        n,
        a_tilde: ln_a.exp(),
        b_tilde: ln_b.exp(),
        radius,
        nn_distance: 2.0 * radius * (std::f64::consts::PI / n as f64).sin(),
        bisection_radius: bisect_radius(ln_a, ln_b, gap),
    })
}

/// `x_k = r (cos t_k, sin t_k, 0)`, `m_k = (-sin t_k, cos t_k, 0)` with `t_k = 2 pi k / N`.
pub fn ring_configuration(n: usize, r: f64) -> Result<SystemState> {
    check_n(n, 2)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParams { key: "r", reason: format!("must be positive, got {r}") });
    }
    let particles = (0..n)
        .map(|k| {
            let (sin, cos) = (std::f64::consts::TAU * k as f64 / n as f64).sin_cos();
            Particle {
                x: Vec3::new(r * cos, r * sin, 0.0),
                m: Vec3::new(-sin, cos, 0.0),
                v: Vec3::zeros(),
                omega: Vec3::zeros(),
            }
        })
        .collect();
    Ok(SystemState { particles, time: 0.0 })
}

/// Closed-form ring gradients at radius `r`: the radial coefficient of
/// `dU/dx_i` (along `x_i / |x_i|`) and the coefficient of `dU/dm_i` along `m_i`.
pub fn ring_gradient_coefficients(n: usize, r: f64, p: &LJParams) -> Result<(f64, f64)> {
    check_n(n, 2)?;
    let (alpha, beta) = (p.alpha(), p.beta());
    let (a, b) = ring_sums(n, p)?;
    let radial = b / r.powf(beta + 1.0) - a / r.powf(alpha + 1.0);
    let step = std::f64::consts::PI / n as f64;
    let mut spin = Accumulator::default();
    for j in 1..n {
        let s = (j as f64 * step).sin();
        spin.add((p.b() - p.b0()) / s.powf(beta - 2.0) - p.b() / s.powf(beta));
    }
    Ok((radial, spin.total() / (2f64.powf(beta) * r.powf(beta))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingGradientReport {
    pub n: usize,
    pub r: f64,
    /// Largest difference between closed-form and pairwise gradients,
    /// relative to the largest pairwise gradient component.
    pub relative_difference: f64,
    /// Largest radial force component.
    pub max_radial_force: f64,
    /// Largest tangential or out-of-plane force component.
    pub max_transverse_force: f64,
    /// Largest component of `dU/dm_i` orthogonal to `m_i`.
    pub max_spin_misalignment: f64,
    /// Largest gradient component, for scaling the residuals above.
    pub scale: f64,
}

/// Compares the closed forms with the pairwise gradient of the ring at `r`.
pub fn ring_gradient_check(n: usize, r: f64, p: &LJParams) -> Result<RingGradientReport> {
    check_n(n, 3)?;
    let s = ring_configuration(n, r)?;
    let g = energy_gradient(&s, p)?;
    let (radial, spin) = ring_gradient_coefficients(n, r, p)?;
    let scale = g.dx.iter().chain(&g.dm).fold(0.0f64, |m, v| m.max(v.amax()));
    let mut report = RingGradientReport {
        n,
        r,
        relative_difference: 0.0,
        max_radial_force: 0.0,
        max_transverse_force: 0.0,
        max_spin_misalignment: 0.0,
        scale,
    };
    for (q, (dx, dm)) in s.particles.iter().zip(g.dx.iter().zip(&g.dm)) {
        let outward = q.x / q.x.norm();
        let expected_x = outward * radial;
        let expected_m = q.m * spin;
        let diff = (dx - expected_x).amax().max((dm - expected_m).amax());
        report.relative_difference = report.relative_difference.max(diff / scale.max(f64::MIN_POSITIVE));
        let along = dx.dot(&outward);
        report.max_radial_force = report.max_radial_force.max(along.abs());
        report.max_transverse_force = report.max_transverse_force.max((dx - outward * along).amax());
        report.max_spin_misalignment = report.max_spin_misalignment.max(q.m.cross(dm).amax());
    }
    Ok(report)
}

/// Regime of `|2 r_N sin(pi/N) - h_bar|` predicted for the attraction exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingRegime {
    /// `N^-2` for `beta > 3`.
    InverseSquare,
    /// `N^-2 log N` for `beta = 3`.
    InverseSquareLog,
    /// `N^(1 - beta)` for `1 < beta < 3`.
    PowerOneMinusBeta,
}

impl RingRegime {
    pub fn for_beta(beta: f64) -> Self {
        if beta > 3.0 {
            Self::InverseSquare
        } else if beta == 3.0 {
            Self::InverseSquareLog
        } else {
            Self::PowerOneMinusBeta
        }
    }

    /// Predicted log-log slope (ignoring the logarithm at `beta = 3`).
    pub fn predicted_slope(&self, beta: f64) -> f64 {
        match self {
            Self::InverseSquare | Self::InverseSquareLog => -2.0,
            Self::PowerOneMinusBeta => 1.0 - beta,
        }
    }

    /// The predicted rate at `n`.
    pub fn rate(&self, n: f64, beta: f64) -> f64 {
        match self {
            Self::InverseSquare => n.powi(-2),
            Self::InverseSquareLog => n.ln() / (n * n),
            Self::PowerOneMinusBeta => n.powf(1.0 - beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingRow {
    pub n: usize,
    pub radius: f64,
    pub nn_distance: f64,
    /// `|2 r_N sin(pi/N) - h_bar|`.
    pub nn_error: f64,
    /// `|2 pi r_N / N - h_bar|`.
    pub arc_error: f64,
    /// `nn_error` divided by the regime's rate.
    pub normalized_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingAsymptotics {
    pub h_bar: f64,
    pub regime: RingRegime,
    pub predicted_slope: f64,
    /// Log-log slope of `nn_error`, fitted without the two smallest `N`.
    pub fitted_slope: Option<f64>,
    pub rows: Vec<RingRow>,
}

pub fn ring_asymptotics(p: &LJParams, ns: &[usize]) -> Result<RingAsymptotics> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("particle counts must be strictly increasing".into()));
    }
    if ns.first().is_some_and(|&n| n < 8) {
        return Err(Error::Domain("ring sweeps start at N >= 8".into()));
    }
    let h_bar = characteristic_distances(p).h_bar;
    let regime = RingRegime::for_beta(p.beta());
    let rows: Vec<RingRow> = ns
        .iter()
        .map(|&n| {
            let sol = ring_radius(n, p)?;
            let nn_error = (sol.nn_distance - h_bar).abs();
            Ok(RingRow {
                n,
                radius: sol.radius,
                nn_distance: sol.nn_distance,
                nn_error,
                arc_error: (std::f64::consts::TAU * sol.radius / n as f64 - h_bar).abs(),
                normalized_error: nn_error / regime.rate(n as f64, p.beta()),
            })
        })
        .collect::<Result<_>>()?;
    let tail = rows.get(2..).unwrap_or(&[]);
    let xs: Vec<f64> = tail.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.nn_error).collect();
    Ok(RingAsymptotics {
        h_bar,
        regime,
        predicted_slope: regime.predicted_slope(p.beta()),
        fitted_slope: loglog_slope(&xs, &ys),
        rows,
    })
}
