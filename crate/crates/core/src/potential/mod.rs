//! The scalar Lennard-Jones profile `L(h) = A h^-alpha - B h^-beta` that
//! governs aligned chains, together with the distances and thresholds
//! derived from it.
//!
//! All lengths are in model units (particle diameter of order one).

mod thresholds;
mod zeta;

pub use thresholds::{alpha_dag, alpha_star, convexity_margin, rate_margin, ROOT_TOL, SCAN_CAP};
pub use zeta::{zeta, ZETA_TOL};
pub(crate) use zeta::zeta_unchecked;
use zeta::zeta_minus_one;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five constants shared by the repulsive and dipolar potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LJParams {
    a: f64,
    b: f64,
    b0: f64,
    alpha: f64,
    beta: f64,
}

impl LJParams {
    /// Validates `A, B, B0 > 0` and `alpha > beta > 1`.
    pub fn new(a: f64, b: f64, b0: f64, alpha: f64, beta: f64) -> Result<Self> {
        let positive = |key, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams {
                    key,
                    reason: format!("must be finite and > 0, got {v}"),
                })
            }
        };
        positive("A", a)?;
        positive("B", b)?;
        positive("B0", b0)?;
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::InvalidParams {
                key: "beta",
                reason: format!("must be > 1, got {beta}"),
            });
        }
        if !(alpha > beta) || !alpha.is_finite() {
            return Err(Error::InvalidParams {
                key: "alpha",
                reason: format!("must exceed beta = {beta}, got {alpha}"),
            });
        }
        Ok(Self { a, b, b0, alpha, beta })
    }

    /// `A = B = B0 = 1` with the given exponents.
    pub fn unit(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, alpha, beta)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn b0(&self) -> f64 {
        self.b0
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(L, L', L'')` at `h > 0`, sharing one logarithm.
    #[inline]
    pub(crate) fn profile(&self, h: f64) -> (f64, f64, f64) {
        let ln = h.ln();
        let rep = self.a * (-self.alpha * ln).exp();
        let att = self.b * (-self.beta * ln).exp();
        let inv = 1.0 / h;
        let inv2 = inv * inv;
        (
            rep - att,
            (-self.alpha * rep + self.beta * att) * inv,
            (self.alpha * (self.alpha + 1.0) * rep - self.beta * (self.beta + 1.0) * att) * inv2,
        )
    }

    #[inline]
    pub(crate) fn d1(&self, h: f64) -> f64 {
        self.profile(h).1
    }

    #[inline]
    pub(crate) fn d2(&self, h: f64) -> f64 {
        self.profile(h).2
    }

    /// Third derivative; its sign change sits at `h_ddag`.
    pub fn d3(&self, h: f64) -> f64 {
        let (al, be) = (self.alpha, self.beta);
        -al * (al + 1.0) * (al + 2.0) * self.a * h.powf(-al - 3.0)
            + be * (be + 1.0) * (be + 2.0) * self.b * h.powf(-be - 3.0)
    }

    /// `L_sharp(x) = sum_l L'(l x)`, vanishing at `h_tilde`.
    pub fn lattice_sharp(&self, x: f64) -> f64 {
        let (al, be) = (self.alpha, self.beta);
        be * self.b * zeta_unchecked(be + 1.0) * x.powf(-be - 1.0)
            - al * self.a * zeta_unchecked(al + 1.0) * x.powf(-al - 1.0)
    }

    /// `L_flat(x) = sum_l l L'(l x)`, vanishing at `h_bar`.
    pub fn lattice_flat(&self, x: f64) -> f64 {
        let (al, be) = (self.alpha, self.beta);
        be * self.b * zeta_unchecked(be) * x.powf(-be - 1.0)
            - al * self.a * zeta_unchecked(al) * x.powf(-al - 1.0)
    }
}

fn check_length(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("distance must be finite and > 0, got {h}")))
    }
}

/// `L(h) = A h^-alpha - B h^-beta`.
pub fn lj_value(h: f64, p: &LJParams) -> Result<f64> {
    check_length(h)?;
    Ok(p.profile(h).0)
}

/// `L'(h)`.
pub fn lj_d1(h: f64, p: &LJParams) -> Result<f64> {
    check_length(h)?;
    Ok(p.profile(h).1)
}

/// `L''(h)`.
pub fn lj_d2(h: f64, p: &LJParams) -> Result<f64> {
    check_length(h)?;
    Ok(p.profile(h).2)
}

/// The eight characteristic lengths of a parameter set.
///
/// Each is `(ratio)^(1/(alpha - beta))`:
///
/// | field     | ratio                                              |
/// |-----------|----------------------------------------------------|
/// | `h_check` | `aA / (bB z(b))`                                   |
/// | `h_bar`   | `aA z(a) / (bB z(b))`                              |
/// | `h_hat`   | `aA / (bB)`                                        |
/// | `h_tilde` | `aA z(a+1) / (bB z(b+1))`                          |
/// | `h_dag`   | `a(a+1)A / (b(b+1)B)`                              |
/// | `h_ddag`  | `a(a+1)(a+2)A / (b(b+1)(b+2)B)`                    |
/// | `h_sharp` | `a(a+1)A z(a+1) / (b(b+1)B z(b+1))`                |
/// | `h_flat`  | `a(a+1)A z(a) / (b(b+1)B z(b))`                    |
///
/// with `a = alpha`, `b = beta` and `z` the zeta function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSet {
    /// Lower bound on neighbor spacing at any spear critical point.
    pub h_check: f64,
    /// Bulk limit spacing.
    pub h_bar: f64,
    /// Minimizer of `L`; upper bound on neighbor spacing.
    pub h_hat: f64,
    /// Limit of the end spacing of a long spear.
    pub h_tilde: f64,
    /// Inflection point of `L`.
    pub h_dag: f64,
    /// Minimum of `L''`.
    pub h_ddag: f64,
    /// `L_sharp` increases on `(0, h_sharp)`.
    pub h_sharp: f64,
    /// `L_flat` increases on `(0, h_flat)`.
    pub h_flat: f64,
}

pub fn characteristic_distances(p: &LJParams) -> DistanceSet {
    let (al, be) = (p.alpha, p.beta);
    let expo = 1.0 / (al - be);
    let z_al = zeta_unchecked(al);
    let z_al1 = zeta_unchecked(al + 1.0);
    let z_be = zeta_unchecked(be);
    let z_be1 = zeta_unchecked(be + 1.0);
    let base = al * p.a / (be * p.b);
    let curv = base * (al + 1.0) / (be + 1.0);
    let root = |ratio: f64| ratio.powf(expo);
    DistanceSet {
        h_check: root(base / z_be),
        h_bar: root(base * z_al / z_be),
        h_hat: root(base),
        h_tilde: root(base * z_al1 / z_be1),
        h_dag: root(curv),
        h_ddag: root(curv * (al + 2.0) / (be + 2.0)),
        h_sharp: root(curv * z_al1 / z_be1),
        h_flat: root(curv * z_al / z_be),
    }
}

/// Logarithmic gaps `ln(h_bar/h_check)`, `ln(h_tilde/h_bar)` and
/// `ln(h_hat/h_tilde)`.
///
/// For large `alpha` the first gap is of order `2^-alpha` and falls below the
/// resolution of the rounded distances; here it is computed from
/// `zeta(alpha) - 1` directly, so its sign is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingMargins {
    pub check_to_bar: f64,
    pub bar_to_tilde: f64,
    pub tilde_to_hat: f64,
}

impl OrderingMargins {
    pub fn strictly_ordered(&self) -> bool {
        self.check_to_bar > 0.0 && self.bar_to_tilde > 0.0 && self.tilde_to_hat > 0.0
    }
}

pub fn ordering_margins(p: &LJParams) -> OrderingMargins {
    let expo = 1.0 / (p.alpha - p.beta);
    let ln_z = |s: f64| zeta_minus_one(s).ln_1p();
    let (za, za1) = (ln_z(p.alpha), ln_z(p.alpha + 1.0));
    let (zb, zb1) = (ln_z(p.beta), ln_z(p.beta + 1.0));
    OrderingMargins {
        check_to_bar: za * expo,
        bar_to_tilde: (za1 - za + zb - zb1) * expo,
        tilde_to_hat: (zb1 - za1) * expo,
    }
}
