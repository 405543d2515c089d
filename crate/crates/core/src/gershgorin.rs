//! Entry-wise decay of inverses of diagonally dominant matrices.
//!
//! Let `A` satisfy `|A_ij| <= c / |i - j|^gamma` off the diagonal and
//! `|A_ii| >= d`, and put
//!
//! ```text
//! delta = 2 (1 + 2^gamma) zeta(gamma)
//! r_+   = (c / d) (delta + sqrt(delta^2 + 8 zeta(2 gamma))) / 2
//! kappa = 1 / (1 - r_+)
//! ```
//!
//! If `r_+ < 1` then `A` is invertible with
//!
//! ```text
//! |(A^-1)_ij| <= kappa c / (d^2 |i - j|^gamma)          (i != j)
//! |(A^-1)_ii| <= 1/d + 2 zeta(2 gamma) kappa c^2 / d^3
//! ```
//!
//! The bounds come from the Neumann series of `B = I - D^-1 A`, whose powers
//! satisfy `|(B^k)_ij| <= c r_+^(k-1) / (d |i - j|^gamma)` and
//! `|(B^k)_ii| <= 2 zeta(2 gamma) (c/d)^2 r_+^(k-2)`.
//!
//! Matrices may be real or complex.

use nalgebra::{ComplexField, DMatrix};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{zeta_unchecked, LJParams};
use crate::spear::{hessian_bounds, spear_hessian, SpacingVector};

/// Largest dimension accepted by the dense checks.
pub const MAX_DIM: usize = 1000;

/// Decay exponent, off-diagonal amplitude and diagonal floor, with the
/// derived constants of the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayMatrixSpec {
    gamma: f64,
    c: f64,
    d: f64,
    delta: f64,
    zeta_2gamma: f64,
    r_plus: f64,
}

impl DecayMatrixSpec {
    pub fn new(gamma: f64, c: f64, d: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParams { key: "gamma", reason: format!("must exceed 1, got {gamma}") });
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidParams { key: "c", reason: format!("must be non-negative, got {c}") });
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidParams { key: "d", reason: format!("must be positive, got {d}") });
        }
        let delta = 2.0 * (1.0 + 2f64.powf(gamma)) * zeta_unchecked(gamma);
        let zeta_2gamma = zeta_unchecked(2.0 * gamma);
        let r_plus = c / d * (delta + (delta * delta + 8.0 * zeta_2gamma).sqrt()) / 2.0;
        Ok(Self { gamma, c, d, delta, zeta_2gamma, r_plus })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn r_plus(&self) -> f64 {
        self.r_plus
    }

    /// `1 / (1 - r_+)`, or `None` when `r_+ >= 1`.
    pub fn kappa(&self) -> Option<f64> {
        (self.r_plus < 1.0).then(|| 1.0 / (1.0 - self.r_plus))
    }

    fn require_contraction(&self) -> Result<f64> {
        self.kappa().ok_or(Error::Hypothesis { r_plus: self.r_plus })
    }
}

/// Outcome of one hypothesis with the index pair that came closest to
/// violating it (or did violate it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub passed: bool,
    pub worst: Option<(usize, usize)>,
    /// Slack at the worst pair; negative when violated.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// Strict row-wise diagonal dominance.
    pub dominance: Condition,
    /// `|M_ij| <= c / |i - j|^gamma`.
    pub decay: Condition,
    /// `|M_ii| >= d`.
    pub floor: Condition,
    /// `r_+ < 1`.
    pub contraction: bool,
    pub r_plus: f64,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.dominance.passed && self.decay.passed && self.floor.passed && self.contraction
    }
}

fn tighter(cond: &mut Condition, margin: f64, at: (usize, usize)) {
    if cond.worst.is_none() || margin < cond.margin {
        cond.margin = margin;
        cond.worst = Some(at);
    }
    cond.passed = cond.passed && margin >= 0.0;
}

fn fresh() -> Condition {
    Condition { passed: true, worst: None, margin: f64::INFINITY }
}

fn check_square<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Domain(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if m.nrows() > MAX_DIM {
        return Err(Error::Domain(format!("dimension {} exceeds {MAX_DIM}", m.nrows())));
    }
    Ok(m.nrows())
}

pub fn verify_hypotheses<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, spec: &DecayMatrixSpec) -> Result<HypothesisReport> {
    let n = check_square(m)?;
    let (mut dominance, mut decay, mut floor) = (fresh(), fresh(), fresh());
    for i in 0..n {
        let diag = m[(i, i)].clone().modulus();
        let mut off = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let v = m[(i, j)].clone().modulus();
            off += v;
            let cap = spec.c / (i.abs_diff(j) as f64).powf(spec.gamma);
            tighter(&mut decay, cap - v, (i, j));
        }
        // strict inequality: a zero gap counts as a violation
        let gap = diag - off;
        tighter(&mut dominance, gap, (i, i));
        if gap <= 0.0 {
            dominance.passed = false;
        }
        tighter(&mut floor, diag - spec.d, (i, i));
    }
    Ok(HypothesisReport { dominance, decay, floor, contraction: spec.r_plus < 1.0, r_plus: spec.r_plus })
}

/// Certified bound on `|(M^-1)_ij|`.
pub fn decay_bound(spec: &DecayMatrixSpec, i: usize, j: usize) -> Result<f64> {
    let kappa = spec.require_contraction()?;
    let (c, d) = (spec.c, spec.d);
    Ok(if i == j {
        1.0 / d + 2.0 * spec.zeta_2gamma * kappa * c * c / d.powi(3)
    } else {
        kappa * c / (d * d * (i.abs_diff(j) as f64).powf(spec.gamma))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub i: usize,
    pub j: usize,
    pub entry: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseDecayReport {
    /// Largest `|(M^-1)_ij| / bound_ij`; pairs with a zero bound and a zero
    /// entry contribute 0.
    pub max_ratio: f64,
    pub worst: (usize, usize),
    pub singular: bool,
    /// Worst violating entry, if any.
    pub counterexample: Option<Counterexample>,
}

impl InverseDecayReport {
    pub fn holds(&self) -> bool {
        !self.singular && self.counterexample.is_none()
    }
}

/// Inverts `m` densely and compares every entry with [`decay_bound`].
pub fn check_inverse_decay<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, spec: &DecayMatrixSpec) -> Result<InverseDecayReport> {
    let n = check_square(m)?;
    spec.require_contraction()?;
    let Some(inv) = m.clone().try_inverse() else {
        return Ok(InverseDecayReport { max_ratio: f64::INFINITY, worst: (0, 0), singular: true, counterexample: None });
    };
    let mut report = InverseDecayReport { max_ratio: 0.0, worst: (0, 0), singular: false, counterexample: None };
    for i in 0..n {
        for j in 0..n {
            let entry = inv[(i, j)].clone().modulus();
            let bound = decay_bound(spec, i, j)?;
            let ratio = ratio(entry, bound);
            if ratio > report.max_ratio {
                report.max_ratio = ratio;
                report.worst = (i, j);
            }
            if entry > bound * (1.0 + 1e-12) && report.counterexample.is_none_or(|c| ratio > ratio_of(&c)) {
                report.counterexample = Some(Counterexample { i, j, entry, bound });
            }
        }
    }
    Ok(report)
}

fn ratio(entry: f64, bound: f64) -> f64 {
    if entry == 0.0 {
        0.0
    } else {
        entry / bound
    }
}

fn ratio_of(c: &Counterexample) -> f64 {
    ratio(c.entry, c.bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannPower {
    pub k: usize,
    /// Largest `|(B^k)_ij| / (c r_+^(k-1) / (d |i-j|^gamma))` over `i != j`.
    pub off_diagonal_ratio: f64,
    /// Largest `|(B^k)_ii| / (2 zeta(2 gamma) (c/d)^2 r_+^(k-2))`; for
    /// `k = 1` this is `max |B_ii|`, which must vanish.
    pub diagonal_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeumannReport {
    pub powers: Vec<NeumannPower>,
}

impl NeumannReport {
    pub fn all_within(&self) -> bool {
        let slack = 1.0 + 1e-12;
        self.powers.iter().all(|p| {
            p.off_diagonal_ratio <= slack && if p.k == 1 { p.diagonal_ratio == 0.0 } else { p.diagonal_ratio <= slack }
        })
    }
}

/// Forms `B = I - D^-1 M` and checks its first `k_max` powers.
pub fn neumann_coefficients<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    spec: &DecayMatrixSpec,
    k_max: usize,
) -> Result<NeumannReport> {
    let n = check_square(m)?;
    let r = spec.r_plus;
    let cd = spec.c / spec.d;
    let mut b = DMatrix::<T>::zeros(n, n);
    for i in 0..n {
        let inv_diag = T::one() / m[(i, i)].clone();
        for j in (0..n).filter(|&j| j != i) {
            b[(i, j)] = -(m[(i, j)].clone() * inv_diag.clone());
        }
    }
    let mut power = b.clone();
    let mut powers = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            power = &power * &b;
        }
        let mut off = 0.0f64;
        let mut diag = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = power[(i, j)].clone().modulus();
                if i == j {
                    diag = diag.max(if k == 1 {
                        v
                    } else {
                        ratio(v, 2.0 * spec.zeta_2gamma * cd * cd * r.powi(k as i32 - 2))
                    });
                } else {
                    let cap = cd * r.powi(k as i32 - 1) / (i.abs_diff(j) as f64).powf(spec.gamma);
                    off = off.max(ratio(v, cap));
                }
            }
        }
        powers.push(NeumannPower { k, off_diagonal_ratio: off, diagonal_ratio: diag });
    }
    Ok(NeumannReport { powers })
}

/// `sum_{k in 0..n, k != i, j} |i - k|^-gamma |k - j|^-gamma`.
pub fn shifted_sum(i: usize, j: usize, n: usize, gamma: f64) -> f64 {
    (0..n)
        .filter(|&k| k != i && k != j)
        .map(|k| ((i.abs_diff(k) * k.abs_diff(j)) as f64).powf(-gamma))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedSumReport {
    pub n: usize,
    pub gamma: f64,
    pub pairs_checked: usize,
    /// Largest `shifted_sum * |i - j|^gamma / delta`.
    pub max_ratio: f64,
}

impl ShiftedSumReport {
    pub fn holds(&self) -> bool {
        self.max_ratio <= 1.0
    }
}

/// Checks `shifted_sum(i, j) <= delta / |i - j|^gamma` for every pair `i != j` below `n`.
pub fn check_shifted_sums(n: usize, gamma: f64) -> Result<ShiftedSumReport> {
    let spec = DecayMatrixSpec::new(gamma, 0.0, 1.0)?;
    let mut max_ratio = 0.0f64;
    let mut pairs = 0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let s = shifted_sum(i, j, n, gamma) * (i.abs_diff(j) as f64).powf(gamma);
            max_ratio = max_ratio.max(s / spec.delta);
            pairs += 1;
        }
    }
    Ok(ShiftedSumReport { n, gamma, pairs_checked: pairs, max_ratio })
}

/// Random real matrix meeting the hypotheses of `spec` (provided `r_+ < 1`):
/// off-diagonal magnitudes uniform in `[0, c / |i-j|^gamma]`, diagonal
/// magnitudes uniform in `[d, 2d]`, all signs random.
pub fn sample_decay_matrix(n: usize, spec: &DecayMatrixSpec, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        if i == j {
            sign * spec.d * rng.random_range(1.0..=2.0)
        } else {
            sign * spec.c * rng.random_range(0.0..=1.0) / (i.abs_diff(j) as f64).powf(spec.gamma)
        }
    })
}

/// The spear Hessian at uniform spacing `h`, scaled by `1 / lambda_d`, with
/// the matching spec (`gamma = beta`, `c = lambda_nd / lambda_d`, `d = 1`).
pub fn scaled_spear_hessian(n_particles: usize, h: f64, p: &LJParams) -> Result<(DMatrix<f64>, DecayMatrixSpec)> {
    let bounds = hessian_bounds(p);
    if !(bounds.lambda_d > 0.0) {
        return Err(Error::Hypothesis { r_plus: f64::INFINITY });
    }
    let hess = spear_hessian(&SpacingVector::uniform(n_particles, h)?, p) / bounds.lambda_d;
    let spec = DecayMatrixSpec::new(p.beta(), bounds.lambda_nd / bounds.lambda_d, 1.0)?;
    Ok((hess, spec))
}
