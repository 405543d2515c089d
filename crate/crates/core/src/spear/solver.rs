//! Damped projected Newton method for the spear spacings.
//!
//! The iteration starts from the uniform bulk spacing, solves with the exact
//! Hessian, clamps the trial point to `[h_check, h_hat]` and backtracks until
//! the Armijo condition holds. When the Cholesky factorization fails or the
//! Newton direction does not descend, the negative gradient is used instead.
//!
//! Near the minimizer the energy decrease drops below floating-point
//! resolution before the gradient reaches the tolerance. A trial step whose
//! energy rises by no more than the rounding slack is then accepted when it
//! strictly reduces the gradient sup-norm.

use serde::{Deserialize, Serialize};

use super::{hessian_bounds, spear_energy, spear_gradient, spear_hessian, HessianBounds, SpacingVector};
use crate::error::{Error, Result};
use crate::potential::{characteristic_distances, LJParams};

/// Largest particle count accepted by [`solve_spear`].
pub const MAX_SPEAR_N: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target sup-norm of the gradient.
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub shrink: f64,
    /// Maximum number of step halvings per iteration.
    pub max_backtracks: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100, armijo: 1e-4, shrink: 0.5, max_backtracks: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpearSolution {
    pub spacing: SpacingVector,
    pub energy: f64,
    /// Sup-norm of the gradient at `spacing`.
    pub grad_norm: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    /// Present when the Hessian bounds prove uniqueness of the minimizer.
    pub certificate: Option<HessianBounds>,
    pub box_respected: bool,
    /// Energy after each accepted iteration, starting with the initial guess.
    pub energy_trace: Vec<f64>,
}

/// Minimizes `J` over `N - 1` spacings starting from the bulk spacing.
pub fn solve_spear(n: usize, p: &LJParams, tol: f64, max_iter: usize) -> Result<SpearSolution> {
    if n < 2 {
        return Err(Error::Domain(format!("need N >= 2, got {n}")));
    }
    if n > MAX_SPEAR_N {
        return Err(Error::Domain(format!("N = {n} exceeds the dense solver cap {MAX_SPEAR_N}")));
    }
    let d = characteristic_distances(p);
    let start = SpacingVector::uniform(n, d.h_bar)?;
    solve_spear_from(start, p, SolverOptions { tol, max_iter, ..SolverOptions::default() })
}

/// Same iteration from an arbitrary starting point (clamped into the box).
pub fn solve_spear_from(start: SpacingVector, p: &LJParams, opts: SolverOptions) -> Result<SpearSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParams { key: "tol", reason: format!("must be positive, got {}", opts.tol) });
    }
    let d = characteristic_distances(p);
    let (lo, hi) = (d.h_check, d.h_hat);
    let clamp = |v: Vec<f64>| -> SpacingVector {
        SpacingVector(v.into_iter().map(|x| x.clamp(lo, hi)).collect())
    };

    let mut h = clamp(start.into_inner());
    let mut energy = spear_energy(&h, p);
    let mut grad = spear_gradient(&h, p);
    let mut gnorm = sup_norm(&grad);
    let mut trace = vec![energy];

    for iter in 0..=opts.max_iter {
        if gnorm <= opts.tol {
            let bounds = hessian_bounds(p);
            let box_respected = h.as_slice().iter().all(|x| (lo..=hi).contains(x));
            return Ok(SpearSolution {
                spacing: h,
                energy,
                grad_norm: gnorm,
                gradient: grad,
                iterations: iter,
                certificate: bounds.certifies_convexity().then_some(bounds),
                box_respected,
                energy_trace: trace,
            });
        }
        if iter == opts.max_iter {
            break;
        }

        let newton = newton_direction(&h, &grad, p);
        let mut accepted = None;
        for dir in newton.into_iter().chain(std::iter::once(grad.iter().map(|g| -g).collect())) {
            accepted = line_search(&h, energy, &grad, gnorm, &dir, p, &opts, &clamp);
            if accepted.is_some() {
                break;
            }
        }
        let Some((next, e_next, g_next)) = accepted else {
            break;
        };
        h = next;
        energy = e_next;
        gnorm = sup_norm(&g_next);
        grad = g_next;
        trace.push(energy);
    }

    Err(Error::NotConverged { iterations: trace.len() - 1, residual: gnorm, last: h.into_inner() })
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn newton_direction(h: &SpacingVector, grad: &[f64], p: &LJParams) -> Option<Vec<f64>> {
    let hess = spear_hessian(h, p);
    let chol = hess.cholesky()?;
    let rhs = nalgebra::DVector::from_iterator(grad.len(), grad.iter().map(|g| -g));
    let dir = chol.solve(&rhs);
    let slope: f64 = dir.iter().zip(grad).map(|(a, b)| a * b).sum();
    (slope < 0.0 && dir.iter().all(|x| x.is_finite())).then(|| dir.iter().copied().collect())
}

#[allow(clippy::too_many_arguments)]
fn line_search(
    h: &SpacingVector,
    energy: f64,
    grad: &[f64],
    gnorm: f64,
    dir: &[f64],
    p: &LJParams,
    opts: &SolverOptions,
    clamp: &impl Fn(Vec<f64>) -> SpacingVector,
) -> Option<(SpacingVector, f64, Vec<f64>)> {
    let slack = 64.0 * f64::EPSILON * (1.0 + energy.abs()) * (h.len() as f64).sqrt();
    let mut t = 1.0;
    for _ in 0..opts.max_backtracks {
        let trial = clamp(h.as_slice().iter().zip(dir).map(|(x, s)| x + t * s).collect());
        let predicted: f64 = trial.as_slice().iter().zip(h.as_slice()).zip(grad).map(|((a, b), g)| (a - b) * g).sum();
        if trial.as_slice() == h.as_slice() {
            return None;
        }
        let e = spear_energy(&trial, p);
        if e <= energy + opts.armijo * predicted && predicted < 0.0 {
            let g = spear_gradient(&trial, p);
            return Some((trial, e, g));
        }
        if e <= energy + slack {
            let g = spear_gradient(&trial, p);
            if sup_norm(&g) < gnorm {
                return Some((trial, e.min(energy), g));
            }
        }
        t *= opts.shrink;
    }
    None
}
