//! Aligned chains ("spears").
//!
//! A spear of `N` particles on the x-axis with spins along `+x` has energy
//! `J(H)` where `H = (h_1, .., h_{N-1})` are the neighbor spacings and
//!
//! ```text
//! J(H) = sum over contiguous runs [i, j] of L(h_i + .. + h_j).
//! ```
//!
//! Every derivative of `J` is a sum of `L'` or `L''` over the runs that
//! contain the differentiated indices, so energy, gradient and Hessian all
//! cost `O(N^2)` profile evaluations.

mod asymptotics;
mod certificate;
mod solver;

pub use asymptotics::{
    asymptotic_report, fit_refined_constants, refined_bounds, AsymptoticRow, AsymptoticTable,
    RefinedBounds, RefinedFit,
};
pub use certificate::{dominance_gaps, hessian_bounds, HessianBounds};
pub use solver::{solve_spear, solve_spear_from, SolverOptions, SpearSolution, MAX_SPEAR_N};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::LJParams;

/// Neighbor spacings of an `N`-particle chain (`N - 1` positive entries).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingVector(Vec<f64>);

impl SpacingVector {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Domain("a chain needs at least two particles".into()));
        }
        if let Some((k, v)) = h.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("spacing h_{} = {v} is not positive", k + 1)));
        }
        Ok(Self(h))
    }

    /// `N - 1` copies of `h`.
    pub fn uniform(n_particles: usize, h: f64) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::Domain(format!("need N >= 2, got {n_particles}")));
        }
        Self::new(vec![h; n_particles - 1])
    }

    /// Spacings of sorted, distinct positions.
    pub fn from_positions(p: &[f64]) -> Result<Self> {
        Self::new(p.windows(2).map(|w| w[1] - w[0]).collect())
    }

    pub fn n_particles(&self) -> usize {
        self.0.len() + 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Positions `p_0 = 0, p_k = h_1 + .. + h_k`.
    pub fn positions(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.0.iter().map(|h| {
                acc += h;
                acc
            }))
            .collect()
    }

    /// The same chain read from the other end.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }
}

/// `J(H)`.
pub fn spear_energy(h: &SpacingVector, p: &LJParams) -> f64 {
    let h = h.as_slice();
    let mut total = 0.0;
    for start in 0..h.len() {
        let mut run = 0.0;
        for &hj in &h[start..] {
            run += hj;
            total += p.profile(run).0;
        }
    }
    total
}

/// `dJ/dh_k = sum_{i <= k <= j} L'(h_i + .. + h_j)`.
pub fn spear_gradient(h: &SpacingVector, p: &LJParams) -> Vec<f64> {
    let h = h.as_slice();
    let n = h.len();
    // Each run [i, j] adds L' to every k in [i, j]; record it as a
    // difference array and integrate once.
    let mut diff = vec![0.0; n + 1];
    for i in 0..n {
        let mut run = 0.0;
        let mut row = 0.0;
        for j in i..n {
            run += h[j];
            let w = p.d1(run);
            row += w;
            diff[j + 1] -= w;
        }
        diff[i] += row;
    }
    let mut acc = 0.0;
    diff[..n]
        .iter()
        .map(|d| {
            acc += d;
            acc
        })
        .collect()
}

/// Dense Hessian `d2J/dh_mu dh_nu = sum_{i <= min, j >= max} L''(h_i + .. + h_j)`.
pub fn spear_hessian(h: &SpacingVector, p: &LJParams) -> DMatrix<f64> {
    let h = h.as_slice();
    let n = h.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    // Upper triangle, row i: suffix sums over run ends, T[i][nu] = sum_{j >= nu} L''(run i..j).
    for i in 0..n {
        let mut run = 0.0;
        for j in i..n {
            run += h[j];
            m[(i, j)] = p.d2(run);
        }
        for j in (i..n - 1).rev() {
            let next = m[(i, j + 1)];
            m[(i, j)] += next;
        }
    }
    // Column nu: prefix sums over run starts i <= mu.
    for nu in 0..n {
        for mu in 1..=nu {
            let above = m[(mu - 1, nu)];
            m[(mu, nu)] += above;
        }
    }
    m.fill_lower_triangle_with_upper_triangle();
    m
}
