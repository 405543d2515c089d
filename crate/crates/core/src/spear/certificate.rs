//! Uniform bounds on the spear Hessian over the box `[h_check, h_hat]^{N-1}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::potential::{characteristic_distances, zeta_unchecked, LJParams};

/// Diagonal floor, off-diagonal amplitude and dominance gap of the Hessian.
///
/// For every `H` in the box and every row `mu`:
///
/// ```text
/// H''_{mu mu} >= lambda_d
/// |H''_{mu nu}| <= lambda_nd / |mu - nu|^beta
/// H''_{mu mu} - sum_{nu != mu} |H''_{mu nu}| >= lambda_1
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianBounds {
    pub lambda_d: f64,
    pub lambda_nd: f64,
    pub lambda_1: f64,
}

impl HessianBounds {
    /// True when the bounds prove strict convexity on the box.
    pub fn certifies_convexity(&self) -> bool {
        self.lambda_d > 0.0 && self.lambda_1 > 0.0
    }
}

pub fn hessian_bounds(p: &LJParams) -> HessianBounds {
    let d = characteristic_distances(p);
    let (alpha, beta, b) = (p.alpha(), p.beta(), p.b());
    let z1 = zeta_unchecked(beta + 1.0);
    let zb = zeta_unchecked(beta);
    let hat = d.h_hat.powf(-(beta + 2.0));
    let check = d.h_check.powf(-(beta + 2.0));
    let own = beta * b * (alpha - beta) * hat;
    HessianBounds {
        lambda_d: own - beta * (beta + 1.0) * b * (z1 - 1.0) * check,
        lambda_nd: (beta + 1.0) * b * check,
        lambda_1: own - beta * (beta + 1.0) * b * (z1 + zb - 2.0) * check,
    }
}

/// Row-wise `|M_ii| - sum_{j != i} |M_ij|`.
pub fn dominance_gaps(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| {
            let off: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            m[(i, i)].abs() - off
        })
        .collect()
}
