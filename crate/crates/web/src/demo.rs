//! Plain-Rust state behind the browser bindings.

use colloid_core::dynamics::{
    arc_state, classify, energy_gradient, step, total_energy, PhysicalParams, SystemState,
};
use colloid_core::ring::{ring_configuration, ring_radius};
use colloid_core::spear::solve_spear;
use colloid_core::{characteristic_distances, LJParams};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_PARTICLES: usize = 256;
pub const DT: f64 = 1e-2;

fn params(alpha: f64, beta: f64) -> Result<LJParams, String> {
    LJParams::unit(alpha, beta).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpearProfile {
    pub spacing: Vec<f64>,
    /// `[h_check, h_bar, h_tilde, h_hat]`.
    pub marks: [f64; 4],
    pub energy: f64,
}

pub fn spear_profile(n: usize, alpha: f64, beta: f64) -> Result<SpearProfile, String> {
    if !(2..=MAX_PARTICLES).contains(&n) {
        return Err(format!("N must lie in [2, {MAX_PARTICLES}]"));
    }
    let p = params(alpha, beta)?;
    let d = characteristic_distances(&p);
    let sol = solve_spear(n, &p, 1e-10, 100).map_err(|e| e.to_string())?;
    Ok(SpearProfile {
        spacing: sol.spacing.into_inner(),
        marks: [d.h_check, d.h_bar, d.h_tilde, d.h_hat],
        energy: sol.energy,
    })
}

/// `(N, r_N, |2 r_N sin(pi/N) - h_bar|)` for `N = 2, 4, 8, ...` up to `n_max`.
pub fn ring_sweep(alpha: f64, beta: f64, n_max: usize) -> Result<Vec<[f64; 3]>, String> {
    let p = params(alpha, beta)?;
    let h_bar = characteristic_distances(&p).h_bar;
    std::iter::successors(Some(2usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= n_max.min(1 << 20))
        .map(|n| {
            let r = ring_radius(n, &p).map_err(|e| e.to_string())?;
            Ok([n as f64, r.radius, (r.nn_distance - h_bar).abs()])
        })
        .collect()
}

/// A running simulation with dipolar coupling `B` and unit `A`, `B0`.
#[derive(Debug, Clone)]
pub struct Session {
    params: PhysicalParams,
    state: SystemState,
}

impl Session {
    /// `init` is `line`, `ring` or `arc` (random bend); `line` and `ring`
    /// start from the exact equilibria plus `noise`.
    pub fn new(n: usize, init: &str, coupling: f64, noise: f64, seed: u64) -> Result<Self, String> {
        if !(2..=MAX_PARTICLES).contains(&n) {
            return Err(format!("N must lie in [2, {MAX_PARTICLES}]"));
        }
        let lj = LJParams::new(1.0, coupling, 1.0, 12.0, 3.0).map_err(|e| e.to_string())?;
        let params = PhysicalParams::new(lj, 1.0, 0.5, 0.2).map_err(|e| e.to_string())?;
        let h_bar = characteristic_distances(&lj).h_bar;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = match init {
            "line" => {
                let sol = solve_spear(n, &lj, 1e-12, 100).map_err(|e| e.to_string())?;
                colloid_core::dynamics::jitter(&SystemState::spear(&sol.spacing), noise, h_bar, &mut rng)
            }
            "ring" => {
                let r = ring_radius(n, &lj).map_err(|e| e.to_string())?.radius;
                let exact = ring_configuration(n, r).map_err(|e| e.to_string())?;
                colloid_core::dynamics::jitter(&exact, noise, h_bar, &mut rng)
            }
            "arc" => {
                let bend = rand::Rng::random_range(&mut rng, 0.0..=1.0);
                arc_state(n, h_bar, bend, noise, &mut rng)
            }
            other => return Err(format!("unknown initial state `{other}`")),
        }
        .map_err(|e| e.to_string())?;
        Ok(Self { params, state })
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), String> {
        for _ in 0..steps {
            self.state = step(&self.state, DT, &self.params).map_err(|e| e.to_string())?;
        }
        Ok(())
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn energy(&self) -> f64 {
        total_energy(&self.state, self.params.lj()).unwrap_or(f64::NAN)
    }

    pub fn grad_norm(&self) -> f64 {
        energy_gradient(&self.state, self.params.lj()).map_or(f64::NAN, |g| g.sup_norm(&self.state.particles))
    }

    pub fn structure(&self) -> String {
        classify(&self.state).to_string()
    }

    /// `x1, y1, z1, x2, ...` for positions or spins.
    pub fn flat(&self, spins: bool) -> Vec<f64> {
        self.state
            .particles
            .iter()
            .flat_map(|q| if spins { q.m } else { q.x }.iter().copied().collect::<Vec<_>>())
            .collect()
    }
}
