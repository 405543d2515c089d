//! Pairwise energy and its analytic gradient.
//!
//! For a pair with separation `r = x_k - x_l` the interaction is
//!
//! ```text
//! U_kl = B0 (m_k . m_l) / |r|^beta - (B + B0) (m_k . r)(m_l . r) / |r|^(beta+2) + A / |r|^alpha
//! ```
//!
//! which reduces to `L(|r|)` for two spins aligned with `r`, and to the
//! physical dipole interaction for `B0 = 1`, `B = 2`, `beta = 3`.

use super::{Particle, SystemState, Vec3};
use crate::error::{Error, Result};
use crate::potential::LJParams;

/// Raw Euclidean gradient of the total energy with respect to every position
/// and every spin (the spin part is not projected onto the sphere).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradient {
    pub dx: Vec<Vec3>,
    pub dm: Vec<Vec3>,
}

impl EnergyGradient {
    /// Sup-norm of the gradient on `(R^3 x S^2)^N`: position components and
    /// the components of `m_k x dU/dm_k`.
    pub fn sup_norm(&self, particles: &[Particle]) -> f64 {
        self.dx
            .iter()
            .chain(self.dm.iter().zip(particles).map(|(g, p)| p.m.cross(g)).collect::<Vec<_>>().iter())
            .fold(0.0, |m, v| m.max(v.amax()))
    }
}

struct PairGeometry {
    r: Vec3,
    inv_beta: f64,
    inv_beta2: f64,
    inv_alpha: f64,
    inv_sq: f64,
}

fn geometry(a: &Particle, b: &Particle, k: usize, l: usize, p: &LJParams) -> Result<PairGeometry> {
    let r = a.x - b.x;
    let dist2 = r.norm_squared();
    if !(dist2 > 0.0) {
        return Err(Error::Domain(format!("particles {k} and {l} coincide")));
    }
    let ln = 0.5 * dist2.ln();
    let inv_beta = (-p.beta() * ln).exp();
    let inv_sq = 1.0 / dist2;
    Ok(PairGeometry {
        r,
        inv_beta,
        inv_beta2: inv_beta * inv_sq,
        inv_alpha: p.a() * (-p.alpha() * ln).exp(),
        inv_sq,
    })
}

/// Energy of one pair.
pub fn pair_energy(a: &Particle, b: &Particle, p: &LJParams) -> Result<f64> {
    let g = geometry(a, b, 0, 1, p)?;
    Ok(pair_energy_with(a, b, &g, p))
}

fn pair_energy_with(a: &Particle, b: &Particle, g: &PairGeometry, p: &LJParams) -> f64 {
    let bb = p.b() + p.b0();
    p.b0() * a.m.dot(&b.m) * g.inv_beta - bb * a.m.dot(&g.r) * b.m.dot(&g.r) * g.inv_beta2 + g.inv_alpha
}

/// Sum of pair energies over unordered pairs.
pub fn total_energy(s: &SystemState, p: &LJParams) -> Result<f64> {
    let ps = &s.particles;
    let mut total = 0.0;
    for k in 0..ps.len() {
        for l in k + 1..ps.len() {
            let g = geometry(&ps[k], &ps[l], k, l, p)?;
            total += pair_energy_with(&ps[k], &ps[l], &g, p);
        }
    }
    Ok(total)
}

/// Analytic gradient, accumulated over pairs in a fixed order.
pub fn energy_gradient(s: &SystemState, p: &LJParams) -> Result<EnergyGradient> {
    let ps = &s.particles;
    let n = ps.len();
    let mut dx = vec![Vec3::zeros(); n];
    let mut dm = vec![Vec3::zeros(); n];
    let (alpha, beta, b0) = (p.alpha(), p.beta(), p.b0());
    let bb = p.b() + b0;
    for k in 0..n {
        for l in k + 1..n {
            let (a, b) = (&ps[k], &ps[l]);
            let g = geometry(a, b, k, l, p)?;
            let (mk_r, ml_r, mk_ml) = (a.m.dot(&g.r), b.m.dot(&g.r), a.m.dot(&b.m));
            let radial = -beta * b0 * mk_ml * g.inv_beta * g.inv_sq
                + bb * (beta + 2.0) * mk_r * ml_r * g.inv_beta2 * g.inv_sq
                - alpha * g.inv_alpha * g.inv_sq;
            let grad_x = g.r * radial - (a.m * ml_r + b.m * mk_r) * (bb * g.inv_beta2);
            dx[k] += grad_x;
            dx[l] -= grad_x;
            dm[k] += b.m * (b0 * g.inv_beta) - g.r * (bb * ml_r * g.inv_beta2);
            dm[l] += a.m * (b0 * g.inv_beta) - g.r * (bb * mk_r * g.inv_beta2);
        }
    }
    Ok(EnergyGradient { dx, dm })
}

/// Conservative force and torque on one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Load {
    pub force: Vec3,
    pub torque: Vec3,
}

/// `F_k = -dU/dx_k` and `T_k = m_k x (-dU/dm_k)`.
pub fn forces_and_torques(s: &SystemState, p: &LJParams) -> Result<Vec<Load>> {
    let g = energy_gradient(s, p)?;
    Ok(s.particles
        .iter()
        .zip(g.dx.iter().zip(&g.dm))
        .map(|(part, (dx, dm))| Load { force: -dx, torque: part.m.cross(&(-dm)) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{characteristic_distances, lj_value};
    use crate::spear::{spear_energy, SpacingVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> LJParams {
        LJParams::new(1.0, 1.3, 0.7, 12.0, 3.0).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> SystemState {
        loop {
            let ps: Vec<Particle> = (0..n)
                .map(|_| {
                    let x = Vec3::from_fn(|_, _| rng.random_range(-1.5..1.5));
                    let m = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0));
                    Particle::at_rest(x, m)
                })
                .collect();
            let s = SystemState::new(ps).unwrap();
            if s.min_distance() > 0.8 {
                return s;
            }
        }
    }

    /// Central differences of the energy in every coordinate.
    fn fd_gradient(s: &SystemState, p: &LJParams, step: f64) -> (Vec<Vec3>, Vec<Vec3>) {
        let n = s.particles.len();
        let mut dx = vec![Vec3::zeros(); n];
        let mut dm = vec![Vec3::zeros(); n];
        for k in 0..n {
            for c in 0..3 {
                for (which, out) in [(0, &mut dx), (1, &mut dm)] {
                    let mut up = s.clone();
                    let mut dn = s.clone();
                    // spins are perturbed off the sphere on purpose: the
                    // energy is defined for any vector
                    let (u, d) = if which == 0 {
                        (&mut up.particles[k].x, &mut dn.particles[k].x)
                    } else {
                        (&mut up.particles[k].m, &mut dn.particles[k].m)
                    };
                    u[c] += step;
                    d[c] -= step;
                    out[k][c] = (total_energy(&up, p).unwrap() - total_energy(&dn, p).unwrap()) / (2.0 * step);
                }
            }
        }
        (dx, dm)
    }

    #[test]
    fn collinear_pair_reduces_to_profile() {
        let p = params();
        let h = 1.1;
        let s = SystemState::new(vec![
            Particle::at_rest(Vec3::zeros(), Vec3::x()),
            Particle::at_rest(Vec3::new(h, 0.0, 0.0), Vec3::x()),
        ])
        .unwrap();
        assert!((total_energy(&s, &p).unwrap() - lj_value(h, &p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn physical_dipole_formula() {
        let p = LJParams::new(1.0, 2.0, 1.0, 12.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_state(&mut rng, 2);
        let (a, b) = (&s.particles[0], &s.particles[1]);
        let r = a.x - b.x;
        let d = r.norm();
        let dipole = a.m.dot(&b.m) / d.powi(3) - 3.0 * a.m.dot(&r) * b.m.dot(&r) / d.powi(5);
        let expected = dipole + d.powi(-12);
        assert!((pair_energy(a, b, &p).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn spear_configuration_matches_chain_functional() {
        let p = params();
        let d = characteristic_distances(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=8 {
            let h: Vec<f64> = (0..n - 1).map(|_| rng.random_range(d.h_check..1.3 * d.h_hat)).collect();
            let h = SpacingVector::new(h).unwrap();
            let s = SystemState::spear(&h);
            let j = spear_energy(&h, &p);
            // the pair sum counts each pair once, i.e. half the ordered-pair sum
            assert!((total_energy(&s, &p).unwrap() - j).abs() < 1e-12 * (1.0 + j.abs()));
        }
    }

    #[test]
    fn resting_pair_at_profile_minimum() {
        let p = params();
        let d = characteristic_distances(&p);
        let s = SystemState::spear(&SpacingVector::new(vec![d.h_hat]).unwrap());
        for load in forces_and_torques(&s, &p).unwrap() {
            assert!(load.force.amax() < 1e-13 && load.torque.amax() < 1e-13);
        }
    }

    #[test]
    fn coincident_particles_are_rejected() {
        let p = params();
        let s = SystemState {
            particles: vec![Particle::at_rest(Vec3::zeros(), Vec3::x()); 2],
            time: 0.0,
        };
        assert!(total_energy(&s, &p).is_err());
        assert!(energy_gradient(&s, &p).is_err());
    }

    #[test]
    fn torque_is_tangent_to_spin() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let s = random_state(&mut rng, 5);
        for (load, part) in forces_and_torques(&s, &p).unwrap().iter().zip(&s.particles) {
            assert!(load.torque.dot(&part.m).abs() < 1e-12 * (1.0 + load.torque.norm()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn gradient_matches_finite_differences(seed in 0u64..10_000, n in 2usize..=6) {
            let p = params();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&mut rng, n);
            let g = energy_gradient(&s, &p).unwrap();
            let (fx, fm) = fd_gradient(&s, &p, 1e-6);
            let scale = g.dx.iter().chain(&g.dm).fold(1.0f64, |m, v| m.max(v.amax()));
            for k in 0..n {
                prop_assert!((g.dx[k] - fx[k]).amax() < 1e-6 * scale);
                prop_assert!((g.dm[k] - fm[k]).amax() < 1e-6 * scale);
            }
        }

        #[test]
        fn forces_sum_to_zero(seed in 0u64..10_000, n in 2usize..=8) {
            let p = params();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&mut rng, n);
            let loads = forces_and_torques(&s, &p).unwrap();
            let total: Vec3 = loads.iter().map(|l| l.force).sum();
            let scale = loads.iter().fold(1.0f64, |m, l| m.max(l.force.amax()));
            prop_assert!(total.amax() < 1e-12 * scale);
        }
    }
}
