//! Dissipative motion of `N` magnetic particles.
//!
//! Each particle has a position `x`, a unit spin `m`, a velocity `v` and an
//! angular velocity `omega`, evolving by
//!
//! ```text
//! mu dv/dt     = F - zeta_tr v          dx/dt = v
//! I  domega/dt = T - zeta_r omega       dm/dt = omega x m
//! ```
//!
//! with `F = -dU/dx`, `T = m x (-dU/dm)`, Stokes drag `zeta_tr = 6 pi nu R`,
//! `zeta_r = 8 pi nu R^2` and moment of inertia `I = 2 mu R^2 / 5`.
//!
//! [`step`] integrates the drag exactly over a step with frozen loads,
//! moves positions with the updated velocity and rotates spins by the
//! Rodrigues formula.

mod detect;
mod forces;
mod io;

pub use detect::{classify, principal_extents, Structure};
pub use forces::{energy_gradient, forces_and_torques, pair_energy, total_energy, EnergyGradient, Load};
pub use io::{write_snapshots_csv, RunSummary, SNAPSHOT_HEADER};

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::LJParams;
use crate::spear::SpacingVector;

pub type Vec3 = Vector3<f64>;

/// Fraction of the particle radius below which two centers count as overlapping.
pub const OVERLAP_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: Vec3,
    pub m: Vec3,
    pub v: Vec3,
    pub omega: Vec3,
}

impl Particle {
    /// Particle at rest; `m` is normalized.
    pub fn at_rest(x: Vec3, m: Vec3) -> Self {
        Self { x, m: m.normalize(), v: Vec3::zeros(), omega: Vec3::zeros() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub particles: Vec<Particle>,
    pub time: f64,
}

impl SystemState {
    /// Validates finiteness and non-zero spins, and normalizes the spins.
    pub fn new(mut particles: Vec<Particle>) -> Result<Self> {
        for (k, p) in particles.iter_mut().enumerate() {
            let finite = [p.x, p.m, p.v, p.omega].iter().all(|v| v.iter().all(|c| c.is_finite()));
            if !finite {
                return Err(Error::NonFinite { time: 0.0, particle: k });
            }
            let norm = p.m.norm();
            if !(norm > 0.0) {
                return Err(Error::Domain(format!("particle {k} has a zero spin")));
            }
            p.m /= norm;
        }
        Ok(Self { particles, time: 0.0 })
    }

    /// Chain along the x-axis with the given spacings and spins along `+x`.
    pub fn spear(h: &SpacingVector) -> Self {
        let particles = h
            .positions()
            .into_iter()
            .map(|p| Particle::at_rest(Vec3::new(p, 0.0, 0.0), Vec3::x()))
            .collect();
        Self { particles, time: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Smallest pairwise distance, with the pair attaining it.
    pub fn closest_pair(&self) -> Option<(usize, usize, f64)> {
        let ps = &self.particles;
        let mut best: Option<(usize, usize, f64)> = None;
        for k in 0..ps.len() {
            for l in k + 1..ps.len() {
                let d = (ps[k].x - ps[l].x).norm();
                if best.is_none_or(|b| d < b.2) {
                    best = Some((k, l, d));
                }
            }
        }
        best
    }

    pub fn min_distance(&self) -> f64 {
        self.closest_pair().map_or(f64::INFINITY, |b| b.2)
    }

    pub fn centroid(&self) -> Vec3 {
        self.particles.iter().map(|p| p.x).sum::<Vec3>() / self.particles.len().max(1) as f64
    }
}

/// Model constants together with the mechanical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    lj: LJParams,
    mu: f64,
    radius: f64,
    nu: f64,
    zeta_tr: f64,
    zeta_r: f64,
    inertia: f64,
}

impl PhysicalParams {
    pub fn new(lj: LJParams, mu: f64, radius: f64, nu: f64) -> Result<Self> {
        for (key, v) in [("mu", mu), ("radius", radius), ("nu", nu)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams { key, reason: format!("must be positive, got {v}") });
            }
        }
        let pi = std::f64::consts::PI;
        Ok(Self {
            lj,
            mu,
            radius,
            nu,
            zeta_tr: 6.0 * pi * nu * radius,
            zeta_r: 8.0 * pi * nu * radius * radius,
            inertia: 0.4 * mu * radius * radius,
        })
    }

    pub fn lj(&self) -> &LJParams {
        &self.lj
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn zeta_tr(&self) -> f64 {
        self.zeta_tr
    }
    pub fn zeta_r(&self) -> f64 {
        self.zeta_r
    }
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// `0.1 min(mu / zeta_tr, I / zeta_r)`.
    pub fn max_stable_dt(&self) -> f64 {
        0.1 * (self.mu / self.zeta_tr).min(self.inertia / self.zeta_r)
    }
}

/// `sum (mu |v|^2 + I |omega|^2) / 2`.
pub fn kinetic_energy(s: &SystemState, p: &PhysicalParams) -> f64 {
    s.particles
        .iter()
        .map(|q| 0.5 * p.mu * q.v.norm_squared() + 0.5 * p.inertia * q.omega.norm_squared())
        .sum()
}

/// Potential plus kinetic energy.
pub fn mechanical_energy(s: &SystemState, p: &PhysicalParams) -> Result<f64> {
    Ok(total_energy(s, &p.lj)? + kinetic_energy(s, p))
}

/// Rotates `m` by the angle `|omega| dt` about `omega`.
pub fn rotate(m: &Vec3, omega: &Vec3, dt: f64) -> Vec3 {
    let w = omega.norm();
    if w == 0.0 {
        return *m;
    }
    let axis = omega / w;
    let (sin, cos) = (w * dt).sin_cos();
    m * cos + axis.cross(m) * sin + axis * (axis.dot(m) * (1.0 - cos))
}

/// One integration step of length `dt`.
pub fn step(s: &SystemState, dt: f64, p: &PhysicalParams) -> Result<SystemState> {
    let loads = forces_and_torques(s, &p.lj)?;
    advance(s, &loads, dt, p)
}

fn advance(s: &SystemState, loads: &[Load], dt: f64, p: &PhysicalParams) -> Result<SystemState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams { key: "dt", reason: format!("must be positive, got {dt}") });
    }
    let decay_tr = (-p.zeta_tr * dt / p.mu).exp();
    let decay_r = (-p.zeta_r * dt / p.inertia).exp();
    let time = s.time + dt;
    let particles: Vec<Particle> = s
        .particles
        .iter()
        .zip(loads)
        .map(|(q, load)| {
            let v = q.v * decay_tr + load.force * ((1.0 - decay_tr) / p.zeta_tr);
            let omega = q.omega * decay_r + load.torque * ((1.0 - decay_r) / p.zeta_r);
            let m = rotate(&q.m, &omega, dt);
            Particle { x: q.x + v * dt, m: m / m.norm(), v, omega }
        })
        .collect();
    for (k, q) in particles.iter().enumerate() {
        if ![q.x, q.m, q.v, q.omega].iter().all(|v| v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite { time, particle: k });
        }
    }
    let next = SystemState { particles, time };
    if let Some((i, j, distance)) = next.closest_pair() {
        if distance < OVERLAP_FRACTION * p.radius {
            return Err(Error::Overlap { i, j, distance, time });
        }
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Final time (measured from the initial state's time).
    pub horizon: f64,
    pub dt: f64,
    /// Steps between recorded samples.
    pub cadence: usize,
    /// Stop once the gradient sup-norm and all speeds fall below this.
    pub tol: f64,
    /// Keep full snapshots at every sample (otherwise only the series).
    pub keep_snapshots: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { horizon: 1e3, dt: 1e-2, cadence: 100, tol: 1e-6, keep_snapshots: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Potential plus kinetic energy at each sample.
    pub mechanical: Vec<f64>,
    pub potential: Vec<f64>,
    /// Gradient sup-norm on `(R^3 x S^2)^N` at each sample.
    pub grad_norms: Vec<f64>,
    pub snapshots: Vec<SystemState>,
    pub final_state: SystemState,
    pub steps: usize,
    pub converged: bool,
}

impl Trajectory {
    pub fn structure(&self) -> Structure {
        classify(&self.final_state)
    }

    /// Largest displacement of any particle from `reference`.
    pub fn max_drift(&self, reference: &SystemState) -> f64 {
        self.final_state
            .particles
            .iter()
            .zip(&reference.particles)
            .map(|(a, b)| (a.x - b.x).amax())
            .fold(0.0, f64::max)
    }
}

fn sample(t: &mut Trajectory, s: &SystemState, p: &PhysicalParams, gnorm: f64, keep: bool) -> Result<()> {
    let u = total_energy(s, &p.lj)?;
    t.times.push(s.time);
    t.potential.push(u);
    t.mechanical.push(u + kinetic_energy(s, p));
    t.grad_norms.push(gnorm);
    if keep {
        t.snapshots.push(s.clone());
    }
    Ok(())
}

fn max_speed(s: &SystemState) -> f64 {
    s.particles.iter().fold(0.0, |m, q| m.max(q.v.amax()).max(q.omega.amax()))
}

/// Integrates until `horizon` or until the state is critical and at rest.
pub fn run(initial: &SystemState, p: &PhysicalParams, opts: &RunOptions) -> Result<Trajectory> {
    if !(opts.horizon >= 0.0) {
        return Err(Error::InvalidParams { key: "horizon", reason: format!("must be non-negative, got {}", opts.horizon) });
    }
    if opts.cadence == 0 {
        return Err(Error::InvalidParams { key: "cadence", reason: "must be at least 1".into() });
    }
    let t_end = initial.time + opts.horizon;
    let mut s = initial.clone();
    let mut traj = Trajectory {
        times: vec![],
        mechanical: vec![],
        potential: vec![],
        grad_norms: vec![],
        snapshots: vec![],
        final_state: initial.clone(),
        steps: 0,
        converged: false,
    };
    let mut steps = 0usize;
    loop {
        let grad = energy_gradient(&s, &p.lj)?;
        let gnorm = grad.sup_norm(&s.particles);
        let done = gnorm < opts.tol && max_speed(&s) < opts.tol;
        let out_of_time = s.time + 0.5 * opts.dt > t_end;
        if steps.is_multiple_of(opts.cadence) || done || out_of_time {
            sample(&mut traj, &s, p, gnorm, opts.keep_snapshots)?;
        }
        if done || out_of_time {
            traj.converged = done;
            break;
        }
        let loads: Vec<Load> = s
            .particles
            .iter()
            .zip(grad.dx.iter().zip(&grad.dm))
            .map(|(q, (dx, dm))| Load { force: -dx, torque: q.m.cross(&(-dm)) })
            .collect();
        s = advance(&s, &loads, opts.dt, p)?;
        steps += 1;
    }
    traj.steps = steps;
    traj.final_state = s;
    Ok(traj)
}

/// Copy of `s` with every position moved by up to `amplitude * scale` per
/// coordinate and every spin tilted by up to `amplitude` radians about each
/// axis, uniformly at random.
pub fn jitter(s: &SystemState, amplitude: f64, scale: f64, rng: &mut impl Rng) -> Result<SystemState> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidParams { key: "perturb", reason: format!("must be finite and >= 0, got {amplitude}") });
    }
    let particles = s
        .particles
        .iter()
        .map(|q| {
            let noise = Vec3::from_fn(|_, _| rng.random_range(-1.0..=1.0));
            let tilt = Vec3::from_fn(|_, _| rng.random_range(-1.0..=1.0)) * amplitude;
            Particle { x: q.x + noise * (amplitude * scale), m: rotate(&q.m, &tilt, 1.0), ..*q }
        })
        .collect();
    Ok(SystemState { time: s.time, ..SystemState::new(particles)? })
}

/// Noisy arc of `n` particles at rest.
///
/// Neighbors sit `spacing` apart along a circular arc whose total turning
/// angle is `2 pi * bend` (`bend = 0` is a straight chain, `bend = 1` a
/// closed ring). Spins follow the tangent. The arc is then passed through
/// [`jitter`] with amplitude `jitter` and scale `spacing`.
pub fn arc_state(n: usize, spacing: f64, bend: f64, jitter: f64, rng: &mut impl Rng) -> Result<SystemState> {
    if n < 2 {
        return Err(Error::InvalidParams { key: "N", reason: format!("need at least 2 particles, got {n}") });
    }
    if !(0.0..=1.0).contains(&bend) {
        return Err(Error::InvalidParams { key: "bend", reason: format!("must lie in [0, 1], got {bend}") });
    }
    let step = std::f64::consts::TAU * bend / n as f64;
    let particles = (0..n)
        .map(|k| {
            if step == 0.0 {
                Particle::at_rest(Vec3::new(k as f64 * spacing, 0.0, 0.0), Vec3::x())
            } else {
                let radius = spacing / (2.0 * (0.5 * step).sin());
                let (sin, cos) = (k as f64 * step).sin_cos();
                Particle::at_rest(Vec3::new(radius * cos, radius * sin, 0.0), Vec3::new(-sin, cos, 0.0))
            }
        })
        .collect();
    self::jitter(&SystemState::new(particles)?, jitter, spacing, rng)
}

/// Arc state with a random bend drawn uniformly from `[0, 1]`.
pub fn random_arc_state(n: usize, spacing: f64, jitter: f64, rng: &mut impl Rng) -> Result<SystemState> {
    let bend = rng.random_range(0.0..=1.0);
    arc_state(n, spacing, bend, jitter, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn physical() -> PhysicalParams {
        PhysicalParams::new(LJParams::unit(12.0, 3.0).unwrap(), 1.0, 0.5, 0.2).unwrap()
    }

    #[test]
    fn derived_mechanics() {
        let p = physical();
        let pi = std::f64::consts::PI;
        assert!((p.zeta_tr() - 6.0 * pi * 0.2 * 0.5).abs() < 1e-15);
        assert!((p.zeta_r() - 8.0 * pi * 0.2 * 0.25).abs() < 1e-15);
        assert!((p.inertia() - 0.1).abs() < 1e-15);
        assert!(PhysicalParams::new(*p.lj(), 0.0, 0.5, 0.2).is_err());
    }

    #[test]
    fn free_particle_velocity_decays_exactly() {
        let p = physical();
        let mut q = Particle::at_rest(Vec3::zeros(), Vec3::x());
        q.v = Vec3::new(1.0, -2.0, 0.5);
        let s = SystemState { particles: vec![q], time: 0.0 };
        let dt = 0.01;
        let next = step(&s, dt, &p).unwrap();
        let factor = (-p.zeta_tr() * dt / p.mu()).exp();
        assert!((next.particles[0].v - q.v * factor).amax() < 1e-15);
        assert!((next.particles[0].x - q.v * factor * dt).amax() < 1e-15);
    }

    #[test]
    fn rodrigues_rotation_in_plane() {
        let (w, dt) = (3.0, 0.1);
        let m = rotate(&Vec3::x(), &Vec3::new(0.0, 0.0, w), dt);
        assert!((m - Vec3::new((w * dt).cos(), (w * dt).sin(), 0.0)).amax() < 1e-15);
        assert!((m.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spins_stay_unit_over_many_steps() {
        let p = physical();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = arc_state(6, 1.2, 0.3, 0.1, &mut rng).unwrap();
        for q in &mut s.particles {
            q.omega = Vec3::new(0.3, -1.0, 2.0);
        }
        for _ in 0..500 {
            s = step(&s, 1e-3, &p).unwrap();
            assert!(s.particles.iter().all(|q| (q.m.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn overlap_is_fatal() {
        // heavy particles coast through each other's centers in one step
        let p = PhysicalParams::new(LJParams::unit(12.0, 3.0).unwrap(), 1e12, 0.5, 0.2).unwrap();
        let mut a = Particle::at_rest(Vec3::zeros(), Vec3::y());
        let mut b = Particle::at_rest(Vec3::new(3.0, 0.0, 0.0), Vec3::y());
        a.v = Vec3::new(1.0, 0.0, 0.0);
        b.v = Vec3::new(-1.0, 0.0, 0.0);
        let s = SystemState { particles: vec![a, b], time: 0.0 };
        assert!(matches!(step(&s, 1.5, &p), Err(Error::Overlap { i: 0, j: 1, .. })));
    }

    #[test]
    fn invalid_run_options() {
        let p = physical();
        let s = arc_state(3, 1.2, 0.0, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(step(&s, 0.0, &p).is_err());
        let bad = RunOptions { cadence: 0, ..RunOptions::default() };
        assert!(run(&s, &p, &bad).is_err());
    }

    #[test]
    fn arc_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let line = arc_state(5, 1.1, 0.0, 0.0, &mut rng).unwrap();
        assert!((line.particles[4].x - Vec3::new(4.4, 0.0, 0.0)).amax() < 1e-12);
        let ring = arc_state(8, 1.1, 1.0, 0.0, &mut rng).unwrap();
        let d = (ring.particles[7].x - ring.particles[0].x).norm();
        assert!((d - 1.1).abs() < 1e-12);
        assert!(arc_state(8, 1.1, 1.5, 0.0, &mut rng).is_err());
    }

    #[test]
    fn energy_dissipates_from_perturbed_arc() {
        let p = physical();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = arc_state(6, 1.15, 0.2, 0.05, &mut rng).unwrap();
        let opts = RunOptions { horizon: 20.0, dt: 1e-2, cadence: 10, tol: 1e-12, keep_snapshots: false };
        let t = run(&s, &p, &opts).unwrap();
        for w in t.mechanical.windows(2) {
            assert!(w[1] <= w[0] + 1e-8);
        }
    }

    #[test]
    fn jitter_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = arc_state(6, 1.2, 0.3, 0.0, &mut rng).unwrap();
        assert_eq!(jitter(&base, 0.0, 1.2, &mut rng).unwrap(), base);
        let moved = jitter(&base, 0.1, 1.2, &mut rng).unwrap();
        for (a, b) in moved.particles.iter().zip(&base.particles) {
            assert!((a.x - b.x).amax() <= 0.12 + 1e-15);
            assert!((a.m.norm() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(jitter(&base, -1.0, 1.0, &mut rng), Err(Error::InvalidParams { key: "perturb", .. })));
    }
}
