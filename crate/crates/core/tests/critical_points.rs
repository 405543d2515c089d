use colloid_core::dynamics::{
    arc_state, energy_gradient, mechanical_energy, step, total_energy, PhysicalParams, SystemState,
};
use colloid_core::gershgorin::{check_inverse_decay, scaled_spear_hessian, verify_hypotheses};
use colloid_core::ring::{ring_configuration, ring_radius};
use colloid_core::spear::{solve_spear, spear_energy, spear_gradient, SpacingVector};
use colloid_core::{characteristic_distances, LJParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dipolar() -> LJParams {
    LJParams::new(1.0, 2.0, 1.0, 12.0, 3.0).unwrap()
}

#[test]
fn solved_spear_is_critical_in_space() {
    for p in [dipolar(), LJParams::unit(36.0, 3.0).unwrap()] {
        for n in [3, 7, 20] {
            let sol = solve_spear(n, &p, 1e-12, 100).unwrap();
            let s = SystemState::spear(&sol.spacing);
            let g = energy_gradient(&s, &p).unwrap();
            assert!(g.sup_norm(&s.particles) < 1e-10, "N={n}: {}", g.sup_norm(&s.particles));
            let u = total_energy(&s, &p).unwrap();
            assert!((u - sol.energy).abs() < 1e-11 * (1.0 + u.abs()));
        }
    }
}

#[test]
fn spear_gradient_is_the_axial_force_balance() {
    let p = dipolar();
    let d = characteristic_distances(&p);
    let h = SpacingVector::new((0..9).map(|k| d.h_bar + 0.01 * k as f64).collect()).unwrap();
    let s = SystemState::spear(&h);
    let g = energy_gradient(&s, &p).unwrap();
    // dJ/dh_k = -(sum of axial forces on particles right of gap k)
    let grad = spear_gradient(&h, &p);
    for (k, dk) in grad.iter().enumerate() {
        let pull: f64 = g.dx[k + 1..].iter().map(|v| v.x).sum();
        assert!((dk - pull).abs() < 1e-11, "gap {k}: {dk} vs {pull}");
    }
    assert!((spear_energy(&h, &p) - total_energy(&s, &p).unwrap()).abs() < 1e-12);
}

#[test]
fn explicit_ring_is_critical_in_space() {
    let p = dipolar();
    for n in [3, 6, 12, 40] {
        let r = ring_radius(n, &p).unwrap().radius;
        let s = ring_configuration(n, r).unwrap();
        let g = energy_gradient(&s, &p).unwrap();
        assert!(g.sup_norm(&s.particles) < 1e-11, "N={n}: {}", g.sup_norm(&s.particles));
    }
}

#[test]
fn ring_beats_spear_for_dipoles_at_twelve() {
    let p = dipolar();
    let spear = solve_spear(12, &p, 1e-12, 100).unwrap().energy;
    let ring = total_energy(&ring_configuration(12, ring_radius(12, &p).unwrap().radius).unwrap(), &p).unwrap();
    assert!(ring < spear, "ring {ring} spear {spear}");
}

#[test]
fn spear_hessian_meets_decay_hypotheses() {
    let p = LJParams::unit(36.0, 3.0).unwrap();
    let d = characteristic_distances(&p);
    let (m, spec) = scaled_spear_hessian(48, d.h_bar, &p).unwrap();
    assert!(verify_hypotheses(&m, &spec).unwrap().all_pass());
    assert!(check_inverse_decay(&m, &spec).unwrap().holds());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn damped_steps_never_gain_energy(seed in 0u64..1000, bend in 0.0f64..=1.0, n in 3usize..=9) {
        let p = PhysicalParams::new(dipolar(), 1.0, 0.5, 0.2).unwrap();
        let h = characteristic_distances(p.lj()).h_bar;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = arc_state(n, h, bend, 0.05, &mut rng).unwrap();
        let mut e = mechanical_energy(&s, &p).unwrap();
        for _ in 0..200 {
            s = step(&s, 1e-2, &p).unwrap();
            let next = mechanical_energy(&s, &p).unwrap();
            prop_assert!(next <= e + 1e-8, "{next} > {e}");
            e = next;
        }
    }
}
