//! Property tests of the structural invariants across all four systems.

use coadjoint::algebra::{SemidirectElement, So4Element};
use coadjoint::analysis::{heavy_top_orbit_point, sphere_histogram, SphereHistogram};
use coadjoint::integrators::{rk4, step_split};
use coadjoint::noise::{coarsen, rng_for};
use coadjoint::state::SpringPendulumState;
use coadjoint::systems::{
    isotropic_sigmas, DissipationCasimir, HeavyTopSpec, RigidBodySpec, So4BodySpec,
    SpringPendulumSpec, StochasticSystem,
};
use coadjoint::Vec3;
use proptest::prelude::*;

fn vec3(scale: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-scale..scale).prop_map(Vec3::from)
}

fn increments(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.3..0.3f64, n)
}

fn dissipation() -> impl Strategy<Value = DissipationCasimir> {
    prop_oneof![
        Just(DissipationCasimir::PiDotGamma),
        Just(DissipationCasimir::GammaSquared),
        Just(DissipationCasimir::NoiseBalanced),
    ]
}

fn relative_casimir_change<S: StochasticSystem>(system: &S, a: &S::State, b: &S::State) -> f64 {
    system
        .casimirs(a)
        .iter()
        .zip(system.casimirs(b))
        .map(|(x, y)| (x - y).abs() / x.abs().max(1e-3))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rigid_body_split_step_keeps_the_sphere(
        inertia in prop::array::uniform3(0.5..4.0f64),
        theta in 0.0..1.0f64,
        sigmas in prop::collection::vec(vec3(1.0), 0..4),
        pi in vec3(2.0),
        dt in 1e-4..1e-3f64,
        dw in increments(4),
    ) {
        let b = RigidBodySpec::new(Vec3::from(inertia), theta, sigmas).unwrap();
        let noise_only = b.noise_substep(&pi, &dw);
        prop_assert!(relative_casimir_change(&b, &pi, &noise_only) < 1e-14);
        let x = step_split(&b, &pi, dt, &dw);
        prop_assert!(relative_casimir_change(&b, &pi, &x) < 1e-12);
    }

    #[test]
    fn heavy_top_split_step_keeps_both_casimirs(
        theta in 0.0..1.0f64,
        sigma in 0.0..1.0f64,
        eta in 0.0..1.0f64,
        d in dissipation(),
        chi in vec3(1.0),
        pi in vec3(2.0),
        gamma in vec3(1.0),
        dt in 1e-4..1e-3f64,
        dw in increments(3),
    ) {
        prop_assume!(gamma.norm() > 0.1);
        let etas = (0..3).map(|i| Vec3::ith((i + 1) % 3, eta)).collect();
        let top = HeavyTopSpec::new(Vec3::new(1.0, 2.0, 3.0), 1.0, 1.0, chi, theta, isotropic_sigmas(sigma), etas, d)
            .unwrap();
        let s = SemidirectElement::new(pi, gamma);
        prop_assert!(relative_casimir_change(&top, &s, &top.noise_substep(&s, &dw)) < 1e-13);
        prop_assert!(relative_casimir_change(&top, &s, &step_split(&top, &s, dt, &dw)) < 1e-11);
    }

    #[test]
    fn so4_split_step_keeps_both_casimirs(
        theta in 0.0..1.0f64,
        sigma in 0.0..1.0f64,
        a in vec3(1.0),
        b in vec3(1.0),
        dt in 1e-4..1e-3f64,
        dw in increments(6),
    ) {
        let body = So4BodySpec::isotropic([1.0, 2.0, 3.0, 4.0], theta, sigma).unwrap();
        let x = So4Element::new(a, b);
        prop_assert!(relative_casimir_change(&body, &x, &body.noise_substep(&x, &dw)) < 1e-13);
        prop_assert!(relative_casimir_change(&body, &x, &step_split(&body, &x, dt, &dw)) < 1e-11);
    }

    #[test]
    fn spring_pendulum_keeps_the_unit_vertical(
        sigma in 0.0..1.0f64,
        pi in vec3(1.0),
        gamma in vec3(1.0),
        r in 0.5..2.0f64,
        p in -1.0..1.0f64,
        dt in 1e-4..1e-3f64,
        dw in increments(3),
    ) {
        prop_assume!(gamma.norm() > 0.1);
        let spec = SpringPendulumSpec::new(1.0, 1.0, 4.0, 0.5, isotropic_sigmas(sigma), vec![], 0.1, 0.2).unwrap();
        let s = SpringPendulumState { pi, gamma, r, p };
        prop_assert!(relative_casimir_change(&spec, &s, &step_split(&spec, &s, dt, &dw)) < 1e-11);
    }

    #[test]
    fn damping_never_raises_the_energy(
        inertia in prop::array::uniform3(0.5..4.0f64),
        theta in 0.0..2.0f64,
        pi in vec3(2.0),
    ) {
        let b = RigidBodySpec::new(Vec3::from(inertia), theta, vec![]).unwrap();
        let h0 = b.energy(&pi);
        let h1 = b.energy(&rk4(&b, &pi, 1e-3));
        prop_assert!(h1 <= h0 + 1e-14 * h0.max(1.0));
    }

    #[test]
    fn every_nonzero_vector_has_a_cell(p in vec3(5.0), n_lat in 1usize..20, n_lon in 1usize..40) {
        prop_assume!(p.norm() > 1e-12);
        let h = SphereHistogram::empty(n_lat, n_lon).unwrap();
        prop_assert!(h.cell_of(&p).unwrap() < n_lat * n_lon);
    }

    #[test]
    fn histogram_of_a_concatenation_is_the_merge(
        a in prop::collection::vec(vec3(1.0), 1..50),
        b in prop::collection::vec(vec3(1.0), 1..50),
    ) {
        prop_assume!(a.iter().chain(&b).all(|p| p.norm() > 1e-12));
        let joined: Vec<Vec3> = a.iter().chain(&b).copied().collect();
        let whole = sphere_histogram(&joined, 6, 12).unwrap();
        let merged = sphere_histogram(&a, 6, 12).unwrap().merge(&sphere_histogram(&b, 6, 12).unwrap()).unwrap();
        prop_assert_eq!(whole.counts(), merged.counts());
    }

    #[test]
    fn coarsening_keeps_the_endpoint(table in prop::collection::vec(-1.0..1.0f64, 24), factor in prop::sample::select(vec![1usize, 2, 4])) {
        let coarse = coarsen(&table, 3, factor);
        for c in 0..3 {
            let fine: f64 = table.iter().skip(c).step_by(3).sum();
            let sum: f64 = coarse.iter().skip(c).step_by(3).sum();
            prop_assert!((fine - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn heavy_top_orbit_points_hit_their_casimirs(seed in 0u64..1000, k in 0.2..2.0f64, c in -1.0..1.0f64) {
        let mut rng = rng_for(seed, 0);
        let s = heavy_top_orbit_point(&mut rng, k, c, None).unwrap();
        prop_assert!((s.v.norm() - k).abs() < 1e-12);
        prop_assert!((s.g.dot(&s.v) - c).abs() < 1e-12);
    }
}
