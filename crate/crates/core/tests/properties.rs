use proptest::prelude::*;
use vfp_core::particles::{interaction_forces, InteractionEvaluation};
use vfp_core::selfcons::stationary_density_on;
use vfp_core::{
    find_fixed_points, lift_to_phase_space, map_derivative, mean_field_map, stationarity_residual,
    stationary_density, ConfiningPotential, InteractionPotential, Mode, MomentumGrid,
    ParticleEnsemble, PhaseSpaceMeasure, SelfConsistencyProblem, Stability,
};

fn canonical(alpha: f64, lambda: f64) -> SelfConsistencyProblem {
    SelfConsistencyProblem::new(
        ConfiningPotential::double_well(),
        InteractionPotential::quadratic(alpha),
        lambda,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn map_is_odd_for_even_potential(lambda in 0.05f64..3.0, alpha in 0.2f64..3.0, m in -2.0f64..2.0) {
        let p = canonical(alpha, lambda);
        let (a, b) = (mean_field_map(&p, m).unwrap(), mean_field_map(&p, -m).unwrap());
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn map_is_bounded_and_increasing(lambda in 0.05f64..3.0, alpha in 0.2f64..3.0, m in -2.0f64..2.0) {
        let p = canonical(alpha, lambda);
        let d = map_derivative(&p, m).unwrap();
        prop_assert!(d > 0.0);
        let (lo, hi) = (mean_field_map(&p, m - 0.1).unwrap(), mean_field_map(&p, m + 0.1).unwrap());
        prop_assert!(lo < hi);
    }

    #[test]
    fn stationary_density_is_normalized(lambda in 0.05f64..3.0, m in -1.5f64..1.5) {
        let rho = stationary_density(&canonical(1.0, lambda), m).unwrap();
        prop_assert_eq!(rho.moments[0], 1.0);
        prop_assert!((rho.trapezoid_mass() - 1.0).abs() < 1e-6);
        prop_assert!(rho.density.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn fixed_points_satisfy_the_map(lambda in 0.05f64..3.0, alpha in 0.3f64..3.0) {
        let p = canonical(alpha, lambda);
        let set = find_fixed_points(&p).unwrap();
        prop_assert!(set.len() % 2 == 1);
        prop_assert!(set.means().windows(2).all(|w| w[0] < w[1]));
        for fp in &set.points {
            prop_assert!((mean_field_map(&p, fp.m).unwrap() - fp.m).abs() < 1e-9);
            let stable = fp.slope < 1.0;
            prop_assert_eq!(fp.stability == Stability::Stable, stable);
        }
        let means = set.means();
        for (a, b) in means.iter().zip(means.iter().rev()) {
            prop_assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn lifted_measure_factorizes(lambda in 0.1f64..2.0) {
        let rho = stationary_density_on(&canonical(1.0, lambda), 0.0, 64).unwrap();
        let mu = lift_to_phase_space(&rho, &MomentumGrid { nodes: 64, half_width: 8.0 }).unwrap();
        prop_assert!(mu.factorization_error() < 1e-14);
        prop_assert!((mu.p_variance() - lambda).abs() < 1e-8 * lambda.max(1.0));
        let json = serde_json::to_string(&mu).unwrap();
        let back: PhaseSpaceMeasure = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, mu);
    }

    #[test]
    fn moment_forces_match_pairwise(seed in any::<u64>(), alpha in 0.1f64..3.0) {
        let ens = ParticleEnsemble::new(
            200,
            1,
            Mode::Overdamped,
            vfp_core::InitialCondition::Normal { mean: 0.3, sd: 1.0 },
            0.5,
            seed,
        )
        .unwrap();
        let psi = InteractionPotential::quadratic(alpha);
        let fast = interaction_forces(&ens, &psi, InteractionEvaluation::Moments);
        let slow = interaction_forces(&ens, &psi, InteractionEvaluation::Pairwise);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn fixed_point_count_is_monotone_in_temperature() {
    let mut prev = usize::MAX;
    for k in 0..24 {
        let lambda = 0.05 * 1.15f64.powi(k);
        let n = find_fixed_points(&canonical(1.0, lambda)).unwrap().len();
        assert!(n <= prev, "count rose to {n} at λ = {lambda}");
        prev = n;
    }
    assert_eq!(prev, 1);
}

#[test]
fn residual_is_small_only_at_fixed_points() {
    let p = canonical(1.0, 0.2);
    let (v, psi) = (
        ConfiningPotential::double_well(),
        InteractionPotential::quadratic(1.0),
    );
    let res = |m: f64| {
        let rho = stationary_density_on(&p, m, 128).unwrap();
        let mu = lift_to_phase_space(&rho, &MomentumGrid::default()).unwrap();
        stationarity_residual(&mu, &v, &psi, None).unwrap().l2
    };
    let set = find_fixed_points(&p).unwrap();
    let worst_fixed = set.means().into_iter().map(res).fold(0.0, f64::max);
    for trial in [0.3, -0.6] {
        assert!(
            res(trial) > 10.0 * worst_fixed,
            "trial mean {trial} looks stationary"
        );
    }
}
