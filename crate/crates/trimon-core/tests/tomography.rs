//! Readout Monte Carlo and maximum-likelihood reconstruction checks.

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use trimon_core::error::CoreError;
use trimon_core::linalg::{c, identity, max_abs, projector, trace_distance, CMatrix, CVector, ONE};
use trimon_core::readout::{
    classify, combine_frequencies, exchange_populations, run_tomography, sample_shots,
    setting_populations, tomography_settings, MeasurementModel, Outcome, PreRotation,
    TomographySetting,
};
use trimon_core::tomo::{
    bootstrap_binomial_std, bootstrap_fidelity, cholesky_density, density_from_stokes, fidelity,
    fidelity_pure, forced_purity_init, likelihood_terms, log_likelihood_of_density,
    mle_reconstruct, sample_std, stokes, CholeskyParams, MleOptions,
};

fn bell_state() -> CVector {
    let mut v = CVector::zeros(4);
    v[0] = c(1.0 / 2.0f64.sqrt(), 0.0);
    v[3] = c(1.0 / 2.0f64.sqrt(), 0.0);
    v
}

fn bell_rho() -> CMatrix {
    projector(&bell_state())
}

fn maximally_mixed() -> CMatrix {
    identity(4) / c(4.0, 0.0)
}

/// Hilbert-Schmidt random density matrix: ρ = GG†/Tr with Gaussian G.
fn random_density(rng: &mut ChaCha8Rng) -> CMatrix {
    use rand::Rng;
    let mut g = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            // Box-Muller
            let u1: f64 = rng.gen::<f64>().max(1e-12);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            g[(i, j)] = c(
                r * (2.0 * std::f64::consts::PI * u2).cos(),
                r * (2.0 * std::f64::consts::PI * u2).sin(),
            );
        }
    }
    let rho = &g * g.adjoint();
    let tr = trimon_core::linalg::trace(&rho).re;
    rho / c(tr, 0.0)
}

#[test]
fn classification_thresholds() {
    let model = MeasurementModel::default();
    assert_eq!(classify(3.9, &model), Outcome::ZeroZero);
    assert_eq!(classify(0.0, &model), Outcome::Discard);
    assert_eq!(classify(-3.9, &model), Outcome::OneOne);
    // boundary values map to discard deterministically
    assert_eq!(classify(model.vth_plus, &model), Outcome::Discard);
    assert_eq!(classify(model.vth_minus, &model), Outcome::Discard);
}

#[test]
fn pure_ground_state_with_tiny_noise_always_reads_00() {
    let model = MeasurementModel {
        sigma: 1e-12,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shots = sample_shots([1.0, 0.0, 0.0, 0.0], &model, 500, &mut rng).unwrap();
    let mu00 = model.means()[0];
    for s in &shots {
        assert_eq!(s.outcome, Outcome::ZeroZero);
        assert!((s.v - mu00).abs() < 1e-9);
    }
}

#[test]
fn bell_populations_split_evenly_within_binomial_error() {
    let model = MeasurementModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let shots = sample_shots([0.5, 0.0, 0.0, 0.5], &model, 10_000, &mut rng).unwrap();
    let n00 = shots.iter().filter(|s| s.outcome == Outcome::ZeroZero).count() as f64;
    let n11 = shots.iter().filter(|s| s.outcome == Outcome::OneOne).count() as f64;
    let kept = n00 + n11;
    let sigma = 0.5 / kept.sqrt();
    assert!((n00 / kept - 0.5).abs() < 3.0 * sigma);
    assert!((n11 / kept - 0.5).abs() < 3.0 * sigma);
}

#[test]
fn overlapping_middle_states_mostly_discarded() {
    // both means inside the threshold window: discard fraction matches the
    // Gaussian-tail arithmetic and exceeds 95%
    let model = MeasurementModel::default();
    let mu = model.means();
    let gauss = Normal::new(0.0, model.sigma).unwrap();
    let keep = |m: f64| {
        (1.0 - gauss.cdf(model.vth_plus - m)) + gauss.cdf(model.vth_minus - m)
    };
    let expected_discard = 1.0 - 0.5 * (keep(mu[1]) + keep(mu[2]));
    assert!(expected_discard > 0.95);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 20_000;
    let shots = sample_shots([0.0, 0.5, 0.5, 0.0], &model, n, &mut rng).unwrap();
    let discarded =
        shots.iter().filter(|s| s.outcome == Outcome::Discard).count() as f64 / n as f64;
    assert!(discarded >= 0.95, "discard fraction {discarded}");
    let binom_sigma = (expected_discard * (1.0 - expected_discard) / n as f64).sqrt();
    assert!((discarded - expected_discard).abs() < 3.0 * binom_sigma);
}

#[test]
fn invalid_probability_vector_rejected() {
    let model = MeasurementModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    assert!(sample_shots([0.5, 0.5, 0.5, 0.0], &model, 10, &mut rng).is_err());
}

#[test]
fn eighteen_settings_with_cnot_variants() {
    let settings = tomography_settings();
    assert_eq!(settings.len(), 18);
    assert!(settings.contains(&TomographySetting {
        pre_a: PreRotation::Identity,
        pre_b: PreRotation::Identity,
        cnot_pair: false,
    }));
    let with_cnot = settings.iter().filter(|s| s.cnot_pair).count();
    assert_eq!(with_cnot, 9);
}

#[test]
fn cnot_pair_exchanges_populations() {
    assert_eq!(exchange_populations([0.0, 1.0, 0.0, 0.0]), [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(exchange_populations([0.1, 0.2, 0.3, 0.4]), [0.2, 0.1, 0.4, 0.3]);
}

#[test]
fn analytic_frequencies_equal_born_probabilities() {
    let rho = bell_rho();
    let data = run_tomography(&rho, &MeasurementModel::default(), 0, 0).unwrap();
    assert!(data.analytic);
    assert_eq!(data.settings.len(), 9);
    // the (I, I) pair sees the raw populations
    let zz = &data.settings[0];
    assert_relative_eq!(zz.f[0], 0.5, epsilon = 1e-12);
    assert_relative_eq!(zz.f[3], 0.5, epsilon = 1e-12);
    assert!(zz.f[1].abs() < 1e-12 && zz.f[2].abs() < 1e-12);
    // every setting matches the direct Born computation
    for setting in &data.settings {
        let expected = setting_populations(
            &rho,
            &TomographySetting {
                pre_a: setting.pre_a,
                pre_b: setting.pre_b,
                cnot_pair: false,
            },
        );
        for s in 0..4 {
            assert_relative_eq!(setting.f[s], expected[s], epsilon = 1e-12);
        }
    }
}

#[test]
fn maximally_mixed_input_splits_evenly_in_every_setting() {
    let data = run_tomography(&maximally_mixed(), &MeasurementModel::default(), 4000, 11).unwrap();
    for setting in &data.settings {
        let n00 = setting.counts_plain[0] as f64;
        let n11 = setting.counts_plain[1] as f64;
        let kept = n00 + n11;
        let sigma = 0.5 / kept.sqrt();
        assert!(
            (n00 / kept - 0.5).abs() < 4.0 * sigma,
            "setting splits {n00} / {n11}"
        );
    }
}

#[test]
fn heralding_discards_the_thermal_fraction() {
    let model = MeasurementModel {
        herald: true,
        p_therm: 0.05,
        ..Default::default()
    };
    let shots = 5_000;
    let data = run_tomography(&bell_rho(), &model, shots, 21).unwrap();
    let total_discards: u64 = data.settings.iter().map(|s| s.herald_discards).sum();
    let attempts = (shots * 18) as f64;
    let expected = 1.0 - 0.95f64.powi(3);
    let sigma = (expected * (1.0 - expected) / attempts).sqrt();
    let observed = total_discards as f64 / attempts;
    assert!(
        (observed - expected).abs() < 4.0 * sigma,
        "herald discard fraction {observed} vs {expected}"
    );
}

#[test]
fn all_discarded_setting_is_an_error() {
    assert!(matches!(
        combine_frequencies([0, 0, 100], [0, 0, 100]),
        Err(CoreError::InsufficientStatistics(_))
    ));
    // heralding rejecting essentially every shot propagates the same error
    let model = MeasurementModel {
        herald: true,
        p_therm: 0.9999,
        ..Default::default()
    };
    let result = run_tomography(&bell_rho(), &model, 5, 5);
    assert!(matches!(result, Err(CoreError::InsufficientStatistics(_))));
}

#[test]
fn cholesky_reference_points() {
    let mixed = cholesky_density(&CholeskyParams::maximally_mixed()).unwrap();
    assert!(max_abs(&(mixed - maximally_mixed())) < 1e-14);

    let mut t = [0.0; 16];
    t[0] = 1.0;
    let pure = cholesky_density(&CholeskyParams { t }).unwrap();
    let mut expected = CMatrix::zeros(4, 4);
    expected[(0, 0)] = ONE;
    assert!(max_abs(&(pure - expected)) < 1e-14);

    assert!(matches!(
        cholesky_density(&CholeskyParams { t: [0.0; 16] }),
        Err(CoreError::DegenerateParameters(_))
    ));
}

#[test]
fn random_cholesky_parameters_give_physical_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    use rand::Rng;
    for _ in 0..1000 {
        let mut t = [0.0f64; 16];
        for v in &mut t {
            *v = rng.gen_range(-1.0..1.0);
        }
        if t.iter().all(|v| v.abs() < 1e-3) {
            continue;
        }
        let rho = cholesky_density(&CholeskyParams { t }).unwrap();
        assert!(max_abs(&(&rho - rho.adjoint())) < 1e-12);
        assert_relative_eq!(trimon_core::linalg::trace(&rho).re, 1.0, epsilon = 1e-12);
        let (vals, _) = trimon_core::linalg::hermitian_eigen(&rho);
        assert!(vals[0] > -1e-12);
    }
}

#[test]
fn likelihood_is_zero_at_perfect_fit_and_curves_quadratically() {
    let rho = bell_rho();
    let data = run_tomography(&rho, &MeasurementModel::default(), 0, 0).unwrap();
    let terms = likelihood_terms(&data);
    let (ll, _) = log_likelihood_of_density(&rho, &terms);
    // exact-zero probabilities are floored at 1e-12, each contributing 5e-13
    assert!(ll.abs() < 1e-9, "log-likelihood at truth: {ll}");

    // perturbing one observed frequency by ε drops the objective by ε²/(2p)
    let mut perturbed = data.clone();
    let eps = 1e-4;
    perturbed.settings[0].f[0] += eps;
    let terms_p = likelihood_terms(&perturbed);
    let (ll_p, _) = log_likelihood_of_density(&rho, &terms_p);
    let p = 0.5;
    assert_relative_eq!(ll_p, -eps * eps / (2.0 * p), max_relative = 1e-3);
}

#[test]
fn likelihood_invariant_under_parameter_scaling() {
    let rho = bell_rho();
    let data = run_tomography(&rho, &MeasurementModel::default(), 0, 0).unwrap();
    let terms = likelihood_terms(&data);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    use rand::Rng;
    let mut t = [0.0; 16];
    for v in &mut t {
        *v = rng.gen_range(-1.0..1.0);
    }
    let r1 = cholesky_density(&CholeskyParams { t }).unwrap();
    let mut t2 = t;
    for v in &mut t2 {
        *v *= 3.7;
    }
    let r2 = cholesky_density(&CholeskyParams { t: t2 }).unwrap();
    let (l1, _) = log_likelihood_of_density(&r1, &terms);
    let (l2, _) = log_likelihood_of_density(&r2, &terms);
    assert_relative_eq!(l1, l2, max_relative = 1e-12);
}

#[test]
fn forced_purity_recovers_exact_bell_data() {
    let data = run_tomography(&bell_rho(), &MeasurementModel::default(), 0, 0).unwrap();
    let init = forced_purity_init(&likelihood_terms(&data));
    let rho = cholesky_density(&init).unwrap();
    let f = fidelity(&bell_rho(), &rho).unwrap();
    assert!(f >= 0.99, "init fidelity {f}");
}

#[test]
fn forced_purity_uniform_data_is_maximally_mixed() {
    let data = run_tomography(&maximally_mixed(), &MeasurementModel::default(), 0, 0).unwrap();
    let init = forced_purity_init(&likelihood_terms(&data));
    let rho = cholesky_density(&init).unwrap();
    assert!(trace_distance(&rho, &maximally_mixed()) < 1e-10);
}

#[test]
fn forced_purity_always_physical_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    use rand::Rng;
    for _ in 0..50 {
        let mut data = run_tomography(&bell_rho(), &MeasurementModel::default(), 0, 0).unwrap();
        for setting in &mut data.settings {
            for v in &mut setting.f {
                *v = rng.gen_range(0.0..1.0);
            }
            let s: f64 = setting.f.iter().sum();
            for v in &mut setting.f {
                *v /= s;
            }
        }
        let init = forced_purity_init(&likelihood_terms(&data));
        let rho = cholesky_density(&init).unwrap();
        let (vals, _) = trimon_core::linalg::hermitian_eigen(&rho);
        assert!(vals[0] > -1e-10);
        assert_relative_eq!(trimon_core::linalg::trace(&rho).re, 1.0, epsilon = 1e-10);
    }
}

#[test]
fn mle_on_exact_bell_data_is_nearly_exact() {
    let data = run_tomography(&bell_rho(), &MeasurementModel::default(), 0, 0).unwrap();
    let result = mle_reconstruct(&data, &MleOptions::default()).unwrap();
    assert!(trace_distance(&result.rho, &bell_rho()) < 1e-3);
    let f = fidelity(&bell_rho(), &result.rho).unwrap();
    assert!(f >= 0.999, "fidelity {f}");
    assert_relative_eq!(result.stokes[0][0], 1.0, epsilon = 1e-10);
}

#[test]
fn mle_on_sampled_mixed_state_stays_near_the_center() {
    let data = run_tomography(&maximally_mixed(), &MeasurementModel::default(), 10_000, 31).unwrap();
    let result = mle_reconstruct(&data, &MleOptions::default()).unwrap();
    let td = trace_distance(&result.rho, &maximally_mixed());
    assert!(td < 0.02, "trace distance {td}");
}

#[test]
fn mle_never_beats_the_initialization_backwards() {
    let data = run_tomography(&bell_rho(), &MeasurementModel::default(), 2_000, 17).unwrap();
    let terms = likelihood_terms(&data);
    let init = forced_purity_init(&terms);
    let init_rho = cholesky_density(&init).unwrap();
    let (ll_init, _) = log_likelihood_of_density(&init_rho, &terms);
    let result = mle_reconstruct(&data, &MleOptions::default()).unwrap();
    assert!(result.log_likelihood >= ll_init - 1e-12);
}

#[test]
fn bell_pipeline_with_default_overlap_model_lands_in_the_window() {
    let data = run_tomography(&bell_rho(), &MeasurementModel::default(), 10_000, 42).unwrap();
    let result = mle_reconstruct(&data, &MleOptions::default()).unwrap();
    let f = fidelity(&bell_rho(), &result.rho).unwrap();
    assert!(
        (0.95..=1.0).contains(&f),
        "pipeline fidelity {f} outside [0.95, 1.0]"
    );
}

#[test]
fn mle_infinite_shot_reconstruction_over_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let rho = random_density(&mut rng);
        let data = run_tomography(&rho, &MeasurementModel::default(), 0, 0).unwrap();
        let result = mle_reconstruct(&data, &MleOptions::default()).unwrap();
        let td = trace_distance(&result.rho, &rho);
        assert!(td < 1e-3, "trace distance {td}");
    }
}

#[test]
fn fidelity_reference_values() {
    let rho = bell_rho();
    assert_relative_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-10);

    let mut zero = CMatrix::zeros(4, 4);
    zero[(0, 0)] = ONE;
    assert_relative_eq!(
        fidelity(&zero, &maximally_mixed()).unwrap(),
        0.5,
        epsilon = 1e-12
    );

    // pure-target shortcut agrees with the general formula
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let rho = random_density(&mut rng);
        let psi = bell_state();
        let f1 = fidelity(&projector(&psi), &rho).unwrap();
        let f2 = fidelity_pure(&psi, &rho);
        assert_relative_eq!(f1, f2, epsilon = 1e-10);
    }
}

#[test]
fn fidelity_rejects_unnormalized_states() {
    let rho = bell_rho();
    let bad = &rho * c(2.0, 0.0);
    assert!(fidelity(&rho, &bad).is_err());
}

#[test]
fn stokes_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let rho = random_density(&mut rng);
        let s = stokes(&rho);
        assert_relative_eq!(s[0][0], 1.0, epsilon = 1e-12);
        let back = density_from_stokes(&s);
        assert!(max_abs(&(back - rho)) < 1e-12);
    }
}

#[test]
fn bootstrap_degenerate_data_has_vanishing_spread() {
    let model = MeasurementModel {
        sigma: 1e-9,
        ..Default::default()
    };
    let data = run_tomography(&bell_rho(), &model, 400, 12).unwrap();
    let std = bootstrap_fidelity(&data, &bell_rho(), 100, &MleOptions::default()).unwrap();
    assert!(std < 1e-3, "degenerate bootstrap std {std}");
}

#[test]
fn bootstrap_matches_binomial_standard_error() {
    let (k, n) = (7_400u64, 10_000u64);
    let std = bootstrap_binomial_std(k, n, 400, 13);
    let p = k as f64 / n as f64;
    let closed_form = (p * (1.0 - p) / n as f64).sqrt();
    assert!(
        (std - closed_form).abs() / closed_form < 0.10,
        "bootstrap {std} vs closed form {closed_form}"
    );
}

#[test]
fn bootstrap_resample_count_stability() {
    let data = run_tomography(&bell_rho(), &MeasurementModel::default(), 2_000, 14).unwrap();
    let s100 = bootstrap_fidelity(&data, &bell_rho(), 100, &MleOptions::default()).unwrap();
    let s400 = bootstrap_fidelity(&data, &bell_rho(), 400, &MleOptions { seed: 99, ..Default::default() }).unwrap();
    assert!(s100 > 0.0 && s400 > 0.0);
    assert!(
        (s100 - s400).abs() / s400 < 0.30,
        "bootstrap stds {s100} vs {s400}"
    );
}

#[test]
fn sample_std_sanity() {
    let xs = [1.0, 2.0, 3.0, 4.0];
    assert_relative_eq!(sample_std(&xs), (5.0f64 / 3.0).sqrt(), epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]
    #[test]
    fn classification_is_a_partition(v in -10.0f64..10.0) {
        let model = MeasurementModel::default();
        let outcome = classify(v, &model);
        let expected = if v > model.vth_plus {
            Outcome::ZeroZero
        } else if v < model.vth_minus {
            Outcome::OneOne
        } else {
            Outcome::Discard
        };
        prop_assert_eq!(outcome, expected);
    }
}
