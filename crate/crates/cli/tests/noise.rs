use std::sync::Arc;

use pltcp::combine::{synthesize_encodings, SynthesisOptions};
use pltcp::encoding::{apply, leading_block, Application, BlockEncoding};
use pltcp::models::tfim_spec;
use pltcp::numerics::{
    haar_state, kron_all, random_unitary, spectral_norm, ComplexMatrix, LinearOperator,
};
use pltcp_cli::noise::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

fn scenario(kind: ScenarioKind, eta: f64, trials: usize) -> NoiseScenario {
    NoiseScenario::new(kind, eta, trials, 17).unwrap()
}

#[test]
fn zero_perturbation_returns_input() {
    let u = random_unitary(4, &mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(perturb_unitary(&u, 0.0, 5).unwrap(), u);
}

#[test]
fn perturbation_has_requested_size_and_stays_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (dim, seed) in [(2, 0), (2, 1), (4, 2), (8, 3), (32, 4)] {
        let u = random_unitary(dim, &mut rng);
        for eta in [0.01, 0.3, 1.5] {
            let v = perturb_unitary(&u, eta, seed).unwrap();
            let distance = spectral_norm(&v.try_sub(&u).unwrap());
            assert!((distance - eta).abs() <= 1e-6, "dim {dim}: {distance}");
            assert!(v.unitarity_residual() <= 1e-10);
        }
    }
}

#[test]
fn perturbation_rejects_bad_input() {
    let u = sigma_x();
    assert!(perturb_unitary(&u, -0.1, 0).is_err());
    assert!(perturb_unitary(&u, 2.0, 0).is_err());
    assert!(perturb_unitary(&u.scale_real(2.0), 0.01, 0).is_err());
    assert!(NoiseScenario::new(ScenarioKind::Pauli, 2.5, 1, 0).is_err());
    assert!(NoiseScenario::new(ScenarioKind::Pauli, 0.1, 0, 0).is_err());
    assert!("depolarizing".parse::<ScenarioKind>().is_err());
}

#[test]
fn kron_distance_matches_dense_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let original: Vec<ComplexMatrix> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
        let perturbed: Vec<ComplexMatrix> = original
            .iter()
            .enumerate()
            .map(|(k, u)| {
                if k == 1 {
                    u.clone()
                } else {
                    perturb_unitary(u, 0.05, seed * 3 + k as u64).unwrap()
                }
            })
            .collect();
        let dense = kron_all(&original)
            .unwrap()
            .try_sub(&kron_all(&perturbed).unwrap())
            .unwrap();
        let measured = kron_distance(&original, &perturbed).unwrap();
        assert!((measured - spectral_norm(&dense)).abs() <= 1e-12);
    }
}

#[test]
fn scenarios_touch_the_right_gates() {
    let spec = tfim_spec(3, 2.0).unwrap();
    let pauli = noisy_tfim(&spec, &scenario(ScenarioKind::Pauli, 0.01, 1), 9).unwrap();
    let prep = noisy_tfim(&spec, &scenario(ScenarioKind::Prep, 0.01, 1), 9).unwrap();
    assert!(pauli.term_errors.iter().all(|&e| e > 0.0));
    assert!(pauli.pair.eps() <= 1e-12);
    assert!(prep.term_errors.iter().all(|&e| e == 0.0));
    assert!(prep.pair.eps() > 0.0);
    // Identity factors are not gates.
    for (term, noisy) in spec.terms().iter().zip(&pauli.factors) {
        for (f, g) in term.iter().zip(noisy) {
            assert_eq!(f.is_identity(), f.as_ref() == g);
        }
    }
}

/// Builds the noisy instance as an actual circuit and evaluates it.
fn circuit_block(
    spec: &pltcp::combine::CpLikeSpec,
    noisy: &NoisyTfim,
) -> (ComplexMatrix, BlockEncoding) {
    let factors: Vec<Vec<BlockEncoding>> = noisy
        .factors
        .iter()
        .map(|t| {
            t.iter()
                .map(|f| BlockEncoding::exact_unitary(f.clone()).unwrap())
                .collect()
        })
        .collect();
    let options = SynthesisOptions {
        pair: Some(noisy.pair.clone()),
        ..SynthesisOptions::default()
    };
    let synthesis = synthesize_encodings(spec.coefficients(), &factors, &options).unwrap();
    let be = synthesis.encoding;
    (leading_block(&be).unwrap(), be)
}

#[test]
fn block_algebra_matches_circuit_route() {
    for s in [2, 3] {
        let spec = tfim_spec(s, 2.0).unwrap();
        for kind in ScenarioKind::ALL {
            let noisy = noisy_tfim(&spec, &scenario(kind, 0.05, 1), 40 + s as u64).unwrap();
            let (block, be) = circuit_block(&spec, &noisy);
            let algebra = noisy.leading_block(s).unwrap().to_dense();
            assert!(block.max_abs_diff(&algebra) <= 1e-12, "s = {s}, {kind:?}");
            assert!((be.alpha() - noisy.pair.beta()).abs() <= 1e-12);

            let psi = haar_state(1 << s, 5);
            let via_circuit = apply(&be, &psi).unwrap();
            let via_operator =
                Application::from_operator(&noisy.leading_block(s).unwrap(), &psi).unwrap();
            assert!(
                (via_circuit.expected_repetitions - via_operator.expected_repetitions).abs()
                    <= 1e-10
            );

            let error = noisy.error_operator(&spec).unwrap();
            let mut dense_error = spec.dense().unwrap();
            dense_error
                .axpy(pltcp::C64::new(-be.alpha(), 0.0), &block)
                .unwrap();
            assert!(error.to_dense().max_abs_diff(&dense_error) <= 1e-12);
            assert_eq!(error.nrows(), 1 << s);
        }
    }
}

#[test]
fn zero_noise_is_exact() {
    for kind in ScenarioKind::ALL {
        let records = run_tfim_noise(2, 6, 2.0, &scenario(kind, 0.0, 2)).unwrap();
        assert!(records.iter().all(|r| r.relative_error <= 1e-10));
        assert!(records.iter().all(|r| r.expected_repetitions >= 1.0));
    }
}

#[test]
fn noisy_trials_respect_the_bound() {
    for kind in ScenarioKind::ALL {
        let records = run_tfim_noise(2, 5, 2.0, &scenario(kind, 0.01, 20)).unwrap();
        for r in &records {
            assert!(
                r.relative_error <= r.theoretical_bound * (1.0 + 1e-6),
                "{r:?}"
            );
            assert!(r.relative_error > 0.0);
        }
    }
}

#[test]
fn records_are_ordered_and_deterministic() {
    let sc = scenario(ScenarioKind::Both, 0.01, 3);
    let a = run_tfim_noise(2, 4, 2.0, &sc).unwrap();
    let b = run_tfim_noise(2, 4, 2.0, &sc).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    write_trials(&mut x, &a).unwrap();
    write_trials(&mut y, &b).unwrap();
    assert_eq!(x, y);
    let keys: Vec<(usize, usize)> = a.iter().map(|r| (r.s, r.trial)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let text = String::from_utf8(x).unwrap();
    assert!(text.starts_with("s,scenario,eta,trial,relative_error,theoretical_bound"));
}

#[test]
fn range_is_checked() {
    let sc = scenario(ScenarioKind::Pauli, 0.01, 1);
    assert!(run_tfim_noise(1, 3, 2.0, &sc).is_err());
    assert!(run_tfim_noise(4, 3, 2.0, &sc).is_err());
    assert!(run_tfim_noise(2, 11, 2.0, &sc).is_err());
}

#[test]
fn summary_statistics() {
    let mut v = vec![3.0, 1.0, 2.0, 10.0];
    assert_eq!(median(&mut v), 2.5);
    let records = run_tfim_noise(2, 3, 2.0, &scenario(ScenarioKind::Pauli, 0.01, 5)).unwrap();
    let summary = summarize(&records);
    assert_eq!(summary.len(), 2);
    assert!(summary
        .iter()
        .all(|g| g.trials == 5 && g.worst_ratio <= 1.0));
}

#[test]
fn unitary_factor_check() {
    let bad = pltcp::combine::CpLikeSpec::new(
        vec![pltcp::C64::new(1.0, 0.0)],
        vec![vec![Arc::new(sigma_x().scale_real(0.5))]],
    )
    .unwrap();
    let err = noisy_tfim(&bad, &scenario(ScenarioKind::Pauli, 0.01, 1), 0).unwrap_err();
    assert!(err.to_string().contains("term 0"));
}

#[test]
fn basis_statistics_match_dense_oracle() {
    for s in [2, 3, 4] {
        let (spec, dense) = pltcp::models::tfim(s, 2.0).unwrap();
        let beta = (3 * s - 1) as f64;
        let (mut reps, mut trials) = (0.0, 0.0);
        for k in 0..1 << s {
            let column: f64 = (0..1 << s).map(|r| dense.get(r, k).norm_sqr()).sum();
            let amplitude = column.sqrt() / beta;
            reps += 1.0 / amplitude;
            trials += 1.0 / (amplitude * amplitude);
        }
        let n = (1 << s) as f64;
        let (r, t) = basis_repetitions(s, 2.0).unwrap();
        assert!((r - reps / n).abs() <= 1e-10 * r);
        assert!((t - trials / n).abs() <= 1e-10 * t);
        assert_eq!(spec.num_terms(), 2 * s - 1);
    }
    assert!(basis_repetitions(1, 2.0).is_err());
}
