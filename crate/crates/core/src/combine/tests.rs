use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::circuit::{evaluate, GateKind};
use crate::encoding::{dilate, encoding_error, leading_block, BlockEncoding};
use crate::numerics::{
    gaussian_matrix, hermitian_eigen, kron, kron_all, random_unitary, spectral_function,
    spectral_norm, ComplexMatrix,
};
use crate::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Permutation matrix exchanging qubits `i` and `j` (0-based) of `n`.
fn swap_matrix(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let (bi, bj) = (1 << (n - 1 - i), 1 << (n - 1 - j));
    ComplexMatrix::from_fn(dim, dim, |r, col| {
        let image = if ((col & bi) != 0) != ((col & bj) != 0) {
            col ^ bi ^ bj
        } else {
            col
        };
        if r == image {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `S = ∏_{i=1}^{s} SWAP^{a+i}_{a+b+i}` written as a matrix product, 1-based.
fn product_swap_oracle(a: usize, s: usize, b: usize, t: usize) -> ComplexMatrix {
    let n = a + s + b + t;
    let mut m = ComplexMatrix::identity(1 << n);
    if b == 0 {
        return m;
    }
    for i in 1..=s {
        m = m.matmul(&swap_matrix(n, a + i - 1, a + b + i - 1)).unwrap();
    }
    m
}

fn random_matrix(qubits: usize, seed: u64) -> ComplexMatrix {
    let d = 1 << qubits;
    gaussian_matrix(d, d, &mut rng(seed))
}

/// Encoding of a nearby matrix: `dilate(A + δE)`, with `eps` set to the
/// measured error against `A` itself.
fn perturbed_encoding(target: &ComplexMatrix, delta: f64, seed: u64) -> BlockEncoding {
    let d = target.rows();
    let e = gaussian_matrix(d, d, &mut rng(seed));
    let e = e.scale_real(delta / spectral_norm(&e));
    let nearby = target + &e;
    let be = dilate(&nearby, Some(spectral_norm(&nearby).max(1e-3))).unwrap();
    let eps = encoding_error(&be, target).unwrap();
    be.with_eps(eps).unwrap()
}

fn perturb(u: &ComplexMatrix, delta: f64, seed: u64) -> ComplexMatrix {
    let g = gaussian_matrix(u.rows(), u.cols(), &mut rng(seed));
    let h = (&g + &g.adjoint()).scale_real(0.5);
    let (vals, vecs) = hermitian_eigen(&h).unwrap();
    let scale = delta / vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rotation = spectral_function(&vals, &vecs, |l| C64::from_polar(1.0, scale * l));
    rotation.matmul(u).unwrap()
}

#[test]
fn empty_swap_register() {
    assert!(swap_register(2, 0, 3, 1).is_empty());
    assert_eq!(swap_register(2, 0, 3, 1).width(), 6);
}

#[test]
fn single_swap_register_permutes_middle_bits() {
    let circuit = swap_register(1, 1, 1, 1);
    assert_eq!(circuit.len(), 1);
    assert_eq!(circuit.gates()[0].targets(), vec![1, 2]);
    let u = evaluate(&circuit).unwrap();
    for x in 0..16usize {
        let bits = [(x >> 3) & 1, (x >> 2) & 1, (x >> 1) & 1, x & 1];
        let y = (bits[0] << 3) | (bits[2] << 2) | (bits[1] << 1) | bits[3];
        assert_eq!(u.get(y, x), c(1.0, 0.0));
    }
}

#[test]
fn swap_register_three_three_two_two_layout() {
    // a = 3, s = 3, b = 2, t = 2: SWAP(4,6), SWAP(5,7), SWAP(6,8) in 1-based labels.
    let circuit = swap_register(3, 3, 2, 2);
    assert_eq!(circuit.width(), 10);
    let mut pairs: Vec<Vec<usize>> = circuit.gates().iter().map(|g| g.targets()).collect();
    pairs.sort();
    assert_eq!(pairs, vec![vec![3, 5], vec![4, 6], vec![5, 7]]);
    assert!(
        evaluate(&circuit)
            .unwrap()
            .max_abs_diff(&product_swap_oracle(3, 3, 2, 2))
            == 0.0
    );
}

#[test]
fn swap_register_matches_product_formula() {
    for (a, s, b, t) in [
        (0, 2, 1, 1),
        (1, 1, 2, 2),
        (2, 3, 1, 0),
        (0, 1, 3, 2),
        (1, 2, 2, 1),
    ] {
        let got = evaluate(&swap_register(a, s, b, t)).unwrap();
        assert_eq!(got, product_swap_oracle(a, s, b, t), "{a} {s} {b} {t}");
    }
}

#[test]
fn kron_of_unitaries_needs_no_swaps() {
    let be = kron_encodings(
        &dilate(&sigma_x(), None).unwrap(),
        &dilate(&sigma_z(), None).unwrap(),
    )
    .unwrap();
    assert_eq!((be.alpha(), be.a(), be.s(), be.eps()), (1.0, 0, 2, 0.0));
    assert_eq!(be.unitary().to_circuit().unwrap().count(GateKind::Swap), 0);
    assert!(
        leading_block(&be)
            .unwrap()
            .max_abs_diff(&kron(&sigma_x(), &sigma_z()).unwrap())
            < 1e-15
    );
}

#[test]
fn kron_of_dilations_matches_dense_conjugation() {
    let be1 = dilate(&sigma_z().scale_real(0.5), None).unwrap();
    let be2 = dilate(&sigma_x().scale_real(1.0 / 3.0), None).unwrap();
    let be = kron_encodings(&be1, &be2).unwrap();
    assert!((be.alpha() - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!((be.a(), be.s()), (2, 2));
    let s = product_swap_oracle(1, 1, 1, 1);
    let inner = kron(
        &be1.unitary().to_dense().unwrap(),
        &be2.unitary().to_dense().unwrap(),
    )
    .unwrap();
    let dense = s.matmul(&inner).unwrap().matmul(&s.adjoint()).unwrap();
    assert!(
        evaluate(&be.unitary().to_circuit().unwrap())
            .unwrap()
            .max_abs_diff(&dense)
            < 1e-14
    );
    let expected = kron(&sigma_z(), &sigma_x()).unwrap();
    assert!(spectral_norm(&(&leading_block(&be).unwrap() - &expected)) < 1e-10);
}

#[test]
fn kron_error_formula() {
    let be1 = dilate(&sigma_x(), None).unwrap().with_eps(0.01).unwrap();
    let be2 = dilate(&sigma_z(), None).unwrap().with_eps(0.01).unwrap();
    assert!((kron_encodings(&be1, &be2).unwrap().eps() - 0.0201).abs() < 1e-15);
}

#[test]
fn kron_many_cases() {
    let single = dilate(&random_matrix(1, 1), None).unwrap();
    assert_eq!(kron_many(std::slice::from_ref(&single)).unwrap(), single);
    assert!(kron_many(&[]).is_err());

    let paulis: Vec<BlockEncoding> = [sigma_x(), sigma_z(), sigma_x()]
        .iter()
        .map(|m| dilate(m, None).unwrap())
        .collect();
    let be = kron_many(&paulis).unwrap();
    assert_eq!((be.alpha(), be.a(), be.eps()), (1.0, 0, 0.0));
    assert_eq!(be.unitary().to_circuit().unwrap().count(GateKind::Swap), 0);

    let mats: Vec<ComplexMatrix> = [0.5, 1.0 / 3.0, 0.25]
        .iter()
        .enumerate()
        .map(|(k, &norm)| {
            let m = random_matrix(1, 10 + k as u64);
            m.scale_real(norm / spectral_norm(&m))
        })
        .collect();
    let bes: Vec<BlockEncoding> = mats.iter().map(|m| dilate(m, None).unwrap()).collect();
    let be = kron_many(&bes).unwrap();
    assert!((be.alpha() - 1.0 / 24.0).abs() < 1e-15);
    assert_eq!((be.a(), be.s()), (3, 3));
    let expected = kron_all(&mats).unwrap();
    let got = leading_block(&be).unwrap().scale_real(be.alpha());
    assert!(spectral_norm(&(&got - &expected)) < 1e-10);
}

#[test]
fn kron_many_mixed_sizes_and_first_order_error() {
    let a = random_matrix(2, 1);
    let b = sigma_x();
    let m = random_matrix(1, 2);
    let bes = vec![
        dilate(&a, None).unwrap().with_eps(0.01).unwrap(),
        dilate(&b, None).unwrap().with_eps(0.02).unwrap(),
        dilate(&m, None).unwrap(),
    ];
    let be = kron_many(&bes).unwrap();
    assert_eq!((be.a(), be.s()), (2, 4));
    let (a1, a2, a3) = (bes[0].alpha(), bes[1].alpha(), bes[2].alpha());
    assert!((be.eps() - (0.01 * a2 * a3 + 0.02 * a1 * a3)).abs() < 1e-12);
    let expected = kron_all([&a, &b, &m]).unwrap();
    assert!(encoding_error(&be.clone().with_eps(0.0).unwrap(), &expected).unwrap() < 1e-10);
}

#[test]
fn state_prep_cases() {
    let pair = state_prep_pair(&[c(1.0, 0.0)], None).unwrap();
    assert_eq!((pair.beta(), pair.b()), (1.0, 1));
    assert_eq!(pair.p(), &ComplexMatrix::identity(2));
    assert_eq!(pair.q(), &ComplexMatrix::identity(2));

    let pair = state_prep_pair(&[c(1.0, 0.0); 4], None).unwrap();
    assert_eq!((pair.beta(), pair.b()), (4.0, 2));
    for j in 0..4 {
        assert!((pair.p().get(j, 0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((pair.q().get(j, 0) - c(0.5, 0.0)).norm() < 1e-15);
    }
    assert!(pair
        .effective_coefficients()
        .iter()
        .all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));

    let y = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)];
    let pair = state_prep_pair(&y, None).unwrap();
    assert_eq!((pair.beta(), pair.b()), (6.0, 2));
    let residual: f64 = (0..4)
        .map(|j| {
            let target = y.get(j).copied().unwrap_or_default();
            (pair.p().get(j, 0).conj() * pair.q().get(j, 0) * 6.0 - target).norm()
        })
        .sum();
    assert!(residual <= 1e-12);
    assert!(pair.eps() <= 1e-12);
    assert!(pair.p().unitarity_residual() < 1e-10 && pair.q().unitarity_residual() < 1e-10);
    // q carries no phases.
    assert!((0..3).all(|j| pair.q().get(j, 0).im.abs() < 1e-15 && pair.q().get(j, 0).re >= 0.0));
}

#[test]
fn state_prep_errors() {
    assert!(matches!(
        state_prep_pair(&[c(0.0, 0.0); 3], None).unwrap_err(),
        Error::ZeroOperator
    ));
    assert!(state_prep_pair(&[], None).is_err());
    assert!(state_prep_pair(&[c(1.0, 0.0); 5], Some(2)).is_err());
    assert_eq!(state_prep_pair(&[c(1.0, 0.0); 5], Some(4)).unwrap().b(), 4);
}

#[test]
fn select_oracle_cases() {
    let x = dilate(&sigma_x(), None).unwrap();
    let z = dilate(&sigma_z(), None).unwrap();
    let mut expected = ComplexMatrix::identity(4);
    expected.set_block(0, 0, &sigma_x());
    assert_eq!(
        evaluate(&select_oracle(std::slice::from_ref(&x), 1).unwrap()).unwrap(),
        expected
    );

    expected.set_block(2, 2, &sigma_z());
    assert_eq!(
        evaluate(&select_oracle(&[x.clone(), z.clone()], 1).unwrap()).unwrap(),
        expected
    );

    let mut r = rng(4);
    let us: Vec<ComplexMatrix> = (0..3).map(|_| random_unitary(4, &mut r)).collect();
    let bes: Vec<BlockEncoding> = us
        .iter()
        .map(|u| BlockEncoding::exact_unitary(u.clone()).unwrap())
        .collect();
    let got = evaluate(&select_oracle(&bes, 2).unwrap()).unwrap();
    let mut expected = ComplexMatrix::identity(16);
    for (j, u) in us.iter().enumerate() {
        expected.set_block(4 * j, 4 * j, u);
    }
    assert!(got.max_abs_diff(&expected) < 1e-12);
    assert!(
        got.submatrix(12, 12, 4, 4)
            .max_abs_diff(&ComplexMatrix::identity(4))
            == 0.0
    );
}

#[test]
fn select_oracle_errors() {
    let x = dilate(&sigma_x(), None).unwrap();
    let d = dilate(&sigma_x().scale_real(0.5), Some(1.0)).unwrap();
    assert!(matches!(
        select_oracle(&[x.clone(), d], 1).unwrap_err(),
        Error::NonUniform(_)
    ));
    assert!(select_oracle(&[x.clone(), x.clone(), x], 1).is_err());
}

#[test]
fn lcu_cases() {
    let x = dilate(&sigma_x(), None).unwrap();
    let z = dilate(&sigma_z(), None).unwrap();
    let pair = state_prep_pair(&[c(1.0, 0.0)], None).unwrap();
    let be = lcu(&pair, std::slice::from_ref(&x)).unwrap();
    assert!(leading_block(&be).unwrap().max_abs_diff(&sigma_x()) < 1e-14);

    let pair = state_prep_pair(&[c(1.0, 0.0), c(1.0, 0.0)], None).unwrap();
    let be = lcu(&pair, &[x.clone(), z.clone()]).unwrap();
    assert!((be.alpha() - 2.0).abs() < 1e-15);
    let sum = &sigma_x() + &sigma_z();
    assert!(
        leading_block(&be)
            .unwrap()
            .max_abs_diff(&sum.scale_real(0.5))
            < 1e-14
    );
    assert!(encoding_error(&be, &sum).unwrap() < 1e-12);

    let pair = state_prep_pair(&[c(1.0, 0.0), c(-1.0, 0.0)], None).unwrap();
    let be = lcu(&pair, &[x.clone(), x.clone()]).unwrap();
    assert!(spectral_norm(&leading_block(&be).unwrap()) < 1e-12);

    assert!(lcu(&pair, std::slice::from_ref(&x)).is_err());
}

/// `Σ_j conj(p_j) q_j Ã_j + Σ_{j≥m} conj(p_j) q_j I`.
fn lcu_block_oracle(pair: &StatePrepPair, blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let d = blocks[0].rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for j in 0..pair.p().rows() {
        let w = pair.p().get(j, 0).conj() * pair.q().get(j, 0);
        match blocks.get(j) {
            Some(b) => out.axpy(w, b).unwrap(),
            None => out.axpy(w, &ComplexMatrix::identity(d)).unwrap(),
        }
    }
    out
}

#[test]
fn lcu_leading_block_identity_with_perturbed_pair() {
    let mut r = rng(17);
    let y = [c(0.5, 0.2), c(-1.0, 0.0), c(0.3, -0.7)];
    let exact = state_prep_pair(&y, None).unwrap();
    let pair = StatePrepPair::from_unitaries(
        perturb(exact.p(), 0.05, 1),
        perturb(exact.q(), 0.05, 2),
        exact.beta(),
        &y,
    )
    .unwrap();
    assert!(pair.eps() > 1e-4);
    let bes: Vec<BlockEncoding> = (0..3)
        .map(|_| dilate(&gaussian_matrix(2, 2, &mut r), Some(4.0)).unwrap())
        .collect();
    let blocks: Vec<ComplexMatrix> = bes.iter().map(|b| leading_block(b).unwrap()).collect();
    let be = lcu(&pair, &bes).unwrap();
    let expected = lcu_block_oracle(&pair, &blocks);
    assert!(spectral_norm(&(&leading_block(&be).unwrap() - &expected)) < 1e-10);
}

fn pauli_spec(s: usize, h: f64) -> (CpLikeSpec, ComplexMatrix) {
    let id = Arc::new(ComplexMatrix::identity(2));
    let x = Arc::new(sigma_x());
    let z = Arc::new(sigma_z());
    let mut y = Vec::new();
    let mut terms = Vec::new();
    for i in 0..s - 1 {
        let mut t = vec![id.clone(); s];
        t[i] = z.clone();
        t[i + 1] = z.clone();
        terms.push(t);
        y.push(c(-1.0, 0.0));
    }
    for i in 0..s {
        let mut t = vec![id.clone(); s];
        t[i] = x.clone();
        terms.push(t);
        y.push(c(-h, 0.0));
    }
    let spec = CpLikeSpec::new(y, terms).unwrap();
    let dense = spec.dense().unwrap();
    (spec, dense)
}

#[test]
fn synthesize_single_unitary_term() {
    let spec = CpLikeSpec::new(vec![c(1.0, 0.0)], vec![vec![Arc::new(sigma_x())]]).unwrap();
    let be = synthesize_cp(&spec).unwrap();
    assert_eq!((be.alpha(), be.a(), be.s()), (1.0, 1, 1));
    assert!(be.eps() < 1e-12);
    assert!(encoding_error(&be, &sigma_x()).unwrap() < 1e-12);
}

#[test]
fn synthesize_two_spin_ising() {
    let (spec, _) = pauli_spec(2, 2.0);
    // Explicit 4x4 oracle: −Z⊗Z − 2(X⊗I + I⊗X).
    let zz = kron(&sigma_z(), &sigma_z()).unwrap();
    let xi = kron(&sigma_x(), &ComplexMatrix::identity(2)).unwrap();
    let ix = kron(&ComplexMatrix::identity(2), &sigma_x()).unwrap();
    let h = &(&zz.scale_real(-1.0) - &xi.scale_real(2.0)) - &ix.scale_real(2.0);
    let be = synthesize_cp(&spec).unwrap();
    assert!((be.alpha() - 5.0).abs() < 1e-15);
    assert!(spectral_norm(&(&leading_block(&be).unwrap().scale_real(be.alpha()) - &h)) < 1e-10);
}

#[test]
fn synthesize_laplace_like() {
    let id = Arc::new(ComplexMatrix::identity(2));
    let l = Arc::new(ComplexMatrix::diag_real(&[2.0, -1.0]));
    let terms = (0..3)
        .map(|j| {
            (0..3)
                .map(|k| if k == j { l.clone() } else { id.clone() })
                .collect()
        })
        .collect();
    let spec = CpLikeSpec::new(vec![c(1.0, 0.0); 3], terms).unwrap();
    let dense = &(&kron_all([&*l, &*id, &*id]).unwrap() + &kron_all([&*id, &*l, &*id]).unwrap())
        + &kron_all([&*id, &*id, &*l]).unwrap();
    let syn = synthesize_cp_detailed(&spec, &SynthesisOptions::default()).unwrap();
    assert!(!syn.shared_swaps);
    assert_eq!(syn.encoding.a(), 1 + 2);
    assert!((syn.encoding.alpha() - 6.0).abs() < 1e-12);
    assert!(encoding_error(&syn.encoding, &dense).unwrap() < 1e-10);
    assert!(
        syn.encoding
            .unitary()
            .to_circuit()
            .unwrap()
            .count(GateKind::ControlledSwap)
            > 0
    );
    // One dilation of L reused by every term.
    let factors = dilate_factors(&spec).unwrap();
    assert_eq!(factors[0][0], factors[1][1]);
}

#[test]
fn ising_synthesis_up_to_four_spins() {
    for s in 2..=4 {
        let (spec, dense) = pauli_spec(s, 2.0);
        let syn = synthesize_cp_detailed(&spec, &SynthesisOptions::default()).unwrap();
        assert!(syn.shared_swaps);
        assert!((syn.encoding.alpha() - (3 * s - 1) as f64).abs() < 1e-12);
        let m = 2 * s - 1;
        let b = (m as f64).log2().ceil() as usize;
        assert_eq!(syn.encoding.a(), b);
        assert!(encoding_error(&syn.encoding, &dense).unwrap() < 1e-10);
    }
}

fn uniform_dilated_spec(seed: u64) -> CpLikeSpec {
    let mut r = rng(seed);
    let mut term = || -> Vec<Arc<ComplexMatrix>> {
        (0..2)
            .map(|_| Arc::new(gaussian_matrix(2, 2, &mut r)))
            .collect()
    };
    let terms = vec![term(), term()];
    CpLikeSpec::new(vec![c(0.7, 0.1), c(-0.4, 0.0)], terms).unwrap()
}

#[test]
fn shared_swaps_match_per_term_swaps() {
    let spec = uniform_dilated_spec(3);
    let shared = shared_swap_select(&spec).unwrap();
    let generic = per_term_swap_select(&spec).unwrap();
    assert_eq!(shared.count(GateKind::ControlledSwap), 0);
    assert!(generic.count(GateKind::ControlledSwap) > 0);
    let diff = evaluate(&shared)
        .unwrap()
        .max_abs_diff(&evaluate(&generic).unwrap());
    assert!(diff < 1e-12, "{diff}");

    let (pauli, _) = pauli_spec(3, 1.0);
    let shared = shared_swap_select(&pauli).unwrap();
    assert_eq!(
        shared.count(GateKind::Swap) + shared.count(GateKind::ControlledSwap),
        0
    );
}

#[test]
fn shared_path_rejects_non_uniform_specs() {
    let spec = CpLikeSpec::new(
        vec![c(1.0, 0.0), c(1.0, 0.0)],
        vec![
            vec![
                Arc::new(sigma_x()),
                Arc::new(ComplexMatrix::diag_real(&[1.0, 0.5])),
            ],
            vec![
                Arc::new(ComplexMatrix::diag_real(&[1.0, 0.5])),
                Arc::new(sigma_x()),
            ],
        ],
    )
    .unwrap();
    assert!(matches!(
        shared_swap_select(&spec).unwrap_err(),
        Error::NonUniform(_)
    ));
    let forced = SynthesisOptions {
        swaps: SwapPlacement::Shared,
        ..Default::default()
    };
    assert!(synthesize_cp_detailed(&spec, &forced).is_err());
}

#[test]
fn both_swap_placements_give_the_same_encoding() {
    let spec = uniform_dilated_spec(8);
    let dense = spec.dense().unwrap();
    for swaps in [SwapPlacement::Shared, SwapPlacement::PerTerm] {
        let options = SynthesisOptions {
            swaps,
            ..Default::default()
        };
        let be = synthesize_cp_detailed(&spec, &options).unwrap().encoding;
        assert!(encoding_error(&be, &dense).unwrap() < 1e-10, "{swaps:?}");
    }
}

#[test]
fn synthesis_bound_with_injected_errors() {
    let spec = uniform_dilated_spec(21);
    let dense = spec.dense().unwrap();
    let factors: Vec<Vec<BlockEncoding>> = spec
        .terms()
        .iter()
        .enumerate()
        .map(|(j, t)| {
            t.iter()
                .enumerate()
                .map(|(i, f)| perturbed_encoding(f, 0.03, 100 + 10 * j as u64 + i as u64))
                .collect()
        })
        .collect();
    let cf = folded_coefficients(spec.coefficients(), &factors);
    let exact = state_prep_pair(&cf, None).unwrap();
    let pair = StatePrepPair::from_unitaries(
        perturb(exact.p(), 0.02, 5),
        perturb(exact.q(), 0.02, 6),
        exact.beta(),
        &cf,
    )
    .unwrap();
    let options = SynthesisOptions {
        pair: Some(pair),
        ..Default::default()
    };
    let syn = synthesize_encodings(spec.coefficients(), &factors, &options).unwrap();
    let measured = encoding_error(&syn.encoding, &dense).unwrap();
    assert!(measured > 1e-4);
    assert!(
        measured <= syn.encoding.eps() + 1e-9,
        "{measured} > {}",
        syn.encoding.eps()
    );
}

#[test]
fn spec_validation_names_the_term() {
    let err = CpLikeSpec::new(
        vec![c(1.0, 0.0), c(1.0, 0.0)],
        vec![
            vec![Arc::new(sigma_x()), Arc::new(sigma_x())],
            vec![Arc::new(sigma_x())],
        ],
    )
    .unwrap_err();
    assert!(matches!(err, Error::InvalidTerm { term: 1, .. }));
    assert!(err.to_string().contains("term 1"));

    let err = CpLikeSpec::new(
        vec![c(1.0, 0.0)],
        vec![vec![Arc::new(ComplexMatrix::identity(3))]],
    )
    .unwrap_err();
    assert!(matches!(err, Error::InvalidTerm { term: 0, .. }));
    assert!(CpLikeSpec::new(vec![], vec![]).is_err());
    assert!(CpLikeSpec::new(vec![c(1.0, 0.0)], vec![]).is_err());
}

#[test]
fn spec_json_round_trip() {
    let (spec, _) = pauli_spec(2, 0.5);
    let text = serde_json::to_string(&spec).unwrap();
    let back: CpLikeSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
    assert_eq!(back.signal_qubits(), 2);

    let bad = r#"{"y":[[1,0],[1,0]],"terms":[
        [{"dims":[2,2],"entries":[[1,0],[0,0],[0,0],[1,0]]}],
        [{"dims":[4,4],"entries":[[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}]]}"#;
    let err = serde_json::from_str::<CpLikeSpec>(bad).unwrap_err();
    assert!(err.to_string().contains("term 1"), "{err}");
}

#[test]
fn local_sum_matches_dense_spec() {
    let (spec, dense) = pauli_spec(4, 1.5);
    assert!(spec.local_sum().unwrap().to_dense().max_abs_diff(&dense) < 1e-14);
}

fn dilated_pair() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix, f64, f64)> {
    (1usize..3, 1usize..3, any::<u64>(), 1.0..2.0f64, 1.0..2.0f64).prop_map(
        |(q1, q2, seed, s1, s2)| {
            (
                random_matrix(q1, seed),
                random_matrix(q2, seed ^ 0xabc),
                s1,
                s2,
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn kron_leading_block_is_kron_of_blocks((m1, m2, s1, s2) in dilated_pair()) {
        let be1 = dilate(&m1, Some(spectral_norm(&m1) * s1)).unwrap();
        let be2 = dilate(&m2, Some(spectral_norm(&m2) * s2)).unwrap();
        let be = kron_encodings(&be1, &be2).unwrap();
        let expected = kron(&leading_block(&be1).unwrap(), &leading_block(&be2).unwrap()).unwrap();
        prop_assert!(spectral_norm(&(&leading_block(&be).unwrap() - &expected)) <= 1e-10);
    }

    #[test]
    fn kron_error_bound_holds((m1, m2, _, _) in dilated_pair(), d1 in 0.0..0.05f64, d2 in 0.0..0.05f64, seed in any::<u64>()) {
        let be1 = perturbed_encoding(&m1, d1, seed);
        let be2 = perturbed_encoding(&m2, d2, seed ^ 7);
        let be = kron_encodings(&be1, &be2).unwrap();
        let measured = encoding_error(&be, &kron(&m1, &m2).unwrap()).unwrap();
        prop_assert!(measured <= be.eps() + 1e-9);
    }

    #[test]
    fn lcu_error_bound_holds(m in 1usize..6, seed in any::<u64>(), delta in 0.0..0.05f64) {
        let mut r = rng(seed);
        let y: Vec<C64> = (0..m).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
        let targets: Vec<ComplexMatrix> = (0..m).map(|k| random_matrix(1, seed.wrapping_add(k as u64))).collect();
        let alpha = targets.iter().map(spectral_norm).fold(0.0, f64::max) * 1.5;
        let bes: Vec<BlockEncoding> = targets.iter().enumerate().map(|(k, t)| {
            let e = gaussian_matrix(2, 2, &mut rng(seed ^ (k as u64 + 1)));
            let nearby = t + &e.scale_real(delta / spectral_norm(&e));
            let be = dilate(&nearby, Some(alpha)).unwrap();
            let eps = encoding_error(&be, t).unwrap();
            be.with_eps(eps).unwrap()
        }).collect();
        let max_eps = bes.iter().map(|b| b.eps()).fold(0.0, f64::max);
        let bes: Vec<BlockEncoding> = bes.into_iter().map(|b| b.with_eps(max_eps).unwrap()).collect();
        let exact = state_prep_pair(&y, None).unwrap();
        let pair = StatePrepPair::from_unitaries(
            perturb(exact.p(), delta, seed ^ 11),
            perturb(exact.q(), delta, seed ^ 12),
            exact.beta(),
            &y,
        ).unwrap();
        let be = lcu(&pair, &bes).unwrap();
        let mut target = ComplexMatrix::zeros(2, 2);
        for (yj, t) in y.iter().zip(&targets) {
            target.axpy(*yj, t).unwrap();
        }
        let measured = encoding_error(&be, &target).unwrap();
        prop_assert!(measured <= alpha * pair.eps() + pair.beta() * max_eps + 1e-9);
        let blocks: Vec<ComplexMatrix> = bes.iter().map(|b| leading_block(b).unwrap()).collect();
        let identity = lcu_block_oracle(&pair, &blocks);
        prop_assert!(spectral_norm(&(&leading_block(&be).unwrap() - &identity)) <= 1e-10);
    }

    #[test]
    fn ancilla_count_is_max_plus_log_terms(seed in any::<u64>(), m in 1usize..6) {
        let mut r = rng(seed);
        let terms: Vec<Vec<Arc<ComplexMatrix>>> = (0..m).map(|_| {
            if r.random::<bool>() {
                vec![Arc::new(gaussian_matrix(2, 2, &mut r)), Arc::new(sigma_x())]
            } else {
                vec![Arc::new(gaussian_matrix(4, 4, &mut r))]
            }
        }).collect();
        let spec = CpLikeSpec::new(vec![C64::new(1.0, 0.0); m], terms).unwrap();
        let be = synthesize_cp(&spec).unwrap();
        let b = (m.max(2) as f64).log2().ceil() as usize;
        prop_assert_eq!(be.a(), 1 + b);
        prop_assert!(encoding_error(&be, &spec.dense().unwrap()).unwrap() <= be.eps() + 1e-9);
    }
}
