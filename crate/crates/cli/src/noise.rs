//! Coherent gate noise on the transverse-field Ising encoding.
//!
//! Every term of the TFIM is a Kronecker product of Pauli gates, each its own
//! exact `(1, 0, 0)` encoding, so the leading block of the synthesized circuit
//! is `Σ_j conj(p_j) q_j ⊗_k ũ_k^(j)` with `p`, `q` the first columns of the
//! (possibly perturbed) state-preparation pair. That sum is kept as a
//! matrix-free [`LocalSum`], which lets the experiment reach ten spins without
//! forming the `2^(b+s)` unitary.

use std::io;
use std::str::FromStr;

use pltcp::combine::{state_prep_pair, CpLikeSpec, StatePrepPair};
use pltcp::encoding::{Application, UNITARY_TOLERANCE};
use pltcp::models::tfim_spec;
use pltcp::numerics::{
    derive_seed, gaussian_matrix, haar_state, hermitian_eigen, normal_eigenvalues, operator_norm,
    spectral_function, ComplexMatrix, LocalSum,
};
use pltcp::{Error, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{fmt_float, write_csv, CliError, CliResult};

/// Haar-random signal states averaged per trial for the repetition count.
pub const HAAR_STATES: usize = 100;

pub const MAX_SITES: usize = 10;

/// Rotation angle `η'` for which `‖e^{iη'K}u − u‖₂ = η` when `‖K‖₂ = 1`.
pub fn perturbation_angle(eta: f64) -> f64 {
    2.0 * (eta / 2.0).asin()
}

/// `exp(iη'K)·u` with `K` a seeded random Hermitian matrix scaled to spectral
/// norm 1 and `η'` chosen so the result lies at spectral distance `eta` from
/// `u`.
pub fn perturb_unitary(u: &ComplexMatrix, eta: f64, seed: u64) -> pltcp::Result<ComplexMatrix> {
    if !(0.0..2.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "perturbation size must lie in [0, 2), got {eta}"
        )));
    }
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            u.rows(),
            u.cols()
        )));
    }
    let residual = u.unitarity_residual();
    if residual > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary { residual });
    }
    if eta == 0.0 {
        return Ok(u.clone());
    }
    let n = u.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = gaussian_matrix(n, n, &mut rng);
        let k = ComplexMatrix::from_fn(n, n, |i, j| (g.get(i, j) + g.get(j, i).conj()) * 0.5);
        let (values, vectors) = hermitian_eigen(&k)?;
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        let angle = perturbation_angle(eta);
        let rotation = spectral_function(&values, &vectors, |l| {
            C64::from_polar(1.0, angle * l / scale)
        });
        return rotation.matmul(u);
    }
}

/// `‖⊗_k u_k − ⊗_k ũ_k‖₂` for unitary factors.
///
/// With `W_k = u_k†ũ_k` the difference has the norm of `I − ⊗_k W_k`, a normal
/// matrix whose eigenvalues are products of the eigenvalues of the `W_k`.
pub fn kron_distance(
    original: &[ComplexMatrix],
    perturbed: &[ComplexMatrix],
) -> pltcp::Result<f64> {
    if original.len() != perturbed.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors against {}",
            original.len(),
            perturbed.len()
        )));
    }
    let mut spectrum = vec![C64::new(1.0, 0.0)];
    for (u, v) in original.iter().zip(perturbed) {
        if u == v {
            continue;
        }
        let eigenvalues = normal_eigenvalues(&u.adjoint().matmul(v)?)?;
        spectrum = spectrum
            .iter()
            .flat_map(|a| eigenvalues.iter().map(move |b| a * b))
            .collect();
    }
    Ok(spectrum
        .iter()
        .map(|l| (C64::new(1.0, 0.0) - l).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Pauli,
    Prep,
    Both,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [Self::Pauli, Self::Prep, Self::Both];

    pub fn label(self) -> &'static str {
        match self {
            Self::Pauli => "pauli",
            Self::Prep => "prep",
            Self::Both => "both",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "pauli" => Ok(Self::Pauli),
            "prep" => Ok(Self::Prep),
            "both" => Ok(Self::Both),
            other => Err(CliError::Invalid(format!(
                "unknown scenario {other:?}, expected pauli, prep or both"
            ))),
        }
    }
}

/// Which gates are perturbed, by how much, and how often.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseScenario {
    pub perturb_paulis: bool,
    pub perturb_state_prep: bool,
    /// Spectral distance of every perturbed gate from its ideal version.
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl NoiseScenario {
    pub fn new(kind: ScenarioKind, eta: f64, trials: usize, seed: u64) -> CliResult<Self> {
        if !(0.0..2.0).contains(&eta) {
            return Err(CliError::Invalid(format!(
                "eta must lie in [0, 2), got {eta}"
            )));
        }
        if trials == 0 {
            return Err(CliError::Invalid("at least one trial is needed".into()));
        }
        Ok(Self {
            perturb_paulis: kind != ScenarioKind::Prep,
            perturb_state_prep: kind != ScenarioKind::Pauli,
            eta,
            trials,
            seed,
        })
    }

    pub fn label(&self) -> &'static str {
        match (self.perturb_paulis, self.perturb_state_prep) {
            (true, false) => "pauli",
            (false, true) => "prep",
            (true, true) => "both",
            (false, false) => "none",
        }
    }
}

/// One noisy instance: perturbed gates per term, the pair actually used and
/// the measured per-term errors.
#[derive(Clone, Debug)]
pub struct NoisyTfim {
    pub factors: Vec<Vec<ComplexMatrix>>,
    pub pair: StatePrepPair,
    pub term_errors: Vec<f64>,
}

/// Draws the perturbed gates of one trial. Identity factors are not gates and
/// stay exact; every other factor occurrence gets its own perturbation.
pub fn noisy_tfim(
    spec: &CpLikeSpec,
    scenario: &NoiseScenario,
    trial_seed: u64,
) -> pltcp::Result<NoisyTfim> {
    let y = spec.coefficients();
    let canonical = state_prep_pair(y, None)?;
    let mut factors = Vec::with_capacity(spec.num_terms());
    let mut term_errors = Vec::with_capacity(spec.num_terms());
    for (j, term) in spec.terms().iter().enumerate() {
        let original: Vec<ComplexMatrix> = term.iter().map(|f| (**f).clone()).collect();
        let mut perturbed = Vec::with_capacity(original.len());
        for (k, f) in original.iter().enumerate() {
            let residual = f.unitarity_residual();
            if residual > UNITARY_TOLERANCE {
                return Err(Error::InvalidTerm {
                    term: j,
                    reason: format!("factor {k} is not unitary (residual {residual:.3e})"),
                });
            }
            if scenario.perturb_paulis && !f.is_identity() {
                let seed = derive_seed(trial_seed, &[0, j as u64, k as u64]);
                perturbed.push(perturb_unitary(f, scenario.eta, seed)?);
            } else {
                perturbed.push(f.clone());
            }
        }
        term_errors.push(kron_distance(&original, &perturbed)?);
        factors.push(perturbed);
    }
    let pair = if scenario.perturb_state_prep {
        let p = perturb_unitary(canonical.p(), scenario.eta, derive_seed(trial_seed, &[1]))?;
        let q = perturb_unitary(canonical.q(), scenario.eta, derive_seed(trial_seed, &[2]))?;
        StatePrepPair::from_unitaries(p, q, canonical.beta(), y)?
    } else {
        canonical
    };
    Ok(NoisyTfim {
        factors,
        pair,
        term_errors,
    })
}

impl NoisyTfim {
    /// The leading block `Ã`; unused select branches act as the identity.
    pub fn leading_block(&self, qubits: usize) -> pltcp::Result<LocalSum> {
        let weights = self.pair.effective_coefficients();
        let beta = self.pair.beta();
        let mut op = LocalSum::new(qubits);
        for (j, w) in weights.iter().enumerate() {
            match self.factors.get(j) {
                Some(term) => op.add_kron_chain(w / beta, term)?,
                None => op.add_identity(w / beta),
            }
        }
        Ok(op)
    }

    /// `H − αβ·Ã` with `α = 1` for unitary factors.
    pub fn error_operator(&self, spec: &CpLikeSpec) -> pltcp::Result<LocalSum> {
        let mut op = spec.local_sum()?;
        for (j, w) in self.pair.effective_coefficients().iter().enumerate() {
            match self.factors.get(j) {
                Some(term) => op.add_kron_chain(-w, term)?,
                None => op.add_identity(-w),
            }
        }
        Ok(op)
    }

    /// Absolute error bound `α·ε_prep + β·max_j ε_j` with `α = 1`.
    pub fn bound(&self) -> f64 {
        let worst = self.term_errors.iter().cloned().fold(0.0, f64::max);
        self.pair.eps() + self.pair.beta() * worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub s: usize,
    pub scenario: String,
    pub eta: f64,
    pub trial: usize,
    /// `‖H − αβÃ‖₂ / ‖H‖₂`
    pub relative_error: f64,
    /// The error bound divided by `‖H‖₂`.
    pub theoretical_bound: f64,
    /// Mean of `1/‖Ã|ψ⟩‖` over Haar-random `|ψ⟩`.
    pub expected_repetitions: f64,
    /// Mean of `1/‖Ã|ψ⟩‖²` over the same states.
    pub expected_trials: f64,
    pub eps_prep: f64,
    pub eps_terms: f64,
}

pub const TRIAL_CSV_HEADER: [&str; 10] = [
    "s",
    "scenario",
    "eta",
    "trial",
    "relative_error",
    "theoretical_bound",
    "expected_repetitions",
    "expected_trials",
    "eps_prep",
    "eps_terms",
];

impl TrialRecord {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.s.to_string(),
            self.scenario.clone(),
            fmt_float(self.eta),
            self.trial.to_string(),
            fmt_float(self.relative_error),
            fmt_float(self.theoretical_bound),
            fmt_float(self.expected_repetitions),
            fmt_float(self.expected_trials),
            fmt_float(self.eps_prep),
            fmt_float(self.eps_terms),
        ]
    }
}

/// Noisy TFIM encodings for `s_min ..= s_max` spins, `scenario.trials` each.
///
/// Records come out ordered by `(s, trial)`.
pub fn run_tfim_noise(
    s_min: usize,
    s_max: usize,
    h: f64,
    scenario: &NoiseScenario,
) -> CliResult<Vec<TrialRecord>> {
    if !(2 <= s_min && s_min <= s_max && s_max <= MAX_SITES) {
        return Err(CliError::Invalid(format!(
            "need 2 <= s_min <= s_max <= {MAX_SITES}, got {s_min}..{s_max}"
        )));
    }
    let mut records = Vec::with_capacity((s_max - s_min + 1) * scenario.trials);
    for s in s_min..=s_max {
        let spec = tfim_spec(s, h)?;
        let h_norm = operator_norm(&spec.local_sum()?);
        for trial in 0..scenario.trials {
            let trial_seed = derive_seed(scenario.seed, &[s as u64, trial as u64]);
            let noisy = noisy_tfim(&spec, scenario, trial_seed)?;
            let error = operator_norm(&noisy.error_operator(&spec)?);
            let block = noisy.leading_block(s)?;
            let (mut repetitions, mut trials) = (0.0, 0.0);
            for k in 0..HAAR_STATES {
                let psi = haar_state(1 << s, derive_seed(trial_seed, &[3, k as u64]));
                let app = Application::from_operator(&block, &psi)?;
                repetitions += app.expected_repetitions;
                trials += app.expected_trials();
            }
            records.push(TrialRecord {
                s,
                scenario: scenario.label().to_string(),
                eta: scenario.eta,
                trial,
                relative_error: error / h_norm,
                theoretical_bound: noisy.bound() / h_norm,
                expected_repetitions: repetitions / HAAR_STATES as f64,
                expected_trials: trials / HAAR_STATES as f64,
                eps_prep: noisy.pair.eps(),
                eps_terms: noisy.term_errors.iter().cloned().fold(0.0, f64::max),
            });
        }
    }
    Ok(records)
}

/// Means of `1/‖Ã|k⟩‖` and `1/‖Ã|k⟩‖²` over the computational basis states
/// `|k⟩`, for the noise-free encoding of TFIM with `s` spins.
pub fn basis_repetitions(s: usize, h: f64) -> CliResult<(f64, f64)> {
    if !(2..=MAX_SITES).contains(&s) {
        return Err(CliError::Invalid(format!(
            "need 2 <= s <= {MAX_SITES}, got {s}"
        )));
    }
    let spec = tfim_spec(s, h)?;
    let exact = NoiseScenario::new(ScenarioKind::Pauli, 0.0, 1, 0)?;
    let block = noisy_tfim(&spec, &exact, 0)?.leading_block(s)?;
    let dim = 1usize << s;
    let (mut repetitions, mut trials) = (0.0, 0.0);
    let mut e = vec![C64::new(0.0, 0.0); dim];
    for k in 0..dim {
        e[k] = C64::new(1.0, 0.0);
        let app = Application::from_operator(&block, &e)?;
        repetitions += app.expected_repetitions;
        trials += app.expected_trials();
        e[k] = C64::new(0.0, 0.0);
    }
    Ok((repetitions / dim as f64, trials / dim as f64))
}

pub fn write_trials<W: io::Write>(out: W, records: &[TrialRecord]) -> CliResult<()> {
    write_csv(
        out,
        &TRIAL_CSV_HEADER,
        records.iter().map(TrialRecord::csv_record),
    )
}

/// Per-`(s, scenario)` statistics of a batch of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSummary {
    pub s: usize,
    pub scenario: String,
    pub trials: usize,
    pub median_error: f64,
    pub median_bound: f64,
    /// Largest `relative_error / theoretical_bound`.
    pub worst_ratio: f64,
    pub mean_repetitions: f64,
    pub mean_trials: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => values[n / 2],
        _ => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}

/// Groups records by `(s, scenario)` in first-seen order.
pub fn summarize(records: &[TrialRecord]) -> Vec<NoiseSummary> {
    let mut keys: Vec<(usize, &str)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.s, r.scenario.as_str())) {
            keys.push((r.s, r.scenario.as_str()));
        }
    }
    keys.into_iter()
        .map(|(s, scenario)| {
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.s == s && r.scenario == scenario)
                .collect();
            let n = group.len() as f64;
            let mut errors: Vec<f64> = group.iter().map(|r| r.relative_error).collect();
            let mut bounds: Vec<f64> = group.iter().map(|r| r.theoretical_bound).collect();
            NoiseSummary {
                s,
                scenario: scenario.to_string(),
                trials: group.len(),
                median_error: median(&mut errors),
                median_bound: median(&mut bounds),
                worst_ratio: group
                    .iter()
                    .map(|r| match (r.relative_error, r.theoretical_bound) {
                        (_, b) if b > 0.0 => r.relative_error / b,
                        (e, _) if e > 0.0 => f64::INFINITY,
                        _ => 0.0,
                    })
                    .fold(0.0, f64::max),
                mean_repetitions: group.iter().map(|r| r.expected_repetitions).sum::<f64>() / n,
                mean_trials: group.iter().map(|r| r.expected_trials).sum::<f64>() / n,
            }
        })
        .collect()
}
