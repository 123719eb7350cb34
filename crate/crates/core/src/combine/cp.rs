use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kron::{gather_ancillas, kron_many, raw_tensor};
use super::lcu::{check_uniform, select_oracle, state_prep_pair, wrap_select, StatePrepPair};
use crate::circuit::{Circuit, Control};
use crate::encoding::{dilate, pad_ancillas, BlockEncoding, Unitary};
use crate::numerics::{
    complex_vec_from_json, complex_vec_to_json, kron_all, ComplexMatrix, LocalSum,
};
use crate::{Error, Result, C64};

/// `B = Σ_j y_j A_1^(j) ⊗ A_2^(j) ⊗ …` with every term acting on the same
/// number of qubits. Factors are shared through `Arc` so a repeated matrix is
/// dilated once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct CpLikeSpec {
    y: Vec<C64>,
    terms: Vec<Vec<Arc<ComplexMatrix>>>,
    signal_qubits: usize,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    y: Vec<[f64; 2]>,
    terms: Vec<Vec<ComplexMatrix>>,
}

impl TryFrom<SpecJson> for CpLikeSpec {
    type Error = Error;

    fn try_from(j: SpecJson) -> Result<Self> {
        let terms = j
            .terms
            .into_iter()
            .map(|t| t.into_iter().map(Arc::new).collect())
            .collect();
        CpLikeSpec::new(complex_vec_from_json(&j.y), terms)
    }
}

impl From<CpLikeSpec> for SpecJson {
    fn from(s: CpLikeSpec) -> Self {
        SpecJson {
            y: complex_vec_to_json(&s.y),
            terms: s
                .terms
                .iter()
                .map(|t| t.iter().map(|f| (**f).clone()).collect())
                .collect(),
        }
    }
}

impl CpLikeSpec {
    pub fn new(y: Vec<C64>, terms: Vec<Vec<Arc<ComplexMatrix>>>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Empty("coefficient vector"));
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("coefficient vector"));
        }
        if y.len() != terms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} terms",
                y.len(),
                terms.len()
            )));
        }
        let mut signal_qubits = None;
        for (j, term) in terms.iter().enumerate() {
            if term.is_empty() {
                return Err(Error::InvalidTerm {
                    term: j,
                    reason: "no factors".into(),
                });
            }
            let mut qubits = 0;
            for (i, f) in term.iter().enumerate() {
                if !f.is_square() {
                    return Err(Error::InvalidTerm {
                        term: j,
                        reason: format!("factor {i} is {}x{}", f.rows(), f.cols()),
                    });
                }
                qubits += f.qubits().map_err(|_| Error::InvalidTerm {
                    term: j,
                    reason: format!("factor {i} has dimension {}, not a power of two", f.rows()),
                })?;
            }
            match signal_qubits {
                None => signal_qubits = Some(qubits),
                Some(s) if s != qubits => {
                    return Err(Error::InvalidTerm {
                        term: j,
                        reason: format!("acts on {qubits} qubits, term 0 acts on {s}"),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(Self {
            y,
            terms,
            signal_qubits: signal_qubits.unwrap_or(0),
        })
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.y
    }

    pub fn terms(&self) -> &[Vec<Arc<ComplexMatrix>>] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.y.len()
    }

    pub fn signal_qubits(&self) -> usize {
        self.signal_qubits
    }

    /// Qubit counts of the factors of term `j`.
    pub fn factor_sizes(&self, j: usize) -> Vec<usize> {
        self.terms[j]
            .iter()
            .map(|f| f.qubits().expect("validated on construction"))
            .collect()
    }

    /// Dense `Σ_j y_j ⊗_i A_i^(j)`.
    pub fn dense(&self) -> Result<ComplexMatrix> {
        let d = 1usize << self.signal_qubits;
        let mut out = ComplexMatrix::zeros(d, d);
        for (y, term) in self.y.iter().zip(&self.terms) {
            out.axpy(*y, &kron_all(term.iter().map(|f| f.as_ref()))?)?;
        }
        Ok(out)
    }

    /// The same operator as a matrix-free sum.
    pub fn local_sum(&self) -> Result<LocalSum> {
        let mut op = LocalSum::new(self.signal_qubits);
        for (y, term) in self.y.iter().zip(&self.terms) {
            let factors: Vec<ComplexMatrix> = term.iter().map(|f| (**f).clone()).collect();
            op.add_kron_chain(*y, &factors)?;
        }
        Ok(op)
    }
}

/// How the per-term swap networks are placed in the select oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SwapPlacement {
    /// Shared when every term has the same factor layout, per term otherwise.
    #[default]
    Auto,
    /// One uncontrolled swap network around the whole select oracle.
    Shared,
    /// Each term's swap network inside its controlled branch.
    PerTerm,
}

#[derive(Clone, Debug, Default)]
pub struct SynthesisOptions {
    pub swaps: SwapPlacement,
    /// Replaces the canonical pair for the folded coefficients.
    pub pair: Option<StatePrepPair>,
    /// Forces the number of linear-combination ancillas.
    pub b: Option<usize>,
}

/// Result of a CP-like synthesis together with its intermediate pieces.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub encoding: BlockEncoding,
    pub pair: StatePrepPair,
    /// `c_j = y_j·α^(j)`, the coefficients the pair encodes.
    pub folded_coefficients: Vec<C64>,
    /// `α^(j) = ∏_i α_i^(j)` per term.
    pub term_alphas: Vec<f64>,
    /// Whether one shared swap network was used.
    pub shared_swaps: bool,
}

/// Dilates every factor of `spec`; factors shared by `Arc` are dilated once.
pub fn dilate_factors(spec: &CpLikeSpec) -> Result<Vec<Vec<BlockEncoding>>> {
    let mut cache: HashMap<*const ComplexMatrix, BlockEncoding> = HashMap::new();
    spec.terms
        .iter()
        .map(|term| {
            term.iter()
                .map(|f| {
                    let key = Arc::as_ptr(f);
                    if let Some(be) = cache.get(&key) {
                        return Ok(be.clone());
                    }
                    let be = dilate(f, None)?;
                    cache.insert(key, be.clone());
                    Ok(be)
                })
                .collect()
        })
        .collect()
}

/// True when all terms have the same factor sizes and ancilla counts
/// position by position.
pub fn is_uniform(factors: &[Vec<BlockEncoding>]) -> bool {
    let layout = |t: &Vec<BlockEncoding>| -> Vec<(usize, usize)> {
        t.iter().map(|b| (b.a(), b.s())).collect()
    };
    match factors.first() {
        None => false,
        Some(first) => {
            let l0 = layout(first);
            factors.iter().all(|t| layout(t) == l0)
        }
    }
}

/// `c_j = y_j·∏_i α_i^(j)`.
pub fn folded_coefficients(y: &[C64], factors: &[Vec<BlockEncoding>]) -> Vec<C64> {
    y.iter()
        .zip(factors)
        .map(|(y, t)| y * t.iter().map(|b| b.alpha()).product::<f64>())
        .collect()
}

/// Synthesizes `Σ_j y_j ⊗_i A_i^(j)` from given factor encodings.
///
/// Each term is combined with [`kron_many`] and reinterpreted as an encoding
/// of `A^(j)/α^(j)` with subnormalization 1 and error `ε^(j)/α^(j)`; the
/// subnormalizations move into the coefficients `c_j = y_j α^(j)`. The result
/// has `α = Σ_j |y_j| α^(j)` and `a = max_j a^(j) + b`.
pub fn synthesize_encodings(
    y: &[C64],
    factors: &[Vec<BlockEncoding>],
    options: &SynthesisOptions,
) -> Result<Synthesis> {
    if y.is_empty() {
        return Err(Error::Empty("coefficient vector"));
    }
    if y.len() != factors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} terms",
            y.len(),
            factors.len()
        )));
    }
    let c = folded_coefficients(y, factors);
    let pair = match &options.pair {
        Some(p) => p.clone(),
        None => state_prep_pair(&c, options.b)?,
    };
    if pair.terms() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "pair built for {} coefficients, spec has {}",
            pair.terms(),
            y.len()
        )));
    }

    let terms = factors
        .iter()
        .map(|t| kron_many(t))
        .collect::<Result<Vec<_>>>()?;
    let s = terms[0].s();
    if let Some((j, t)) = terms.iter().enumerate().find(|(_, t)| t.s() != s) {
        return Err(Error::InvalidTerm {
            term: j,
            reason: format!("acts on {} qubits, term 0 acts on {s}", t.s()),
        });
    }
    let term_alphas: Vec<f64> = terms.iter().map(|t| t.alpha()).collect();
    let a = terms.iter().map(|t| t.a()).max().unwrap_or(0);
    // Per-term encodings normalized to subnormalization 1.
    let normalized = terms
        .iter()
        .map(|t| {
            let padded = pad_ancillas(t, a)?;
            padded.with_parameters(1.0, t.eps() / t.alpha())
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, max_eps) = check_uniform(&normalized)?;

    let uniform = is_uniform(factors);
    let shared = match options.swaps {
        SwapPlacement::Auto => uniform,
        SwapPlacement::Shared if !uniform => {
            return Err(Error::NonUniform(
                "shared swap network needs identical factor layouts".into(),
            ))
        }
        SwapPlacement::Shared => true,
        SwapPlacement::PerTerm => false,
    };
    let select = if shared {
        shared_select_circuit(factors, pair.b())?
    } else {
        select_oracle(&normalized, pair.b())?
    };
    let encoding = BlockEncoding::new(
        Unitary::Circuit(wrap_select(&pair, &select)?),
        pair.beta(),
        a + pair.b(),
        s,
        pair.eps() + pair.beta() * max_eps,
    )?;
    Ok(Synthesis {
        encoding,
        pair,
        folded_coefficients: c,
        term_alphas,
        shared_swaps: shared,
    })
}

/// `(I_b ⊗ S)·W̃·(I_b ⊗ S†)` where `W̃` selects the unswapped products
/// `U_1^(j) ⊗ U_2^(j) ⊗ …`.
fn shared_select_circuit(factors: &[Vec<BlockEncoding>], b: usize) -> Result<Circuit> {
    if !is_uniform(factors) {
        return Err(Error::NonUniform(
            "shared swap network needs identical factor layouts".into(),
        ));
    }
    let layout: Vec<(usize, usize)> = factors[0].iter().map(|f| (f.a(), f.s())).collect();
    let swaps = gather_ancillas(&layout);
    let n = swaps.width();
    if b >= usize::BITS as usize || (1usize << b) < factors.len() {
        return Err(Error::InvalidParameter(format!(
            "{b} control qubits cannot select {} branches",
            factors.len()
        )));
    }
    let mut c = Circuit::new(b + n);
    c.append_shifted(&swaps.inverse(), b)?;
    for (j, term) in factors.iter().enumerate() {
        let controls = Control::pattern(0..b, b, j);
        c.append_controlled(&raw_tensor(term)?, b, &controls)?;
    }
    c.append_shifted(&swaps, b)?;
    Ok(c)
}

/// Select oracle for a spec with one uncontrolled swap network shared by all
/// terms, so no controlled SWAP appears.
pub fn shared_swap_select(spec: &CpLikeSpec) -> Result<Circuit> {
    let factors = dilate_factors(spec)?;
    let b = super::lcu::state_prep_pair(&folded_coefficients(&spec.y, &factors), None)?.b();
    shared_select_circuit(&factors, b)
}

/// The select oracle of the generic path, with every term's swap network
/// inside its controlled branch.
pub fn per_term_swap_select(spec: &CpLikeSpec) -> Result<Circuit> {
    let factors = dilate_factors(spec)?;
    let terms = factors
        .iter()
        .map(|t| kron_many(t))
        .collect::<Result<Vec<_>>>()?;
    let a = terms.iter().map(|t| t.a()).max().unwrap_or(0);
    let padded = terms
        .iter()
        .map(|t| pad_ancillas(t, a))
        .collect::<Result<Vec<_>>>()?;
    let b = super::lcu::state_prep_pair(&folded_coefficients(&spec.y, &factors), None)?.b();
    select_oracle(&padded, b)
}

/// Full synthesis of a CP-like spec from dilations of its factors.
pub fn synthesize_cp_detailed(spec: &CpLikeSpec, options: &SynthesisOptions) -> Result<Synthesis> {
    let factors = dilate_factors(spec)?;
    synthesize_encodings(&spec.y, &factors, options)
}

/// Block-encoding of a CP-like spec.
pub fn synthesize_cp(spec: &CpLikeSpec) -> Result<BlockEncoding> {
    Ok(synthesize_cp_detailed(spec, &SynthesisOptions::default())?.encoding)
}
