//! Block-encodings: a unitary `U` on `a + s` qubits whose top-left `2^s` block
//! `Ã` satisfies `‖A − α·Ã‖₂ ≤ ε` for the encoded operator `A`.

use serde::{Deserialize, Serialize};

use crate::circuit::{self, Circuit, Gate};
use crate::numerics::{
    kron, spectral_norm, svd, vec_norm, ComplexMatrix, LinearOperator, PSD_TOLERANCE,
};
use crate::{Error, Result, C64};

/// Unitarity tolerance checked when a dense encoding is constructed.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// The unitary of an encoding, stored densely or as a gate list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Unitary {
    Dense(ComplexMatrix),
    Circuit(Circuit),
}

impl Unitary {
    pub fn qubits(&self) -> Result<usize> {
        match self {
            Unitary::Dense(m) => m.qubits(),
            Unitary::Circuit(c) => Ok(c.width()),
        }
    }

    /// Gate-list form; a dense unitary becomes one gate on every qubit.
    pub fn to_circuit(&self) -> Result<Circuit> {
        match self {
            Unitary::Circuit(c) => Ok(c.clone()),
            Unitary::Dense(m) => {
                let n = m.qubits()?;
                let mut c = Circuit::new(n);
                if n > 0 && !m.is_identity() {
                    c.push(Gate::unitary((0..n).collect(), m.clone()))?;
                }
                Ok(c)
            }
        }
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        match self {
            Unitary::Dense(m) => Ok(m.clone()),
            Unitary::Circuit(c) => circuit::evaluate(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EncodingJson", into = "EncodingJson")]
pub struct BlockEncoding {
    unitary: Unitary,
    alpha: f64,
    a: usize,
    s: usize,
    eps: f64,
}

#[derive(Serialize, Deserialize)]
struct EncodingJson {
    alpha: f64,
    a: usize,
    s: usize,
    eps: f64,
    unitary: Unitary,
}

impl TryFrom<EncodingJson> for BlockEncoding {
    type Error = Error;

    fn try_from(j: EncodingJson) -> Result<Self> {
        BlockEncoding::new(j.unitary, j.alpha, j.a, j.s, j.eps)
    }
}

impl From<BlockEncoding> for EncodingJson {
    fn from(be: BlockEncoding) -> Self {
        EncodingJson {
            alpha: be.alpha,
            a: be.a,
            s: be.s,
            eps: be.eps,
            unitary: be.unitary,
        }
    }
}

impl BlockEncoding {
    pub fn new(unitary: Unitary, alpha: f64, a: usize, s: usize, eps: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "subnormalization must be positive, got {alpha}"
            )));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "error bound must be non-negative, got {eps}"
            )));
        }
        let n = unitary.qubits()?;
        if n != a + s {
            return Err(Error::DimensionMismatch(format!(
                "unitary on {n} qubits for a = {a}, s = {s}"
            )));
        }
        if let Unitary::Dense(m) = &unitary {
            let residual = m.unitarity_residual();
            if residual > UNITARY_TOLERANCE {
                return Err(Error::NotUnitary { residual });
            }
        }
        Ok(Self {
            unitary,
            alpha,
            a,
            s,
            eps,
        })
    }

    /// Encoding of a unitary by itself: `(1, 0, 0)`.
    pub fn exact_unitary(u: ComplexMatrix) -> Result<Self> {
        let s = u.qubits()?;
        Self::new(Unitary::Dense(u), 1.0, 0, s, 0.0)
    }

    pub fn unitary(&self) -> &Unitary {
        &self.unitary
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn width(&self) -> usize {
        self.a + self.s
    }

    /// Same unitary with a different claimed error bound.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "error bound must be non-negative, got {eps}"
            )));
        }
        self.eps = eps;
        Ok(self)
    }

    /// Same unitary reinterpreted with a different subnormalization and error.
    pub fn with_parameters(mut self, alpha: f64, eps: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "subnormalization must be positive, got {alpha}"
            )));
        }
        self.alpha = alpha;
        self.with_eps(eps)
    }
}

/// Embeds `a_mat` in a block-encoding.
///
/// A unitary input without `alpha` encodes itself with parameters `(1, 0, 0)`.
/// Otherwise the result is the one-ancilla dilation of `B = A/α`,
///
/// ```text
/// [[ B,           √(I − BB†) ],
///  [ √(I − B†B),  −B†        ]]
/// ```
///
/// with both square roots taken from a single SVD `B = W Σ V†`, so that
/// `√(I − BB†) = W √(I − Σ²) W†` and `√(I − B†B) = V √(I − Σ²) V†` commute
/// with `B` exactly as the algebra requires.
pub fn dilate(a_mat: &ComplexMatrix, alpha: Option<f64>) -> Result<BlockEncoding> {
    let s = a_mat.qubits()?;
    let norm = spectral_norm(a_mat);
    let alpha = match alpha {
        None if a_mat.is_unitary(UNITARY_TOLERANCE) => {
            return BlockEncoding::exact_unitary(a_mat.clone());
        }
        None if norm == 0.0 => return Err(Error::ZeroOperator),
        None => norm,
        Some(alpha) => {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "subnormalization must be positive, got {alpha}"
                )));
            }
            if alpha < norm * (1.0 - 1e-12) {
                return Err(Error::SubnormalizationTooSmall { alpha, norm });
            }
            alpha
        }
    };
    let b = a_mat.scale_real(1.0 / alpha);
    let dec = svd(&b);
    let mut c = Vec::with_capacity(dec.singular_values.len());
    for &sigma in &dec.singular_values {
        let gap = 1.0 - sigma * sigma;
        if gap < -PSD_TOLERANCE {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: gap,
            });
        }
        c.push(gap.max(0.0).sqrt());
    }
    let conjugate = |w: &ComplexMatrix| {
        let n = w.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| w.get(i, k) * c[k] * w.get(j, k).conj())
                .sum()
        })
    };
    let top_right = conjugate(&dec.u);
    let bottom_left = conjugate(&dec.v);
    let d = b.rows();
    let mut u = ComplexMatrix::zeros(2 * d, 2 * d);
    u.set_block(0, 0, &b);
    u.set_block(0, d, &top_right);
    u.set_block(d, 0, &bottom_left);
    u.set_block(d, d, &b.adjoint().scale_real(-1.0));
    let residual = u.unitarity_residual();
    if residual > 1e-9 {
        return Err(Error::NotUnitary { residual });
    }
    BlockEncoding::new(Unitary::Dense(u), alpha, 1, s, 0.0)
}

/// `Ã = (⟨0|^a ⊗ I) U (|0⟩^a ⊗ I)`, the top-left `2^s × 2^s` block.
///
/// Circuit-backed encodings are applied to the `2^s` basis states with the
/// ancillas in `|0⟩`; the full unitary is never formed.
pub fn leading_block(be: &BlockEncoding) -> Result<ComplexMatrix> {
    let d = 1usize << be.s;
    match &be.unitary {
        Unitary::Dense(m) => Ok(m.submatrix(0, 0, d, d)),
        Unitary::Circuit(c) => circuit::corner(c, d, d),
    }
}

/// `‖target − α·Ã‖₂`.
pub fn encoding_error(be: &BlockEncoding, target: &ComplexMatrix) -> Result<f64> {
    let d = 1usize << be.s;
    if target.rows() != d || target.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "target is {}x{}, encoding has s = {}",
            target.rows(),
            target.cols(),
            be.s
        )));
    }
    let mut diff = target.clone();
    diff.axpy(C64::new(-be.alpha, 0.0), &leading_block(be)?)?;
    Ok(spectral_norm(&diff))
}

/// Adds ancillas at the top of the register: `I ⊗ U` with `a_new − a` extra
/// qubits. The leading block is unchanged.
pub fn pad_ancillas(be: &BlockEncoding, a_new: usize) -> Result<BlockEncoding> {
    if a_new < be.a {
        return Err(Error::InvalidParameter(format!(
            "cannot pad {} ancillas down to {a_new}",
            be.a
        )));
    }
    let extra = a_new - be.a;
    if extra == 0 {
        return Ok(be.clone());
    }
    let unitary = match &be.unitary {
        Unitary::Dense(m) => Unitary::Dense(kron(&ComplexMatrix::identity(1 << extra), m)?),
        Unitary::Circuit(c) => {
            let mut wide = Circuit::new(c.width() + extra);
            wide.append_shifted(c, extra)?;
            Unitary::Circuit(wide)
        }
    };
    Ok(BlockEncoding {
        unitary,
        alpha: be.alpha,
        a: a_new,
        s: be.s,
        eps: be.eps,
    })
}

/// Outcome of applying an encoding to a signal state and post-selecting the
/// ancillas on `|0⟩^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Application {
    /// `‖Ã|ψ⟩‖²`
    pub success_probability: f64,
    /// `Ã|ψ⟩/‖Ã|ψ⟩‖`, absent when the probability is below `1e-14`.
    pub post_state: Option<Vec<C64>>,
    /// `1/‖Ã|ψ⟩‖`, the amplitude-amplification repetition count.
    pub expected_repetitions: f64,
}

impl Application {
    /// Post-selection statistics for a known leading block.
    pub fn from_block(block: &ComplexMatrix, psi: &[C64]) -> Result<Self> {
        check_normalized(psi)?;
        let image = block.matvec(psi)?;
        Ok(Self::from_image(image))
    }

    /// Post-selection statistics for a leading block given as an operator,
    /// for blocks too large to store.
    pub fn from_operator<A: LinearOperator + ?Sized>(block: &A, psi: &[C64]) -> Result<Self> {
        check_normalized(psi)?;
        if block.ncols() != psi.len() {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for a block with {} columns",
                psi.len(),
                block.ncols()
            )));
        }
        let mut image = vec![C64::new(0.0, 0.0); block.nrows()];
        block.apply(psi, &mut image);
        Ok(Self::from_image(image))
    }

    fn from_image(image: Vec<C64>) -> Self {
        let amplitude = vec_norm(&image);
        let p = amplitude * amplitude;
        let post_state =
            (p > 1e-14).then(|| image.iter().map(|z| z / amplitude).collect::<Vec<_>>());
        Self {
            success_probability: p.min(1.0),
            post_state,
            expected_repetitions: if amplitude > 0.0 {
                1.0 / amplitude
            } else {
                f64::INFINITY
            },
        }
    }

    /// `1/‖Ã|ψ⟩‖²`, the mean number of plain repeat-until-success trials.
    pub fn expected_trials(&self) -> f64 {
        if self.success_probability > 0.0 {
            1.0 / self.success_probability
        } else {
            f64::INFINITY
        }
    }
}

fn check_normalized(psi: &[C64]) -> Result<()> {
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Applies `U` to `|0⟩^a ⊗ |ψ⟩` and reads off the `|0⟩^a` branch.
pub fn apply(be: &BlockEncoding, psi: &[C64]) -> Result<Application> {
    let d = 1usize << be.s;
    if psi.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for s = {}",
            psi.len(),
            be.s
        )));
    }
    check_normalized(psi)?;
    let image = match &be.unitary {
        Unitary::Dense(m) => m.submatrix(0, 0, d, d).matvec(psi)?,
        Unitary::Circuit(c) => {
            let mut state = vec![C64::new(0.0, 0.0); 1 << c.width()];
            state[..d].copy_from_slice(psi);
            c.apply_in_place(&mut state)?;
            state.truncate(d);
            state
        }
    };
    Ok(Application::from_image(image))
}
