use crate::circuit::{Circuit, Control, Gate};
use crate::encoding::{BlockEncoding, Unitary, UNITARY_TOLERANCE};
use crate::numerics::{complete_unitary, ComplexMatrix};
use crate::{Error, Result, C64};

/// Unitaries `(P, Q)` on `b` qubits with `β·conj(p_j)·q_j ≈ y_j`, where `p` and
/// `q` are their first columns.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePrepPair {
    p: ComplexMatrix,
    q: ComplexMatrix,
    beta: f64,
    b: usize,
    terms: usize,
    eps: f64,
}

/// `Σ_j |β·conj(p_j)·q_j − y_j|` over all `2^b` entries, `y` zero-padded.
pub fn prep_residual(p: &ComplexMatrix, q: &ComplexMatrix, beta: f64, y: &[C64]) -> f64 {
    (0..p.rows())
        .map(|j| {
            let target = y.get(j).copied().unwrap_or_default();
            (p.get(j, 0).conj() * q.get(j, 0) * beta - target).norm()
        })
        .sum()
}

fn ancillas_for(m: usize) -> usize {
    (usize::BITS - (m.max(2) - 1).leading_zeros()) as usize
}

fn validate_coefficients(y: &[C64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Empty("coefficient vector"));
    }
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("coefficient vector"));
    }
    Ok(())
}

/// Canonical pair for `y`: `β = ‖y‖₁`, `q_j = √(|y_j|/β)` and
/// `p_j = e^{−iθ_j}√(|y_j|/β)` with `θ_j` the phase of `y_j`.
///
/// `b` defaults to `⌈log₂ m⌉`, at least 1.
pub fn state_prep_pair(y: &[C64], b: Option<usize>) -> Result<StatePrepPair> {
    validate_coefficients(y)?;
    let m = y.len();
    let b = b.unwrap_or_else(|| ancillas_for(m));
    if b >= usize::BITS as usize || (1usize << b) < m {
        return Err(Error::InvalidParameter(format!(
            "{b} ancillas cannot index {m} coefficients"
        )));
    }
    let beta: f64 = y.iter().map(|z| z.norm()).sum();
    if beta == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let dim = 1usize << b;
    let mut p = vec![C64::new(0.0, 0.0); dim];
    let mut q = vec![C64::new(0.0, 0.0); dim];
    for (j, z) in y.iter().enumerate() {
        let amplitude = (z.norm() / beta).sqrt();
        q[j] = C64::new(amplitude, 0.0);
        p[j] = C64::from_polar(amplitude, -z.arg());
    }
    let p = complete_unitary(&renormalized(p))?;
    let q = complete_unitary(&renormalized(q))?;
    let eps = prep_residual(&p, &q, beta, y);
    Ok(StatePrepPair {
        p,
        q,
        beta,
        b,
        terms: m,
        eps,
    })
}

/// Rounding in the amplitudes can leave the norm a few ulps away from 1.
fn renormalized(mut v: Vec<C64>) -> Vec<C64> {
    let n = crate::numerics::vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

impl StatePrepPair {
    /// A pair from given unitaries; `eps` is the measured residual against `y`.
    pub fn from_unitaries(
        p: ComplexMatrix,
        q: ComplexMatrix,
        beta: f64,
        y: &[C64],
    ) -> Result<Self> {
        validate_coefficients(y)?;
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pair subnormalization must be positive, got {beta}"
            )));
        }
        let b = p.qubits()?;
        if q.rows() != p.rows() || q.cols() != p.cols() {
            return Err(Error::DimensionMismatch("P and Q differ in size".into()));
        }
        if (1usize << b) < y.len() {
            return Err(Error::InvalidParameter(format!(
                "{b} ancillas cannot index {} coefficients",
                y.len()
            )));
        }
        for m in [&p, &q] {
            let residual = m.unitarity_residual();
            if residual > UNITARY_TOLERANCE {
                return Err(Error::NotUnitary { residual });
            }
        }
        let eps = prep_residual(&p, &q, beta, y);
        Ok(Self {
            p,
            q,
            beta,
            b,
            terms: y.len(),
            eps,
        })
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Length of the coefficient vector the pair was built for.
    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `β·conj(p_j)·q_j` for every `j < 2^b`.
    pub fn effective_coefficients(&self) -> Vec<C64> {
        (0..self.p.rows())
            .map(|j| self.p.get(j, 0).conj() * self.q.get(j, 0) * self.beta)
            .collect()
    }
}

/// Circuit of `W = Σ_{j<m} |j⟩⟨j| ⊗ U_j + Σ_{j≥m} |j⟩⟨j| ⊗ I` on `b + n` qubits.
/// Gate `j` fires when the top `b` qubits hold the binary pattern of `j`.
pub fn select_oracle(encodings: &[BlockEncoding], b: usize) -> Result<Circuit> {
    let first = encodings
        .first()
        .ok_or(Error::Empty("select oracle branches"))?;
    if b >= usize::BITS as usize || (1usize << b) < encodings.len() {
        return Err(Error::InvalidParameter(format!(
            "{b} control qubits cannot select {} branches",
            encodings.len()
        )));
    }
    for (j, be) in encodings.iter().enumerate() {
        if be.a() != first.a() || be.s() != first.s() {
            return Err(Error::NonUniform(format!(
                "branch {j} has (a, s) = ({}, {}), branch 0 has ({}, {})",
                be.a(),
                be.s(),
                first.a(),
                first.s()
            )));
        }
    }
    let mut c = Circuit::new(b + first.width());
    for (j, be) in encodings.iter().enumerate() {
        let controls = Control::pattern(0..b, b, j);
        c.append_controlled(&be.unitary().to_circuit()?, b, &controls)?;
    }
    Ok(c)
}

/// `(P† ⊗ I) W (Q ⊗ I)` as a circuit around an arbitrary select circuit.
pub(crate) fn wrap_select(pair: &StatePrepPair, select: &Circuit) -> Result<Circuit> {
    let b = pair.b;
    let mut c = Circuit::new(select.width());
    let register: Vec<usize> = (0..b).collect();
    if !pair.q.is_identity() {
        c.push(Gate::unitary(register.clone(), pair.q.clone()))?;
    }
    c.append_shifted(select, 0)?;
    if !pair.p.is_identity() {
        c.push(Gate::unitary(register, pair.p.adjoint()))?;
    }
    Ok(c)
}

pub(crate) fn check_uniform(encodings: &[BlockEncoding]) -> Result<(f64, f64)> {
    let first = encodings
        .first()
        .ok_or(Error::Empty("linear combination"))?;
    let mut max_eps: f64 = 0.0;
    for (j, be) in encodings.iter().enumerate() {
        if (be.alpha() - first.alpha()).abs() > 1e-12 * first.alpha() {
            return Err(Error::NonUniform(format!(
                "term {j} has subnormalization {}, term 0 has {}",
                be.alpha(),
                first.alpha()
            )));
        }
        max_eps = max_eps.max(be.eps());
    }
    Ok((first.alpha(), max_eps))
}

/// Linear combination of `m` encodings sharing `(α, a, s)`: an
/// `(αβ, a + b, α·ε_pair + β·max_j ε_j)` encoding of `Σ_j y_j A_j`.
pub fn lcu(pair: &StatePrepPair, encodings: &[BlockEncoding]) -> Result<BlockEncoding> {
    let (alpha, max_eps) = check_uniform(encodings)?;
    if encodings.len() != pair.terms {
        return Err(Error::DimensionMismatch(format!(
            "pair built for {} coefficients, got {} encodings",
            pair.terms,
            encodings.len()
        )));
    }
    let select = select_oracle(encodings, pair.b)?;
    let first = &encodings[0];
    BlockEncoding::new(
        Unitary::Circuit(wrap_select(pair, &select)?),
        alpha * pair.beta,
        first.a() + pair.b,
        first.s(),
        alpha * pair.eps + pair.beta * max_eps,
    )
}
