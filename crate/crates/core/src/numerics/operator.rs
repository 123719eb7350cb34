//! Matrix-free operators and their spectral norm.
//!
//! Operators that are sums of few-qubit terms (Hamiltonians, leading blocks of
//! linear combinations of Kronecker products) never need to be materialized:
//! [`LocalSum`] applies them term by term and [`operator_norm`] only needs
//! products with `A` and `A†`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{inner, vec_norm, ComplexMatrix};
use crate::{Error, Result, C64};

pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[C64], y: &mut [C64]);
    /// `y = A† x`
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for ComplexMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (i, xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a.conj() * xi;
            }
        }
    }
}

const LANCZOS_TOL: f64 = 1e-13;
const LANCZOS_MAX_BASIS: usize = 400;

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal `a`
/// and off-diagonal `b`, by Sturm-sequence bisection.
fn tridiagonal_max_eigenvalue(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len();
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for i in 0..k {
        let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < k { b[i].abs() } else { 0.0 };
        hi = hi.max(a[i] + left + right);
        lo = lo.min(a[i] - left - right);
    }
    // Number of eigenvalues strictly below x.
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = a[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..k {
            let prev = if d == 0.0 {
                f64::EPSILON * (b[i - 1].abs() + 1e-300)
            } else {
                d
            };
            d = a[i] - x - b[i - 1] * b[i - 1] / prev;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-16 * hi.abs().max(lo.abs()) || mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Spectral norm via Lanczos on `A†A` with full reorthogonalization.
///
/// Stops when the top Ritz value changes by less than `1e-13` (relative) on two
/// consecutive steps, when the Krylov space becomes invariant, or when it
/// spans the whole space.
pub fn operator_norm<A: LinearOperator + ?Sized>(op: &A) -> f64 {
    let (m, n) = (op.nrows(), op.ncols());
    if m == 0 || n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_205e);
    let mut q: Vec<C64> = (0..n)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let norm = vec_norm(&q);
    q.iter_mut().for_each(|z| *z /= norm);

    let max_basis = n.min(LANCZOS_MAX_BASIS);
    let mut basis: Vec<Vec<C64>> = vec![q];
    let mut diag: Vec<f64> = Vec::new();
    let mut off: Vec<f64> = Vec::new();
    let mut image = vec![C64::new(0.0, 0.0); m];
    let mut theta = 0.0_f64;
    let mut stable_steps = 0;

    loop {
        let k = basis.len() - 1;
        let mut w = vec![C64::new(0.0, 0.0); n];
        op.apply(&basis[k], &mut image);
        op.apply_adjoint(&image, &mut w);
        diag.push(inner(&basis[k], &w).re);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let beta = vec_norm(&w);

        let next = tridiagonal_max_eigenvalue(&diag, &off);
        let change = (next - theta).abs();
        theta = theta.max(next);
        if theta <= 0.0 && beta <= f64::MIN_POSITIVE {
            return 0.0;
        }
        if change <= LANCZOS_TOL * theta {
            stable_steps += 1;
        } else {
            stable_steps = 0;
        }
        let invariant = beta <= 1e-14 * theta.max(f64::MIN_POSITIVE);
        if stable_steps >= 2 || invariant || basis.len() >= max_basis {
            break;
        }
        off.push(beta);
        basis.push(w.into_iter().map(|z| z / beta).collect());
    }
    theta.max(0.0).sqrt()
}

/// A square matrix acting on the contiguous qubit range
/// `first .. first + log₂(dim)`.
#[derive(Clone, Debug)]
pub struct LocalTerm {
    pub first_qubit: usize,
    pub matrix: ComplexMatrix,
}

/// `shift·I + Σ_k term_k` on `qubits` qubits, each term embedded with
/// identities on the remaining qubits.
#[derive(Clone, Debug)]
pub struct LocalSum {
    qubits: usize,
    shift: C64,
    terms: Vec<LocalTerm>,
}

impl LocalSum {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            shift: C64::new(0.0, 0.0),
            terms: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn shift(&self) -> C64 {
        self.shift
    }

    pub fn add_identity(&mut self, coefficient: C64) {
        self.shift += coefficient;
    }

    pub fn add_term(&mut self, first_qubit: usize, matrix: ComplexMatrix) -> Result<()> {
        let k = matrix.qubits()?;
        if first_qubit + k > self.qubits {
            return Err(Error::DimensionMismatch(format!(
                "term on qubits {first_qubit}..{} exceeds {} qubits",
                first_qubit + k,
                self.qubits
            )));
        }
        self.terms.push(LocalTerm {
            first_qubit,
            matrix,
        });
        Ok(())
    }

    /// Adds `coefficient · (f_0 ⊗ f_1 ⊗ … )` where the factors tile all qubits
    /// in order. Leading and trailing exact identity factors are dropped so the
    /// stored term only covers the non-trivial support.
    pub fn add_kron_chain(&mut self, coefficient: C64, factors: &[ComplexMatrix]) -> Result<()> {
        let sizes = factors
            .iter()
            .map(|f| f.qubits())
            .collect::<Result<Vec<_>>>()?;
        if sizes.iter().sum::<usize>() != self.qubits {
            return Err(Error::DimensionMismatch(format!(
                "factors cover {} qubits, operator has {}",
                sizes.iter().sum::<usize>(),
                self.qubits
            )));
        }
        let first = factors.iter().position(|f| !f.is_identity());
        let last = factors.iter().rposition(|f| !f.is_identity());
        match (first, last) {
            (Some(first), Some(last)) => {
                let offset: usize = sizes[..first].iter().sum();
                let block = super::kron_all(&factors[first..=last])?;
                self.add_term(offset, block.scale(coefficient))
            }
            _ => {
                self.add_identity(coefficient);
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    fn apply_impl(&self, x: &[C64], y: &mut [C64], adjoint: bool) {
        let n = self.qubits;
        let shift = if adjoint {
            self.shift.conj()
        } else {
            self.shift
        };
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = shift * xi;
        }
        let mut gathered = Vec::new();
        for term in &self.terms {
            let block = term.matrix.rows();
            let k = block.trailing_zeros() as usize;
            let stride = 1usize << (n - term.first_qubit - k);
            let groups = 1usize << term.first_qubit;
            gathered.resize(block, C64::new(0.0, 0.0));
            for hi in 0..groups {
                let base = hi * block * stride;
                for lo in 0..stride {
                    for (r, g) in gathered.iter_mut().enumerate() {
                        *g = x[base + r * stride + lo];
                    }
                    for r in 0..block {
                        let acc: C64 = if adjoint {
                            (0..block)
                                .map(|c| term.matrix.get(c, r).conj() * gathered[c])
                                .sum()
                        } else {
                            term.matrix
                                .row(r)
                                .iter()
                                .zip(&gathered)
                                .map(|(a, b)| a * b)
                                .sum()
                        };
                        y[base + r * stride + lo] += acc;
                    }
                }
            }
        }
    }

    /// Dense matrix of the operator; only sensible for small qubit counts.
    pub fn to_dense(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        let mut e = vec![C64::new(0.0, 0.0); d];
        let mut col = vec![C64::new(0.0, 0.0); d];
        for j in 0..d {
            e[j] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for (i, v) in col.iter().enumerate() {
                out.set(i, j, *v);
            }
            e[j] = C64::new(0.0, 0.0);
        }
        out
    }
}

impl LinearOperator for LocalSum {
    fn nrows(&self) -> usize {
        self.dim()
    }

    fn ncols(&self) -> usize {
        self.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_impl(x, y, false)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.apply_impl(x, y, true)
    }
}
