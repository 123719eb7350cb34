use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CpModel;
use crate::numerics::{
    derive_seed, gaussian_matrix, solve_right_hermitian, ComplexMatrix, DenseTensor,
};
use crate::{Error, Result, C64};

/// Added to the diagonal of every normal-equation Gram matrix.
pub const RIDGE: f64 = 1e-12;

/// Below this the cheap error estimate has lost most of its digits to
/// cancellation, so the error is measured from the reconstruction instead.
const EXACT_BELOW: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlsOptions {
    pub max_iters: usize,
    /// Stop once a sweep improves the relative error by less than this.
    pub tol: f64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AlsRun {
    pub model: CpModel,
    /// `‖T − T̂‖_F / ‖T‖_F`, measured on the reconstruction.
    pub rel_error: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The rank exceeds the product of all mode dims but the largest.
    pub over_parameterized: bool,
    pub seed: u64,
}

/// Rows of the Khatri-Rao product `A_0 ⊙ A_1 ⊙ …`, row-major over the
/// combined index with the first factor most significant. An empty list
/// gives a single row of ones.
pub(crate) fn khatri_rao(factors: &[ComplexMatrix], rank: usize) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0); rank];
    for a in factors {
        let mut next = Vec::with_capacity(out.len() * a.rows());
        for row in out.chunks(rank) {
            for i in 0..a.rows() {
                next.extend(row.iter().zip(a.row(i)).map(|(x, y)| x * y));
            }
        }
        out = next;
    }
    out
}

/// `G(r, r') = Σ_i A(i, r)·conj(A(i, r'))`.
pub(crate) fn gram(a: &ComplexMatrix) -> ComplexMatrix {
    let rank = a.cols();
    let mut g = ComplexMatrix::zeros(rank, rank);
    let data = g.as_mut_slice();
    for i in 0..a.rows() {
        let row = a.row(i);
        for (r, x) in row.iter().enumerate() {
            for (rp, y) in row.iter().enumerate() {
                data[r * rank + rp] += x * y.conj();
            }
        }
    }
    g
}

/// `‖T̂‖² = Σ_{r,r'} λ_r λ_r' ∏_k G_k(r', r)`.
pub(crate) fn model_norm_sq(weights: &[f64], grams: &[ComplexMatrix]) -> f64 {
    let rank = weights.len();
    let mut total = 0.0;
    for r in 0..rank {
        for rp in 0..rank {
            let prod: C64 = grams.iter().map(|g| g.get(rp, r)).product();
            total += weights[r] * weights[rp] * prod.re;
        }
    }
    total
}

fn hadamard_except(grams: &[ComplexMatrix], skip: usize, rank: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::from_fn(rank, rank, |_, _| C64::new(1.0, 0.0));
    for (k, g) in grams.iter().enumerate() {
        if k == skip {
            continue;
        }
        for (o, x) in out.as_mut_slice().iter_mut().zip(g.as_slice()) {
            *o *= x;
        }
    }
    for r in 0..rank {
        let z = out.get(r, r) + RIDGE;
        out.set(r, r, z);
    }
    out
}

/// Splits columns into unit vectors and weights. A zero column becomes `e_0`
/// with weight 0.
fn normalize_columns(mut x: ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    let (rows, rank) = (x.rows(), x.cols());
    let mut weights = Vec::with_capacity(rank);
    for j in 0..rank {
        let norm = crate::numerics::vec_norm(&x.column(j));
        for i in 0..rows {
            let z = if norm > 0.0 {
                x.get(i, j) / norm
            } else {
                C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)
            };
            x.set(i, j, z);
        }
        weights.push(norm);
    }
    (x, weights)
}

/// Matricization of the tensor into a left and right mode group, keeping
/// only its non-zero entries.
struct Split {
    h: usize,
    n_left: usize,
    n_right: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl Split {
    fn new(t: &DenseTensor) -> Self {
        let dims = t.mode_dims();
        let h = dims.len() - dims.len() / 2;
        let n_left = dims[..h].iter().product();
        let n_right = dims[h..].iter().product();
        let entries = t
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != C64::new(0.0, 0.0))
            .map(|(idx, &z)| (idx / n_right, idx % n_right, z))
            .collect();
        Self {
            h,
            n_left,
            n_right,
            entries,
        }
    }

    /// `P(i_L, r) = Σ_{i_R} T(i_L, i_R)·conj(K(i_R, r))` or the same over the
    /// left index when `left` is false.
    fn partial(&self, kr: &[C64], rank: usize, left: bool) -> Vec<C64> {
        let len = if left { self.n_left } else { self.n_right };
        let mut out = vec![C64::new(0.0, 0.0); len * rank];
        for &(l, r, t) in &self.entries {
            let (dst, src) = if left { (l, r) } else { (r, l) };
            let o = &mut out[dst * rank..(dst + 1) * rank];
            let k = &kr[src * rank..(src + 1) * rank];
            for (o, k) in o.iter_mut().zip(k) {
                *o += t * k.conj();
            }
        }
        out
    }
}

/// Contracts a partial result over every mode of its group except `n`.
fn mttkrp_local(
    p: &[C64],
    dims: &[usize],
    factors: &[ComplexMatrix],
    n: usize,
    rank: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dims[n], rank);
    let mut digits = vec![0usize; dims.len()];
    let mut w = vec![C64::new(0.0, 0.0); rank];
    for row in p.chunks(rank) {
        w.copy_from_slice(row);
        for (k, a) in factors.iter().enumerate() {
            if k != n {
                for (w, x) in w.iter_mut().zip(a.row(digits[k])) {
                    *w *= x.conj();
                }
            }
        }
        let o = &mut out.as_mut_slice()[digits[n] * rank..(digits[n] + 1) * rank];
        for (o, w) in o.iter_mut().zip(&w) {
            *o += w;
        }
        for k in (0..dims.len()).rev() {
            digits[k] += 1;
            if digits[k] < dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

/// Dense `T̂` built as `K_L diag(λ) K_Rᵀ` to keep the Khatri-Rao rows small.
pub(crate) fn reconstruct_data(weights: &[f64], factors: &[ComplexMatrix]) -> Vec<C64> {
    let rank = weights.len();
    let h = factors.len() - factors.len() / 2;
    let mut left = khatri_rao(&factors[..h], rank);
    for chunk in left.chunks_mut(rank) {
        for (z, &w) in chunk.iter_mut().zip(weights) {
            *z *= w;
        }
    }
    let right = khatri_rao(&factors[h..], rank);
    let mut out = Vec::with_capacity(left.len() / rank * right.len() / rank);
    for l in left.chunks(rank) {
        for r in right.chunks(rank) {
            out.push(l.iter().zip(r).map(|(x, y)| x * y).sum());
        }
    }
    out
}

fn measured_error(t: &DenseTensor, weights: &[f64], factors: &[ComplexMatrix], t_norm: f64) -> f64 {
    let hat = reconstruct_data(weights, factors);
    let sq: f64 = t
        .as_slice()
        .iter()
        .zip(&hat)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    sq.sqrt() / t_norm
}

fn validate(t: &DenseTensor, rank: usize, options: &AlsOptions) -> Result<f64> {
    if rank == 0 {
        return Err(Error::InvalidParameter("CP rank must be at least 1".into()));
    }
    if t.order() == 0 {
        return Err(Error::Empty("tensor modes"));
    }
    if options.max_iters == 0 {
        return Err(Error::InvalidParameter(
            "max_iters must be at least 1".into(),
        ));
    }
    if !(options.tol.is_finite() && options.tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be finite and non-negative, got {}",
            options.tol
        )));
    }
    let norm = t.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    Ok(norm)
}

/// Rank-`rank` CP decomposition by alternating least squares from a seeded
/// complex Gaussian start.
///
/// Each mode update solves the normal equations `A_n Γ = M_n` where `M_n` is
/// the MTTKRP and `Γ` the Hadamard product of the other modes' Grams plus
/// [`RIDGE`]. The MTTKRPs of one sweep share two partial contractions, one
/// per half of the modes, and only touch non-zero tensor entries.
pub fn cp_als(t: &DenseTensor, rank: usize, options: &AlsOptions, seed: u64) -> Result<AlsRun> {
    let t_norm = validate(t, rank, options)?;
    let dims = t.mode_dims().to_vec();
    let d = dims.len();
    let largest = dims.iter().copied().max().unwrap_or(1);
    let over_parameterized = rank > dims.iter().product::<usize>() / largest;
    let split = Split::new(t);
    let h = split.h;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<ComplexMatrix> = dims
        .iter()
        .map(|&m| normalize_columns(gaussian_matrix(m, rank, &mut rng)).0)
        .collect();
    let mut weights = vec![1.0; rank];
    let mut grams: Vec<ComplexMatrix> = factors.iter().map(gram).collect();

    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for iter in 1..=options.max_iters {
        iterations = iter;
        let mut last = None;
        for (lo, hi, left) in [(0, h, true), (h, d, false)] {
            if lo == hi {
                continue;
            }
            let others = if left { &factors[h..] } else { &factors[..h] };
            let p = split.partial(&khatri_rao(others, rank), rank, left);
            for n in lo..hi {
                let m = mttkrp_local(&p, &dims[lo..hi], &factors[lo..hi], n - lo, rank);
                let x = solve_right_hermitian(&hadamard_except(&grams, n, rank), &m)?;
                let (a, w) = normalize_columns(x);
                grams[n] = gram(&a);
                factors[n] = a;
                weights = w;
                last = Some((n, m));
            }
        }
        let (n, m) = last.expect("at least one mode");
        // ⟨T̂, T⟩ from the last MTTKRP, which already holds the other modes.
        let mut inner = C64::new(0.0, 0.0);
        for i in 0..dims[n] {
            for (r, &w) in weights.iter().enumerate() {
                inner += factors[n].get(i, r).conj() * m.get(i, r) * w;
            }
        }
        let sq = t_norm * t_norm - 2.0 * inner.re + model_norm_sq(&weights, &grams);
        let mut rel = sq.max(0.0).sqrt() / t_norm;
        if rel < EXACT_BELOW {
            rel = measured_error(t, &weights, &factors, t_norm);
        }
        if !rel.is_finite() {
            return Err(Error::NonFinite("CP-ALS iterate"));
        }
        if previous - rel < options.tol {
            converged = true;
            break;
        }
        previous = rel;
    }
    let rel_error = measured_error(t, &weights, &factors, t_norm);
    Ok(AlsRun {
        model: CpModel { weights, factors },
        rel_error,
        iterations,
        converged,
        over_parameterized,
        seed,
    })
}

/// Seed of restart `restart` at rank `rank` in a sweep seeded with `seed`.
pub fn restart_seed(seed: u64, rank: usize, restart: usize) -> u64 {
    derive_seed(seed, &[rank as u64, restart as u64])
}

/// Best of the restarts at one rank.
#[derive(Clone, Debug)]
pub struct RankResult {
    pub rank: usize,
    pub restarts: usize,
    pub best_rel_error: f64,
    pub iterations_of_best: usize,
    pub best_seed: u64,
    /// Minimum of `best_rel_error` over this and every smaller rank in the
    /// sweep; a rank-`r` model contains every smaller one, so this is the
    /// error actually attainable at rank `r`.
    pub envelope: f64,
    pub over_parameterized: bool,
    pub model: CpModel,
}

/// Runs `restarts` seeded [`cp_als`] fits per rank and keeps the best.
/// Ties go to the smaller seed.
pub fn rank_sweep(
    t: &DenseTensor,
    ranks: &[usize],
    restarts: usize,
    seed: u64,
    options: &AlsOptions,
) -> Result<Vec<RankResult>> {
    if ranks.is_empty() {
        return Err(Error::Empty("rank list"));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    let mut rows: Vec<RankResult> = Vec::with_capacity(ranks.len());
    for &rank in ranks {
        let mut best: Option<AlsRun> = None;
        for restart in 0..restarts {
            let run = cp_als(t, rank, options, restart_seed(seed, rank, restart))?;
            let better = match &best {
                None => true,
                Some(b) => {
                    run.rel_error < b.rel_error
                        || (run.rel_error == b.rel_error && run.seed < b.seed)
                }
            };
            if better {
                best = Some(run);
            }
        }
        let best = best.expect("restarts is positive");
        let envelope = rows
            .iter()
            .filter(|row| row.rank <= rank)
            .map(|row| row.best_rel_error)
            .fold(best.rel_error, f64::min);
        rows.push(RankResult {
            rank,
            restarts,
            best_rel_error: best.rel_error,
            iterations_of_best: best.iterations,
            best_seed: best.seed,
            envelope,
            over_parameterized: best.over_parameterized,
            model: best.model,
        });
    }
    Ok(rows)
}
