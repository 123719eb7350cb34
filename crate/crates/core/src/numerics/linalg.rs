use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::operator::operator_norm;
use super::{vec_norm, ComplexMatrix};
use crate::{Error, Result, C64};

/// Above this side length the spectral norm switches from a full SVD to a
/// Krylov iteration on `A†A`.
pub const SVD_MAX_DIM: usize = 256;

/// Eigenvalues down to this value are treated as roundoff and clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

pub(crate) fn to_nalgebra(a: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    if a.rows().max(a.cols()) <= SVD_MAX_DIM {
        let svd = SVD::new(to_nalgebra(a), false, false);
        svd.singular_values.iter().cloned().fold(0.0, f64::max)
    } else {
        operator_norm(a)
    }
}

/// Eigenvalues of a normal matrix, such as a unitary, read off the diagonal
/// of its complex Schur form.
pub fn normal_eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let (_, t) = Schur::new(to_nalgebra(a)).unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Mixes a base seed with a path of indices into an independent stream seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    path.iter()
        .fold(splitmix64(seed), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

/// Thin singular value decomposition `A = U diag(σ) V†`, singular values in
/// decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    let mut decomposition = SVD::new(to_nalgebra(a), true, true);
    decomposition.sort_by_singular_values();
    let u = decomposition.u.as_ref().expect("requested U");
    let v_t = decomposition.v_t.as_ref().expect("requested V†");
    Svd {
        u: from_nalgebra(u),
        singular_values: decomposition.singular_values.iter().cloned().collect(),
        v: from_nalgebra(&v_t.adjoint()),
    }
}

/// Eigen-decomposition of a Hermitian matrix; eigenvectors are the columns of
/// the returned matrix.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Hermitian eigensolver needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let eig = SymmetricEigen::new(to_nalgebra(h));
    Ok((
        eig.eigenvalues.iter().cloned().collect(),
        from_nalgebra(&eig.eigenvectors),
    ))
}

/// `V f(Λ) V†` for a Hermitian matrix with the given eigenpairs.
pub fn spectral_function(
    eigenvalues: &[f64],
    vectors: &ComplexMatrix,
    f: impl Fn(f64) -> C64,
) -> ComplexMatrix {
    let n = eigenvalues.len();
    let fv: Vec<C64> = eigenvalues.iter().map(|&l| f(l)).collect();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vectors.get(i, k) * fv[k] * vectors.get(j, k).conj())
            .sum()
    })
}

/// Hermitian square root of a positive semidefinite matrix.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_hermitian(PSD_TOLERANCE) {
        return Err(Error::InvalidParameter(
            "square root requires a Hermitian matrix".into(),
        ));
    }
    let (values, vectors) = hermitian_eigen(h)?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    Ok(spectral_function(&values, &vectors, |l| {
        C64::new(l.max(0.0).sqrt(), 0.0)
    }))
}

/// A unitary whose first column is `v`.
///
/// Uses a Householder reflection that maps `e^{iφ}e₀` onto `v` (φ the phase of
/// `v₀`) followed by the diagonal phase `diag(e^{iφ}, 1, …, 1)`.
pub fn complete_unitary(v: &[C64]) -> Result<ComplexMatrix> {
    let n = v.len();
    if n == 0 {
        return Err(Error::Empty("state vector"));
    }
    let norm = vec_norm(v);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm });
    }
    let phase = if v[0].norm() > 0.0 {
        v[0] / v[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    // w = e^{iφ}e₀ − v
    let mut w: Vec<C64> = v.iter().map(|z| -z).collect();
    w[0] += phase;
    let w_norm_sqr: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let mut u = ComplexMatrix::identity(n);
    if w_norm_sqr > 1e-30 {
        for i in 0..n {
            for j in 0..n {
                let h = u.get(i, j) - 2.0 * w[i] * w[j].conj() / w_norm_sqr;
                u.set(i, j, h);
            }
        }
    }
    for i in 0..n {
        let z = u.get(i, 0) * phase;
        u.set(i, 0, z);
    }
    Ok(u)
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn haar_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                C64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let norm = vec_norm(&v);
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Complex matrix with independent standard Gaussian entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Haar-random unitary via the QR decomposition of a Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(dim: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    let g = to_nalgebra(&gaussian_matrix(dim, dim, rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = from_nalgebra(&q);
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            let z = q.get(i, j) * phase;
            q.set(i, j, z);
        }
    }
    q
}

/// Solves `X·G = M` for Hermitian positive definite `G`.
pub(crate) fn solve_right_hermitian(g: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    // X G = M  ⇔  Gᵀ Xᵀ = Mᵀ, and Gᵀ = conj(G) is Hermitian positive definite.
    let g_t = to_nalgebra(&g.transpose());
    let m_t = to_nalgebra(&m.transpose());
    let chol = g_t
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("Gram matrix is not positive definite".into()))?;
    Ok(from_nalgebra(&chol.solve(&m_t)).transpose())
}
