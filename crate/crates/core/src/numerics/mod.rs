//! Dense complex linear-algebra and tensor kernels.

mod json;
mod linalg;
mod matrix;
mod operator;
mod tensor;

pub use json::{complex_vec_from_json, complex_vec_to_json, MatrixJson};
pub(crate) use linalg::solve_right_hermitian;
pub use linalg::{
    complete_unitary, derive_seed, gaussian_matrix, haar_state, hermitian_eigen,
    normal_eigenvalues, psd_sqrt, random_unitary, spectral_function, spectral_norm, svd, Svd,
    PSD_TOLERANCE, SVD_MAX_DIM,
};
pub use matrix::{inner, kron, kron_all, log2_exact, vec_norm, ComplexMatrix, MAX_ENTRIES};
pub use operator::{operator_norm, LinearOperator, LocalSum, LocalTerm};
pub use tensor::DenseTensor;
