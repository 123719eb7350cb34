//! Synthesis of block-encodings for large operators out of block-encodings of
//! small matrices.
//!
//! Two combinators do the work: the Kronecker product of block-encodings
//! ([`combine::kron_encodings`], [`combine::kron_many`]) and the linear
//! combination of block-encodings through a state-preparation pair and a
//! select oracle ([`combine::lcu`]). Together they give a block-encoding of
//! any operator written as a CP-like sum
//!
//! ```text
//! B = Σ_j y_j A_1^(j) ⊗ A_2^(j) ⊗ ... ⊗ A_dj^(j)
//! ```
//!
//! via [`combine::synthesize_cp`]. The [`cpd`] module compresses operators with
//! site structure into fewer terms with CP-ALS, [`models`] builds the standard
//! example Hamiltonians and [`circuit`] holds the gate IR, a state-vector
//! evaluator and the CNOT cost model.
//!
//! Qubit 0 is the most significant position of every basis index, so ancilla
//! registers (which always sit above the signal register) select the leading
//! block as a literal top-left submatrix.

pub mod circuit;
pub mod combine;
pub mod cpd;
pub mod encoding;
mod error;
pub mod models;
pub mod numerics;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
