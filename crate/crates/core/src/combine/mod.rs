//! Combinators on block-encodings: Kronecker products, linear combinations
//! through a state-preparation pair and a select oracle, and the synthesis of
//! CP-like sums built from both.

mod cp;
mod kron;
mod lcu;

pub use cp::{
    dilate_factors, folded_coefficients, is_uniform, per_term_swap_select, shared_swap_select,
    synthesize_cp, synthesize_cp_detailed, synthesize_encodings, CpLikeSpec, SwapPlacement,
    Synthesis, SynthesisOptions,
};
pub use kron::{kron_encodings, kron_many, kron_swaps, swap_register};
pub use lcu::{lcu, prep_residual, select_oracle, state_prep_pair, StatePrepPair};

#[cfg(test)]
mod tests;
