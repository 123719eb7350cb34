//! Tensorization of operators with site structure and CP-ALS rank compression.
//!
//! A `D × D` operator on sites of dimensions `d_0, …, d_{s-1}` becomes an
//! s-way tensor whose mode `k` has length `d_k²`, indexed by `r_k·d_k + c_k`.
//! A rank-`r` CP model of that tensor is a sum of `r` Kronecker products, which
//! [`cp_to_spec`] turns into a [`CpLikeSpec`] ready for synthesis.

mod als;

use std::sync::Arc;

use crate::combine::CpLikeSpec;
use crate::models::pad_site_operator;
use crate::numerics::{ComplexMatrix, DenseTensor};
use crate::{Error, Result, C64};

pub use als::{cp_als, rank_sweep, restart_seed, AlsOptions, AlsRun, RankResult, RIDGE};

/// Tolerance on the unit norm of factor columns.
const UNIT_TOLERANCE: f64 = 1e-8;

/// Offsets of every row digit string and column digit string in the tensor.
fn digit_offsets(site_dims: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if site_dims.is_empty() {
        return Err(Error::Empty("site dimensions"));
    }
    if let Some(&d) = site_dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidParameter(format!(
            "site dimension {d} is below 2"
        )));
    }
    let dim: usize = site_dims.iter().product();
    let mut row = vec![0usize; dim];
    let mut col = vec![0usize; dim];
    // stride of the tensor mode, and place value of the matrix digit
    let (mut stride, mut place) = (1usize, 1usize);
    for &d in site_dims.iter().rev() {
        for i in 0..dim {
            let digit = (i / place) % d;
            row[i] += digit * d * stride;
            col[i] += digit * stride;
        }
        stride *= d * d;
        place *= d;
    }
    Ok((row, col))
}

fn check_square(b: &ComplexMatrix, dim: usize) -> Result<()> {
    if b.rows() != dim || b.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for sites of total dimension {dim}",
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Reshapes `b` into a tensor with one mode of length `d_k²` per site.
pub fn tensorize(b: &ComplexMatrix, site_dims: &[usize]) -> Result<DenseTensor> {
    let (row, col) = digit_offsets(site_dims)?;
    check_square(b, row.len())?;
    let modes: Vec<usize> = site_dims.iter().map(|d| d * d).collect();
    let mut t = DenseTensor::zeros(modes);
    let data = t.as_mut_slice();
    for (i, &r) in row.iter().enumerate() {
        for (j, &c) in col.iter().enumerate() {
            data[r + c] = b.get(i, j);
        }
    }
    Ok(t)
}

/// Inverse of [`tensorize`].
pub fn detensorize(t: &DenseTensor, site_dims: &[usize]) -> Result<ComplexMatrix> {
    check_modes(t.mode_dims(), site_dims)?;
    let (row, col) = digit_offsets(site_dims)?;
    let data = t.as_slice();
    Ok(ComplexMatrix::from_fn(row.len(), col.len(), |i, j| {
        data[row[i] + col[j]]
    }))
}

fn check_modes(modes: &[usize], site_dims: &[usize]) -> Result<()> {
    if modes.len() != site_dims.len() || modes.iter().zip(site_dims).any(|(&m, &d)| m != d * d) {
        return Err(Error::DimensionMismatch(format!(
            "mode dims {modes:?} do not match site dims {site_dims:?} squared"
        )));
    }
    Ok(())
}

/// `Σ_j λ_j a_0j ∘ a_1j ∘ …` with unit-norm factor columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CpModel {
    weights: Vec<f64>,
    factors: Vec<ComplexMatrix>,
}

impl CpModel {
    pub fn new(weights: Vec<f64>, factors: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("CP weights"));
        }
        if factors.is_empty() {
            return Err(Error::Empty("CP factor matrices"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("CP weights"));
        }
        let rank = weights.len();
        for (k, a) in factors.iter().enumerate() {
            if a.cols() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "factor {k} has {} columns for rank {rank}",
                    a.cols()
                )));
            }
            for j in 0..rank {
                let norm = crate::numerics::vec_norm(&a.column(j));
                if (norm - 1.0).abs() > UNIT_TOLERANCE {
                    return Err(Error::InvalidParameter(format!(
                        "column {j} of factor {k} has norm {norm}"
                    )));
                }
            }
        }
        Ok(Self { weights, factors })
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn mode_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|a| a.rows()).collect()
    }

    /// The dense tensor `T̂`.
    pub fn reconstruct(&self) -> DenseTensor {
        let data = als::reconstruct_data(&self.weights, &self.factors);
        DenseTensor::new(self.mode_dims(), data).expect("dims match the factor rows")
    }

    /// `‖T̂‖_F` from the factor Gram matrices, without forming `T̂`.
    pub fn norm(&self) -> f64 {
        let grams: Vec<ComplexMatrix> = self.factors.iter().map(als::gram).collect();
        als::model_norm_sq(&self.weights, &grams).max(0.0).sqrt()
    }
}

/// One Kronecker term per CP column: the factor at site `k` is the
/// un-vectorized column, zero-padded to 4×4 on 3-level sites, and the
/// coefficient is the weight. Zero-weight columns are dropped.
pub fn cp_to_spec(model: &CpModel, site_dims: &[usize]) -> Result<CpLikeSpec> {
    check_modes(&model.mode_dims(), site_dims)?;
    let mut y = Vec::new();
    let mut terms = Vec::new();
    for (j, &w) in model.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let mut factors = Vec::with_capacity(site_dims.len());
        for (a, &d) in model.factors.iter().zip(site_dims) {
            let m = ComplexMatrix::from_fn(d, d, |r, c| a.get(r * d + c, j));
            let m = if d == 3 { pad_site_operator(&m)? } else { m };
            factors.push(Arc::new(m));
        }
        y.push(C64::new(w, 0.0));
        terms.push(factors);
    }
    CpLikeSpec::new(y, terms)
}
