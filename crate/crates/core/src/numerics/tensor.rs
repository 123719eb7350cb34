use serde::{Deserialize, Serialize};

use super::json::MatrixJson;
use crate::{Error, Result, C64};

/// Dense complex s-way array stored row-major (last mode varies fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DenseTensor {
    mode_dims: Vec<usize>,
    data: Vec<C64>,
}

impl DenseTensor {
    pub fn new(mode_dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let len = mode_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or(Error::DimensionOverflow {
                requested: u128::MAX,
                limit: super::MAX_ENTRIES,
            })?;
        if len > super::MAX_ENTRIES {
            return Err(Error::DimensionOverflow {
                requested: len as u128,
                limit: super::MAX_ENTRIES,
            });
        }
        if data.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for mode dims {mode_dims:?}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("tensor"));
        }
        Ok(Self { mode_dims, data })
    }

    pub fn zeros(mode_dims: Vec<usize>) -> Self {
        let len = mode_dims.iter().product();
        Self {
            mode_dims,
            data: vec![C64::new(0.0, 0.0); len],
        }
    }

    /// Outer product `v_0 ∘ v_1 ∘ …`.
    pub fn outer(vectors: &[Vec<C64>]) -> Self {
        let dims: Vec<usize> = vectors.iter().map(|v| v.len()).collect();
        let mut data = vec![C64::new(1.0, 0.0)];
        for v in vectors {
            data = data
                .iter()
                .flat_map(|a| v.iter().map(move |b| a * b))
                .collect();
        }
        Self {
            mode_dims: dims,
            data,
        }
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn order(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Linear offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.mode_dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, index: &[usize]) -> C64 {
        self.data[self.offset(index)]
    }
}
