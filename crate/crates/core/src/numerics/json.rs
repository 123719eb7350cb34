//! JSON layout shared by matrices and tensors:
//! `{"dims": [..], "entries": [[re, im], ...]}` in row-major order.

use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, DenseTensor};
use crate::{Error, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

fn to_complex(entries: &[[f64; 2]]) -> Vec<C64> {
    entries.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

fn to_pairs(entries: &[C64]) -> Vec<[f64; 2]> {
    entries.iter().map(|z| [z.re, z.im]).collect()
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(value: MatrixJson) -> Result<Self, Error> {
        match value.dims.as_slice() {
            [rows, cols] => ComplexMatrix::new(*rows, *cols, to_complex(&value.entries)),
            dims => Err(Error::DimensionMismatch(format!(
                "a matrix needs exactly two dims, got {dims:?}"
            ))),
        }
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            dims: vec![m.rows(), m.cols()],
            entries: to_pairs(m.as_slice()),
        }
    }
}

impl TryFrom<MatrixJson> for DenseTensor {
    type Error = Error;

    fn try_from(value: MatrixJson) -> Result<Self, Error> {
        DenseTensor::new(value.dims, to_complex(&value.entries))
    }
}

impl From<DenseTensor> for MatrixJson {
    fn from(t: DenseTensor) -> Self {
        MatrixJson {
            dims: t.mode_dims().to_vec(),
            entries: to_pairs(t.as_slice()),
        }
    }
}

/// Complex vectors are written as `[[re, im], ...]`.
pub fn complex_vec_to_json(v: &[C64]) -> Vec<[f64; 2]> {
    to_pairs(v)
}

pub fn complex_vec_from_json(v: &[[f64; 2]]) -> Vec<C64> {
    to_complex(v)
}
