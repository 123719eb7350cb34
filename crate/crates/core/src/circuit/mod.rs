//! Gate-level circuits, a state-vector evaluator and the CNOT cost model.
//!
//! Qubit indices are 0-based with qubit 0 the most significant bit of a basis
//! index. Gates are applied in list order: the first gate acts first.

mod cost;
mod gate;
mod json;

use std::collections::BTreeMap;

pub use cost::{cnot_cost, CostRegime, CostReport};
pub use gate::{Control, Gate, GateKind};
pub use json::{CircuitJson, GateJson};

use crate::numerics::{ComplexMatrix, MAX_ENTRIES};
use crate::{Error, Result, C64};

/// Default qubit limit for [`evaluate`]; `PLTCP_MAX_QUBITS` overrides it.
pub const DENSE_QUBIT_LIMIT: usize = 14;
/// Qubit limit for state-vector application.
pub const STATE_QUBIT_LIMIT: usize = 26;

pub fn dense_qubit_limit() -> usize {
    std::env::var("PLTCP_MAX_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DENSE_QUBIT_LIMIT)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "CircuitJson", into = "CircuitJson")]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other` acting on qubits `offset .. offset + other.width()`.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        if offset + other.width > self.width {
            return Err(Error::InvalidGate(format!(
                "sub-circuit of width {} at offset {offset} exceeds width {}",
                other.width, self.width
            )));
        }
        self.gates
            .extend(other.gates.iter().map(|g| g.shifted(offset)));
        Ok(())
    }

    /// Appends `other` (shifted by `offset`) with every gate additionally
    /// controlled by `controls`.
    pub fn append_controlled(
        &mut self,
        other: &Circuit,
        offset: usize,
        controls: &[Control],
    ) -> Result<()> {
        for g in &other.gates {
            self.push(g.shifted(offset).with_controls(controls))?;
        }
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Number of gates of each kind.
    pub fn census(&self) -> BTreeMap<GateKind, usize> {
        let mut out = BTreeMap::new();
        for g in &self.gates {
            *out.entry(g.kind()).or_insert(0) += 1;
        }
        out
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    /// Applies the circuit to `state` in place.
    pub fn apply_in_place(&self, state: &mut [C64]) -> Result<()> {
        if self.width > STATE_QUBIT_LIMIT {
            return Err(Error::TooManyQubits {
                width: self.width,
                limit: STATE_QUBIT_LIMIT,
                what: "state-vector application",
            });
        }
        if state.len() != 1usize << self.width {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for a {}-qubit circuit",
                state.len(),
                self.width
            )));
        }
        let mut scratch = Vec::new();
        for g in &self.gates {
            apply_gate(g, self.width, state, &mut scratch);
        }
        Ok(())
    }
}

/// Returns the circuit applied gate by gate to `v`.
pub fn apply_to_state(c: &Circuit, v: &[C64]) -> Result<Vec<C64>> {
    let mut out = v.to_vec();
    c.apply_in_place(&mut out)?;
    Ok(out)
}

/// Dense unitary of the whole circuit.
pub fn evaluate(c: &Circuit) -> Result<ComplexMatrix> {
    let limit = dense_qubit_limit();
    if c.width > limit {
        return Err(Error::TooManyQubits {
            width: c.width,
            limit,
            what: "dense evaluation",
        });
    }
    columns(c, 1 << c.width, 1 << c.width)
}

/// Top-left `rows × cols` corner of the circuit unitary, built from the first
/// `cols` basis states without materializing the full matrix.
pub fn corner(c: &Circuit, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let dim = 1usize << c.width.min(usize::BITS as usize - 1);
    if rows > dim || cols > dim {
        return Err(Error::DimensionMismatch(format!(
            "{rows}x{cols} corner of a {}-qubit circuit",
            c.width
        )));
    }
    columns(c, rows, cols)
}

fn columns(c: &Circuit, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let entries = rows as u128 * cols as u128;
    if entries > MAX_ENTRIES as u128 {
        return Err(Error::DimensionOverflow {
            requested: entries,
            limit: MAX_ENTRIES,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut state = vec![C64::new(0.0, 0.0); 1 << c.width];
    for j in 0..cols {
        state.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        state[j] = C64::new(1.0, 0.0);
        c.apply_in_place(&mut state)?;
        for (i, z) in state[..rows].iter().enumerate() {
            out.set(i, j, *z);
        }
    }
    Ok(out)
}

fn bit(width: usize, qubit: usize) -> usize {
    1 << (width - 1 - qubit)
}

/// Calls `f(base)` for every index whose bits under `fixed_mask` equal
/// `fixed_value`.
fn for_each_base(len: usize, fixed_mask: usize, fixed_value: usize, mut f: impl FnMut(usize)) {
    let free = (len - 1) & !fixed_mask;
    let mut sub = 0usize;
    loop {
        f(sub | fixed_value);
        if sub == free {
            break;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
}

fn apply_gate(gate: &Gate, width: usize, state: &mut [C64], scratch: &mut Vec<C64>) {
    let len = state.len();
    let (mut ctrl_mask, mut ctrl_value) = (0usize, 0usize);
    for c in gate.controls() {
        let b = bit(width, c.qubit);
        ctrl_mask |= b;
        if c.on_one {
            ctrl_value |= b;
        }
    }
    match gate {
        Gate::Swap { first, second } | Gate::ControlledSwap { first, second, .. } => {
            let (b1, b2) = (bit(width, *first), bit(width, *second));
            // Bases with the first bit set and the second clear pair up with
            // the opposite assignment.
            for_each_base(len, ctrl_mask | b1 | b2, ctrl_value | b1, |i| {
                state.swap(i, i ^ b1 ^ b2);
            });
        }
        Gate::Unitary { targets, matrix }
        | Gate::Controlled {
            targets, matrix, ..
        } => {
            let k = targets.len();
            let block = 1usize << k;
            let offsets: Vec<usize> = (0..block)
                .map(|r| {
                    (0..k)
                        .filter(|&t| (r >> (k - 1 - t)) & 1 == 1)
                        .map(|t| bit(width, targets[t]))
                        .sum()
                })
                .collect();
            let tmask: usize = targets.iter().map(|&t| bit(width, t)).sum();
            scratch.resize(block, C64::new(0.0, 0.0));
            let m = matrix.as_slice();
            for_each_base(len, ctrl_mask | tmask, ctrl_value, |base| {
                for (g, off) in scratch.iter_mut().zip(&offsets) {
                    *g = state[base + off];
                }
                for (r, off) in offsets.iter().enumerate() {
                    let row = &m[r * block..(r + 1) * block];
                    state[base + off] = row.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum();
                }
            });
        }
    }
}
