use crate::numerics::ComplexMatrix;
use crate::{Error, Result};

/// A control on `qubit`, satisfied when the qubit is `|1⟩` (`on_one`) or `|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub on_one: bool,
}

impl Control {
    pub fn new(qubit: usize, on_one: bool) -> Self {
        Self { qubit, on_one }
    }

    /// Controls on `qubits` (most significant first) that select the basis
    /// pattern of `value`.
    pub fn pattern(
        qubits: impl IntoIterator<Item = usize>,
        width: usize,
        value: usize,
    ) -> Vec<Control> {
        qubits
            .into_iter()
            .enumerate()
            .map(|(k, q)| Control::new(q, (value >> (width - 1 - k)) & 1 == 1))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Unitary,
    ControlledUnitary,
    Swap,
    /// Controlled SWAP (Fredkin).
    ControlledSwap,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Unitary => "unitary",
            GateKind::ControlledUnitary => "controlled_unitary",
            GateKind::Swap => "swap",
            GateKind::ControlledSwap => "controlled_swap",
        }
    }
}

/// Gate payloads act on `targets` with `targets[0]` as the most significant
/// bit of the payload index.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Unitary {
        targets: Vec<usize>,
        matrix: ComplexMatrix,
    },
    Controlled {
        controls: Vec<Control>,
        targets: Vec<usize>,
        matrix: ComplexMatrix,
    },
    Swap {
        first: usize,
        second: usize,
    },
    ControlledSwap {
        controls: Vec<Control>,
        first: usize,
        second: usize,
    },
}

impl Gate {
    pub fn unitary(targets: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Gate::Unitary { targets, matrix }
    }

    pub fn controlled(controls: Vec<Control>, targets: Vec<usize>, matrix: ComplexMatrix) -> Self {
        if controls.is_empty() {
            Gate::Unitary { targets, matrix }
        } else {
            Gate::Controlled {
                controls,
                targets,
                matrix,
            }
        }
    }

    pub fn swap(first: usize, second: usize) -> Self {
        Gate::Swap { first, second }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Unitary { .. } => GateKind::Unitary,
            Gate::Controlled { .. } => GateKind::ControlledUnitary,
            Gate::Swap { .. } => GateKind::Swap,
            Gate::ControlledSwap { .. } => GateKind::ControlledSwap,
        }
    }

    pub fn controls(&self) -> &[Control] {
        match self {
            Gate::Controlled { controls, .. } | Gate::ControlledSwap { controls, .. } => controls,
            _ => &[],
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::Unitary { targets, .. } | Gate::Controlled { targets, .. } => targets.clone(),
            Gate::Swap { first, second } | Gate::ControlledSwap { first, second, .. } => {
                vec![*first, *second]
            }
        }
    }

    pub fn payload(&self) -> Option<&ComplexMatrix> {
        match self {
            Gate::Unitary { matrix, .. } | Gate::Controlled { matrix, .. } => Some(matrix),
            _ => None,
        }
    }

    /// The same gate with extra controls prepended.
    pub fn with_controls(&self, extra: &[Control]) -> Gate {
        if extra.is_empty() {
            return self.clone();
        }
        let merge = |existing: &[Control]| -> Vec<Control> {
            extra.iter().chain(existing).copied().collect()
        };
        match self {
            Gate::Unitary { targets, matrix } => Gate::Controlled {
                controls: extra.to_vec(),
                targets: targets.clone(),
                matrix: matrix.clone(),
            },
            Gate::Controlled {
                controls,
                targets,
                matrix,
            } => Gate::Controlled {
                controls: merge(controls),
                targets: targets.clone(),
                matrix: matrix.clone(),
            },
            Gate::Swap { first, second } => Gate::ControlledSwap {
                controls: extra.to_vec(),
                first: *first,
                second: *second,
            },
            Gate::ControlledSwap {
                controls,
                first,
                second,
            } => Gate::ControlledSwap {
                controls: merge(controls),
                first: *first,
                second: *second,
            },
        }
    }

    /// Relabels every qubit `q` as `q + offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        let shift_controls = |cs: &[Control]| -> Vec<Control> {
            cs.iter()
                .map(|c| Control::new(c.qubit + offset, c.on_one))
                .collect()
        };
        match self {
            Gate::Unitary { targets, matrix } => Gate::Unitary {
                targets: targets.iter().map(|t| t + offset).collect(),
                matrix: matrix.clone(),
            },
            Gate::Controlled {
                controls,
                targets,
                matrix,
            } => Gate::Controlled {
                controls: shift_controls(controls),
                targets: targets.iter().map(|t| t + offset).collect(),
                matrix: matrix.clone(),
            },
            Gate::Swap { first, second } => Gate::Swap {
                first: first + offset,
                second: second + offset,
            },
            Gate::ControlledSwap {
                controls,
                first,
                second,
            } => Gate::ControlledSwap {
                controls: shift_controls(controls),
                first: first + offset,
                second: second + offset,
            },
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Unitary { targets, matrix } => Gate::Unitary {
                targets: targets.clone(),
                matrix: matrix.adjoint(),
            },
            Gate::Controlled {
                controls,
                targets,
                matrix,
            } => Gate::Controlled {
                controls: controls.clone(),
                targets: targets.clone(),
                matrix: matrix.adjoint(),
            },
            swap => swap.clone(),
        }
    }

    pub(crate) fn validate(&self, width: usize) -> Result<()> {
        let targets = self.targets();
        if targets.is_empty() {
            return Err(Error::InvalidGate("gate without targets".into()));
        }
        let mut seen = vec![false; width];
        for q in targets
            .iter()
            .copied()
            .chain(self.controls().iter().map(|c| c.qubit))
        {
            if q >= width {
                return Err(Error::InvalidGate(format!(
                    "qubit {q} outside a circuit of width {width}"
                )));
            }
            if seen[q] {
                return Err(Error::InvalidGate(format!("qubit {q} used twice")));
            }
            seen[q] = true;
        }
        if let Some(m) = self.payload() {
            let expected = 1usize << targets.len();
            if m.rows() != expected || m.cols() != expected {
                return Err(Error::InvalidGate(format!(
                    "payload is {}x{} for {} targets",
                    m.rows(),
                    m.cols(),
                    targets.len()
                )));
            }
        }
        Ok(())
    }
}
