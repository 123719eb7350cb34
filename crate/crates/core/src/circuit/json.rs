use serde::{Deserialize, Serialize};

use super::{Circuit, Control, Gate};
use crate::numerics::ComplexMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateJson {
    pub kind: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<(usize, u8)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitJson {
    pub width: usize,
    pub gates: Vec<GateJson>,
}

impl From<&Gate> for GateJson {
    fn from(g: &Gate) -> Self {
        GateJson {
            kind: g.kind().as_str().to_string(),
            targets: g.targets(),
            controls: g
                .controls()
                .iter()
                .map(|c| (c.qubit, u8::from(c.on_one)))
                .collect(),
            payload: g.payload().cloned(),
        }
    }
}

impl TryFrom<GateJson> for Gate {
    type Error = Error;

    fn try_from(g: GateJson) -> Result<Gate> {
        let controls = g
            .controls
            .iter()
            .map(|&(q, pol)| match pol {
                0 | 1 => Ok(Control::new(q, pol == 1)),
                _ => Err(Error::InvalidGate(format!("control polarity {pol}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let pair = |targets: &[usize]| match targets {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::InvalidGate("swap needs exactly two targets".into())),
        };
        let payload = || {
            g.payload
                .clone()
                .ok_or_else(|| Error::InvalidGate(format!("{} gate without payload", g.kind)))
        };
        let no_controls = |kind: &str| {
            if controls.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidGate(format!("{kind} gate with controls")))
            }
        };
        match g.kind.as_str() {
            "unitary" => {
                no_controls("unitary")?;
                Ok(Gate::Unitary {
                    targets: g.targets.clone(),
                    matrix: payload()?,
                })
            }
            "controlled_unitary" => Ok(Gate::Controlled {
                controls: controls.clone(),
                targets: g.targets.clone(),
                matrix: payload()?,
            }),
            "swap" => {
                no_controls("swap")?;
                let (first, second) = pair(&g.targets)?;
                Ok(Gate::Swap { first, second })
            }
            "controlled_swap" => {
                let (first, second) = pair(&g.targets)?;
                Ok(Gate::ControlledSwap {
                    controls: controls.clone(),
                    first,
                    second,
                })
            }
            other => Err(Error::InvalidGate(format!("unknown gate kind {other:?}"))),
        }
    }
}

impl From<Circuit> for CircuitJson {
    fn from(c: Circuit) -> Self {
        CircuitJson {
            width: c.width,
            gates: c.gates.iter().map(GateJson::from).collect(),
        }
    }
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(c: CircuitJson) -> Result<Circuit> {
        let gates = c
            .gates
            .into_iter()
            .map(Gate::try_from)
            .collect::<Result<Vec<_>>>()?;
        Circuit::from_gates(c.width, gates)
    }
}
