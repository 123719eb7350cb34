//! Leading-order CNOT counts for a CP-structured operator with `s` terms, each
//! a Kronecker product of `s` single-qubit matrices.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CostRegime {
    /// Select-oracle controls compiled exactly.
    Exact,
    /// Select-oracle controls compiled to accuracy `eps_synthesis`.
    Approximate,
}

impl fmt::Display for CostRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostRegime::Exact => "exact",
            CostRegime::Approximate => "approximate",
        })
    }
}

impl FromStr for CostRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CostRegime::Exact),
            "approx" | "approximate" => Ok(CostRegime::Approximate),
            other => Err(Error::InvalidParameter(format!(
                "unknown cost regime {other:?}"
            ))),
        }
    }
}

/// Real-valued leading-order estimates, not integer gate counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub s: usize,
    pub regime: CostRegime,
    pub eps_synthesis: Option<f64>,
    pub state_prep_cnots: f64,
    pub swap_cnots: f64,
    pub select_oracle_cnots: f64,
    pub total: f64,
}

impl CostReport {
    pub const CSV_HEADER: [&'static str; 6] =
        ["s", "regime", "state_prep", "swap", "select", "total"];

    pub fn csv_record(&self) -> [String; 6] {
        [
            self.s.to_string(),
            self.regime.to_string(),
            format!("{:.16e}", self.state_prep_cnots),
            format!("{:.16e}", self.swap_cnots),
            format!("{:.16e}", self.select_oracle_cnots),
            format!("{:.16e}", self.total),
        ]
    }
}

/// CNOT estimate per part of the circuit. Logarithms are base 2. State
/// preparation costs `(23/24)·s` in both regimes.
pub fn cnot_cost(s: usize, regime: CostRegime, eps_synthesis: Option<f64>) -> Result<CostReport> {
    if s < 2 {
        return Err(Error::InvalidParameter(format!(
            "cost model needs s >= 2, got {s}"
        )));
    }
    let sf = s as f64;
    let log_s = sf.log2();
    let select = match (regime, eps_synthesis) {
        (CostRegime::Exact, None) => 11.0 * sf * sf * log_s * log_s,
        (CostRegime::Approximate, Some(eps)) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "synthesis accuracy must lie in (0, 1), got {eps}"
                )));
            }
            11.0 * sf * sf * log_s * (1.0 / eps).log2()
        }
        (CostRegime::Exact, Some(_)) => {
            return Err(Error::InvalidParameter(
                "synthesis accuracy only applies to the approximate regime".into(),
            ))
        }
        (CostRegime::Approximate, None) => {
            return Err(Error::InvalidParameter(
                "approximate regime needs a synthesis accuracy".into(),
            ))
        }
    };
    let state_prep = 23.0 / 24.0 * sf;
    let swap = 6.0 * sf;
    Ok(CostReport {
        s,
        regime,
        eps_synthesis,
        state_prep_cnots: state_prep,
        swap_cnots: swap,
        select_oracle_cnots: select,
        total: state_prep + swap + select,
    })
}
