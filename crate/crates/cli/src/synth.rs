use std::io;
use std::path::Path;

use pltcp::circuit::dense_qubit_limit;
use pltcp::combine::{synthesize_cp_detailed, CpLikeSpec, SynthesisOptions};
use pltcp::encoding::encoding_error;

use crate::{fmt_float, write_csv, CliError, CliResult};

/// Parameters of a synthesized spec and, when verified, its measured error.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthSummary {
    pub terms: usize,
    pub alpha: f64,
    pub a: usize,
    /// Ancillas of the linear combination, included in `a`.
    pub b: usize,
    pub s: usize,
    pub eps: f64,
    pub gates: usize,
    pub shared_swaps: bool,
    /// `‖A − αÃ‖₂` against the spec's dense operator.
    pub measured_error: Option<f64>,
}

/// Parses a spec; errors carry the line and column of the problem.
pub fn parse_spec(text: &str) -> CliResult<CpLikeSpec> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("invalid spec: {e}")))
}

pub fn read_spec(path: &Path) -> CliResult<CpLikeSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Synthesizes `spec`; with `verify` the leading block is evaluated and
/// compared with the dense operator, provided the circuit fits under the
/// dense-evaluation limit.
pub fn synth(spec: &CpLikeSpec, verify: bool) -> CliResult<SynthSummary> {
    let synthesis = synthesize_cp_detailed(spec, &SynthesisOptions::default())?;
    let be = &synthesis.encoding;
    let measured_error = if verify {
        let limit = dense_qubit_limit();
        if be.width() > limit {
            return Err(CliError::Invalid(format!(
                "{} qubits exceeds the dense verification limit of {limit}; raise PLTCP_MAX_QUBITS to force it",
                be.width()
            )));
        }
        Some(encoding_error(be, &spec.dense()?)?)
    } else {
        None
    };
    let gates = be.unitary().to_circuit()?.len();
    Ok(SynthSummary {
        terms: spec.num_terms(),
        alpha: be.alpha(),
        a: be.a(),
        b: synthesis.pair.b(),
        s: be.s(),
        eps: be.eps(),
        gates,
        shared_swaps: synthesis.shared_swaps,
        measured_error,
    })
}

pub const SYNTH_CSV_HEADER: [&str; 9] = [
    "terms",
    "alpha",
    "a",
    "b",
    "s",
    "eps",
    "gates",
    "shared_swaps",
    "measured_error",
];

pub fn write_summary<W: io::Write>(out: W, summary: &SynthSummary) -> CliResult<()> {
    let row = vec![
        summary.terms.to_string(),
        fmt_float(summary.alpha),
        summary.a.to_string(),
        summary.b.to_string(),
        summary.s.to_string(),
        fmt_float(summary.eps),
        summary.gates.to_string(),
        summary.shared_swaps.to_string(),
        summary.measured_error.map(fmt_float).unwrap_or_default(),
    ];
    write_csv(out, &SYNTH_CSV_HEADER, [row])
}
