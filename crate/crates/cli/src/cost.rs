use std::io;

use pltcp::circuit::{cnot_cost, CostRegime, CostReport};

use crate::{write_csv, CliError, CliResult};

/// One CNOT estimate per entry of `s_values`.
pub fn cost_report(
    s_values: &[usize],
    regime: CostRegime,
    eps: Option<f64>,
) -> CliResult<Vec<CostReport>> {
    if s_values.is_empty() {
        return Err(CliError::Invalid("no values of s given".into()));
    }
    Ok(s_values
        .iter()
        .map(|&s| cnot_cost(s, regime, eps))
        .collect::<pltcp::Result<Vec<_>>>()?)
}

pub fn write_costs<W: io::Write>(out: W, reports: &[CostReport]) -> CliResult<()> {
    write_csv(
        out,
        &CostReport::CSV_HEADER,
        reports.iter().map(|r| r.csv_record().to_vec()),
    )
}
