//! Experiment harness behind the `pltcp` binary: noise studies on the
//! transverse-field Ising model, CP-rank compression of the spin-1 Heisenberg
//! chain, CNOT cost tables and synthesis of CP-like specs from JSON.
//!
//! Every experiment returns plain records; the `write_*` helpers turn them
//! into CSV with floats printed to 17 significant digits.

pub mod cost;
pub mod noise;
pub mod synth;
pub mod xyz;

use std::io;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pltcp::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("{0}")]
    Invalid(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and rows as CSV.
pub fn write_csv<W: io::Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
