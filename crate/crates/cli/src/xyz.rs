//! CP-rank compression of the spin-1 Heisenberg chain.

use std::io;

use pltcp::combine::{synthesize_cp_detailed, SynthesisOptions};
use pltcp::cpd::{cp_to_spec, rank_sweep, tensorize, AlsOptions, CpModel, RankResult};
use pltcp::encoding::leading_block;
use pltcp::models::{embed_padded, xyz_dense};
use pltcp::numerics::{derive_seed, spectral_norm};

use crate::{fmt_float, write_csv, CliError, CliResult};

pub const MIN_SITES: usize = 3;
pub const MAX_SITES: usize = 6;

/// Iteration cap for the sweeps. Just below the exact rank the error keeps
/// creeping down for thousands of sweeps, so the library default of 500
/// stops well above the plateau the sweep is meant to show.
pub const SWEEP_MAX_ITERS: usize = 5000;

pub fn sweep_options() -> AlsOptions {
    AlsOptions {
        max_iters: SWEEP_MAX_ITERS,
        ..AlsOptions::default()
    }
}

/// The ranks `1 ..= 3s − 1`, two past the exact rank `3(s − 1)`.
pub fn default_ranks(s: usize) -> Vec<usize> {
    (1..=3 * s - 1).collect()
}

/// A CP model turned back into a circuit and compared with the padded
/// Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct EndToEnd {
    pub rank: usize,
    pub terms: usize,
    pub cp_rel_error: f64,
    /// `‖H₄ − αÃ‖_F / ‖H₄‖_F` with `H₄` the zero-padded Hamiltonian.
    pub frobenius_rel_error: f64,
    /// The same in spectral norm.
    pub spectral_rel_error: f64,
    pub alpha: f64,
    /// Ancillas of the linear combination alone.
    pub lcu_ancillas: usize,
    pub width: usize,
}

/// Synthesizes `model` for `s` spin-1 sites and measures it densely.
pub fn end_to_end(model: &CpModel, s: usize, cp_rel_error: f64) -> CliResult<EndToEnd> {
    let spec = cp_to_spec(model, &vec![3; s])?;
    let synthesis = synthesize_cp_detailed(&spec, &SynthesisOptions::default())?;
    let be = &synthesis.encoding;
    let mut diff = embed_padded(&xyz_dense(s)?, s)?;
    let (frob, spec_norm) = (diff.frobenius_norm(), spectral_norm(&diff));
    diff.axpy(pltcp::C64::new(-be.alpha(), 0.0), &leading_block(be)?)?;
    Ok(EndToEnd {
        rank: model.rank(),
        terms: spec.num_terms(),
        cp_rel_error,
        frobenius_rel_error: diff.frobenius_norm() / frob,
        spectral_rel_error: spectral_norm(&diff) / spec_norm,
        alpha: be.alpha(),
        lcu_ancillas: synthesis.pair.b(),
        width: be.width(),
    })
}

#[derive(Clone, Debug)]
pub struct XyzSweep {
    pub s: usize,
    pub rows: Vec<RankResult>,
    pub end_to_end: Option<EndToEnd>,
}

/// Rank sweeps of the tensorized `H_XYZ` for every `s` in `s_min ..= s_max`.
///
/// `ranks` holds one list per `s`, or a single list used for all of them.
/// When `synth_rank` is given and swept, the best model at that rank is
/// synthesized and checked end to end.
pub fn run_xyz_cp(
    s_min: usize,
    s_max: usize,
    ranks: &[Vec<usize>],
    restarts: usize,
    seed: u64,
    options: &AlsOptions,
    synth_rank: Option<usize>,
) -> CliResult<Vec<XyzSweep>> {
    if !(MIN_SITES <= s_min && s_min <= s_max && s_max <= MAX_SITES) {
        return Err(CliError::Invalid(format!(
            "need {MIN_SITES} <= s_min <= s_max <= {MAX_SITES}, got {s_min}..{s_max}"
        )));
    }
    let count = s_max - s_min + 1;
    if ranks.len() != 1 && ranks.len() != count {
        return Err(CliError::Invalid(format!(
            "{} rank lists for {count} values of s",
            ranks.len()
        )));
    }
    let mut out = Vec::with_capacity(count);
    for (i, s) in (s_min..=s_max).enumerate() {
        let list = if ranks.len() == 1 {
            &ranks[0]
        } else {
            &ranks[i]
        };
        let t = tensorize(&xyz_dense(s)?, &vec![3; s])?;
        let rows = rank_sweep(&t, list, restarts, derive_seed(seed, &[s as u64]), options)?;
        let end_to_end = match synth_rank.and_then(|r| rows.iter().find(|row| row.rank == r)) {
            Some(row) => Some(end_to_end(&row.model, s, row.best_rel_error)?),
            None => None,
        };
        out.push(XyzSweep {
            s,
            rows,
            end_to_end,
        });
    }
    Ok(out)
}

pub const SWEEP_CSV_HEADER: [&str; 11] = [
    "s",
    "rank",
    "restarts",
    "best_rel_error",
    "iterations_of_best",
    "envelope",
    "over_parameterized",
    "e2e_frobenius_rel_error",
    "e2e_spectral_rel_error",
    "e2e_alpha",
    "e2e_lcu_ancillas",
];

pub fn write_sweeps<W: io::Write>(out: W, sweeps: &[XyzSweep]) -> CliResult<()> {
    let rows = sweeps.iter().flat_map(|sweep| {
        sweep.rows.iter().map(move |row| {
            let e2e = sweep.end_to_end.as_ref().filter(|e| e.rank == row.rank);
            let mut record = vec![
                sweep.s.to_string(),
                row.rank.to_string(),
                row.restarts.to_string(),
                fmt_float(row.best_rel_error),
                row.iterations_of_best.to_string(),
                fmt_float(row.envelope),
                row.over_parameterized.to_string(),
            ];
            match e2e {
                Some(e) => record.extend([
                    fmt_float(e.frobenius_rel_error),
                    fmt_float(e.spectral_rel_error),
                    fmt_float(e.alpha),
                    e.lcu_ancillas.to_string(),
                ]),
                None => record.extend(std::iter::repeat_n(String::new(), 4)),
            }
            record
        })
    });
    write_csv(out, &SWEEP_CSV_HEADER, rows)
}
