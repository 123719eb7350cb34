use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pltcp::circuit::CostRegime;
use pltcp::cpd::AlsOptions;
use pltcp_cli::noise::{run_tfim_noise, write_trials, NoiseScenario, ScenarioKind};
use pltcp_cli::xyz::{default_ranks, run_xyz_cp, write_sweeps, SWEEP_MAX_ITERS};
use pltcp_cli::{cost, synth, CliError, CliResult};

/// Block-encoding synthesis experiments. All output is CSV.
#[derive(Parser)]
#[command(name = "pltcp", version)]
struct Cli {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a CP-like spec from a JSON file and summarize the encoding.
    Synth {
        spec: PathBuf,
        /// Evaluate the leading block and measure the encoding error.
        #[arg(long)]
        verify: bool,
    },
    /// Coherent gate noise on the transverse-field Ising encoding.
    TfimNoise {
        #[arg(long, default_value_t = 2)]
        s_min: usize,
        #[arg(long, default_value_t = 10)]
        s_max: usize,
        #[arg(long, default_value_t = 2.0)]
        h: f64,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// pauli, prep or both
        #[arg(long, default_value = "both")]
        scenario: String,
    },
    /// CP-rank sweeps of the spin-1 Heisenberg chain.
    XyzCp {
        /// Number of spins; may be repeated.
        #[arg(long, required = true, num_args = 1..)]
        s: Vec<usize>,
        /// Ranks such as "1-8" or "7,9"; defaults to 1 through 3s-1.
        #[arg(long)]
        ranks: Option<String>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SWEEP_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Synthesize the best model at this rank and measure it densely.
        #[arg(long)]
        synth_rank: Option<usize>,
    },
    /// CNOT cost estimates.
    Cost {
        #[arg(long, required = true, num_args = 1..)]
        s: Vec<usize>,
        /// exact or approx
        #[arg(long, default_value = "exact")]
        regime: String,
        /// Synthesis accuracy for the approximate regime.
        #[arg(long)]
        eps: Option<f64>,
    },
}

fn parse_ranks(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Invalid(format!("cannot parse ranks {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> CliResult<()> {
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.command {
        Command::Synth { spec, verify } => {
            let spec = synth::read_spec(&spec)?;
            synth::write_summary(&mut out, &synth::synth(&spec, verify)?)?;
        }
        Command::TfimNoise {
            s_min,
            s_max,
            h,
            eta,
            trials,
            seed,
            scenario,
        } => {
            let kind: ScenarioKind = scenario.parse()?;
            let scenario = NoiseScenario::new(kind, eta, trials, seed)?;
            write_trials(&mut out, &run_tfim_noise(s_min, s_max, h, &scenario)?)?;
        }
        Command::XyzCp {
            s,
            ranks,
            restarts,
            seed,
            max_iters,
            tol,
            synth_rank,
        } => {
            let options = AlsOptions { max_iters, tol };
            let fixed = ranks.as_deref().map(parse_ranks).transpose()?;
            let mut sweeps = Vec::new();
            for &sites in &s {
                let list = fixed.clone().unwrap_or_else(|| default_ranks(sites));
                sweeps.extend(run_xyz_cp(
                    sites,
                    sites,
                    &[list],
                    restarts,
                    seed,
                    &options,
                    synth_rank,
                )?);
            }
            write_sweeps(&mut out, &sweeps)?;
        }
        Command::Cost { s, regime, eps } => {
            let regime: CostRegime = regime.parse()?;
            cost::write_costs(&mut out, &cost::cost_report(&s, regime, eps)?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
