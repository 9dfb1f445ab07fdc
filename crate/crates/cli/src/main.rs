//! `sepgeo`: separability thresholds, local-measurement entanglement and
//! Hilbert-Schmidt ball checks from the command line.
//!
//! Exit codes: 0 success, 2 usage or unreadable input, 3 domain error,
//! 4 I/O failure while writing results.

mod render;
mod state_spec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use sepgeo::geometry::{absolute_sep_radius, ball_radius};
use sepgeo::measurement::{measurement_sweep, sweep_records, write_sweep_csv};
use sepgeo::separability::{
    default_orientation, entanglement_measure, in_absolute_sep_ball, ppt_check, ppt_min_eigenvalue,
    ppt_scope, werner_threshold,
};
use sepgeo::{hs_distance, Bipartition, ComplexMatrix, DensityMatrix, Error};

use render::{render, OutputFormat};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Dimension(_)
            | Error::InvalidPartition(_)
            | Error::Size(_)
            | Error::Range(_)
            | Error::Format(_) => CliError::usage(e.to_string()),
            _ => CliError::domain(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sepgeo",
    version,
    about = "Separability geometry of qudit states"
)]
struct Cli {
    /// Output format for the result record.
    #[arg(long, value_enum, global = true, default_value = "json")]
    output: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Werner separability threshold and absolutely-separable ball radius.
    Threshold {
        /// Number of qudits (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=64))]
        n: u32,
        /// Local dimension (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=1024))]
        d: u32,
    },
    /// Entanglement of a pure state under a local rank-1 measurement.
    Measure {
        #[command(flatten)]
        target: Target,
        /// Haar samples for the sampled q_min oracle.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        seed: Seed,
    },
    /// Projects the measured party onto Haar-random targets and writes one CSV row per sample.
    Sweep {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        seed: Seed,
        /// CSV destination.
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance from the maximally mixed state and membership in the absolutely separable ball.
    Ball {
        #[arg(long)]
        state: String,
    },
    /// Positive-partial-transpose test across a bipartition.
    Ppt {
        #[command(flatten)]
        target: Target,
    },
    /// Checks that a state is a valid density matrix.
    Validate {
        #[arg(long)]
        state: String,
    },
}

#[derive(Args)]
struct Target {
    /// Builtin (w, ghz:N, maxent:N:D, werner:N:D:P, product:N:D, classical:N:D, mixed:N:D) or a JSON file.
    #[arg(long)]
    state: String,
    /// Measured subsystems, comma separated. Defaults to the smaller side of {0} | rest.
    #[arg(long, value_delimiter = ',')]
    party: Option<Vec<usize>>,
}

#[derive(Args)]
struct Seed {
    #[arg(long, env = "SEPGEO_SEED", default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let record = match &cli.command {
        Command::Threshold { n, d } => threshold(*n as usize, *d as usize),
        Command::Measure {
            target,
            samples,
            seed,
        } => measure(target, *samples, seed.seed)?,
        Command::Sweep {
            target,
            samples,
            seed,
            out,
        } => sweep(target, *samples, seed.seed, out)?,
        Command::Ball { state } => ball(state)?,
        Command::Ppt { target } => ppt(target)?,
        Command::Validate { state } => validate(state)?,
    };
    Ok(render(&record, cli.output))
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are JSON objects"),
    }
}

fn threshold(n: usize, d: usize) -> Map<String, Value> {
    object(json!({
        "n": n,
        "d": d,
        "threshold_p": werner_threshold(n, d),
        "absolute_sep_radius": absolute_sep_radius(n, d),
    }))
}

fn resolve(target: &Target) -> Result<(DensityMatrix, Bipartition), CliError> {
    let rho = state_spec::load_state(&target.state)?;
    let n = rho.dims().len();
    if n < 2 {
        return Err(CliError::domain(
            "separability needs at least two subsystems",
        ));
    }
    let part = match &target.party {
        Some(measured) => Bipartition::new(measured, n)?,
        None => default_orientation(rho.dims(), &Bipartition::new(&[0], n)?),
    };
    Ok((rho, part))
}

fn measure(target: &Target, samples: usize, seed: u64) -> Result<Map<String, Value>, CliError> {
    let (sigma, part) = resolve(target)?;
    if !sigma.is_pure() {
        return Err(CliError::domain(format!(
            "measure requires a pure state (purity {})",
            sigma.purity()
        )));
    }
    let report = entanglement_measure(&sigma, &part)?.with_oracles(&sigma, &part, samples, seed)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    Ok(object(value))
}

fn sweep(
    target: &Target,
    samples: usize,
    seed: u64,
    out: &PathBuf,
) -> Result<Map<String, Value>, CliError> {
    let (rho, part) = resolve(target)?;
    let outcomes = measurement_sweep(&rho, &part, samples, seed)?;
    let records = sweep_records(&outcomes)?;

    let file = File::create(out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
    let mut writer = BufWriter::new(file);
    write_sweep_csv(&mut writer, &records)
        .and_then(|_| writer.flush())
        .map_err(|e| CliError::io(format!("writing {}: {e}", out.display())))?;

    let probs: Vec<f64> = records.iter().map(|r| r.probability).collect();
    let dists: Vec<f64> = records
        .iter()
        .filter_map(|r| r.distance_from_center)
        .collect();
    let (p_min, p_max, p_mean) = stats(&probs);
    let mut summary = object(json!({
        "samples": samples,
        "seed": seed,
        "measured_party": part.measured(),
        "out": out.display().to_string(),
        "zero_probability_outcomes": probs.len() - dists.len(),
        "probability_min": p_min,
        "probability_max": p_max,
        "probability_mean": p_mean,
    }));
    if !dists.is_empty() {
        let (d_min, d_max, d_mean) = stats(&dists);
        summary.insert("distance_min".into(), json!(d_min));
        summary.insert("distance_max".into(), json!(d_max));
        summary.insert("distance_mean".into(), json!(d_mean));
        summary.insert("distance_spread".into(), json!(d_max - d_min));
    }
    Ok(summary)
}

fn stats(xs: &[f64]) -> (f64, f64, f64) {
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (min, max, mean)
}

fn ball(state: &str) -> Result<Map<String, Value>, CliError> {
    let rho = state_spec::load_state(state)?;
    let n = rho.dims().len();
    if n < 2 {
        return Err(CliError::domain(
            "separability needs at least two subsystems",
        ));
    }
    let d = rho.dims().uniform_local_dim().ok_or_else(|| {
        CliError::domain("the absolutely separable ball is defined for equal local dimensions")
    })?;
    let order = rho.order();
    let distance = hs_distance(rho.matrix(), &ComplexMatrix::maximally_mixed(order))?;
    Ok(object(json!({
        "n": n,
        "d": d,
        "distance": distance,
        "ball_radius": ball_radius(order),
        "radius": absolute_sep_radius(n, d),
        "inside": in_absolute_sep_ball(&rho, n, d)?,
    })))
}

fn ppt(target: &Target) -> Result<Map<String, Value>, CliError> {
    let (rho, part) = resolve(target)?;
    Ok(object(json!({
        "ppt": ppt_check(&rho, &part)?,
        "ppt_scope": ppt_scope(rho.dims(), &part).label(),
        "min_eigenvalue": ppt_min_eigenvalue(&rho, &part)?,
        "measured_party": part.measured(),
    })))
}

fn validate(state: &str) -> Result<Map<String, Value>, CliError> {
    let rho = state_spec::load_state(state)?;
    let eig = rho.eigenvalues();
    Ok(object(json!({
        "valid": true,
        "order": rho.order(),
        "dims": rho.dims().as_slice(),
        "trace": rho.matrix().trace().re,
        "min_eigenvalue": eig[0],
        "purity": rho.purity(),
        "pure": rho.is_pure(),
    })))
}
