//! `qcoh`: coherence analysis of two-qubit polarization states.
//!
//! Exit codes: 0 success, 1 a bound was violated (`bounds` only),
//! 2 parse, validation or domain error, 3 I/O error.

mod report;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qubit_coherence::correlations::{
    audit_bounds, scatter_sample, summarize_scatter, write_scatter_csv, ScatterSummary,
};
use qubit_coherence::pdc::pdc_study;
use qubit_coherence::states::parse_state;
use qubit_coherence::tomography::run_tomography;
use qubit_coherence::{GenerationChannel, Noise, RngSeed, State, TwoQubitState};

use report::AnalysisReport;

const SAMPLING_MEASURE: &str = "populations flat Dirichlet on the simplex; \
    |rho14|, |rho23| uniform on [0, sqrt(rho11 rho44)] and [0, sqrt(rho22 rho33)]; \
    phases uniform; rank-deficient boundary included";

#[derive(Debug, Parser)]
#[command(
    name = "qcoh",
    version,
    about = "Intrinsic coherence of two-qubit states"
)]
struct Cli {
    /// Output style for JSON reports.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One line.
    Json,
    /// Indented.
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Channel {
    Unitary,
    Depolarizing,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coherence, correlation measures and bounds of a state file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Discord versus P2x2 for random X-states, as CSV.
    Scatter {
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = rayon default). Output does not depend on it.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Simulated sixteen-setting coincidence tomography.
    Tomo {
        #[arg(long)]
        input: PathBuf,
        /// Mean counts per setting; omit for exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Coherence transfer from pump to down-converted pair.
    Pdc {
        /// Degree of polarization of the pump.
        #[arg(long = "p2-pump")]
        p2_pump: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Channel::Unitary)]
        channel: Channel,
        /// Depolarizing strength, required with `--channel depolarizing`.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Check every coherence bound; exits 1 if one fails.
    Bounds {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] qubit_coherence::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Serialize)]
struct ScatterOutput<'a> {
    out: &'a Path,
    seed: u64,
    sampling_measure: &'static str,
    #[serde(flatten)]
    summary: ScatterSummary,
}

fn emit<T: Serialize>(value: &T, format: Format) -> Result<(), CliError> {
    let text = match format {
        Format::Json => serde_json::to_string(value),
        Format::Pretty => serde_json::to_string_pretty(value),
    }
    .expect("reports serialize");
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn load_pair(path: &Path) -> Result<TwoQubitState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    match parse_state(&text)? {
        State::Pair(rho) => Ok(rho),
        State::Single(_) => Err(CliError::Usage(format!(
            "{}: expected a two-qubit (4x4) state",
            path.display()
        ))),
    }
}

fn scatter(n: u64, seed: u64, out: &Path, threads: usize, format: Format) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let records = pool.install(|| scatter_sample(n, RngSeed(seed)));
    let file = fs::File::create(out).map_err(|e| CliError::io(out, e))?;
    write_scatter_csv(&records, BufWriter::new(file)).map_err(|e| CliError::io(out, e))?;
    emit(
        &ScatterOutput {
            out,
            seed,
            sampling_measure: SAMPLING_MEASURE,
            summary: summarize_scatter(&records),
        },
        format,
    )
}

fn channel(kind: Channel, q: Option<f64>) -> Result<GenerationChannel, CliError> {
    match (kind, q) {
        (Channel::Unitary, None) => Ok(GenerationChannel::Unitary),
        (Channel::Unitary, Some(_)) => Err(CliError::Usage(
            "--q only applies to --channel depolarizing".into(),
        )),
        (Channel::Depolarizing, Some(q)) => Ok(GenerationChannel::Depolarizing { q }),
        (Channel::Depolarizing, None) => {
            Err(CliError::Usage("--channel depolarizing needs --q".into()))
        }
    }
}

/// Returns whether every checked bound held.
fn run(cli: Cli) -> Result<bool, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Analyze { input } => {
            emit(&AnalysisReport::new(&load_pair(&input)?), format)?;
        }
        Command::Scatter {
            n,
            seed,
            out,
            threads,
        } => scatter(n, seed, &out, threads, format)?,
        Command::Tomo { input, shots, seed } => {
            let rho = load_pair(&input)?;
            let noise = shots.map_or(Noise::Exact, Noise::Shots);
            emit(&run_tomography(&rho, noise, RngSeed(seed))?, format)?;
        }
        Command::Pdc {
            p2_pump,
            seed,
            channel: kind,
            q,
        } => {
            let report = pdc_study(p2_pump, channel(kind, q)?, RngSeed(seed))?;
            emit(&report, format)?;
        }
        Command::Bounds { input } => {
            let audit = audit_bounds(&load_pair(&input)?);
            emit(&audit, format)?;
            return Ok(audit.all_satisfied);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qcoh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
