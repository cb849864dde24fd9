use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use prony_dh::classical::prony_solve;
use prony_dh::conditioning::{cn_decimated, cn_full};
use prony_dh::esprit::{esprit_estimate, EspritOptions};
use prony_dh::experiment::{emit_report, run_experiment, ExperimentConfig};
use prony_dh::pipeline::{run_decimated_homotopy, DhDiagnostics, PruningStrategy, SolveOptions};
use prony_dh::polysolve::TrackOptions;
use prony_dh::{Error, MeasurementSequence, MultiplicityVector, PronyParameters};

const EXIT_SOLVER: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "prony-dh", version, about = "Decimated homotopy solver for confluent Prony systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Exhaustive,
    Prefilter,
    Init,
}

impl From<Strategy> for PruningStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Exhaustive => PruningStrategy::Exhaustive,
            Strategy::Prefilter => PruningStrategy::Prefilter,
            Strategy::Init => PruningStrategy::PrefilterInit,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Recover nodes and coefficients with the decimated homotopy algorithm.
    Solve {
        /// JSON file `{"measurements": [[re, im], ...]}`.
        #[arg(long)]
        input: PathBuf,
        /// Multiplicities, e.g. `2,2`.
        #[arg(long)]
        mult: String,
        #[arg(long, value_enum, default_value = "prefilter")]
        strategy: Strategy,
        /// Decimation stride; `floor(N / R)` when omitted.
        #[arg(long)]
        p: Option<usize>,
        /// Initial-guess radius; `1/N` when omitted.
        #[arg(long)]
        eta: Option<f64>,
        /// Initial node guesses, `re,im;re,im;...`.
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
        /// Random seed for the homotopy constant.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output JSON file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded experiment and write results.csv, report.json and curves.csv.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print component-wise condition numbers as JSON.
    Condition {
        /// JSON file `{"nodes": [[re, im], ...], "coefficients": [[[re, im], ...], ...]}`.
        #[arg(long)]
        params: PathBuf,
        /// Measurement count of the full problem.
        #[arg(long = "N")]
        n: Option<usize>,
        /// Stride of the decimated problem.
        #[arg(long)]
        p: Option<usize>,
    },
    /// Classical Prony baseline.
    Prony {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mult: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ESPRIT baseline.
    Esprit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mult: String,
        /// Hankel window length; `floor(N/2)` when omitted.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
struct MeasurementFile {
    measurements: Vec<Complex64>,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    params: Option<&'a PronyParameters>,
    error: Option<String>,
    diagnostics: &'a DhDiagnostics,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_SOLVER };
        Failure { code, message: e.to_string() }
    }
}

fn bad_input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| bad_input(format!("{}: {e}", path.display())))
}

fn read_measurements(path: &Path) -> Result<MeasurementSequence, Failure> {
    let file: MeasurementFile = read_json(path)?;
    Ok(MeasurementSequence::new(file.measurements))
}

fn parse_init(text: &str) -> Result<Vec<Complex64>, Failure> {
    text.split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [re, im] => match (re.parse::<f64>(), im.parse::<f64>()) {
                    (Ok(re), Ok(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(bad_input(format!("bad complex number `{pair}`"))),
                },
                _ => Err(bad_input(format!("expected `re,im`, got `{pair}`"))),
            }
        })
        .collect()
}

fn write_output<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| bad_input(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| bad_input(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { input, mult, strategy, p, eta, init, seed, out } => {
            let meas = read_measurements(&input)?;
            let mult = MultiplicityVector::parse(&mult)?;
            let z_init = init.as_deref().map(parse_init).transpose()?;
            let opts =
                SolveOptions { strategy: strategy.into(), z_init, eta, k_max: None, track: TrackOptions::with_seed(seed), p };
            opts.validate(&mult)?;
            let run = run_decimated_homotopy(&meas, &mult, &opts);
            let output = SolveOutput {
                params: run.result.as_ref().ok(),
                error: run.result.as_ref().err().map(|e| e.to_string()),
                diagnostics: &run.diagnostics,
            };
            write_output(&output, out.as_deref())?;
            run.result.map(|_| ()).map_err(Failure::from)
        }
        Command::Experiment { config, out_dir } => {
            let config: ExperimentConfig = read_json(&config)?;
            let report = run_experiment(&config)?;
            let files = emit_report(&report, &out_dir)?;
            let failed = report.records.iter().filter(|r| r.error.is_some()).count();
            eprintln!(
                "{} rows ({failed} failed) written to {}, {}, {}",
                report.records.len(),
                files.results.display(),
                files.report.display(),
                files.curves.display()
            );
            Ok(())
        }
        Command::Condition { params, n, p } => {
            let params: PronyParameters = read_json(&params)?;
            let reports = match (n, p) {
                (None, None) => return Err(bad_input("give --N, --p or both")),
                (Some(n), None) => vec![cn_full(&params, n)?],
                (None, Some(p)) => vec![cn_decimated(&params, p)?],
                (Some(n), Some(p)) => vec![cn_full(&params, n)?, cn_decimated(&params, p)?],
            };
            if reports.len() == 1 {
                write_output(&reports[0], None)
            } else {
                write_output(&reports, None)
            }
        }
        Command::Prony { input, mult, out } => {
            let meas = read_measurements(&input)?;
            let mult = MultiplicityVector::parse(&mult)?;
            write_output(&prony_solve(&meas, &mult)?, out.as_deref())
        }
        Command::Esprit { input, mult, window, seed, out } => {
            let meas = read_measurements(&input)?;
            let mult = MultiplicityVector::parse(&mult)?;
            let opts = EspritOptions { window, seed, ..EspritOptions::default() };
            write_output(&esprit_estimate(&meas, &mult, &opts)?, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
