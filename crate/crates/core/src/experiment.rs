//! Seeded experiment harness comparing the decimated homotopy solver with the
//! ESPRIT and classical Prony baselines, plus CSV/JSON report output.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::classical::prony_solve;
use crate::conditioning::{cn_decimated, cn_full, coefficient_perturbation_bound, kappa_sensitivity};
use crate::error::{Error, Result};
use crate::esprit::{esprit_estimate, EspritOptions};
use crate::hankelize::build_hankel_system;
use crate::model::{
    add_noise, choose_decimation, decimate, forward_map, scale_map, MeasurementSequence, MultiplicityVector, NoiseKind,
    NoiseSpec, PronyParameters,
};
use crate::pipeline::{generate_instance, node_error, run_decimated_homotopy, InstanceSpec, PruningStrategy, SolveOptions};
use crate::polysolve::TrackOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dh,
    Esprit,
    Prony,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dh => "dh",
            Method::Esprit => "esprit",
            Method::Prony => "prony",
        }
    }
}

fn default_methods() -> Vec<Method> {
    vec![Method::Dh, Method::Esprit]
}

fn default_strategy() -> PruningStrategy {
    PruningStrategy::PrefilterInit
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::none()
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub multiplicities: MultiplicityVector,
    #[serde(alias = "N")]
    pub n: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Strides to sweep; `[floor(N / R)]` when empty.
    #[serde(default)]
    pub p_values: Vec<usize>,
    /// Noise kind and level; the per-trial noise seed is derived from `seed`.
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Pruning strategy of the decimated homotopy runs. Initial-guess pruning
    /// uses the true nodes as the guess.
    #[serde(default = "default_strategy")]
    pub strategy: PruningStrategy,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub esprit_window: Option<usize>,
    /// Whether to compute condition numbers and sensitivities per row.
    #[serde(default = "yes")]
    pub conditioning: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let r = self.multiplicities.r();
        if self.trials == 0 {
            return Err(Error::InvalidOptions("trial count must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidOptions("no methods selected".into()));
        }
        let p_max = choose_decimation(self.n, r)?;
        if let Some(p) = self.p_values.iter().find(|&&p| p == 0 || p > p_max) {
            return Err(Error::InvalidOptions(format!("stride {p} outside 1..={p_max}")));
        }
        if !(self.noise.level >= 0.0 && self.noise.level.is_finite()) {
            return Err(Error::InvalidOptions("noise level must be finite and nonnegative".into()));
        }
        if !(self.delta_min > 0.0 && self.delta_min <= self.delta_max) {
            return Err(Error::InvalidOptions("need 0 < delta_min <= delta_max".into()));
        }
        Ok(())
    }

    pub fn strides(&self) -> Vec<usize> {
        if self.p_values.is_empty() {
            vec![self.n / self.multiplicities.r()]
        } else {
            self.p_values.clone()
        }
    }
}

/// Seed of trial `index` derived from the master seed.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialInstance {
    pub trial: usize,
    pub seed: u64,
    pub delta: f64,
    pub params: PronyParameters,
}

/// One (trial, stride, method) row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: Method,
    pub seed: u64,
    pub n: usize,
    pub delta: f64,
    pub p: usize,
    pub node_err: Option<f64>,
    /// Largest node condition number of the full problem.
    pub cn_full: Option<f64>,
    /// Largest node condition number of the problem decimated by `p`.
    pub cn_dec: Option<f64>,
    /// Largest linearized sensitivity of the decimated system at the truth.
    pub kappa: Option<f64>,
    pub t_construct_ms: f64,
    pub t_solve_ms: f64,
    pub t_select_ms: f64,
    pub n_solutions: Option<usize>,
    pub estimate: Option<Vec<Complex64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub instances: Vec<TrialInstance>,
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    /// Node errors of one method at one stride, in trial order (failed runs skipped).
    pub fn errors(&self, method: Method, p: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.method == method && r.p == p)
            .filter_map(|r| r.node_err)
            .collect()
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

struct MethodOutcome {
    estimate: Result<PronyParameters>,
    elapsed_ms: f64,
}

fn run_baseline(method: Method, meas: &MeasurementSequence, mult: &MultiplicityVector, config: &ExperimentConfig, seed: u64) -> MethodOutcome {
    let start = Instant::now();
    let estimate = match method {
        Method::Esprit => {
            let opts = EspritOptions { window: config.esprit_window, seed, ..EspritOptions::default() };
            esprit_estimate(meas, mult, &opts)
        }
        Method::Prony => prony_solve(meas, mult),
        Method::Dh => unreachable!("not a baseline"),
    };
    MethodOutcome { estimate, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 }
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<(TrialInstance, Vec<TrialRecord>)> {
    let mult = &config.multiplicities;
    let seed = trial_seed(config.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = InstanceSpec { multiplicities: mult.clone(), delta_min: config.delta_min, delta_max: config.delta_max };
    let (params, delta) = generate_instance(&spec, &mut rng)?;
    let noise = NoiseSpec { seed: rng.random(), ..config.noise };
    let meas = add_noise(&forward_map(&params, config.n), &noise);
    let epsilon = if noise.kind == NoiseKind::None { 0.0 } else { noise.level };

    let cn_full_value = if config.conditioning {
        cn_full(&params, config.n).ok().and_then(|r| finite(r.max_node_value()))
    } else {
        None
    };
    // Baselines do not depend on the stride; run them once per trial.
    let baselines: Vec<(Method, MethodOutcome)> = config
        .methods
        .iter()
        .filter(|m| **m != Method::Dh)
        .map(|&m| (m, run_baseline(m, &meas, mult, config, seed)))
        .collect();

    let mut records = Vec::new();
    for p in config.strides() {
        let (cn_dec, kappa) = if config.conditioning { stride_diagnostics(&params, &meas, p, epsilon) } else { (None, None) };
        let base = TrialRecord {
            trial,
            method: Method::Dh,
            seed,
            n: config.n,
            delta,
            p,
            node_err: None,
            cn_full: cn_full_value,
            cn_dec,
            kappa,
            t_construct_ms: 0.0,
            t_solve_ms: 0.0,
            t_select_ms: 0.0,
            n_solutions: None,
            estimate: None,
            error: None,
        };
        for &method in &config.methods {
            let mut rec = TrialRecord { method, ..base.clone() };
            let estimate = if method == Method::Dh {
                let opts = SolveOptions {
                    strategy: config.strategy,
                    z_init: (config.strategy == PruningStrategy::PrefilterInit).then(|| params.nodes().to_vec()),
                    eta: config.eta,
                    k_max: None,
                    track: TrackOptions::with_seed(seed),
                    p: Some(p),
                };
                let run = run_decimated_homotopy(&meas, mult, &opts);
                rec.t_construct_ms = run.diagnostics.t_construct_ms;
                rec.t_solve_ms = run.diagnostics.t_solve_ms;
                rec.t_select_ms = run.diagnostics.t_select_ms;
                rec.n_solutions = (run.diagnostics.bezout_number > 0).then_some(run.diagnostics.n_solutions);
                run.result
            } else {
                let (_, outcome) = baselines.iter().find(|(m, _)| *m == method).expect("baseline computed");
                rec.t_solve_ms = outcome.elapsed_ms;
                outcome.estimate.clone()
            };
            match estimate {
                Ok(est) => {
                    rec.node_err = finite(node_error(params.nodes(), est.nodes()));
                    rec.estimate = Some(est.nodes().to_vec());
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            records.push(rec);
        }
    }
    Ok((TrialInstance { trial, seed, delta, params }, records))
}

/// Decimated condition number and system sensitivity at stride `p`.
fn stride_diagnostics(params: &PronyParameters, meas: &MeasurementSequence, p: usize, epsilon: f64) -> (Option<f64>, Option<f64>) {
    let cn_dec = cn_decimated(params, p).ok().and_then(|r| finite(r.max_node_value()));
    let mult = params.multiplicities();
    let kappa = (|| {
        let scaled = scale_map(params, p).ok()?;
        let system = build_hankel_system(&decimate(meas, p, mult.r()).ok()?, mult).ok()?;
        let bound = coefficient_perturbation_bound(&system, epsilon);
        let k = kappa_sensitivity(&system, scaled.nodes(), bound).ok()?;
        finite(k.into_iter().fold(0.0, f64::max))
    })();
    (cn_dec, kappa)
}

/// Runs all trials (concurrently) and assembles the report in trial order.
/// A failing trial setup aborts the run; solver failures are recorded per row.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let trials: Vec<(TrialInstance, Vec<TrialRecord>)> =
        (0..config.trials).into_par_iter().map(|t| run_trial(config, t)).collect::<Result<_>>()?;
    let mut instances = Vec::with_capacity(trials.len());
    let mut records = Vec::new();
    for (inst, recs) in trials {
        instances.push(inst);
        records.extend(recs);
    }
    Ok(ExperimentReport { config: config.clone(), instances, records })
}

pub const CSV_HEADER: [&str; 15] = [
    "trial", "method", "seed", "N", "delta", "p", "node_err", "cn_full", "cn_dec", "kappa", "t_construct_ms",
    "t_solve_ms", "t_select_ms", "n_solutions", "error",
];

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per (trial, method, stride).
pub fn write_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| io_err(path, e))?;
    for r in &report.records {
        w.write_record([
            r.trial.to_string(),
            r.method.name().to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.delta.to_string(),
            r.p.to_string(),
            opt(r.node_err),
            opt(r.cn_full),
            opt(r.cn_dec),
            opt(r.kappa),
            r.t_construct_ms.to_string(),
            r.t_solve_ms.to_string(),
            r.t_select_ms.to_string(),
            opt(r.n_solutions),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Long format `trial,p,series,value` with per-method errors and the
/// conditioning curves.
pub fn write_curves(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(["trial", "p", "series", "value"]).map_err(|e| io_err(path, e))?;
    let mut last_diag: Option<(usize, usize)> = None;
    for r in &report.records {
        let mut rows: Vec<(String, f64)> = Vec::new();
        if let Some(e) = r.node_err {
            rows.push((format!("{}_node_err", r.method.name()), e));
        }
        if last_diag != Some((r.trial, r.p)) {
            last_diag = Some((r.trial, r.p));
            for (name, v) in [("cn_full", r.cn_full), ("cn_dec", r.cn_dec), ("kappa", r.kappa)] {
                if let Some(v) = v {
                    rows.push((name.to_string(), v));
                }
            }
        }
        for (series, value) in rows {
            w.write_record([r.trial.to_string(), r.p.to_string(), series, value.to_string()])
                .map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json(report: &ExperimentReport, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_json(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub results: PathBuf,
    pub report: PathBuf,
    pub curves: PathBuf,
}

/// Writes `results.csv`, `report.json` and `curves.csv` into `dir`.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let files = ReportFiles {
        results: dir.join("results.csv"),
        report: dir.join("report.json"),
        curves: dir.join("curves.csv"),
    };
    write_csv(report, &files.results)?;
    write_json(report, &files.report)?;
    write_curves(report, &files.curves)?;
    Ok(files)
}
