//! End-to-end decimated homotopy solver.
//!
//! 1. choose the stride `p` (default `floor(N / R)`),
//! 2. build the Hankel-type system from `n_k = m_{pk}`, `k < R`,
//! 3. solve it by homotopy continuation,
//! 4. pick the node vector among the `p`-th roots of the solutions,
//! 5. fit the coefficients on all measurements.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

use crate::classical::confluent_vandermonde_solve;
use crate::error::{Error, Result};
use crate::esprit::permutations;
use crate::hankelize::build_hankel_system;
use crate::model::{choose_decimation, decimate, MeasurementSequence, MultiplicityVector, PronyParameters};
use crate::polysolve::{solve_system, TrackOptions};
use crate::pruning::{
    aliased_roots_near, default_k_max, select_exhaustive, select_from, select_prefilter, torus_distance,
    CandidateSet, Selection, TORUS_ADJACENCY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruningStrategy {
    /// Residual search over the aliases of every torus-adjacent solution.
    Exhaustive,
    /// Residual search over the aliases of the solution closest to the torus.
    #[default]
    Prefilter,
    /// As `Prefilter`, keeping only aliases within `eta` of an initial guess.
    PrefilterInit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct SolveOptions {
    pub strategy: PruningStrategy,
    pub z_init: Option<Vec<Complex64>>,
    /// Initial-guess radius; `1/N` when absent.
    pub eta: Option<f64>,
    /// Residual summation bound; `d - 1` when absent.
    pub k_max: Option<usize>,
    pub track: TrackOptions,
    /// Stride override.
    pub p: Option<usize>,
}


impl SolveOptions {
    pub fn with_init(z_init: Vec<Complex64>) -> Self {
        Self { strategy: PruningStrategy::PrefilterInit, z_init: Some(z_init), ..Self::default() }
    }

    pub fn validate(&self, mult: &MultiplicityVector) -> Result<()> {
        if self.strategy == PruningStrategy::PrefilterInit {
            match &self.z_init {
                None => return Err(Error::InvalidOptions("initial-guess pruning requires z_init".into())),
                Some(z) if z.len() != mult.s() => {
                    return Err(Error::InvalidOptions(format!("z_init has {} entries, expected {}", z.len(), mult.s())))
                }
                _ => {}
            }
        }
        if self.eta.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::InvalidOptions("eta must be positive".into()));
        }
        if self.p == Some(0) {
            return Err(Error::InvalidOptions("decimation parameter must be positive".into()));
        }
        self.track.validate()
    }
}

/// Bookkeeping of one decimated homotopy run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DhDiagnostics {
    pub p: usize,
    pub bezout_number: usize,
    pub n_solutions: usize,
    pub converged_paths: usize,
    pub diverged_paths: usize,
    pub failed_paths: usize,
    pub torus_adjacent: usize,
    pub candidates: usize,
    pub selection_residual: Option<f64>,
    pub solutions: Vec<Vec<Complex64>>,
    pub t_construct_ms: f64,
    pub t_solve_ms: f64,
    pub t_select_ms: f64,
}

/// Outcome together with whatever diagnostics were gathered before a failure.
#[derive(Debug, Clone)]
pub struct DhRun {
    pub result: Result<PronyParameters>,
    pub diagnostics: DhDiagnostics,
}

pub fn decimated_homotopy(
    meas: &MeasurementSequence,
    mult: &MultiplicityVector,
    opts: &SolveOptions,
) -> Result<(PronyParameters, DhDiagnostics)> {
    let run = run_decimated_homotopy(meas, mult, opts);
    run.result.map(|p| (p, run.diagnostics))
}

pub fn run_decimated_homotopy(meas: &MeasurementSequence, mult: &MultiplicityVector, opts: &SolveOptions) -> DhRun {
    let mut diagnostics = DhDiagnostics::default();
    let result = dh_inner(meas, mult, opts, &mut diagnostics);
    DhRun { result, diagnostics }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn dh_inner(
    meas: &MeasurementSequence,
    mult: &MultiplicityVector,
    opts: &SolveOptions,
    diag: &mut DhDiagnostics,
) -> Result<PronyParameters> {
    opts.validate(mult)?;
    let n = meas.len();
    let r = mult.r();
    let p = match opts.p {
        Some(p) => p,
        None => choose_decimation(n, r)?,
    };
    diag.p = p;

    let start = Instant::now();
    let dec = decimate(meas, p, r)?;
    let system = build_hankel_system(&dec, mult)?;
    diag.t_construct_ms = elapsed_ms(start);

    let start = Instant::now();
    let solutions = solve_system(system.system(), &opts.track);
    diag.t_solve_ms = elapsed_ms(start);
    let solutions = solutions?;
    diag.bezout_number = solutions.bezout_number;
    diag.n_solutions = solutions.len();
    diag.converged_paths = solutions.converged_paths;
    diag.diverged_paths = solutions.diverged_paths;
    diag.failed_paths = solutions.failed_paths;
    diag.solutions = solutions.points();
    diag.torus_adjacent = solutions.solutions.iter().filter(|s| torus_distance(&s.point) <= TORUS_ADJACENCY).count();

    let k_max = opts.k_max.unwrap_or_else(|| default_k_max(mult));
    let start = Instant::now();
    let selection: Result<Selection> = match opts.strategy {
        PruningStrategy::Exhaustive => select_exhaustive(&solutions, p, meas, mult, k_max),
        PruningStrategy::Prefilter => {
            select_prefilter(&solutions, p).and_then(|(_, set)| select_from(&set, meas, mult, k_max))
        }
        PruningStrategy::PrefilterInit => {
            let z_init = opts.z_init.as_deref().expect("validated");
            let eta = opts.eta.unwrap_or(1.0 / n as f64);
            select_prefilter(&solutions, p).and_then(|(u, _)| {
                let set = init_candidates(&u, p, mult, z_init, eta);
                if set.is_empty() {
                    return Err(Error::InitInconsistent);
                }
                select_from(&set, meas, mult, k_max)
            })
        }
    };
    diag.t_select_ms = elapsed_ms(start);
    let selection = selection?;
    diag.candidates = selection.candidates;
    diag.selection_residual = Some(selection.residual);

    let coefficients = confluent_vandermonde_solve(&selection.nodes, mult, meas)?;
    PronyParameters::from_estimate(selection.nodes, coefficients)
}

/// Aliases of `u` near `z_init`. The labelling of `u` is arbitrary among
/// nodes of equal multiplicity, so every relabelling within those classes
/// is matched against the initial guess.
fn init_candidates(
    u: &[Complex64],
    p: usize,
    mult: &MultiplicityVector,
    z_init: &[Complex64],
    eta: f64,
) -> CandidateSet {
    let mut out = CandidateSet::default();
    for order in relabellings(mult) {
        let permuted: Vec<Complex64> = order.iter().map(|&i| u[i]).collect();
        let set = aliased_roots_near(&permuted, p, z_init, eta);
        for c in set.candidates {
            if !out.candidates.iter().any(|o| o.nodes == c.nodes) {
                out.candidates.push(c);
            }
        }
    }
    out
}

/// Index permutations that only exchange nodes of equal multiplicity.
fn relabellings(mult: &MultiplicityVector) -> Vec<Vec<usize>> {
    let parts = mult.parts();
    let idx: Vec<usize> = (0..parts.len()).collect();
    permutations(&idx)
        .into_iter()
        .filter(|perm| perm.iter().enumerate().all(|(j, &i)| parts[i] == parts[j]))
        .collect()
}

/// Largest `|z_j - z'_j|` after the best relabelling of the estimate among
/// nodes of equal multiplicity.
pub fn node_error(truth: &[Complex64], estimate: &[Complex64]) -> f64 {
    if truth.len() != estimate.len() {
        return f64::INFINITY;
    }
    let idx: Vec<usize> = (0..truth.len()).collect();
    permutations(&idx)
        .into_iter()
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(j, &i)| (truth[j] - estimate[i]).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random clustered test instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub multiplicities: MultiplicityVector,
    pub delta_min: f64,
    pub delta_max: f64,
}

/// Nodes equally spaced by `delta ~ U[delta_min, delta_max]` around a center
/// angle uniform on `[0, 2 pi)`; coefficients `r e^{i phi}` with
/// `r ~ U[0.5, 1.5]`, `phi ~ U[0, 2 pi)`. Returns the instance and `delta`.
pub fn generate_instance(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<(PronyParameters, f64)> {
    if !(spec.delta_min > 0.0 && spec.delta_min <= spec.delta_max) {
        return Err(Error::InvalidOptions("need 0 < delta_min <= delta_max".into()));
    }
    let s = spec.multiplicities.s();
    if (s as f64 - 1.0) * spec.delta_max >= 2.0 * PI {
        return Err(Error::InvalidOptions("separation too large for the node count".into()));
    }
    let delta = if spec.delta_min == spec.delta_max { spec.delta_min } else { rng.random_range(spec.delta_min..spec.delta_max) };
    let center = rng.random_range(0.0..2.0 * PI);
    let nodes: Vec<Complex64> = (0..s)
        .map(|j| Complex64::from_polar(1.0, center + (j as f64 - (s as f64 - 1.0) / 2.0) * delta))
        .collect();
    let coefficients = spec
        .multiplicities
        .parts()
        .iter()
        .map(|&dj| {
            (0..dj)
                .map(|_| Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..2.0 * PI)))
                .collect()
        })
        .collect();
    Ok((PronyParameters::new(nodes, coefficients)?, delta))
}
