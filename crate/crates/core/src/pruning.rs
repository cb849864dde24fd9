//! Resolving the aliasing introduced by decimation.
//!
//! Each solution `u` of the decimated system only determines the nodes up to
//! a choice of `p`-th root per coordinate. Candidates are ranked by how well
//! their Prony polynomial annihilates the undecimated measurements.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::classical::circle_roots;
use crate::error::{Error, Result};
use crate::hankelize::prony_polynomial;
use crate::model::{project_to_circle, MeasurementSequence, MultiplicityVector};
use crate::polysolve::{lex_cmp, SolutionSet};

/// Solutions with a coordinate farther than this from the unit circle are
/// not considered for root extraction.
pub const TORUS_ADJACENCY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub nodes: Vec<Complex64>,
    /// Index of the originating solution.
    pub source: usize,
    /// Chosen root branch `m` per coordinate, `z = exp(i (arg u + 2 pi m) / p)`.
    pub branches: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// The chosen candidate and its residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub nodes: Vec<Complex64>,
    pub residual: f64,
    /// Number of candidates whose residual was evaluated.
    pub candidates: usize,
}

/// Largest deviation of a coordinate modulus from 1.
pub fn torus_distance(u: &[Complex64]) -> f64 {
    u.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// All `p^s` coordinate-wise `p`-th roots of `u` normalized to the torus.
pub fn aliased_roots(u: &[Complex64], p: usize) -> CandidateSet {
    let per_coord: Vec<Vec<(usize, Complex64)>> =
        u.iter().map(|x| circle_roots(project_to_circle(*x), p).into_iter().enumerate().collect()).collect();
    product_candidates(&per_coord, 0)
}

/// The subset of [`aliased_roots`] within max-norm distance `eta` of
/// `z_init`, generated coordinate by coordinate.
pub fn aliased_roots_near(u: &[Complex64], p: usize, z_init: &[Complex64], eta: f64) -> CandidateSet {
    let per_coord: Vec<Vec<(usize, Complex64)>> = u
        .iter()
        .zip(z_init)
        .map(|(x, z0)| {
            circle_roots(project_to_circle(*x), p)
                .into_iter()
                .enumerate()
                .filter(|(_, z)| (z - z0).norm() <= eta)
                .collect()
        })
        .collect();
    product_candidates(&per_coord, 0)
}

fn product_candidates(per_coord: &[Vec<(usize, Complex64)>], source: usize) -> CandidateSet {
    let mut candidates = vec![Candidate { nodes: Vec::new(), source, branches: Vec::new() }];
    for options in per_coord {
        candidates = candidates
            .into_iter()
            .flat_map(|c| {
                options.iter().map(move |&(m, z)| {
                    let mut next = c.clone();
                    next.nodes.push(z);
                    next.branches.push(m);
                    next
                })
            })
            .collect();
    }
    CandidateSet { candidates }
}

/// `sum_{k=0}^{k_max} |sum_i m_{k+i} c_i(z)|` with `c` the Prony polynomial of `z`.
pub fn residual(z: &[Complex64], meas: &MeasurementSequence, mult: &MultiplicityVector, k_max: usize) -> Result<f64> {
    let d = mult.d();
    if k_max + d >= meas.len() {
        return Err(Error::InsufficientData(format!(
            "residual up to k = {k_max} needs {} measurements, got {}",
            k_max + d + 1,
            meas.len()
        )));
    }
    let c = prony_polynomial(z, mult)?;
    Ok(residual_with(&c, meas.values(), k_max))
}

fn residual_with(c: &[Complex64], m: &[Complex64], k_max: usize) -> f64 {
    (0..=k_max)
        .map(|k| c.iter().enumerate().map(|(i, ci)| m[k + i] * ci).sum::<Complex64>().norm())
        .sum()
}

/// Default upper summation index `d - 1`.
pub fn default_k_max(mult: &MultiplicityVector) -> usize {
    mult.d() - 1
}

fn better(a: &(f64, Vec<Complex64>), b: &(f64, Vec<Complex64>)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1))
}

/// Residual argmin over an explicit candidate set (lexicographic tie-break).
pub fn select_from(
    set: &CandidateSet,
    meas: &MeasurementSequence,
    mult: &MultiplicityVector,
    k_max: usize,
) -> Result<Selection> {
    if set.is_empty() {
        return Err(Error::NoTorusAdjacent);
    }
    residual(&set.candidates[0].nodes, meas, mult, k_max)?;
    let best = set
        .candidates
        .par_iter()
        .map(|c| {
            let poly = prony_polynomial(&c.nodes, mult).expect("candidate length matches");
            (residual_with(&poly, meas.values(), k_max), c.nodes.clone())
        })
        .min_by(better)
        .expect("nonempty");
    Ok(Selection { nodes: best.1, residual: best.0, candidates: set.len() })
}

/// Residual argmin over the aliases of every torus-adjacent solution.
/// Candidates are enumerated lazily, so memory stays independent of `p^s`.
pub fn select_exhaustive(
    solutions: &SolutionSet,
    p: usize,
    meas: &MeasurementSequence,
    mult: &MultiplicityVector,
    k_max: usize,
) -> Result<Selection> {
    let adjacent: Vec<&[Complex64]> = solutions
        .solutions
        .iter()
        .map(|s| s.point.as_slice())
        .filter(|u| torus_distance(u) <= TORUS_ADJACENCY)
        .collect();
    if adjacent.is_empty() {
        return Err(Error::NoTorusAdjacent);
    }
    let s = mult.s();
    if adjacent.iter().any(|u| u.len() != s) {
        return Err(Error::InvalidOptions("solution dimension differs from node count".into()));
    }
    residual(&vec![Complex64::new(1.0, 0.0); s], meas, mult, k_max)?;

    let per_solution = p.checked_pow(s as u32).ok_or_else(|| Error::InvalidOptions("p^s overflows".into()))?;
    let roots: Vec<Vec<Vec<Complex64>>> = adjacent
        .iter()
        .map(|u| u.iter().map(|x| circle_roots(project_to_circle(*x), p)).collect())
        .collect();
    let total = per_solution * adjacent.len();
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let (sol, mut idx) = (flat / per_solution, flat % per_solution);
            let mut z = Vec::with_capacity(s);
            for coord in &roots[sol] {
                z.push(coord[idx % p]);
                idx /= p;
            }
            let poly = prony_polynomial(&z, mult).expect("candidate length matches");
            (residual_with(&poly, meas.values(), k_max), z)
        })
        .min_by(better)
        .expect("nonempty");
    Ok(Selection { nodes: best.1, residual: best.0, candidates: total })
}

/// The solution closest to the torus (largest coordinate deviation from
/// modulus 1 is minimal), normalized, together with its aliases.
pub fn select_prefilter(solutions: &SolutionSet, p: usize) -> Result<(Vec<Complex64>, CandidateSet)> {
    let (source, best) = solutions
        .solutions
        .iter()
        .enumerate()
        .min_by(|a, b| {
            torus_distance(&a.1.point)
                .total_cmp(&torus_distance(&b.1.point))
                .then_with(|| lex_cmp(&a.1.point, &b.1.point))
        })
        .ok_or(Error::NoTorusAdjacent)?;
    let u: Vec<Complex64> = best.point.iter().map(|x| project_to_circle(*x)).collect();
    let mut set = aliased_roots(&u, p);
    for c in &mut set.candidates {
        c.source = source;
    }
    Ok((u, set))
}

/// Keeps candidates within max-norm distance `eta` of `z_init`.
pub fn filter_by_init(set: &CandidateSet, z_init: &[Complex64], eta: f64) -> Result<CandidateSet> {
    let candidates: Vec<Candidate> = set
        .candidates
        .iter()
        .filter(|c| max_distance(&c.nodes, z_init) <= eta)
        .cloned()
        .collect();
    if candidates.is_empty() {
        return Err(Error::InitInconsistent);
    }
    Ok(CandidateSet { candidates })
}

/// Coordinate-wise maximum of `|a_i - b_i|`.
pub fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
