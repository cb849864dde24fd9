//! Sparse multivariate complex polynomials and a total-degree homotopy
//! continuation solver for small square systems.
//!
//! Paths of `H(u, t) = gamma * t * g(u) + (1 - t) * f(u)` are tracked from the
//! roots of unity of the start system `g_k(u) = u_k^{deg f_k} - 1` at `t = 1`
//! down to `t = 0` with an Euler predictor and a Newton corrector. Finite
//! endpoints are polished by Newton's method on the target system.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{condition_number, CMatrix};

/// Refinement refuses to continue beyond this Jacobian condition number.
pub const SINGULAR_CONDITION: f64 = 1e14;

/// A polynomial in `nvars` complex variables stored as a map from exponent
/// vectors to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, value: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], value);
        p
    }

    /// The polynomial `u_index`.
    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut exp = vec![0; nvars];
        exp[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exp, Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, coef) in terms {
            p.add_term(exp, coef);
        }
        p
    }

    /// Adds `coef * u^exp`, merging with an existing monomial.
    pub fn add_term(&mut self, exp: Vec<u32>, coef: Complex64) {
        assert_eq!(exp.len(), self.nvars, "exponent length must equal variable count");
        let entry = self.terms.entry(exp).or_insert(Complex64::new(0.0, 0.0));
        *entry += coef;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars, "point dimension must equal variable count");
        self.terms
            .iter()
            .map(|(exp, coef)| coef * monomial(exp, point))
            .sum()
    }

    /// `sum_{j in support} |u^j|`.
    pub fn monomial_magnitude_sum(&self, point: &[Complex64]) -> f64 {
        self.terms.keys().map(|exp| monomial(exp, point).norm()).sum()
    }

    /// Formal partial derivative with respect to `u_var`.
    pub fn differentiate(&self, var: usize) -> MultiPoly {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = Self::zero(self.nvars);
        for (exp, coef) in &self.terms {
            if exp[var] > 0 {
                let mut e = exp.clone();
                e[var] -= 1;
                out.add_term(e, coef * exp[var] as f64);
            }
        }
        out
    }
}

fn monomial(exp: &[u32], point: &[Complex64]) -> Complex64 {
    exp.iter()
        .zip(point)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, x)| x.powu(e))
        .product()
}

/// `n` polynomial equations in `n` unknowns, with the Jacobian cached in
/// symbolic form.
#[derive(Debug, Clone)]
pub struct SquareSystem {
    equations: Vec<MultiPoly>,
    jacobian: Vec<Vec<MultiPoly>>,
}

impl SquareSystem {
    pub fn new(equations: Vec<MultiPoly>) -> Result<Self> {
        let n = equations.len();
        if n == 0 {
            return Err(Error::NotSquareSolvable);
        }
        if equations.iter().any(|e| e.nvars() != n) {
            return Err(Error::InvalidOptions(format!(
                "square system needs {n} variables in each of its {n} equations"
            )));
        }
        let jacobian = equations
            .iter()
            .map(|e| (0..n).map(|j| e.differentiate(j)).collect())
            .collect();
        Ok(Self { equations, jacobian })
    }

    pub fn size(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.equations.iter().map(MultiPoly::total_degree).collect()
    }

    /// Largest coefficient magnitude over all equations.
    pub fn coefficient_norm(&self) -> f64 {
        self.equations.iter().map(MultiPoly::max_coefficient).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Vec<Complex64> {
        self.equations.iter().map(|e| e.evaluate(point)).collect()
    }

    pub fn jacobian_at(&self, point: &[Complex64]) -> CMatrix {
        let n = self.size();
        CMatrix::from_fn(n, n, |k, j| self.jacobian[k][j].evaluate(point))
    }

    /// Euclidean norm of the equation values.
    pub fn residual(&self, point: &[Complex64]) -> f64 {
        vec_norm(&self.evaluate(point))
    }
}

/// Path tracker settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Relative Newton step size accepted by the corrector.
    pub corrector_tol: f64,
    pub max_corrector_iters: usize,
    pub max_steps: usize,
    /// A path whose iterate exceeds this norm is declared diverged.
    pub divergence_threshold: f64,
    /// Endpoint residual must be below `endpoint_tol * (1 + coefficient norm)`.
    pub endpoint_tol: f64,
    pub endpoint_max_iters: usize,
    pub dedup_tol: f64,
    pub gamma: Complex64,
    pub seed: u64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

impl TrackOptions {
    /// Default settings with `gamma` drawn uniformly from the unit circle.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-7,
            max_step: 0.1,
            corrector_tol: 1e-10,
            max_corrector_iters: 3,
            max_steps: 10_000,
            divergence_threshold: 1e8,
            endpoint_tol: 1e-12,
            endpoint_max_iters: 20,
            dedup_tol: 1e-8,
            gamma: random_gamma(seed),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.initial_step,
            self.min_step,
            self.max_step,
            self.corrector_tol,
            self.divergence_threshold,
            self.endpoint_tol,
            self.dedup_tol,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidOptions("tracker thresholds must be positive".into()));
        }
        if !(self.min_step <= self.initial_step && self.initial_step <= self.max_step) {
            return Err(Error::InvalidOptions("need min_step <= initial_step <= max_step".into()));
        }
        if self.max_corrector_iters == 0 || self.max_steps == 0 {
            return Err(Error::InvalidOptions("iteration limits must be positive".into()));
        }
        if (self.gamma.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidOptions("gamma must have modulus 1".into()));
        }
        Ok(())
    }
}

/// A point on the unit circle with uniformly distributed argument.
pub fn random_gamma(seed: u64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathStatus {
    Converged,
    DivergedToInfinity,
    TrackingFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub status: PathStatus,
    /// Last iterate; the refined root when converged.
    pub endpoint: Vec<Complex64>,
    pub residual: f64,
    pub steps: usize,
    /// Homotopy parameter reached (0 when the path was completed).
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub point: Vec<Complex64>,
    pub residual: f64,
    /// 2-norm condition number of the Jacobian at the point.
    pub condition: f64,
}

/// Deduplicated finite isolated solutions and path bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub bezout_number: usize,
    pub converged_paths: usize,
    pub diverged_paths: usize,
    pub failed_paths: usize,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn points(&self) -> Vec<Vec<Complex64>> {
        self.solutions.iter().map(|s| s.point.clone()).collect()
    }
}

/// Start system `u_k^{deg f_k} - 1` and all its roots (Bezout many).
pub fn total_degree_start(system: &SquareSystem) -> Result<(SquareSystem, Vec<Vec<Complex64>>)> {
    let n = system.size();
    let degrees = system.degrees();
    if degrees.contains(&0) {
        return Err(Error::NotSquareSolvable);
    }
    let equations = degrees
        .iter()
        .enumerate()
        .map(|(k, &deg)| {
            let mut exp = vec![0; n];
            exp[k] = deg;
            MultiPoly::from_terms(n, [(exp, Complex64::new(1.0, 0.0)), (vec![0; n], Complex64::new(-1.0, 0.0))])
        })
        .collect();
    let start = SquareSystem::new(equations)?;

    let roots: Vec<Vec<Complex64>> = degrees
        .iter()
        .map(|&deg| {
            (0..deg)
                .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / deg as f64))
                .collect()
        })
        .collect();
    let mut points = vec![Vec::with_capacity(n)];
    for options in &roots {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&r| {
                    let mut next = prefix.clone();
                    next.push(r);
                    next
                })
            })
            .collect();
    }
    Ok((start, points))
}

struct Homotopy<'a> {
    target: &'a SquareSystem,
    start: &'a SquareSystem,
    gamma: Complex64,
}

impl Homotopy<'_> {
    fn value(&self, u: &[Complex64], t: f64) -> DVector<Complex64> {
        let f = self.target.evaluate(u);
        let g = self.start.evaluate(u);
        let a = self.gamma * t;
        let b = 1.0 - t;
        DVector::from_iterator(f.len(), g.iter().zip(&f).map(|(gk, fk)| a * gk + b * fk))
    }

    fn jacobian(&self, u: &[Complex64], t: f64) -> CMatrix {
        self.start.jacobian_at(u) * (self.gamma * t) + self.target.jacobian_at(u) * Complex64::new(1.0 - t, 0.0)
    }

    /// `du/dt` along the path.
    fn tangent(&self, u: &[Complex64], t: f64) -> Option<DVector<Complex64>> {
        let f = self.target.evaluate(u);
        let g = self.start.evaluate(u);
        let dh_dt = DVector::from_iterator(f.len(), g.iter().zip(&f).map(|(gk, fk)| self.gamma * gk - fk));
        let v = self.jacobian(u, t).lu().solve(&dh_dt)?;
        Some(-v)
    }

    /// Newton correction at fixed `t`. Returns `None` unless the iteration
    /// contracts to the relative tolerance within the iteration budget.
    fn correct(&self, mut u: Vec<Complex64>, t: f64, opts: &TrackOptions) -> Option<Vec<Complex64>> {
        let mut previous = f64::INFINITY;
        for _ in 0..opts.max_corrector_iters {
            let h = self.value(&u, t);
            let delta = self.jacobian(&u, t).lu().solve(&h)?;
            let size = delta.norm();
            if !size.is_finite() {
                return None;
            }
            for (x, dx) in u.iter_mut().zip(delta.iter()) {
                *x -= dx;
            }
            let scale = 1.0 + vec_norm(&u);
            if size <= opts.corrector_tol * scale {
                return Some(u);
            }
            if size > 0.5 * previous {
                return None;
            }
            previous = size;
        }
        None
    }
}

/// Tracks one path from `t = 1` to `t = 0`.
pub fn track_path(
    target: &SquareSystem,
    start: &SquareSystem,
    start_point: &[Complex64],
    opts: &TrackOptions,
) -> PathResult {
    let homotopy = Homotopy { target, start, gamma: opts.gamma };
    let mut u = start_point.to_vec();
    let mut t = 1.0_f64;
    let mut h = opts.initial_step;
    let mut steps = 0;
    let mut streak = 0;
    // (t, |u|) after each accepted step, used to classify stalled paths.
    let mut history = vec![(t, vec_norm(&u))];

    while t > 0.0 {
        if steps >= opts.max_steps {
            return stalled(target, u, t, steps, &history, opts);
        }
        steps += 1;
        let step = h.min(t);
        let t_next = if step >= t { 0.0 } else { t - step };
        let accepted = homotopy.tangent(&u, t).and_then(|du| {
            let predicted: Vec<Complex64> = u.iter().zip(du.iter()).map(|(x, dx)| x - dx * step).collect();
            homotopy.correct(predicted, t_next, opts)
        });
        match accepted {
            Some(next) => {
                u = next;
                t = t_next;
                let norm = vec_norm(&u);
                history.push((t, norm));
                if norm > opts.divergence_threshold {
                    return PathResult {
                        status: PathStatus::DivergedToInfinity,
                        endpoint: u,
                        residual: f64::NAN,
                        steps,
                        t_final: t,
                    };
                }
                streak += 1;
                if streak >= 4 {
                    h = (h * 1.5).min(opts.max_step);
                    streak = 0;
                }
            }
            None => {
                streak = 0;
                h *= 0.5;
                if h < opts.min_step {
                    return stalled(target, u, t, steps, &history, opts);
                }
            }
        }
    }

    let tol = opts.endpoint_tol * (1.0 + target.coefficient_norm());
    match newton_refine(target, &u, tol, opts.endpoint_max_iters) {
        Ok((point, residual)) if residual <= tol && vec_norm(&point) <= opts.divergence_threshold => {
            PathResult { status: PathStatus::Converged, endpoint: point, residual, steps, t_final: 0.0 }
        }
        Ok((point, residual)) => {
            let status = if vec_norm(&point) > ENDPOINT_FAR { PathStatus::DivergedToInfinity } else { PathStatus::TrackingFailed };
            PathResult { status, endpoint: point, residual, steps, t_final: 0.0 }
        }
        Err(_) => {
            let status = if vec_norm(&u) > ENDPOINT_FAR { PathStatus::DivergedToInfinity } else { PathStatus::TrackingFailed };
            let residual = target.residual(&u);
            PathResult { status, endpoint: u, residual, steps, t_final: 0.0 }
        }
    }
}

/// Unconverged endpoints farther out than this are attributed to solutions
/// at infinity.
const ENDPOINT_FAR: f64 = 1e6;

/// Paths that stall closer to the end than this are handed to Newton on the
/// target system directly.
const ENDGAME_T: f64 = 1e-3;

/// Largest relative move Newton may make from a stalled iterate.
const ENDGAME_JUMP: f64 = 1e-2;

/// Stalled paths in the end zone whose norm keeps growing as `t -> 0` are
/// heading to infinity. A path stalled just short of `t = 0` is accepted if
/// Newton on the target converges nearby; anything else is a tracking failure.
fn stalled(
    target: &SquareSystem,
    u: Vec<Complex64>,
    t: f64,
    steps: usize,
    history: &[(f64, f64)],
    opts: &TrackOptions,
) -> PathResult {
    let norm = vec_norm(&u);
    if growth_exponent(history, t).is_some_and(|g| g > 0.1) && norm > 10.0 {
        return PathResult { status: PathStatus::DivergedToInfinity, endpoint: u, residual: f64::NAN, steps, t_final: t };
    }
    if t <= ENDGAME_T {
        let tol = opts.endpoint_tol * (1.0 + target.coefficient_norm());
        if let Ok((point, residual)) = newton_refine(target, &u, tol, opts.endpoint_max_iters) {
            // Reject jumps to a root the path was not approaching.
            if residual <= tol && distance(&point, &u) <= ENDGAME_JUMP * (1.0 + norm) {
                return PathResult { status: PathStatus::Converged, endpoint: point, residual, steps, t_final: t };
            }
        }
    }
    PathResult { status: PathStatus::TrackingFailed, endpoint: u, residual: f64::NAN, steps, t_final: t }
}

/// Estimates `a` in `|u(t)| ~ t^{-a}` over the last decade of `t`.
fn growth_exponent(history: &[(f64, f64)], t: f64) -> Option<f64> {
    if t <= 0.0 || t > 0.1 {
        return None;
    }
    let (t_now, n_now) = *history.last()?;
    let &(t_ref, n_ref) = history.iter().rev().find(|(tr, _)| *tr >= 10.0 * t_now)?;
    if n_ref <= 0.0 || t_now <= 0.0 {
        return None;
    }
    Some((n_now / n_ref).ln() / (t_ref / t_now).ln())
}

/// Newton's method on the target system. Stops once the residual drops to
/// `tol` or after `max_iters` steps and returns the best iterate seen.
pub fn newton_refine(
    system: &SquareSystem,
    point: &[Complex64],
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<Complex64>, f64)> {
    let mut u = point.to_vec();
    let mut best = (u.clone(), system.residual(&u));
    for iter in 0..=max_iters {
        let jac = system.jacobian_at(&u);
        if !(condition_number(&jac) <= SINGULAR_CONDITION) {
            return Err(Error::SingularRefinement);
        }
        if best.1 <= tol || iter == max_iters {
            break;
        }
        let f = DVector::from_vec(system.evaluate(&u));
        let Some(delta) = jac.lu().solve(&f) else {
            return Err(Error::SingularRefinement);
        };
        for (x, dx) in u.iter_mut().zip(delta.iter()) {
            *x -= dx;
        }
        let r = system.residual(&u);
        if r < best.1 {
            best = (u.clone(), r);
        } else if delta.norm() <= f64::EPSILON * (1.0 + vec_norm(&u)) {
            break;
        }
    }
    Ok(best)
}

/// Tracks every Bezout path and returns the deduplicated finite solutions,
/// sorted lexicographically by (real, imaginary) parts.
pub fn solve_system(system: &SquareSystem, opts: &TrackOptions) -> Result<SolutionSet> {
    opts.validate()?;
    let (start, points) = total_degree_start(system)?;
    let results: Vec<PathResult> = points.par_iter().map(|p| track_path(system, &start, p, opts)).collect();

    let mut converged = Vec::new();
    let (mut diverged, mut failed) = (0, 0);
    for r in results {
        match r.status {
            PathStatus::Converged => converged.push(r),
            PathStatus::DivergedToInfinity => diverged += 1,
            PathStatus::TrackingFailed => failed += 1,
        }
    }
    let converged_paths = converged.len();
    if converged.is_empty() {
        return Err(Error::NoSolutions);
    }

    // Lowest residual first so the kept representative is the best one.
    converged.sort_by(|a, b| a.residual.total_cmp(&b.residual).then_with(|| lex_cmp(&a.endpoint, &b.endpoint)));
    let mut kept: Vec<PathResult> = Vec::new();
    for r in converged {
        if kept.iter().all(|k| distance(&k.endpoint, &r.endpoint) > opts.dedup_tol) {
            kept.push(r);
        }
    }
    let mut solutions: Vec<Solution> = kept
        .into_iter()
        .map(|r| {
            let condition = condition_number(&system.jacobian_at(&r.endpoint));
            Solution { point: r.endpoint, residual: r.residual, condition }
        })
        .collect();
    solutions.sort_by(|a, b| lex_cmp(&a.point, &b.point));

    Ok(SolutionSet {
        solutions,
        bezout_number: points.len(),
        converged_paths,
        diverged_paths: diverged,
        failed_paths: failed,
    })
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Lexicographic order on (re, im) of each coordinate.
pub fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}
