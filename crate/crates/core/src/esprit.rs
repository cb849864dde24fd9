//! Generalized ESPRIT baseline.
//!
//! Node estimates are the eigenvalues of the shift operator on the dominant
//! `d`-dimensional left singular subspace of a Hankel data matrix. Confluent
//! nodes show up as `d_j` nearby eigenvalues, which are clustered into groups
//! of the requested sizes.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::confluent_vandermonde_solve;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix};
use crate::model::{project_to_circle, MeasurementSequence, MultiplicityVector, PronyParameters};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EspritOptions {
    /// Hankel window length `L`; `floor(N/2)` when absent.
    pub window: Option<usize>,
    /// Seed for the k-means initializations.
    pub seed: u64,
    pub restarts: usize,
}

impl Default for EspritOptions {
    fn default() -> Self {
        Self { window: None, seed: 0, restarts: 50 }
    }
}

impl EspritOptions {
    pub fn window_for(&self, n: usize) -> usize {
        self.window.unwrap_or(n / 2)
    }
}

pub fn esprit_estimate(
    meas: &MeasurementSequence,
    mult: &MultiplicityVector,
    opts: &EspritOptions,
) -> Result<PronyParameters> {
    let roots = esprit_roots(meas, mult.d(), opts)?;
    let (nodes, sizes) = cluster_roots(&roots, mult, opts)?;
    let sizes = MultiplicityVector::new(sizes)?;
    let coefficients = confluent_vandermonde_solve(&nodes, &sizes, meas)?;
    PronyParameters::from_estimate(nodes, coefficients)
}

/// The `d` eigenvalues of the shift-invariance relation.
pub fn esprit_roots(meas: &MeasurementSequence, d: usize, opts: &EspritOptions) -> Result<Vec<Complex64>> {
    let n = meas.len();
    if n < 2 * d + 1 {
        return Err(Error::NotEnoughMeasurements { needed: 2 * d + 1, got: n });
    }
    let l = opts.window_for(n);
    if l <= d || l > n - d {
        return Err(Error::InvalidOptions(format!("window length {l} outside ({d}, {}]", n - d)));
    }
    let m = meas.values();
    let hankel = Mat::<Complex64>::from_fn(l, n - l + 1, |i, j| m[i + j]);
    let svd = hankel
        .thin_svd()
        .map_err(|e| Error::SubspaceFailure(format!("{e:?}")))?;
    let sigma = svd.S().column_vector();
    let mut order: Vec<usize> = (0..sigma.nrows()).collect();
    order.sort_by(|&a, &b| sigma[b].re.total_cmp(&sigma[a].re));
    let u = svd.U();
    let basis = CMatrix::from_fn(l, d, |i, k| u[(i, order[k])]);
    if basis.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::SubspaceFailure("non-finite singular vectors".into()));
    }

    // Least squares U1 * Phi = U2 with U1, U2 the basis without its last/first row.
    let upper = basis.rows(0, l - 1).into_owned();
    let lower = basis.rows(1, l - 1).into_owned();
    let qr = upper.qr();
    let rhs = qr.q().adjoint() * lower;
    let phi = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::SubspaceFailure("shift relation is singular".into()))?;
    eigenvalues(&phi).ok_or_else(|| Error::SubspaceFailure("eigenvalue iteration failed".into()))
}

/// Groups `d` roots into clusters of sizes matching `mult` (in some order) by
/// seeded k-means, repaired to the exact capacities. Returns projected
/// centroids and the size of each group.
pub fn cluster_roots(
    roots: &[Complex64],
    mult: &MultiplicityVector,
    opts: &EspritOptions,
) -> Result<(Vec<Complex64>, Vec<usize>)> {
    let s = mult.s();
    if roots.len() != mult.d() {
        return Err(Error::InvalidOptions(format!("{} roots for total multiplicity {}", roots.len(), mult.d())));
    }
    let centers = kmeans(roots, s, opts.restarts.max(1), opts.seed);
    let labels = capacity_assignment(roots, &centers, mult.parts());
    let mut nodes = Vec::with_capacity(s);
    let mut sizes = Vec::with_capacity(s);
    for g in 0..s {
        let members: Vec<Complex64> = labels.iter().zip(roots).filter(|(&l, _)| l == g).map(|(_, r)| *r).collect();
        let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        nodes.push(project_to_circle(centroid));
        sizes.push(members.len());
    }
    Ok((nodes, sizes))
}

/// Lloyd iterations from random distinct seeds; the run with the smallest
/// within-cluster sum of squares wins.
fn kmeans(points: &[Complex64], k: usize, restarts: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for _ in 0..restarts {
        let picks = rand::seq::index::sample(&mut rng, points.len(), k);
        let mut centers: Vec<Complex64> = picks.iter().map(|i| points[i]).collect();
        let mut labels = vec![usize::MAX; points.len()];
        for _ in 0..100 {
            let next: Vec<usize> = points.iter().map(|p| nearest(&centers, *p)).collect();
            if next == labels {
                break;
            }
            labels = next;
            for (c, center) in centers.iter_mut().enumerate() {
                let members: Vec<Complex64> =
                    labels.iter().zip(points).filter(|(&l, _)| l == c).map(|(_, p)| *p).collect();
                if !members.is_empty() {
                    *center = members.iter().sum::<Complex64>() / members.len() as f64;
                } else {
                    *center = points[rng.random_range(0..points.len())];
                }
            }
        }
        let inertia: f64 = points.iter().map(|p| (p - centers[nearest(&centers, *p)]).norm_sqr()).sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, centers));
        }
    }
    best.expect("at least one restart").1
}

fn nearest(centers: &[Complex64], p: Complex64) -> usize {
    centers
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - p).norm().total_cmp(&(b.1 - p).norm()))
        .map(|(i, _)| i)
        .expect("nonempty")
}

/// Nearest-centroid assignment under capacities: every ordering of the sizes
/// over the centroids is tried with a greedy closest-pair fill, keeping the
/// cheapest.
fn capacity_assignment(points: &[Complex64], centers: &[Complex64], sizes: &[usize]) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| centers.iter().enumerate().map(move |(c, q)| ((p - q).norm(), i, c)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut best: Option<(f64, Vec<usize>)> = None;
    for capacity in permutations(sizes) {
        let mut left = capacity.clone();
        let mut labels = vec![usize::MAX; points.len()];
        let mut cost = 0.0;
        for &(dist, i, c) in &pairs {
            if labels[i] == usize::MAX && left[c] > 0 {
                labels[i] = c;
                left[c] -= 1;
                cost += dist;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, labels));
        }
    }
    best.expect("at least one permutation").1
}

/// Distinct permutations of a small list.
pub(crate) fn permutations<T: Clone + Ord>(items: &[T]) -> Vec<Vec<T>> {
    let mut current = items.to_vec();
    current.sort();
    let mut out = vec![current.clone()];
    // Lexicographic successor.
    loop {
        let Some(i) = (0..current.len().saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            return out;
        };
        let j = (i + 1..current.len()).rev().find(|&j| current[j] > current[i]).expect("successor exists");
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::forward_map;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(permutations(&[2, 2]), vec![vec![2, 2]]);
        assert_eq!(permutations(&[1, 2, 3]).len(), 6);
        assert_eq!(permutations(&[1, 1, 2]).len(), 3);
    }

    #[test]
    fn single_exponential() {
        let z = Complex64::from_polar(1.0, 1.3);
        let params = PronyParameters::new(vec![z], vec![vec![c(0.7, -0.2)]]).unwrap();
        let meas = forward_map(&params, 9);
        let mult = params.multiplicities().clone();
        let est = esprit_estimate(&meas, &mult, &EspritOptions::default()).unwrap();
        let m = meas.values();
        assert!((est.nodes()[0] - project_to_circle(m[1] / m[0])).norm() < 1e-12);
    }

    #[test]
    fn separated_simple_nodes() {
        let nodes = vec![Complex64::from_polar(1.0, 0.2), Complex64::from_polar(1.0, 0.2 + std::f64::consts::FRAC_PI_2)];
        let params = PronyParameters::new(nodes.clone(), vec![vec![c(1.0, 0.0)], vec![c(0.5, 0.5)]]).unwrap();
        let meas = forward_map(&params, 40);
        let est = esprit_estimate(&meas, params.multiplicities(), &EspritOptions::default()).unwrap();
        for z in &nodes {
            assert!(est.nodes().iter().any(|e| (e - z).norm() < 1e-8));
        }
    }

    #[test]
    fn capacity_repair_enforces_sizes() {
        // Three points near one center and one far away, sizes (2, 2).
        let pts = [c(1.0, 0.0), c(1.01, 0.0), c(0.99, 0.0), c(-1.0, 0.0)];
        let mult = MultiplicityVector::new(vec![2, 2]).unwrap();
        let (_, sizes) = cluster_roots(&pts, &mult, &EspritOptions::default()).unwrap();
        assert_eq!(sizes, vec![2, 2]);
    }

    #[test]
    fn window_validation() {
        let meas = MeasurementSequence::new(vec![c(1.0, 0.0); 10]);
        let opts = EspritOptions { window: Some(2), ..Default::default() };
        assert!(esprit_roots(&meas, 2, &opts).is_err());
        assert!(esprit_roots(&MeasurementSequence::new(vec![c(1.0, 0.0); 4]), 2, &Default::default()).is_err());
    }
}
