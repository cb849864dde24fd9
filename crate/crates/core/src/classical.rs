//! Classical Prony's method, single-node algebraic reconstruction and
//! confluent Vandermonde coefficient recovery.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hankelize::single_node_polynomial;
use crate::linalg::{eigenvalues, least_squares, CMatrix, CVector};
use crate::model::{decimate, project_to_circle, MeasurementSequence, MultiplicityVector, PronyParameters};

/// Largest total multiplicity for which grouping searches all partitions.
pub const EXHAUSTIVE_GROUPING_LIMIT: usize = 10;

/// Coefficient recovery refuses bases with a larger condition number.
pub const DEGENERATE_CONDITION: f64 = 1e14;

/// The `d x (d+1)` Hankel matrix `H[k][l] = m_{k+l}`.
pub fn hankel_matrix(meas: &MeasurementSequence, d: usize) -> Result<CMatrix> {
    if d == 0 || meas.len() < 2 * d {
        return Err(Error::InsufficientData(format!(
            "Hankel matrix of order {d} needs {} values, got {}",
            2 * d,
            meas.len()
        )));
    }
    let m = meas.values();
    Ok(CMatrix::from_fn(d, d + 1, |k, l| m[k + l]))
}

/// Monic null vector `c` (with `c_d = 1`) of a `d x (d+1)` matrix, taken as
/// the right singular vector of the smallest singular value.
pub fn hankel_nullspace(h: &CMatrix) -> Result<Vec<Complex64>> {
    let (rows, cols) = h.shape();
    if cols != rows + 1 {
        return Err(Error::InvalidOptions(format!("expected a d x (d+1) matrix, got {rows} x {cols}")));
    }
    if h.iter().all(|x| *x == Complex64::new(0.0, 0.0)) {
        return Err(Error::InsufficientData("Hankel matrix is zero".into()));
    }
    // Pad with a zero row so the decomposition yields the full right basis.
    let square = CMatrix::from_fn(cols, cols, |i, j| if i < rows { h[(i, j)] } else { Complex64::new(0.0, 0.0) });
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let c: Vec<Complex64> = v_t.row(idx).iter().map(|x| x.conj()).collect();
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let lead = c[rows];
    if lead.norm() < 1e-10 * norm {
        return Err(Error::LeadingCoefficientVanishes);
    }
    Ok(c.iter().map(|x| x / lead).collect())
}

/// Roots of `sum_k coeffs[k] x^k` as eigenvalues of the balanced companion
/// matrix. The polynomial is normalized by its leading coefficient.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut companion = CMatrix::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i] / lead;
    }
    balance(&mut companion);
    eigenvalues(&companion).unwrap_or_default()
}

/// Parlett-Reinsch balancing by powers of two (similarity transform).
fn balance(a: &mut CMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += a[(j, i)].norm();
                r += a[(i, j)].norm();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c, r0) = (c, r);
            let mut g = r0 / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r0 * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r0 / (f * f)) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Nodes obtained by grouping roots into clusters whose sizes are a
/// permutation of the requested multiplicities, ordered by ascending argument.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedNodes {
    pub nodes: Vec<Complex64>,
    /// Group sizes, in node order.
    pub multiplicities: MultiplicityVector,
}

/// Partitions `d` roots into `s` groups minimizing the total within-group
/// pairwise distance. Each representative is the group centroid projected to
/// the unit circle. Above [`EXHAUSTIVE_GROUPING_LIMIT`] roots a greedy
/// nearest-neighbour grouping is used instead of the exhaustive search.
pub fn assign_multiplicities(roots: &[Complex64], mult: &MultiplicityVector) -> Result<GroupedNodes> {
    if roots.len() != mult.d() {
        return Err(Error::InvalidOptions(format!("{} roots for total multiplicity {}", roots.len(), mult.d())));
    }
    let groups = if roots.len() <= EXHAUSTIVE_GROUPING_LIMIT {
        exhaustive_groups(roots, mult.parts())
    } else {
        greedy_groups(roots, mult.parts())
    };
    let mut nodes: Vec<(Complex64, usize)> = groups
        .iter()
        .map(|g| {
            let centroid: Complex64 = g.iter().map(|&i| roots[i]).sum::<Complex64>() / g.len() as f64;
            (project_to_circle(centroid), g.len())
        })
        .collect();
    nodes.sort_by(|a, b| a.0.arg().total_cmp(&b.0.arg()));
    Ok(GroupedNodes {
        nodes: nodes.iter().map(|n| n.0).collect(),
        multiplicities: MultiplicityVector::new(nodes.iter().map(|n| n.1).collect())?,
    })
}

fn exhaustive_groups(roots: &[Complex64], parts: &[usize]) -> Vec<Vec<usize>> {
    struct Search<'a> {
        roots: &'a [Complex64],
        target: Vec<usize>,
        max_size: usize,
        groups: Vec<Vec<usize>>,
        best: Option<(f64, Vec<Vec<usize>>)>,
    }

    impl Search<'_> {
        fn run(&mut self, item: usize, cost: f64) {
            if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return;
            }
            if item == self.roots.len() {
                let mut sizes: Vec<usize> = self.groups.iter().map(Vec::len).collect();
                sizes.sort_unstable();
                if sizes == self.target {
                    self.best = Some((cost, self.groups.clone()));
                }
                return;
            }
            let remaining = self.roots.len() - item;
            let open = self.target.len() - self.groups.len();
            for g in 0..self.groups.len() {
                if self.groups[g].len() >= self.max_size {
                    continue;
                }
                let added: f64 = self.groups[g].iter().map(|&i| (self.roots[i] - self.roots[item]).norm()).sum();
                self.groups[g].push(item);
                self.run(item + 1, cost + added);
                self.groups[g].pop();
            }
            if open > 0 && remaining >= open {
                self.groups.push(vec![item]);
                self.run(item + 1, cost);
                self.groups.pop();
            }
        }
    }

    let mut target = parts.to_vec();
    target.sort_unstable();
    let mut search = Search {
        roots,
        max_size: *target.last().expect("nonempty"),
        target,
        groups: Vec::new(),
        best: None,
    };
    search.run(0, 0.0);
    search.best.expect("a partition with the requested sizes always exists").1
}

fn greedy_groups(roots: &[Complex64], parts: &[usize]) -> Vec<Vec<usize>> {
    let mut sizes = parts.to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut remaining: Vec<usize> = (0..roots.len()).collect();
    let mut groups = Vec::new();
    for size in sizes {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for &seed in &remaining {
            let mut near = remaining.clone();
            near.sort_by(|&a, &b| (roots[a] - roots[seed]).norm().total_cmp(&(roots[b] - roots[seed]).norm()));
            near.truncate(size);
            let spread: f64 = near.iter().map(|&i| (roots[i] - roots[seed]).norm()).sum();
            if best.as_ref().is_none_or(|(b, _)| spread < *b) {
                best = Some((spread, near));
            }
        }
        let (_, group) = best.expect("enough roots remain");
        remaining.retain(|i| !group.contains(i));
        groups.push(group);
    }
    groups
}

/// Least-squares coefficients `a_{l,j}` of `m_k = sum_j sum_l a_{l,j} z_j^k k^l`
/// over all given measurements.
pub fn confluent_vandermonde_solve(
    nodes: &[Complex64],
    mult: &MultiplicityVector,
    meas: &MeasurementSequence,
) -> Result<Vec<Vec<Complex64>>> {
    if nodes.len() != mult.s() {
        return Err(Error::InvalidOptions(format!("{} nodes for {} multiplicities", nodes.len(), mult.s())));
    }
    let n = meas.len();
    if n < mult.d() {
        return Err(Error::NotEnoughMeasurements { needed: mult.d(), got: n });
    }
    let columns: Vec<(usize, usize)> = mult
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(j, &dj)| (0..dj).map(move |l| (j, l)))
        .collect();
    let basis = CMatrix::from_fn(n, columns.len(), |k, c| {
        let (j, l) = columns[c];
        nodes[j].powu(k as u32) * (k as f64).powi(l as i32)
    });
    let rhs = CVector::from_column_slice(meas.values());
    let (x, cond) = least_squares(&basis, &rhs).ok_or(Error::DegenerateNodes)?;
    if !(cond <= DEGENERATE_CONDITION) {
        return Err(Error::DegenerateNodes);
    }
    let mut out = Vec::with_capacity(mult.s());
    let mut pos = 0;
    for &dj in mult.parts() {
        out.push(x.as_slice()[pos..pos + dj].to_vec());
        pos += dj;
    }
    Ok(out)
}

/// Classical Prony: nullspace of the order-`d` Hankel matrix built from the
/// first `2d` values, roots of the resulting polynomial, grouping by
/// multiplicity and coefficient fit on all values.
pub fn prony_solve(meas: &MeasurementSequence, mult: &MultiplicityVector) -> Result<PronyParameters> {
    let h = hankel_matrix(meas, mult.d())?;
    let c = hankel_nullspace(&h)?;
    let roots = polynomial_roots(&c);
    let grouped = assign_multiplicities(&roots, mult)?;
    let coefficients = confluent_vandermonde_solve(&grouped.nodes, &grouped.multiplicities, meas)?;
    PronyParameters::from_estimate(grouped.nodes, coefficients)
}

/// Output of the single-node algebraic reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleNodeEstimate {
    /// Decimation parameter used.
    pub p: usize,
    /// Selected root of the decimated single-node polynomial (estimate of `z^p`).
    pub rho: Complex64,
    /// The chosen node when an initial approximation was given, otherwise all
    /// `p` candidate `p`-th roots of `rho`.
    pub candidates: Vec<Complex64>,
}

impl SingleNodeEstimate {
    pub fn node(&self) -> Option<Complex64> {
        match self.candidates.as_slice() {
            [z] => Some(*z),
            _ => None,
        }
    }
}

/// The `p` values `z` on the unit circle with `z^p = rho / |rho|`.
pub fn circle_roots(rho: Complex64, p: usize) -> Vec<Complex64> {
    let theta = rho.arg();
    (0..p)
        .map(|m| Complex64::from_polar(1.0, (theta + 2.0 * PI * m as f64) / p as f64))
        .collect()
}

/// Single-node algebraic reconstruction.
///
/// Uses `p = floor(N / (d+1))`, lowered by one when `m_{p(d+1)}` would fall
/// outside the data. The root of the decimated polynomial closest to the unit
/// circle is kept (ties go to the larger derivative magnitude). With
/// `z_init`, the `p`-th root nearest to it is returned and must lie within
/// `eta` of it.
pub fn solve_single_node(
    meas: &MeasurementSequence,
    d: usize,
    z_init: Option<Complex64>,
    eta: f64,
) -> Result<SingleNodeEstimate> {
    if d == 0 {
        return Err(Error::InvalidMultiplicity("degree must be positive".into()));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidOptions("eta must be positive".into()));
    }
    let n = meas.len();
    let mut p = n / (d + 1);
    if p * (d + 1) > n.saturating_sub(1) {
        p -= 1;
    }
    if p == 0 {
        return Err(Error::NotEnoughMeasurements { needed: d + 2, got: n });
    }
    let dec = decimate(meas, p, d + 2)?;
    let q = single_node_polynomial(&dec, d)?;
    let derivative: Vec<Complex64> = q.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    let lead = q[d].norm();
    let slope = |x: Complex64| -> f64 {
        derivative.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a).norm() / lead
    };
    let rho = polynomial_roots(&q)
        .into_iter()
        .min_by(|a, b| {
            let (da, db) = ((a.norm() - 1.0).abs(), (b.norm() - 1.0).abs());
            da.total_cmp(&db).then_with(|| slope(*b).total_cmp(&slope(*a)))
        })
        .ok_or(Error::NoCircleAdjacentRoot)?;
    if (rho.norm() - 1.0).abs() > 0.5 {
        return Err(Error::NoCircleAdjacentRoot);
    }
    let roots = circle_roots(rho, p);
    let candidates = match z_init {
        None => roots,
        Some(z0) => {
            let best = roots
                .into_iter()
                .min_by(|a, b| (a - z0).norm().total_cmp(&(b - z0).norm()))
                .expect("p >= 1");
            if (best - z0).norm() > eta {
                return Err(Error::InitInconsistent);
            }
            vec![best]
        }
    };
    Ok(SingleNodeEstimate { p, rho, candidates })
}
