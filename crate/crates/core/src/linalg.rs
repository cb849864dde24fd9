//! Small dense complex linear algebra built on nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// 2-norm condition number `sigma_max / sigma_min` (infinite when singular).
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => f64::INFINITY,
    }
}

/// Moore-Penrose pseudo-inverse by singular value decomposition.
///
/// Singular values below `max(rows, cols) * eps * sigma_max` are treated as
/// zero. Returns the pseudo-inverse together with the numerical rank and the
/// ratio of the largest to the smallest retained singular value.
pub struct PseudoInverse {
    pub matrix: CMatrix,
    pub rank: usize,
    pub condition: f64,
}

pub fn pseudo_inverse(m: &CMatrix) -> PseudoInverse {
    let (rows, cols) = m.shape();
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rows.max(cols) as f64 * f64::EPSILON * sigma_max;
    let mut out = CMatrix::zeros(cols, rows);
    let mut rank = 0;
    let mut sigma_min = f64::INFINITY;
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > cutoff && sigma > 0.0 {
            rank += 1;
            sigma_min = sigma_min.min(sigma);
            let vi = v_t.row(i).adjoint();
            let ui = u.column(i).adjoint();
            out += (vi * ui) * Complex64::new(1.0 / sigma, 0.0);
        }
    }
    let condition = if rank == 0 { f64::INFINITY } else { sigma_max / sigma_min };
    PseudoInverse { matrix: out, rank, condition }
}

/// Inverse of a square matrix by LU with partial pivoting.
pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().try_inverse()
}

/// Solves `m x = rhs` for square `m`.
pub fn solve(m: &CMatrix, rhs: &CVector) -> Option<CVector> {
    m.clone().lu().solve(rhs)
}

/// Least-squares solution of `m x ~ rhs` (full column rank) via Householder
/// QR. Columns are equilibrated to unit norm first; the returned condition
/// number is that of the equilibrated matrix.
pub fn least_squares(m: &CMatrix, rhs: &CVector) -> Option<(CVector, f64)> {
    let (_, cols) = m.shape();
    let scales: Vec<f64> = (0..cols).map(|j| m.column(j).norm()).collect();
    if scales.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return None;
    }
    let mut scaled = m.clone();
    for (j, &s) in scales.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    let qr = scaled.qr();
    let r = qr.r();
    let cond = condition_number(&r);
    let qt_b = qr.q().adjoint() * rhs;
    let mut x = r.solve_upper_triangular(&qt_b)?;
    for (j, &s) in scales.iter().enumerate() {
        x[j] /= s;
    }
    Some((x, cond))
}

/// Eigenvalues of a square complex matrix via the Schur decomposition.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    if m.is_empty() {
        return Some(Vec::new());
    }
    nalgebra::linalg::Schur::new(m.clone())
        .eigenvalues()
        .map(|ev| ev.iter().copied().collect())
}

/// Vandermonde matrix with entry `(k, j) = nodes[j]^k`, `k < rows`.
pub fn vandermonde(nodes: &[Complex64], rows: usize) -> CMatrix {
    CMatrix::from_fn(rows, nodes.len(), |k, j| nodes[j].powu(k as u32))
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
