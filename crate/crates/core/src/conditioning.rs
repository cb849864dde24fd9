//! Sensitivity diagnostics: forward-map Jacobians, component-wise condition
//! numbers of the full and decimated problems, and the linearized
//! sensitivity of the Hankel system solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankelize::{closed_form_jacobian, HankelSystem};
use crate::linalg::{condition_number, inverse, pseudo_inverse, CMatrix};
use crate::model::{separation, PronyParameters};

/// The full Jacobian is treated as rank deficient beyond this condition number.
pub const RANK_CONDITION_LIMIT: f64 = 1e14;

/// Square decimated Jacobians beyond this condition number are singular.
pub const SINGULAR_CONDITION_LIMIT: f64 = 1e16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    Full,
    Decimated,
}

/// Component-wise condition numbers in the flattened parameter layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    /// Measurement count (full) or stride (decimated) the report refers to.
    pub n: usize,
    pub p: usize,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub separation: f64,
    pub diameter: f64,
}

impl ConditionReport {
    /// Values belonging to the nodes `z_j`.
    pub fn node_values(&self) -> Vec<f64> {
        self.labels
            .iter()
            .zip(&self.values)
            .filter(|(l, _)| l.starts_with('z'))
            .map(|(_, v)| *v)
            .collect()
    }

    pub fn max_node_value(&self) -> f64 {
        self.node_values().into_iter().fold(0.0, f64::max)
    }
}

/// Rows `n_k = m_{pk}`, `k < count`, of the forward-map Jacobian with columns
/// in the flattened layout.
pub fn forward_jacobian(params: &PronyParameters, p: usize, count: usize) -> CMatrix {
    let r = params.multiplicities().r();
    let mut jac = CMatrix::zeros(count, r);
    for k in 0..count {
        let idx = p * k;
        let t = idx as f64;
        let mut col = 0;
        for (z, block) in params.nodes().iter().zip(params.coefficients()) {
            let zk = z.powu(idx as u32);
            for l in 0..block.len() {
                jac[(k, col)] = zk * t.powi(l as i32);
                col += 1;
            }
            let amp: Complex64 = block.iter().enumerate().map(|(l, a)| a * t.powi(l as i32 + 1)).sum();
            jac[(k, col)] = if idx == 0 { Complex64::new(0.0, 0.0) } else { z.powu(idx as u32 - 1) * amp };
            col += 1;
        }
    }
    jac
}

fn abs_row_sums(m: &CMatrix) -> Vec<f64> {
    m.row_iter().map(|row| row.iter().map(|x| x.norm()).sum()).collect()
}

fn report(params: &PronyParameters, kind: ConditionKind, n: usize, p: usize, values: Vec<f64>) -> ConditionReport {
    let sep = separation(params);
    ConditionReport {
        kind,
        n,
        p,
        labels: params.flat_labels(),
        values,
        separation: sep.global,
        diameter: sep.diameter,
    }
}

/// `CN_alpha = sum_i |(J^+)_{alpha,i}|` for the Jacobian of `N` measurements.
pub fn cn_full(params: &PronyParameters, n: usize) -> Result<ConditionReport> {
    let r = params.multiplicities().r();
    let jac = forward_jacobian(params, 1, n);
    let pinv = pseudo_inverse(&jac);
    if pinv.rank < r || !(pinv.condition < RANK_CONDITION_LIMIT) {
        return Err(Error::RankDeficientJacobian);
    }
    Ok(report(params, ConditionKind::Full, n, 1, abs_row_sums(&pinv.matrix)))
}

/// Row sums of the inverse of the square `R x R` decimated Jacobian.
pub fn cn_decimated(params: &PronyParameters, p: usize) -> Result<ConditionReport> {
    if p == 0 {
        return Err(Error::InvalidOptions("decimation parameter must be positive".into()));
    }
    let r = params.multiplicities().r();
    let jac = forward_jacobian(params, p, r);
    if !(condition_number(&jac) < SINGULAR_CONDITION_LIMIT) {
        return Err(Error::DecimatedSingular);
    }
    let inv = inverse(&jac).ok_or(Error::DecimatedSingular)?;
    Ok(report(params, ConditionKind::Decimated, p * (r - 1) + 1, p, abs_row_sums(&inv)))
}

/// `kappa_i = sum_k |K_{i,k}| (sum_{j in J_k} |u^j|) delta_alpha` with
/// `K` the inverse of the system Jacobian at `solution`.
pub fn kappa_sensitivity(system: &HankelSystem, solution: &[Complex64], delta_alpha: f64) -> Result<Vec<f64>> {
    let jac = system.system().jacobian_at(solution);
    if !(condition_number(&jac) < SINGULAR_CONDITION_LIMIT) {
        return Err(Error::SingularConfiguration("system Jacobian is singular at the solution".into()));
    }
    let k = inverse(&jac).ok_or_else(|| Error::SingularConfiguration("system Jacobian is singular".into()))?;
    Ok(kappa_from_inverse(system, solution, &k, delta_alpha))
}

/// The same quantity with `K = B^{-1} V^{-1}` from the closed-form
/// factorization at the rescaled true parameters.
pub fn kappa_closed_form(system: &HankelSystem, scaled: &PronyParameters, delta_alpha: f64) -> Result<Vec<f64>> {
    let jf = closed_form_jacobian(scaled)?;
    let singular = || Error::SingularConfiguration("closed-form factors are singular".into());
    let v_inv = inverse(&jf.vandermonde).ok_or_else(singular)?;
    let b_inv = inverse(&jf.diagonal).ok_or_else(singular)?;
    Ok(kappa_from_inverse(system, scaled.nodes(), &(b_inv * v_inv), delta_alpha))
}

fn kappa_from_inverse(system: &HankelSystem, point: &[Complex64], k: &CMatrix, delta_alpha: f64) -> Vec<f64> {
    let weights: Vec<f64> = system.equations().iter().map(|f| f.monomial_magnitude_sum(point)).collect();
    (0..k.nrows())
        .map(|i| (0..k.ncols()).map(|c| k[(i, c)].norm() * weights[c]).sum::<f64>() * delta_alpha)
        .collect()
}

/// Bound on the system coefficient perturbations caused by measurement
/// errors of size `epsilon`: `epsilon` times the largest integer weight of
/// the symmetric-function expansion.
pub fn coefficient_perturbation_bound(system: &HankelSystem, epsilon: f64) -> f64 {
    epsilon * system.tau().max_weight() as f64
}

/// `sum_k |(V^{-1})_{i,k}|` for the square Vandermonde matrix `V_{k,j} = w_j^k`.
pub fn inverse_vandermonde_row_sums(nodes: &[Complex64]) -> Result<Vec<f64>> {
    let s = nodes.len();
    let v = CMatrix::from_fn(s, s, |k, j| nodes[j].powu(k as u32));
    let inv = inverse(&v).ok_or_else(|| Error::SingularConfiguration("coincident nodes".into()))?;
    Ok(abs_row_sums(&inv))
}

/// `2^{s-1} prod_{j != i} |w_j - w_i|^{-1}` for nodes on the unit circle.
pub fn gautschi_bound(nodes: &[Complex64]) -> Vec<f64> {
    let s = nodes.len();
    (0..s)
        .map(|i| {
            let prod: f64 = (0..s).filter(|&j| j != i).map(|j| (nodes[j] - nodes[i]).norm()).product();
            2f64.powi(s as i32 - 1) / prod
        })
        .collect()
}
