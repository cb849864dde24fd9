//! Symmetric-function machinery behind the Hankel-type node system.
//!
//! For nodes `u_1..u_s` with multiplicities `D`, the Prony polynomial
//! `prod_j (x - u_j)^{d_j} = sum_l tau_l(u) x^l` has coefficients that are
//! polynomials in `u` with small integer weights. Any decimated sequence
//! `n_k` generated by nodes `w` satisfies `sum_i n_{k+i} tau_i(w) = 0`, which
//! gives `s` polynomial equations in `s` unknowns.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{MeasurementSequence, MultiplicityVector, PronyParameters, COINCIDENCE_TOL};
use crate::polysolve::{MultiPoly, SquareSystem};

/// Largest total multiplicity accepted by the exact integer expansions.
pub const MAX_TOTAL_DEGREE: usize = 40;

/// `sigma_0..sigma_m` of `m` values, `sigma_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCoefficients {
    pub sigma: Vec<Complex64>,
}

/// Elementary symmetric polynomials via the coefficients of `prod (x + v_i)`.
pub fn elementary_symmetric(values: &[Complex64]) -> SymmetricCoefficients {
    let mut sigma = Vec::with_capacity(values.len() + 1);
    sigma.push(Complex64::new(1.0, 0.0));
    for v in values {
        sigma.push(Complex64::new(0.0, 0.0));
        for i in (1..sigma.len()).rev() {
            let prev = sigma[i - 1];
            sigma[i] += v * prev;
        }
    }
    SymmetricCoefficients { sigma }
}

/// Coefficients `c_0..c_d` (ascending powers of `x`) of `prod_j (x - z_j)^{d_j}`.
pub fn prony_polynomial(nodes: &[Complex64], mult: &MultiplicityVector) -> Result<Vec<Complex64>> {
    if nodes.len() != mult.s() {
        return Err(Error::InvalidParameters(format!(
            "{} nodes for {} multiplicities",
            nodes.len(),
            mult.s()
        )));
    }
    let repeated: Vec<Complex64> = nodes
        .iter()
        .zip(mult.parts())
        .flat_map(|(&z, &dj)| std::iter::repeat_n(z, dj))
        .collect();
    let sigma = elementary_symmetric(&repeated).sigma;
    let d = mult.d();
    Ok((0..=d)
        .map(|l| {
            let s = sigma[d - l];
            if (d - l).is_multiple_of(2) { s } else { -s }
        })
        .collect())
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `tau_l(u)` for `l = 0..d` as sparse integer-weighted polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct TauExpansion {
    multiplicities: MultiplicityVector,
    terms: Vec<Vec<(Vec<u32>, i64)>>,
}

impl TauExpansion {
    fn compute(mult: &MultiplicityVector) -> Self {
        let s = mult.s();
        // Polynomial in x whose coefficients are sparse polynomials in u.
        let mut acc: Vec<Vec<(Vec<u32>, i64)>> = vec![vec![(vec![0; s], 1)]];
        for (j, &dj) in mult.parts().iter().enumerate() {
            // (x - u_j)^{d_j} = sum_m binom(d_j, m) (-u_j)^m x^{d_j - m}
            let mut next = vec![Vec::new(); acc.len() + dj];
            for (deg, coeff) in acc.iter().enumerate() {
                for m in 0..=dj {
                    let sign = if m % 2 == 0 { 1 } else { -1 };
                    let w = sign * binomial(dj, m);
                    for (exp, c) in coeff {
                        let mut e = exp.clone();
                        e[j] += m as u32;
                        let weight = c.checked_mul(w).expect("tau weight overflow");
                        next[deg + dj - m].push((e, weight));
                    }
                }
            }
            acc = next;
        }
        for coeff in &mut acc {
            coeff.sort();
        }
        Self { multiplicities: mult.clone(), terms: acc }
    }

    pub fn multiplicities(&self) -> &MultiplicityVector {
        &self.multiplicities
    }

    pub fn degree(&self) -> usize {
        self.terms.len() - 1
    }

    /// Monomials of `tau_l` with their integer weights, sorted by exponent.
    pub fn terms(&self, l: usize) -> &[(Vec<u32>, i64)] {
        &self.terms[l]
    }

    /// Largest absolute integer weight across all `tau_l`.
    pub fn max_weight(&self) -> i64 {
        self.terms.iter().flatten().map(|(_, w)| w.abs()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, l: usize, point: &[Complex64]) -> Complex64 {
        self.to_poly(l).evaluate(point)
    }

    /// `(tau_0(u), ..., tau_d(u))`.
    pub fn evaluate_all(&self, point: &[Complex64]) -> Vec<Complex64> {
        (0..=self.degree()).map(|l| self.evaluate(l, point)).collect()
    }

    pub fn to_poly(&self, l: usize) -> MultiPoly {
        MultiPoly::from_terms(
            self.multiplicities.s(),
            self.terms[l].iter().map(|(e, w)| (e.clone(), Complex64::new(*w as f64, 0.0))),
        )
    }
}

type TauCache = Mutex<HashMap<Vec<usize>, Arc<TauExpansion>>>;

/// Symbolic expansion of the Prony polynomial coefficients, cached per
/// multiplicity vector.
pub fn tau_expansion(mult: &MultiplicityVector) -> Result<Arc<TauExpansion>> {
    if mult.d() > MAX_TOTAL_DEGREE {
        return Err(Error::InvalidMultiplicity(format!(
            "total multiplicity {} exceeds {MAX_TOTAL_DEGREE}",
            mult.d()
        )));
    }
    static CACHE: OnceLock<TauCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let entry = guard
        .entry(mult.parts().to_vec())
        .or_insert_with(|| Arc::new(TauExpansion::compute(mult)));
    Ok(Arc::clone(entry))
}

/// The square system `f_k(u) = sum_{i=0}^{d} n_{k+i} tau_i(u)`, `k = 0..s-1`.
#[derive(Debug, Clone)]
pub struct HankelSystem {
    system: SquareSystem,
    stride: usize,
    multiplicities: MultiplicityVector,
    measurements: MeasurementSequence,
    tau: Arc<TauExpansion>,
}

impl HankelSystem {
    pub fn system(&self) -> &SquareSystem {
        &self.system
    }

    pub fn equations(&self) -> &[MultiPoly] {
        self.system.equations()
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn multiplicities(&self) -> &MultiplicityVector {
        &self.multiplicities
    }

    pub fn measurements(&self) -> &MeasurementSequence {
        &self.measurements
    }

    pub fn tau(&self) -> &TauExpansion {
        &self.tau
    }
}

pub fn build_hankel_system(dec: &MeasurementSequence, mult: &MultiplicityVector) -> Result<HankelSystem> {
    let (s, d) = (mult.s(), mult.d());
    if dec.len() < mult.r() {
        return Err(Error::TooFewDecimated { needed: mult.r(), got: dec.len() });
    }
    let tau = tau_expansion(mult)?;
    let n = dec.values();
    let equations = (0..s)
        .map(|k| {
            let mut f = MultiPoly::zero(s);
            for i in 0..=d {
                for (exp, w) in tau.terms(i) {
                    f.add_term(exp.clone(), n[k + i] * (*w as f64));
                }
            }
            f
        })
        .collect();
    Ok(HankelSystem {
        system: SquareSystem::new(equations)?,
        stride: dec.stride(),
        multiplicities: mult.clone(),
        measurements: dec.clone(),
        tau,
    })
}

/// Coefficients (ascending powers of `u`) of the single-node polynomial
/// `q(u) = sum_{l=0}^{d} (-1)^l binom(d, l) n_{l+1} u^{d-l}`.
///
/// Indexing starts at `n_1`, so `dec` must hold at least `d + 2` values.
pub fn single_node_polynomial(dec: &MeasurementSequence, d: usize) -> Result<Vec<Complex64>> {
    if d == 0 {
        return Err(Error::InvalidMultiplicity("degree must be positive".into()));
    }
    if dec.len() < d + 2 {
        return Err(Error::InsufficientData(format!(
            "single-node polynomial of degree {d} needs {} values, got {}",
            d + 2,
            dec.len()
        )));
    }
    let n = dec.values();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
    for l in 0..=d {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[d - l] = n[l + 1] * (sign * binomial(d, l) as f64);
    }
    Ok(coeffs)
}

/// Jacobian of the Hankel system at the rescaled nodes, in closed form and
/// as the product of a Vandermonde matrix and a diagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianFactorization {
    /// `V_{k,j} = w_j^k`.
    pub vandermonde: CMatrix,
    /// `B_jj = -d_j! w_j^{d_j-1} b_{d_j-1,j} prod_{i != j} (w_j - w_i)^{d_i}`.
    pub diagonal: CMatrix,
    /// `D_{k,j} = -d_j! w_j^{k+d_j-1} b_{d_j-1,j} prod_{i != j} (w_j - w_i)^{d_i}`.
    pub product: CMatrix,
}

impl JacobianFactorization {
    /// `V * B`.
    pub fn factored(&self) -> CMatrix {
        &self.vandermonde * &self.diagonal
    }
}

pub fn closed_form_jacobian(scaled: &PronyParameters) -> Result<JacobianFactorization> {
    let w = scaled.nodes();
    let parts = scaled.multiplicities().parts();
    let s = w.len();
    let mut scale = Vec::with_capacity(s);
    for j in 0..s {
        let mut prod = Complex64::new(1.0, 0.0);
        for i in (0..s).filter(|&i| i != j) {
            let diff = w[j] - w[i];
            if diff.norm() <= COINCIDENCE_TOL {
                return Err(Error::SingularConfiguration(format!("nodes {i} and {j} coincide")));
            }
            prod *= diff.powu(parts[i] as u32);
        }
        scale.push(-factorial(parts[j]) * scaled.leading_coefficient(j) * prod);
    }
    let vandermonde = CMatrix::from_fn(s, s, |k, j| w[j].powu(k as u32));
    let diagonal = CMatrix::from_fn(s, s, |k, j| {
        if k == j { scale[j] * w[j].powu(parts[j] as u32 - 1) } else { Complex64::new(0.0, 0.0) }
    });
    let product = CMatrix::from_fn(s, s, |k, j| scale[j] * w[j].powu((k + parts[j] - 1) as u32));
    Ok(JacobianFactorization { vandermonde, diagonal, product })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{decimate, forward_map, scale_map};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mv(parts: &[usize]) -> MultiplicityVector {
        MultiplicityVector::new(parts.to_vec()).unwrap()
    }

    fn real(v: &[Complex64]) -> Vec<f64> {
        v.iter().map(|x| {
            assert_eq!(x.im, 0.0);
            x.re
        }).collect()
    }

    #[test]
    fn elementary_symmetric_examples() {
        assert_eq!(elementary_symmetric(&[]).sigma, vec![c(1.0, 0.0)]);
        assert_eq!(real(&elementary_symmetric(&[c(2.0, 0.0)]).sigma), vec![1.0, 2.0]);
        let v = [c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)];
        assert_eq!(real(&elementary_symmetric(&v).sigma), vec![1.0, 0.0, -2.0, 0.0, 1.0]);
    }

    #[test]
    fn prony_polynomial_examples() {
        let z = c(0.6, 0.8);
        assert_eq!(prony_polynomial(&[z], &mv(&[1])).unwrap(), vec![-z, c(1.0, 0.0)]);
        let p = prony_polynomial(&[c(1.0, 0.0), c(-1.0, 0.0)], &mv(&[2, 2])).unwrap();
        assert_eq!(real(&p), vec![1.0, 0.0, -2.0, 0.0, 1.0]);
    }

    #[test]
    fn tau_examples() {
        let tau = tau_expansion(&mv(&[2, 2])).unwrap();
        assert_eq!(tau.terms(2), &[(vec![0, 2], 1), (vec![1, 1], 4), (vec![2, 0], 1)]);
        assert_eq!(tau.terms(3), &[(vec![0, 1], -2), (vec![1, 0], -2)]);
        assert_eq!(tau.terms(4), &[(vec![0, 0], 1)]);
        assert_eq!(tau.terms(0), &[(vec![2, 2], 1)]);
        assert_eq!(tau.max_weight(), 4);

        let single = tau_expansion(&mv(&[1])).unwrap();
        assert_eq!(single.terms(0), &[(vec![1], -1)]);
        assert_eq!(single.terms(1), &[(vec![0], 1)]);

        let at = tau.evaluate_all(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(real(&at), vec![1.0, 0.0, -2.0, 0.0, 1.0]);
    }

    #[test]
    fn tau_cache_returns_same_expansion() {
        let a = tau_expansion(&mv(&[3, 1, 2])).unwrap();
        let b = tau_expansion(&mv(&[3, 1, 2])).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(tau_expansion(&mv(&[41])).is_err());
    }

    #[test]
    fn hankel_system_for_single_simple_node() {
        let dec = MeasurementSequence::new(vec![c(2.0, 1.0), c(-1.0, 3.0)]);
        let sys = build_hankel_system(&dec, &mv(&[1])).unwrap();
        let f = &sys.equations()[0];
        assert_eq!(f.coefficient(&[1]), c(-2.0, -1.0));
        assert_eq!(f.coefficient(&[0]), c(-1.0, 3.0));
        assert_eq!(f.terms().len(), 2);
    }

    #[test]
    fn hankel_system_needs_r_values() {
        let dec = MeasurementSequence::new(vec![c(1.0, 0.0); 5]);
        assert_eq!(
            build_hankel_system(&dec, &mv(&[2, 2])).unwrap_err(),
            Error::TooFewDecimated { needed: 6, got: 5 }
        );
    }

    #[test]
    fn hankel_system_vanishes_at_scaled_nodes() {
        let params = PronyParameters::new(
            vec![Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, 0.35)],
            vec![vec![c(1.0, 0.5), c(0.7, -0.2)], vec![c(-0.3, 1.0), c(0.9, 0.4)]],
        )
        .unwrap();
        let p = 40;
        let meas = forward_map(&params, 400);
        let dec = decimate(&meas, p, 6).unwrap();
        let sys = build_hankel_system(&dec, params.multiplicities()).unwrap();
        let w: Vec<Complex64> = scale_map(&params, p).unwrap().nodes().to_vec();
        let coef_norm = sys.system().coefficient_norm();
        for f in sys.equations() {
            assert!(f.total_degree() == 4);
            assert!(f.evaluate(&w).norm() <= 1e-10 * coef_norm);
        }
    }

    #[test]
    fn single_node_polynomial_examples() {
        let dec = MeasurementSequence::new(vec![c(9.0, 0.0), c(2.0, 0.0), c(3.0, 1.0)]);
        let q = single_node_polynomial(&dec, 1).unwrap();
        assert_eq!(q, vec![c(-3.0, -1.0), c(2.0, 0.0)]);

        let dec = MeasurementSequence::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(5.0, 0.0)]);
        assert_eq!(real(&single_node_polynomial(&dec, 2).unwrap()), vec![5.0, -4.0, 1.0]);
        assert!(single_node_polynomial(&dec, 3).is_err());
    }

    #[test]
    fn single_node_polynomial_vanishes_at_power() {
        let z = Complex64::from_polar(1.0, 0.7);
        let params = PronyParameters::new(vec![z], vec![vec![c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.5)]]).unwrap();
        let p = 7;
        let dec = decimate(&forward_map(&params, 100), p, 5).unwrap();
        let q = single_node_polynomial(&dec, 3).unwrap();
        let rho = z.powu(p as u32);
        let value: Complex64 = q.iter().enumerate().map(|(m, a)| a * rho.powu(m as u32)).sum();
        let scale = q.iter().map(|a| a.norm()).fold(0.0, f64::max);
        assert!(value.norm() <= 1e-12 * scale);
    }

    #[test]
    fn closed_form_examples() {
        let single = PronyParameters::new(vec![c(1.0, 0.0)], vec![vec![c(1.0, 0.0)]]).unwrap();
        let jf = closed_form_jacobian(&single).unwrap();
        assert_eq!(jf.product[(0, 0)], c(-1.0, 0.0));

        let w: Vec<Complex64> = [0.2, 1.1, 2.5].iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let b = vec![vec![c(0.3, 0.1), c(1.2, -0.4)], vec![c(1.0, 0.0), c(0.5, 0.5)], vec![c(0.0, 1.0), c(-0.7, 0.2)]];
        let params = PronyParameters::new(w.clone(), b.clone()).unwrap();
        let jf = closed_form_jacobian(&params).unwrap();
        let want = -2.0 * b[0][1] * w[0] * (w[0] - w[1]).powu(2) * (w[0] - w[2]).powu(2);
        assert!((jf.product[(0, 0)] - want).norm() <= 1e-14 * want.norm());
        assert!((jf.product.clone() - jf.factored()).norm() <= 1e-14 * jf.product.norm());
    }
}
