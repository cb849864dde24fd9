//! The confluent Prony data model.
//!
//! A data point consists of `s` distinct nodes `z_j` on the unit circle, each
//! carrying a polynomial amplitude of degree `d_j - 1`. The measurements are
//!
//! ```text
//! m_k = sum_j z_j^k * sum_{l < d_j} a_{l,j} * k^l,   k = 0..N-1
//! ```
//!
//! Decimating with stride `p` keeps `m_0, m_p, m_2p, ...`, which is the same
//! as measuring the rescaled point with nodes `z_j^p` and coefficients
//! `a_{l,j} p^l` (see [`scale_map`]).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Allowed deviation of `|z_j|` from 1 when constructing parameters.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Two nodes closer than this are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// Per-node multiplicities `(d_1, ..., d_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiplicityVector {
    parts: Vec<usize>,
}

impl MultiplicityVector {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidMultiplicity("at least one node is required".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidMultiplicity("multiplicities must be positive".into()));
        }
        Ok(Self { parts })
    }

    /// Parses a comma separated list such as `"2,2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidMultiplicity(format!("{p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of distinct nodes.
    pub fn s(&self) -> usize {
        self.parts.len()
    }

    /// Total multiplicity `d = sum d_j`.
    pub fn d(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of unknowns `R = d + s`.
    pub fn r(&self) -> usize {
        self.d() + self.s()
    }

    /// Offset of node `j`'s block in the flattened parameter layout.
    pub fn block_offset(&self, j: usize) -> usize {
        self.parts[..j].iter().map(|d| d + 1).sum()
    }

    /// Column index of `z_j` in the flattened parameter layout.
    pub fn node_index(&self, j: usize) -> usize {
        self.block_offset(j) + self.parts[j]
    }
}

impl TryFrom<Vec<usize>> for MultiplicityVector {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<MultiplicityVector> for Vec<usize> {
    fn from(m: MultiplicityVector) -> Self {
        m.parts
    }
}

/// A point of the data space: nodes, per-node coefficients and multiplicities.
///
/// The flattened layout (used by Jacobians and condition reports) is
/// `(a_{0,1}, ..., a_{d_1-1,1}, z_1, ..., a_{0,s}, ..., a_{d_s-1,s}, z_s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameters", into = "RawParameters")]
pub struct PronyParameters {
    nodes: Vec<Complex64>,
    coefficients: Vec<Vec<Complex64>>,
    multiplicities: MultiplicityVector,
}

#[derive(Serialize, Deserialize)]
struct RawParameters {
    nodes: Vec<Complex64>,
    coefficients: Vec<Vec<Complex64>>,
}

impl TryFrom<RawParameters> for PronyParameters {
    type Error = Error;

    fn try_from(raw: RawParameters) -> Result<Self> {
        PronyParameters::new(raw.nodes, raw.coefficients)
    }
}

impl From<PronyParameters> for RawParameters {
    fn from(p: PronyParameters) -> Self {
        RawParameters { nodes: p.nodes, coefficients: p.coefficients }
    }
}

impl PronyParameters {
    /// Builds and validates a data point. Multiplicities are taken from the
    /// coefficient list lengths.
    pub fn new(nodes: Vec<Complex64>, coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        if nodes.len() != coefficients.len() {
            return Err(Error::InvalidParameters(format!(
                "{} nodes but {} coefficient blocks",
                nodes.len(),
                coefficients.len()
            )));
        }
        let multiplicities = MultiplicityVector::new(coefficients.iter().map(Vec::len).collect())?;
        for (j, z) in nodes.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::InvalidParameters(format!(
                    "node {j} = {z} is not on the unit circle"
                )));
            }
        }
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if (nodes[i] - nodes[j]).norm() <= COINCIDENCE_TOL {
                    return Err(Error::InvalidParameters(format!("nodes {i} and {j} coincide")));
                }
            }
        }
        for (j, block) in coefficients.iter().enumerate() {
            if block.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                return Err(Error::InvalidParameters(format!("coefficients of node {j} are not finite")));
            }
            if block.last().is_none_or(|a| a.norm() == 0.0) {
                return Err(Error::InvalidParameters(format!(
                    "leading coefficient of node {j} vanishes"
                )));
            }
        }
        Ok(Self { nodes, coefficients, multiplicities })
    }

    /// Projects nodes onto the unit circle and then validates. Intended for
    /// estimates produced by solvers, which are only approximately unimodular.
    pub fn from_estimate(nodes: Vec<Complex64>, coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        let nodes = nodes.into_iter().map(project_to_circle).collect();
        Self::new(nodes, coefficients)
    }

    /// Rebuilds a data point from the flattened layout.
    pub fn from_flat(multiplicities: &MultiplicityVector, flat: &[Complex64]) -> Result<Self> {
        if flat.len() != multiplicities.r() {
            return Err(Error::InvalidParameters(format!(
                "flat vector has length {}, expected R = {}",
                flat.len(),
                multiplicities.r()
            )));
        }
        let mut nodes = Vec::with_capacity(multiplicities.s());
        let mut coefficients = Vec::with_capacity(multiplicities.s());
        let mut pos = 0;
        for &dj in multiplicities.parts() {
            coefficients.push(flat[pos..pos + dj].to_vec());
            nodes.push(flat[pos + dj]);
            pos += dj + 1;
        }
        Self::new(nodes, coefficients)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>] {
        &self.coefficients
    }

    pub fn multiplicities(&self) -> &MultiplicityVector {
        &self.multiplicities
    }

    /// Leading coefficient `a_{d_j - 1, j}`.
    pub fn leading_coefficient(&self, j: usize) -> Complex64 {
        *self.coefficients[j].last().expect("validated nonempty")
    }

    pub fn to_flat(&self) -> Vec<Complex64> {
        let mut flat = Vec::with_capacity(self.multiplicities.r());
        for (z, block) in self.nodes.iter().zip(&self.coefficients) {
            flat.extend_from_slice(block);
            flat.push(*z);
        }
        flat
    }

    /// Human-readable labels of the flattened layout, e.g. `a[1,0]`, `z[0]`.
    pub fn flat_labels(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.multiplicities.r());
        for (j, &dj) in self.multiplicities.parts().iter().enumerate() {
            labels.extend((0..dj).map(|l| format!("a[{l},{j}]")));
            labels.push(format!("z[{j}]"));
        }
        labels
    }
}

/// Complex measurements `m_k` (stride 1) or decimated measurements
/// `n_k = m_{origin + stride * k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSequence {
    values: Vec<Complex64>,
    stride: usize,
    origin: usize,
}

impl MeasurementSequence {
    /// Raw (stride 1) measurements.
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values, stride: 1, origin: 0 }
    }

    pub fn with_stride(values: Vec<Complex64>, stride: usize, origin: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidOptions("stride must be at least 1".into()));
        }
        Ok(Self { values, stride, origin })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Euclidean norm of the values.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            stride: self.stride,
            origin: self.origin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Uniform on the open complex disc of radius `level`.
    BoundedUniformComplex,
    /// Real and imaginary parts i.i.d. `N(0, level^2 / 2)`.
    GaussianComplex,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, level: 0.0, seed: 0 }
    }

    pub fn bounded(level: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::BoundedUniformComplex, level, seed }
    }

    pub fn gaussian(level: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::GaussianComplex, level, seed }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::bounded(0.0, 0)
    }
}

/// Node separation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `delta^(i) = min_{j != i} delta_ij`.
    pub per_node: Vec<f64>,
    /// `delta = min_i delta^(i)`.
    pub global: f64,
    /// `delta* = max_{i != j} delta_ij`.
    pub diameter: f64,
}

/// Evaluates `m_k` for `k = 0..n`.
pub fn forward_map(params: &PronyParameters, n: usize) -> MeasurementSequence {
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (z, block) in params.nodes().iter().zip(params.coefficients()) {
        let mut zk = Complex64::new(1.0, 0.0);
        for (k, value) in values.iter_mut().enumerate() {
            let kf = k as f64;
            // Horner in k; 0^0 = 1 so m_0 picks up a_{0,j}.
            let amp = block.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * kf + a);
            *value += zk * amp;
            zk *= z;
        }
    }
    MeasurementSequence::new(values)
}

/// Adds seeded noise. The input is left untouched.
pub fn add_noise(meas: &MeasurementSequence, spec: &NoiseSpec) -> MeasurementSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = match spec.kind {
        NoiseKind::None => meas.values.clone(),
        NoiseKind::BoundedUniformComplex => meas
            .values
            .iter()
            .map(|v| {
                // sqrt(U) with U in [0, 1) keeps the radius strictly below the bound.
                let r = spec.level * rng.random::<f64>().sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                v + Complex64::from_polar(r, theta)
            })
            .collect(),
        NoiseKind::GaussianComplex => {
            let sd = spec.level / 2f64.sqrt();
            if sd > 0.0 {
                let normal = Normal::new(0.0, sd).expect("finite positive standard deviation");
                meas.values
                    .iter()
                    .map(|v| v + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                    .collect()
            } else {
                meas.values.clone()
            }
        }
    };
    MeasurementSequence { values, stride: meas.stride, origin: meas.origin }
}

/// Keeps `count` samples with stride `p`: `n_k = m_{p k}`.
pub fn decimate(meas: &MeasurementSequence, p: usize, count: usize) -> Result<MeasurementSequence> {
    if meas.stride != 1 {
        return Err(Error::InvalidOptions("can only decimate raw (stride 1) measurements".into()));
    }
    if p == 0 || count == 0 {
        return Err(Error::InvalidOptions("stride and count must be positive".into()));
    }
    if p * (count - 1) >= meas.len() {
        return Err(Error::InsufficientForDecimation);
    }
    let values = (0..count).map(|k| meas.values[p * k]).collect();
    MeasurementSequence::with_stride(values, p, meas.origin)
}

/// The rescaled data point `w_j = z_j^p`, `b_{l,j} = a_{l,j} p^l`.
pub fn scale_map(params: &PronyParameters, p: usize) -> Result<PronyParameters> {
    if p == 0 {
        return Err(Error::InvalidOptions("decimation parameter must be positive".into()));
    }
    let exp = u32::try_from(p).map_err(|_| Error::InvalidOptions("decimation parameter too large".into()))?;
    let nodes: Vec<Complex64> = params.nodes().iter().map(|z| project_to_circle(z.powu(exp))).collect();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if (nodes[i] - nodes[j]).norm() <= COINCIDENCE_TOL {
                return Err(Error::AliasedNodes);
            }
        }
    }
    let pf = p as f64;
    let coefficients = params
        .coefficients()
        .iter()
        .map(|block| block.iter().enumerate().map(|(l, a)| a * pf.powi(l as i32)).collect())
        .collect();
    PronyParameters::new(nodes, coefficients)
}

/// Wrapped angular distance `|arg z_i - arg z_j|` in `[0, pi]`.
pub fn circular_distance(a: Complex64, b: Complex64) -> f64 {
    (a * b.conj()).arg().abs()
}

/// Pairwise wrapped separations. A single node reports `pi` for all three
/// quantities.
pub fn separation(params: &PronyParameters) -> SeparationReport {
    let nodes = params.nodes();
    let s = nodes.len();
    if s == 1 {
        return SeparationReport { per_node: vec![PI], global: PI, diameter: PI };
    }
    let mut per_node = vec![f64::INFINITY; s];
    let mut diameter: f64 = 0.0;
    for i in 0..s {
        for j in i + 1..s {
            let dij = circular_distance(nodes[i], nodes[j]);
            per_node[i] = per_node[i].min(dij);
            per_node[j] = per_node[j].min(dij);
            diameter = diameter.max(dij);
        }
    }
    let global = per_node.iter().copied().fold(f64::INFINITY, f64::min);
    SeparationReport { per_node, global, diameter }
}

/// `p* = floor(N / R)`.
pub fn choose_decimation(n: usize, r: usize) -> Result<usize> {
    if r == 0 {
        return Err(Error::InvalidOptions("parameter count must be positive".into()));
    }
    if n < r {
        return Err(Error::NotEnoughMeasurements { needed: r, got: n });
    }
    Ok(n / r)
}

pub(crate) fn project_to_circle(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        z
    } else {
        z / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(z: Complex64, a: Vec<Complex64>) -> PronyParameters {
        PronyParameters::new(vec![z], vec![a]).unwrap()
    }

    #[test]
    fn multiplicity_counts() {
        let d = MultiplicityVector::new(vec![2, 3, 1]).unwrap();
        assert_eq!((d.s(), d.d(), d.r()), (3, 6, 9));
        assert_eq!(d.node_index(0), 2);
        assert_eq!(d.node_index(1), 6);
        assert_eq!(d.node_index(2), 8);
        assert!(MultiplicityVector::new(vec![]).is_err());
        assert!(MultiplicityVector::new(vec![2, 0]).is_err());
        assert_eq!(MultiplicityVector::parse(" 2, 2 ").unwrap().parts(), &[2, 2]);
        assert!(MultiplicityVector::parse("2,x").is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(PronyParameters::new(vec![c(1.1, 0.0)], vec![vec![c(1.0, 0.0)]]).is_err());
        assert!(PronyParameters::new(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![vec![c(1.0, 0.0)]; 2]).is_err());
        assert!(PronyParameters::new(vec![c(1.0, 0.0)], vec![vec![c(1.0, 0.0), c(0.0, 0.0)]]).is_err());
        assert!(PronyParameters::new(vec![c(1.0, 0.0)], vec![vec![]]).is_err());
        let ok = PronyParameters::new(vec![c(0.0, 1.0)], vec![vec![c(0.0, 0.0), c(2.0, 0.0)]]).unwrap();
        assert_eq!(ok.leading_coefficient(0), c(2.0, 0.0));
    }

    #[test]
    fn flat_layout_round_trip() {
        let p = PronyParameters::new(
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0)]],
        )
        .unwrap();
        let flat = p.to_flat();
        assert_eq!(flat, vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(p.flat_labels(), vec!["a[0,0]", "a[1,0]", "z[0]", "a[0,1]", "z[1]"]);
        assert_eq!(PronyParameters::from_flat(p.multiplicities(), &flat).unwrap(), p);
    }

    #[test]
    fn forward_map_examples() {
        let m = forward_map(&single(c(1.0, 0.0), vec![c(2.0, 0.0)]), 3);
        assert_eq!(m.values(), &[c(2.0, 0.0); 3]);
        assert_eq!(m.stride(), 1);

        let m = forward_map(&single(c(1.0, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0)]), 3);
        assert_eq!(m.values(), &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);

        let two = PronyParameters::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![vec![c(1.0, 0.0)]; 2]).unwrap();
        let m = forward_map(&two, 4);
        for (got, want) in m.values().iter().zip([2.0, 0.0, 2.0, 0.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn noise_none_is_identity_and_seeded() {
        let m = MeasurementSequence::new((0..10).map(|k| c(k as f64, -(k as f64))).collect());
        assert_eq!(add_noise(&m, &NoiseSpec::none()), m);

        let spec = NoiseSpec::bounded(1e-3, 42);
        let a = add_noise(&m, &spec);
        let b = add_noise(&m, &spec);
        assert_eq!(a, b);
        assert!(a.values().iter().zip(m.values()).all(|(x, y)| (x - y).norm() < 1e-3));
        assert_ne!(a, add_noise(&m, &NoiseSpec::bounded(1e-3, 43)));

        let g = add_noise(&m, &NoiseSpec::gaussian(1e-3, 7));
        assert_eq!(g, add_noise(&m, &NoiseSpec::gaussian(1e-3, 7)));
        assert_ne!(g, m);
    }

    #[test]
    fn gaussian_noise_has_requested_power() {
        let m = MeasurementSequence::new(vec![c(0.0, 0.0); 20000]);
        let g = add_noise(&m, &NoiseSpec::gaussian(0.5, 3));
        let mean_sq = g.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / 20000.0;
        // E|eps|^2 = level^2
        assert!((mean_sq - 0.25).abs() < 0.01, "{mean_sq}");
    }

    #[test]
    fn decimate_examples() {
        let m = MeasurementSequence::new((0..10).map(|k| c(k as f64, 0.0)).collect());
        let d = decimate(&m, 3, 3).unwrap();
        assert_eq!(d.values(), &[c(0.0, 0.0), c(3.0, 0.0), c(6.0, 0.0)]);
        assert_eq!(d.stride(), 3);
        assert_eq!(decimate(&m, 1, 10).unwrap().values(), m.values());
        assert_eq!(decimate(&m, 3, 5), Err(Error::InsufficientForDecimation));
        assert!(decimate(&d, 2, 2).is_err());
    }

    #[test]
    fn scale_map_examples() {
        let p = single(c(0.0, 1.0), vec![c(1.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(scale_map(&p, 1).unwrap(), p);
        let q = scale_map(&p, 2).unwrap();
        assert!((q.nodes()[0] - c(-1.0, 0.0)).norm() < 1e-15);
        let q = scale_map(&p, 10).unwrap();
        assert_eq!(q.coefficients()[0][1], c(30.0, 0.0));

        let aliased = PronyParameters::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![vec![c(1.0, 0.0)]; 2]).unwrap();
        assert_eq!(scale_map(&aliased, 2), Err(Error::AliasedNodes));
    }

    fn at_angles(angles: &[f64]) -> PronyParameters {
        PronyParameters::new(
            angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
            vec![vec![c(1.0, 0.0)]; angles.len()],
        )
        .unwrap()
    }

    #[test]
    fn separation_examples() {
        let r = separation(&at_angles(&[0.0, PI / 2.0]));
        assert!((r.global - PI / 2.0).abs() < 1e-15 && (r.diameter - PI / 2.0).abs() < 1e-15);

        let r = separation(&at_angles(&[0.1, 2.0 * PI - 0.1]));
        assert!((r.global - 0.2).abs() < 1e-12);

        // pairwise: (0, pi/2) = pi/2, (0, pi) = pi, (pi/2, pi) = pi/2
        let r = separation(&at_angles(&[0.0, PI / 2.0, PI]));
        assert!((r.per_node[1] - PI / 2.0).abs() < 1e-15);
        assert!((r.diameter - PI).abs() < 1e-15);

        let r = separation(&at_angles(&[1.0]));
        assert_eq!((r.global, r.diameter), (PI, PI));
    }

    #[test]
    fn choose_decimation_examples() {
        assert_eq!(choose_decimation(1000, 6).unwrap(), 166);
        assert_eq!(choose_decimation(6, 6).unwrap(), 1);
        assert_eq!(choose_decimation(13, 6).unwrap(), 2);
        assert!(matches!(choose_decimation(5, 6), Err(Error::NotEnoughMeasurements { .. })));
    }

    #[test]
    fn parameters_serde_validates() {
        let p = single(c(0.0, 1.0), vec![c(1.0, 2.0)]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"nodes":[[0.0,1.0]],"coefficients":[[[1.0,2.0]]]}"#);
        assert_eq!(serde_json::from_str::<PronyParameters>(&text).unwrap(), p);
        assert!(serde_json::from_str::<PronyParameters>(r#"{"nodes":[[2.0,0.0]],"coefficients":[[[1.0,0.0]]]}"#).is_err());
    }
}
