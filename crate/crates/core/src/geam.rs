//! Construction and validation of generalized equiangular measurements.
//!
//! A GEAM on `C^d` is a union of `N` frames. Frame `alpha` holds `M_alpha`
//! positive operators summing to `gamma_alpha * I`, with
//!
//! ```text
//! Tr P_{a,k}           = a_a = d gamma_a / M_a
//! Tr P_{a,k}^2         = b_a a_a^2
//! Tr P_{a,k} P_{a,l}   = c_a a_a^2,         k != l
//! Tr P_{a,k} P_{b,l}   = a_a a_b / d,       a != b
//! ```
//!
//! Operators are built from a partitioned traceless orthonormal operator
//! basis as `P = (a/d) I + tau H`, and the measurement is a conical 2-design
//! exactly when every frame shares the symmetry constant `S = a^2 (b - c)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeamError, Result};
use crate::linalg::{
    self, gellmann_basis, identity, kron, min_eigenvalue, trace, trace_product, zeros, CMatrix,
    Tolerances,
};

/// Relative tolerance used when checking that frame weights sum to one.
const WEIGHT_TOL: f64 = 1e-12;

/// One frame of a [`GeamConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    /// Number of elements `M_alpha`.
    #[serde(rename = "M")]
    pub outcomes: usize,
    /// Frame weight `gamma_alpha`.
    pub gamma: f64,
    /// Purity parameter `b_alpha`; ignored when the config sets `target_S`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl FrameSpec {
    pub fn new(outcomes: usize, gamma: f64, b: f64) -> Self {
        Self {
            outcomes,
            gamma,
            b: Some(b),
        }
    }

    /// A frame whose `b` is derived from the config's `target_S`.
    pub fn weighted(outcomes: usize, gamma: f64) -> Self {
        Self {
            outcomes,
            gamma,
            b: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeamConfig {
    pub dim: usize,
    pub frames: Vec<FrameSpec>,
    #[serde(rename = "target_S", default, skip_serializing_if = "Option::is_none")]
    pub target_s: Option<f64>,
    /// Per-frame sign of `tau` (`+1` or `-1`); all `+1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_signs: Option<Vec<i8>>,
}

impl GeamConfig {
    /// `N` frames of `M` elements each with equal weights `1/N` and common `b`.
    pub fn uniform(dim: usize, frames: usize, outcomes: usize, b: f64) -> Self {
        Self {
            dim,
            frames: vec![FrameSpec::new(outcomes, 1.0 / frames as f64, b); frames],
            target_s: None,
            tau_signs: None,
        }
    }

    pub fn with_target_s(mut self, s: f64) -> Self {
        self.target_s = Some(s);
        self
    }

    pub fn frame_sizes(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.outcomes).collect()
    }

    pub fn sign(&self, frame: usize) -> f64 {
        match &self.tau_signs {
            Some(signs) if signs[frame] < 0 => -1.0,
            _ => 1.0,
        }
    }

    /// Structural checks: dimension, weights, operator count and signs.
    pub fn check(&self) -> Result<()> {
        let d = self.dim;
        if d < 2 {
            return Err(GeamError::InvalidDimension(d));
        }
        if self.frames.is_empty() {
            return Err(GeamError::InvalidConfig("no frames".into()));
        }
        for (alpha, f) in self.frames.iter().enumerate() {
            if f.outcomes < 2 {
                return Err(GeamError::InvalidConfig(format!(
                    "frame {alpha} has M = {} < 2",
                    f.outcomes
                )));
            }
            if !(f.gamma > 0.0 && f.gamma <= 1.0) {
                return Err(GeamError::InvalidConfig(format!(
                    "frame {alpha} weight {} outside (0, 1]",
                    f.gamma
                )));
            }
        }
        let total: f64 = self.frames.iter().map(|f| f.gamma).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(GeamError::InvalidConfig(format!(
                "frame weights sum to {total}, not 1"
            )));
        }
        let count: usize = self.frames.iter().map(|f| f.outcomes - 1).sum();
        if count != d * d - 1 {
            return Err(GeamError::InvalidConfig(format!(
                "sum of (M - 1) is {count}, expected d^2 - 1 = {}",
                d * d - 1
            )));
        }
        if let Some(signs) = &self.tau_signs {
            if signs.len() != self.frames.len() || signs.iter().any(|s| s.abs() != 1) {
                return Err(GeamError::InvalidConfig(
                    "tau_signs must hold one +1/-1 entry per frame".into(),
                ));
            }
        }
        Ok(())
    }
}

/// `a = d gamma / M`.
pub fn frame_trace(dim: usize, gamma: f64, outcomes: usize) -> f64 {
    dim as f64 * gamma / outcomes as f64
}

/// `c = (M - d b) / (d (M - 1))`.
pub fn overlap_parameter(dim: usize, outcomes: usize, b: f64) -> f64 {
    let (d, m) = (dim as f64, outcomes as f64);
    (m - d * b) / (d * (m - 1.0))
}

/// `S = a^2 (b - c)` for a frame.
pub fn frame_symmetry_constant(dim: usize, gamma: f64, outcomes: usize, b: f64) -> f64 {
    let a = frame_trace(dim, gamma, outcomes);
    a * a * (b - overlap_parameter(dim, outcomes, b))
}

/// Inverse of [`frame_symmetry_constant`] in `b`.
pub fn purity_for_symmetry_constant(dim: usize, gamma: f64, outcomes: usize, s: f64) -> f64 {
    let a = frame_trace(dim, gamma, outcomes);
    let m = outcomes as f64;
    1.0 / dim as f64 + s * (m - 1.0) / (m * a * a)
}

/// Admissible purity range `(1/d, min(d, M)/d]`.
pub fn purity_range(dim: usize, outcomes: usize) -> (f64, f64) {
    let d = dim as f64;
    (1.0 / d, dim.min(outcomes) as f64 / d)
}

fn tau_magnitude(s: f64, outcomes: usize) -> f64 {
    let m = outcomes as f64;
    let root = m.sqrt();
    (s / (m * (root + 1.0).powi(2))).sqrt()
}

/// A traceless orthonormal Hermitian operator basis split into frame groups.
/// Group `alpha` has `M_alpha - 1` elements; `I/sqrt(d)` is implicit.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    pub dim: usize,
    pub groups: Vec<Vec<CMatrix>>,
}

impl OperatorBasis {
    /// Frame sizes `M_alpha` implied by the group lengths.
    pub fn frame_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len() + 1).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = &CMatrix> {
        self.groups.iter().flatten()
    }

    /// The basis `U G U^dagger`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Self {
        let dagger = unitary.adjoint();
        Self {
            dim: self.dim,
            groups: self
                .groups
                .iter()
                .map(|g| g.iter().map(|x| unitary * x * &dagger).collect())
                .collect(),
        }
    }

    /// Largest deviation of the Gram matrix (including `I/sqrt(d)`) from the
    /// identity, together with the largest trace of a group element.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim;
        let mut all: Vec<CMatrix> = vec![identity(d).scale(1.0 / (d as f64).sqrt())];
        all.extend(self.elements().cloned());
        let mut worst = 0.0_f64;
        for (j, x) in all.iter().enumerate() {
            for (k, y) in all.iter().enumerate().skip(j) {
                let expected = if j == k { 1.0 } else { 0.0 };
                let ip = trace_product(&x.adjoint(), y);
                worst = worst.max((ip.re - expected).abs()).max(ip.im.abs());
            }
        }
        worst
    }
}

/// Split the traceless Gell-Mann matrices, in canonical order, into groups of
/// `M_alpha - 1`.
pub fn partition_basis(dim: usize, frame_sizes: &[usize]) -> Result<OperatorBasis> {
    if dim < 2 {
        return Err(GeamError::InvalidDimension(dim));
    }
    if frame_sizes.iter().any(|&m| m < 2) {
        return Err(GeamError::InvalidConfig("every frame needs M >= 2".into()));
    }
    let needed: usize = frame_sizes.iter().map(|m| m - 1).sum();
    if needed != dim * dim - 1 {
        return Err(GeamError::InvalidConfig(format!(
            "sum of (M - 1) is {needed}, expected d^2 - 1 = {}",
            dim * dim - 1
        )));
    }
    let mut traceless = gellmann_basis(dim)?.into_iter().skip(1);
    let groups = frame_sizes
        .iter()
        .map(|&m| traceless.by_ref().take(m - 1).collect())
        .collect();
    Ok(OperatorBasis { dim, groups })
}

/// The zero-sum traceless family `H_{alpha,k}` built from one basis group:
/// `H_k = G - sqrt(M)(1 + sqrt(M)) G_k` for `k < M` and `H_M = (1 + sqrt(M)) G`,
/// where `G` is the sum of the group.
pub fn build_h(group: &[CMatrix], outcomes: usize) -> Result<Vec<CMatrix>> {
    if outcomes < 2 || group.len() != outcomes - 1 {
        return Err(GeamError::InvalidConfig(format!(
            "group of {} operators cannot form a frame of {outcomes}",
            group.len()
        )));
    }
    let d = group[0].nrows();
    let root = (outcomes as f64).sqrt();
    let sum = group.iter().fold(zeros(d), |acc, g| acc + g);
    let mut h: Vec<CMatrix> = group
        .iter()
        .map(|g| &sum - g.scale(root * (1.0 + root)))
        .collect();
    h.push(sum.scale(1.0 + root));
    Ok(h)
}

/// One frame of a constructed measurement.
#[derive(Clone, Debug)]
pub struct Frame {
    pub operators: Vec<CMatrix>,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub tau: f64,
}

impl Frame {
    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn symmetry_constant(&self) -> f64 {
        self.a * self.a * (self.b - self.c)
    }
}

/// A generalized equiangular measurement.
#[derive(Clone, Debug)]
pub struct Geam {
    pub dim: usize,
    pub frames: Vec<Frame>,
}

impl Geam {
    /// Wrap explicit operators, deriving the frame metadata from them:
    /// `a = d gamma / M`, `b` as the frame average of `Tr P^2 / a^2`, `c` from
    /// `b`, and `tau >= 0` from `S = a^2 (b - c)`.
    pub fn from_operators(dim: usize, frames: Vec<(f64, Vec<CMatrix>)>) -> Result<Self> {
        if dim < 2 {
            return Err(GeamError::InvalidDimension(dim));
        }
        if frames.is_empty() {
            return Err(GeamError::InvalidConfig("no frames".into()));
        }
        let mut out = Vec::with_capacity(frames.len());
        for (alpha, (gamma, operators)) in frames.into_iter().enumerate() {
            let m = operators.len();
            if m < 2 {
                return Err(GeamError::InvalidConfig(format!(
                    "frame {alpha} has {m} operators"
                )));
            }
            if let Some(bad) = operators.iter().find(|p| p.shape() != (dim, dim)) {
                return Err(GeamError::DimensionMismatch {
                    expected: format!("{dim}x{dim}"),
                    found: format!("{}x{}", bad.nrows(), bad.ncols()),
                });
            }
            let a = frame_trace(dim, gamma, m);
            let b = operators
                .iter()
                .map(|p| trace_product(p, p).re)
                .sum::<f64>()
                / (m as f64 * a * a);
            let c = overlap_parameter(dim, m, b);
            let s = a * a * (b - c);
            let tau = tau_magnitude(s.max(0.0), m);
            out.push(Frame {
                operators,
                gamma,
                a,
                b,
                c,
                tau,
            });
        }
        Ok(Self { dim, frames: out })
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_operators(&self) -> usize {
        self.frames.iter().map(|f| f.operators.len()).sum()
    }

    pub fn frame_sizes(&self) -> Vec<usize> {
        self.frames.iter().map(Frame::outcomes).collect()
    }

    /// All operators in lexicographic `(alpha, k)` order.
    pub fn operators(&self) -> impl Iterator<Item = &CMatrix> {
        self.frames.iter().flat_map(|f| f.operators.iter())
    }

    /// `(alpha, k)` labels in the same order as [`Geam::operators`].
    pub fn labels(&self) -> Vec<(usize, usize)> {
        self.frames
            .iter()
            .enumerate()
            .flat_map(|(alpha, f)| (0..f.operators.len()).map(move |k| (alpha, k)))
            .collect()
    }
}

/// Build a GEAM from the canonical Gell-Mann partition matching `config`.
pub fn build_geam(config: &GeamConfig) -> Result<Geam> {
    config.check()?;
    let basis = partition_basis(config.dim, &config.frame_sizes())?;
    build_geam_with_basis(config, &basis, &Tolerances::default())
}

/// Build `P_{alpha,k} = (a_alpha/d) I + tau_alpha H_{alpha,k}` on an explicit
/// basis partition, failing if any operator is not positive semidefinite.
pub fn build_geam_with_basis(
    config: &GeamConfig,
    basis: &OperatorBasis,
    tol: &Tolerances,
) -> Result<Geam> {
    config.check()?;
    let d = config.dim;
    if basis.dim != d || basis.frame_sizes() != config.frame_sizes() {
        return Err(GeamError::DimensionMismatch {
            expected: format!("basis for d={d}, frames {:?}", config.frame_sizes()),
            found: format!("basis for d={}, frames {:?}", basis.dim, basis.frame_sizes()),
        });
    }
    if let Some(s) = config.target_s {
        let s_max = max_admissible_s(config);
        if !(s > 0.0 && s <= s_max * (1.0 + 1e-12)) {
            return Err(GeamError::RangeViolation(format!(
                "S = {s} outside admissible range (0, {s_max}]"
            )));
        }
    }

    let mut frames = Vec::with_capacity(config.frames.len());
    for (alpha, (spec, group)) in config.frames.iter().zip(&basis.groups).enumerate() {
        let m = spec.outcomes;
        let a = frame_trace(d, spec.gamma, m);
        let b = match (config.target_s, spec.b) {
            (Some(s), _) => purity_for_symmetry_constant(d, spec.gamma, m, s),
            (None, Some(b)) => b,
            (None, None) => {
                return Err(GeamError::InvalidConfig(format!(
                    "frame {alpha} has no b and the config has no target_S"
                )))
            }
        };
        let (lo, hi) = purity_range(d, m);
        if config.target_s.is_none() && !(b > lo && b <= hi * (1.0 + 1e-12)) {
            return Err(GeamError::RangeViolation(format!(
                "frame {alpha}: b = {b} outside ({lo}, {hi}]"
            )));
        }
        let c = overlap_parameter(d, m, b);
        let s = a * a * (b - c);
        let tau = config.sign(alpha) * tau_magnitude(s, m);
        let offset = identity(d).scale(a / d as f64);
        let operators = build_h(group, m)?
            .into_iter()
            .map(|h| &offset + h.scale(tau))
            .collect();
        frames.push(Frame {
            operators,
            gamma: spec.gamma,
            a,
            b,
            c,
            tau,
        });
    }
    let geam = Geam { dim: d, frames };
    check_positivity(&geam, tol)?;
    Ok(geam)
}

/// Fails with the most negative operator if any eigenvalue is below `-tol.psd`.
pub fn check_positivity(geam: &Geam, tol: &Tolerances) -> Result<()> {
    let labels = geam.labels();
    let ops: Vec<&CMatrix> = geam.operators().collect();
    let minima = ops
        .par_iter()
        .map(|p| min_eigenvalue(p, tol.hermitian))
        .collect::<Result<Vec<f64>>>()?;
    let (worst, &lowest) = minima
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("geam has operators");
    if lowest < -tol.psd {
        let (frame, element) = labels[worst];
        return Err(GeamError::PositivityViolation {
            frame,
            element,
            min_eigenvalue: lowest,
        });
    }
    Ok(())
}

/// Recover the partitioned operator basis from a measurement:
/// `G_{a,k} = [gamma_a I + sqrt(M)P_{a,M} - sqrt(M)(1+sqrt(M))P_{a,k}] / (tau_a M (1+sqrt(M))^2)`.
pub fn recover_basis(geam: &Geam) -> Result<OperatorBasis> {
    let d = geam.dim;
    let mut groups = Vec::with_capacity(geam.frames.len());
    for (alpha, frame) in geam.frames.iter().enumerate() {
        if frame.tau.abs() < 1e-14 {
            return Err(GeamError::DegenerateFrame(alpha));
        }
        let m = frame.outcomes();
        let root = (m as f64).sqrt();
        let last = &frame.operators[m - 1];
        let base = identity(d).scale(frame.gamma) + last.scale(root);
        let denom = frame.tau * m as f64 * (1.0 + root).powi(2);
        groups.push(
            frame.operators[..m - 1]
                .iter()
                .map(|p| (&base - p.scale(root * (1.0 + root))).scale(1.0 / denom))
                .collect(),
        );
    }
    Ok(OperatorBasis { dim: d, groups })
}

/// Upper end of the admissible symmetry-constant range,
/// `min_alpha min{d gamma^2 / M, (d-1)/(M-1) d gamma^2 / M}`.
pub fn max_admissible_s(config: &GeamConfig) -> f64 {
    let d = config.dim as f64;
    config
        .frames
        .iter()
        .map(|f| {
            let m = f.outcomes as f64;
            let base = d * f.gamma * f.gamma / m;
            base.min((d - 1.0) / (m - 1.0) * base)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest `S` in `(0, S_max]` (relative precision 1e-6) for which the common
/// symmetry constant gives a positive measurement on `basis`.
pub fn search_positive_s(config: &GeamConfig, basis: &OperatorBasis, tol: &Tolerances) -> Result<f64> {
    if config.target_s.is_some() {
        return Err(GeamError::InvalidConfig(
            "search_positive_s expects a config without target_S".into(),
        ));
    }
    config.check()?;
    let s_max = max_admissible_s(config);
    let feasible = |s: f64| -> Result<bool> {
        let candidate = config.clone().with_target_s(s);
        match build_geam_with_basis(&candidate, basis, tol) {
            Ok(_) => Ok(true),
            Err(GeamError::PositivityViolation { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if feasible(s_max)? {
        return Ok(s_max);
    }
    let mut lo = 1e-9 * s_max;
    if !feasible(lo)? {
        return Err(GeamError::NoPositiveS);
    }
    let mut hi = s_max;
    while hi - lo > 1e-7 * lo {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Measured per-frame parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

/// Measure `gamma`, `a`, `b`, `c`, `S` of every frame from the operators.
pub fn measure_frames(geam: &Geam) -> Vec<FrameParams> {
    let d = geam.dim as f64;
    geam.frames
        .iter()
        .map(|frame| {
            let m = frame.outcomes();
            let sum = frame.operators.iter().fold(zeros(geam.dim), |acc, p| acc + p);
            let gamma = trace(&sum).re / d;
            let a = frame.operators.iter().map(|p| trace(p).re).sum::<f64>() / m as f64;
            let mut diag = 0.0;
            let mut off = 0.0;
            for (k, p) in frame.operators.iter().enumerate() {
                for (l, q) in frame.operators.iter().enumerate() {
                    let t = trace_product(p, q).re;
                    if k == l {
                        diag += t;
                    } else {
                        off += t;
                    }
                }
            }
            let b = diag / (m as f64 * a * a);
            let c = off / ((m * (m - 1)) as f64 * a * a);
            FrameParams {
                gamma,
                a,
                b,
                c,
                s: a * a * (b - c),
            }
        })
        .collect()
}

/// One row of a [`ValidationReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub conditions: Vec<ConditionCheck>,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.conditions.iter().filter(|c| !c.passed)
    }
}

fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Check every defining condition of a GEAM and report the worst deviation of
/// each. Expected values use the frame's own `gamma` and `b`; `a` and `c`
/// follow from them.
pub fn validate_geam(geam: &Geam, tol: f64) -> ValidationReport {
    let d = geam.dim;
    let df = d as f64;
    let mut hermiticity = 0.0_f64;
    let mut traces = 0.0_f64;
    let mut purity = 0.0_f64;
    let mut within = 0.0_f64;
    let mut cross = 0.0_f64;
    let mut frame_resolution = 0.0_f64;
    let mut total = zeros(d);

    for (alpha, frame) in geam.frames.iter().enumerate() {
        let m = frame.outcomes();
        let a = frame_trace(d, frame.gamma, m);
        let c = overlap_parameter(d, m, frame.b);
        let mut sum = zeros(d);
        for (k, p) in frame.operators.iter().enumerate() {
            hermiticity = hermiticity.max(linalg::hermitian_deviation(p));
            traces = traces.max((trace(p) - a).norm());
            for (l, q) in frame.operators.iter().enumerate().skip(k) {
                let t = trace_product(p, q);
                if k == l {
                    purity = purity.max((t - frame.b * a * a).norm());
                } else {
                    within = within.max((t - c * a * a).norm());
                }
            }
            for other in &geam.frames[alpha + 1..] {
                let a2 = frame_trace(d, other.gamma, other.outcomes());
                for q in &other.operators {
                    cross = cross.max((trace_product(p, q) - a * a2 / df).norm());
                }
            }
            sum += p;
        }
        frame_resolution =
            frame_resolution.max(max_abs_entry(&(&sum - identity(d).scale(frame.gamma))));
        total += sum;
    }
    let resolution = max_abs_entry(&(total - identity(d)));
    let weights = (geam.frames.iter().map(|f| f.gamma).sum::<f64>() - 1.0).abs();
    let expected_count = d * d + geam.num_frames() - 1;
    let count = (geam.num_operators() as f64 - expected_count as f64).abs();

    let min_eigenvalue = geam
        .operators()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|p| {
            linalg::eigvalsh(&linalg::hermitian_part(p), f64::INFINITY)
                .map(|v| v[0])
                .unwrap_or(f64::NEG_INFINITY)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let positivity = (-min_eigenvalue).max(0.0);

    let conditions: Vec<ConditionCheck> = [
        ("hermiticity", hermiticity),
        ("trace", traces),
        ("purity", purity),
        ("within_frame_overlap", within),
        ("cross_frame_overlap", cross),
        ("frame_resolution", frame_resolution),
        ("total_resolution", resolution),
        ("weights", weights),
        ("operator_count", count),
        ("positivity", positivity),
    ]
    .into_iter()
    .map(|(name, dev)| ConditionCheck {
        name: name.to_string(),
        max_deviation: dev,
        passed: dev <= tol,
    })
    .collect();
    let passed = conditions.iter().all(|c| c.passed);
    ValidationReport {
        tol,
        conditions,
        min_eigenvalue,
        passed,
    }
}

/// Result of fitting `sum P (x) P = kappa_+ I (x) I + kappa_- F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicalDesignCheck {
    pub is_design: bool,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub residual: f64,
}

/// `sum_{alpha,k} P_{alpha,k} (x) P_{alpha,k}`.
pub fn tensor_square_sum(geam: &Geam) -> CMatrix {
    let n = geam.dim * geam.dim;
    geam.operators().fold(zeros(n), |acc, p| acc + kron(p, p))
}

/// Least-squares projection of the tensor-square sum onto
/// `span{I (x) I, F}` and the Frobenius residual of that fit.
pub fn check_conical_design(geam: &Geam, tol: f64) -> ConicalDesignCheck {
    let d = geam.dim;
    let df = d as f64;
    let sum = tensor_square_sum(geam);
    let flip = linalg::flip_operator(d).expect("dim >= 2");
    let with_identity = trace(&sum).re;
    let with_flip = trace_product(&flip, &sum).re;
    // Gram matrix of {I, F}: [[d^2, d], [d, d^2]]
    let det = df.powi(4) - df * df;
    let kappa_plus = (df * df * with_identity - df * with_flip) / det;
    let kappa_minus = (df * df * with_flip - df * with_identity) / det;
    let fit = identity(d * d).scale(kappa_plus) + flip.scale(kappa_minus);
    let residual = (sum - fit).norm();
    ConicalDesignCheck {
        is_design: residual <= tol && kappa_minus > 0.0 && kappa_plus >= kappa_minus - tol,
        kappa_plus,
        kappa_minus,
        residual,
    }
}

/// The two constants characterizing a conical 2-design together with the
/// quantities derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    pub dim: usize,
    #[serde(rename = "S")]
    pub s: f64,
    pub mu: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
}

impl DesignParams {
    /// Derive `C_max = (d-1)/d S + mu`, `kappa_+ = mu - S/d`, `kappa_- = S`.
    pub fn new(dim: usize, s: f64, mu: f64) -> Self {
        let d = dim as f64;
        Self {
            dim,
            s,
            mu,
            c_max: (d - 1.0) / d * s + mu,
            kappa_plus: mu - s / d,
            kappa_minus: s,
        }
    }

    /// Same constants expressed through `S` and `C_max`.
    pub fn from_s_and_c_max(dim: usize, s: f64, c_max: f64) -> Self {
        let d = dim as f64;
        Self::new(dim, s, c_max - (d - 1.0) / d * s)
    }

    /// `V_min = (d - 1) S`.
    pub fn variance_min(&self) -> f64 {
        (self.dim as f64 - 1.0) * self.s
    }

    /// `V_max = (d^2 - 1) S / d`.
    pub fn variance_max(&self) -> f64 {
        let d = self.dim as f64;
        (d * d - 1.0) * self.s / d
    }
}

/// Symmetry constants measured from the operators; fails with
/// [`GeamError::NotADesign`] if they differ across frames by more than `tol`.
pub fn design_params(geam: &Geam, tol: f64) -> Result<DesignParams> {
    let frames = measure_frames(geam);
    let (lo, hi) = frames
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
            (lo.min(f.s), hi.max(f.s))
        });
    if hi - lo > tol {
        return Err(GeamError::NotADesign { spread: hi - lo });
    }
    let s = frames.iter().map(|f| f.s).sum::<f64>() / frames.len() as f64;
    let mu = frames.iter().map(|f| f.a * f.gamma).sum::<f64>() / geam.dim as f64;
    Ok(DesignParams::new(geam.dim, s, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn partition_examples() {
        let b = partition_basis(2, &[2, 2, 2]).unwrap();
        assert_eq!(b.groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1, 1]);
        let b = partition_basis(2, &[4]).unwrap();
        assert_eq!(b.groups.len(), 1);
        assert_eq!(b.groups[0].len(), 3);
        let b = partition_basis(3, &[3, 3, 3, 3]).unwrap();
        assert_eq!(b.groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![2; 4]);
        assert!(b.orthonormality_defect() < 1e-14);
        assert!(matches!(
            partition_basis(3, &[3, 3, 3]),
            Err(GeamError::InvalidConfig(_))
        ));
    }

    #[test]
    fn build_h_zero_sum_and_traceless() {
        let basis = partition_basis(3, &[3, 3, 3, 3]).unwrap();
        for group in &basis.groups {
            let h = build_h(group, 3).unwrap();
            assert_eq!(h.len(), 3);
            let sum = h.iter().fold(zeros(3), |acc, x| acc + x);
            assert!(sum.norm() < 1e-12);
            for x in &h {
                assert!(trace(x).norm() < 1e-14);
            }
        }
        // M = 2: H_1 = -(1 + sqrt 2) G, H_2 = (1 + sqrt 2) G
        let basis = partition_basis(2, &[2, 2, 2]).unwrap();
        let g = &basis.groups[2][0];
        let h = build_h(&basis.groups[2], 2).unwrap();
        let k = 1.0 + 2f64.sqrt();
        assert!((&h[0] + g.scale(k)).norm() < 1e-14);
        assert!((&h[1] - g.scale(k)).norm() < 1e-14);
        assert!(build_h(&basis.groups[2], 3).is_err());
    }

    #[test]
    fn h_gram_structure() {
        // <H_k, H_l> = (1 + sqrt M)^2 (M delta_kl - 1)
        let basis = partition_basis(3, &[9]).unwrap();
        let h = build_h(&basis.groups[0], 9).unwrap();
        let scale = (1.0 + 3.0_f64).powi(2);
        for (k, x) in h.iter().enumerate() {
            for (l, y) in h.iter().enumerate() {
                let expected = scale * (if k == l { 9.0 } else { 0.0 } - 1.0);
                assert_abs_diff_eq!(trace_product(x, y).re, expected, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn small_b_limit_is_scaled_identity() {
        let cfg = GeamConfig::uniform(3, 4, 3, 1.0 / 3.0 + 1e-14);
        let geam = build_geam(&cfg).unwrap();
        for f in &geam.frames {
            assert!(f.tau.abs() < 1e-7);
            for p in &f.operators {
                assert!((p - identity(3).scale(f.a / 3.0)).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn qubit_pauli_frames_give_mub() {
        let cfg = GeamConfig::uniform(2, 3, 2, 1.0);
        let geam = build_geam(&cfg).unwrap();
        assert_eq!(geam.num_operators(), 6);
        let report = validate_geam(&geam, 1e-12);
        assert!(report.passed, "{report:?}");
        for p in geam.operators() {
            // (1/3) times a rank one projector
            let q = p.scale(3.0);
            assert!((&q * &q - &q).norm() < 1e-12);
        }
        let params = design_params(&geam, 1e-12).unwrap();
        assert_abs_diff_eq!(params.s, 1.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(params.mu, 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(params.c_max, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn range_violations() {
        let cfg = GeamConfig::uniform(2, 3, 2, 1.2);
        assert!(matches!(build_geam(&cfg), Err(GeamError::RangeViolation(_))));
        let cfg = GeamConfig::uniform(2, 3, 2, 0.5);
        assert!(matches!(build_geam(&cfg), Err(GeamError::RangeViolation(_))));
        let cfg = GeamConfig::uniform(2, 3, 2, 1.0).with_target_s(0.2);
        assert!(matches!(build_geam(&cfg), Err(GeamError::RangeViolation(_))));
        let mut cfg = GeamConfig::uniform(2, 3, 2, 1.0);
        cfg.frames[0].gamma = 0.5;
        assert!(matches!(build_geam(&cfg), Err(GeamError::InvalidConfig(_))));
    }

    #[test]
    fn positivity_violation_names_operator() {
        // Gell-Mann frames in d = 3 cannot reach b = 1
        let cfg = GeamConfig::uniform(3, 4, 3, 1.0);
        match build_geam(&cfg) {
            Err(GeamError::PositivityViolation { min_eigenvalue, frame, element }) => {
                assert!(min_eigenvalue < -1e-10);
                assert!(frame < 4 && element < 3);
            }
            other => panic!("expected positivity violation, got {other:?}"),
        }
    }

    #[test]
    fn max_admissible_examples() {
        let mub = GeamConfig::uniform(2, 3, 2, 1.0);
        assert_abs_diff_eq!(max_admissible_s(&mub), 1.0 / 9.0, epsilon = 1e-15);
        let sic = GeamConfig::uniform(2, 1, 4, 1.0);
        assert_abs_diff_eq!(max_admissible_s(&sic), 1.0 / 6.0, epsilon = 1e-15);
        // M = d^2: the (d-1)/(M-1) branch binds
        for d in 2..6 {
            let cfg = GeamConfig::uniform(d, 1, d * d, 1.0);
            let df = d as f64;
            assert_abs_diff_eq!(
                max_admissible_s(&cfg),
                (df - 1.0) / (df * df - 1.0) * df / (df * df),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn symmetry_constant_round_trip() {
        for (d, m, g) in [(2, 2, 1.0 / 3.0), (3, 9, 1.0), (3, 5, 0.5), (4, 2, 1.0 / 15.0)] {
            let (lo, hi) = purity_range(d, m);
            for t in [0.1, 0.5, 0.9] {
                let b = lo + t * (hi - lo);
                let s = frame_symmetry_constant(d, g, m, b);
                assert_abs_diff_eq!(purity_for_symmetry_constant(d, g, m, s), b, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn unequal_symmetry_constants_are_not_a_design() {
        let mut cfg = GeamConfig::uniform(2, 3, 2, 1.0);
        cfg.frames[0].b = Some(0.8);
        let geam = build_geam(&cfg).unwrap();
        assert!(validate_geam(&geam, 1e-12).passed);
        let check = check_conical_design(&geam, 1e-10);
        assert!(!check.is_design);
        assert!(matches!(
            design_params(&geam, 1e-10),
            Err(GeamError::NotADesign { .. })
        ));
    }

    #[test]
    fn recover_rejects_degenerate_frame() {
        let cfg = GeamConfig::uniform(2, 3, 2, 1.0);
        let mut geam = build_geam(&cfg).unwrap();
        geam.frames[1].tau = 0.0;
        assert!(matches!(recover_basis(&geam), Err(GeamError::DegenerateFrame(1))));
    }

    #[test]
    fn perturbed_operator_fails_resolution() {
        let cfg = GeamConfig::uniform(2, 3, 2, 1.0);
        let mut geam = build_geam(&cfg).unwrap();
        geam.frames[0].operators[0][(0, 0)] += linalg::c64(1e-3, 0.0);
        let report = validate_geam(&geam, 1e-9);
        assert!(!report.passed);
        assert!(!report.condition("frame_resolution").unwrap().passed);
        assert!(!report.condition("total_resolution").unwrap().passed);
        assert!(report.condition("cross_frame_overlap").is_some());
    }
}
