//! Measurement statistics, entropies, Brukner-Zeilinger invariants and
//! skew-information coherence.
//!
//! Most quantities come in two flavours: a direct sum over the measurement
//! operators, and a closed form that only uses the design constants `S` and
//! `mu` (equivalently `C_max`). Logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{GeamError, Result};
use crate::geam::{DesignParams, Geam};
use crate::linalg::{self, trace_product, CMatrix, SpectralDecomposition, Tolerances};
use crate::states::DensityMatrix;

const PROB_NEG_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-12;

/// Outcome probabilities `p_{alpha,k}` in lexicographic `(alpha, k)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
    frame_sizes: Vec<usize>,
}

impl ProbabilityVector {
    /// Entries above `-1e-12` are clamped to zero; the total must be 1 within
    /// `1e-10`.
    pub fn new(entries: Vec<f64>, frame_sizes: Vec<usize>) -> Result<Self> {
        if frame_sizes.iter().sum::<usize>() != entries.len() {
            return Err(GeamError::DimensionMismatch {
                expected: format!("{} entries", frame_sizes.iter().sum::<usize>()),
                found: format!("{} entries", entries.len()),
            });
        }
        let mut clamped = Vec::with_capacity(entries.len());
        for p in entries {
            if !p.is_finite() || p < -PROB_NEG_TOL {
                return Err(GeamError::InvalidParameter(format!(
                    "probability {p} is negative"
                )));
            }
            clamped.push(p.max(0.0));
        }
        let total: f64 = clamped.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(GeamError::InvalidParameter(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self {
            entries: clamped,
            frame_sizes,
        })
    }

    /// A single flat distribution.
    pub fn flat(entries: Vec<f64>) -> Result<Self> {
        let n = entries.len();
        Self::new(entries, vec![n])
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn frame_sizes(&self) -> &[usize] {
        &self.frame_sizes
    }

    /// Probabilities of one frame.
    pub fn frame(&self, alpha: usize) -> &[f64] {
        let start: usize = self.frame_sizes[..alpha].iter().sum();
        &self.entries[start..start + self.frame_sizes[alpha]]
    }

    /// `sum p^2`.
    pub fn coincidence(&self) -> f64 {
        self.entries.iter().map(|p| p * p).sum()
    }
}

fn check_dims(geam: &Geam, rho: &DensityMatrix) -> Result<()> {
    if rho.total_dim() != geam.dim {
        return Err(GeamError::DimensionMismatch {
            expected: format!("state of dimension {}", geam.dim),
            found: format!("dimension {}", rho.total_dim()),
        });
    }
    Ok(())
}

pub fn born_probabilities(geam: &Geam, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    check_dims(geam, rho)?;
    let entries = geam
        .operators()
        .map(|p| trace_product(p, rho.matrix()).re)
        .collect();
    ProbabilityVector::new(entries, geam.frame_sizes())
}

/// `C(rho) = sum p_{alpha,k}^2`, summed directly.
pub fn index_of_coincidence(geam: &Geam, rho: &DensityMatrix) -> Result<f64> {
    Ok(born_probabilities(geam, rho)?.coincidence())
}

fn check_purity(purity: f64, d: usize) -> Result<()> {
    let lo = 1.0 / d as f64;
    if !(lo - PURITY_TOL..=1.0 + PURITY_TOL).contains(&purity) {
        return Err(GeamError::InvalidParameter(format!(
            "purity {purity} outside [1/{d}, 1]"
        )));
    }
    Ok(())
}

fn check_params_dim(params: &DesignParams, d: usize) -> Result<()> {
    if params.dim != d {
        return Err(GeamError::DimensionMismatch {
            expected: format!("design on dimension {d}"),
            found: format!("dimension {}", params.dim),
        });
    }
    Ok(())
}

/// `C = S (Tr rho^2 - 1/d) + mu`.
pub fn ioc_formula(params: &DesignParams, purity: f64, d: usize) -> Result<f64> {
    check_params_dim(params, d)?;
    check_purity(purity, d)?;
    Ok(params.s * (purity - 1.0 / d as f64) + params.mu)
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(GeamError::InvalidParameter(format!(
            "entropy order {nu} must be positive"
        )));
    }
    Ok(())
}

fn power_sum(p: &ProbabilityVector, nu: f64) -> f64 {
    p.entries()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x.powf(nu))
        .sum()
}

pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    -p.entries()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum::<f64>()
}

/// `ln(sum p^nu) / (1 - nu)`; `nu = 1` gives the Shannon entropy.
pub fn renyi_entropy(p: &ProbabilityVector, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if nu == 1.0 {
        return Ok(shannon_entropy(p));
    }
    Ok(power_sum(p, nu).ln() / (1.0 - nu))
}

/// `(1 - sum p^nu) / (nu - 1)`; `nu = 1` gives the Shannon entropy.
pub fn tsallis_entropy(p: &ProbabilityVector, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if nu == 1.0 {
        return Ok(shannon_entropy(p));
    }
    Ok((1.0 - power_sum(p, nu)) / (nu - 1.0))
}

fn check_coincidence(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(GeamError::InvalidParameter(format!(
            "index of coincidence {c} outside (0, 1]"
        )));
    }
    Ok(())
}

/// Lower bound `nu / (2 (1 - nu)) ln C` on the Renyi entropy, valid for
/// `nu >= 2`.
pub fn renyi_bound(c: f64, nu: f64) -> Result<f64> {
    check_coincidence(c)?;
    if !(nu >= 2.0 && nu.is_finite()) {
        return Err(GeamError::InvalidParameter(format!(
            "Renyi bound requires nu >= 2, got {nu}"
        )));
    }
    Ok(nu / (2.0 * (1.0 - nu)) * c.ln())
}

/// `nu`-logarithm `ln_nu x = (x^(1-nu) - 1) / (1 - nu)`, natural log at
/// `nu = 1`.
pub fn nu_logarithm(x: f64, nu: f64) -> f64 {
    if nu == 1.0 {
        x.ln()
    } else {
        (x.powf(1.0 - nu) - 1.0) / (1.0 - nu)
    }
}

/// Lower bound `ln_nu(1/C) = (C^(nu-1) - 1) / (1 - nu)` on the Tsallis
/// entropy, valid for `0 < nu <= 2`. Reduces to `-ln C` at `nu = 1` and to
/// `1 - C` at `nu = 2`.
pub fn tsallis_bound(c: f64, nu: f64) -> Result<f64> {
    check_coincidence(c)?;
    if !(nu > 0.0 && nu <= 2.0) {
        return Err(GeamError::InvalidParameter(format!(
            "Tsallis bound requires 0 < nu <= 2, got {nu}"
        )));
    }
    Ok(nu_logarithm(1.0 / c, nu))
}

/// Brukner-Zeilinger quantities: total variance `V`, total information `I`,
/// total uncertainty `U`, and the extreme variances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BzInvariants {
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "V_min")]
    pub v_min: f64,
    #[serde(rename = "V_max")]
    pub v_max: f64,
}

fn variance_sum(geam: &Geam, rho: &CMatrix) -> f64 {
    geam.operators()
        .map(|p| {
            let first = trace_product(rho, &(p * p)).re;
            let mean = trace_product(rho, p).re;
            first - mean * mean
        })
        .sum()
}

/// `V(rho) = sum [Tr(rho P^2) - Tr(rho P)^2]`, summed directly.
pub fn bz_total_variance(geam: &Geam, rho: &DensityMatrix) -> Result<f64> {
    check_dims(geam, rho)?;
    Ok(variance_sum(geam, rho.matrix()))
}

/// All invariants by direct summation: `I = sum (p - a_alpha/d)^2`,
/// `V_max = V(I/d)`, `V_min = V(|0><0|)` and `U = V - V_min`.
pub fn bz_direct(geam: &Geam, rho: &DensityMatrix) -> Result<BzInvariants> {
    check_dims(geam, rho)?;
    let d = geam.dim;
    let v = variance_sum(geam, rho.matrix());
    let probs = born_probabilities(geam, rho)?;
    let mut info = 0.0;
    for (alpha, frame) in geam.frames.iter().enumerate() {
        let centre = frame.a / d as f64;
        info += probs.frame(alpha).iter().map(|p| (p - centre).powi(2)).sum::<f64>();
    }
    let v_max = variance_sum(geam, &linalg::identity(d).scale(1.0 / d as f64));
    let mut ket0 = linalg::zeros(d);
    ket0[(0, 0)] = linalg::c64(1.0, 0.0);
    let v_min = variance_sum(geam, &ket0);
    Ok(BzInvariants {
        v,
        i: info,
        u: v - v_min,
        v_min,
        v_max,
    })
}

/// `V = S (d - Tr rho^2)`, `I = S (Tr rho^2 - 1/d)`, `U = S (1 - Tr rho^2)`.
pub fn bz_formulas(params: &DesignParams, purity: f64, d: usize) -> Result<BzInvariants> {
    check_params_dim(params, d)?;
    check_purity(purity, d)?;
    let df = d as f64;
    let s = params.s;
    Ok(BzInvariants {
        v: s * (df - purity),
        i: s * (purity - 1.0 / df),
        u: s * (1.0 - purity),
        v_min: params.variance_min(),
        v_max: params.variance_max(),
    })
}

fn check_exponents(mu: f64, nu: Option<f64>) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(GeamError::InvalidParameter(format!("mu = {mu} outside [0, 1]")));
    }
    if let Some(nu) = nu {
        if nu < 0.0 || mu + nu > 1.0 + 1e-15 {
            return Err(GeamError::InvalidParameter(format!(
                "need nu >= 0 and mu + nu <= 1, got mu = {mu}, nu = {nu}"
            )));
        }
    }
    Ok(())
}

/// Eigendecomposition of a state, reused across many observables.
struct Spectrum {
    decomposition: SpectralDecomposition,
    floor: f64,
}

impl Spectrum {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let tol = Tolerances::default();
        Ok(Self {
            decomposition: linalg::psd_eigh(rho.matrix(), &tol)?,
            floor: tol.eigen_floor,
        })
    }

    fn power(&self, lambda: f64, mu: f64) -> f64 {
        linalg::spectral_power(lambda, mu, self.floor)
    }

    /// `Tr rho^mu`.
    fn trace_power(&self, mu: f64) -> f64 {
        self.decomposition
            .eigenvalues
            .iter()
            .map(|&l| self.power(l, mu))
            .sum()
    }

    /// `A` expressed in the eigenbasis of `rho`.
    fn rotate(&self, a: &CMatrix) -> CMatrix {
        let v = &self.decomposition.eigenvectors;
        v.adjoint() * a * v
    }

    /// `Tr(rho^mu A rho^(1-mu) A) = sum_ij l_i^mu l_j^(1-mu) |A_ij|^2` for a
    /// Hermitian `A` already rotated into the eigenbasis.
    fn twisted(&self, rotated: &CMatrix, mu: f64) -> f64 {
        let l = &self.decomposition.eigenvalues;
        let mut total = 0.0;
        for i in 0..l.len() {
            let left = self.power(l[i], mu);
            if left == 0.0 {
                continue;
            }
            for j in 0..l.len() {
                total += left * self.power(l[j], 1.0 - mu) * rotated[(i, j)].norm_sqr();
            }
        }
        total
    }

    /// `Tr(rho A^2)` with `A` rotated into the eigenbasis.
    fn second_moment(&self, rotated: &CMatrix) -> f64 {
        let l = &self.decomposition.eigenvalues;
        let mut total = 0.0;
        for i in 0..l.len() {
            let li = self.power(l[i], 1.0);
            for j in 0..l.len() {
                total += li * rotated[(i, j)].norm_sqr();
            }
        }
        total
    }

    fn skew(&self, rotated: &CMatrix, mu: f64) -> f64 {
        self.second_moment(rotated) - self.twisted(rotated, mu)
    }

    fn skew_pair(&self, rotated: &CMatrix, mu: f64, nu: Option<f64>) -> f64 {
        match nu {
            None => self.skew(rotated, mu),
            Some(nu) => {
                0.5 * (self.skew(rotated, mu) + self.skew(rotated, nu)
                    - self.skew(rotated, mu + nu))
            }
        }
    }

    fn coherence(&self, d: usize, mu: f64) -> f64 {
        d as f64 - self.trace_power(mu) * self.trace_power(1.0 - mu)
    }
}

/// Skew information `J_mu(rho, A) = Tr(rho A^2) - Tr(rho^mu A rho^(1-mu) A)`
/// of a Hermitian observable. With `nu` given, returns the two-parameter
/// version `J_{mu,nu} = (J_mu + J_nu - J_{mu+nu}) / 2`.
pub fn skew_information(rho: &DensityMatrix, a: &CMatrix, mu: f64, nu: Option<f64>) -> Result<f64> {
    check_exponents(mu, nu)?;
    if a.shape() != rho.matrix().shape() {
        return Err(GeamError::DimensionMismatch {
            expected: format!("{0}x{0}", rho.total_dim()),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    let deviation = linalg::hermitian_deviation(a);
    if deviation > Tolerances::default().hermitian {
        return Err(GeamError::NotHermitian { deviation });
    }
    let spectrum = Spectrum::new(rho)?;
    Ok(spectrum.skew_pair(&spectrum.rotate(a), mu, nu))
}

/// `Q_mu(rho) = d - Tr(rho^mu) Tr(rho^(1-mu))`, or with `nu` given
/// `Q_{mu,nu}(rho) = Q_mu + Q_nu - Q_{mu+nu}`.
pub fn state_coherence(rho: &DensityMatrix, mu: f64, nu: Option<f64>) -> Result<f64> {
    check_exponents(mu, nu)?;
    let spectrum = Spectrum::new(rho)?;
    let d = rho.total_dim();
    Ok(match nu {
        None => spectrum.coherence(d, mu),
        Some(nu) => {
            spectrum.coherence(d, mu) + spectrum.coherence(d, nu) - spectrum.coherence(d, mu + nu)
        }
    })
}

/// Coherence with respect to a measurement: the skew information summed over
/// every operator.
pub fn quantum_uncertainty(geam: &Geam, rho: &DensityMatrix, mu: f64, nu: Option<f64>) -> Result<f64> {
    check_dims(geam, rho)?;
    check_exponents(mu, nu)?;
    let spectrum = Spectrum::new(rho)?;
    Ok(geam
        .operators()
        .map(|p| spectrum.skew_pair(&spectrum.rotate(p), mu, nu))
        .sum())
}

/// Closed form of [`quantum_uncertainty`] for a conical 2-design:
/// `S Q_mu(rho)`, or `(S/2) Q_{mu,nu}(rho)`.
pub fn coherence_formula(params: &DesignParams, rho: &DensityMatrix, mu: f64, nu: Option<f64>) -> Result<f64> {
    check_params_dim(params, rho.total_dim())?;
    let q = state_coherence(rho, mu, nu)?;
    Ok(match nu {
        None => params.s * q,
        Some(_) => 0.5 * params.s * q,
    })
}

/// `sum Tr(rho^mu P rho^(1-mu) P)` over all operators.
pub fn twisted_sum_direct(geam: &Geam, rho: &DensityMatrix, mu: f64) -> Result<f64> {
    check_dims(geam, rho)?;
    check_exponents(mu, None)?;
    let spectrum = Spectrum::new(rho)?;
    Ok(geam
        .operators()
        .map(|p| spectrum.twisted(&spectrum.rotate(p), mu))
        .sum())
}

/// `C_max + S [Tr(rho^mu) Tr(rho^(1-mu)) - 1]`.
pub fn twisted_sum_formula(params: &DesignParams, rho: &DensityMatrix, mu: f64) -> Result<f64> {
    check_params_dim(params, rho.total_dim())?;
    check_exponents(mu, None)?;
    let spectrum = Spectrum::new(rho)?;
    Ok(params.c_max + params.s * (spectrum.trace_power(mu) * spectrum.trace_power(1.0 - mu) - 1.0))
}

/// Weighted combination of designs and the state-only value it must equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxCoherence {
    /// `sum_i q_i Q(rho, P_i)` from the closed forms.
    pub weighted: f64,
    /// `Q_mu(rho) / d`, or `Q_{mu,nu}(rho) / (2d)`.
    pub state_value: f64,
}

/// Combine designs with weights `q_i` satisfying `sum q_i S_i = 1/d`.
pub fn max_coherence(
    designs: &[(f64, DesignParams)],
    rho: &DensityMatrix,
    mu: f64,
    nu: Option<f64>,
) -> Result<MaxCoherence> {
    let d = rho.total_dim();
    if designs.is_empty() {
        return Err(GeamError::InvalidParameter("no designs given".into()));
    }
    let total: f64 = designs.iter().map(|(q, p)| q * p.s).sum();
    if (total - 1.0 / d as f64).abs() > 1e-10 {
        return Err(GeamError::InvalidParameter(format!(
            "weighted symmetry constants sum to {total}, expected 1/{d}"
        )));
    }
    let mut weighted = 0.0;
    for (q, params) in designs {
        weighted += q * coherence_formula(params, rho, mu, nu)?;
    }
    let q = state_coherence(rho, mu, nu)?;
    let state_value = match nu {
        None => q / d as f64,
        Some(_) => q / (2.0 * d as f64),
    };
    Ok(MaxCoherence {
        weighted,
        state_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::presets::{preset, Preset};
    use crate::states::{random_mixed, random_pure, seeded_rng};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn ket0(d: usize) -> DensityMatrix {
        let mut v = DVector::zeros(d);
        v[0] = c64(1.0, 0.0);
        DensityMatrix::from_pure(&v, false).unwrap()
    }

    #[test]
    fn qubit_mub_probabilities() {
        let g = preset(&Preset::Mub, 2).unwrap();
        let p = born_probabilities(&g, &ket0(2)).unwrap();
        // frames in X, Y, Z order
        assert_abs_diff_eq!(p.frame(2)[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.frame(2)[1], 0.0, epsilon = 1e-12);
        for alpha in 0..2 {
            for &x in p.frame(alpha) {
                assert_abs_diff_eq!(x, 1.0 / 6.0, epsilon = 1e-12);
            }
        }
        let h = shannon_entropy(&p);
        assert_abs_diff_eq!(h, 3f64.ln() / 3.0 + 2.0 * 6f64.ln() / 3.0, epsilon = 1e-12);
        let bound = tsallis_bound(p.coincidence(), 1.0).unwrap();
        assert_abs_diff_eq!(bound, 4.5f64.ln(), epsilon = 1e-12);
        assert!(h >= bound);
        assert_abs_diff_eq!(p.coincidence(), 2.0 / 9.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(index_of_coincidence(&g, &mixed).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn ioc_formula_examples() {
        let sic = DesignParams::new(2, 1.0 / 6.0, 0.25);
        assert_abs_diff_eq!(ioc_formula(&sic, 0.75, 2).unwrap(), 0.25 + 0.25 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ioc_formula(&sic, 1.0, 2).unwrap(), sic.c_max, epsilon = 1e-15);
        assert_abs_diff_eq!(ioc_formula(&sic, 0.5, 2).unwrap(), sic.mu, epsilon = 1e-15);
        assert!(ioc_formula(&sic, 0.4, 2).is_err());
    }

    #[test]
    fn entropy_examples() {
        let half = ProbabilityVector::flat(vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(renyi_entropy(&half, 2.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(tsallis_entropy(&half, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        let uniform = ProbabilityVector::flat(vec![0.2; 5]).unwrap();
        for nu in [0.5, 2.0, 3.7] {
            assert_abs_diff_eq!(renyi_entropy(&uniform, nu).unwrap(), 5f64.ln(), epsilon = 1e-12);
        }
        let p = ProbabilityVector::flat(vec![0.5, 0.3, 0.2, 0.0]).unwrap();
        let h = shannon_entropy(&p);
        for nu in [1.0 - 1e-4, 1.0 + 1e-4] {
            assert!((renyi_entropy(&p, nu).unwrap() - h).abs() < 1e-4);
            assert!((tsallis_entropy(&p, nu).unwrap() - h).abs() < 1e-4);
        }
        assert!(renyi_entropy(&p, 0.0).is_err());
        assert!(renyi_bound(0.5, 1.5).is_err());
        assert!(tsallis_bound(0.5, 2.5).is_err());
        assert_abs_diff_eq!(tsallis_bound(0.3, 2.0).unwrap(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn renyi_bound_equality_cases() {
        assert_abs_diff_eq!(renyi_bound(1.0 / 6.0, 2.0).unwrap(), 6f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(renyi_bound(2.0 / 9.0, 2.0).unwrap(), 4.5f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn bz_qubit_mub() {
        let g = preset(&Preset::Mub, 2).unwrap();
        let params = DesignParams::new(2, 1.0 / 9.0, 1.0 / 6.0);
        let pure = bz_direct(&g, &ket0(2)).unwrap();
        assert_abs_diff_eq!(pure.v, 1.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pure.v, params.variance_min(), epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let v = bz_total_variance(&g, &mixed).unwrap();
        assert_abs_diff_eq!(v, 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, params.variance_max(), epsilon = 1e-12);

        let rho = random_mixed(2, 2, &mut seeded_rng(9)).unwrap();
        let direct = bz_direct(&g, &rho).unwrap();
        let formula = bz_formulas(&params, rho.purity(), 2).unwrap();
        assert_abs_diff_eq!(direct.v, formula.v, epsilon = 1e-12);
        assert_abs_diff_eq!(direct.i, formula.i, epsilon = 1e-12);
        assert_abs_diff_eq!(direct.u, formula.u, epsilon = 1e-12);
    }

    #[test]
    fn skew_information_examples() {
        let mut rng = seeded_rng(5);
        let rho = random_mixed(3, 3, &mut rng).unwrap();
        // a function of rho commutes with it
        let commuting = rho.matrix() * rho.matrix();
        assert_abs_diff_eq!(skew_information(&rho, &commuting, 0.3, None).unwrap(), 0.0, epsilon = 1e-12);

        let pure = random_pure(3, &mut rng).unwrap();
        let a = linalg::hermitian_part(&CMatrix::from_fn(3, 3, |i, j| c64((i + 2 * j) as f64, (i * j) as f64 - 1.0)));
        let mean = trace_product(pure.matrix(), &a).re;
        let second = trace_product(pure.matrix(), &(&a * &a)).re;
        assert_abs_diff_eq!(
            skew_information(&pure, &a, 0.5, None).unwrap(),
            second - mean * mean,
            epsilon = 1e-10
        );

        for mu in [0.1, 0.4, 0.7] {
            assert_abs_diff_eq!(
                skew_information(&rho, &a, mu, Some(1.0 - mu)).unwrap(),
                skew_information(&rho, &a, mu, None).unwrap(),
                epsilon = 1e-10
            );
        }
        assert!(skew_information(&rho, &a, 0.6, Some(0.5)).is_err());
    }

    #[test]
    fn skew_information_matches_commutator_form() {
        let mut rng = seeded_rng(12);
        let rho = random_mixed(4, 4, &mut rng).unwrap();
        let a = random_mixed(4, 2, &mut rng).unwrap().into_matrix();
        let tol = Tolerances::default();
        for mu in [0.2, 0.5, 0.9] {
            let rm = linalg::fractional_power(rho.matrix(), mu, &tol).unwrap();
            let rn = linalg::fractional_power(rho.matrix(), 1.0 - mu, &tol).unwrap();
            let c1 = &rm * &a - &a * &rm;
            let c2 = &rn * &a - &a * &rn;
            let expected = -0.5 * linalg::trace(&(c1 * c2)).re;
            assert_abs_diff_eq!(skew_information(&rho, &a, mu, None).unwrap(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn coherence_two_routes_qubit_sic() {
        let g = preset(&Preset::Sic, 2).unwrap();
        let params = DesignParams::new(2, 1.0 / 6.0, 0.25);
        let rho = random_mixed(2, 2, &mut seeded_rng(2)).unwrap();
        for mu in [0.1, 0.3, 0.5] {
            assert_abs_diff_eq!(
                quantum_uncertainty(&g, &rho, mu, None).unwrap(),
                coherence_formula(&params, &rho, mu, None).unwrap(),
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                twisted_sum_direct(&g, &rho, mu).unwrap(),
                twisted_sum_formula(&params, &rho, mu).unwrap(),
                epsilon = 1e-10
            );
        }
        assert_abs_diff_eq!(
            quantum_uncertainty(&g, &rho, 0.2, Some(0.5)).unwrap(),
            coherence_formula(&params, &rho, 0.2, Some(0.5)).unwrap(),
            epsilon = 1e-10
        );
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(quantum_uncertainty(&g, &mixed, 0.3, None).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(quantum_uncertainty(&g, &ket0(2), 0.3, None).unwrap(), params.s, epsilon = 1e-12);
    }

    #[test]
    fn max_coherence_identity() {
        let rho = random_mixed(2, 2, &mut seeded_rng(8)).unwrap();
        let sic = DesignParams::new(2, 1.0 / 6.0, 0.25);
        let mub = DesignParams::new(2, 1.0 / 9.0, 1.0 / 6.0);
        // q1/6 + q2/9 = 1/2
        let designs = [(1.5, sic), (2.25, mub)];
        let out = max_coherence(&designs, &rho, 0.3, Some(0.4)).unwrap();
        assert_abs_diff_eq!(out.weighted, out.state_value, epsilon = 1e-12);
        let single = max_coherence(&[(3.0, sic)], &rho, 0.3, None).unwrap();
        assert_abs_diff_eq!(single.weighted, single.state_value, epsilon = 1e-12);
        assert!(max_coherence(&[(1.0, sic)], &rho, 0.3, None).is_err());
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(max_coherence(&designs, &mixed, 0.3, Some(0.4)).unwrap().weighted, 0.0, epsilon = 1e-12);
    }
}
