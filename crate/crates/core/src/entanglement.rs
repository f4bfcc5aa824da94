//! Entanglement detection from the correlation matrix of a conical 2-design
//! applied to both halves of a bipartite state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeamError, Result};
use crate::geam::{design_params, DesignParams, Geam};
use crate::linalg::{self, trace_product, CMatrix};
use crate::states::{schmidt_decompose, DensityMatrix, SchmidtVector};

/// Margin a trace norm must exceed a bound by before it counts as a violation.
pub const TOL_DETECT: f64 = 1e-9;

/// Spread of frame symmetry constants tolerated when reading design constants
/// off a measurement.
pub const DESIGN_TOL: f64 = 1e-9;

const IMAG_TOL: f64 = 1e-10;

/// `B_{(alpha,k),(beta,l)} = Tr[rho (P_{alpha,k} (x) P_{beta,l})]`, rows and
/// columns in lexicographic `(alpha, k)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub entries: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm(&self.entries)
    }
}

fn check_bipartite(geam: &Geam, rho: &DensityMatrix) -> Result<()> {
    if !rho.is_bipartite() || rho.dim() != geam.dim {
        return Err(GeamError::DimensionMismatch {
            expected: format!("bipartite state on {0} x {0}", geam.dim),
            found: format!(
                "{} state of local dimension {}",
                if rho.is_bipartite() { "bipartite" } else { "single-system" },
                rho.dim()
            ),
        });
    }
    Ok(())
}

/// `X_P = Tr_1[rho (P (x) I)]`, so that `Tr[rho (P (x) Q)] = Tr(X_P Q)`.
fn contract_first(rho: &CMatrix, p: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i2, j2| {
        let mut acc = linalg::c64(0.0, 0.0);
        for i1 in 0..d {
            for j1 in 0..d {
                acc += rho[(i1 * d + i2, j1 * d + j2)] * p[(j1, i1)];
            }
        }
        acc
    })
}

pub fn correlation_matrix(geam: &Geam, rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    check_bipartite(geam, rho)?;
    let d = geam.dim;
    let ops: Vec<&CMatrix> = geam.operators().collect();
    let n = ops.len();
    let rows: Vec<Vec<Complex64>> = ops
        .par_iter()
        .map(|p| {
            let x = contract_first(rho.matrix(), p, d);
            ops.iter().map(|q| trace_product(&x, q)).collect()
        })
        .collect();
    let residue = rows
        .iter()
        .flatten()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    if residue > IMAG_TOL {
        return Err(GeamError::InvalidState(format!(
            "correlation entries have imaginary part {residue:.3e}"
        )));
    }
    Ok(CorrelationMatrix {
        entries: DMatrix::from_fn(n, n, |i, j| rows[i][j].re),
    })
}

/// Trace norm of the correlation matrix of a pure state with Schmidt
/// coefficients `lambda`: `C_max + 2 S sum_{j<k} lambda_j lambda_k`.
pub fn pure_state_norm(lambda: &SchmidtVector, params: &DesignParams) -> f64 {
    params.c_max + 2.0 * params.s * lambda.cross_sum()
}

/// `C_max + (r - 1) S`: the largest trace norm a state of Schmidt number at
/// most `r` can reach.
pub fn schmidt_number_bound(params: &DesignParams, r: usize) -> Result<f64> {
    if r == 0 || r > params.dim {
        return Err(GeamError::InvalidParameter(format!(
            "Schmidt number {r} outside 1..={}",
            params.dim
        )));
    }
    Ok(params.c_max + (r as f64 - 1.0) * params.s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtCheck {
    pub r: usize,
    pub bound: f64,
    pub violated: bool,
}

/// Compare a trace norm against the rank-`r` bound. A violation certifies
/// Schmidt number greater than `r`.
pub fn schmidt_check(params: &DesignParams, norm: f64, r: usize) -> Result<SchmidtCheck> {
    let bound = schmidt_number_bound(params, r)?;
    Ok(SchmidtCheck {
        r,
        bound,
        violated: norm > bound + TOL_DETECT,
    })
}

/// Criterion outcome `(violated, lhs, rhs)` for one `r`.
pub fn check_schmidt_criterion(geam: &Geam, rho: &DensityMatrix, r: usize) -> Result<(bool, f64, f64)> {
    let params = design_params(geam, DESIGN_TOL)?;
    let norm = correlation_matrix(geam, rho)?.trace_norm();
    let check = schmidt_check(&params, norm, r)?;
    Ok((check.violated, norm, check.bound))
}

/// `sqrt(2 (1 - Tr rho_1^2))` for a pure bipartite state.
pub fn pure_concurrence(state: &DensityMatrix) -> Result<f64> {
    let lambda = schmidt_decompose(state)?;
    Ok(concurrence_from_schmidt(&lambda))
}

/// `sqrt(2 (1 - sum lambda_j^4))`.
pub fn concurrence_from_schmidt(lambda: &SchmidtVector) -> f64 {
    let quartic: f64 = lambda.coefficients().iter().map(|l| l.powi(4)).sum();
    (2.0 * (1.0 - quartic)).max(0.0).sqrt()
}

/// `eta = sqrt(2 / (d (d - 1))) / S`.
pub fn concurrence_scale(params: &DesignParams) -> f64 {
    let d = params.dim as f64;
    (2.0 / (d * (d - 1.0))).sqrt() / params.s
}

/// `eta (norm - C_max)` before clamping.
pub fn concurrence_bound_raw(params: &DesignParams, norm: f64) -> f64 {
    concurrence_scale(params) * (norm - params.c_max)
}

/// `eta (norm - C_max)`, or 0 when `norm` does not exceed `C_max` by more
/// than [`TOL_DETECT`].
pub fn concurrence_bound(params: &DesignParams, norm: f64) -> f64 {
    if norm > params.c_max + TOL_DETECT {
        concurrence_bound_raw(params, norm)
    } else {
        0.0
    }
}

/// `max(0, eta (||B(rho)||_tr - C_max))`, with round-off above `C_max`
/// treated as zero.
pub fn concurrence_lower_bound(geam: &Geam, rho: &DensityMatrix) -> Result<f64> {
    let params = design_params(geam, DESIGN_TOL)?;
    let norm = correlation_matrix(geam, rho)?.trace_norm();
    Ok(concurrence_bound(&params, norm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub trace_norm: f64,
    pub schmidt_bounds: Vec<SchmidtCheck>,
    /// One more than the largest `r` whose bound is violated; 1 when none is.
    pub min_schmidt_number_certified: usize,
    pub concurrence_lower_bound: f64,
}

pub fn detect(geam: &Geam, rho: &DensityMatrix) -> Result<DetectionReport> {
    let params = design_params(geam, DESIGN_TOL)?;
    let norm = correlation_matrix(geam, rho)?.trace_norm();
    let schmidt_bounds = (1..=geam.dim)
        .map(|r| schmidt_check(&params, norm, r))
        .collect::<Result<Vec<_>>>()?;
    let certified = schmidt_bounds
        .iter()
        .filter(|c| c.violated)
        .map(|c| c.r + 1)
        .max()
        .unwrap_or(1);
    Ok(DetectionReport {
        trace_norm: norm,
        schmidt_bounds,
        min_schmidt_number_certified: certified,
        concurrence_lower_bound: concurrence_bound(&params, norm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::born_probabilities;
    use crate::presets::{preset, Preset};
    use crate::states::{bipartite_from_schmidt, random_mixed, random_separable, seeded_rng};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn qubit_mub() -> (Geam, DesignParams) {
        let g = preset(&Preset::Mub, 2).unwrap();
        let p = design_params(&g, DESIGN_TOL).unwrap();
        (g, p)
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![linalg::c64(s, 0.), linalg::c64(0., 0.), linalg::c64(0., 0.), linalg::c64(s, 0.)]);
        DensityMatrix::from_pure(&v, true).unwrap()
    }

    #[test]
    fn product_of_mixed_is_rank_one() {
        let (g, _) = qubit_mub();
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        let rho = DensityMatrix::product(&m, &m).unwrap();
        let b = correlation_matrix(&g, &rho).unwrap();
        assert_eq!(b.size(), 6);
        let sv = linalg::singular_values(&b.entries);
        assert!(sv[1] < 1e-12);
        for x in b.entries.iter() {
            assert_abs_diff_eq!(*x, 1.0 / 36.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn qubit_mub_values() {
        let (g, params) = qubit_mub();
        let mut rng = seeded_rng(1);
        let product = bipartite_from_schmidt(&SchmidtVector::new(vec![1.0]).unwrap(), 2, &mut rng).unwrap();
        let norm = correlation_matrix(&g, &product).unwrap().trace_norm();
        assert_abs_diff_eq!(norm, 2.0 / 9.0, epsilon = 1e-12);

        let norm = correlation_matrix(&g, &bell()).unwrap().trace_norm();
        assert_abs_diff_eq!(norm, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pure_state_norm(&SchmidtVector::uniform(2).unwrap(), &params), 1.0 / 3.0, epsilon = 1e-12);

        let (violated, lhs, rhs) = check_schmidt_criterion(&g, &bell(), 1).unwrap();
        assert!(violated);
        assert!(lhs > rhs);
        assert_abs_diff_eq!(rhs, 2.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence_lower_bound(&g, &bell()).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn row_sums_are_marginal_probabilities() {
        let (g, _) = qubit_mub();
        let rho = random_separable(2, 4, &mut seeded_rng(3)).unwrap();
        let b = correlation_matrix(&g, &rho).unwrap();
        let marginal = born_probabilities(&g, &rho.reduced_first().unwrap()).unwrap();
        for (i, p) in marginal.entries().iter().enumerate() {
            assert_abs_diff_eq!(b.entries.row(i).sum(), *p, epsilon = 1e-12);
        }
    }

    #[test]
    fn concurrence_examples() {
        let lambda = SchmidtVector::new(vec![0.8f64.sqrt(), 0.2f64.sqrt()]).unwrap();
        assert_abs_diff_eq!(concurrence_from_schmidt(&lambda), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(pure_concurrence(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        let product = bipartite_from_schmidt(&SchmidtVector::uniform(1).unwrap(), 3, &mut seeded_rng(4)).unwrap();
        assert_abs_diff_eq!(pure_concurrence(&product).unwrap(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn detection_report() {
        let g = preset(&Preset::Mub, 4).unwrap();
        let rho = bipartite_from_schmidt(&SchmidtVector::uniform(3).unwrap(), 4, &mut seeded_rng(6)).unwrap();
        let report = detect(&g, &rho).unwrap();
        assert_eq!(report.min_schmidt_number_certified, 3);
        assert!(!report.schmidt_bounds[2].violated);
        assert_abs_diff_eq!(report.trace_norm, report.schmidt_bounds[2].bound, epsilon = 1e-9);

        let (g2, _) = qubit_mub();
        let m = random_mixed(2, 2, &mut seeded_rng(2)).unwrap();
        let product = DensityMatrix::product(&m, &m).unwrap();
        let report = detect(&g2, &product).unwrap();
        assert_eq!(report.min_schmidt_number_certified, 1);
        assert_eq!(report.concurrence_lower_bound, 0.0);
        assert!(schmidt_number_bound(&design_params(&g2, 1e-9).unwrap(), 3).is_err());
    }
}
