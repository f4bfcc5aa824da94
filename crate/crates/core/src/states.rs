//! Density matrices, random state generation and Schmidt decompositions.
//!
//! Bipartite states live on `C^d (x) C^d` with equal factors; amplitudes use
//! the index `i1 * d + i2`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeamError, Result};
use crate::linalg::{self, c64, kron, outer, trace, CMatrix, Tolerances};

/// Seedable, platform-stable generator used for every random state.
pub type StateRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficients at or below this count as zero when computing Schmidt rank.
pub const SCHMIDT_FLOOR: f64 = 1e-12;

const TRACE_TOL: f64 = 1e-12;
const PURITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    bipartite: bool,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix. For bipartite states `dim` is the factor
    /// dimension and the matrix is `dim^2 x dim^2`.
    pub fn new(matrix: CMatrix, bipartite: bool) -> Result<Self> {
        Self::with_tolerances(matrix, bipartite, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: CMatrix, bipartite: bool, tol: &Tolerances) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(GeamError::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", n, matrix.ncols()),
            });
        }
        let dim = if bipartite {
            let d = (n as f64).sqrt().round() as usize;
            if d * d != n {
                return Err(GeamError::DimensionMismatch {
                    expected: "d^2 x d^2 bipartite matrix".into(),
                    found: format!("{n}x{n}"),
                });
            }
            d
        } else {
            n
        };
        if dim < 2 {
            return Err(GeamError::InvalidDimension(dim));
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > tol.hermitian {
            return Err(GeamError::NotHermitian { deviation });
        }
        let tr = trace(&matrix);
        if (tr - c64(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(GeamError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lowest = linalg::min_eigenvalue(&matrix, tol.hermitian)?;
        if lowest < -tol.psd {
            return Err(GeamError::NegativeEigenvalue { eigenvalue: lowest });
        }
        Ok(Self {
            dim,
            bipartite,
            matrix,
        })
    }

    /// `|psi><psi|` after normalizing `psi`.
    pub fn from_pure(psi: &DVector<Complex64>, bipartite: bool) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(GeamError::InvalidState("zero state vector".into()));
        }
        let rho = outer(&psi.unscale(norm));
        Self::new(linalg::hermitian_part(&rho), bipartite)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::new(linalg::identity(d).scale(1.0 / d as f64), false)
    }

    /// `rho_a (x) rho_b` for single-system states of equal dimension.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if a.bipartite || b.bipartite || a.dim != b.dim {
            return Err(GeamError::DimensionMismatch {
                expected: "two single-system states of equal dimension".into(),
                found: format!("d={} and d={}", a.dim, b.dim),
            });
        }
        Self::new(kron(&a.matrix, &b.matrix), true)
    }

    /// Local dimension `d` (the factor dimension for bipartite states).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Side length of the matrix.
    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix, f64::INFINITY).expect("validated Hermitian")
    }

    /// Reduced state on the first factor of a bipartite state.
    pub fn reduced_first(&self) -> Result<DensityMatrix> {
        if !self.bipartite {
            return Err(GeamError::InvalidState("state is not bipartite".into()));
        }
        let r = linalg::partial_trace(&self.matrix, self.dim, self.dim, linalg::Subsystem::Second)?;
        Ok(DensityMatrix {
            dim: self.dim,
            bipartite: false,
            matrix: r,
        })
    }
}

/// Nonincreasing nonnegative Schmidt coefficients with unit 2-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtVector {
    coefficients: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(GeamError::InvalidParameter(
                "Schmidt coefficients must be nonnegative and finite".into(),
            ));
        }
        let norm: f64 = coefficients.iter().map(|x| x * x).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(GeamError::InvalidParameter(format!(
                "squared Schmidt coefficients sum to {norm}, not 1"
            )));
        }
        coefficients.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { coefficients })
    }

    /// `r` equal coefficients `1/sqrt(r)`.
    pub fn uniform(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(GeamError::InvalidParameter("rank must be positive".into()));
        }
        Self::new(vec![1.0 / (rank as f64).sqrt(); rank])
    }

    /// Random coefficients of full length `d`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..d)
            .map(|_| {
                let x: f64 = StandardNormal.sample(rng);
                x.abs()
            })
            .collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut coefficients: Vec<f64> = raw.into_iter().map(|x| x / norm).collect();
        coefficients.sort_by(|a, b| b.total_cmp(a));
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of coefficients above [`SCHMIDT_FLOOR`].
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&x| x > SCHMIDT_FLOOR).count()
    }

    /// `sum_{j<k} lambda_j lambda_k`.
    pub fn cross_sum(&self) -> f64 {
        let total: f64 = self.coefficients.iter().sum();
        let squares: f64 = self.coefficients.iter().map(|x| x * x).sum();
        0.5 * (total * total - squares)
    }
}

/// Complex Gaussian vector, normalized: unitarily invariant on the sphere.
pub fn random_state_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| {
        c64(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let norm = v.norm();
    v.unscale(norm)
}

pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    DensityMatrix::from_pure(&random_state_vector(d, rng), false)
}

/// `G G^dagger / Tr(G G^dagger)` with `G` a `d x rank` complex Gaussian matrix.
pub fn random_mixed<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    if rank == 0 || rank > d {
        return Err(GeamError::InvalidParameter(format!(
            "rank {rank} outside 1..={d}"
        )));
    }
    DensityMatrix::new(ginibre_state(d, rank, rng), false)
}

fn ginibre_state<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, rank, |_, _| {
        c64(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let rho = &g * g.adjoint();
    let tr = trace(&rho).re;
    linalg::hermitian_part(&rho.unscale(tr))
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix
/// with the phases of `R`'s diagonal divided out.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        c64(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c64(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `sum_j lambda_j |e_j> (x) |f_j>` with Haar-random bases `{e_j}`, `{f_j}`.
pub fn bipartite_vector_from_schmidt<R: Rng + ?Sized>(
    lambda: &SchmidtVector,
    d: usize,
    rng: &mut R,
) -> Result<DVector<Complex64>> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    let coeffs = lambda.coefficients();
    if coeffs.len() > d {
        return Err(GeamError::InvalidParameter(format!(
            "{} Schmidt coefficients exceed d = {d}",
            coeffs.len()
        )));
    }
    let ua = random_unitary(d, rng);
    let ub = random_unitary(d, rng);
    Ok(DVector::from_fn(d * d, |idx, _| {
        let (i1, i2) = (idx / d, idx % d);
        coeffs
            .iter()
            .enumerate()
            .map(|(j, &l)| ua[(i1, j)] * ub[(i2, j)] * l)
            .sum()
    }))
}

pub fn bipartite_from_schmidt<R: Rng + ?Sized>(
    lambda: &SchmidtVector,
    d: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&bipartite_vector_from_schmidt(lambda, d, rng)?, true)
}

/// Random pure state on `C^d (x) C^d`.
pub fn random_bipartite_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    DensityMatrix::from_pure(&random_state_vector(d * d, rng), true)
}

/// Random state of the given rank on `C^d (x) C^d`.
pub fn random_bipartite_mixed<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    if rank == 0 || rank > d * d {
        return Err(GeamError::InvalidParameter(format!(
            "rank {rank} outside 1..={}",
            d * d
        )));
    }
    DensityMatrix::new(ginibre_state(d * d, rank, rng), true)
}

/// Random mixture `sum_i q_i rho_i^A (x) rho_i^B` of `terms` product states
/// with random ranks.
pub fn random_separable<R: Rng + ?Sized>(
    d: usize,
    terms: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    if terms == 0 {
        return Err(GeamError::InvalidParameter("need at least one term".into()));
    }
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(d * d, d * d);
    for w in weights {
        let ra = rng.random_range(1..=d);
        let rb = rng.random_range(1..=d);
        let a = ginibre_state(d, ra, rng);
        let b = ginibre_state(d, rb, rng);
        rho += kron(&a, &b).scale(w / total);
    }
    DensityMatrix::new(linalg::hermitian_part(&rho), true)
}

/// Singular values of the `d x d` amplitude matrix `Psi[i1][i2] = psi[i1 d + i2]`.
pub fn schmidt_coefficients(psi: &DVector<Complex64>, d: usize) -> Result<SchmidtVector> {
    if psi.len() != d * d {
        return Err(GeamError::DimensionMismatch {
            expected: format!("vector of length {}", d * d),
            found: format!("length {}", psi.len()),
        });
    }
    let norm = psi.norm();
    let amplitudes = CMatrix::from_fn(d, d, |i, j| psi[i * d + j] / norm);
    let values = linalg::singular_values(&amplitudes);
    // renormalize away rounding so the unit-norm invariant holds exactly enough
    let scale = values.iter().map(|x| x * x).sum::<f64>().sqrt();
    SchmidtVector::new(values.into_iter().map(|x| x / scale).collect())
}

/// Schmidt coefficients of a pure bipartite density matrix.
pub fn schmidt_decompose(state: &DensityMatrix) -> Result<SchmidtVector> {
    let psi = pure_state_vector(state)?;
    schmidt_coefficients(&psi, state.dim())
}

/// Dominant eigenvector of a bipartite state that is pure within 1e-8.
pub fn pure_state_vector(state: &DensityMatrix) -> Result<DVector<Complex64>> {
    if !state.is_bipartite() {
        return Err(GeamError::InvalidState("expected a bipartite state".into()));
    }
    let purity = state.purity();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(GeamError::ImpureInput { purity });
    }
    let spec = linalg::eigh(state.matrix(), f64::INFINITY)?;
    let n = state.total_dim();
    Ok(spec.eigenvectors.column(n - 1).into_owned())
}
