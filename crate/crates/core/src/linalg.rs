//! Dense complex matrix substrate.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`. Bipartite
//! operators use the index convention `row = i1 * d2 + i2`, which is also
//! what `DMatrix::kronecker` produces.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{GeamError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Numerical tolerances shared by the linear-algebra helpers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Maximum allowed `|M[i][j] - conj(M[j][i])|` for a Hermitian matrix.
    pub hermitian: f64,
    /// Relative reconstruction error of a spectral decomposition.
    pub spectral: f64,
    /// Eigenvalues down to `-psd` still count as positive semidefinite.
    pub psd: f64,
    /// Eigenvalues below this are treated as exactly zero.
    pub eigen_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            spectral: 1e-10,
            psd: 1e-10,
            eigen_floor: 1e-12,
        }
    }
}

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> CMatrix {
    CMatrix::zeros(d, d)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `|psi><psi|` for a (not necessarily normalized) vector.
pub fn outer(psi: &DVector<Complex64>) -> CMatrix {
    psi * psi.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(GeamError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(m.nrows())
}

/// Largest entry of `M - M^dagger` in absolute value.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermitian_deviation(m) <= tol
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Hilbert-Schmidt inner product `Tr(A^dagger B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    ensure_square(a)?;
    ensure_square(b)?;
    if a.shape() != b.shape() {
        return Err(GeamError::DimensionMismatch {
            expected: format!("{}x{}", a.nrows(), a.ncols()),
            found: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigendecomposition `M = V diag(eigenvalues) V^dagger` of a Hermitian matrix,
/// eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `V f(Lambda) V^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_eigenvalues(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition. Fails if `m` is not Hermitian within
/// `tol_hermitian`; the anti-Hermitian residue is discarded before solving.
pub fn eigh(m: &CMatrix, tol_hermitian: f64) -> Result<SpectralDecomposition> {
    ensure_square(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol_hermitian {
        return Err(GeamError::NotHermitian { deviation });
    }
    Ok(eigh_unchecked(&hermitian_part(m)))
}

fn eigh_unchecked(m: &CMatrix) -> SpectralDecomposition {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix, tol_hermitian: f64) -> Result<Vec<f64>> {
    ensure_square(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol_hermitian {
        return Err(GeamError::NotHermitian { deviation });
    }
    let mut values: Vec<f64> = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eigenvalue(m: &CMatrix, tol_hermitian: f64) -> Result<f64> {
    Ok(eigvalsh(m, tol_hermitian)?[0])
}

/// `x^mu` for a clamped eigenvalue. Values below `floor` are zero for every
/// `mu`, so `mu = 0` yields the support projector rather than the identity.
#[inline]
pub fn spectral_power(x: f64, mu: f64, floor: f64) -> f64 {
    if x < floor {
        0.0
    } else if mu == 0.0 {
        1.0
    } else {
        x.powf(mu)
    }
}

/// `rho^mu` for a positive semidefinite `rho` and `mu` in `[0, 1]`.
pub fn fractional_power(rho: &CMatrix, mu: f64, tol: &Tolerances) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(GeamError::InvalidParameter(format!(
            "fractional power exponent {mu} outside [0, 1]"
        )));
    }
    let spec = psd_eigh(rho, tol)?;
    Ok(spec.map_eigenvalues(|x| spectral_power(x, mu, tol.eigen_floor)))
}

/// Eigendecomposition of a matrix that must be positive semidefinite within
/// `tol.psd`.
pub fn psd_eigh(rho: &CMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let spec = eigh(rho, tol.hermitian)?;
    let lowest = spec.min_eigenvalue();
    if lowest < -tol.psd {
        return Err(GeamError::NegativeEigenvalue { eigenvalue: lowest });
    }
    Ok(spec)
}

/// Which tensor factor a partial trace removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace over `traced` of an operator on `C^d1 (x) C^d2`.
pub fn partial_trace(rho: &CMatrix, d1: usize, d2: usize, traced: Subsystem) -> Result<CMatrix> {
    let n = ensure_square(rho)?;
    if d1 == 0 || d2 == 0 || d1 * d2 != n {
        return Err(GeamError::DimensionMismatch {
            expected: format!("{}x{} matrix for {d1} (x) {d2}", d1 * d2, d1 * d2),
            found: format!("{n}x{n}"),
        });
    }
    Ok(match traced {
        Subsystem::Second => CMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| rho[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Subsystem::First => CMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| rho[(k * d2 + i, k * d2 + j)]).sum()
        }),
    })
}

/// The swap `sum_{m,n} |m><n| (x) |n><m|` on `C^d (x) C^d`.
pub fn flip_operator(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    let mut f = zeros(d * d);
    for m in 0..d {
        for n in 0..d {
            f[(m * d + n, n * d + m)] = c64(1.0, 0.0);
        }
    }
    Ok(f)
}

/// Singular values, descending.
pub fn singular_values<T>(m: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    if m.is_empty() {
        return Vec::new();
    }
    let mut values: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Sum of singular values.
pub fn trace_norm<T>(m: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    singular_values(m).iter().sum()
}

/// Generalized Gell-Mann basis of `d x d` Hermitian matrices, orthonormal
/// under the Hilbert-Schmidt product.
///
/// Element 0 is `I/sqrt(d)`. The traceless part follows in a fixed order:
/// symmetric off-diagonal pairs `(j, k)` with `j < k` in lexicographic order,
/// then the antisymmetric pairs in the same order, then the diagonal
/// matrices `diag(1, .., 1, -l, 0, ..)/sqrt(l(l+1))` for `l = 1..d-1`.
pub fn gellmann_basis(d: usize) -> Result<Vec<CMatrix>> {
    if d < 2 {
        return Err(GeamError::InvalidDimension(d));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    basis.push(identity(d).scale(1.0 / (d as f64).sqrt()));

    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| ((j + 1)..d).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut m = zeros(d);
        m[(j, k)] = c64(inv_sqrt2, 0.0);
        m[(k, j)] = c64(inv_sqrt2, 0.0);
        basis.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = zeros(d);
        m[(j, k)] = c64(0.0, -inv_sqrt2);
        m[(k, j)] = c64(0.0, inv_sqrt2);
        basis.push(m);
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = zeros(d);
        for i in 0..l {
            m[(i, i)] = c64(1.0 / norm, 0.0);
        }
        m[(l, l)] = c64(-(l as f64) / norm, 0.0);
        basis.push(m);
    }
    Ok(basis)
}
