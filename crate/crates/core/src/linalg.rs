//! Dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Build a complex matrix from row-major rows.
pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn diag(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry of |M − M†|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Hermitian part (M + M†)/2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Conjugation U ρ U†.
pub fn conjugate(u: &CMatrix, rho: &CMatrix) -> CMatrix {
    u * rho * u.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
///
/// Columns of the returned matrix are the corresponding orthonormal
/// eigenvectors. The input is symmetrized before decomposition; callers are
/// responsible for checking Hermiticity when it matters.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Rebuild V diag(f(λ)) V† from an eigen-decomposition.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// slightly negative eigenvalues from rounding are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = eigh(m);
    spectral_map(&values, &vectors, |l| c(l.max(0.0).sqrt(), 0.0))
}

/// Largest singular value of a real matrix.
pub fn spectral_norm(m: &RMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// ‖M†M − 1‖_max, the deviation from unitarity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let gram = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn ensure_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if m.nrows() != n { m.nrows() } else { m.ncols() } });
    }
    Ok(())
}

/// Principal fractional power U^{1/k} of a unitary, via its eigenphases in (−π, π].
///
/// A unitary is normal, so a Schur-free route works: U = H + iK with commuting
/// Hermitian H, K. Diagonalizing the Hermitian matrix H + εK with a generic ε
/// separates any degeneracies of H, and its eigenvectors diagonalize U.
pub fn unitary_root(u: &CMatrix, k: f64) -> Result<CMatrix> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("root order must be positive, got {k}")));
    }
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::Domain(format!("matrix is not unitary (defect {defect:.2e})")));
    }
    let herm = hermitian_part(u);
    let anti = (u - u.adjoint()) * c(0.0, -0.5);
    let probe = &herm + &anti * c(0.618_033_988_749_894_8, 0.0);
    let (_, vectors) = eigh(&probe);
    let diag_u = vectors.adjoint() * u * &vectors;
    let n = u.nrows();
    let mut root = vectors.clone();
    for j in 0..n {
        let phase = diag_u[(j, j)].arg();
        let w = Complex64::from_polar(1.0, phase / k);
        for i in 0..n {
            root[(i, j)] *= w;
        }
    }
    Ok(root * vectors.adjoint())
}
