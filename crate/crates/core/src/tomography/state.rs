//! State-tomography post-processing.

use crate::channels::{check_state, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{c, eigh, frobenius, hermitian_part, psd_sqrt, trace, CMatrix};

/// Euclidean projection of `values` onto the probability simplex.
///
/// For a unit-sum input this is the usual eigenvalue water-filling: the most
/// negative entries are zeroed one by one and their weight spread evenly over
/// the rest.
fn project_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut shift = 0.0;
    let mut running = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        running += v;
        let candidate = (running - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            shift = candidate;
        }
    }
    values.iter().map(|&v| (v - shift).max(0.0)).collect()
}

/// Nearest unit-trace PSD matrix in Hilbert–Schmidt distance, with
/// D = Tr[(ρ_p − ρ_m)²]. The input is symmetrized first.
pub fn project_physical(rho_measured: &CMatrix) -> Result<(DensityMatrix, f64)> {
    if rho_measured.nrows() != rho_measured.ncols() {
        return Err(Error::DimensionMismatch { expected: rho_measured.nrows(), found: rho_measured.ncols() });
    }
    let herm = hermitian_part(rho_measured);
    let (values, vectors) = eigh(&herm);
    let projected = project_simplex(&values);
    let mut scaled = vectors.clone();
    for (j, &w) in projected.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    let rho_p = scaled * vectors.adjoint();
    let rho_p = hermitian_part(&rho_p);
    let distance = frobenius(&(&rho_p - rho_measured)).powi(2);
    Ok((DensityMatrix::unchecked(rho_p), distance))
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    check_state(rho.matrix())?;
    let m = rho.matrix();
    // Y⊗Y is real with entries ±1 on the anti-diagonal.
    let yy = CMatrix::from_fn(4, 4, |i, j| if i + j == 3 { c(if i == 0 || i == 3 { -1.0 } else { 1.0 }, 0.0) } else { c(0.0, 0.0) });
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let root = psd_sqrt(m);
    let (values, _) = eigh(&(&root * tilde * &root));
    let mut lambdas: Vec<f64> = values.iter().map(|v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Uhlmann fidelity (Tr√(√ρ σ √ρ))². When either state is pure this is
/// evaluated exactly as Tr[ρσ].
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let purity = |m: &CMatrix| trace(&(m * m)).re;
    if (purity(rho.matrix()) - 1.0).abs() < 1e-12 || (purity(sigma.matrix()) - 1.0).abs() < 1e-12 {
        return Ok(trace(&(rho.matrix() * sigma.matrix())).re);
    }
    let root = psd_sqrt(rho.matrix());
    let inner = &root * sigma.matrix() * &root;
    let (values, _) = eigh(&inner);
    Ok(values.iter().map(|v| v.max(0.0).sqrt()).sum::<f64>().powi(2))
}
