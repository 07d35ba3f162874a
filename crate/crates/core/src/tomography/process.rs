//! Pauli transfer matrices and process-tomography figures of merit.
//!
//! Pauli strings are ordered with the first qubit most significant:
//! II, IX, IY, IZ, XI, …, ZZ.

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c, eigh, spectral_norm, trace, CMatrix, CVector, RMatrix, ONE, ZERO};

fn single_paulis() -> [CMatrix; 4] {
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]),
    ]
}

/// All 4ⁿ n-qubit Pauli strings (unnormalized).
pub fn pauli_basis(n_qubits: usize) -> Vec<CMatrix> {
    let singles = single_paulis();
    let mut basis = vec![CMatrix::identity(1, 1)];
    for _ in 0..n_qubits {
        basis = basis.iter().flat_map(|b| singles.iter().map(move |s| b.kronecker(s))).collect();
    }
    basis
}

/// Label of Pauli string `k`, e.g. "IX".
pub fn pauli_label(n_qubits: usize, k: usize) -> String {
    (0..n_qubits).rev().map(|q| ['I', 'X', 'Y', 'Z'][(k >> (2 * q)) & 3]).collect()
}

/// R_ij = Tr[P_i Λ(P_j)] / 2ⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTransferMatrix {
    n_qubits: usize,
    r: RMatrix,
}

impl PauliTransferMatrix {
    pub fn new(n_qubits: usize, r: RMatrix) -> Result<PauliTransferMatrix> {
        let d2 = 1usize << (2 * n_qubits);
        if r.nrows() != d2 || r.ncols() != d2 {
            return Err(Error::DimensionMismatch { expected: d2, found: r.nrows() });
        }
        Ok(PauliTransferMatrix { n_qubits, r })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.r
    }

    /// First row equals (1, 0, …, 0) within `tol`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.r.row(0).iter().enumerate().all(|(j, &x)| (x - if j == 0 { 1.0 } else { 0.0 }).abs() <= tol)
    }

    /// All entries lie in [−1, 1] within `tol`.
    pub fn entries_bounded(&self, tol: f64) -> bool {
        self.r.iter().all(|x| x.abs() <= 1.0 + tol)
    }

    /// PTM of `self` applied after `first`.
    pub fn after(&self, first: &PauliTransferMatrix) -> Result<PauliTransferMatrix> {
        PauliTransferMatrix::new(self.n_qubits, &self.r * &first.r)
    }

    /// Act on an operator through its Pauli expansion.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let basis = pauli_basis(self.n_qubits);
        let d = (1usize << self.n_qubits) as f64;
        let coeffs: Vec<f64> = basis.iter().map(|p| trace(&(p * rho)).re).collect();
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for (i, p) in basis.iter().enumerate() {
            let w: f64 = (0..basis.len()).map(|j| self.r[(i, j)] * coeffs[j]).sum();
            out += p * c(w / d, 0.0);
        }
        out
    }

    /// Choi matrix Σ_ab |a⟩⟨b| ⊗ Λ(|a⟩⟨b|).
    pub fn choi(&self) -> CMatrix {
        let d = 1usize << self.n_qubits;
        let basis = pauli_basis(self.n_qubits);
        let images: Vec<CMatrix> = (0..basis.len())
            .map(|j| {
                let mut acc = CMatrix::zeros(d, d);
                for (i, p) in basis.iter().enumerate() {
                    acc += p * c(self.r[(i, j)], 0.0);
                }
                acc
            })
            .collect();
        let mut choi = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                // |a⟩⟨b| = Σ_j (P_j)_{ba} P_j / d
                let mut img = CMatrix::zeros(d, d);
                for (j, p) in basis.iter().enumerate() {
                    img += &images[j] * (p[(b, a)] / c(d as f64, 0.0));
                }
                choi.view_mut((a * d, b * d), (d, d)).copy_from(&img);
            }
        }
        choi
    }

    /// Inverse of [`choi`](Self::choi).
    pub fn from_choi(n_qubits: usize, choi: &CMatrix) -> Result<PauliTransferMatrix> {
        let d = 1usize << n_qubits;
        if choi.nrows() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: choi.nrows() });
        }
        let block = |a: usize, b: usize| choi.view((a * d, b * d), (d, d)).into_owned();
        ptm_from_channel(n_qubits, |x| {
            let mut out = CMatrix::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    out += block(a, b) * x[(a, b)];
                }
            }
            out
        })
    }

    /// Nearest completely positive map: the Choi matrix is projected onto PSD
    /// matrices of trace 2ⁿ. Trace preservation is not enforced.
    pub fn nearest_cp(&self) -> Result<PauliTransferMatrix> {
        let d = (1usize << self.n_qubits) as f64;
        let choi = self.choi() / c(d, 0.0);
        let (projected, _) = super::state::project_physical(&choi)?;
        PauliTransferMatrix::from_choi(self.n_qubits, &(projected.into_matrix() * c(d, 0.0)))
    }
}

/// PTM of a linear map given on arbitrary 2ⁿ×2ⁿ operators.
pub fn ptm_from_channel(n_qubits: usize, channel: impl Fn(&CMatrix) -> CMatrix) -> Result<PauliTransferMatrix> {
    let basis = pauli_basis(n_qubits);
    let d = (1usize << n_qubits) as f64;
    let images: Vec<CMatrix> = basis.iter().map(&channel).collect();
    for img in &images {
        if img.nrows() != basis[0].nrows() || img.ncols() != basis[0].ncols() {
            return Err(Error::DimensionMismatch { expected: basis[0].nrows(), found: img.nrows() });
        }
    }
    let r = RMatrix::from_fn(basis.len(), basis.len(), |i, j| trace(&(&basis[i] * &images[j])).re / d);
    PauliTransferMatrix::new(n_qubits, r)
}

/// PTM of ρ ↦ UρU†.
pub fn ptm_from_unitary(u: &CMatrix) -> Result<PauliTransferMatrix> {
    let n = (u.nrows() as f64).log2().round() as usize;
    if 1usize << n != u.nrows() {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: u.nrows() });
    }
    ptm_from_channel(n, |x| u * x * u.adjoint())
}

fn ensure_match(a: &PauliTransferMatrix, b: &PauliTransferMatrix, n_qubits: usize) -> Result<()> {
    let d2 = 1usize << (2 * n_qubits);
    for m in [a.matrix(), b.matrix()] {
        if m.nrows() != d2 {
            return Err(Error::DimensionMismatch { expected: d2, found: m.nrows() });
        }
    }
    Ok(())
}

/// F_g = (Tr[R_idᵀ R_exp] + 2n) / (4n² + 2n).
pub fn gate_fidelity(r_exp: &PauliTransferMatrix, r_ideal: &PauliTransferMatrix, n_qubits: usize) -> Result<f64> {
    ensure_match(r_exp, r_ideal, n_qubits)?;
    let n = n_qubits as f64;
    let overlap = (r_ideal.matrix().transpose() * r_exp.matrix()).trace();
    Ok((overlap + 2.0 * n) / (4.0 * n * n + 2.0 * n))
}

/// Process fidelity Tr[R_idᵀ R_exp] / 4ⁿ.
pub fn process_fidelity(r_exp: &PauliTransferMatrix, r_ideal: &PauliTransferMatrix) -> Result<f64> {
    ensure_match(r_exp, r_ideal, r_exp.n_qubits())?;
    let d2 = r_exp.matrix().nrows() as f64;
    Ok((r_ideal.matrix().transpose() * r_exp.matrix()).trace() / d2)
}

/// γ_np = ½ ‖R_raw − R_fit‖₂ / (2n).
pub fn nonphysical_error(r_raw: &PauliTransferMatrix, r_fit: &PauliTransferMatrix, n_qubits: usize) -> Result<f64> {
    ensure_match(r_raw, r_fit, n_qubits)?;
    Ok(0.5 * spectral_norm(&(r_raw.matrix() - r_fit.matrix())) / (2.0 * n_qubits as f64))
}

/// The 16 product inputs {|0⟩, |1⟩, |+⟩, |+i⟩}^⊗2, qubit 1 varying slowest.
pub fn process_tomography_inputs() -> Vec<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [
        CVector::from_vec(vec![ONE, ZERO]),
        CVector::from_vec(vec![ZERO, ONE]),
        CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
        CVector::from_vec(vec![c(s, 0.0), c(0.0, s)]),
    ];
    let mut out = Vec::with_capacity(16);
    for a in &kets {
        for b in &kets {
            out.push(DensityMatrix::pure(&a.kronecker(b)).expect("normalized product state"));
        }
    }
    out
}

/// Linear-inversion PTM from input states and the corresponding outputs.
pub fn reconstruct_ptm(inputs: &[DensityMatrix], outputs: &[CMatrix]) -> Result<PauliTransferMatrix> {
    let dim = inputs.first().map(|r| r.dim()).ok_or_else(|| Error::Domain("no inputs".into()))?;
    let n = (dim as f64).log2().round() as usize;
    let basis = pauli_basis(n);
    if inputs.len() != basis.len() || outputs.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: inputs.len().min(outputs.len()) });
    }
    let vectorize = |m: &CMatrix| -> Vec<f64> { basis.iter().map(|p| trace(&(p * m)).re).collect() };
    let cols_in: Vec<Vec<f64>> = inputs.iter().map(|r| vectorize(r.matrix())).collect();
    let cols_out: Vec<Vec<f64>> = outputs.iter().map(vectorize).collect();
    let k = basis.len();
    let b_in = RMatrix::from_fn(k, k, |i, j| cols_in[j][i]);
    let b_out = RMatrix::from_fn(k, k, |i, j| cols_out[j][i]);
    let inv = b_in.try_inverse().ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    PauliTransferMatrix::new(n, b_out * inv)
}

/// Smallest eigenvalue of the normalized Choi matrix; negative means not CP.
pub fn choi_min_eigenvalue(r: &PauliTransferMatrix) -> f64 {
    let (values, _) = eigh(&r.choi());
    values.first().copied().unwrap_or(0.0)
}
