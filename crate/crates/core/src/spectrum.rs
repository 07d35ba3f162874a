//! Exact diagonalization, bare-state labeling, and the exact ZZ rate
//! ζ = ω₁₁₀₀ − ω₁₀₀₀ − ω₀₁₀₀ (energies measured from the dressed ground state).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::hilbert::{build_hamiltonian_in_frame, BareIndex, HilbertSpace, Operator};
use crate::linalg::{eigh, CMatrix, ZERO};

/// Bare states whose best overlap is at or below this are flagged as hybridized.
pub const HYBRIDIZATION_THRESHOLD: f64 = 0.5;

/// Relative Hermiticity defect above which `diagonalize` refuses its input.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

pub const GROUND: BareIndex = [0, 0, 0, 0];
pub const EXCITED_Q1: BareIndex = [1, 0, 0, 0];
pub const EXCITED_Q2: BareIndex = [0, 1, 0, 0];
pub const EXCITED_BOTH: BareIndex = [1, 1, 0, 0];

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub space: Arc<HilbertSpace>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// max_k ‖H v_k − λ_k v_k‖.
    pub fn max_residual(&self, h: &Operator) -> f64 {
        let m = h.matrix();
        (0..self.len())
            .map(|k| {
                let v = self.eigenvectors.column(k);
                (m * v - v * crate::linalg::c(self.eigenvalues[k], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// max |V†V − 1|.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let n = g.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - crate::linalg::c(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Full dense diagonalization of a Hermitian operator.
pub fn diagonalize(h: &Operator) -> Result<Spectrum> {
    let defect = h.relative_hermiticity_defect();
    if defect > HERMITICITY_TOLERANCE {
        return Err(Error::Domain(format!("operator is not Hermitian (relative defect {defect:.2e})")));
    }
    let (eigenvalues, eigenvectors) = eigh(h.matrix());
    Ok(Spectrum { space: h.space_arc().clone(), eigenvalues, eigenvectors })
}

/// Diagonalize block by block in the total-excitation sectors N ≤ `max_excitations`.
///
/// Requires H to conserve Σnᵢ; couplings between sectors larger than
/// 1e−10·‖H‖ are reported as a domain error. Eigenvectors are supported in a
/// single sector by construction. The returned spectrum has one column per
/// retained basis state (fewer than `total_dim` when sectors are dropped).
pub fn diagonalize_sectors(h: &Operator, max_excitations: usize) -> Result<Spectrum> {
    let defect = h.relative_hermiticity_defect();
    if defect > HERMITICITY_TOLERANCE {
        return Err(Error::Domain(format!("operator is not Hermitian (relative defect {defect:.2e})")));
    }
    let space = h.space_arc().clone();
    let m = h.matrix();
    let n = space.total_dim();
    let sector_of: Vec<usize> = (0..n).map(|i| space.excitations(i)).collect();

    let norm = h.frobenius_norm();
    let mut leak = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if sector_of[i] != sector_of[j] {
                leak = leak.max(m[(i, j)].norm());
            }
        }
    }
    if norm > 0.0 && leak > 1e-10 * norm {
        return Err(Error::Domain(format!("operator couples excitation sectors (max element {leak:.3e})")));
    }

    let mut pairs: Vec<(f64, Vec<(usize, num_complex::Complex64)>)> = Vec::new();
    for sector in 0..=max_excitations {
        let members: Vec<usize> = (0..n).filter(|&i| sector_of[i] == sector).collect();
        if members.is_empty() {
            continue;
        }
        let block = CMatrix::from_fn(members.len(), members.len(), |a, b| m[(members[a], members[b])]);
        let (vals, vecs) = eigh(&block);
        for (k, val) in vals.into_iter().enumerate() {
            let support = members.iter().enumerate().map(|(a, &i)| (i, vecs[(a, k)])).collect();
            pairs.push((val, support));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut eigenvectors = CMatrix::from_element(n, pairs.len(), ZERO);
    let mut eigenvalues = Vec::with_capacity(pairs.len());
    for (k, (val, support)) in pairs.into_iter().enumerate() {
        eigenvalues.push(val);
        for (i, z) in support {
            eigenvectors[(i, k)] = z;
        }
    }
    Ok(Spectrum { space, eigenvalues, eigenvectors })
}

/// Eigenstates identified with bare Fock labels.
#[derive(Debug, Clone)]
pub struct LabeledSpectrum {
    pub eigenvalues: Vec<f64>,
    /// bare label → eigenvector index
    pub labels: BTreeMap<BareIndex, usize>,
    /// bare label → |⟨bare|eigen⟩|² of the assigned pair
    pub overlaps: BTreeMap<BareIndex, f64>,
    pub hybridized: BTreeSet<BareIndex>,
}

impl LabeledSpectrum {
    pub fn energy(&self, label: BareIndex) -> Option<f64> {
        self.labels.get(&label).map(|&k| self.eigenvalues[k])
    }

    pub fn overlap(&self, label: BareIndex) -> Option<f64> {
        self.overlaps.get(&label).copied()
    }

    pub fn is_hybridized(&self, label: BareIndex) -> bool {
        self.hybridized.contains(&label)
    }
}

/// Greedy maximum-overlap labeling.
///
/// All (bare, eigen) pairs are processed in descending overlap order; a pair
/// is accepted if neither member has been assigned. Ties break on the bare
/// index, then the eigen index, so the result is deterministic. Bare states
/// that are not represented in the spectrum (e.g. sectors that were dropped)
/// are left unlabeled.
pub fn label_states(spectrum: &Spectrum) -> LabeledSpectrum {
    let space = &spectrum.space;
    let n = space.total_dim();
    let cols = spectrum.len();
    let v = &spectrum.eigenvectors;

    // Bare states that appear in the spectrum's support.
    let mut weight = vec![0.0; n];
    for i in 0..n {
        for k in 0..cols {
            weight[i] += v[(i, k)].norm_sqr();
        }
    }
    let candidates: Vec<usize> = (0..n).filter(|&i| weight[i] > 0.5).collect();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for &i in &candidates {
        for k in 0..cols {
            let ov = v[(i, k)].norm_sqr();
            if ov > 1e-14 {
                pairs.push((ov, i, k));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut bare_done = vec![false; n];
    let mut eigen_done = vec![false; cols];
    let mut labels = BTreeMap::new();
    let mut overlaps = BTreeMap::new();
    let mut hybridized = BTreeSet::new();

    let mut assign = |i: usize, k: usize, ov: f64, labels: &mut BTreeMap<_, _>, overlaps: &mut BTreeMap<_, _>| {
        let label = space.occupations(i);
        labels.insert(label, k);
        overlaps.insert(label, ov);
        if ov <= HYBRIDIZATION_THRESHOLD + 1e-9 {
            hybridized.insert(label);
        }
    };

    for (ov, i, k) in pairs {
        if bare_done[i] || eigen_done[k] {
            continue;
        }
        bare_done[i] = true;
        eigen_done[k] = true;
        assign(i, k, ov, &mut labels, &mut overlaps);
    }
    // Leftovers (only possible with vanishing overlaps): pair in index order.
    let mut free_eigen = (0..cols).filter(|&k| !eigen_done[k]);
    for &i in &candidates {
        if bare_done[i] {
            continue;
        }
        if let Some(k) = free_eigen.next() {
            let ov = v[(i, k)].norm_sqr();
            assign(i, k, ov, &mut labels, &mut overlaps);
        }
    }

    LabeledSpectrum { eigenvalues: spectrum.eigenvalues.clone(), labels, overlaps, hybridized }
}

/// ζ together with the smallest overlap among the four computational labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaReport {
    pub zeta: f64,
    pub min_overlap: f64,
}

fn label_name(label: BareIndex) -> String {
    format!("|{}{}{}{}⟩", label[0], label[1], label[2], label[3])
}

/// Exact ζ (rad/s) with diagnostics.
pub fn zeta_exact_report(params: &DeviceParams, omega_minus: f64, space: &Arc<HilbertSpace>) -> Result<ZetaReport> {
    // Rotating at ω₁ keeps eigenvalues at the detuning scale; ζ is a
    // sector-balanced difference (2 − 1 − 1 + 0) so the frame cancels exactly.
    let h = build_hamiltonian_in_frame(params, space, omega_minus, params.omega.q1)?;
    let spectrum = diagonalize_sectors(&h, 2)?;
    let labeled = label_states(&spectrum);

    let computational = [GROUND, EXCITED_Q1, EXCITED_Q2, EXCITED_BOTH];
    let diagnostics: Vec<(String, f64)> = computational
        .iter()
        .map(|&l| (label_name(l), labeled.overlap(l).unwrap_or(0.0)))
        .collect();
    for &label in &computational {
        if labeled.energy(label).is_none() || labeled.is_hybridized(label) {
            return Err(Error::Hybridized {
                label: label_name(label),
                overlap: labeled.overlap(label).unwrap_or(0.0),
                diagnostics,
            });
        }
    }
    let e = |l| labeled.energy(l).expect("checked above");
    let zeta = (e(EXCITED_BOTH) - e(GROUND)) - (e(EXCITED_Q1) - e(GROUND)) - (e(EXCITED_Q2) - e(GROUND));
    let min_overlap = diagnostics.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    Ok(ZetaReport { zeta, min_overlap })
}

/// Exact ζ (rad/s) from diagonalization of the device Hamiltonian.
pub fn zeta_exact(params: &DeviceParams, omega_minus: f64, space: &Arc<HilbertSpace>) -> Result<f64> {
    zeta_exact_report(params, omega_minus, space).map(|r| r.zeta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dims: [usize; 4],
    pub zeta: f64,
    /// |ζ(dims) − ζ(reference)|, where the reference is the largest space.
    pub abs_diff: f64,
}

/// ζ for each truncation, compared with the largest one.
pub fn convergence_check(params: &DeviceParams, omega_minus: f64, dims_list: &[[usize; 4]]) -> Result<Vec<ConvergenceRow>> {
    if dims_list.len() < 2 {
        return Err(Error::Domain("convergence check needs at least two truncations".into()));
    }
    let zetas = dims_list
        .iter()
        .map(|&dims| {
            let space = Arc::new(HilbertSpace::device(dims)?);
            zeta_exact(params, omega_minus, &space)
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = dims_list
        .iter()
        .enumerate()
        .max_by_key(|(_, d)| d.iter().product::<usize>())
        .map(|(i, _)| zetas[i])
        .expect("non-empty");
    Ok(dims_list
        .iter()
        .zip(zetas)
        .map(|(&dims, zeta)| ConvergenceRow { dims, zeta, abs_diff: (zeta - reference).abs() })
        .collect())
}
