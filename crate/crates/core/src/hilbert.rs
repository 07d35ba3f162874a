//! Truncated bosonic operators and assembly of the four-mode device Hamiltonian
//!
//! H/ħ = Σᵢ (ωᵢ nᵢ − αᵢ/2 · aᵢ†aᵢ†aᵢaᵢ) + Σ_{i∈{1,2}, j∈{+,−}} g_ij (aᵢ†a_j + aᵢa_j†).
//!
//! Each mode is a Kerr oscillator truncated to `dim` Fock levels. Basis states
//! are indexed in row-major order over (Q1, Q2, BusPlus, CouplerMinus), so the
//! last mode varies fastest.

use std::sync::Arc;

use crate::device::{Coupler, DeviceParams, Mode, Qubit};
use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, hermiticity_defect, CMatrix, ZERO};

/// A mode and its Fock truncation (number of retained levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSpec {
    pub label: Mode,
    pub dim: usize,
}

impl ModeSpec {
    pub fn new(label: Mode, dim: usize) -> Result<ModeSpec> {
        if dim < 2 {
            return Err(Error::Validation { field: format!("dim[{label}]"), reason: format!("needs at least 2 levels, got {dim}") });
        }
        Ok(ModeSpec { label, dim })
    }
}

/// Occupation numbers (n₁, n₂, n₊, n₋) of a bare Fock state, restricted to the
/// modes present in a space (absent modes read as 0).
pub type BareIndex = [usize; 4];

/// Ordered tensor-product space of a subset of the device modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    modes: Vec<ModeSpec>,
    total_dim: usize,
}

impl HilbertSpace {
    /// Default truncation: 4 levels for qubits and the tunable coupler, 3 for the bus.
    pub const DEFAULT_DIMS: [usize; 4] = [4, 4, 3, 4];

    pub fn new(modes: Vec<ModeSpec>) -> Result<HilbertSpace> {
        if modes.is_empty() {
            return Err(Error::Domain("a Hilbert space needs at least one mode".into()));
        }
        for pair in modes.windows(2) {
            if pair[0].label.index() >= pair[1].label.index() {
                return Err(Error::Domain(format!(
                    "modes must be unique and in canonical order (Q1, Q2, BusPlus, CouplerMinus); got {} before {}",
                    pair[0].label, pair[1].label
                )));
            }
        }
        let total_dim = modes.iter().map(|m| m.dim).product();
        Ok(HilbertSpace { modes, total_dim })
    }

    /// All four modes with dims given in canonical order.
    pub fn device(dims: [usize; 4]) -> Result<HilbertSpace> {
        let modes = Mode::ALL
            .iter()
            .zip(dims)
            .map(|(&m, d)| ModeSpec::new(m, d))
            .collect::<Result<Vec<_>>>()?;
        HilbertSpace::new(modes)
    }

    pub fn default_device() -> HilbertSpace {
        HilbertSpace::device(Self::DEFAULT_DIMS).expect("default dims are valid")
    }

    pub fn single(label: Mode, dim: usize) -> Result<HilbertSpace> {
        HilbertSpace::new(vec![ModeSpec::new(label, dim)?])
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.dim).collect()
    }

    pub fn position(&self, label: Mode) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label)
    }

    pub fn contains(&self, label: Mode) -> bool {
        self.position(label).is_some()
    }

    fn require(&self, label: Mode) -> Result<usize> {
        self.position(label)
            .ok_or_else(|| Error::Domain(format!("mode {label} is not part of this Hilbert space")))
    }

    /// Product of the dims of modes after position `pos`.
    fn stride(&self, pos: usize) -> usize {
        self.modes[pos + 1..].iter().map(|m| m.dim).product()
    }

    /// Occupation numbers of basis state `index`.
    pub fn occupations(&self, index: usize) -> BareIndex {
        let mut out = [0; 4];
        let mut rest = index;
        for spec in self.modes.iter().rev() {
            out[spec.label.index()] = rest % spec.dim;
            rest /= spec.dim;
        }
        out
    }

    /// Basis index of a bare state, if representable under the truncation.
    pub fn index_of(&self, occ: BareIndex) -> Option<usize> {
        let mut idx = 0;
        for mode in Mode::ALL {
            let n = occ[mode.index()];
            match self.position(mode) {
                Some(pos) => {
                    if n >= self.modes[pos].dim {
                        return None;
                    }
                    idx += n * self.stride(pos);
                }
                None if n != 0 => return None,
                None => {}
            }
        }
        Some(idx)
    }

    /// Total excitation number Σ nᵢ of basis state `index`.
    pub fn excitations(&self, index: usize) -> usize {
        self.occupations(index).iter().sum()
    }
}

/// Dense operator on a Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: Arc<HilbertSpace>, matrix: CMatrix) -> Result<Operator> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        Ok(Operator { space, matrix })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Operator {
        Operator { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// max |H − H†| relative to the Frobenius norm (0 for the zero operator).
    pub fn relative_hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            0.0
        } else {
            hermiticity_defect(&self.matrix) / norm
        }
    }

    pub fn element(&self, bra: BareIndex, ket: BareIndex) -> Option<num_complex::Complex64> {
        let i = self.space.index_of(bra)?;
        let j = self.space.index_of(ket)?;
        Some(self.matrix[(i, j)])
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(Operator { space: self.space.clone(), matrix: m })
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        Ok(Operator { space: self.space.clone(), matrix: &self.matrix * &other.matrix })
    }

    fn check_same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch { expected: self.space.total_dim(), found: other.space.total_dim() });
        }
        Ok(())
    }
}

/// Build an operator acting as `local(n) → [(n', amplitude)]` on one mode and
/// as the identity elsewhere.
fn embed_local<F>(space: &Arc<HilbertSpace>, mode: Mode, local: F) -> Result<Operator>
where
    F: Fn(usize) -> Option<(usize, f64)>,
{
    let pos = space.require(mode)?;
    let dim = space.modes[pos].dim;
    let stride = space.stride(pos);
    let n = space.total_dim();
    let mut m = CMatrix::zeros(n, n);
    for col in 0..n {
        let level = (col / stride) % dim;
        if let Some((target, amp)) = local(level) {
            let row = col - level * stride + target * stride;
            m[(row, col)] = c(amp, 0.0);
        }
    }
    Operator::new(space.clone(), m)
}

/// Lowering operator a on `mode`, with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(space: &Arc<HilbertSpace>, mode: Mode) -> Result<Operator> {
    embed_local(space, mode, |n| (n > 0).then(|| (n - 1, (n as f64).sqrt())))
}

/// Raising operator a†.
pub fn creation(space: &Arc<HilbertSpace>, mode: Mode) -> Result<Operator> {
    Ok(annihilation(space, mode)?.dagger())
}

/// Number operator a†a (diagonal with entries 0..dim−1 on the target factor).
pub fn number(space: &Arc<HilbertSpace>, mode: Mode) -> Result<Operator> {
    embed_local(space, mode, |n| Some((n, n as f64)))
}

/// Total excitation number Σᵢ nᵢ over every mode in the space.
pub fn total_excitation(space: &Arc<HilbertSpace>) -> Operator {
    let n = space.total_dim();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(space.excitations(i) as f64, 0.0);
    }
    Operator { space: space.clone(), matrix: m }
}

/// Device Hamiltonian H/ħ (rad/s) with the coupler at frequency `omega_minus`.
///
/// The Kerr and number terms are diagonal in the Fock basis and are written
/// directly; the exchange terms g(aᵢ†a_j + h.c.) are filled element by element.
pub fn build_hamiltonian(params: &DeviceParams, space: &Arc<HilbertSpace>, omega_minus: f64) -> Result<Operator> {
    build_hamiltonian_in_frame(params, space, omega_minus, 0.0)
}

/// H/ħ − ω_frame·Σnᵢ: the device Hamiltonian in a frame rotating at
/// `frame` on every mode. The subtracted term commutes with H, so eigenvectors
/// are unchanged and eigenvalues in sector N shift by −N·ω_frame.
pub fn build_hamiltonian_in_frame(
    params: &DeviceParams,
    space: &Arc<HilbertSpace>,
    omega_minus: f64,
    frame: f64,
) -> Result<Operator> {
    for mode in Mode::ALL {
        space.require(mode)?;
    }
    if !(omega_minus.is_finite() && omega_minus > 0.0) {
        return Err(Error::Domain(format!("coupler frequency must be positive, got {omega_minus}")));
    }
    let mut omega = params.omega;
    omega.coupler = omega_minus;
    let alpha = params.alpha;

    let n = space.total_dim();
    let mut h = CMatrix::from_element(n, n, ZERO);
    for idx in 0..n {
        let occ = space.occupations(idx);
        let mut e = 0.0;
        for mode in Mode::ALL {
            let k = occ[mode.index()] as f64;
            e += (omega[mode] - frame) * k - 0.5 * alpha[mode] * k * (k - 1.0);
        }
        h[(idx, idx)] = c(e, 0.0);
    }

    for qubit in Qubit::BOTH {
        for coupler in Coupler::BOTH {
            let g = params.g.get(qubit, coupler);
            if g == 0.0 {
                continue;
            }
            let (qi, ci) = (qubit.mode().index(), coupler.mode().index());
            for col in 0..n {
                let occ = space.occupations(col);
                // a_q† a_c |…n_q…n_c…⟩ = √(n_q+1) √n_c |…n_q+1…n_c−1…⟩
                if occ[ci] == 0 {
                    continue;
                }
                let mut target = occ;
                target[qi] += 1;
                target[ci] -= 1;
                if let Some(row) = space.index_of(target) {
                    let amp = g * ((occ[qi] + 1) as f64).sqrt() * (occ[ci] as f64).sqrt();
                    h[(row, col)] += c(amp, 0.0);
                    h[(col, row)] += c(amp, 0.0);
                }
            }
        }
    }
    Operator::new(space.clone(), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;
    use crate::units::{ghz, TWO_PI};

    fn single(dim: usize) -> Arc<HilbertSpace> {
        Arc::new(HilbertSpace::single(Mode::Q1, dim).unwrap())
    }

    #[test]
    fn annihilation_dim2() {
        let a = annihilation(&single(2), Mode::Q1).unwrap();
        let m = a.matrix();
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(0, 0)], ZERO);
        assert_eq!(m[(1, 0)], ZERO);
        assert_eq!(m[(1, 1)], ZERO);
        let aa = a.compose(&a).unwrap();
        assert!(aa.matrix().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn ladder_element() {
        let a = annihilation(&single(5), Mode::Q1).unwrap();
        assert!((a.matrix()[(2, 3)].re - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn number_is_adag_a() {
        let space = single(3);
        let a = annihilation(&space, Mode::Q1).unwrap();
        let n = number(&space, Mode::Q1).unwrap();
        let product = a.dagger().compose(&a).unwrap();
        // √n·√n is n up to one rounding
        assert!(frobenius(&(product.matrix() - n.matrix())) < 1e-15);
        for k in 0..3 {
            assert_eq!(n.matrix()[(k, k)].re, k as f64);
        }
    }

    #[test]
    fn number_trace() {
        for d in 2..7 {
            let n = number(&single(d), Mode::Q1).unwrap();
            let tr: f64 = n.matrix().diagonal().iter().map(|z| z.re).sum();
            assert_eq!(tr, (d * (d - 1) / 2) as f64);
        }
    }

    #[test]
    fn commutator_identity_below_truncation() {
        let space = single(5);
        let a = annihilation(&space, Mode::Q1).unwrap();
        let comm = a.commutator(&a.dagger()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((comm.matrix()[(i, j)].re - expect).abs() < 1e-14);
            }
        }
        // The truncation boundary breaks [a, a†] = 1 in the last level.
        assert!((comm.matrix()[(4, 4)].re + 4.0).abs() < 1e-14);
    }

    #[test]
    fn embedding_respects_mode_order() {
        let space = Arc::new(HilbertSpace::device([2, 3, 2, 2]).unwrap());
        let a2 = annihilation(&space, Mode::Q2).unwrap();
        let ket = space.index_of([1, 2, 0, 1]).unwrap();
        let bra = space.index_of([1, 1, 0, 1]).unwrap();
        assert!((a2.matrix()[(bra, ket)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(space.occupations(ket), [1, 2, 0, 1]);
    }

    #[test]
    fn missing_mode_is_domain_error() {
        let space = single(3);
        assert!(matches!(annihilation(&space, Mode::Q2), Err(Error::Domain(_))));
        let params = DeviceParams::device_a();
        assert!(matches!(build_hamiltonian(&params, &space, ghz(4.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(ModeSpec::new(Mode::Q1, 1).is_err());
        let dup = vec![ModeSpec::new(Mode::Q1, 2).unwrap(), ModeSpec::new(Mode::Q1, 2).unwrap()];
        assert!(HilbertSpace::new(dup).is_err());
    }

    #[test]
    fn device_a_single_excitation_diagonal() {
        let params = DeviceParams::device_a();
        let space = Arc::new(HilbertSpace::device([4, 4, 4, 4]).unwrap());
        let h = build_hamiltonian(&params, &space, ghz(6.0)).unwrap();
        let e = h.element([1, 0, 0, 0], [1, 0, 0, 0]).unwrap();
        assert!((e.re / TWO_PI / 1e9 - 4.973).abs() < 1e-12);
    }

    #[test]
    fn decoupled_limit_is_diagonal_kerr() {
        let params = DeviceParams::device_a().decoupled();
        let space = Arc::new(HilbertSpace::default_device());
        let wm = ghz(5.5);
        let h = build_hamiltonian(&params, &space, wm).unwrap();
        let m = h.matrix();
        for i in 0..space.total_dim() {
            let occ = space.occupations(i);
            let mut expect = 0.0;
            let mut omega = params.omega;
            omega.coupler = wm;
            for mode in Mode::ALL {
                let k = occ[mode.index()] as f64;
                expect += omega[mode] * k - params.alpha[mode] * k * (k - 1.0) / 2.0;
            }
            for j in 0..space.total_dim() {
                if i == j {
                    assert!((m[(i, i)].re - expect).abs() < 1e-3);
                } else {
                    assert_eq!(m[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn single_excitation_block_matches_small_matrix() {
        // Independent oracle: the 4×4 single-excitation matrix written out by hand.
        let p = DeviceParams::device_a();
        let wm = ghz(4.973 - 1.0);
        let space = Arc::new(HilbertSpace::default_device());
        let h = build_hamiltonian(&p, &space, wm).unwrap();
        let (vals, vecs) = eigh(h.matrix());

        let g = p.g;
        let small = crate::linalg::from_rows(&[
            &[c(p.omega.q1, 0.0), ZERO, c(g.q1_bus, 0.0), c(g.q1_coupler, 0.0)],
            &[ZERO, c(p.omega.q2, 0.0), c(g.q2_bus, 0.0), c(g.q2_coupler, 0.0)],
            &[c(g.q1_bus, 0.0), c(g.q2_bus, 0.0), c(p.omega.bus, 0.0), ZERO],
            &[c(g.q1_coupler, 0.0), c(g.q2_coupler, 0.0), ZERO, c(wm, 0.0)],
        ]);
        let (expect, _) = eigh(&small);

        let singles: Vec<usize> = (0..space.total_dim()).filter(|&i| space.excitations(i) == 1).collect();
        let mut found: Vec<f64> = (0..vals.len())
            .filter(|&k| singles.iter().map(|&i| vecs[(i, k)].norm_sqr()).sum::<f64>() > 0.5)
            .map(|k| vals[k])
            .collect();
        found.sort_by(f64::total_cmp);
        assert_eq!(found.len(), 4);
        for (a, b) in found.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9 * b.abs());
        }
    }
}
