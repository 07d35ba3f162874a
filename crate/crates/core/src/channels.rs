//! Density-matrix channels: gates, static ZZ phase, and single-qubit decoherence.
//!
//! Two-qubit operators use the basis {|00⟩, |01⟩, |10⟩, |11⟩} with qubit 1 as
//! the most significant bit.

use std::fmt;
use std::str::FromStr;

use crate::device::{Coherence, Qubit};
use crate::error::{Error, Result};
use crate::linalg::{c, eigh, hermiticity_defect, trace, unitarity_defect, CMatrix, CVector, ONE, ZERO};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<DensityMatrix> {
        check_state(&matrix)?;
        Ok(DensityMatrix { matrix })
    }

    pub(crate) fn unchecked(matrix: CMatrix) -> DensityMatrix {
        DensityMatrix { matrix }
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<DensityMatrix> {
        if k >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: k + 1 });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Ok(DensityMatrix { matrix: m })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
    pub fn pure(psi: &CVector) -> Result<DensityMatrix> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("state vector has zero or non-finite norm".into()));
        }
        let v = psi / c(norm, 0.0);
        Ok(DensityMatrix { matrix: &v * v.adjoint() })
    }

    /// The identity divided by `dim`.
    pub fn maximally_mixed(dim: usize) -> DensityMatrix {
        DensityMatrix { matrix: CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Ground-state population of one qubit of a two-qubit state.
    pub fn marginal_p0(&self, qubit: Qubit) -> f64 {
        marginal_p0(&self.matrix, qubit)
    }
}

pub(crate) fn marginal_p0(m: &CMatrix, qubit: Qubit) -> f64 {
    match qubit {
        Qubit::One => m[(0, 0)].re + m[(1, 1)].re,
        Qubit::Two => m[(0, 0)].re + m[(2, 2)].re,
    }
}

pub(crate) fn check_state(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let herm = hermiticity_defect(m);
    if herm > HERMITIAN_TOL {
        return Err(Error::NonPhysical { what: "density matrix", detail: format!("Hermiticity defect {herm:.3e}") });
    }
    let tr = trace(m);
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::NonPhysical { what: "density matrix", detail: format!("trace {tr}") });
    }
    let (values, _) = eigh(m);
    if let Some(&min) = values.first() {
        if min < -PSD_TOL {
            return Err(Error::NonPhysical { what: "density matrix", detail: format!("eigenvalue {min:.3e} < 0") });
        }
    }
    Ok(())
}

/// The primary single-qubit gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateLabel {
    I,
    X90,
    Xm90,
    Y90,
    Ym90,
    X180,
    Y180,
}

impl GateLabel {
    pub const ALL: [GateLabel; 7] = [
        GateLabel::I,
        GateLabel::X90,
        GateLabel::Xm90,
        GateLabel::Y90,
        GateLabel::Ym90,
        GateLabel::X180,
        GateLabel::Y180,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            GateLabel::I => "I",
            GateLabel::X90 => "X+90",
            GateLabel::Xm90 => "X-90",
            GateLabel::Y90 => "Y+90",
            GateLabel::Ym90 => "Y-90",
            GateLabel::X180 => "X180",
            GateLabel::Y180 => "Y180",
        }
    }

    /// R_P(θ) = cos(θ/2) I − i sin(θ/2) P.
    pub fn unitary(self) -> CMatrix {
        use std::f64::consts::PI;
        match self {
            GateLabel::I => CMatrix::identity(2, 2),
            GateLabel::X90 => rotation('x', PI / 2.0),
            GateLabel::Xm90 => rotation('x', -PI / 2.0),
            GateLabel::Y90 => rotation('y', PI / 2.0),
            GateLabel::Ym90 => rotation('y', -PI / 2.0),
            GateLabel::X180 => rotation('x', PI),
            GateLabel::Y180 => rotation('y', PI),
        }
    }
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<GateLabel> {
        let norm = s.replace('π', "").replace("/2", "90");
        GateLabel::ALL
            .into_iter()
            .find(|g| g.name() == norm || g.name().replace('+', "") == norm)
            .ok_or_else(|| Error::Domain(format!("unknown gate `{s}`")))
    }
}

fn rotation(axis: char, theta: f64) -> CMatrix {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match axis {
        'x' => CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)]),
        'y' => CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)]),
        _ => CMatrix::from_row_slice(2, 2, &[c(co, -si), ZERO, ZERO, c(co, si)]),
    }
}

/// Per-qubit decoherence parameters for one gate slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub t1: f64,
    pub t2: f64,
    pub gate_time: f64,
}

impl NoiseParams {
    /// Infinite T₁ and T₂ are allowed and mean no decoherence.
    pub fn new(t1: f64, t2: f64, gate_time: f64) -> Result<NoiseParams> {
        if !(t1 > 0.0) {
            return Err(Error::Validation { field: "t1".into(), reason: format!("must be positive, got {t1}") });
        }
        if !(t2 > 0.0) {
            return Err(Error::Validation { field: "t2".into(), reason: format!("must be positive, got {t2}") });
        }
        if t2 > 2.0 * t1 {
            return Err(Error::Validation { field: "t2".into(), reason: format!("T2 = {t2} s exceeds 2·T1 = {} s", 2.0 * t1) });
        }
        if !(gate_time > 0.0 && gate_time.is_finite()) {
            return Err(Error::Validation {
                field: "gate_time".into(),
                reason: format!("must be positive and finite, got {gate_time}"),
            });
        }
        Ok(NoiseParams { t1, t2, gate_time })
    }

    pub fn from_coherence(coherence: Coherence, gate_time: f64) -> Result<NoiseParams> {
        NoiseParams::new(coherence.t1, coherence.t2, gate_time)
    }

    pub fn ideal(gate_time: f64) -> NoiseParams {
        NoiseParams { t1: f64::INFINITY, t2: f64::INFINITY, gate_time }
    }

    /// (e^{−t/T₁}, e^{−t/T₂}) for one gate duration.
    pub fn decay_factors(&self) -> (f64, f64) {
        ((-self.gate_time / self.t1).exp(), (-self.gate_time / self.t2).exp())
    }
}

fn ensure_dim(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
    }
    Ok(())
}

/// U ρ U†.
pub fn apply_gate(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    ensure_dim(u, rho.dim())?;
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::Domain(format!("gate is not unitary (defect {defect:.2e})")));
    }
    Ok(DensityMatrix::unchecked(u * &rho.matrix * u.adjoint()))
}

/// diag(1, 1, 1, e^{−iζt}).
pub fn zz_unitary(zeta: f64, t: f64) -> CMatrix {
    let mut u = CMatrix::identity(4, 4);
    u[(3, 3)] = c(0.0, -zeta * t).exp();
    u
}

/// Static ZZ evolution for time `t`.
pub fn apply_zz(rho: &DensityMatrix, zeta: f64, t: f64) -> Result<DensityMatrix> {
    ensure_dim(&rho.matrix, 4)?;
    let mut m = rho.matrix.clone();
    zz_in_place(&mut m, c(0.0, -zeta * t).exp());
    Ok(DensityMatrix::unchecked(m))
}

/// Multiply row 3 by `phase` and column 3 by its conjugate.
pub(crate) fn zz_in_place(m: &mut CMatrix, phase: num_complex::Complex64) {
    for j in 0..4 {
        m[(3, j)] *= phase;
        m[(j, 3)] *= phase.conj();
    }
}

/// Decoherence map on the qubit at bit `bit` (0 = most significant) of an
/// `n_qubits` register:
/// ρ → (1−e₂)/2 ZρZ + (1+e₂)/2 ρ + (1−e₁)(|0⟩⟨1|ρ|1⟩⟨0| − |1⟩⟨1|ρ|1⟩⟨1|).
pub(crate) fn decohere_in_place(m: &mut CMatrix, n_qubits: usize, bit: usize, e1: f64, e2: f64) {
    let dim = 1usize << n_qubits;
    let mask = 1usize << (n_qubits - 1 - bit);
    // Z ρ Z flips the sign of elements whose row and column bits differ.
    for i in 0..dim {
        for j in 0..dim {
            if (i & mask) != (j & mask) {
                m[(i, j)] *= e2;
            }
        }
    }
    let lost = 1.0 - e1;
    if lost == 0.0 {
        return;
    }
    for i in (0..dim).filter(|i| i & mask != 0) {
        for j in (0..dim).filter(|j| j & mask != 0) {
            let moved = m[(i, j)] * lost;
            m[(i ^ mask, j ^ mask)] += moved;
            m[(i, j)] -= moved;
        }
    }
}

fn decohere_checked(rho: &DensityMatrix, n_qubits: usize, bit: usize, noise: &NoiseParams) -> Result<DensityMatrix> {
    let (e1, e2) = noise.decay_factors();
    let mut m = rho.matrix.clone();
    decohere_in_place(&mut m, n_qubits, bit, e1, e2);
    check_state(&m).map_err(|e| match e {
        Error::NonPhysical { detail, .. } => Error::NonPhysical { what: "decoherence output", detail },
        other => other,
    })?;
    Ok(DensityMatrix::unchecked(m))
}

/// The single-qubit decoherence map for one gate duration.
pub fn apply_decoherence(rho: &DensityMatrix, noise: &NoiseParams) -> Result<DensityMatrix> {
    ensure_dim(&rho.matrix, 2)?;
    decohere_checked(rho, 1, 0, noise)
}

/// The decoherence map acting on one qubit of a two-qubit state.
pub fn apply_decoherence_on(rho: &DensityMatrix, qubit: Qubit, noise: &NoiseParams) -> Result<DensityMatrix> {
    ensure_dim(&rho.matrix, 4)?;
    decohere_checked(rho, 2, qubit.index(), noise)
}

/// One benchmarking slot: gates on both qubits, then ZZ for the gate time,
/// then decoherence on qubit 2 and finally on qubit 1.
pub fn rb_step(
    rho: &DensityMatrix,
    gates: (GateLabel, GateLabel),
    zeta: f64,
    noise1: &NoiseParams,
    noise2: &NoiseParams,
) -> Result<DensityMatrix> {
    ensure_dim(&rho.matrix, 4)?;
    if noise1.gate_time != noise2.gate_time {
        return Err(Error::Validation {
            field: "gate_time".into(),
            reason: format!("qubits disagree on gate time ({} vs {} s)", noise1.gate_time, noise2.gate_time),
        });
    }
    let u = gates.0.unitary().kronecker(&gates.1.unitary());
    let mut m = &u * &rho.matrix * u.adjoint();
    step_tail(&mut m, c(0.0, -zeta * noise1.gate_time).exp(), noise1.decay_factors(), noise2.decay_factors());
    check_state(&m)?;
    Ok(DensityMatrix::unchecked(m))
}

/// ZZ phase and both decoherence maps, in slot order.
pub(crate) fn step_tail(m: &mut CMatrix, zz_phase: num_complex::Complex64, d1: (f64, f64), d2: (f64, f64)) {
    zz_in_place(m, zz_phase);
    decohere_in_place(m, 2, 1, d2.0, d2.1);
    decohere_in_place(m, 2, 0, d1.0, d1.1);
}
