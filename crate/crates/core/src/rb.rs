//! Randomized benchmarking under static ZZ coupling and decoherence.
//!
//! Every trial is an independent density-matrix simulation seeded from its own
//! ChaCha stream, so results do not depend on thread count or scheduling.

use std::str::FromStr;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{Dyn, Matrix, OMatrix, OVector, Owned, Vector3, U3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{check_state, marginal_p0, step_tail, GateLabel, NoiseParams};
use crate::device::{DeviceParams, Qubit};
use crate::error::{Error, Result};
use crate::linalg::{c, trace, CMatrix, ONE, ZERO};

/// Primary-gate decompositions of the 24 single-qubit Cliffords, in time order.
const CLIFFORD_TABLE: [&[GateLabel]; 24] = {
    use GateLabel::*;
    [
        &[I],
        &[X180],
        &[Y180],
        &[Y180, X180],
        &[X90, Y90],
        &[X90, Ym90],
        &[Xm90, Y90],
        &[Xm90, Ym90],
        &[Y90, X90],
        &[Y90, Xm90],
        &[Ym90, X90],
        &[Ym90, Xm90],
        &[X90],
        &[Xm90],
        &[Y90],
        &[Ym90],
        &[Xm90, Y90, X90],
        &[Xm90, Ym90, X90],
        &[X180, Y90],
        &[X180, Ym90],
        &[Y180, X90],
        &[Y180, Xm90],
        &[X90, Y90, X90],
        &[Xm90, Y90, Xm90],
    ]
};

/// The single-qubit Clifford group with primary-gate decompositions.
#[derive(Debug, Clone)]
pub struct CliffordGroup {
    elements: Vec<CMatrix>,
}

/// Equality of 2×2 unitaries up to a global phase.
fn same_up_to_phase(a: &CMatrix, b: &CMatrix) -> bool {
    (trace(&(a.adjoint() * b)).norm() - 2.0).abs() < 1e-9
}

impl CliffordGroup {
    pub fn new() -> CliffordGroup {
        let elements = CLIFFORD_TABLE.iter().map(|seq| sequence_unitary(seq)).collect();
        CliffordGroup { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unitary(&self, k: usize) -> &CMatrix {
        &self.elements[k]
    }

    pub fn decomposition(&self, k: usize) -> &'static [GateLabel] {
        CLIFFORD_TABLE[k]
    }

    /// Mean number of primary gates per Clifford.
    pub fn mean_length(&self) -> f64 {
        CLIFFORD_TABLE.iter().map(|s| s.len()).sum::<usize>() as f64 / CLIFFORD_TABLE.len() as f64
    }

    /// Index of the Clifford equal to `u` up to phase.
    pub fn index_of(&self, u: &CMatrix) -> Option<usize> {
        self.elements.iter().position(|e| same_up_to_phase(e, u))
    }

    /// Index of the Clifford that undoes `u`.
    pub fn recovery(&self, u: &CMatrix) -> Result<usize> {
        self.index_of(&u.adjoint())
            .ok_or_else(|| Error::Domain("sequence unitary is not a Clifford".into()))
    }
}

impl Default for CliffordGroup {
    fn default() -> Self {
        CliffordGroup::new()
    }
}

/// Product of a gate sequence applied in time order.
pub fn sequence_unitary(seq: &[GateLabel]) -> CMatrix {
    seq.iter().fold(CMatrix::identity(2, 2), |acc, g| g.unitary() * acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RbMode {
    IndividualQ1,
    IndividualQ2,
    Simultaneous,
}

impl RbMode {
    pub fn is_active(self, qubit: Qubit) -> bool {
        match self {
            RbMode::Simultaneous => true,
            RbMode::IndividualQ1 => qubit == Qubit::One,
            RbMode::IndividualQ2 => qubit == Qubit::Two,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RbMode::IndividualQ1 => "individual_q1",
            RbMode::IndividualQ2 => "individual_q2",
            RbMode::Simultaneous => "simultaneous",
        }
    }
}

impl FromStr for RbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<RbMode> {
        match s {
            "individual_q1" | "q1" => Ok(RbMode::IndividualQ1),
            "individual_q2" | "q2" => Ok(RbMode::IndividualQ2),
            "simultaneous" | "sim" => Ok(RbMode::Simultaneous),
            other => Err(Error::Domain(format!("unknown RB mode `{other}`"))),
        }
    }
}

/// How random sequences are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceDesign {
    /// Uniform Cliffords, each played as its primary-gate decomposition.
    Clifford,
    /// Uniform primary gates, closed by one recovery Clifford played as a single step.
    PrimaryGates,
}

impl SequenceDesign {
    /// Primary gates per sequence element, used to convert p into a per-gate fidelity.
    pub fn gates_per_element(self) -> f64 {
        match self {
            SequenceDesign::Clifford => CliffordGroup::new().mean_length(),
            SequenceDesign::PrimaryGates => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SequenceDesign::Clifford => "clifford",
            SequenceDesign::PrimaryGates => "primary",
        }
    }
}

impl FromStr for SequenceDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<SequenceDesign> {
        match s {
            "clifford" => Ok(SequenceDesign::Clifford),
            "primary" => Ok(SequenceDesign::PrimaryGates),
            other => Err(Error::Domain(format!("unknown sequence design `{other}`"))),
        }
    }
}

pub const DEFAULT_LENGTHS: [usize; 9] = [2, 4, 8, 16, 32, 64, 128, 256, 512];
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_GATE_TIME: f64 = 22e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RbConfig {
    pub mode: RbMode,
    pub design: SequenceDesign,
    /// Static ZZ rate (rad/s).
    pub zeta: f64,
    pub noise: [NoiseParams; 2],
    pub lengths: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

impl RbConfig {
    /// Defaults: device coherence, 22 ns gates, Clifford sequences, 100 trials.
    pub fn for_device(params: &DeviceParams, zeta: f64, mode: RbMode, seed: u64) -> Result<RbConfig> {
        Ok(RbConfig {
            mode,
            design: SequenceDesign::Clifford,
            zeta,
            noise: [
                NoiseParams::from_coherence(params.coherence_of(Qubit::One), DEFAULT_GATE_TIME)?,
                NoiseParams::from_coherence(params.coherence_of(Qubit::Two), DEFAULT_GATE_TIME)?,
            ],
            lengths: DEFAULT_LENGTHS.to_vec(),
            trials: DEFAULT_TRIALS,
            seed,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::Validation { field: "lengths".into(), reason: "must not be empty".into() });
        }
        if self.trials == 0 {
            return Err(Error::Validation { field: "trials".into(), reason: "must be at least 1".into() });
        }
        if self.noise[0].gate_time != self.noise[1].gate_time {
            return Err(Error::Validation { field: "gate_time".into(), reason: "qubits disagree on gate time".into() });
        }
        if !self.zeta.is_finite() {
            return Err(Error::Validation { field: "zeta".into(), reason: "must be finite".into() });
        }
        Ok(())
    }
}

/// Trial-averaged ground-state populations, one entry per sequence length.
#[derive(Debug, Clone, PartialEq)]
pub struct RbCurve {
    pub lengths: Vec<usize>,
    pub mean_p0: Vec<[f64; 2]>,
    /// Standard error of the mean over trials.
    pub sem: Vec<[f64; 2]>,
}

impl RbCurve {
    pub fn series(&self, qubit: Qubit) -> Vec<f64> {
        self.mean_p0.iter().map(|p| p[qubit.index()]).collect()
    }
}

/// Fit of P(m) = A·p^m + B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub a: f64,
    pub p: f64,
    pub b: f64,
    /// Average primary-gate fidelity 1 − (1 − p)/2/(gates per element).
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbResult {
    pub config: RbConfig,
    pub curve: RbCurve,
    pub fits: [Option<DecayFit>; 2],
}

impl RbResult {
    pub fn fidelity(&self, qubit: Qubit) -> Option<f64> {
        self.fits[qubit.index()].map(|f| f.fidelity)
    }
}

/// Single-qubit operators used in slots: the seven primary gates, then the 24 Cliffords.
struct GateTable {
    two_qubit: Vec<CMatrix>,
    width: usize,
}

impl GateTable {
    fn new(group: &CliffordGroup) -> GateTable {
        let singles: Vec<CMatrix> = GateLabel::ALL
            .iter()
            .map(|g| g.unitary())
            .chain((0..group.len()).map(|k| group.unitary(k).clone()))
            .collect();
        let width = singles.len();
        let mut two_qubit = Vec::with_capacity(width * width);
        for a in &singles {
            for b in &singles {
                two_qubit.push(a.kronecker(b));
            }
        }
        GateTable { two_qubit, width }
    }

    fn pair(&self, q1: usize, q2: usize) -> &CMatrix {
        &self.two_qubit[q1 * self.width + q2]
    }
}

const CLIFFORD_OFFSET: usize = 7;
const IDLE: usize = 0;

/// Gate slots (indices into [`GateTable`]) for one random sequence of length m.
fn draw_sequence(rng: &mut ChaCha8Rng, config: &RbConfig, group: &CliffordGroup, m: usize) -> Result<Vec<(usize, usize)>> {
    let active = [config.mode.is_active(Qubit::One), config.mode.is_active(Qubit::Two)];
    match config.design {
        SequenceDesign::Clifford => {
            let mut cliffords: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            for q in 0..2 {
                if !active[q] {
                    continue;
                }
                let mut seq: Vec<usize> = (0..m).map(|_| rng.random_range(0..group.len())).collect();
                let total = seq.iter().fold(CMatrix::identity(2, 2), |acc, &k| group.unitary(k) * acc);
                seq.push(group.recovery(&total)?);
                cliffords[q] = seq;
            }
            let mut slots = Vec::new();
            #[allow(clippy::needless_range_loop)]
            for k in 0..=m {
                let expand = |q: usize| -> Vec<usize> {
                    if active[q] {
                        group.decomposition(cliffords[q][k]).iter().map(|g| g.index()).collect()
                    } else {
                        Vec::new()
                    }
                };
                let (s1, s2) = (expand(0), expand(1));
                let width = s1.len().max(s2.len());
                for j in 0..width {
                    slots.push((*s1.get(j).unwrap_or(&IDLE), *s2.get(j).unwrap_or(&IDLE)));
                }
            }
            Ok(slots)
        }
        SequenceDesign::PrimaryGates => {
            let mut per_qubit: [Vec<usize>; 2] = [vec![IDLE; m + 1], vec![IDLE; m + 1]];
            for q in 0..2 {
                if !active[q] {
                    continue;
                }
                let seq: Vec<usize> = (0..m).map(|_| rng.random_range(0..GateLabel::ALL.len())).collect();
                let total = seq.iter().fold(CMatrix::identity(2, 2), |acc, &k| GateLabel::ALL[k].unitary() * acc);
                per_qubit[q][..m].copy_from_slice(&seq);
                per_qubit[q][m] = CLIFFORD_OFFSET + group.recovery(&total)?;
            }
            Ok((0..=m).map(|k| (per_qubit[0][k], per_qubit[1][k])).collect())
        }
    }
}

/// Final marginal ground-state populations of one trial.
fn run_trial(config: &RbConfig, group: &CliffordGroup, table: &GateTable, m: usize, stream: u64) -> Result<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let slots = draw_sequence(&mut rng, config, group, m)?;
    let zz_phase = c(0.0, -config.zeta * config.noise[0].gate_time).exp();
    let (d1, d2) = (config.noise[0].decay_factors(), config.noise[1].decay_factors());
    let mut rho = CMatrix::from_element(4, 4, ZERO);
    rho[(0, 0)] = ONE;
    for (a, b) in slots {
        let u = table.pair(a, b);
        rho = u * &rho * u.adjoint();
        step_tail(&mut rho, zz_phase, d1, d2);
    }
    check_state(&rho)?;
    Ok([marginal_p0(&rho, Qubit::One), marginal_p0(&rho, Qubit::Two)])
}

/// Trial-averaged decay curve for `config`.
pub fn rb_curve(config: &RbConfig) -> Result<RbCurve> {
    config.validate()?;
    let group = CliffordGroup::new();
    let table = GateTable::new(&group);
    let trials = config.trials;
    let jobs: Vec<(usize, usize)> =
        (0..config.lengths.len()).flat_map(|li| (0..trials).map(move |t| (li, t))).collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(li, t)| run_trial(config, &group, &table, config.lengths[li], (li * trials + t) as u64))
        .collect::<Result<Vec<[f64; 2]>>>()?;

    let mut mean_p0 = Vec::with_capacity(config.lengths.len());
    let mut sem = Vec::with_capacity(config.lengths.len());
    for chunk in outcomes.chunks(trials) {
        let mut mean = [0.0; 2];
        let mut err = [0.0; 2];
        for q in 0..2 {
            let n = chunk.len() as f64;
            let mu = chunk.iter().map(|o| o[q]).sum::<f64>() / n;
            let var = if chunk.len() > 1 {
                chunk.iter().map(|o| (o[q] - mu).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            mean[q] = mu;
            err[q] = (var / n).sqrt();
        }
        mean_p0.push(mean);
        sem.push(err);
    }
    Ok(RbCurve { lengths: config.lengths.clone(), mean_p0, sem })
}

/// Simulate, then fit every active qubit's decay.
pub fn run_rb(config: &RbConfig) -> Result<RbResult> {
    let curve = rb_curve(config)?;
    let per_element = config.design.gates_per_element();
    let mut fits = [None, None];
    for q in [Qubit::One, Qubit::Two] {
        if config.mode.is_active(q) {
            fits[q.index()] = Some(fit_decay(&curve.lengths, &curve.series(q), per_element)?);
        }
    }
    Ok(RbResult { config: config.clone(), curve, fits })
}

struct DecayProblem<'a> {
    m: &'a [f64],
    y: &'a [f64],
    params: Vector3<f64>,
}

impl LeastSquaresProblem<f64, Dyn, U3> for DecayProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U3>;
    type ParameterStorage = Owned<f64, U3>;

    fn set_params(&mut self, x: &Vector3<f64>) {
        self.params = *x;
    }

    fn params(&self) -> Vector3<f64> {
        self.params
    }

    fn residuals(&self) -> Option<OVector<f64, Dyn>> {
        let (a, p, b) = (self.params[0], self.params[1], self.params[2]);
        Some(OVector::<f64, Dyn>::from_iterator(
            self.m.len(),
            self.m.iter().zip(self.y).map(|(&m, &y)| a * p.powf(m) + b - y),
        ))
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U3>> {
        let (a, p) = (self.params[0], self.params[1]);
        let mut j = Matrix::<f64, Dyn, U3, Owned<f64, Dyn, U3>>::zeros(self.m.len());
        for (row, &m) in self.m.iter().enumerate() {
            j[(row, 0)] = p.powf(m);
            j[(row, 1)] = a * m * p.powf(m - 1.0);
            j[(row, 2)] = 1.0;
        }
        Some(j)
    }
}

/// Least-squares fit of A·p^m + B from A = 0.5, p = 0.99, B = 0.5.
pub fn fit_decay(lengths: &[usize], curve: &[f64], gates_per_element: f64) -> Result<DecayFit> {
    let fail = |reason: String| Error::Fit { reason, lengths: lengths.to_vec(), curve: curve.to_vec() };
    if lengths.len() != curve.len() {
        return Err(fail(format!("{} lengths but {} points", lengths.len(), curve.len())));
    }
    if curve.iter().all(|&y| (y - 1.0).abs() < 1e-12) {
        return Ok(DecayFit { a: 0.0, p: 1.0, b: 1.0, fidelity: 1.0 });
    }
    if lengths.len() < 3 {
        return Err(fail("need at least three lengths for a three-parameter fit".into()));
    }
    let m: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let problem = DecayProblem { m: &m, y: curve, params: Vector3::new(0.5, 0.99, 0.5) };
    let (solved, report) = LevenbergMarquardt::new().minimize(problem);
    if !report.termination.was_successful() {
        return Err(fail(format!("optimizer stopped: {:?}", report.termination)));
    }
    let (a, p, b) = (solved.params[0], solved.params[1], solved.params[2]);
    if !(a.is_finite() && p.is_finite() && b.is_finite()) {
        return Err(fail("non-finite fit parameters".into()));
    }
    if !(p > 0.0 && p <= 1.0 + 1e-9) || a <= 0.0 {
        return Err(fail(format!("data does not decay (A = {a:.4}, p = {p:.6})")));
    }
    Ok(DecayFit { a, p, b, fidelity: 1.0 - (1.0 - p) / 2.0 / gates_per_element })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn table_is_the_clifford_group() {
        let group = CliffordGroup::new();
        assert_eq!(group.len(), 24);
        for i in 0..24 {
            for j in 0..i {
                assert!(!same_up_to_phase(group.unitary(i), group.unitary(j)), "{i} == {j}");
            }
        }
        assert_eq!(group.mean_length(), 1.875);
    }

    #[test]
    fn primary_products_close_in_group() {
        // Breadth-first closure of the primary set reaches exactly the 24 Cliffords.
        let group = CliffordGroup::new();
        let mut seen = HashSet::from([0usize]);
        let mut frontier = vec![0usize];
        while let Some(k) = frontier.pop() {
            for g in GateLabel::ALL {
                let next = group.index_of(&(g.unitary() * group.unitary(k))).expect("closed");
                if seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn recovery_inverts() {
        let group = CliffordGroup::new();
        for k in 0..24 {
            let r = group.recovery(group.unitary(k)).unwrap();
            assert_eq!(group.index_of(&(group.unitary(r) * group.unitary(k))), Some(0));
        }
    }

    fn small(mode: RbMode, design: SequenceDesign, zeta: f64, seed: u64) -> RbConfig {
        let params = DeviceParams::device_a();
        let mut cfg = RbConfig::for_device(&params, zeta, mode, seed).unwrap();
        cfg.design = design;
        cfg.lengths = vec![2, 8, 32, 128];
        cfg.trials = 8;
        cfg
    }

    #[test]
    fn noiseless_is_perfect() {
        for design in [SequenceDesign::Clifford, SequenceDesign::PrimaryGates] {
            let mut cfg = small(RbMode::Simultaneous, design, 0.0, 3);
            cfg.noise = [NoiseParams::ideal(22e-9); 2];
            let res = run_rb(&cfg).unwrap();
            for p in &res.curve.mean_p0 {
                assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
            }
            assert_eq!(res.fidelity(Qubit::One), Some(1.0));
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = small(RbMode::Simultaneous, SequenceDesign::Clifford, 1.4e7, 11);
        let a = rb_curve(&cfg).unwrap();
        let b = rb_curve(&cfg).unwrap();
        assert_eq!(a, b);
        let other = rb_curve(&RbConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn individual_mode_fits_only_active() {
        let res = run_rb(&small(RbMode::IndividualQ2, SequenceDesign::Clifford, 0.0, 5)).unwrap();
        assert!(res.fits[0].is_none() && res.fits[1].is_some());
        // The idle qubit only ever sees identities and decays toward |0⟩.
        for p in &res.curve.mean_p0 {
            assert!((p[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_synthetic_decay() {
        let lengths = DEFAULT_LENGTHS.to_vec();
        let curve: Vec<f64> = lengths.iter().map(|&m| 0.47 * 0.993_f64.powi(m as i32) + 0.51).collect();
        let fit = fit_decay(&lengths, &curve, 1.0).unwrap();
        assert!((fit.p - 0.993).abs() < 1e-9 && (fit.a - 0.47).abs() < 1e-7 && (fit.b - 0.51).abs() < 1e-7);
        assert!((fit.fidelity - 0.9965).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_growth() {
        let lengths = vec![2, 4, 8, 16, 32];
        let curve = vec![0.5, 0.55, 0.65, 0.8, 0.95];
        assert!(matches!(fit_decay(&lengths, &curve, 1.0), Err(Error::Fit { .. })));
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(RbMode::Simultaneous, SequenceDesign::Clifford, 0.0, 1);
        cfg.lengths.clear();
        assert!(rb_curve(&cfg).is_err());
        let mut cfg = small(RbMode::Simultaneous, SequenceDesign::Clifford, 0.0, 1);
        cfg.trials = 0;
        assert!(rb_curve(&cfg).is_err());
    }
}
