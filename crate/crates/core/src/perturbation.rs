//! Closed-form dispersive-regime quantities.
//!
//! Detunings Δ_ij = ω_i − ω_j are between bare single-excitation levels. The
//! fourth-order ZZ rate is evaluated term by term so each contribution can be
//! inspected on its own (see [`ZetaTerms`]).

use crate::device::{DeviceParams, Mode};
use crate::error::{Error, Result};
use crate::units::khz;

/// Denominators smaller than 2π·1 kHz are treated as poles.
pub fn pole_tolerance() -> f64 {
    khz(1.0)
}

fn checked(term: &'static str, denominator: f64) -> Result<f64> {
    if !denominator.is_finite() || denominator.abs() < pole_tolerance() {
        return Err(Error::Pole { term, value: denominator });
    }
    Ok(denominator)
}

/// Pairwise bare detunings with the coupler at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSet {
    omega: [f64; 4],
}

impl DetuningSet {
    /// Δ_ab = ω_a − ω_b.
    pub fn delta(&self, a: Mode, b: Mode) -> f64 {
        self.omega[a.index()] - self.omega[b.index()]
    }

    pub fn d1p(&self) -> f64 {
        self.delta(Mode::Q1, Mode::BusPlus)
    }
    pub fn d2p(&self) -> f64 {
        self.delta(Mode::Q2, Mode::BusPlus)
    }
    pub fn d1m(&self) -> f64 {
        self.delta(Mode::Q1, Mode::CouplerMinus)
    }
    pub fn d2m(&self) -> f64 {
        self.delta(Mode::Q2, Mode::CouplerMinus)
    }
    pub fn d12(&self) -> f64 {
        self.delta(Mode::Q1, Mode::Q2)
    }
    pub fn d21(&self) -> f64 {
        self.delta(Mode::Q2, Mode::Q1)
    }
    pub fn dp2(&self) -> f64 {
        self.delta(Mode::BusPlus, Mode::Q2)
    }
    pub fn dm2(&self) -> f64 {
        self.delta(Mode::CouplerMinus, Mode::Q2)
    }
}

pub fn detunings(params: &DeviceParams, omega_minus: f64) -> DetuningSet {
    DetuningSet { omega: [params.omega.q1, params.omega.q2, params.omega.bus, omega_minus] }
}

/// The seven contributions to the fourth-order ζ, in display order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaTerms {
    /// 2g₁₊²g₂₊²/(Δ₁₊+Δ₂₊+α₊) · (1/Δ₁₊ + 1/Δ₂₊)²
    pub bus_two_photon: f64,
    /// 2g₁₋²g₂₋²/(Δ₁₋+Δ₂₋+α₋) · (1/Δ₁₋ + 1/Δ₂₋)²
    pub coupler_two_photon: f64,
    /// (g₁₊g₂₊/Δ₁₊ + g₁₋g₂₋/Δ₁₋)² · (2/(Δ₁₂+α₂) − 1/Δ₁₂)
    pub qubit2_anharmonic: f64,
    /// (g₁₊g₂₊/Δ₂₊ + g₁₋g₂₋/Δ₂₋)² · (2/(Δ₂₁+α₁) − 1/Δ₂₁)
    pub qubit1_anharmonic: f64,
    /// [g₁₊g₂₋(1/Δ₁₊ + 1/Δ₂₋) + g₁₋g₂₊(1/Δ₁₋ + 1/Δ₂₊)]² / (Δ₁₊+Δ₂₋)
    pub mixed: f64,
    /// −(g₁₊²/Δ₁₊² + g₁₋²/Δ₁₋²)(g₂₊²/Δ₂₊ + g₂₋²/Δ₂₋)
    pub normalization_q1: f64,
    /// −(g₂₊²/Δ₂₊² + g₂₋²/Δ₂₋²)(g₁₊²/Δ₁₊ + g₁₋²/Δ₁₋)
    pub normalization_q2: f64,
}

impl ZetaTerms {
    pub fn total(&self) -> f64 {
        self.bus_two_photon
            + self.coupler_two_photon
            + self.qubit2_anharmonic
            + self.qubit1_anharmonic
            + self.mixed
            + self.normalization_q1
            + self.normalization_q2
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.bus_two_photon,
            self.coupler_two_photon,
            self.qubit2_anharmonic,
            self.qubit1_anharmonic,
            self.mixed,
            self.normalization_q1,
            self.normalization_q2,
        ]
    }
}

/// Fourth-order perturbative ζ, term by term.
pub fn zeta_terms(params: &DeviceParams, omega_minus: f64) -> Result<ZetaTerms> {
    let d = detunings(params, omega_minus);
    let g = params.g;
    let (g1p, g2p, g1m, g2m) = (g.q1_bus, g.q2_bus, g.q1_coupler, g.q2_coupler);
    let (a1, a2, ap, am) = (params.alpha.q1, params.alpha.q2, params.alpha.bus, params.alpha.coupler);

    let d1p = checked("Δ₁₊", d.d1p())?;
    let d2p = checked("Δ₂₊", d.d2p())?;
    let d1m = checked("Δ₁₋", d.d1m())?;
    let d2m = checked("Δ₂₋", d.d2m())?;
    let d12 = checked("Δ₁₂", d.d12())?;
    let d21 = -d12;

    let bus_pair = checked("Δ₁₊+Δ₂₊+α₊", d1p + d2p + ap)?;
    let coupler_pair = checked("Δ₁₋+Δ₂₋+α₋", d1m + d2m + am)?;
    let q2_kerr = checked("Δ₁₂+α₂", d12 + a2)?;
    let q1_kerr = checked("Δ₂₁+α₁", d21 + a1)?;
    let cross = checked("Δ₁₊+Δ₂₋", d1p + d2m)?;

    let bus_two_photon = 2.0 * g1p.powi(2) * g2p.powi(2) / bus_pair * (1.0 / d1p + 1.0 / d2p).powi(2);
    let coupler_two_photon = 2.0 * g1m.powi(2) * g2m.powi(2) / coupler_pair * (1.0 / d1m + 1.0 / d2m).powi(2);
    let qubit2_anharmonic = (g1p * g2p / d1p + g1m * g2m / d1m).powi(2) * (2.0 / q2_kerr - 1.0 / d12);
    let qubit1_anharmonic = (g1p * g2p / d2p + g1m * g2m / d2m).powi(2) * (2.0 / q1_kerr - 1.0 / d21);
    let mixed = (g1p * g2m * (1.0 / d1p + 1.0 / d2m) + g1m * g2p * (1.0 / d1m + 1.0 / d2p)).powi(2) / cross;
    let normalization_q1 = -(g1p.powi(2) / d1p.powi(2) + g1m.powi(2) / d1m.powi(2))
        * (g2p.powi(2) / d2p + g2m.powi(2) / d2m);
    let normalization_q2 = -(g2p.powi(2) / d2p.powi(2) + g2m.powi(2) / d2m.powi(2))
        * (g1p.powi(2) / d1p + g1m.powi(2) / d1m);

    Ok(ZetaTerms {
        bus_two_photon,
        coupler_two_photon,
        qubit2_anharmonic,
        qubit1_anharmonic,
        mixed,
        normalization_q1,
        normalization_q2,
    })
}

/// Fourth-order perturbative ζ (rad/s).
pub fn zeta_perturbative(params: &DeviceParams, omega_minus: f64) -> Result<f64> {
    zeta_terms(params, omega_minus).map(|t| t.total())
}

/// Outcome of the operating-regime check ω₋ < ω₁,₂ < ω₊ and |ω₁ − ω₂| < α₁,₂.
#[derive(Debug, Clone, PartialEq)]
pub struct StraddleReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Strict-inequality check of the zero-ζ operating regime.
pub fn straddling_ok(params: &DeviceParams, omega_minus: f64) -> StraddleReport {
    let (w1, w2, wp) = (params.omega.q1, params.omega.q2, params.omega.bus);
    let mut violations = Vec::new();
    if !(omega_minus < w1 && omega_minus < w2) {
        violations.push("coupler below qubits: ω₋ < ω₁, ω₂ does not hold".to_string());
    }
    if !(w1 < wp && w2 < wp) {
        violations.push("bus above qubits: ω₁, ω₂ < ω₊ does not hold".to_string());
    }
    let detuning = (w1 - w2).abs();
    if !(detuning < params.alpha.q1) {
        violations.push("straddling: |ω₁ − ω₂| < α₁ does not hold".to_string());
    }
    if !(detuning < params.alpha.q2) {
        violations.push("straddling: |ω₁ − ω₂| < α₂ does not hold".to_string());
    }
    StraddleReport { ok: violations.is_empty(), violations }
}

/// Effective exchange coupling J = Σ_{j=±} (g₁ⱼg₂ⱼ/2)(1/(ω₁−ω_j) + 1/(ω₂−ω_j)).
pub fn exchange_j(params: &DeviceParams, omega_minus: f64) -> Result<f64> {
    let d = detunings(params, omega_minus);
    let g = params.g;
    let bus = 0.5 * g.q1_bus * g.q2_bus * (1.0 / checked("Δ₁₊", d.d1p())? + 1.0 / checked("Δ₂₊", d.d2p())?);
    let coupler =
        0.5 * g.q1_coupler * g.q2_coupler * (1.0 / checked("Δ₁₋", d.d1m())? + 1.0 / checked("Δ₂₋", d.d2m())?);
    Ok(bus + coupler)
}

/// ∂J/∂ω₋ (dimensionless): only the tunable-coupler term depends on ω₋.
pub fn exchange_j_slope(params: &DeviceParams, omega_minus: f64) -> Result<f64> {
    let d = detunings(params, omega_minus);
    let d1m = checked("Δ₁₋", d.d1m())?;
    let d2m = checked("Δ₂₋", d.d2m())?;
    Ok(0.5 * params.g.q1_coupler * params.g.q2_coupler * (1.0 / (d1m * d1m) + 1.0 / (d2m * d2m)))
}

/// iSWAP coupling strengths with the tunable coupler in its ground (J₀) or
/// first excited (J₁) state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IswapStrengths {
    pub j0: f64,
    pub j1: f64,
}

pub fn iswap_strengths(params: &DeviceParams, omega_minus: f64) -> Result<IswapStrengths> {
    let d = detunings(params, omega_minus);
    let g = params.g;
    let am = params.alpha.coupler;
    let d1p = checked("Δ₁₊", d.d1p())?;
    let d2p = checked("Δ₂₊", d.d2p())?;
    let d1m = checked("Δ₁₋", d.d1m())?;
    let d2m = checked("Δ₂₋", d.d2m())?;
    let d1m_a = checked("Δ₁₋+α₋", d1m + am)?;
    let d2m_a = checked("Δ₂₋+α₋", d2m + am)?;

    let bus = g.q1_bus * g.q2_bus * (1.0 / d1p + 1.0 / d2p);
    let gg = g.q1_coupler * g.q2_coupler;
    let ground = gg * (1.0 / d1m + 1.0 / d2m);
    let excited = 2.0 * gg * (1.0 / d1m_a + 1.0 / d2m_a) - gg * (1.0 / d1m + 1.0 / d2m);
    Ok(IswapStrengths { j0: 0.5 * (bus + ground), j1: 0.5 * (bus + excited) })
}

/// Flux derivatives ∂J₀/∂Φ and ∂J₁/∂Φ for a given coupler slope ∂ω₋/∂Φ.
pub fn iswap_flux_derivatives(params: &DeviceParams, omega_minus: f64, slope: f64) -> Result<(f64, f64)> {
    let d = detunings(params, omega_minus);
    let am = params.alpha.coupler;
    let gg = params.g.q1_coupler * params.g.q2_coupler;
    let d1m = checked("Δ₁₋", d.d1m())?;
    let d2m = checked("Δ₂₋", d.d2m())?;
    let d1m_a = checked("Δ₁₋+α₋", d1m + am)?;
    let d2m_a = checked("Δ₂₋+α₋", d2m + am)?;
    let plain = 1.0 / (d1m * d1m) + 1.0 / (d2m * d2m);
    let shifted = 1.0 / (d1m_a * d1m_a) + 1.0 / (d2m_a * d2m_a);
    let dj0 = 0.5 * gg * plain * slope;
    let dj1 = 0.5 * (2.0 * gg * shifted - gg * plain) * slope;
    Ok((dj0, dj1))
}

/// |∂J₀/∂Φ ÷ ∂J₁/∂Φ|, independent of ∂ω₋/∂Φ.
pub fn iswap_derivative_ratio(params: &DeviceParams, omega_minus: f64) -> Result<f64> {
    let d = detunings(params, omega_minus);
    let am = params.alpha.coupler;
    let d1m = checked("Δ₁₋", d.d1m())?;
    let d2m = checked("Δ₂₋", d.d2m())?;
    let d1m_a = checked("Δ₁₋+α₋", d1m + am)?;
    let d2m_a = checked("Δ₂₋+α₋", d2m + am)?;
    let plain = 1.0 / (d1m * d1m) + 1.0 / (d2m * d2m);
    let excited = 2.0 / (d1m_a * d1m_a) + 2.0 / (d2m_a * d2m_a) - plain;
    if excited.abs() <= 1e-12 * plain {
        return Err(Error::Pole { term: "∂J₁/∂Φ", value: excited });
    }
    Ok((plain / excited).abs())
}

/// Computational basis states of the two qubits, written |q1 q2⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoQubitState {
    S00,
    S01,
    S10,
    S11,
}

impl TwoQubitState {
    pub const ALL: [TwoQubitState; 4] = [TwoQubitState::S00, TwoQubitState::S01, TwoQubitState::S10, TwoQubitState::S11];

    pub fn index(self) -> usize {
        match self {
            TwoQubitState::S00 => 0,
            TwoQubitState::S01 => 1,
            TwoQubitState::S10 => 2,
            TwoQubitState::S11 => 3,
        }
    }
}

/// Populations (|00⟩, |01⟩, |10⟩, |11⟩) after evolving a basis state for time
/// `t` under H_int/ħ = J_eff (a₁†a₂ e^{−iφ} + a₁a₂† e^{iφ}). The phase does not
/// enter the populations.
pub fn effective_exchange_populations(j_eff: f64, t: f64, initial: TwoQubitState) -> [f64; 4] {
    let (cos2, sin2) = ((j_eff * t).cos().powi(2), (j_eff * t).sin().powi(2));
    let mut pops = [0.0; 4];
    match initial {
        TwoQubitState::S00 | TwoQubitState::S11 => pops[initial.index()] = 1.0,
        TwoQubitState::S10 => {
            pops[2] = cos2;
            pops[1] = sin2;
        }
        TwoQubitState::S01 => {
            pops[1] = cos2;
            pops[2] = sin2;
        }
    }
    pops
}

/// Modulation time for a complete |10⟩ → |01⟩ transfer: π/(2 J_eff).
pub fn full_swap_time(j_eff: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / j_eff
}

/// J_eff that completes a full swap in time `t`.
pub fn j_eff_for_swap_time(t: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ghz, mhz, to_mhz};

    #[test]
    fn detuning_relations() {
        let a = DeviceParams::device_a();
        let d = detunings(&a, ghz(4.0));
        assert!((to_mhz(d.d12()) + 190.0).abs() < 1e-6);
        assert!((d.d12() - (d.d1p() - d.d2p())).abs() < 1e-3);
        for x in Mode::ALL {
            for y in Mode::ALL {
                assert_eq!(d.delta(x, y), -d.delta(y, x));
            }
        }
        let mut equal = a.clone();
        equal.omega.q2 = equal.omega.q1;
        assert_eq!(detunings(&equal, ghz(4.0)).d12(), 0.0);
    }

    #[test]
    fn zero_coupling_gives_zero_zeta() {
        let a = DeviceParams::device_a().decoupled();
        assert_eq!(zeta_perturbative(&a, ghz(4.0)).unwrap(), 0.0);
    }

    #[test]
    fn term_level_fixture() {
        // Hand evaluation in units of 2π·GHz for a symmetric toy configuration:
        // ω₁ = 5.0, ω₂ = 5.2, ω₊ = 7.0, ω₋ = 4.0, α₁ = α₂ = 0.3, α₊ = 0, α₋ = 0.5,
        // g₁₊ = g₂₊ = 0.1, g₁₋ = g₂₋ = 0.08.
        let mut p = DeviceParams::device_a();
        p.omega.q1 = ghz(5.0);
        p.omega.q2 = ghz(5.2);
        p.omega.bus = ghz(7.0);
        p.alpha.q1 = ghz(0.3);
        p.alpha.q2 = ghz(0.3);
        p.alpha.bus = 0.0;
        p.alpha.coupler = ghz(0.5);
        p.g.q1_bus = ghz(0.1);
        p.g.q2_bus = ghz(0.1);
        p.g.q1_coupler = ghz(0.08);
        p.g.q2_coupler = ghz(0.08);
        let t = zeta_terms(&p, ghz(4.0)).unwrap();
        let to_ghz_units = |x: f64| x / ghz(1.0);

        let (d1p, d2p, d1m, d2m, d12) = (-2.0_f64, -1.8_f64, 1.0_f64, 1.2_f64, -0.2_f64);
        let (gp, gm) = (0.1_f64, 0.08_f64);
        let expect = [
            2.0 * gp.powi(4) / (d1p + d2p) * (1.0 / d1p + 1.0 / d2p).powi(2),
            2.0 * gm.powi(4) / (d1m + d2m + 0.5) * (1.0 / d1m + 1.0 / d2m).powi(2),
            (gp * gp / d1p + gm * gm / d1m).powi(2) * (2.0 / (d12 + 0.3) - 1.0 / d12),
            (gp * gp / d2p + gm * gm / d2m).powi(2) * (2.0 / (-d12 + 0.3) + 1.0 / d12),
            (gp * gm * (1.0 / d1p + 1.0 / d2m) + gm * gp * (1.0 / d1m + 1.0 / d2p)).powi(2) / (d1p + d2m),
            -(gp * gp / (d1p * d1p) + gm * gm / (d1m * d1m)) * (gp * gp / d2p + gm * gm / d2m),
            -(gp * gp / (d2p * d2p) + gm * gm / (d2m * d2m)) * (gp * gp / d1p + gm * gm / d1m),
        ];
        for (got, want) in t.as_array().iter().zip(expect) {
            assert!((to_ghz_units(*got) - want).abs() < 1e-12 * want.abs().max(1e-9), "{got} vs {want}");
        }
        assert!((t.total() - t.as_array().iter().sum::<f64>()).abs() < 1e-6);
    }

    #[test]
    fn pole_reported_with_term() {
        let a = DeviceParams::device_a();
        let err = zeta_perturbative(&a, a.omega.q1).unwrap_err();
        assert!(matches!(err, Error::Pole { term: "Δ₁₋", .. }));
        // Δ₁₊ + Δ₂₋ = 0 ⇔ ω₋ = ω₁ + ω₂ − ω₊
        let wm = a.omega.q1 + a.omega.q2 - a.omega.bus;
        assert!(matches!(zeta_perturbative(&a, wm), Err(Error::Pole { term: "Δ₁₊+Δ₂₋", .. })));
    }

    #[test]
    fn straddling_device_a() {
        let a = DeviceParams::device_a();
        let rep = straddling_ok(&a, a.omega.q1 - ghz(1.0));
        assert!(rep.ok, "{:?}", rep.violations);
        let above = straddling_ok(&a, a.omega.q2 + ghz(0.5));
        assert!(!above.ok);
        assert!(above.violations.iter().any(|v| v.contains("coupler below qubits")));
    }

    #[test]
    fn straddling_boundary_is_excluded() {
        let mut a = DeviceParams::device_a();
        a.alpha.q1 = (a.omega.q1 - a.omega.q2).abs();
        a.alpha.q2 = a.alpha.q1;
        let rep = straddling_ok(&a, a.omega.q1 - ghz(1.0));
        assert!(!rep.ok);
        assert_eq!(rep.violations.len(), 2);
    }

    #[test]
    fn bus_only_exchange() {
        let mut a = DeviceParams::device_a();
        a.g.q1_coupler = 0.0;
        a.g.q2_coupler = 0.0;
        let d = detunings(&a, ghz(4.0));
        let expect = 0.5 * a.g.q1_bus * a.g.q2_bus * (1.0 / d.d1p() + 1.0 / d.d2p());
        assert!((exchange_j(&a, ghz(4.0)).unwrap() - expect).abs() < 1e-9);
        let s = iswap_strengths(&a, ghz(4.0)).unwrap();
        assert!((s.j0 - expect).abs() < 1e-9 && (s.j1 - expect).abs() < 1e-9);
    }

    #[test]
    fn symmetric_exchange_collapses() {
        let mut a = DeviceParams::device_a();
        a.omega.q2 = a.omega.q1;
        let wm = ghz(4.0);
        let expect = a.g.q1_bus.powi(2) / (a.omega.q1 - a.omega.bus) + a.g.q1_coupler.powi(2) / (a.omega.q1 - wm);
        assert!((exchange_j(&a, wm).unwrap() - expect).abs() < 1e-9 * expect.abs());
    }

    #[test]
    fn vanishing_coupler_anharmonicity() {
        let mut b = DeviceParams::device_b();
        b.alpha.coupler = 0.0;
        let wm = b.omega.q1 - ghz(0.84);
        let s = iswap_strengths(&b, wm).unwrap();
        assert!((s.j0 - s.j1).abs() < 1e-9 * s.j0.abs());
        assert!((iswap_derivative_ratio(&b, wm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_device_b_plugin() {
        // Δ₁₋ = 0.84 GHz, Δ₂₋ = Δ₁₋ + 0.278 GHz, α₋ = 0.29 GHz.
        let (d1, d2, a) = (0.84_f64, 1.118_f64, 0.29_f64);
        let plain = 1.0 / (d1 * d1) + 1.0 / (d2 * d2);
        let expect = plain / (2.0 / (d1 + a).powi(2) + 2.0 / (d2 + a).powi(2) - plain);
        let b = DeviceParams::device_b();
        let got = iswap_derivative_ratio(&b, b.omega.q1 - ghz(0.84)).unwrap();
        assert!((got - expect.abs()).abs() < 1e-9);
        assert!((got - 6.2).abs() < 0.1, "{got}");
    }

    #[test]
    fn ratio_ignores_flux_slope() {
        let b = DeviceParams::device_b();
        let wm = b.omega.q1 - ghz(0.84);
        for slope in [-3.0e9, -1.0, 2.5e10] {
            let (dj0, dj1) = iswap_flux_derivatives(&b, wm, slope).unwrap();
            let r = (dj0 / dj1).abs();
            assert!((r - iswap_derivative_ratio(&b, wm).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn exchange_populations() {
        let j = j_eff_for_swap_time(190e-9);
        assert!((to_mhz(j) - 1.3158).abs() < 1e-3);
        let p0 = effective_exchange_populations(j, 0.0, TwoQubitState::S10);
        assert_eq!(p0, [0.0, 0.0, 1.0, 0.0]);
        let full = effective_exchange_populations(j, 190e-9, TwoQubitState::S10);
        assert!((full[1] - 1.0).abs() < 1e-12 && full[2].abs() < 1e-12);
        let half = effective_exchange_populations(j, 95e-9, TwoQubitState::S10);
        assert!((half[1] - 0.5).abs() < 1e-12 && (half[2] - 0.5).abs() < 1e-12);
        assert_eq!(effective_exchange_populations(j, 42e-9, TwoQubitState::S11), [0.0, 0.0, 0.0, 1.0]);
        assert!((full_swap_time(mhz(1.0)) - 250e-9).abs() < 1e-15);
    }
}
