//! √iSWAP fidelity with a thermally excited coupler.
//!
//! With probability p the coupler starts excited, the exchange rate drops by
//! the factor α, and the calibrated modulation only produces U^{1/α}.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use crate::channels::{decohere_in_place, DensityMatrix, NoiseParams};
use crate::device::{DeviceParams, Qubit};
use crate::error::{Error, Result};
use crate::linalg::{c, unitary_root, CMatrix, ONE, ZERO};
use crate::units::{HBAR, K_B};

use super::process::{process_tomography_inputs, ptm_from_channel, PauliTransferMatrix};
use super::state::state_fidelity;

/// Gate time of the √iSWAP used for tomography and the thermal model.
pub const SQRT_ISWAP_GATE_TIME: f64 = 95e-9;

/// The √iSWAP unitary with +i/√2 off-diagonal elements.
pub fn sqrt_iswap() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        4,
        4,
        &[
            ONE, ZERO, ZERO, ZERO,
            ZERO, c(s, 0.0), c(0.0, s), ZERO,
            ZERO, c(0.0, s), c(s, 0.0), ZERO,
            ZERO, ZERO, ZERO, ONE,
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalGateModel {
    /// Probability that the coupler starts in its excited state.
    pub p: f64,
    /// Ratio of ground- to excited-coupler exchange rates.
    pub alpha_exponent: f64,
    pub gate_time: f64,
}

impl ThermalGateModel {
    pub fn new(p: f64, alpha_exponent: f64, gate_time: f64) -> Result<ThermalGateModel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation { field: "p".into(), reason: format!("must lie in [0, 1], got {p}") });
        }
        if !(alpha_exponent > 0.0 && alpha_exponent.is_finite()) {
            return Err(Error::Validation {
                field: "alpha_exponent".into(),
                reason: format!("must be positive, got {alpha_exponent}"),
            });
        }
        if !(gate_time > 0.0 && gate_time.is_finite()) {
            return Err(Error::Validation { field: "gate_time".into(), reason: format!("must be positive, got {gate_time}") });
        }
        Ok(ThermalGateModel { p, alpha_exponent, gate_time })
    }

    /// U^{1/α}, the partial gate for an excited coupler.
    pub fn excited_unitary(&self) -> Result<CMatrix> {
        unitary_root(&sqrt_iswap(), self.alpha_exponent)
    }
}

/// Per-qubit decoherence over one gate: qubit 2 first, then qubit 1.
pub fn decohere_both(m: &mut CMatrix, noise: &[NoiseParams; 2]) {
    let (e1, e2) = noise[1].decay_factors();
    decohere_in_place(m, 2, 1, e1, e2);
    let (e1, e2) = noise[0].decay_factors();
    decohere_in_place(m, 2, 0, e1, e2);
}

/// Mixture of the full and partial gate, followed by decoherence on both qubits.
pub fn thermal_channel(model: &ThermalGateModel, noise: &[NoiseParams; 2]) -> Result<impl Fn(&CMatrix) -> CMatrix> {
    let u = sqrt_iswap();
    let u1 = model.excited_unitary()?;
    let p = model.p;
    let noise = *noise;
    Ok(move |rho: &CMatrix| {
        let mut out = (&u * rho * u.adjoint()) * c(1.0 - p, 0.0) + (&u1 * rho * u1.adjoint()) * c(p, 0.0);
        decohere_both(&mut out, &noise);
        out
    })
}

fn device_noise(params: &DeviceParams, gate_time: f64) -> Result<[NoiseParams; 2]> {
    Ok([
        NoiseParams::from_coherence(params.coherence_of(Qubit::One), gate_time)?,
        NoiseParams::from_coherence(params.coherence_of(Qubit::Two), gate_time)?,
    ])
}

/// State fidelity against the ideal √iSWAP output, averaged over the 16
/// process-tomography inputs.
pub fn thermal_iswap_fidelity(params: &DeviceParams, model: &ThermalGateModel) -> Result<f64> {
    let channel = thermal_channel(model, &device_noise(params, model.gate_time)?)?;
    let u = sqrt_iswap();
    let inputs = process_tomography_inputs();
    let fidelities = inputs
        .par_iter()
        .map(|rho| {
            let ideal = DensityMatrix::unchecked(&u * rho.matrix() * u.adjoint());
            let actual = DensityMatrix::new(channel(rho.matrix()))?;
            state_fidelity(&ideal, &actual)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(fidelities.iter().sum::<f64>() / fidelities.len() as f64)
}

/// PTM of the ideal √iSWAP followed by one gate time of decoherence on each qubit.
pub fn decohered_sqrt_iswap_ptm(params: &DeviceParams, gate_time: f64) -> Result<PauliTransferMatrix> {
    let noise = device_noise(params, gate_time)?;
    let u = sqrt_iswap();
    ptm_from_channel(2, |x| {
        let mut out = &u * x * u.adjoint();
        decohere_both(&mut out, &noise);
        out
    })
}

/// Excited-state population of a two-level mode at temperature T (kelvin).
pub fn thermal_population(omega: f64, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be ≥ 0, got {temperature}")));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("mode frequency must be positive, got {omega}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + (HBAR * omega / (K_B * temperature)).exp()))
}

/// One temperature of a thermal √iSWAP sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    /// Kelvin.
    pub temperature: f64,
    pub p: f64,
    pub fidelity: f64,
}

/// Thermal √iSWAP fidelity across `temperatures` with the coupler parked at
/// ω₋ and the qubit coherence taken from `params`.
pub fn thermal_sweep(
    params: &DeviceParams,
    omega_minus: f64,
    alpha_exponent: f64,
    temperatures: &[f64],
) -> Result<Vec<ThermalPoint>> {
    temperatures
        .iter()
        .map(|&temperature| {
            let p = thermal_population(omega_minus, temperature)?;
            let model = ThermalGateModel::new(p, alpha_exponent, SQRT_ISWAP_GATE_TIME)?;
            Ok(ThermalPoint { temperature, p, fidelity: thermal_iswap_fidelity(params, &model)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, unitarity_defect};
    use crate::units::ghz;

    #[test]
    fn root_round_trip() {
        for alpha in [3.0, 6.0, 11.17] {
            let model = ThermalGateModel::new(0.1, alpha, SQRT_ISWAP_GATE_TIME).unwrap();
            let root = model.excited_unitary().unwrap();
            assert!(unitarity_defect(&root) < 1e-12);
            let mut acc = CMatrix::identity(4, 4);
            if alpha.fract() == 0.0 {
                for _ in 0..alpha as usize {
                    acc = &root * acc;
                }
                assert!(frobenius(&(acc - sqrt_iswap())) < 1e-10);
            }
        }
    }

    #[test]
    fn ideal_limit_is_perfect() {
        let mut params = DeviceParams::device_b();
        params.coherence = [crate::device::Coherence::IDEAL; 2];
        let model = ThermalGateModel::new(0.0, 6.0, SQRT_ISWAP_GATE_TIME).unwrap();
        assert!((thermal_iswap_fidelity(&params, &model).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn population_closed_forms() {
        assert_eq!(thermal_population(ghz(5.0), 0.0).unwrap(), 0.0);
        // ħω = kT ln 3 ⇒ p = 1/4.
        let t = 0.05;
        let omega = K_B * t * 3f64.ln() / HBAR;
        assert!((thermal_population(omega, t).unwrap() - 0.25).abs() < 1e-15);
        assert!(thermal_population(ghz(5.0), -0.01).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ThermalGateModel::new(1.2, 3.0, 95e-9).is_err());
        assert!(ThermalGateModel::new(0.1, 0.0, 95e-9).is_err());
        assert!(ThermalGateModel::new(0.1, 3.0, 0.0).is_err());
    }
}
