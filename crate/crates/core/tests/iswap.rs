use zzsim::perturbation::iswap_derivative_ratio;
use zzsim::tomography::process::{gate_fidelity, process_fidelity, ptm_from_unitary};
use zzsim::tomography::thermal::{decohered_sqrt_iswap_ptm, SQRT_ISWAP_GATE_TIME};
use zzsim::tomography::{sqrt_iswap, thermal_iswap_fidelity, thermal_population, ThermalGateModel};
use zzsim::units::ghz;
use zzsim::DeviceParams;

// Reference values from an independent numpy/scipy implementation.

#[test]
fn coherence_limited_gate_fidelity() {
    let b = DeviceParams::device_b();
    let ideal = ptm_from_unitary(&sqrt_iswap()).unwrap();
    let actual = decohered_sqrt_iswap_ptm(&b, SQRT_ISWAP_GATE_TIME).unwrap();
    let fg = gate_fidelity(&actual, &ideal, 2).unwrap();
    assert!((fg - 0.99007).abs() < 1e-5, "{fg}");
    let fp = process_fidelity(&actual, &ideal).unwrap();
    assert!((fp - 0.9876).abs() < 1e-4, "{fp}");
}

#[test]
fn thermal_population_regression() {
    let p = thermal_population(ghz(5.7), 0.060).unwrap();
    assert!((p - 0.010361).abs() < 1e-6, "{p}");
}

fn thermal_at(device: &DeviceParams, detuning_ghz: f64, temperature: f64, coherence_from: &DeviceParams) -> f64 {
    let omega_minus = device.omega.q1 + ghz(detuning_ghz);
    let alpha = iswap_derivative_ratio(device, omega_minus).unwrap();
    let p = thermal_population(omega_minus, temperature).unwrap();
    let mut noisy = device.clone();
    noisy.coherence = coherence_from.coherence;
    let model = ThermalGateModel::new(p, alpha, SQRT_ISWAP_GATE_TIME).unwrap();
    thermal_iswap_fidelity(&noisy, &model).unwrap()
}

#[test]
fn thermal_fidelity_regression() {
    let (a, b) = (DeviceParams::device_a(), DeviceParams::device_b());
    let fa = thermal_at(&a, -1.475, 0.2, &b);
    let fb = thermal_at(&b, -0.85, 0.2, &b);
    assert!((fa - 0.92689).abs() < 1e-4, "{fa}");
    assert!((fb - 0.95094).abs() < 1e-4, "{fb}");
    let f0 = thermal_at(&b, -0.85, 0.0, &b);
    assert!((f0 - 0.99009).abs() < 1e-5, "{f0}");
}

#[test]
fn thermal_fidelity_decreases_with_population() {
    let b = DeviceParams::device_b();
    let mut last = f64::INFINITY;
    for k in 0..=10 {
        let model = ThermalGateModel::new(0.01 * k as f64, 6.0, SQRT_ISWAP_GATE_TIME).unwrap();
        let f = thermal_iswap_fidelity(&b, &model).unwrap();
        assert!(f < last, "p = {}: {f} ≥ {last}", 0.01 * k as f64);
        last = f;
    }
}
