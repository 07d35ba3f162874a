//! Device parameters for the two-qubit, two-coupler circuit.
//!
//! Parameter files are JSON documents with one key per device symbol.
//! Frequencies (mode frequencies, anharmonicities and couplings) are given in
//! GHz as ordinary frequencies, coherence times in µs. Unknown keys are
//! rejected so that typos never silently fall back to defaults.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ghz, to_ghz, us, TWO_PI};

/// The four circuit elements, in the fixed tensor-product order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    Q1,
    Q2,
    BusPlus,
    CouplerMinus,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Q1, Mode::Q2, Mode::BusPlus, Mode::CouplerMinus];

    /// Position in the canonical ordering (Q1, Q2, BusPlus, CouplerMinus).
    pub fn index(self) -> usize {
        match self {
            Mode::Q1 => 0,
            Mode::Q2 => 1,
            Mode::BusPlus => 2,
            Mode::CouplerMinus => 3,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Mode::Q1 => "1",
            Mode::Q2 => "2",
            Mode::BusPlus => "+",
            Mode::CouplerMinus => "-",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Mode::Q1 => "Q1",
            Mode::Q2 => "Q2",
            Mode::BusPlus => "BusPlus",
            Mode::CouplerMinus => "CouplerMinus",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
}

impl Qubit {
    pub const BOTH: [Qubit; 2] = [Qubit::One, Qubit::Two];

    pub fn mode(self) -> Mode {
        match self {
            Qubit::One => Mode::Q1,
            Qubit::Two => Mode::Q2,
        }
    }

    pub fn other(self) -> Qubit {
        match self {
            Qubit::One => Qubit::Two,
            Qubit::Two => Qubit::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Qubit::One => 0,
            Qubit::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupler {
    /// Fixed-frequency bus cavity (`+`).
    Bus,
    /// Flux-tunable coupler (`−`).
    Tunable,
}

impl Coupler {
    pub const BOTH: [Coupler; 2] = [Coupler::Bus, Coupler::Tunable];

    pub fn mode(self) -> Mode {
        match self {
            Coupler::Bus => Mode::BusPlus,
            Coupler::Tunable => Mode::CouplerMinus,
        }
    }
}

/// One value per circuit mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerMode<T> {
    pub q1: T,
    pub q2: T,
    pub bus: T,
    pub coupler: T,
}

impl<T> Index<Mode> for PerMode<T> {
    type Output = T;
    fn index(&self, mode: Mode) -> &T {
        match mode {
            Mode::Q1 => &self.q1,
            Mode::Q2 => &self.q2,
            Mode::BusPlus => &self.bus,
            Mode::CouplerMinus => &self.coupler,
        }
    }
}

impl<T> IndexMut<Mode> for PerMode<T> {
    fn index_mut(&mut self, mode: Mode) -> &mut T {
        match mode {
            Mode::Q1 => &mut self.q1,
            Mode::Q2 => &mut self.q2,
            Mode::BusPlus => &mut self.bus,
            Mode::CouplerMinus => &mut self.coupler,
        }
    }
}

/// Qubit–coupler coupling rates g_{ij} (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Couplings {
    pub q1_bus: f64,
    pub q2_bus: f64,
    pub q1_coupler: f64,
    pub q2_coupler: f64,
}

impl Couplings {
    pub fn get(&self, qubit: Qubit, coupler: Coupler) -> f64 {
        match (qubit, coupler) {
            (Qubit::One, Coupler::Bus) => self.q1_bus,
            (Qubit::Two, Coupler::Bus) => self.q2_bus,
            (Qubit::One, Coupler::Tunable) => self.q1_coupler,
            (Qubit::Two, Coupler::Tunable) => self.q2_coupler,
        }
    }

    pub fn max_abs(&self) -> f64 {
        [self.q1_bus, self.q2_bus, self.q1_coupler, self.q2_coupler]
            .iter()
            .fold(0.0_f64, |m, g| m.max(g.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Couplings {
        Couplings {
            q1_bus: self.q1_bus * factor,
            q2_bus: self.q2_bus * factor,
            q1_coupler: self.q1_coupler * factor,
            q2_coupler: self.q2_coupler * factor,
        }
    }
}

/// Relaxation and echo coherence times of one qubit (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coherence {
    pub t1: f64,
    pub t2: f64,
}

impl Coherence {
    /// No decoherence at all.
    pub const IDEAL: Coherence = Coherence { t1: f64::INFINITY, t2: f64::INFINITY };
}

/// Full parameter set of a device. Frequencies are angular (rad/s).
///
/// `omega.coupler` holds the coupler frequency at the reference bias; every
/// operation that depends on the flux bias takes ω₋ as an explicit argument.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    pub name: String,
    pub omega: PerMode<f64>,
    pub alpha: PerMode<f64>,
    pub g: Couplings,
    pub coherence: [Coherence; 2],
    pub omega_minus_max: f64,
    /// Flux quantum in the units used for flux arguments (1.0 = normalized).
    pub flux_quantum: f64,
}

impl DeviceParams {
    pub fn omega_of(&self, mode: Mode) -> f64 {
        self.omega[mode]
    }

    pub fn coherence_of(&self, qubit: Qubit) -> Coherence {
        self.coherence[qubit.index()]
    }

    /// Parameters with the roles of qubit 1 and qubit 2 exchanged.
    pub fn with_qubits_swapped(&self) -> DeviceParams {
        let mut out = self.clone();
        std::mem::swap(&mut out.omega.q1, &mut out.omega.q2);
        std::mem::swap(&mut out.alpha.q1, &mut out.alpha.q2);
        std::mem::swap(&mut out.g.q1_bus, &mut out.g.q2_bus);
        std::mem::swap(&mut out.g.q1_coupler, &mut out.g.q2_coupler);
        out.coherence.swap(0, 1);
        out
    }

    /// Same device with every coupling set to zero.
    pub fn decoupled(&self) -> DeviceParams {
        DeviceParams { g: Couplings::default(), ..self.clone() }
    }

    /// Shift every mode frequency (and ω₋^max) by the same amount.
    pub fn shifted(&self, delta: f64) -> DeviceParams {
        let mut out = self.clone();
        for mode in Mode::ALL {
            out.omega[mode] += delta;
        }
        out.omega_minus_max += delta;
        out
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation { field: field.into(), reason: format!("must be positive, got {v}") })
            }
        }
        positive("omega_1", self.omega.q1)?;
        positive("omega_2", self.omega.q2)?;
        positive("omega_plus", self.omega.bus)?;
        positive("omega_minus", self.omega.coupler)?;
        positive("omega_minus_max", self.omega_minus_max)?;
        positive("flux_quantum", self.flux_quantum)?;
        for (field, a) in [
            ("alpha_1", self.alpha.q1),
            ("alpha_2", self.alpha.q2),
            ("alpha_plus", self.alpha.bus),
            ("alpha_minus", self.alpha.coupler),
        ] {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::Validation { field: field.into(), reason: format!("must be non-negative, got {a}") });
            }
        }
        for (field, g) in [
            ("g_1plus", self.g.q1_bus),
            ("g_2plus", self.g.q2_bus),
            ("g_1minus", self.g.q1_coupler),
            ("g_2minus", self.g.q2_coupler),
        ] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::Validation { field: field.into(), reason: format!("must be non-negative, got {g}") });
            }
        }
        // Infinite coherence times mean no decoherence.
        fn time(field: &str, v: f64) -> Result<()> {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation { field: field.into(), reason: format!("must be positive, got {v}") })
            }
        }
        for (i, c) in self.coherence.iter().enumerate() {
            let q = i + 1;
            time(&format!("t1_{q}"), c.t1)?;
            time(&format!("t2e_{q}"), c.t2)?;
            if c.t2 > 2.0 * c.t1 {
                return Err(Error::Validation {
                    field: format!("t2e_{q}"),
                    reason: format!("qubit {q}: T2 = {} µs exceeds 2·T1 = {} µs", c.t2 * 1e6, 2.0 * c.t1 * 1e6),
                });
            }
        }
        Ok(())
    }

    pub fn from_file(file: &DeviceFile) -> Result<DeviceParams> {
        let params = DeviceParams {
            name: file.name.clone(),
            omega: PerMode {
                q1: ghz(file.omega_1),
                q2: ghz(file.omega_2),
                bus: ghz(file.omega_plus),
                coupler: ghz(file.omega_minus_max),
            },
            alpha: PerMode {
                q1: ghz(file.alpha_1),
                q2: ghz(file.alpha_2),
                bus: ghz(file.alpha_plus),
                coupler: ghz(file.alpha_minus),
            },
            g: Couplings {
                q1_bus: ghz(file.g_1plus),
                q2_bus: ghz(file.g_2plus),
                q1_coupler: ghz(file.g_1minus),
                q2_coupler: ghz(file.g_2minus),
            },
            coherence: [
                Coherence { t1: us(file.t1_1), t2: us(file.t2e_1) },
                Coherence { t1: us(file.t1_2), t2: us(file.t2e_2) },
            ],
            omega_minus_max: ghz(file.omega_minus_max),
            flux_quantum: file.flux_quantum,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn to_file(&self) -> DeviceFile {
        DeviceFile {
            name: self.name.clone(),
            omega_1: to_ghz(self.omega.q1),
            alpha_1: to_ghz(self.alpha.q1),
            t1_1: self.coherence[0].t1 * 1e6,
            t2e_1: self.coherence[0].t2 * 1e6,
            omega_2: to_ghz(self.omega.q2),
            alpha_2: to_ghz(self.alpha.q2),
            t1_2: self.coherence[1].t1 * 1e6,
            t2e_2: self.coherence[1].t2 * 1e6,
            omega_plus: to_ghz(self.omega.bus),
            alpha_plus: to_ghz(self.alpha.bus),
            omega_minus_max: to_ghz(self.omega_minus_max),
            alpha_minus: to_ghz(self.alpha.coupler),
            g_1plus: to_ghz(self.g.q1_bus),
            g_2plus: to_ghz(self.g.q2_bus),
            g_1minus: to_ghz(self.g.q1_coupler),
            g_2minus: to_ghz(self.g.q2_coupler),
            flux_quantum: self.flux_quantum,
        }
    }

    pub fn from_json(text: &str) -> Result<DeviceParams> {
        let file: DeviceFile = serde_json::from_str(text)?;
        DeviceParams::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DeviceParams> {
        let text = std::fs::read_to_string(path)?;
        DeviceParams::from_json(&text)
    }

    /// Device A, bundled parameter set.
    pub fn device_a() -> DeviceParams {
        DeviceParams::from_json(DEVICE_A_JSON).expect("bundled device_a parameters are valid")
    }

    /// Device B, bundled parameter set.
    pub fn device_b() -> DeviceParams {
        DeviceParams::from_json(DEVICE_B_JSON).expect("bundled device_b parameters are valid")
    }

    pub fn bundled(name: &str) -> Option<DeviceParams> {
        match name {
            "device_a" | "a" | "A" => Some(DeviceParams::device_a()),
            "device_b" | "b" | "B" => Some(DeviceParams::device_b()),
            _ => None,
        }
    }

    /// Qubit–qubit detuning ω₁ − ω₂ in Hz (ordinary frequency); handy in reports.
    pub fn qubit_detuning_hz(&self) -> f64 {
        (self.omega.q1 - self.omega.q2) / TWO_PI
    }
}

pub const DEVICE_A_JSON: &str = include_str!("../devices/device_a.json");
pub const DEVICE_B_JSON: &str = include_str!("../devices/device_b.json");

fn default_flux_quantum() -> f64 {
    1.0
}

/// On-disk representation: frequencies in GHz, times in µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub name: String,
    pub omega_1: f64,
    pub alpha_1: f64,
    pub t1_1: f64,
    pub t2e_1: f64,
    pub omega_2: f64,
    pub alpha_2: f64,
    pub t1_2: f64,
    pub t2e_2: f64,
    pub omega_plus: f64,
    #[serde(default)]
    pub alpha_plus: f64,
    pub omega_minus_max: f64,
    pub alpha_minus: f64,
    pub g_1plus: f64,
    pub g_2plus: f64,
    pub g_1minus: f64,
    pub g_2minus: f64,
    #[serde(default = "default_flux_quantum")]
    pub flux_quantum: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{to_mhz, TWO_PI};

    #[test]
    fn bundled_device_a_matches_table() {
        let a = DeviceParams::device_a();
        assert!((to_ghz(a.omega.q1) - 4.973).abs() < 1e-12);
        assert!((to_mhz(a.g.q1_bus) - 135.0).abs() < 1e-9);
        assert!((to_mhz(a.alpha.coupler) - 750.0).abs() < 1e-9);
        assert!((a.coherence[0].t1 - 15.2e-6).abs() < 1e-15);
        assert_eq!(a.alpha.bus, 0.0);
    }

    #[test]
    fn bundled_device_b_matches_table() {
        let b = DeviceParams::device_b();
        assert!((to_ghz(b.omega_minus_max) - 7.19).abs() < 1e-12);
        assert!((to_mhz(b.alpha.coupler) - 290.0).abs() < 1e-9);
        assert!((b.omega.q2 / TWO_PI - 6.421e9).abs() < 1e-3);
    }

    #[test]
    fn t2_above_twice_t1_names_qubit() {
        let mut file = DeviceParams::device_a().to_file();
        file.t2e_2 = 2.0 * file.t1_2 + 1.0;
        let err = DeviceParams::from_file(&file).unwrap_err();
        match err {
            Error::Validation { field, reason } => {
                assert_eq!(field, "t2e_2");
                assert!(reason.contains("qubit 2"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let text = DEVICE_A_JSON.replacen('{', "{\n  \"omega_3\": 1.0,", 1);
        assert!(matches!(DeviceParams::from_json(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn file_round_trip() {
        let a = DeviceParams::device_a();
        let back = DeviceParams::from_file(&a.to_file()).unwrap();
        assert!((back.omega.q2 - a.omega.q2).abs() < 1e-3);
        assert_eq!(back.name, a.name);
    }

    #[test]
    fn swap_is_involution() {
        let a = DeviceParams::device_a();
        assert_eq!(a.with_qubits_swapped().with_qubits_swapped(), a);
    }
}
