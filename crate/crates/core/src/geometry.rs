//! Four reference coupler geometries for comparing perturbative and exact ζ.
//!
//! Each geometry fixes qubit 2 at 5 GHz with qubit 1 above it by Δ₁₂ and sweeps
//! one coupler. The sweep coordinate is the absolute detuning between the swept
//! coupler and qubit 2.

use std::sync::Arc;

use crate::coupler::{find_curve_roots, sweep_curve, CurveRoots, RootOptions, SweepPoint, ZetaCurve, ZetaMethod};
use crate::device::{Coherence, Couplings, DeviceParams, PerMode};
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::units::{ghz, to_hz};

const QUBIT2_GHZ: f64 = 5.0;
const PARKED_BUS_GHZ: f64 = 20.0;
const PARKED_COUPLER_GHZ: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Qubits far apart, one tunable coupler between them.
    FarApart,
    /// Straddling qubits, fixed bus above and tunable coupler below.
    StraddlingBothCouplers,
    /// Straddling qubits, single coupler above.
    StraddlingCouplerAbove,
    /// Qubits outside the straddling regime, bus above and coupler below.
    OutsideStraddling,
}

/// Which coupler is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptCoupler {
    /// The tunable coupler, placed ω₂ + x (between the qubits).
    BetweenQubits,
    /// The tunable coupler, placed ω₂ − x.
    Below,
    /// The bus-slot coupler, placed ω₂ + x.
    Above,
}

impl Geometry {
    pub const ALL: [Geometry; 4] = [
        Geometry::FarApart,
        Geometry::StraddlingBothCouplers,
        Geometry::StraddlingCouplerAbove,
        Geometry::OutsideStraddling,
    ];

    pub fn id(self) -> char {
        match self {
            Geometry::FarApart => 'a',
            Geometry::StraddlingBothCouplers => 'b',
            Geometry::StraddlingCouplerAbove => 'c',
            Geometry::OutsideStraddling => 'd',
        }
    }

    pub fn from_id(id: char) -> Result<Geometry> {
        Geometry::ALL
            .into_iter()
            .find(|g| g.id() == id)
            .ok_or_else(|| Error::Domain(format!("unknown geometry `{id}` (expected a–d)")))
    }

    pub fn swept(self) -> SweptCoupler {
        match self {
            Geometry::FarApart => SweptCoupler::BetweenQubits,
            Geometry::StraddlingCouplerAbove => SweptCoupler::Above,
            _ => SweptCoupler::Below,
        }
    }

    /// Qubit detuning Δ₁₂/2π in GHz.
    fn delta12_ghz(self) -> f64 {
        match self {
            Geometry::FarApart => 1.5,
            Geometry::StraddlingBothCouplers | Geometry::StraddlingCouplerAbove => 0.25,
            Geometry::OutsideStraddling => 0.45,
        }
    }

    /// Sweep range of the coupler–qubit-2 detuning (rad/s).
    pub fn sweep_range(self) -> (f64, f64) {
        match self {
            Geometry::FarApart => (ghz(0.05), ghz(1.45)),
            _ => (ghz(0.2), ghz(3.0)),
        }
    }

    /// Device parameters and coupler frequency ω₋ at sweep coordinate `x`.
    pub fn params_at(self, x: f64) -> (DeviceParams, f64) {
        let w2 = ghz(QUBIT2_GHZ);
        let w1 = w2 + ghz(self.delta12_ghz());
        let qubit_alpha = ghz(0.35);
        let coupler_alpha = ghz(0.75);
        let (bus, bus_alpha, minus, g) = match self.swept() {
            SweptCoupler::BetweenQubits => (
                ghz(PARKED_BUS_GHZ),
                0.0,
                w2 + x,
                Couplings { q1_bus: 0.0, q2_bus: 0.0, q1_coupler: ghz(0.14), q2_coupler: ghz(0.14) },
            ),
            SweptCoupler::Below => (
                w2 + ghz(1.8),
                0.0,
                w2 - x,
                Couplings { q1_bus: ghz(0.16), q2_bus: ghz(0.16), q1_coupler: ghz(0.14), q2_coupler: ghz(0.14) },
            ),
            SweptCoupler::Above => (
                w2 + x,
                coupler_alpha,
                ghz(PARKED_COUPLER_GHZ),
                Couplings { q1_bus: ghz(0.12), q2_bus: ghz(0.12), q1_coupler: 0.0, q2_coupler: 0.0 },
            ),
        };
        let params = DeviceParams {
            name: format!("geometry-{}", self.id()),
            omega: PerMode { q1: w1, q2: w2, bus, coupler: minus },
            alpha: PerMode { q1: qubit_alpha, q2: qubit_alpha, bus: bus_alpha, coupler: coupler_alpha },
            g,
            coherence: [Coherence::IDEAL; 2],
            omega_minus_max: minus.max(ghz(PARKED_COUPLER_GHZ)),
            flux_quantum: 1.0,
        };
        (params, minus)
    }

    /// Smallest detuning between a qubit and an active (coupled) coupler.
    pub fn min_active_detuning(self, x: f64) -> f64 {
        let (p, minus) = self.params_at(x);
        let mut dets = Vec::new();
        if p.g.q1_bus != 0.0 || p.g.q2_bus != 0.0 {
            dets.extend([(p.omega.q1 - p.omega.bus).abs(), (p.omega.q2 - p.omega.bus).abs()]);
        }
        if p.g.q1_coupler != 0.0 || p.g.q2_coupler != 0.0 {
            dets.extend([(p.omega.q1 - minus).abs(), (p.omega.q2 - minus).abs()]);
        }
        dets.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// True when every active qubit–coupler detuning exceeds `factor` × the largest coupling.
    pub fn is_dispersive(self, x: f64, factor: f64) -> bool {
        let (p, _) = self.params_at(x);
        self.min_active_detuning(x) > factor * p.g.max_abs()
    }
}

/// ζ along a geometry's sweep coordinate.
#[derive(Debug, Clone)]
pub struct GeometryCurve {
    pub geometry: Geometry,
    pub method: ZetaMethod,
    space: Arc<HilbertSpace>,
}

impl GeometryCurve {
    pub fn new(geometry: Geometry, method: ZetaMethod, dims: [usize; 4]) -> Result<GeometryCurve> {
        Ok(GeometryCurve { geometry, method, space: Arc::new(HilbertSpace::device(dims)?) })
    }

    pub fn sweep(&self, xs: &[f64]) -> Vec<SweepPoint> {
        sweep_curve(self, xs)
    }

    pub fn roots(&self, opts: &RootOptions) -> Result<CurveRoots> {
        find_curve_roots(self, self.geometry.sweep_range(), opts)
    }
}

impl ZetaCurve for GeometryCurve {
    fn evaluate(&self, x: f64) -> Result<(f64, Option<f64>)> {
        let (params, minus) = self.geometry.params_at(x);
        crate::coupler::evaluate_zeta(&params, minus, self.method, &self.space)
    }
}

/// Largest relative deviation |approx − exact|/|exact| over the sweep points
/// where |ζ_exact|/2π exceeds `min_zeta_hz` and every active detuning exceeds
/// `factor` × the largest coupling. Returns (deviation, x, points compared).
pub fn worst_relative_deviation(
    geometry: Geometry,
    approx: &[SweepPoint],
    exact: &[SweepPoint],
    min_zeta_hz: f64,
    factor: f64,
) -> (f64, f64, usize) {
    let mut worst = (0.0, f64::NAN, 0);
    for (a, e) in approx.iter().zip(exact) {
        let (Some(za), Some(ze)) = (a.zeta, e.zeta) else { continue };
        if to_hz(ze).abs() <= min_zeta_hz || !geometry.is_dispersive(e.x, factor) {
            continue;
        }
        let dev = (za - ze).abs() / ze.abs();
        worst.2 += 1;
        if dev > worst.0 {
            worst = (dev, e.x, worst.2);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::to_ghz;

    #[test]
    fn ids_round_trip() {
        for g in Geometry::ALL {
            assert_eq!(Geometry::from_id(g.id()).unwrap(), g);
        }
        assert!(Geometry::from_id('z').is_err());
    }

    #[test]
    fn parameters_are_valid() {
        for g in Geometry::ALL {
            let (lo, hi) = g.sweep_range();
            for x in [lo, hi] {
                let (p, minus) = g.params_at(x);
                p.validate().unwrap();
                assert!(minus > 0.0);
            }
        }
    }

    #[test]
    fn coupler_above_perturbative_root() {
        let curve = GeometryCurve::new(Geometry::StraddlingCouplerAbove, ZetaMethod::Perturbative, [4, 4, 3, 4]).unwrap();
        let found = curve.roots(&RootOptions::default()).unwrap();
        let xs: Vec<f64> = found.roots.iter().map(|r| to_ghz(r.x)).collect();
        assert_eq!(xs.len(), 1, "{xs:?}");
        assert!((xs[0] - 0.7294).abs() < 0.002, "{xs:?}");
    }
}
