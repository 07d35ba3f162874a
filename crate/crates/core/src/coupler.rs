//! Coupler flux map, zero-ζ root finding and parametric drive strength.
//!
//! Flux is measured in units of Φ₀ throughout. The map is the symmetric-SQUID
//! law ω₋(Φ) = ω₋^max √|cos(πΦ)|; results anchored to measured data are stated
//! in ω₋ space, so flux is only a convenience coordinate.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::perturbation::{exchange_j_slope, zeta_perturbative};
use crate::spectrum::zeta_exact_report;
use crate::units::{ghz, hz, mhz, to_hz};

/// Coupler frequency at flux `phi` (Φ₀ units).
pub fn omega_minus_of_flux(params: &DeviceParams, phi: f64) -> f64 {
    params.omega_minus_max * (PI * phi).cos().abs().sqrt()
}

/// ∂ω₋/∂Φ in rad/s per Φ₀. Infinite at the half-flux minimum.
pub fn flux_slope(params: &DeviceParams, phi: f64) -> f64 {
    let x = PI * phi;
    let cos = x.cos();
    if cos == 0.0 {
        return f64::NEG_INFINITY;
    }
    -params.omega_minus_max * 0.5 * PI * cos.signum() * x.sin() / cos.abs().sqrt()
}

/// A point on the canonical branch Φ ∈ [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPoint {
    pub phi: f64,
    pub omega_minus: f64,
}

impl FluxPoint {
    /// Fold `phi` into [0, 1) and evaluate the map.
    pub fn at(params: &DeviceParams, phi: f64) -> Result<FluxPoint> {
        if !phi.is_finite() {
            return Err(Error::Domain(format!("flux must be finite, got {phi}")));
        }
        let folded = phi.rem_euclid(1.0);
        Ok(FluxPoint { phi: folded, omega_minus: omega_minus_of_flux(params, folded) })
    }

    /// The flux in [0, ½] that tunes the coupler to `omega_minus`.
    pub fn for_frequency(params: &DeviceParams, omega_minus: f64) -> Result<FluxPoint> {
        if !(omega_minus > 0.0 && omega_minus <= params.omega_minus_max) {
            return Err(Error::Domain(format!(
                "ω₋ = {:.6} GHz is outside (0, ω₋^max = {:.6} GHz]",
                omega_minus / ghz(1.0),
                params.omega_minus_max / ghz(1.0)
            )));
        }
        let ratio = (omega_minus / params.omega_minus_max).powi(2);
        Ok(FluxPoint { phi: ratio.min(1.0).acos() / PI, omega_minus })
    }

    /// The flux expressed in the device's physical flux unit.
    pub fn physical_flux(&self, params: &DeviceParams) -> f64 {
        self.phi * params.flux_quantum
    }
}

/// Flux modulation Φ(t) = Θ + δ cos(ω_Φ t + φ), all flux in Φ₀ units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationDrive {
    pub theta: f64,
    pub delta: f64,
    pub omega_phi: f64,
    pub phase_phi: f64,
}

impl ModulationDrive {
    pub fn new(theta: f64, delta: f64, omega_phi: f64, phase_phi: f64) -> Result<ModulationDrive> {
        for (field, v) in [("theta", theta), ("delta", delta), ("omega_phi", omega_phi), ("phase_phi", phase_phi)] {
            if !v.is_finite() {
                return Err(Error::Validation { field: field.into(), reason: format!("must be finite, got {v}") });
            }
        }
        if delta < 0.0 {
            return Err(Error::Validation { field: "delta".into(), reason: format!("must be ≥ 0, got {delta}") });
        }
        Ok(ModulationDrive { theta, delta, omega_phi, phase_phi })
    }

    pub fn flux_at(&self, t: f64) -> f64 {
        self.theta + self.delta * (self.omega_phi * t + self.phase_phi).cos()
    }

    /// True when [Θ − δ, Θ + δ] contains no extremum of the flux map (multiples of ½).
    pub fn stays_on_branch(&self) -> bool {
        let lo = ((self.theta - self.delta) * 2.0).floor();
        let hi = ((self.theta + self.delta) * 2.0).ceil();
        // lo is the last extremum at or below the window, hi the first at or above.
        hi - lo <= 1.0 || self.delta == 0.0
    }
}

/// Effective exchange rate (δ/2)·∂J/∂Φ at the bias point Θ.
pub fn effective_drive_strength(params: &DeviceParams, drive: &ModulationDrive) -> Result<f64> {
    let slope = flux_slope(params, drive.theta);
    if drive.delta == 0.0 || slope == 0.0 {
        return Ok(0.0);
    }
    if !drive.stays_on_branch() {
        return Err(Error::Domain(format!(
            "modulation Θ = {} ± δ = {} crosses an extremum of the flux map",
            drive.theta, drive.delta
        )));
    }
    let omega = omega_minus_of_flux(params, drive.theta);
    Ok(0.5 * drive.delta * exchange_j_slope(params, omega)? * slope)
}

/// Modulation amplitude δ that yields |J_eff| = `j_eff` at bias Θ.
pub fn drive_amplitude_for(params: &DeviceParams, theta: f64, j_eff: f64) -> Result<f64> {
    let omega = omega_minus_of_flux(params, theta);
    let per_flux = exchange_j_slope(params, omega)? * flux_slope(params, theta);
    if per_flux == 0.0 || !per_flux.is_finite() {
        return Err(Error::Domain(format!("∂J/∂Φ = {per_flux} at Θ = {theta}; no finite amplitude")));
    }
    Ok((2.0 * j_eff / per_flux).abs())
}

/// How ζ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZetaMethod {
    Exact,
    Perturbative,
}

impl ZetaMethod {
    pub fn name(self) -> &'static str {
        match self {
            ZetaMethod::Exact => "exact",
            ZetaMethod::Perturbative => "perturbative",
        }
    }
}

impl std::str::FromStr for ZetaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<ZetaMethod> {
        match s {
            "exact" => Ok(ZetaMethod::Exact),
            "pert" | "perturbative" => Ok(ZetaMethod::Perturbative),
            other => Err(Error::Domain(format!("unknown ζ method `{other}` (expected exact or pert)"))),
        }
    }
}

/// A ζ curve over a scalar sweep coordinate.
pub trait ZetaCurve: Sync {
    /// ζ (rad/s) and, when available, the smallest computational-state overlap.
    fn evaluate(&self, x: f64) -> Result<(f64, Option<f64>)>;
}

/// One evaluated sweep point; `zeta` is `None` where evaluation failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub zeta: Option<f64>,
    /// Smallest computational-state overlap (exact method only).
    pub min_overlap: Option<f64>,
    pub error: Option<String>,
}

/// Evaluate a curve on every point, in parallel; failures are kept per point.
pub fn sweep_curve<C: ZetaCurve>(curve: &C, xs: &[f64]) -> Vec<SweepPoint> {
    xs.par_iter()
        .map(|&x| match curve.evaluate(x) {
            Ok((z, overlap)) => SweepPoint { x, zeta: Some(z), min_overlap: overlap, error: None },
            Err(e) => SweepPoint { x, zeta: None, min_overlap: None, error: Some(e.to_string()) },
        })
        .collect()
}

/// Evaluates ζ(ω₋) for one device and method.
#[derive(Debug, Clone)]
pub struct ZetaEvaluator {
    pub params: DeviceParams,
    pub method: ZetaMethod,
    space: Arc<HilbertSpace>,
}

impl ZetaEvaluator {
    pub fn new(params: DeviceParams, method: ZetaMethod) -> ZetaEvaluator {
        ZetaEvaluator { params, method, space: Arc::new(HilbertSpace::default_device()) }
    }

    pub fn with_dims(params: DeviceParams, method: ZetaMethod, dims: [usize; 4]) -> Result<ZetaEvaluator> {
        Ok(ZetaEvaluator { params, method, space: Arc::new(HilbertSpace::device(dims)?) })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn zeta(&self, omega_minus: f64) -> Result<f64> {
        self.evaluate(omega_minus).map(|(z, _)| z)
    }

    /// ζ at each coupler frequency.
    pub fn sweep(&self, omegas: &[f64]) -> Vec<SweepPoint> {
        sweep_curve(self, omegas)
    }
}

impl ZetaCurve for ZetaEvaluator {
    fn evaluate(&self, omega_minus: f64) -> Result<(f64, Option<f64>)> {
        evaluate_zeta(&self.params, omega_minus, self.method, &self.space)
    }
}

/// ζ and minimum overlap for either method.
pub fn evaluate_zeta(
    params: &DeviceParams,
    omega_minus: f64,
    method: ZetaMethod,
    space: &Arc<HilbertSpace>,
) -> Result<(f64, Option<f64>)> {
    match method {
        ZetaMethod::Exact => zeta_exact_report(params, omega_minus, space).map(|r| (r.zeta, Some(r.min_overlap))),
        ZetaMethod::Perturbative => zeta_perturbative(params, omega_minus).map(|z| (z, None)),
    }
}

/// Evenly spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Root-finding controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub grid_points: usize,
    /// Acceptance threshold on |ζ|/2π, in Hz.
    pub tolerance_hz: f64,
    pub max_bisections: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { grid_points: 200, tolerance_hz: 100.0, max_bisections: 200 }
    }
}

/// A refined zero on a generic sweep coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRoot {
    pub x: f64,
    pub zeta: f64,
    /// ∂ζ/∂x by central difference over ±2π·1 MHz.
    pub slope: f64,
    pub bracket: (f64, f64),
}

/// Roots on a generic coordinate plus skipped points and rejected brackets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveRoots {
    pub roots: Vec<CurveRoot>,
    pub warnings: Vec<String>,
}

/// A refined zero of ζ(ω₋).
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaRoot {
    pub omega_minus: f64,
    /// ω₋ − ω₁.
    pub detuning: f64,
    /// Flux on the canonical branch, when ω₋ is reachable.
    pub phi: Option<f64>,
    pub zeta: f64,
    /// ∂ζ/∂ω₋ by central difference (dimensionless).
    pub slope: f64,
    pub method: ZetaMethod,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSearch {
    pub roots: Vec<ZetaRoot>,
    /// Skipped grid points and rejected brackets.
    pub warnings: Vec<String>,
}

fn ghz_str(w: f64) -> String {
    format!("{:.6} GHz", w / ghz(1.0))
}

/// Bracket sign changes of a ζ curve on a grid over `interval` and bisect each one.
///
/// Grid points where ζ cannot be evaluated (hybridized labels, perturbative
/// poles) are skipped with a warning. A sign change whose bisection never
/// reaches the tolerance is a pole, not a root, and is reported as a warning.
pub fn find_curve_roots<C: ZetaCurve>(curve: &C, interval: (f64, f64), opts: &RootOptions) -> Result<CurveRoots> {
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid search interval [{lo}, {hi}]")));
    }
    if opts.grid_points < 2 {
        return Err(Error::Domain("root search needs at least two grid points".into()));
    }
    let tolerance = hz(opts.tolerance_hz);
    let grid = sweep_curve(curve, &linspace(lo, hi, opts.grid_points));
    let mut found = CurveRoots::default();
    for p in &grid {
        if let Some(e) = &p.error {
            found.warnings.push(format!("skipped x = {}: {e}", ghz_str(p.x)));
        }
    }
    let valid: Vec<(f64, f64)> = grid.iter().filter_map(|p| p.zeta.map(|z| (p.x, z))).collect();

    for (k, pair) in valid.windows(2).enumerate() {
        let ((a, za), (b, zb)) = (pair[0], pair[1]);
        if za == 0.0 {
            found.roots.push(make_root(curve, a, za, (a, a))?);
            continue;
        }
        if zb == 0.0 {
            if k + 2 == valid.len() {
                found.roots.push(make_root(curve, b, zb, (b, b))?);
            }
            continue;
        }
        if za.signum() == zb.signum() {
            continue;
        }
        match bisect(curve, (a, za), b, tolerance, opts.max_bisections) {
            Ok(Some((x, z))) => found.roots.push(make_root(curve, x, z, (a, b))?),
            Ok(None) => found
                .warnings
                .push(format!("sign change in [{}, {}] is a pole, not a root", ghz_str(a), ghz_str(b))),
            Err(e) => found
                .warnings
                .push(format!("bracket [{}, {}] abandoned: {e}", ghz_str(a), ghz_str(b))),
        }
    }
    Ok(found)
}

fn bisect<C: ZetaCurve>(
    curve: &C,
    (mut a, mut za): (f64, f64),
    mut b: f64,
    tolerance: f64,
    max_steps: usize,
) -> Result<Option<(f64, f64)>> {
    for _ in 0..max_steps {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let (zm, _) = curve.evaluate(m)?;
        if zm.abs() < tolerance {
            return Ok(Some((m, zm)));
        }
        if zm.signum() == za.signum() {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
    Ok(None)
}

fn make_root<C: ZetaCurve>(curve: &C, x: f64, zeta: f64, bracket: (f64, f64)) -> Result<CurveRoot> {
    let h = mhz(1.0);
    let slope = (curve.evaluate(x + h)?.0 - curve.evaluate(x - h)?.0) / (2.0 * h);
    Ok(CurveRoot { x, zeta, slope, bracket })
}

/// Zero-ζ coupler frequencies of a device in `interval` (ω₋, rad/s).
pub fn find_zero_zeta(eval: &ZetaEvaluator, interval: (f64, f64), opts: &RootOptions) -> Result<RootSearch> {
    let found = find_curve_roots(eval, interval, opts)?;
    let roots = found
        .roots
        .into_iter()
        .map(|r| ZetaRoot {
            omega_minus: r.x,
            detuning: r.x - eval.params.omega.q1,
            phi: FluxPoint::for_frequency(&eval.params, r.x).ok().map(|f| f.phi),
            zeta: r.zeta,
            slope: r.slope,
            method: eval.method,
            bracket: r.bracket,
        })
        .collect();
    Ok(RootSearch { roots, warnings: found.warnings })
}

/// Default ω₋ window for the below-qubit operating regime:
/// 2 GHz below ω₁ up to 300 MHz below the lower qubit.
pub fn default_search_interval(params: &DeviceParams) -> (f64, f64) {
    let lower_qubit = params.omega.q1.min(params.omega.q2);
    (params.omega.q1 - ghz(2.0), lower_qubit - ghz(0.3))
}

/// The root with the smallest |∂ζ/∂ω₋|, i.e. the least flux-noise sensitive one.
pub fn select_operating_point(roots: &[ZetaRoot]) -> Option<&ZetaRoot> {
    roots.iter().min_by(|a, b| a.slope.abs().total_cmp(&b.slope.abs()))
}

/// Zero-ζ operating point of a device with the exact method and default search.
pub fn default_operating_point(params: &DeviceParams) -> Result<ZetaRoot> {
    let eval = ZetaEvaluator::new(params.clone(), ZetaMethod::Exact);
    let search = find_zero_zeta(&eval, default_search_interval(params), &RootOptions::default())?;
    select_operating_point(&search.roots)
        .cloned()
        .ok_or_else(|| Error::Domain(format!("no zero-ζ point for device {}", params.name)))
}

/// |ζ|/2π in Hz, for reporting.
pub fn zeta_hz(zeta: f64) -> f64 {
    to_hz(zeta).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::to_ghz;

    #[test]
    fn flux_map_closed_forms() {
        let a = DeviceParams::device_a();
        assert_eq!(omega_minus_of_flux(&a, 0.0), a.omega_minus_max);
        assert!(omega_minus_of_flux(&a, 0.5) < 1e-3 * a.omega_minus_max);
        let third = omega_minus_of_flux(&a, 1.0 / 3.0);
        assert!((third - a.omega_minus_max * 0.5_f64.sqrt()).abs() < 1e-6 * a.omega_minus_max);
        for phi in [0.1, 0.37, 0.8] {
            let d = omega_minus_of_flux(&a, phi) - omega_minus_of_flux(&a, phi + 1.0);
            assert!(d.abs() < 1e-12 * a.omega_minus_max);
        }
    }

    #[test]
    fn flux_slope_matches_finite_difference() {
        let a = DeviceParams::device_a();
        assert_eq!(flux_slope(&a, 0.0), 0.0);
        for phi in [0.05, 0.25, 0.45] {
            assert!(flux_slope(&a, phi) < 0.0);
        }
        let h = 1e-6;
        let fd = (omega_minus_of_flux(&a, 0.25 + h) - omega_minus_of_flux(&a, 0.25 - h)) / (2.0 * h);
        let s = flux_slope(&a, 0.25);
        assert!(((fd - s) / s).abs() < 1e-6);
    }

    #[test]
    fn flux_inverse_round_trip() {
        let b = DeviceParams::device_b();
        let fp = FluxPoint::for_frequency(&b, ghz(5.3)).unwrap();
        assert!((0.0..=0.5).contains(&fp.phi));
        assert!((omega_minus_of_flux(&b, fp.phi) - ghz(5.3)).abs() < 1e-3);
        assert!(FluxPoint::for_frequency(&b, b.omega_minus_max + 1.0).is_err());
        let folded = FluxPoint::at(&b, -0.25).unwrap();
        assert!((folded.phi - 0.75).abs() < 1e-15);
    }

    #[test]
    fn drive_strength_trivial_cases() {
        let b = DeviceParams::device_b();
        let idle = ModulationDrive::new(0.3, 0.0, 1e9, 0.0).unwrap();
        assert_eq!(effective_drive_strength(&b, &idle).unwrap(), 0.0);
        let sweet = ModulationDrive::new(0.0, 0.05, 1e9, 0.0).unwrap();
        assert_eq!(effective_drive_strength(&b, &sweet).unwrap(), 0.0);
        let crossing = ModulationDrive::new(0.48, 0.05, 1e9, 0.0).unwrap();
        assert!(!crossing.stays_on_branch());
        assert!(effective_drive_strength(&b, &crossing).is_err());
        assert!(ModulationDrive::new(0.3, -0.01, 1e9, 0.0).is_err());
    }

    #[test]
    fn drive_amplitude_round_trip() {
        let b = DeviceParams::device_b();
        let theta = FluxPoint::for_frequency(&b, b.omega.q1 - ghz(0.85)).unwrap().phi;
        let target = mhz(1.32);
        let delta = drive_amplitude_for(&b, theta, target).unwrap();
        let drive = ModulationDrive::new(theta, delta, 1e9, 0.0).unwrap();
        let j = effective_drive_strength(&b, &drive).unwrap();
        assert!((j.abs() - target).abs() < 1e-9 * target, "{j} vs {target}");
    }

    #[test]
    fn perturbative_roots_device_a() {
        let a = DeviceParams::device_a();
        let eval = ZetaEvaluator::new(a.clone(), ZetaMethod::Perturbative);
        let search = find_zero_zeta(&eval, default_search_interval(&a), &RootOptions::default()).unwrap();
        let det: Vec<f64> = search.roots.iter().map(|r| to_ghz(r.detuning)).collect();
        assert_eq!(det.len(), 2, "{det:?}");
        assert!((det[0] + 1.48).abs() < 0.02 && (det[1] + 0.78).abs() < 0.02, "{det:?}");
        for r in &search.roots {
            assert!(zeta_hz(r.zeta) < 100.0);
            assert!(r.bracket.0 <= r.omega_minus && r.omega_minus <= r.bracket.1);
        }
    }

    #[test]
    fn pole_is_not_a_root() {
        // The two-photon coupler term 1/(Δ₁₋+Δ₂₋+α₋) changes sign across
        // 2ω₋ = ω₁ + ω₂ + α₋ without passing through zero.
        let a = DeviceParams::device_a();
        let pole = 0.5 * (a.omega.q1 + a.omega.q2 + a.alpha.coupler);
        let eval = ZetaEvaluator::new(a.clone(), ZetaMethod::Perturbative);
        let interval = (pole - mhz(3.0), pole + mhz(3.05));
        let search = find_zero_zeta(&eval, interval, &RootOptions { grid_points: 20, ..Default::default() }).unwrap();
        assert!(search.roots.is_empty(), "{:?}", search.roots);
        assert!(search.warnings.iter().any(|w| w.contains("pole")), "{:?}", search.warnings);
    }

    #[test]
    fn hybridized_points_are_skipped() {
        let a = DeviceParams::device_a();
        let eval = ZetaEvaluator::new(a.clone(), ZetaMethod::Exact);
        let interval = (a.omega.q1 - mhz(5.0), a.omega.q1 + mhz(5.0));
        let search = find_zero_zeta(&eval, interval, &RootOptions { grid_points: 5, ..Default::default() }).unwrap();
        assert!(search.warnings.iter().any(|w| w.contains("hybridized")), "{:?}", search.warnings);
    }

    #[test]
    fn no_sign_change_is_empty() {
        let a = DeviceParams::device_a();
        let eval = ZetaEvaluator::new(a.clone(), ZetaMethod::Perturbative);
        let interval = (a.omega.q1 - ghz(1.4), a.omega.q1 - ghz(1.0));
        let search = find_zero_zeta(&eval, interval, &RootOptions::default()).unwrap();
        assert!(search.roots.is_empty());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("exact".parse::<ZetaMethod>().unwrap(), ZetaMethod::Exact);
        assert_eq!("pert".parse::<ZetaMethod>().unwrap(), ZetaMethod::Perturbative);
        assert!("magic".parse::<ZetaMethod>().is_err());
    }
}
