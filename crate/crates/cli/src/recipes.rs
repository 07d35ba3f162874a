//! Figure recipes: the data behind each figure plus an anchor summary.

use anyhow::anyhow;
use zzsim::coupler::{
    default_operating_point, default_search_interval, find_zero_zeta, linspace, RootOptions, ZetaEvaluator, ZetaMethod,
};
use zzsim::geometry::{worst_relative_deviation, Geometry, GeometryCurve};
use zzsim::hilbert::HilbertSpace;
use zzsim::perturbation::iswap_derivative_ratio;
use zzsim::rb::{run_rb, RbConfig, RbMode};
use zzsim::tomography::process::gate_fidelity;
use zzsim::tomography::thermal::{decohered_sqrt_iswap_ptm, SQRT_ISWAP_GATE_TIME};
use zzsim::tomography::{ptm_from_unitary, sqrt_iswap, thermal_sweep, ThermalPoint};
use zzsim::units::{mhz, to_ghz, to_mhz};
use zzsim::Qubit;

use crate::commands::Context;
use crate::config::{FigureArgs, FigureId};
use crate::devices::{load_device, LoadedDevice};
use crate::output::{num, Anchor, Report};

/// Zero crossings of ω₋ − ω₁ (GHz) and their tolerance.
pub const FIG2_CROSSINGS: [(&str, [f64; 2]); 2] = [("device_a", [-1.47, -0.75]), ("device_b", [-0.84, -0.53])];
pub const FIG2_TOLERANCE_GHZ: f64 = 0.06;

pub const RB_ZZ_MHZ: f64 = 2.26;
/// (ζ/2π in MHz, expected F_S, tolerance)
pub const FIGS2_TARGETS: [(f64, f64, f64); 2] = [(0.0, 0.998, 0.0015), (RB_ZZ_MHZ, 0.985, 0.003)];

pub const FIGS3_ROOT_TOLERANCE: f64 = 0.05;
pub const FIGS3_CURVE_TOLERANCE: f64 = 0.25;
pub const FIGS3_MIN_ZETA_HZ: f64 = 10e3;
pub const FIGS3_DISPERSIVE_FACTOR: f64 = 4.0;
/// Config (c) exact zero, Δ₋₂/2π in GHz.
pub const FIGS3_C_ZERO_GHZ: (f64, f64) = (0.634, 0.015);

pub const FIGS4_MAX_MK: f64 = 200.0;
pub const FIGS4_POINTS: usize = 21;
pub const FIGS4_ZERO_T_TOLERANCE: f64 = 0.005;

pub fn run_figure(ctx: &Context, args: &FigureArgs) -> anyhow::Result<Report> {
    let mut report = match args.figure {
        FigureId::Fig2 => fig2(ctx, args)?,
        FigureId::FigS2 => fig_s2(ctx, args)?,
        FigureId::FigS3 => fig_s3(ctx, args)?,
        FigureId::FigS4 => fig_s4(ctx)?,
    };
    let rows: Vec<Vec<String>> = report
        .anchors
        .iter()
        .map(|a| {
            vec![
                a.name.clone(),
                a.expected.clone(),
                a.computed.clone(),
                if a.pass { "pass" } else { "fail" }.to_string(),
                a.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let devices = both_devices()?;
    let path = std::path::PathBuf::from(format!("{}_summary.csv", args.figure.name()));
    ctx.emit_csv(
        &mut report,
        Some(&path),
        &[&devices[0], &devices[1]],
        &["anchor", "expected", "computed", "result", "note"],
        &rows,
    )?;
    for a in report.anchors.clone() {
        report.line(a.to_string());
    }
    Ok(report)
}

fn both_devices() -> anyhow::Result<[LoadedDevice; 2]> {
    Ok([load_device("device_a")?, load_device("device_b")?])
}

fn csv_path(figure: FigureId, suffix: &str) -> std::path::PathBuf {
    format!("{}_{suffix}.csv", figure.name()).into()
}

fn fig2(ctx: &Context, args: &FigureArgs) -> anyhow::Result<Report> {
    let mut report = Report::default();
    for (device, (name, expected)) in both_devices()?.iter().zip(FIG2_CROSSINGS) {
        let p = &device.params;
        let eval = ZetaEvaluator::new(p.clone(), ZetaMethod::Exact);
        let interval = default_search_interval(p);
        let points = eval.sweep(&linspace(interval.0, interval.1, args.points));
        let rows: Vec<Vec<String>> = points
            .iter()
            .map(|pt| {
                vec![
                    num(to_ghz(pt.x - p.omega.q1)),
                    num(to_ghz(pt.x)),
                    num(pt.zeta.map_or(f64::NAN, to_mhz)),
                    num(pt.min_overlap.unwrap_or(f64::NAN)),
                ]
            })
            .collect();
        ctx.emit_csv(
            &mut report,
            Some(&csv_path(FigureId::Fig2, name)),
            &[device],
            &["flux_or_detuning", "omega_minus_GHz", "zeta_MHz", "min_overlap"],
            &rows,
        )?;
        match find_zero_zeta(&eval, interval, &RootOptions::default()) {
            Ok(search) => {
                let found: Vec<f64> = search.roots.iter().map(|r| to_ghz(r.detuning)).collect();
                for target in expected {
                    let label = format!("{name} zero crossing near {target} GHz");
                    match found.iter().copied().min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs())) {
                        Some(x) => report.anchors.push(Anchor::within(label, x, target, FIG2_TOLERANCE_GHZ, "GHz")),
                        None => report.anchors.push(Anchor::failed(label, &anyhow!("no zero crossing found"))),
                    }
                }
            }
            Err(e) => report.anchors.push(Anchor::failed(format!("{name} zero crossings"), &e.into())),
        }
    }
    Ok(report)
}

fn fig_s2(ctx: &Context, args: &FigureArgs) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let device = load_device("device_a")?;
    for (zeta_mhz, expected, tol) in FIGS2_TARGETS {
        let mut cfg = RbConfig::for_device(&device.params, mhz(zeta_mhz), RbMode::Simultaneous, ctx.config.seed)?;
        cfg.trials = args.trials;
        let tag = format!("zeta_{zeta_mhz}MHz");
        let result = match run_rb(&cfg) {
            Ok(r) => r,
            Err(e) => {
                report.anchors.push(Anchor::failed(format!("simultaneous RB at {zeta_mhz} MHz"), &e.into()));
                continue;
            }
        };
        let c = &result.curve;
        let rows: Vec<Vec<String>> = (0..c.lengths.len())
            .map(|i| {
                vec![c.lengths[i].to_string(), num(c.mean_p0[i][0]), num(c.mean_p0[i][1]), num(c.sem[i][0].max(c.sem[i][1]))]
            })
            .collect();
        ctx.emit_csv(
            &mut report,
            Some(&csv_path(FigureId::FigS2, &tag)),
            &[&device],
            &["m", "mean_p0_q1", "mean_p0_q2", "sem"],
            &rows,
        )?;
        for q in Qubit::BOTH {
            let label = format!("F_S(q{}) at ζ/2π = {zeta_mhz} MHz", q.index() + 1);
            match result.fidelity(q) {
                Some(f) => report.anchors.push(Anchor::within(label, f, expected, tol, "")),
                None => report.anchors.push(Anchor::failed(label, &anyhow!("fit unavailable"))),
            }
        }
    }
    Ok(report)
}

fn fig_s3(ctx: &Context, args: &FigureArgs) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let opts = RootOptions::default();
    for g in Geometry::ALL {
        let id = g.id();
        let pert = GeometryCurve::new(g, ZetaMethod::Perturbative, HilbertSpace::DEFAULT_DIMS)?;
        let exact = GeometryCurve::new(g, ZetaMethod::Exact, HilbertSpace::DEFAULT_DIMS)?;
        let (lo, hi) = g.sweep_range();
        let xs = linspace(lo, hi, args.points);
        let (sp, se) = (pert.sweep(&xs), exact.sweep(&xs));
        let rows: Vec<Vec<String>> = sp
            .iter()
            .zip(&se)
            .map(|(a, b)| {
                vec![
                    num(to_ghz(a.x)),
                    num(a.zeta.map_or(f64::NAN, to_mhz)),
                    num(b.zeta.map_or(f64::NAN, to_mhz)),
                    id.to_string(),
                ]
            })
            .collect();
        ctx.emit_csv(
            &mut report,
            Some(&csv_path(FigureId::FigS3, &format!("config_{id}"))),
            &[],
            &["detuning_GHz", "zeta_pert_MHz", "zeta_exact_MHz", "config_id"],
            &rows,
        )?;

        match (pert.roots(&opts), exact.roots(&opts)) {
            (Ok(rp), Ok(re)) => {
                let xp: Vec<f64> = rp.roots.iter().map(|r| to_ghz(r.x)).collect();
                let xe: Vec<f64> = re.roots.iter().map(|r| to_ghz(r.x)).collect();
                let pass = xp.len() == xe.len()
                    && xp.iter().zip(&xe).all(|(p, e)| (p - e).abs() <= FIGS3_ROOT_TOLERANCE * e.abs());
                report.anchors.push(Anchor::check(
                    format!("config {id} zero crossings, pert vs exact"),
                    format!("within {}% of detuning", FIGS3_ROOT_TOLERANCE * 100.0),
                    format!("pert {xp:.4?} GHz, exact {xe:.4?} GHz"),
                    pass,
                ));
                if g == Geometry::StraddlingCouplerAbove {
                    let (target, tol) = FIGS3_C_ZERO_GHZ;
                    let label = "config c exact zero (Δ₋₂)";
                    match xe.first() {
                        Some(&x) => report.anchors.push(Anchor::within(label, x, target, tol, "GHz")),
                        None => report.anchors.push(Anchor::failed(label, &anyhow!("no exact zero found"))),
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                report.anchors.push(Anchor::failed(format!("config {id} zero crossings"), &e.into()));
            }
        }

        let (worst, at, n) = worst_relative_deviation(g, &sp, &se, FIGS3_MIN_ZETA_HZ, FIGS3_DISPERSIVE_FACTOR);
        report.anchors.push(Anchor::check(
            format!("config {id} curve agreement"),
            format!("≤ {}% relative", FIGS3_CURVE_TOLERANCE * 100.0),
            format!("worst {:.1}% at {:.4} GHz over {n} points", worst * 100.0, to_ghz(at)),
            worst <= FIGS3_CURVE_TOLERANCE,
        ));
    }
    Ok(report)
}

/// Thermal sweep at a device's zero-ζ point, with coherence taken from `coherence`.
pub fn thermal_curve(device: &LoadedDevice, coherence: &LoadedDevice, temps: &[f64]) -> anyhow::Result<(f64, f64, Vec<ThermalPoint>)> {
    let p = &device.params;
    let op = default_operating_point(p)?;
    let alpha = iswap_derivative_ratio(p, op.omega_minus)?;
    let mut noisy = p.clone();
    noisy.coherence = coherence.params.coherence;
    Ok((op.omega_minus, alpha, thermal_sweep(&noisy, op.omega_minus, alpha, temps)?))
}

fn fig_s4(ctx: &Context) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let devices = both_devices()?;
    let reference = &devices[1];
    let temps: Vec<f64> = linspace(0.0, FIGS4_MAX_MK, FIGS4_POINTS).iter().map(|t| t * 1e-3).collect();
    let ideal = ptm_from_unitary(&sqrt_iswap())?;
    let f_g = gate_fidelity(&decohered_sqrt_iswap_ptm(&reference.params, SQRT_ISWAP_GATE_TIME)?, &ideal, 2)?;

    let mut curves = Vec::new();
    for device in &devices {
        let name = device.source.clone();
        match thermal_curve(device, reference, &temps) {
            Ok((omega_minus, alpha, sweep)) => {
                let rows: Vec<Vec<String>> = sweep
                    .iter()
                    .map(|s| vec![num(s.temperature * 1e3), num(s.p), num(alpha), num(s.fidelity)])
                    .collect();
                ctx.emit_csv(
                    &mut report,
                    Some(&csv_path(FigureId::FigS4, &name)),
                    &[device, reference],
                    &["temperature_mK", "p_excited", "alpha", "fidelity"],
                    &rows,
                )?;
                report.line(format!(
                    "{name}: ω₋−ω₁ = {:+.4} GHz, α = {alpha:.3}",
                    to_ghz(omega_minus - device.params.omega.q1)
                ));
                report.anchors.push(Anchor::within(
                    format!("{name} fidelity at p = 0 vs coherence-limited F_g"),
                    sweep[0].fidelity,
                    f_g,
                    FIGS4_ZERO_T_TOLERANCE,
                    "",
                ));
                let decreasing = sweep.windows(2).all(|w| w[1].fidelity < w[0].fidelity);
                report.anchors.push(Anchor::check(
                    format!("{name} fidelity strictly decreasing in T"),
                    "strictly decreasing",
                    format!("{:.6} → {:.6}", sweep[0].fidelity, sweep[sweep.len() - 1].fidelity),
                    decreasing,
                ));
                curves.push(sweep);
            }
            Err(e) => report.anchors.push(Anchor::failed(format!("{name} thermal sweep"), &e)),
        }
    }
    if let [a, b] = curves.as_slice() {
        let margin = a.iter().zip(b).map(|(x, y)| y.fidelity - x.fidelity).fold(f64::INFINITY, f64::min);
        report.anchors.push(Anchor::check(
            "device_b ≥ device_a at equalized coherence",
            "min(F_B − F_A) ≥ 0",
            format!("{margin:.6}"),
            margin >= 0.0,
        ));
    }
    Ok(report)
}
