//! Single-purpose subcommands.

use std::sync::Arc;

use anyhow::{bail, Context as _};
use zzsim::coupler::{
    default_operating_point, default_search_interval, find_zero_zeta, linspace, omega_minus_of_flux,
    select_operating_point, RootOptions, ZetaEvaluator, ZetaMethod,
};
use zzsim::hilbert::{build_hamiltonian, HilbertSpace};
use zzsim::perturbation::iswap_derivative_ratio;
use zzsim::rb::{run_rb, RbConfig, RbMode};
use zzsim::spectrum::{convergence_check, diagonalize_sectors, label_states};
use zzsim::tomography::process::{gate_fidelity, pauli_label, process_fidelity};
use zzsim::tomography::thermal::decohered_sqrt_iswap_ptm;
use zzsim::tomography::{ptm_from_unitary, sqrt_iswap, thermal_sweep};
use zzsim::units::{ghz, mhz, ns, to_ghz, to_mhz};
use zzsim::Qubit;
use zzsim::channels::NoiseParams;

use crate::config::{
    parse_dims, parse_dims_str, ChannelArg, ConvergenceArgs, PtmArgs, RbArgs, RootArgs, RunConfig, SpectrumArgs,
    SweepArgs, ThermalArgs,
};
use crate::devices::{load_device, LoadedDevice};
use crate::output::{num, render_csv, Metadata, Report};

/// Shared state for one invocation.
pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub command_line: String,
}

impl Context<'_> {
    pub fn device(&self) -> anyhow::Result<LoadedDevice> {
        load_device(&self.config.device_file)
    }

    pub fn metadata(&self, devices: &[&LoadedDevice]) -> Metadata {
        Metadata::new(devices, self.config.seed, &self.command_line)
    }

    pub fn emit_csv(
        &self,
        report: &mut Report,
        path: Option<&std::path::Path>,
        devices: &[&LoadedDevice],
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> anyhow::Result<()> {
        let text = render_csv(&self.metadata(devices), columns, rows)?;
        report.emit(&self.config.output_path, path, &text)
    }
}

fn detuning_window(device: &LoadedDevice, from: Option<f64>, to: Option<f64>) -> (f64, f64) {
    let p = &device.params;
    let (lo, hi) = default_search_interval(p);
    (from.map_or(lo, |g| p.omega.q1 + ghz(g)), to.map_or(hi, |g| p.omega.q1 + ghz(g)))
}

pub fn zeta_sweep(ctx: &Context, args: &SweepArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    let p = &device.params;
    let method: ZetaMethod = args.method.into();
    let eval = ZetaEvaluator::with_dims(p.clone(), method, parse_dims(&args.dims)?)?;
    let (axis, omegas): (Vec<f64>, Vec<f64>) = match (args.flux_from, args.flux_to) {
        (Some(a), Some(b)) => {
            let phis = linspace(a, b, args.points);
            let omegas = phis.iter().map(|&phi| omega_minus_of_flux(p, phi)).collect();
            (phis, omegas)
        }
        _ => {
            let (lo, hi) = detuning_window(&device, args.from_ghz, args.to_ghz);
            let dets = linspace(to_ghz(lo - p.omega.q1), to_ghz(hi - p.omega.q1), args.points);
            let omegas = dets.iter().map(|&d| p.omega.q1 + ghz(d)).collect();
            (dets, omegas)
        }
    };
    let mut report = Report::default();
    let points = eval.sweep(&omegas);
    let rows: Vec<Vec<String>> = axis
        .iter()
        .zip(&points)
        .map(|(&x, pt)| {
            vec![
                num(x),
                num(to_ghz(pt.x)),
                pt.zeta.map_or_else(|| num(f64::NAN), |z| num(to_mhz(z))),
                match (&pt.error, pt.min_overlap) {
                    (Some(_), _) => num(f64::NAN),
                    (None, Some(o)) => num(o),
                    (None, None) => String::new(),
                },
            ]
        })
        .collect();
    for pt in points.iter().filter(|pt| pt.error.is_some()) {
        eprintln!("warning: ω₋/2π = {} GHz skipped: {}", to_ghz(pt.x), pt.error.as_deref().unwrap_or(""));
    }
    ctx.emit_csv(
        &mut report,
        args.csv.as_deref(),
        &[&device],
        &["flux_or_detuning", "omega_minus_GHz", "zeta_MHz", "min_overlap"],
        &rows,
    )?;
    Ok(report)
}

pub fn find_zero(ctx: &Context, args: &RootArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    let p = &device.params;
    let eval = ZetaEvaluator::new(p.clone(), args.method.into());
    let opts = RootOptions { grid_points: args.points, tolerance_hz: args.tolerance_hz, ..RootOptions::default() };
    let search = find_zero_zeta(&eval, detuning_window(&device, args.from_ghz, args.to_ghz), &opts)?;
    for w in &search.warnings {
        eprintln!("warning: {w}");
    }
    let op = select_operating_point(&search.roots).map(|r| r.omega_minus);
    let mut report = Report::default();
    report.line(format!("{} zero-ζ points for {} ({} method)", search.roots.len(), p.name, eval.method.name()));
    let mut rows = Vec::new();
    for r in &search.roots {
        let is_op = Some(r.omega_minus) == op;
        let phi = r.phi.map_or_else(|| "unreachable".to_string(), |f| format!("{f:.6}"));
        report.line(format!(
            "  ω₋−ω₁ = {:+.6} GHz  ω₋ = {:.6} GHz  Φ = {phi} Φ₀  ∂ζ/∂ω₋ = {:.3e}{}",
            to_ghz(r.detuning),
            to_ghz(r.omega_minus),
            r.slope,
            if is_op { "  (operating point)" } else { "" }
        ));
        rows.push(vec![
            num(to_ghz(r.detuning)),
            num(to_ghz(r.omega_minus)),
            r.phi.map_or_else(|| num(f64::NAN), num),
            num(zzsim::units::to_hz(r.zeta)),
            num(r.slope),
            (is_op as u8).to_string(),
        ]);
    }
    if let Some(path) = args.csv.as_deref() {
        ctx.emit_csv(
            &mut report,
            Some(path),
            &[&device],
            &["detuning_GHz", "omega_minus_GHz", "flux_phi0", "zeta_Hz", "slope", "operating_point"],
            &rows,
        )?;
    }
    Ok(report)
}

pub fn rb(ctx: &Context, args: &RbArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    let mode: RbMode = args.mode.into();
    let mut cfg = RbConfig::for_device(&device.params, mhz(args.zeta_mhz), mode, ctx.config.seed)?;
    let gate_time = ns(args.gate_ns);
    for (q, noise) in Qubit::BOTH.into_iter().zip(cfg.noise.iter_mut()) {
        *noise = NoiseParams::from_coherence(device.params.coherence_of(q), gate_time)?;
    }
    cfg.design = args.design.into();
    cfg.lengths = args.lengths.clone();
    cfg.trials = args.trials;
    let result = run_rb(&cfg)?;
    let mut report = Report::default();
    for q in Qubit::BOTH {
        if let Some(f) = result.fidelity(q) {
            report.line(format!("F(q{}) = {:.6} ({} mode, ζ/2π = {} MHz)", q.index() + 1, f, mode.name(), args.zeta_mhz));
        }
    }
    let active: Vec<usize> = Qubit::BOTH.iter().filter(|&&q| mode.is_active(q)).map(|q| q.index()).collect();
    let curve = &result.curve;
    let rows: Vec<Vec<String>> = (0..curve.lengths.len())
        .map(|i| {
            let sem = active.iter().map(|&q| curve.sem[i][q]).fold(0.0, f64::max);
            vec![curve.lengths[i].to_string(), num(curve.mean_p0[i][0]), num(curve.mean_p0[i][1]), num(sem)]
        })
        .collect();
    ctx.emit_csv(&mut report, args.csv.as_deref(), &[&device], &["m", "mean_p0_q1", "mean_p0_q2", "sem"], &rows)?;
    Ok(report)
}

pub fn iswap_fidelity(ctx: &Context, args: &ThermalArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    let coherence = args.coherence_device.as_deref().map(load_device).transpose()?;
    let p = &device.params;
    let omega_minus = match args.detuning_ghz {
        Some(d) => p.omega.q1 + ghz(d),
        None => default_operating_point(p)?.omega_minus,
    };
    let alpha = match args.alpha {
        Some(a) => a,
        None => iswap_derivative_ratio(p, omega_minus)?,
    };
    let mut noisy = p.clone();
    if let Some(c) = &coherence {
        noisy.coherence = c.params.coherence;
    }
    let temps: Vec<f64> = linspace(args.temp_mk_from, args.temp_mk_to, args.points).iter().map(|t| t * 1e-3).collect();
    let sweep = thermal_sweep(&noisy, omega_minus, alpha, &temps)?;
    let mut report = Report::default();
    report.line(format!(
        "{}: ω₋−ω₁ = {:+.4} GHz, α = {alpha:.4}, F(T=0) = {:.6}",
        p.name,
        to_ghz(omega_minus - p.omega.q1),
        sweep.first().map_or(f64::NAN, |s| s.fidelity)
    ));
    let rows: Vec<Vec<String>> = sweep
        .iter()
        .map(|s| vec![num(s.temperature * 1e3), num(s.p), num(alpha), num(s.fidelity)])
        .collect();
    let mut devices = vec![&device];
    devices.extend(coherence.as_ref());
    ctx.emit_csv(&mut report, args.csv.as_deref(), &devices, &["temperature_mK", "p_excited", "alpha", "fidelity"], &rows)?;
    Ok(report)
}

pub fn ptm(ctx: &Context, args: &PtmArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    let ideal = ptm_from_unitary(&sqrt_iswap())?;
    let r = match args.channel {
        ChannelArg::Ideal => ideal.clone(),
        ChannelArg::Decohered => decohered_sqrt_iswap_ptm(&device.params, ns(args.gate_ns))?,
    };
    let mut report = Report::default();
    report.line(format!(
        "F_g = {:.6}, process fidelity = {:.6}",
        gate_fidelity(&r, &ideal, 2)?,
        process_fidelity(&r, &ideal)?
    ));
    let labels: Vec<String> = (0..16).map(|k| pauli_label(2, k)).collect();
    let mut columns = vec!["row"];
    columns.extend(labels.iter().map(String::as_str));
    let m = r.matrix();
    let rows: Vec<Vec<String>> = (0..16)
        .map(|i| std::iter::once(labels[i].clone()).chain((0..16).map(|j| num(m[(i, j)]))).collect())
        .collect();
    ctx.emit_csv(&mut report, args.csv.as_deref(), &[&device], &columns, &rows)?;
    Ok(report)
}

fn label_name(label: [usize; 4]) -> String {
    label.iter().map(|n| n.to_string()).collect()
}

pub fn spectrum(ctx: &Context, args: &SpectrumArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    let p = &device.params;
    let space = Arc::new(HilbertSpace::device(parse_dims(&args.dims)?)?);
    let h = build_hamiltonian(p, &space, p.omega.q1 + ghz(args.detuning_ghz))?;
    let labeled = label_states(&diagonalize_sectors(&h, 2)?);
    let ground = labeled.energy([0, 0, 0, 0]).context("ground state not labeled")?;
    let mut entries: Vec<([usize; 4], f64)> =
        labeled.labels.keys().map(|&l| (l, labeled.energy(l).unwrap() - ground)).collect();
    entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|&(l, e)| {
            vec![
                label_name(l),
                num(to_ghz(e)),
                num(labeled.overlap(l).unwrap_or(f64::NAN)),
                (labeled.is_hybridized(l) as u8).to_string(),
            ]
        })
        .collect();
    let mut report = Report::default();
    ctx.emit_csv(&mut report, args.csv.as_deref(), &[&device], &["label", "energy_GHz", "overlap", "hybridized"], &rows)?;
    Ok(report)
}

pub fn convergence(ctx: &Context, args: &ConvergenceArgs) -> anyhow::Result<Report> {
    let device = ctx.device()?;
    if args.dims.len() < 2 {
        bail!("--dims needs at least two truncations");
    }
    let dims = args.dims.iter().map(|s| parse_dims_str(s)).collect::<anyhow::Result<Vec<_>>>()?;
    let rows = convergence_check(&device.params, device.params.omega.q1 + ghz(args.detuning_ghz), &dims)?;
    let reference = rows.iter().max_by_key(|r| r.dims.iter().product::<usize>()).map_or(f64::NAN, |r| r.zeta);
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let d = r.dims.map(|n| n.to_string()).join("x");
            let rel = r.abs_diff / reference.abs();
            vec![d, num(to_mhz(r.zeta)), num(to_mhz(r.abs_diff)), num(rel)]
        })
        .collect();
    let mut report = Report::default();
    ctx.emit_csv(
        &mut report,
        args.csv.as_deref(),
        &[&device],
        &["dims", "zeta_MHz", "abs_diff_MHz", "rel_diff"],
        &rows,
    )?;
    Ok(report)
}
