//! Command-line and config-file front end. Both resolve to a [`RunConfig`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use zzsim::coupler::ZetaMethod;
use zzsim::rb::{RbMode, SequenceDesign, DEFAULT_LENGTHS};

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_DEVICE: &str = "device_a";

#[derive(Debug, Parser)]
#[command(name = "zzsim", version, about = "ZZ crosstalk, RB and √iSWAP simulations for tunable-coupler qubit pairs")]
pub struct Cli {
    /// Device file, or a device name looked up in $ZZSIM_DEVICE_DIR / the bundled set.
    #[arg(long, global = true)]
    pub device: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; CSV paths are resolved against it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON run configuration. Flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// One fully resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_device")]
    pub device_file: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub output_path: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    pub command: Command,
}

fn default_device() -> String {
    DEFAULT_DEVICE.to_string()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_out() -> PathBuf {
    PathBuf::from(".")
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            device_file: default_device(),
            seed: DEFAULT_SEED,
            output_path: default_out(),
            threads: None,
            command,
        }
    }

    pub fn from_json(text: &str) -> anyhow::Result<RunConfig> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RunConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Merge a parsed command line over an optional config file.
    pub fn from_cli(cli: Cli) -> anyhow::Result<RunConfig> {
        let mut cfg = match (&cli.config, cli.command) {
            (Some(path), command) => {
                let mut cfg = RunConfig::load(path)?;
                if let Some(command) = command {
                    cfg.command = command;
                }
                cfg
            }
            (None, Some(command)) => RunConfig::new(command),
            (None, None) => bail!("no command given (see `zzsim --help`)"),
        };
        if let Some(device) = cli.device {
            cfg.device_file = device;
        }
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        if let Some(out) = cli.out {
            cfg.output_path = out;
        }
        if cli.threads.is_some() {
            cfg.threads = cli.threads;
        }
        Ok(cfg)
    }
}

/// Clap's defaults double as the config-file defaults.
fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults").no_binary_name(true));
    let matches = cmd.try_get_matches_from(std::iter::empty::<String>()).expect("all options have defaults");
    T::from_arg_matches(&matches).expect("defaults parse")
}

macro_rules! clap_default {
    ($($t:ty),*) => {
        $(impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        })*
    };
}

clap_default!(SweepArgs, RootArgs, RbArgs, ThermalArgs, PtmArgs, SpectrumArgs, ConvergenceArgs, FigureArgs);

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// ζ along a detuning or flux sweep.
    ZetaSweep(SweepArgs),
    /// Zero-ζ coupler frequencies and the default operating point.
    FindZeroZeta(RootArgs),
    /// Randomized benchmarking decay curve and fitted fidelities.
    Rb(RbArgs),
    /// Finite-temperature √iSWAP fidelity sweep.
    IswapFidelity(ThermalArgs),
    /// 16×16 Pauli transfer matrix of the √iSWAP channel.
    Ptm(PtmArgs),
    /// Labeled dressed spectrum at one coupler frequency.
    Spectrum(SpectrumArgs),
    /// ζ across several Hilbert-space truncations.
    Convergence(ConvergenceArgs),
    /// Data and anchor summary behind one figure.
    Figure(FigureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ZetaSweep(_) => "zeta-sweep",
            Command::FindZeroZeta(_) => "find-zero-zeta",
            Command::Rb(_) => "rb",
            Command::IswapFidelity(_) => "iswap-fidelity",
            Command::Ptm(_) => "ptm",
            Command::Spectrum(_) => "spectrum",
            Command::Convergence(_) => "convergence",
            Command::Figure(_) => "figure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Exact,
    #[value(alias = "perturbative")]
    #[serde(alias = "perturbative")]
    Pert,
}

impl From<MethodArg> for ZetaMethod {
    fn from(m: MethodArg) -> ZetaMethod {
        match m {
            MethodArg::Exact => ZetaMethod::Exact,
            MethodArg::Pert => ZetaMethod::Perturbative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Q1,
    Q2,
    #[value(alias = "sim")]
    #[serde(alias = "sim")]
    Simultaneous,
}

impl From<ModeArg> for RbMode {
    fn from(m: ModeArg) -> RbMode {
        match m {
            ModeArg::Q1 => RbMode::IndividualQ1,
            ModeArg::Q2 => RbMode::IndividualQ2,
            ModeArg::Simultaneous => RbMode::Simultaneous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignArg {
    Clifford,
    Primary,
}

impl From<DesignArg> for SequenceDesign {
    fn from(d: DesignArg) -> SequenceDesign {
        match d {
            DesignArg::Clifford => SequenceDesign::Clifford,
            DesignArg::Primary => SequenceDesign::PrimaryGates,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelArg {
    Ideal,
    Decohered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum FigureId {
    #[value(name = "fig2")]
    #[serde(rename = "fig2")]
    Fig2,
    #[value(name = "figS2")]
    #[serde(rename = "figS2")]
    FigS2,
    #[value(name = "figS3")]
    #[serde(rename = "figS3")]
    FigS3,
    #[value(name = "figS4")]
    #[serde(rename = "figS4")]
    FigS4,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::FigS2 => "figS2",
            FigureId::FigS3 => "figS3",
            FigureId::FigS4 => "figS4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    /// Start of the ω₋ − ω₁ sweep (GHz); defaults to the zero-ζ search window.
    #[arg(long, allow_hyphen_values = true)]
    pub from_ghz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to_ghz: Option<f64>,
    /// Sweep flux (Φ₀) instead of detuning.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["from_ghz", "to_ghz"], requires = "flux_to")]
    pub flux_from: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "flux_from")]
    pub flux_to: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, value_delimiter = ',', default_value = "4,4,3,4")]
    pub dims: Vec<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RootArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, allow_hyphen_values = true)]
    pub from_ghz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to_ghz: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Refine until |ζ|/2π falls below this (Hz).
    #[arg(long, default_value_t = 100.0)]
    pub tolerance_hz: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbArgs {
    /// Static ZZ, ζ/2π in MHz.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub zeta_mhz: f64,
    #[arg(long, value_enum, default_value = "simultaneous")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "clifford")]
    pub design: DesignArg,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LENGTHS)]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 22.0)]
    pub gate_ns: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalArgs {
    #[arg(long, default_value_t = 0.0)]
    pub temp_mk_from: f64,
    #[arg(long, default_value_t = 200.0)]
    pub temp_mk_to: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// Coupler bias ω₋ − ω₁ (GHz); defaults to the device's zero-ζ operating point.
    #[arg(long, allow_hyphen_values = true)]
    pub detuning_ghz: Option<f64>,
    /// Exchange-rate ratio between ground and excited coupler; defaults to ∂J₁/∂J₀ at the bias.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Take qubit coherence from this device instead.
    #[arg(long)]
    pub coherence_device: Option<String>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PtmArgs {
    #[arg(long, value_enum, default_value = "decohered")]
    pub channel: ChannelArg,
    #[arg(long, default_value_t = 95.0)]
    pub gate_ns: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Coupler bias ω₋ − ω₁ (GHz).
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub detuning_ghz: f64,
    #[arg(long, value_delimiter = ',', default_value = "4,4,3,4")]
    pub dims: Vec<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub detuning_ghz: f64,
    /// Truncations to compare, e.g. `3,3,2,3 5,5,3,5`; the largest is the reference.
    #[arg(long, num_args = 1.., default_values = ["3,3,2,3", "3,3,3,3", "4,4,3,4", "5,5,3,5"])]
    pub dims: Vec<String>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigureArgs {
    #[arg(value_enum, default_value = "fig2")]
    pub figure: FigureId,
    /// Sweep points per curve.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// RB trials per length.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

pub fn parse_dims(list: &[usize]) -> anyhow::Result<[usize; 4]> {
    match list {
        &[a, b, c, d] => Ok([a, b, c, d]),
        _ => bail!("expected four mode dimensions (q1,q2,bus,coupler), got {}", list.len()),
    }
}

pub fn parse_dims_str(s: &str) -> anyhow::Result<[usize; 4]> {
    let list = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().with_context(|| format!("bad dimension `{p}` in `{s}`")))
        .collect::<anyhow::Result<Vec<usize>>>()?;
    parse_dims(&list)
}
