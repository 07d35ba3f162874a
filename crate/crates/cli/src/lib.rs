//! Command-line front end for the `zzsim` simulation library.

pub mod commands;
pub mod config;
pub mod devices;
pub mod output;
pub mod recipes;

pub use commands::Context;
pub use config::{Cli, Command, RunConfig};
pub use devices::{load_device, LoadedDevice};
pub use output::{Anchor, Report};

/// Run one resolved configuration. `command_line` is echoed into CSV metadata.
pub fn execute(config: &RunConfig, command_line: &str) -> anyhow::Result<Report> {
    let ctx = Context { config, command_line: command_line.to_string() };
    match &config.command {
        Command::ZetaSweep(a) => commands::zeta_sweep(&ctx, a),
        Command::FindZeroZeta(a) => commands::find_zero(&ctx, a),
        Command::Rb(a) => commands::rb(&ctx, a),
        Command::IswapFidelity(a) => commands::iswap_fidelity(&ctx, a),
        Command::Ptm(a) => commands::ptm(&ctx, a),
        Command::Spectrum(a) => commands::spectrum(&ctx, a),
        Command::Convergence(a) => commands::convergence(&ctx, a),
        Command::Figure(a) => recipes::run_figure(&ctx, a),
    }
}

/// Configure the global rayon pool. Only the first call takes effect.
pub fn init_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
