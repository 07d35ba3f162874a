use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use zzsim_cli::{execute, init_threads, Cli, RunConfig};

fn run() -> anyhow::Result<bool> {
    let args: Vec<String> = std::env::args().collect();
    let cfg = RunConfig::from_cli(Cli::parse_from(&args))?;
    init_threads(cfg.threads)?;
    // argv[0] varies with how the binary was invoked; keep metadata stable.
    let command_line = std::iter::once("zzsim").chain(args.iter().skip(1).map(String::as_str)).collect::<Vec<_>>().join(" ");
    let report = execute(&cfg, &command_line)?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(report.text.as_bytes())?;
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
