use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semiwave::run::OUT_ENV;
use semiwave::{load_config, AppError, Experiment, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "semiwave", version, about = "Semiclassical wave-detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expose a screen to a double-slit field and record the count ladder.
    Simulate(Flags),
    /// Compare short and long exposures against both detection curves.
    Analyze(Flags),
    /// Sweep plane-wave dispersion and densities.
    Matterwave(Flags),
    /// Check spin invariants and grid currents.
    Spin(Flags),
    /// Sweep the scattered frequency over angle.
    Compton(Flags),
    /// RMS widths and uncertainty products of sampled packets.
    Packet(Flags),
    /// Tabulate the excitation cross-section.
    Xsec(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: config, then $SEMIWAVE_OUT, then ./semiwave-out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::Simulate(f) => (Experiment::DoubleSlitBuildup, f),
            Command::Analyze(f) => (Experiment::BornDeviation, f),
            Command::Matterwave(f) => (Experiment::MatterwaveSweep, f),
            Command::Spin(f) => (Experiment::SpinCheck, f),
            Command::Compton(f) => (Experiment::ComptonSweep, f),
            Command::Packet(f) => (Experiment::PacketWidths, f),
            Command::Xsec(f) => (Experiment::Xsec, f),
        }
    }
}

fn execute(experiment: Experiment, flags: Flags) -> Result<(), AppError> {
    let mut config = match &flags.config {
        Some(path) => load_config(path)?,
        None => RunConfig::defaults(experiment),
    };
    if config.experiment != experiment {
        return Err(AppError::Config(format!(
            "config is for {}, but this subcommand runs {}",
            config.experiment.name(),
            experiment.name()
        )));
    }
    if let Some(seed) = flags.seed {
        config.seed = seed;
    }
    let opts = RunOptions {
        out_dir: flags.out,
        threads: flags.threads.map(usize::from),
        env_out: std::env::var(OUT_ENV).ok(),
    };
    let report = semiwave::run(&config, &opts)?;
    eprintln!(
        "{}: wrote {} files to {} in {:.3} s",
        experiment.name(),
        report["files"].as_array().map_or(0, Vec::len) + 1,
        opts.resolve_out_dir(&config).display(),
        report["wall_clock_s"].as_f64().unwrap_or(0.0)
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (experiment, flags) = cli.command.split();
    match execute(experiment, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semiwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
