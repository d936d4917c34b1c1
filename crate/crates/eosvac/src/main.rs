//! Command-line front end: parse flags, resolve the layered run
//! configuration, dispatch to [`eosvac::run`], and map errors to the
//! documented exit codes (0 ok, 2 config error, 3 convergence failure,
//! 4 I/O error).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eosvac::config::RunConfig;
use eosvac::run::{self, CommandOutput, RunError};

#[derive(Parser)]
#[command(
    name = "eosvac",
    version,
    about = "Electro-optic sampling statistics of the polaritonic vacuum",
    long_about = "Computes the signal spectrum, integrated variance, delay scans, \
                  vacuum-density maps, and probe-duration sweeps of electro-optic \
                  sampling in a nonlinear crystal, at every approximation level the \
                  library implements. Configuration is layered: a named preset, then \
                  an optional config file, then --set overrides."
)]
struct Cli {
    /// Config file (INI-style sections; may name `preset = ...`)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Named preset: riek2015 (sub-cycle, lossless) or benea2019 (thermal, lossy)
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,

    /// Output directory (overrides `output.dir`)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Override one config key, e.g. --set crystal.length_um=10
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate s²(Ω) for the configured components over the grid
    Spectrum,
    /// Integrate each component; report ratios against the full evaluator
    Variance,
    /// Synthesize a delay scan from the spectrum, invert it, and compare
    #[command(name = "delay-scan")]
    DelayScan,
    /// Sample the transverse and axial-spectral vacuum-density maps
    Density,
    /// Sweep the probe duration; split variance by mode polarisation
    Sweep,
    /// Invert a measured delay-scan file and compare against the model
    Ingest {
        /// Scan file with a `delay_fs,s2` header line
        scan_file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Deterministic output does not depend on the pool size: parallel
        // loops assemble their results in input order.
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }

    let rc = match load_config(&cli) {
        Ok(rc) => rc,
        Err(e) => return report(e),
    };

    let result = match &cli.command {
        Command::Spectrum => run::cmd_spectrum(&rc),
        Command::Variance => run::cmd_variance(&rc),
        Command::DelayScan => run::cmd_delay_scan(&rc),
        Command::Density => run::cmd_density(&rc),
        Command::Sweep => run::cmd_sweep(&rc),
        Command::Ingest { scan_file } => run::cmd_ingest(&rc, scan_file),
    };

    match result {
        Ok(out) => {
            print_output(&out);
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, RunError> {
    let mut rc = RunConfig::load(cli.config.as_deref(), cli.preset.as_deref(), &cli.sets)?;
    if let Some(dir) = &cli.out {
        rc.push_override("output.dir", &dir.display().to_string())?;
    }
    Ok(rc)
}

fn print_output(out: &CommandOutput) {
    for note in &out.notes {
        println!("{note}");
    }
    for file in &out.files {
        println!("wrote {}", file.display());
    }
}

fn report(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(&e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    ExitCode::from(e.exit_code() as u8)
}
