use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sgflux::cli::{cmd_deflect, cmd_epr, cmd_figure2, cmd_oracle, cmd_selftest, Preset, RunConfig};
use sgflux::output::json;
use sgflux::{Error, Result};

#[derive(Parser)]
#[command(name = "sgflux", version, about = "Stern-Gerlach deflection by a flux-qubit dipole: plot data and reports")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named parameter set (overrides the config's parameters).
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Output directory (default: config `out_dir`, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reserved. Every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Acceleration profile along y and its negative-region summary.
    Figure2,
    /// Order-of-magnitude deflection in SI units.
    Deflect,
    /// EPR-pair conditional deflection statistics.
    Epr,
    /// Grid evolution against the perturbative force.
    Oracle,
    /// Invariant suite.
    Selftest,
}

fn report<T: Serialize>(r: Result<T>) -> Result<()> {
    print!("{}", json(&r?)?);
    Ok(())
}

fn run(args: Args) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = args.preset {
        cfg.preset = Some(p);
        cfg.params = None;
    }
    cfg.validate()?;
    let out = args.out.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match args.command {
        Command::Figure2 => report(cmd_figure2(&cfg, &out)),
        Command::Deflect => report(cmd_deflect(&cfg, &out)),
        Command::Epr => report(cmd_epr(&cfg, &out)),
        Command::Oracle => report(cmd_oracle(&cfg, &out)),
        Command::Selftest => {
            let r = cmd_selftest(&cfg, &out)?;
            for c in &r.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if r.failed > 0 {
                return Err(Error::CheckFailed(format!("{} of {} checks failed", r.failed, r.checks.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
