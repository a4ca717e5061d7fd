//! `hardedge`: sampling, kernel grids, transition tables, free convolution
//! edges and the acceptance suite, each run leaving a JSON manifest.

mod config;
mod freeconv;
mod kernel;
mod manifest;
mod sample;
mod transition;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use manifest::Recorder;

#[derive(Parser)]
#[command(name = "hardedge", version, about = "Gaussian perturbations of hard-edge random matrix ensembles")]
struct Cli {
    /// Directory for output files and the run manifest
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// JSON file supplying any flag (flags win); a run manifest replays that run
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue histograms of a (perturbed) ensemble, one plot file per eps
    Sample(sample::SampleArgs),
    /// A correlation kernel, optionally Gaussian-deformed, on a grid (CSV)
    Kernel(kernel::KernelArgs),
    /// Rescaled finite-n kernels against their predicted limits
    Transition(transition::TransitionArgs),
    /// Support edges and density of the free convolution with a semicircle
    Freeconv(freeconv::FreeconvArgs),
    /// Run the acceptance criteria
    Verify(verify::VerifyArgs),
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RMT_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| hardedge::Error::Config(format!("RMT_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Sample(a) => {
            let mut rec = Recorder::new("sample", &cli.out)?;
            let a = sample::run(config::merge(a, cfg, "sample")?, &mut rec)?;
            rec.finish(&a, a.seed, None)?;
        }
        Command::Kernel(a) => {
            let mut rec = Recorder::new("kernel", &cli.out)?;
            let a = kernel::run(config::merge(a, cfg, "kernel")?, &mut rec)?;
            rec.finish(&a, None, None)?;
        }
        Command::Transition(a) => {
            let mut rec = Recorder::new("transition", &cli.out)?;
            let a = transition::run(config::merge(a, cfg, "transition")?, &mut rec)?;
            rec.finish(&a, None, None)?;
        }
        Command::Freeconv(a) => {
            let mut rec = Recorder::new("freeconv", &cli.out)?;
            let a = freeconv::run(config::merge(a, cfg, "freeconv")?, &mut rec)?;
            rec.finish(&a, None, None)?;
        }
        Command::Verify(a) => {
            let rec = Recorder::new("verify", &cli.out)?;
            let (a, reports) = verify::run(config::merge(a, cfg, "verify")?)?;
            let failed = reports.iter().any(|r| !r.passed);
            rec.finish(&a, a.seed, Some(reports))?;
            if failed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // library errors carry their own class; anything else is I/O or usage
            let code = e.downcast_ref::<hardedge::Error>().map_or(2, |e| e.exit_code());
            ExitCode::from(code as u8)
        }
    }
}
