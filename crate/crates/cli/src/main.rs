use std::path::PathBuf;
use std::process::ExitCode;

use bcanneal_cli::{run_bounds, run_diagnostics, run_sweep, CliError, ExperimentConfig, RunOptions, EXIT_PARTIAL};
use clap::{Args, Parser, Subcommand};

/// Boundary-cancellation experiments for open-system quantum annealing.
#[derive(Parser)]
#[command(name = "bcanneal", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Adiabatic error over the (k, τ) grid with power-law fits.
    Sweep(Common),
    /// Instantaneous spectra, Choi minima and steady-state to Gibbs distances.
    Diagnose(Common),
    /// Constants and curve of the two-branch error bound (DLAME only).
    Bounds(Common),
    /// Parse and check a config without running it.
    ValidateConfig(Common),
}

#[derive(Args)]
struct Common {
    /// TOML (or .json) experiment config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(bcanneal_cli::PRESETS))]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => return Err(CliError::Validation("one of --config or --preset is required".into())),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }
}

fn report(files: &[PathBuf], failures: usize) -> ExitCode {
    for f in files {
        println!("wrote {}", f.display());
    }
    if failures > 0 {
        eprintln!("{failures} point(s) failed; see the JSON sidecar");
        ExitCode::from(EXIT_PARTIAL as u8)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (verb, common) = match &cli.verb {
        Verb::Sweep(c) => ("sweep", c),
        Verb::Diagnose(c) => ("diagnose", c),
        Verb::Bounds(c) => ("bounds", c),
        Verb::ValidateConfig(c) => ("validate", c),
    };
    let config = common.load()?;
    let opts = RunOptions::resolve(common.out.clone(), &config, common.workers.map(|w| w as usize));
    Ok(match verb {
        "sweep" => {
            let r = run_sweep(&config, &opts)?;
            for f in &r.fits {
                match f.alpha() {
                    Some(a) => println!("k={} alpha={a:.3}", f.k),
                    None => println!("k={} no fit ({})", f.k, f.note.as_deref().unwrap_or("")),
                }
            }
            report(&r.files, r.failures.len())
        }
        "diagnose" => {
            let r = run_diagnostics(&config, &opts)?;
            println!("positive_real_part={} cp_violation={}", r.positive_real_part, r.cp_violation);
            report(&r.files, r.failures.len())
        }
        "bounds" => {
            let r = run_bounds(&config, &opts)?;
            for c in &r.constants {
                println!("{} B0={:e} A1={:e} B1={:e} tau*={:e}", c.schedule, c.b0, c.a1, c.b1, c.tau_star);
            }
            report(&r.files, r.failures.len())
        }
        _ => {
            println!("{}: valid (hash {})", config.name, config.hash());
            ExitCode::SUCCESS
        }
    })
}

fn dispatch<I, A>(args: I) -> ExitCode
where
    I: IntoIterator<Item = A>,
    A: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation failures; exit code 2 is reserved
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    dispatch(std::env::args_os())
}
