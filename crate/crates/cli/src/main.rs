use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use landau_cli::{
    check_command, equilibrium_command, load_config, run_command, CheckStatus, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "landau",
    version,
    about = "Structure-preserving Landau collision solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the initial condition and write diagnostics and snapshots.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Solve for the equilibrium carrying the initial condition's invariants.
    Equilibrium {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the invariant suite at the configured resolution.
    Check {
        config: PathBuf,
        /// Accepted for symmetry with the other subcommands; nothing is written.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn output_dir(cfg: &RunConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| cfg.output.directory.clone())
}

fn load(path: &Path) -> anyhow::Result<RunConfig> {
    load_config(path).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            output_dir: flag,
        } => {
            let cfg = load(&config)?;
            let dir = output_dir(&cfg, flag);
            let summary = run_command(&cfg, &dir)?;
            println!(
                "completed {} of {} steps; output in {}",
                summary.steps_completed,
                cfg.integrator.n_steps,
                dir.display()
            );
            if let Some(e) = summary.failure {
                eprintln!("error: step {} failed: {e}", summary.steps_completed + 1);
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Equilibrium {
            config,
            output_dir: flag,
        } => {
            let cfg = load(&config)?;
            let dir = output_dir(&cfg, flag);
            let s = equilibrium_command(&cfg, &dir)?;
            let sol = &s.solution;
            println!("lambda_mass       {:.16e}", sol.lambda_m);
            println!(
                "lambda_momentum   {:.16e} {:.16e}",
                sol.lambda_p[0], sol.lambda_p[1]
            );
            println!("lambda_energy     {:.16e}", sol.lambda_e);
            println!(
                "residual_norm     {:.3e} after {} iterations",
                sol.residual_norm, sol.iterations
            );
            println!("output in {}", dir.display());
        }
        Command::Check { config, .. } => {
            let cfg = load(&config)?;
            let outcomes = check_command(&cfg)?;
            let mut failed = false;
            for o in &outcomes {
                println!("{:<12} {:<28} {}", o.status.label(), o.name, o.detail);
                failed |= o.status == CheckStatus::Fail;
            }
            if failed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
