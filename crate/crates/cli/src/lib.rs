//! Configuration, initial conditions and file output for the `landau`
//! binary. The subcommands live in [`commands`] so tests can drive them
//! without spawning a process.

pub mod commands;
pub mod config;
pub mod initial;
pub mod output;

pub use commands::{
    check_command, equilibrium_command, run_command, CheckOutcome, CheckStatus, CliError,
    EquilibriumSummary, RunSummary, Setup,
};
pub use config::{load_config, ConfigError, GaussianComponent, RunConfig};
pub use initial::build_initial_condition;
