//! Configuration loading, experiment orchestration and output emission for
//! the `dualmarket` command-line tool.

pub mod config;
pub mod output;
pub mod runner;

use std::path::PathBuf;

pub use config::{load_config, parse_config, ConfigError, Engine, Format, ScenarioConfig};
pub use runner::{run_compare, run_scenario, run_sweep, sweep_plan, CliError};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DUALMARKET_OUT_DIR";

/// Output directory precedence: command-line flag, then the scenario's
/// `[output] dir`, then the environment, then `./out`.
pub fn resolve_out_dir(flag: Option<PathBuf>, cfg: &ScenarioConfig) -> PathBuf {
    flag.or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}
