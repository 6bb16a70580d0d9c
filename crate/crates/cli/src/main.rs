use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dualmarket::{load_config, resolve_out_dir, run_compare, run_scenario, run_sweep, sweep_plan};
use dualmarket::{CliError, Engine, Format, ScenarioConfig};
use dualmarket_core::HiringRegime;

#[derive(Parser)]
#[command(name = "dualmarket", version, about = "Dual labor-market equilibrium simulator")]
struct Cli {
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: scenario `[output] dir`, then $DUALMARKET_OUT_DIR, then ./out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Time-series format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario with its configured engine.
    Simulate { config: PathBuf },
    /// Run only the deterministic mean-field layer.
    Meanfield { config: PathBuf },
    /// Run several regimes with shared parameters and compare them.
    Compare {
        config: PathBuf,
        /// Regime kinds, e.g. group_fair,group_blind,stat_disc.
        #[arg(long, value_delimiter = ',')]
        regimes: Vec<String>,
    },
    /// Run the cartesian product of the scenario's `[sweep]` axes.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Check a scenario and print its resolved form.
    Validate { config: PathBuf },
}

fn load(cli: &Cli, path: &Path) -> Result<ScenarioConfig, CliError> {
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.params.seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::JsonLines => Format::JsonLines,
        };
    }
    let errors = cfg.violations();
    if !errors.is_empty() {
        return Err(dualmarket::ConfigError {
            source: path.display().to_string(),
            errors,
        }
        .into());
    }
    Ok(cfg)
}

fn pick_regimes(cfg: &ScenarioConfig, kinds: &[String]) -> Result<Vec<HiringRegime>, CliError> {
    if kinds.is_empty() {
        return match &cfg.compare {
            Some(c) => Ok(c.regimes.clone()),
            None => Err(CliError::Usage(
                "pass --regimes or add a [compare] table to the scenario".into(),
            )),
        };
    }
    let configured: Vec<HiringRegime> = std::iter::once(cfg.regime)
        .chain(cfg.compare.iter().flat_map(|c| c.regimes.iter().copied()))
        .collect();
    kinds
        .iter()
        .map(|k| {
            configured
                .iter()
                .find(|r| r.name() == k)
                .copied()
                .or_else(|| HiringRegime::default_for(k))
                .ok_or_else(|| CliError::Usage(format!("unknown regime kind `{k}`")))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { config } | Command::Meanfield { config } => {
            let mut cfg = load(cli, config)?;
            if matches!(cli.command, Command::Meanfield { .. }) {
                cfg.engine = Engine::MeanField;
            }
            let dir = resolve_out_dir(cli.out_dir.clone(), &cfg);
            let run = run_scenario(&cfg, &dir)?;
            let eq = &run.summary.equilibrium;
            println!("wrote {}", run.timeseries.display());
            println!(
                "equilibrium: {:?}, final gap {:.4}, parity time {}",
                eq.kind,
                eq.rep_gap,
                eq.parity_time.map_or("not reached".to_string(), |t| t.to_string())
            );
        }
        Command::Compare { config, regimes } => {
            let cfg = load(cli, config)?;
            let regimes = pick_regimes(&cfg, regimes)?;
            let dir = resolve_out_dir(cli.out_dir.clone(), &cfg);
            let out = run_compare(&cfg, &regimes, &dir)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for r in &out.reports {
                println!(
                    "{} vs {}: qualified supply {:.4} / {:.4}, dominated = {}",
                    r.fair_regime, r.other_regime, r.qualified_supply_fair, r.qualified_supply_other, r.dominated
                );
            }
            println!("wrote {}", dir.join("comparison.csv").display());
        }
        Command::Sweep { spec, parallelism } => {
            let cfg = load(cli, spec)?;
            let plan = sweep_plan(&cfg)?;
            eprintln!("sweep: {} cells", plan.len());
            let dir = resolve_out_dir(cli.out_dir.clone(), &cfg);
            let out = run_sweep(&cfg, &dir, *parallelism)?;
            println!("wrote {}", out.index.display());
            if out.failed() > 0 {
                return Err(CliError::Runtime(format!("{} of {} cells failed", out.failed(), plan.len())));
            }
        }
        Command::Validate { config } => {
            let cfg = load(cli, config)?;
            print!("{}", cfg.dump());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
