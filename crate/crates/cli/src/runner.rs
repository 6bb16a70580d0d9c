//! Experiment orchestration: single scenarios, regime comparisons and sweeps.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dualmarket_core::analysis::{
    classify_equilibrium, parity_audit, pareto_compare, EquilibriumReport, ParetoConfig,
    ParetoReport, ParityAudit, RunView, TailWindow,
};
use dualmarket_core::meanfield::{equilibrium_path, reputation_path, steady_states, SteadyState};
use dualmarket_core::sim::{simulate, SimOptions, SimOutput, TimeSeriesRecord};
use dualmarket_core::{HiringRegime, ModelError};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, Engine, Format, ScenarioConfig};
use crate::output::{record_cells, write_checked, Cell, Table, RECORD_COLUMNS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("runtime failure: {0}")]
    Runtime(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InternalConsistency(m) => CliError::Invariant(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o: {e}"))
    }
}

fn check(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let errors = cfg.violations();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ConfigError {
            source: "scenario".into(),
            errors,
        }
        .into())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldSummary {
    pub g0: f64,
    pub steady_states: Vec<SteadyState>,
    pub parity_time: Option<usize>,
    pub final_pi_b: f64,
    pub final_pi_w: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub resolved_config: String,
    pub engine: Engine,
    pub equilibrium: EquilibriumReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity_audit: Option<ParityAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_field: Option<MeanFieldSummary>,
    pub checksums: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub timeseries: PathBuf,
    pub summary: Summary,
    pub agent: Option<SimOutput>,
}

impl RunArtifacts {
    pub fn timeseries_checksum(&self) -> &str {
        let name = self.timeseries.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        &self.summary.checksums[name]
    }
}

struct MeanFieldRun {
    summary: MeanFieldSummary,
    g: Vec<f64>,
    wage: Vec<f64>,
    pi: Vec<(f64, f64)>,
}

fn run_mean_field(cfg: &ScenarioConfig, g0: f64) -> Result<MeanFieldRun, CliError> {
    let p = &cfg.params;
    let g = equilibrium_path(g0, cfg.horizon, p)?;
    let wage = g
        .iter()
        .map(|&x| dualmarket_core::forms::wage_of(x, p))
        .collect::<Result<Vec<_>, _>>()?;
    let rep = reputation_path(cfg.initial.pi_b, cfg.initial.pi_w, &cfg.regime, cfg.horizon, g0, p)?;
    let last = rep.pi[rep.pi.len() - 1];
    Ok(MeanFieldRun {
        summary: MeanFieldSummary {
            g0,
            steady_states: steady_states(p, 1e-3, 1e-9)?,
            parity_time: rep.parity_time,
            final_pi_b: last.b,
            final_pi_w: last.w,
        },
        g,
        wage,
        pi: rep.pi.iter().map(|x| (x.b, x.w)).collect(),
    })
}

/// Record stand-ins carrying the mean-field series, for classification.
fn mean_field_records(mf: &MeanFieldRun) -> Vec<TimeSeriesRecord> {
    mf.g.iter()
        .zip(&mf.pi)
        .zip(&mf.wage)
        .enumerate()
        .map(|(t, ((&g, &(pi_b, pi_w)), &wage))| TimeSeriesRecord {
            t: t as u64,
            g_plm: g,
            g_tlm: g,
            wage,
            pi_b,
            pi_w,
            hires_tlm_b: 0,
            hires_tlm_w: 0,
            hires_plm_b: 0,
            hires_plm_w: 0,
            mean_effort_rate_q: 0.0,
            mean_effort_rate_u: 0.0,
            plm_size: 0,
            tlm_size: 0,
            earnings_b: 0.0,
            earnings_w: 0.0,
        })
        .collect()
}

/// Runs the configured engine(s) and writes the time series, the resolved
/// configuration and a summary into `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunArtifacts, CliError> {
    check(cfg)?;
    let p = &cfg.params;
    let agent = match cfg.engine {
        Engine::Agent | Engine::Both => Some(simulate(
            p,
            &cfg.regime,
            cfg.horizon,
            SimOptions {
                pi0: cfg.pi0(),
                oscillation: cfg.agent.oscillation,
            },
        )?),
        Engine::MeanField => None,
    };
    let mf = match cfg.engine {
        Engine::MeanField | Engine::Both => {
            let g0 = agent.as_ref().map_or(
                p.sigma_b * cfg.initial.pi_b + (1.0 - p.sigma_b) * cfg.initial.pi_w,
                |a| a.records[0].g_plm,
            );
            Some(run_mean_field(cfg, g0)?)
        }
        Engine::Agent => None,
    };

    let mut table;
    match (&agent, &mf) {
        (Some(a), None) => {
            table = Table::new(&RECORD_COLUMNS);
            for r in &a.records {
                table.push(record_cells(r));
            }
        }
        (None, Some(m)) => {
            table = Table::new(&["t", "g_mf", "wage_mf", "pi_b_mf", "pi_w_mf"]);
            for t in 0..m.g.len() {
                table.push(vec![
                    Cell::Int(t as u64),
                    Cell::Float(m.g[t]),
                    Cell::Float(m.wage[t]),
                    Cell::Float(m.pi[t].0),
                    Cell::Float(m.pi[t].1),
                ]);
            }
        }
        (Some(a), Some(m)) => {
            let mut cols = RECORD_COLUMNS.to_vec();
            cols.extend(["g_mf", "wage_mf", "pi_b_mf", "pi_w_mf"]);
            table = Table::new(&cols);
            for (t, r) in a.records.iter().enumerate() {
                let mut row = record_cells(r);
                row.extend([
                    Cell::Float(m.g[t]),
                    Cell::Float(m.wage[t]),
                    Cell::Float(m.pi[t].0),
                    Cell::Float(m.pi[t].1),
                ]);
                table.push(row);
            }
        }
        (None, None) => unreachable!("engine always selects at least one layer"),
    }

    let format = cfg.output.format;
    let ts_name = format!("timeseries.{}", format.extension());
    let timeseries = out_dir.join(&ts_name);
    let mut checksums = BTreeMap::new();
    checksums.insert(ts_name, write_checked(&timeseries, &table.render(format)?)?);
    let dump = cfg.dump();
    checksums.insert(
        "resolved.toml".to_string(),
        write_checked(&out_dir.join("resolved.toml"), dump.as_bytes())?,
    );

    let window = TailWindow::default();
    let (equilibrium, audit) = match &agent {
        Some(a) => (
            classify_equilibrium(&a.records, Some(&a.thresholds), window)?,
            Some(parity_audit(&a.tallies)?),
        ),
        None => {
            let m = mf.as_ref().expect("mean-field run present");
            (classify_equilibrium(&mean_field_records(m), None, window)?, None)
        }
    };
    let summary = Summary {
        resolved_config: dump,
        engine: cfg.engine,
        equilibrium,
        parity_audit: audit,
        mean_field: mf.map(|m| m.summary),
        checksums,
    };
    let json = serde_json::to_vec_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_checked(&out_dir.join("summary.json"), &json)?;
    Ok(RunArtifacts {
        dir: out_dir.to_path_buf(),
        timeseries,
        summary,
        agent,
    })
}

#[derive(Debug, Clone)]
pub struct CompareArtifacts {
    pub runs: Vec<RunArtifacts>,
    pub reports: Vec<ParetoReport>,
    pub warnings: Vec<String>,
}

/// Runs every regime with shared parameters and seed, then compares each
/// run against the first group-fair one.
pub fn run_compare(
    cfg: &ScenarioConfig,
    regimes: &[HiringRegime],
    out_dir: &Path,
) -> Result<CompareArtifacts, CliError> {
    if regimes.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least two regimes, got {}",
            regimes.len()
        )));
    }
    let mut warnings = Vec::new();
    let base = regimes
        .iter()
        .position(|r| matches!(r, HiringRegime::GroupFair { .. }))
        .unwrap_or_else(|| {
            warnings.push(format!(
                "no group_fair regime listed; comparing against {}",
                regimes[0].name()
            ));
            0
        });
    let mut runs = Vec::with_capacity(regimes.len());
    for (i, regime) in regimes.iter().enumerate() {
        let mut c = cfg.clone();
        c.regime = *regime;
        c.engine = Engine::Agent;
        c.compare = None;
        c.sweep = None;
        runs.push(run_scenario(&c, &out_dir.join(format!("{i:02}_{}", regime.name())))?);
    }
    let view = |i: usize| RunView {
        params: &cfg.params,
        regime: &regimes[i],
        records: &runs[i].agent.as_ref().expect("agent engine").records,
    };
    let mut reports = Vec::new();
    for j in (0..regimes.len()).filter(|&j| j != base) {
        reports.push(pareto_compare(view(base), view(j), ParetoConfig::default())?);
    }

    let mut table = Table::new(&[
        "fair_regime",
        "other_regime",
        "qualified_supply_fair",
        "qualified_supply_other",
        "firm_fill_gap",
        "wage_gap_b",
        "wage_gap_w",
        "dominated",
        "premise_initial",
        "premise_tail",
    ]);
    for r in &reports {
        table.push(vec![
            Cell::Text(r.fair_regime.clone()),
            Cell::Text(r.other_regime.clone()),
            Cell::Float(r.qualified_supply_fair),
            Cell::Float(r.qualified_supply_other),
            Cell::Float(r.firm_fill_gap),
            Cell::Float(r.gaps.wage_b),
            Cell::Float(r.gaps.wage_w),
            Cell::Text(r.dominated.to_string()),
            Cell::Text(r.premise_initial.to_string()),
            Cell::Text(r.premise_tail.to_string()),
        ]);
    }
    write_checked(&out_dir.join("comparison.csv"), &table.render(Format::Csv)?)?;
    let json = serde_json::to_vec_pretty(&reports).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_checked(&out_dir.join("comparison.json"), &json)?;
    Ok(CompareArtifacts {
        runs,
        reports,
        warnings,
    })
}

/// One cell of a sweep: the axis values it sets.
pub type CellSettings = Vec<(String, toml::Value)>;

/// Cartesian product of the sweep axes, first axis varying slowest.
pub fn sweep_plan(cfg: &ScenarioConfig) -> Result<Vec<CellSettings>, CliError> {
    check(cfg)?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("scenario has no [sweep] table".into()))?;
    let mut cells: Vec<CellSettings> = vec![Vec::new()];
    for axis in &sweep.axes {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.push((axis.path.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    Ok(cells)
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub index: usize,
    pub settings: CellSettings,
    pub dir: PathBuf,
    pub outcome: Result<RunArtifacts, String>,
}

#[derive(Debug, Clone)]
pub struct SweepArtifacts {
    pub cells: Vec<CellResult>,
    pub index: PathBuf,
    pub aggregate: PathBuf,
}

impl SweepArtifacts {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }
}

fn cell_config(base: &ScenarioConfig, settings: &CellSettings) -> Result<ScenarioConfig, String> {
    let mut stripped = base.clone();
    stripped.sweep = None;
    stripped.compare = None;
    let mut tree = stripped.to_value();
    for (path, value) in settings {
        if !crate::config::set_path(&mut tree, path, value.clone()) {
            return Err(format!("{path}: no such field"));
        }
    }
    let cfg: ScenarioConfig = tree.try_into().map_err(|e: toml::de::Error| e.to_string())?;
    let errors = cfg.violations();
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(errors.join("; "))
    }
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Float(f) => crate::output::fmt_float(*f),
        other => other.to_string(),
    }
}

/// Runs every sweep cell on a pool of `parallelism` threads. Cell failures
/// are recorded, not propagated.
pub fn run_sweep(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    parallelism: Option<usize>,
) -> Result<SweepArtifacts, CliError> {
    let plan = sweep_plan(cfg)?;
    let threads = parallelism
        .or(cfg.sweep.as_ref().map(|s| s.parallelism))
        .unwrap_or(1)
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let cells: Vec<CellResult> = pool.install(|| {
        plan.par_iter()
            .enumerate()
            .map(|(index, settings)| {
                let dir = out_dir.join("cells").join(format!("cell_{index:04}"));
                let outcome = cell_config(cfg, settings)
                    .and_then(|c| run_scenario(&c, &dir).map_err(|e| e.to_string()));
                CellResult {
                    index,
                    settings: settings.clone(),
                    dir,
                    outcome,
                }
            })
            .collect()
    });

    let axes: Vec<String> = plan.first().map_or_else(Vec::new, |c| c.iter().map(|(p, _)| p.clone()).collect());
    let mut index_cols: Vec<&str> = vec!["cell"];
    index_cols.extend(axes.iter().map(String::as_str));
    index_cols.extend([
        "status",
        "dir",
        "timeseries_sha256",
        "kind",
        "rep_gap",
        "parity_time",
        "g_star_estimate",
        "error",
    ]);
    let mut index = Table::new(&index_cols);
    let mut agg_cols: Vec<&str> = vec!["cell"];
    agg_cols.extend(axes.iter().map(String::as_str));
    agg_cols.extend(["t", "variable", "value"]);
    let mut aggregate = Table::new(&agg_cols);

    for cell in &cells {
        let mut row = vec![Cell::Int(cell.index as u64)];
        row.extend(cell.settings.iter().map(|(_, v)| Cell::Text(value_text(v))));
        let rel = cell.dir.strip_prefix(out_dir).unwrap_or(&cell.dir).display().to_string();
        match &cell.outcome {
            Ok(run) => {
                let eq = &run.summary.equilibrium;
                row.extend([
                    Cell::Text("ok".into()),
                    Cell::Text(rel),
                    Cell::Text(run.timeseries_checksum().to_string()),
                    Cell::Text(format!("{:?}", eq.kind).to_lowercase()),
                    Cell::Float(eq.rep_gap),
                    Cell::Text(eq.parity_time.map_or(String::new(), |t| t.to_string())),
                    Cell::Float(eq.g_star_estimate),
                    Cell::Text(String::new()),
                ]);
                if let Some(a) = &run.agent {
                    for r in &a.records {
                        for (name, value) in RECORD_COLUMNS.iter().zip(record_cells(r)).skip(1) {
                            let mut line = vec![Cell::Int(cell.index as u64)];
                            line.extend(cell.settings.iter().map(|(_, v)| Cell::Text(value_text(v))));
                            line.extend([Cell::Int(r.t), Cell::Text(name.to_string()), value]);
                            aggregate.push(line);
                        }
                    }
                }
            }
            Err(e) => {
                row.extend([
                    Cell::Text("failed".into()),
                    Cell::Text(rel),
                    Cell::Text(String::new()),
                    Cell::Text(String::new()),
                    Cell::Text(String::new()),
                    Cell::Text(String::new()),
                    Cell::Text(String::new()),
                    Cell::Text(e.clone()),
                ]);
            }
        }
        index.push(row);
    }
    let index_path = out_dir.join("index.csv");
    write_checked(&index_path, &index.render(Format::Csv)?)?;
    let aggregate_path = out_dir.join("aggregate.csv");
    write_checked(&aggregate_path, &aggregate.render(Format::Csv)?)?;
    Ok(SweepArtifacts {
        cells,
        index: index_path,
        aggregate: aggregate_path,
    })
}
