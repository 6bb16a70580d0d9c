//! Scenario files: a TOML document with `[params]`, `[regime]`,
//! `[initial]`, `[agent]`, `[output]` and optional `[compare]` / `[sweep]`
//! tables. Every field has a default, so an empty file is a valid scenario.

use std::fmt;
use std::path::{Path, PathBuf};

use dualmarket_core::{HiringRegime, ModelParams, PerGroup};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Agent,
    MeanField,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub pi_b: f64,
    pub pi_w: f64,
}

impl Default for Initial {
    fn default() -> Self {
        Self { pi_b: 0.3, pi_w: 0.7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentOptions {
    pub oscillation: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSpec {
    pub regimes: Vec<HiringRegime>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// Dotted path into the scenario, e.g. `params.beta_rep`.
    pub path: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<Axis>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_parallelism() -> usize {
    1
}

fn default_regime() -> HiringRegime {
    HiringRegime::GroupFair { ell: 0.8 }
}

fn default_horizon() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default = "default_regime")]
    pub regime: HiringRegime,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub agent: AgentOptions,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            horizon: default_horizon(),
            engine: Engine::default(),
            params: ModelParams::default(),
            regime: default_regime(),
            initial: Initial::default(),
            agent: AgentOptions::default(),
            output: OutputSpec::default(),
            compare: None,
            sweep: None,
        }
    }
}

impl ScenarioConfig {
    pub fn pi0(&self) -> PerGroup<f64> {
        PerGroup::new(self.initial.pi_b, self.initial.pi_w)
    }

    /// Every validation failure, each naming the offending field.
    pub fn violations(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .params
            .violations()
            .iter()
            .map(|v| format!("params.{v}"))
            .collect();
        if self.params.seed > i64::MAX as u64 {
            out.push("params.seed: must fit in a signed 64-bit integer".into());
        }
        out.extend(self.regime.violations());
        if self.horizon == 0 {
            out.push("horizon: must be >= 1".into());
        }
        for (name, v) in [("initial.pi_b", self.initial.pi_b), ("initial.pi_w", self.initial.pi_w)] {
            if !(0.0..=1.0).contains(&v) {
                out.push(format!("{name}: must lie in [0, 1], got {v}"));
            }
        }
        if let Some(c) = &self.compare {
            for (i, r) in c.regimes.iter().enumerate() {
                out.extend(r.violations().into_iter().map(|v| format!("compare.regimes[{i}].{v}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.parallelism == 0 {
                out.push("sweep.parallelism: must be >= 1".into());
            }
            if s.axes.is_empty() {
                out.push("sweep.axes: at least one axis is required".into());
            }
            let tree = self.to_value();
            for (i, axis) in s.axes.iter().enumerate() {
                if axis.path.starts_with("sweep") || lookup(&tree, &axis.path).is_none() {
                    out.push(format!("sweep.axes[{i}].path: `{}` names no scenario field", axis.path));
                }
                if axis.values.is_empty() {
                    out.push(format!("sweep.axes[{i}].values: must not be empty"));
                }
            }
        }
        out
    }

    /// Resolved configuration as TOML; loading it yields the same scenario.
    pub fn dump(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    pub fn to_value(&self) -> toml::Value {
        toml::Value::try_from(self).expect("scenario config always serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub errors: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} error(s)", self.source, self.errors.len())?;
        for e in &self.errors {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// Parses and validates scenario text; `source` labels error messages.
pub fn parse_config(text: &str, source: &str) -> Result<ScenarioConfig, ConfigError> {
    let fail = |errors| ConfigError {
        source: source.to_string(),
        errors,
    };
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().trim().to_string();
        let at = e
            .span()
            .map(|s| {
                let (l, c) = line_col(text, s.start);
                format!("line {l}, column {c}: ")
            })
            .unwrap_or_default();
        fail(vec![format!("parse error at {at}{msg}")])
    })?;
    let errors = cfg.violations();
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(fail(errors))
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        source: source.clone(),
        errors: vec![format!("cannot read file: {e}")],
    })?;
    parse_config(&text, &source)
}

pub fn lookup<'a>(tree: &'a toml::Value, path: &str) -> Option<&'a toml::Value> {
    path.split('.').try_fold(tree, |node, key| node.get(key))
}

/// Replaces the value at a dotted path. Returns false when the path does not
/// exist.
pub fn set_path(tree: &mut toml::Value, path: &str, value: toml::Value) -> bool {
    let mut node = tree;
    let keys: Vec<&str> = path.split('.').collect();
    for key in &keys[..keys.len() - 1] {
        match node.get_mut(*key) {
            Some(n) => node = n,
            None => return false,
        }
    }
    match node.get_mut(keys[keys.len() - 1]) {
        Some(slot) => {
            // Integers are accepted where floats are expected.
            *slot = match (&*slot, value) {
                (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
                (_, v) => v,
            };
            true
        }
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default_scenario() {
        let cfg = parse_config("", "t").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn dump_round_trips() {
        let cfg = parse_config(
            "horizon = 50\n[regime]\nkind = \"stat_disc\"\nxi_b = 0.2\nxi_w = 0.6\n[compare]\nregimes = [{ kind = \"group_blind\", q = 0.7 }]\n",
            "t",
        )
        .unwrap();
        assert_eq!(parse_config(&cfg.dump(), "dump").unwrap(), cfg);
    }

    #[test]
    fn all_violations_reported() {
        let err = parse_config(
            "horizon = 0\n[params]\np_ql = 0.95\n[initial]\npi_b = 1.5\npi_w = 0.5\n",
            "t",
        )
        .unwrap_err();
        let text = err.errors.join("\n");
        assert!(text.contains("horizon"));
        assert!(text.contains("p_ql"), "{text}");
        assert!(text.contains("initial.pi_b"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config("horizon = 5\n[params]\nm = = 2\n", "t").unwrap_err();
        assert!(err.errors[0].contains("line 3"), "{:?}", err.errors);
        let err = parse_config("[params]\nbogus = 1\n", "t").unwrap_err();
        assert!(err.errors[0].contains("line 2"), "{:?}", err.errors);
    }

    #[test]
    fn paths() {
        let mut v = ScenarioConfig::default().to_value();
        assert!(lookup(&v, "params.beta_rep").is_some());
        assert!(lookup(&v, "params.nope").is_none());
        assert!(set_path(&mut v, "params.beta_rep", toml::Value::Integer(1)));
        let cfg: ScenarioConfig = v.try_into().unwrap();
        assert_eq!(cfg.params.beta_rep, 1.0);
    }

    #[test]
    fn sweep_axes_must_exist() {
        let err = parse_config(
            "[sweep]\naxes = [{ path = \"params.zeta\", values = [1] }]\n",
            "t",
        )
        .unwrap_err();
        assert!(err.errors[0].contains("params.zeta"));
    }
}
