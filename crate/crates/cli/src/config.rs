use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use dsspan_core::cv::{EvalConfig, ProtocolConfig};
use dsspan_core::miner::{MinerConfig, MiningMode};
use dsspan_core::model::ModelConfig;
use dsspan_core::selector::SelectorConfig;
use dsspan_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Directory holding the `<name>_*.txt` files.
    pub path: PathBuf,
    pub name: String,
    pub degree_labels: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            path: PathBuf::from("data/MUTAG"),
            name: "MUTAG".to_string(),
            degree_labels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    /// Worker threads; all available cores when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub dataset: DatasetConfig,
    pub miner: MinerConfig,
    pub selector: SelectorConfig,
    pub model: ModelConfig,
    pub protocol: ProtocolConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output_dir: PathBuf::from("out"),
            jobs: None,
            dataset: DatasetConfig::default(),
            miner: MinerConfig::default(),
            selector: SelectorConfig::default(),
            model: ModelConfig::default(),
            protocol: ProtocolConfig::default(),
        }
    }
}

/// Where a setting's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Published experimental protocol value.
    Paper,
    /// Built-in choice for a value the protocol leaves open.
    Default,
    /// Set in a config file or on the command line.
    User,
}

const PAPER_KEYS: &[&str] = &[
    "model.embedding_dim",
    "model.learning_rate",
    "model.epochs",
    "protocol.repetitions",
    "protocol.folds",
];

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeSet<String>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            _ => {
                out.insert(key);
            }
        }
    }
}

impl RunConfig {
    /// Parses a TOML document, returning the config and the dotted keys it
    /// sets explicitly.
    pub fn from_toml(text: &str) -> Result<(RunConfig, BTreeSet<String>)> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        let mut keys = BTreeSet::new();
        flatten("", &table, &mut keys);
        let config: RunConfig = toml::from_str(text).map_err(|e| {
            let field = e.message().split('`').nth(1).unwrap_or("config").to_string();
            Error::config(field, e.message().to_string())
        })?;
        Ok((config, keys))
    }

    pub fn load(path: &Path) -> Result<(RunConfig, BTreeSet<String>)> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.name.is_empty() {
            return Err(Error::config("dataset.name", "must not be empty"));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("jobs", "must be at least 1"));
        }
        self.eval_config(MiningMode::Capped).validate()
    }

    pub fn eval_config(&self, mode: MiningMode) -> EvalConfig {
        EvalConfig {
            miner: self.miner.clone(),
            selector: self.selector.clone(),
            model: self.model.clone(),
            protocol: self.protocol.clone(),
            mode,
        }
    }

    /// Tag for every leaf setting, keyed by dotted path.
    pub fn provenance(&self, user_keys: &BTreeSet<String>) -> BTreeMap<String, Provenance> {
        let table: toml::Table = toml::from_str(&self.to_toml()).expect("round trip");
        let mut keys = BTreeSet::new();
        flatten("", &table, &mut keys);
        // unset optionals still deserve a tag
        for k in ["jobs", "miner.gamma", "miner.max_edges", "selector.budget"] {
            keys.insert(k.to_string());
        }
        keys.into_iter()
            .map(|k| {
                let tag = if user_keys.contains(&k) {
                    Provenance::User
                } else if PAPER_KEYS.contains(&k.as_str()) {
                    Provenance::Paper
                } else {
                    Provenance::Default
                };
                (k, tag)
            })
            .collect()
    }
}

/// Command-line overrides; each applied value is recorded as user-set.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Dataset directory
    #[arg(long)]
    pub dataset_dir: Option<PathBuf>,
    /// Dataset name (file prefix)
    #[arg(long)]
    pub dataset: Option<String>,
    /// Use vertex degrees as labels when node labels are missing
    #[arg(long)]
    pub degree_labels: bool,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub min_cov: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Disable the eligibility cap
    #[arg(long, conflicts_with = "gamma")]
    pub no_cap: bool,
    #[arg(long)]
    pub max_edges: Option<usize>,
    #[arg(long)]
    pub automorphism_cap: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Learning-rate schedule: constant or linear
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>, key: &str, keys: &mut BTreeSet<String>) {
    if let Some(v) = value {
        *slot = v;
        keys.insert(key.to_string());
    }
}

impl Overrides {
    pub fn apply(&self, c: &mut RunConfig, keys: &mut BTreeSet<String>) -> Result<()> {
        set(&mut c.dataset.path, self.dataset_dir.clone(), "dataset.path", keys);
        set(&mut c.dataset.name, self.dataset.clone(), "dataset.name", keys);
        set(&mut c.dataset.degree_labels, self.degree_labels.then_some(true), "dataset.degree_labels", keys);
        set(&mut c.miner.delta, self.delta, "miner.delta", keys);
        set(&mut c.miner.min_cov, self.min_cov, "miner.min_cov", keys);
        set(&mut c.miner.gamma, self.gamma.map(Some), "miner.gamma", keys);
        set(&mut c.miner.gamma, self.no_cap.then_some(None), "miner.gamma", keys);
        set(&mut c.miner.max_edges, self.max_edges.map(Some), "miner.max_edges", keys);
        set(&mut c.miner.automorphism_cap, self.automorphism_cap, "miner.automorphism_cap", keys);
        set(&mut c.selector.tau, self.tau, "selector.tau", keys);
        set(&mut c.selector.budget, self.budget.map(Some), "selector.budget", keys);
        set(&mut c.model.embedding_dim, self.embedding_dim, "model.embedding_dim", keys);
        set(&mut c.model.learning_rate, self.learning_rate, "model.learning_rate", keys);
        set(&mut c.model.epochs, self.epochs, "model.epochs", keys);
        if let Some(s) = &self.schedule {
            let parsed = toml::Value::String(s.clone())
                .try_into()
                .map_err(|_| Error::config("model.schedule", format!("unknown schedule {s:?}")))?;
            set(&mut c.model.schedule, Some(parsed), "model.schedule", keys);
        }
        set(&mut c.protocol.repetitions, self.repetitions, "protocol.repetitions", keys);
        set(&mut c.protocol.folds, self.folds, "protocol.folds", keys);
        set(&mut c.protocol.seed, self.seed, "protocol.seed", keys);
        set(&mut c.output_dir, self.out.clone(), "output_dir", keys);
        set(&mut c.jobs, self.jobs.map(Some), "jobs", keys);
        Ok(())
    }
}

/// Defaults, then the optional file, then flags.
pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<(RunConfig, BTreeSet<String>)> {
    let (mut config, mut keys) = match file {
        Some(p) => RunConfig::load(p)?,
        None => (RunConfig::default(), BTreeSet::new()),
    };
    overrides.apply(&mut config, &mut keys)?;
    config.validate()?;
    Ok((config, keys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let (back, keys) = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert!(keys.contains("miner.delta"));
    }

    #[test]
    fn unknown_keys_name_the_field() {
        let err = RunConfig::from_toml("[miner]\ndelt = 0.2\n").unwrap_err();
        match err {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "delt"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_range_values_are_rejected_with_path() {
        let (c, _) = RunConfig::from_toml("[selector]\ntau = 1.5\n").unwrap();
        match c.validate().unwrap_err() {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "selector.tau"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn provenance_tags() {
        let (mut c, mut keys) = RunConfig::from_toml("[miner]\ndelta = 0.2\n").unwrap();
        let o = Overrides {
            epochs: Some(9),
            no_cap: true,
            ..Overrides::default()
        };
        o.apply(&mut c, &mut keys).unwrap();
        assert_eq!(c.miner.gamma, None);
        let p = c.provenance(&keys);
        assert_eq!(p["miner.delta"], Provenance::User);
        assert_eq!(p["model.epochs"], Provenance::User);
        assert_eq!(p["miner.gamma"], Provenance::User);
        assert_eq!(p["model.learning_rate"], Provenance::Paper);
        assert_eq!(p["protocol.folds"], Provenance::Paper);
        assert_eq!(p["miner.min_cov"], Provenance::Default);
        assert_eq!(p["selector.budget"], Provenance::Default);
    }

    #[test]
    fn schedule_flag_parses() {
        let mut c = RunConfig::default();
        let mut keys = BTreeSet::new();
        let o = Overrides {
            schedule: Some("constant".into()),
            ..Overrides::default()
        };
        o.apply(&mut c, &mut keys).unwrap();
        assert_eq!(c.model.schedule, dsspan_core::model::LrSchedule::Constant);
        let bad = Overrides {
            schedule: Some("cosine".into()),
            ..Overrides::default()
        };
        assert!(bad.apply(&mut c, &mut keys).is_err());
    }
}
