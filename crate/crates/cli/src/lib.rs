//! Command-line driver: config files, commands and report writers.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use dsspan_core::Result;

use config::{resolve, Overrides};

#[derive(Debug, Parser)]
#[command(name = "dsspan", version, about = "Discriminative subgraph mining and graph classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// TOML config file; flags override its values
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine candidate patterns on the whole dataset
    Mine(Common),
    /// Score and select features from a mining file
    Select {
        #[command(flatten)]
        common: Common,
        /// Mining result; defaults to <out>/mining.json
        #[arg(long)]
        mining: Option<PathBuf>,
    },
    /// Repeated stratified cross-validation
    Evaluate(Common),
    /// Capped vs uncapped comparison over one or more configs
    Bench {
        #[command(flatten)]
        common: Common,
        /// Further config files, benchmarked in order after --config
        configs: Vec<PathBuf>,
    },
    /// Print the effective config with provenance tags
    PrintConfig(Common),
    /// Load a dataset and report structural problems
    ValidateDataset(Common),
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Runs a parsed command, returning the text for stdout and whether the
/// run succeeded.
pub fn run(cli: Cli) -> Result<(String, bool)> {
    match cli.command {
        Command::Mine(c) => {
            let (config, keys) = resolve(c.config.as_deref(), &c.overrides)?;
            let mined = commands::cmd_mine(&config, &keys)?;
            Ok((
                json_line(&serde_json::json!({
                    "candidates": mined.candidates.len(),
                    "fillers": mined.candidates.iter().filter(|p| p.filler).count(),
                    "uncoverable": mined.uncoverable.len(),
                    "output": config.output_dir.join("mining.json"),
                })),
                true,
            ))
        }
        Command::Select { common, mining } => {
            let (config, keys) = resolve(common.config.as_deref(), &common.overrides)?;
            let path = mining.unwrap_or_else(|| config.output_dir.join("mining.json"));
            let sel = commands::cmd_select(&config, &path, &keys)?;
            Ok((
                json_line(&serde_json::json!({
                    "selected": sel.selected.len(),
                    "coverage_fraction": sel.coverage_fraction,
                    "constraint_met": sel.constraint_met,
                })),
                true,
            ))
        }
        Command::Evaluate(c) => {
            let (config, keys) = resolve(c.config.as_deref(), &c.overrides)?;
            let report = commands::cmd_evaluate(&config, &keys)?;
            Ok((
                json_line(&serde_json::json!({
                    "dataset": report.dataset,
                    "mean_acc": report.mean_accuracy,
                    "std": report.std_accuracy,
                    "avg_features": report.avg_features,
                    "output": config.output_dir.join("report.json"),
                })),
                true,
            ))
        }
        Command::Bench { common, configs } => {
            let mut runs = vec![resolve(common.config.as_deref(), &common.overrides)?];
            for path in &configs {
                runs.push(resolve(Some(path), &common.overrides)?);
            }
            let out = runs[0].0.output_dir.clone();
            let rows = commands::cmd_bench(&runs, &out)?;
            Ok((rows.iter().map(json_line).collect::<Vec<_>>().join("\n"), true))
        }
        Command::PrintConfig(c) => {
            let (config, keys) = resolve(c.config.as_deref(), &c.overrides)?;
            Ok((commands::print_config(&config, &keys), true))
        }
        Command::ValidateDataset(c) => {
            let (config, _) = resolve(c.config.as_deref(), &c.overrides)?;
            let summary = commands::validate_dataset(&config)?;
            let ok = summary.problems.is_empty();
            Ok((serde_json::to_string_pretty(&summary).expect("serializable"), ok))
        }
    }
}

/// One-line machine-readable error record.
pub fn error_line(e: &dsspan_core::Error) -> String {
    json_line(&serde_json::json!({ "error": e.kind(), "message": e.to_string() }))
}
