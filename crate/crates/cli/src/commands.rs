use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use dsspan_core::cv::{self, EvalReport};
use dsspan_core::miner::{self, MiningMode, MiningResult};
use dsspan_core::model::{self, EmbedModel};
use dsspan_core::selector::{self, SelectionResult};
use dsspan_core::tu::{self, LoadOptions};
use dsspan_core::{Error, GraphDataset, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Provenance, RunConfig};

pub fn load_dataset(config: &RunConfig) -> Result<GraphDataset> {
    let options = LoadOptions {
        degree_labels: config.dataset.degree_labels,
    };
    tu::load_tu_dataset_with(&config.dataset.path, &config.dataset.name, options)
}

/// Runs `f` on a pool of `jobs` threads (all cores when unset).
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(pool.install(f))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(json_error)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a RunConfig,
    provenance: std::collections::BTreeMap<String, Provenance>,
}

/// Echo of everything needed to rerun a command exactly.
pub fn write_manifest(dir: &Path, command: &str, config: &RunConfig, user_keys: &BTreeSet<String>) -> Result<()> {
    let manifest = Manifest {
        tool: "dsspan",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: config.protocol.seed,
        config,
        provenance: config.provenance(user_keys),
    };
    write_json(&dir.join(format!("manifest-{command}.json")), &manifest)
}

fn prepare(config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::config("output_dir", e.to_string()))?;
    Ok(config.output_dir.clone())
}

/// Mines the whole dataset and tops up coverage; writes `mining.json`.
pub fn cmd_mine(config: &RunConfig, user_keys: &BTreeSet<String>) -> Result<MiningResult> {
    let dir = prepare(config)?;
    let dataset = load_dataset(config)?;
    let mined = with_pool(config.jobs, || miner::mine(&dataset, &config.miner))??;
    let mined = miner::complete_coverage(&dataset, mined, &config.miner);
    write_json(&dir.join("mining.json"), &mined)?;
    write_manifest(&dir, "mine", config, user_keys)?;
    Ok(mined)
}

#[derive(Serialize)]
struct SelectedRow {
    code: String,
    ig: f64,
    we: f64,
    support: usize,
    filler: bool,
}

#[derive(Serialize)]
struct SelectionFile<'a> {
    dataset: &'a str,
    graph_count: usize,
    selected: Vec<SelectedRow>,
    covered: usize,
    coverage_fraction: f64,
    constraint_met: bool,
}

/// Scores and selects from a mining file, writing `selection.json`, the
/// incidence matrix `features.csv` and, from a model trained on every
/// graph, `embeddings.csv`.
pub fn cmd_select(config: &RunConfig, mining: &Path, user_keys: &BTreeSet<String>) -> Result<SelectionResult> {
    let dir = prepare(config)?;
    let dataset = load_dataset(config)?;
    let text = fs::read_to_string(mining).map_err(|_| Error::MissingFile(mining.to_path_buf()))?;
    let mined: MiningResult = serde_json::from_str(&text).map_err(json_error)?;
    let scored = selector::score_all(&mined, &dataset.labels)?;
    let selection = selector::select(&scored, &config.selector, dataset.len());

    let file = SelectionFile {
        dataset: &dataset.name,
        graph_count: dataset.len(),
        selected: selection
            .selected
            .iter()
            .map(|s| SelectedRow {
                code: s.pattern.code.to_string(),
                ig: s.ig,
                we: s.we,
                support: s.pattern.support,
                filler: s.pattern.filler,
            })
            .collect(),
        covered: selection.covered.len(),
        coverage_fraction: selection.coverage_fraction,
        constraint_met: selection.constraint_met,
    };
    write_json(&dir.join("selection.json"), &file)?;

    let codes = selection.codes();
    let features = model::build_features(&dataset.graphs, &codes);
    let mut net = EmbedModel::new(
        codes.len(),
        dataset.class_count,
        &config.model,
        &mut ChaCha8Rng::seed_from_u64(config.protocol.seed),
    );
    net.train(&features.rows, &dataset.labels, config.protocol.seed)?;
    let hidden: Vec<Vec<f64>> = features.rows.iter().map(|x| net.hidden(x)).collect();
    write_matrix(&dir.join("features.csv"), &dataset, "f", &features.rows)?;
    write_matrix(&dir.join("embeddings.csv"), &dataset, "e", &hidden)?;
    write_manifest(&dir, "select", config, user_keys)?;
    Ok(selection)
}

fn write_matrix(path: &Path, dataset: &GraphDataset, prefix: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    let width = rows.first().map_or(0, Vec::len);
    let mut header = vec!["graph".to_string(), "label".to_string()];
    header.extend((0..width).map(|k| format!("{prefix}{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for (i, row) in rows.iter().enumerate() {
        let mut record = vec![(dataset.origin[i] + 1).to_string(), dataset.label_tables.class[dataset.labels[i]].to_string()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FoldRow {
    dataset: String,
    repetition: usize,
    fold: usize,
    accuracy: f64,
    n_features: usize,
    n_candidates: usize,
    n_fillers: usize,
    zero_test_rows: usize,
    constraint_met: bool,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    dataset: &'a str,
    mean_acc: f64,
    std: f64,
    avg_features: f64,
    avg_mine_seconds: f64,
}

#[derive(Serialize)]
struct Timing {
    repetition: usize,
    fold: usize,
    mine_seconds: f64,
    select_seconds: f64,
    embed_seconds: f64,
}

/// Repeated cross-validation. `report.json` holds only deterministic
/// fields; wall-clock figures go to `timings.json` and `summary.csv`.
pub fn cmd_evaluate(config: &RunConfig, user_keys: &BTreeSet<String>) -> Result<EvalReport> {
    evaluate_mode(config, user_keys, MiningMode::Capped)
}

fn evaluate_mode(config: &RunConfig, user_keys: &BTreeSet<String>, mode: MiningMode) -> Result<EvalReport> {
    let dir = prepare(config)?;
    let dataset = load_dataset(config)?;
    let eval = config.eval_config(mode);
    let report = with_pool(config.jobs, || cv::cross_validate(&dataset, &eval))??;

    let fold_dir = dir.join("folds");
    fs::create_dir_all(&fold_dir)?;
    for f in &report.folds {
        write_json(&fold_dir.join(format!("rep{:02}-fold{:02}.json", f.repetition, f.fold)), f)?;
    }
    write_json(&dir.join("report.json"), &report)?;
    let timings: Vec<Timing> = report
        .folds
        .iter()
        .map(|f| Timing {
            repetition: f.repetition,
            fold: f.fold,
            mine_seconds: f.timings.mine_seconds,
            select_seconds: f.timings.select_seconds,
            embed_seconds: f.timings.embed_seconds,
        })
        .collect();
    write_json(&dir.join("timings.json"), &timings)?;

    let mut w = csv::Writer::from_path(dir.join("folds.csv")).map_err(csv_error)?;
    for f in &report.folds {
        w.serialize(FoldRow {
            dataset: report.dataset.clone(),
            repetition: f.repetition,
            fold: f.fold,
            accuracy: f.accuracy,
            n_features: f.n_features,
            n_candidates: f.n_candidates,
            n_fillers: f.n_fillers,
            zero_test_rows: f.zero_test_rows,
            constraint_met: f.constraint_met,
        })
        .map_err(csv_error)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(csv_error)?;
    w.serialize(SummaryRow {
        dataset: &report.dataset,
        mean_acc: report.mean_accuracy,
        std: report.std_accuracy,
        avg_features: report.avg_features,
        avg_mine_seconds: report.avg_mine_seconds(),
    })
    .map_err(csv_error)?;
    w.flush()?;
    write_manifest(&dir, "evaluate", config, user_keys)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub mode: String,
    pub avg_mine_seconds: f64,
    pub avg_feature_count: f64,
    pub mean_acc: f64,
    pub std: f64,
}

/// Capped and uncapped evaluation of every config; rows go to
/// `<out>/bench.csv`, with each run's artifacts under `<out>/<dataset>-<mode>`.
pub fn cmd_bench(configs: &[(RunConfig, BTreeSet<String>)], out: &Path) -> Result<Vec<BenchRow>> {
    fs::create_dir_all(out).map_err(|e| Error::config("output_dir", e.to_string()))?;
    let mut rows = Vec::new();
    for (config, keys) in configs {
        for (mode, tag) in [(MiningMode::Capped, "capped"), (MiningMode::Baseline, "baseline")] {
            let mut run = config.clone();
            run.output_dir = out.join(format!("{}-{tag}", config.dataset.name));
            let report = evaluate_mode(&run, keys, mode)?;
            rows.push(BenchRow {
                dataset: report.dataset.clone(),
                mode: tag.to_string(),
                avg_mine_seconds: report.avg_mine_seconds(),
                avg_feature_count: report.avg_features,
                mean_acc: report.mean_accuracy,
                std: report.std_accuracy,
            });
        }
    }
    let mut w = csv::Writer::from_path(out.join("bench.csv")).map_err(csv_error)?;
    for r in &rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Effective config as TOML, each line annotated with its provenance.
pub fn print_config(config: &RunConfig, user_keys: &BTreeSet<String>) -> String {
    let tags = config.provenance(user_keys);
    let mut section = String::new();
    let mut out = String::new();
    let mut lines: Vec<String> = config.to_toml().lines().map(str::to_string).collect();
    for (key, slot) in [("miner.gamma", "miner"), ("miner.max_edges", "miner"), ("selector.budget", "selector"), ("jobs", "")] {
        let present = lines.iter().any(|l| l.starts_with(&format!("{} =", key.rsplit('.').next().unwrap())));
        if !present || slot.is_empty() {
            let name = key.rsplit('.').next().unwrap();
            let comment = format!("# {name} unset");
            let at = if slot.is_empty() {
                Some(0)
            } else {
                lines.iter().position(|l| l == &format!("[{slot}]")).map(|p| p + 1)
            };
            if let Some(at) = at {
                if !lines.iter().any(|l| l.starts_with(&format!("{name} ="))) {
                    lines.insert(at, comment);
                }
            }
        }
    }
    for line in lines {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.to_string();
            out.push_str(&line);
            out.push('\n');
            continue;
        }
        let name = line
            .strip_prefix("# ")
            .and_then(|l| l.strip_suffix(" unset"))
            .or_else(|| line.split(" = ").next().filter(|_| line.contains(" = ")));
        match name {
            Some(n) => {
                let key = if section.is_empty() { n.to_string() } else { format!("{section}.{n}") };
                let tag = tags.get(&key).map_or("default", |t| match t {
                    Provenance::Paper => "paper",
                    Provenance::Default => "default",
                    Provenance::User => "user",
                });
                out.push_str(&format!("{line:<40} # {tag}\n"));
            }
            None => {
                out.push_str(&line);
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub name: String,
    pub graphs: usize,
    pub class_counts: Vec<(i64, usize)>,
    pub vertex_labels: usize,
    pub edge_labels: usize,
    pub vertices: usize,
    pub edges: usize,
    pub edgeless_graphs: usize,
    pub problems: Vec<String>,
}

pub fn validate_dataset(config: &RunConfig) -> Result<DatasetSummary> {
    let ds = load_dataset(config)?;
    let counts = ds.class_counts();
    Ok(DatasetSummary {
        name: ds.name.clone(),
        graphs: ds.len(),
        class_counts: ds.label_tables.class.iter().copied().zip(counts).collect(),
        vertex_labels: ds.label_tables.vertex.len(),
        edge_labels: ds.label_tables.edge.len(),
        vertices: ds.graphs.iter().map(|g| g.vertex_count()).sum(),
        edges: ds.graphs.iter().map(|g| g.edge_count()).sum(),
        edgeless_graphs: ds.graphs.iter().filter(|g| g.edge_count() == 0).count(),
        problems: ds.validate(),
    })
}
