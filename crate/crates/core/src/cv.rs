//! Repeated stratified k-fold evaluation of the full pipeline.
//!
//! Each fold mines, completes coverage, scores and selects on its training
//! graphs alone, then trains the embedding model on the training rows and
//! scores test accuracy. Test graphs only ever meet the finished feature
//! list and the trained model.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphDataset;
use crate::miner::{self, MinerConfig, MiningMode};
use crate::model::{self, EmbedModel, ModelConfig};
use crate::selector::{self, SelectorConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub repetitions: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            repetitions: 10,
            folds: 10,
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("protocol.repetitions", "must be at least 1"));
        }
        if self.folds < 2 {
            return Err(Error::config("protocol.folds", "must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub miner: MinerConfig,
    pub selector: SelectorConfig,
    pub model: ModelConfig,
    pub protocol: ProtocolConfig,
    pub mode: MiningMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            miner: MinerConfig::default(),
            selector: SelectorConfig::default(),
            model: ModelConfig::default(),
            protocol: ProtocolConfig::default(),
            mode: MiningMode::Capped,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        self.miner.validate()?;
        self.selector.validate()?;
        self.model.validate()?;
        self.protocol.validate()
    }
}

/// Fold index for every graph. Each class is shuffled and dealt round-robin,
/// continuing where the previous class stopped so fold sizes differ by at
/// most one.
pub fn stratified_folds(labels: &[usize], folds: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        members[y].push(i);
    }
    for (class, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < folds {
            return Err(Error::TooFewMembers {
                class,
                members: m.len(),
                folds,
            });
        }
    }
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for m in &mut members {
        m.shuffle(rng);
        for &i in m.iter() {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FoldTimings {
    pub mine_seconds: f64,
    pub select_seconds: f64,
    pub embed_seconds: f64,
}

/// Dataset ids (before any renumbering) seen by each pipeline stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FoldViews {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub miner: Vec<usize>,
    pub selector_labels: Vec<usize>,
    pub training_rows: Vec<usize>,
}

impl FoldViews {
    /// True iff no test id reaches mining, selection or training.
    pub fn is_clean(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        seen.extend(self.test.iter().copied());
        [&self.train, &self.miner, &self.selector_labels, &self.training_rows]
            .iter()
            .all(|v| v.iter().all(|i| !seen.contains(i)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repetition: usize,
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub accuracy: f64,
    pub n_candidates: usize,
    pub n_fillers: usize,
    pub n_features: usize,
    pub coverage_fraction: f64,
    pub constraint_met: bool,
    pub uncoverable: usize,
    pub zero_test_rows: usize,
    pub loss_trace: Vec<f64>,
    pub extensions_generated: u64,
    #[serde(skip)]
    pub timings: FoldTimings,
    #[serde(skip)]
    pub views: FoldViews,
}

/// Aggregated results. Wall-clock timings and stage views are kept in
/// memory only, so the serialized report is a pure function of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub graph_count: usize,
    pub config: EvalConfig,
    pub folds: Vec<FoldRecord>,
    pub mean_accuracy: f64,
    /// Population standard deviation over all repetition x fold cells.
    pub std_accuracy: f64,
    pub avg_features: f64,
    pub avg_candidates: f64,
    pub zero_test_rows: usize,
}

impl EvalReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }

    pub fn avg_mine_seconds(&self) -> f64 {
        mean(&self.folds.iter().map(|f| f.timings.mine_seconds).collect::<Vec<_>>())
    }

    pub fn avg_select_seconds(&self) -> f64 {
        mean(&self.folds.iter().map(|f| f.timings.select_seconds).collect::<Vec<_>>())
    }

    pub fn avg_embed_seconds(&self) -> f64 {
        mean(&self.folds.iter().map(|f| f.timings.embed_seconds).collect::<Vec<_>>())
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over the combined inputs
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs one fold: `train` and `test` are ids into `dataset`.
pub fn run_fold(
    dataset: &GraphDataset,
    config: &EvalConfig,
    repetition: usize,
    fold: usize,
    train: &[usize],
    test: &[usize],
) -> Result<FoldRecord> {
    let train_view = dataset.subset(train);
    let test_view = dataset.subset(test);

    let start = Instant::now();
    let mined = match config.mode {
        MiningMode::Capped => miner::mine(&train_view, &config.miner)?,
        MiningMode::Baseline => miner::mine_baseline(&train_view, &config.miner)?,
    };
    let mined = miner::complete_coverage(&train_view, mined, &config.miner);
    let mine_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let scored = selector::score_all(&mined, &train_view.labels)?;
    let selection = selector::select(&scored, &config.selector, train_view.len());
    let codes = selection.codes();
    let select_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let x_train = model::build_features(&train_view.graphs, &codes);
    let x_test = model::build_features(&test_view.graphs, &codes);
    let seed = mix(config.protocol.seed, repetition as u64 + 1, fold as u64 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = EmbedModel::new(codes.len(), dataset.class_count, &config.model, &mut rng);
    let loss_trace = net.train(&x_train.rows, &train_view.labels, seed)?;
    let correct = x_test
        .rows
        .iter()
        .zip(&test_view.labels)
        .filter(|(x, &y)| net.predict(x) == y)
        .count();
    let embed_seconds = start.elapsed().as_secs_f64();

    let views = FoldViews {
        train: train.iter().map(|&i| dataset.origin[i]).collect(),
        test: test_view.origin.clone(),
        miner: train_view.origin.clone(),
        selector_labels: train_view.origin.clone(),
        training_rows: train_view.origin.clone(),
    };
    assert!(views.is_clean(), "test graph leaked into fold {repetition}/{fold}");

    Ok(FoldRecord {
        repetition,
        fold,
        train_size: train.len(),
        test_size: test.len(),
        accuracy: if test.is_empty() { 0.0 } else { correct as f64 / test.len() as f64 },
        n_candidates: mined.candidates.len(),
        n_fillers: mined.candidates.iter().filter(|c| c.filler).count(),
        n_features: codes.len(),
        coverage_fraction: selection.coverage_fraction,
        constraint_met: selection.constraint_met,
        uncoverable: mined.uncoverable.len(),
        zero_test_rows: x_test.zero_rows(),
        loss_trace,
        extensions_generated: mined.stats.extensions_generated,
        timings: FoldTimings {
            mine_seconds,
            select_seconds,
            embed_seconds,
        },
        views,
    })
}

/// `(repetition, fold, train ids, test ids)`.
pub type FoldCell = (usize, usize, Vec<usize>, Vec<usize>);

/// Train/test id lists for every (repetition, fold) cell, in order.
pub fn fold_plan(dataset: &GraphDataset, protocol: &ProtocolConfig) -> Result<Vec<FoldCell>> {
    let mut plan = Vec::new();
    for rep in 0..protocol.repetitions {
        let mut rng = ChaCha8Rng::seed_from_u64(protocol.seed);
        rng.set_stream(rep as u64);
        let assignment = stratified_folds(&dataset.labels, protocol.folds, &mut rng)?;
        for fold in 0..protocol.folds {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| assignment[i] == fold);
            plan.push((rep, fold, train, test));
        }
    }
    Ok(plan)
}

/// Repeated stratified cross-validation; cells run in parallel on the
/// current rayon pool and are reported in (repetition, fold) order.
pub fn cross_validate(dataset: &GraphDataset, config: &EvalConfig) -> Result<EvalReport> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let plan = fold_plan(dataset, &config.protocol)?;
    let folds = plan
        .par_iter()
        .map(|(rep, fold, train, test)| run_fold(dataset, config, *rep, *fold, train, test))
        .collect::<Result<Vec<_>>>()?;

    let acc: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let features: Vec<f64> = folds.iter().map(|f| f.n_features as f64).collect();
    let candidates: Vec<f64> = folds.iter().map(|f| f.n_candidates as f64).collect();
    Ok(EvalReport {
        dataset: dataset.name.clone(),
        graph_count: dataset.len(),
        config: config.clone(),
        mean_accuracy: mean(&acc),
        std_accuracy: std_dev(&acc),
        avg_features: mean(&features),
        avg_candidates: mean(&candidates),
        zero_test_rows: folds.iter().map(|f| f.zero_test_rows).sum(),
        folds,
    })
}
