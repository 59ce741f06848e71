//! Single-pass frequent-subgraph mining with coverage-capped eligibility.
//!
//! The search is a plain gSpan DFS over canonical codes, seeded by all
//! single-edge codes. Every accepted pattern bumps the coverage counter of
//! each graph containing it; once a graph's coverage reaches
//! `gamma * min_cov` it stops contributing extension edges for the rest of
//! the run. Support is always counted over the whole dataset.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dfs::{self, DfsCode, ExtendStats, PatternRecord, DEFAULT_AUTOMORPHISM_CAP};
use crate::error::{Error, Result};
use crate::graph::GraphDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinerConfig {
    /// Relative support threshold in (0, 1].
    pub delta: f64,
    pub min_cov: usize,
    /// Cap multiplier; `None` disables the eligibility cap (plain gSpan).
    pub gamma: Option<f64>,
    pub max_edges: Option<usize>,
    pub automorphism_cap: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            delta: 0.05,
            min_cov: 20,
            gamma: Some(4.0),
            max_edges: None,
            automorphism_cap: DEFAULT_AUTOMORPHISM_CAP,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::config("miner.delta", format!("{} not in (0, 1]", self.delta)));
        }
        if self.min_cov == 0 {
            return Err(Error::config("miner.min_cov", "must be at least 1"));
        }
        if let Some(g) = self.gamma {
            if !(g >= 1.0 && g.is_finite()) {
                return Err(Error::config("miner.gamma", format!("{g} is not a finite value >= 1")));
            }
        }
        if self.max_edges == Some(0) {
            return Err(Error::config("miner.max_edges", "must be at least 1"));
        }
        if self.automorphism_cap == 0 {
            return Err(Error::config("miner.automorphism_cap", "must be at least 1"));
        }
        Ok(())
    }

    /// `ceil(delta * n)` computed exactly on the binary value of `delta`,
    /// never below 1.
    pub fn min_support(&self, n: usize) -> usize {
        exact_ceil(self.delta, n).max(1)
    }

    /// Coverage at which a graph leaves the eligible set.
    pub fn cap(&self) -> Option<f64> {
        self.gamma.map(|g| g * self.min_cov as f64)
    }

    pub fn baseline(&self) -> MinerConfig {
        MinerConfig {
            gamma: None,
            ..self.clone()
        }
    }

    /// A `delta` whose exact threshold on `n` graphs is `support`.
    pub fn delta_for_support(support: usize, n: usize) -> f64 {
        let mut d = support as f64 / n as f64;
        while exact_ceil(d, n) > support {
            d = d.next_down();
        }
        while exact_ceil(d, n) < support {
            d = d.next_up();
        }
        d
    }
}

fn exact_ceil(x: f64, n: usize) -> usize {
    if x <= 0.0 || n == 0 {
        return 0;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    // x = mantissa * 2^exp
    let (mantissa, exp) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let num = mantissa as u128 * n as u128;
    if exp >= 0 {
        return (num << exp) as usize;
    }
    let shift = (-exp) as u32;
    if shift >= 128 {
        return usize::from(num > 0);
    }
    ((num + (1u128 << shift) - 1) >> shift) as usize
}

/// Per-graph coverage and the eligibility mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageState {
    pub cov: Vec<usize>,
    eligible: Vec<bool>,
    cap: Option<f64>,
}

impl CoverageState {
    pub fn new(n: usize, cap: Option<f64>) -> Self {
        CoverageState {
            cov: vec![0; n],
            eligible: vec![true; n],
            cap,
        }
    }

    pub fn eligible(&self) -> &[bool] {
        &self.eligible
    }

    pub fn eligible_count(&self) -> usize {
        self.eligible.iter().filter(|&&e| e).count()
    }

    /// Counts one accepted pattern in each graph of `graphs`; returns the
    /// graphs that just reached the cap.
    pub fn record(&mut self, graphs: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut dropped = Vec::new();
        for i in graphs {
            self.cov[i] += 1;
            if let Some(cap) = self.cap {
                if self.eligible[i] && self.cov[i] as f64 >= cap {
                    self.eligible[i] = false;
                    dropped.push(i);
                }
            }
        }
        dropped
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinedPattern {
    pub code: DfsCode,
    pub support: usize,
    /// Ids of the graphs containing the pattern, ascending.
    pub graphs: Vec<usize>,
    pub filler: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MiningStats {
    pub extensions_generated: u64,
    pub canonical_tests: u64,
    pub patterns_accepted: u64,
    pub fillers_added: u64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncoverableReason {
    /// The graph has no edges, so no pattern can occur in it.
    Edgeless,
    /// Every pattern of the graph (within `max_edges`) is already counted.
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uncoverable {
    pub graph: usize,
    pub coverage: usize,
    pub reason: UncoverableReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningResult {
    pub config: MinerConfig,
    pub mode: MiningMode,
    pub graph_count: usize,
    pub min_support: usize,
    pub candidates: Vec<MinedPattern>,
    pub coverage: Vec<usize>,
    /// For each graph, the number of candidates accepted when it left the
    /// eligible set, if it ever did.
    pub left_eligible_at: Vec<Option<usize>>,
    pub uncoverable: Vec<Uncoverable>,
    pub stats: MiningStats,
}

impl MiningResult {
    pub fn filler_flags(&self) -> Vec<bool> {
        self.candidates.iter().map(|c| c.filler).collect()
    }

    pub fn mined(&self) -> impl Iterator<Item = &MinedPattern> {
        self.candidates.iter().filter(|c| !c.filler)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiningMode {
    Capped,
    Baseline,
}

struct Miner<'a> {
    dataset: &'a GraphDataset,
    config: &'a MinerConfig,
    threshold: usize,
    state: CoverageState,
    candidates: Vec<MinedPattern>,
    left_eligible_at: Vec<Option<usize>>,
    stats: MiningStats,
}

impl Miner<'_> {
    fn visit(&mut self, record: PatternRecord) {
        if record.support() < self.threshold {
            return;
        }
        let graphs = record.occurrence_graphs();
        self.candidates.push(MinedPattern {
            code: record.code.clone(),
            support: graphs.len(),
            graphs: graphs.clone(),
            filler: false,
        });
        self.stats.patterns_accepted += 1;
        let accepted = self.candidates.len();
        for i in self.state.record(graphs) {
            self.left_eligible_at[i] = Some(accepted);
        }

        if self.config.max_edges.is_some_and(|m| record.code.len() >= m) {
            return;
        }
        if !record.occurs_in_any(self.state.eligible()) {
            return;
        }
        let mut ext = ExtendStats::default();
        let mut tests = 0u64;
        let children = dfs::extend_filtered(
            &record,
            self.state.eligible(),
            &self.dataset.graphs,
            self.config.automorphism_cap,
            |code| {
                tests += 1;
                dfs::is_canonical(code)
            },
            &mut ext,
        );
        self.stats.extensions_generated += ext.extensions_generated;
        self.stats.canonical_tests += tests;
        let parent_support = record.support();
        drop(record);
        for child in children {
            assert!(child.support() <= parent_support, "support grew along an extension");
            self.visit(child);
        }
    }
}

fn run(dataset: &GraphDataset, config: &MinerConfig, mode: MiningMode) -> Result<MiningResult> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let start = Instant::now();
    let n = dataset.len();
    let cap = match mode {
        MiningMode::Capped => config.cap(),
        MiningMode::Baseline => None,
    };
    let mut miner = Miner {
        dataset,
        config,
        threshold: config.min_support(n),
        state: CoverageState::new(n, cap),
        candidates: Vec::new(),
        left_eligible_at: vec![None; n],
        stats: MiningStats::default(),
    };
    let seeds = dfs::enumerate_single_edges(dataset, &vec![true; n], config.automorphism_cap);
    miner.stats.extensions_generated += seeds.len() as u64;
    miner.stats.canonical_tests += seeds.len() as u64;
    for seed in seeds {
        miner.visit(seed);
    }
    miner.stats.wall_seconds = start.elapsed().as_secs_f64();
    Ok(MiningResult {
        config: config.clone(),
        mode,
        graph_count: n,
        min_support: miner.threshold,
        coverage: miner.state.cov,
        candidates: miner.candidates,
        left_eligible_at: miner.left_eligible_at,
        uncoverable: Vec::new(),
        stats: miner.stats,
    })
}

/// Mines with the coverage cap `gamma * min_cov` (disabled when `gamma` is
/// `None`).
pub fn mine(dataset: &GraphDataset, config: &MinerConfig) -> Result<MiningResult> {
    let mode = if config.gamma.is_some() {
        MiningMode::Capped
    } else {
        MiningMode::Baseline
    };
    run(dataset, config, mode)
}

/// Plain gSpan: every graph stays eligible for the whole run.
pub fn mine_baseline(dataset: &GraphDataset, config: &MinerConfig) -> Result<MiningResult> {
    run(dataset, config, MiningMode::Baseline)
}

/// Tops up graphs left below `min_cov` with their own smallest canonical
/// patterns (by edge count, then code order), skipping codes already
/// present. Fillers bypass the support threshold and are counted in every
/// graph that contains them.
pub fn complete_coverage(dataset: &GraphDataset, result: MiningResult, config: &MinerConfig) -> MiningResult {
    let start = Instant::now();
    let mut result = result;
    let mut known: HashSet<DfsCode> = result.candidates.iter().map(|c| c.code.clone()).collect();
    let cap = config.automorphism_cap;
    result.uncoverable.clear();

    for i in 0..dataset.len() {
        if result.coverage[i] >= config.min_cov {
            continue;
        }
        if dataset.graphs[i].edge_count() == 0 {
            result.uncoverable.push(Uncoverable {
                graph: i,
                coverage: result.coverage[i],
                reason: UncoverableReason::Edgeless,
            });
            continue;
        }
        let single = dataset.subset(&[i]);
        let mut level = dfs::enumerate_single_edges(&single, &[true], cap);
        let mut size = 1;
        'levels: while !level.is_empty() {
            for rec in &level {
                if result.coverage[i] >= config.min_cov {
                    break 'levels;
                }
                if known.contains(&rec.code) {
                    continue;
                }
                let graphs: Vec<usize> = dataset
                    .graphs
                    .iter()
                    .enumerate()
                    .filter(|(j, g)| *j == i || dfs::contains(g, &rec.code))
                    .map(|(j, _)| j)
                    .collect();
                for &j in &graphs {
                    result.coverage[j] += 1;
                }
                known.insert(rec.code.clone());
                result.candidates.push(MinedPattern {
                    code: rec.code.clone(),
                    support: graphs.len(),
                    graphs,
                    filler: true,
                });
                result.stats.fillers_added += 1;
            }
            if result.coverage[i] >= config.min_cov || config.max_edges.is_some_and(|m| size >= m) {
                break;
            }
            let mut next = Vec::new();
            let mut ext = ExtendStats::default();
            for rec in &level {
                next.extend(dfs::extend_filtered(rec, &[true], &single.graphs, cap, dfs::is_canonical, &mut ext));
            }
            next.sort_by(|a, b| a.code.cmp(&b.code));
            level = next;
            size += 1;
        }
        if result.coverage[i] < config.min_cov {
            result.uncoverable.push(Uncoverable {
                graph: i,
                coverage: result.coverage[i],
                reason: UncoverableReason::Exhausted,
            });
        }
    }
    result.stats.wall_seconds += start.elapsed().as_secs_f64();
    result
}
