use std::collections::BTreeSet;

use dsspan_core::dfs::contains;
use dsspan_core::miner::{complete_coverage, mine, mine_baseline, MinerConfig, UncoverableReason};
use dsspan_core::oracle::{self, CorpusSpec};
use dsspan_core::{Edge, GraphDataset, LabeledGraph};

fn config(support: usize, n: usize, max_edges: usize) -> MinerConfig {
    MinerConfig {
        delta: MinerConfig::delta_for_support(support, n),
        max_edges: Some(max_edges),
        ..MinerConfig::default()
    }
}

#[test]
fn baseline_matches_brute_force_frequent_sets() {
    for seed in 100..106 {
        let ds = oracle::random_corpus(seed, &CorpusSpec::default());
        let n = ds.len();
        for support in [1, 2, n.div_ceil(2)] {
            let cfg = config(support, n, 3);
            let mined = mine_baseline(&ds, &cfg).unwrap();
            assert_eq!(mined.min_support, support);
            let got: BTreeSet<_> = mined.candidates.iter().map(|c| oracle::code_form(&c.code, 8).unwrap()).collect();
            assert_eq!(got.len(), mined.candidates.len(), "seed {seed}: duplicate pattern");
            let want = oracle::brute_frequent(&ds, support, 3).unwrap();
            assert_eq!(got, want, "seed {seed}, support {support}");
        }
    }
}

#[test]
fn accepted_patterns_recount_above_threshold() {
    for seed in 200..210 {
        let ds = oracle::random_corpus(seed, &CorpusSpec::default());
        let cfg = MinerConfig {
            delta: 0.3,
            min_cov: 2,
            gamma: Some(1.0),
            ..MinerConfig::default()
        };
        let mined = mine(&ds, &cfg).unwrap();
        for c in &mined.candidates {
            let graphs: Vec<usize> = (0..ds.len()).filter(|&i| contains(&ds.graphs[i], &c.code)).collect();
            assert_eq!(graphs, c.graphs, "seed {seed}: {}", c.code);
            assert!(graphs.len() >= mined.min_support);
        }
    }
}

#[test]
fn capped_codes_are_a_subset_of_baseline() {
    for seed in 300..306 {
        let ds = oracle::random_corpus(seed, &CorpusSpec::default());
        let base_cfg = config(2, ds.len(), 4);
        let base = mine_baseline(&ds, &base_cfg).unwrap();
        let all: BTreeSet<_> = base.candidates.iter().map(|c| c.code.clone()).collect();
        for gamma in [1.0, 2.0, 4.0] {
            for min_cov in [1, 3] {
                let cfg = MinerConfig {
                    gamma: Some(gamma),
                    min_cov,
                    ..base_cfg.clone()
                };
                let capped = mine(&ds, &cfg).unwrap();
                for c in &capped.candidates {
                    assert!(all.contains(&c.code), "seed {seed}: {} missing from baseline", c.code);
                }
                assert!(capped.stats.extensions_generated <= base.stats.extensions_generated);
                let cap = gamma * min_cov as f64;
                for (i, left) in capped.left_eligible_at.iter().enumerate() {
                    if let Some(k) = left {
                        let before = capped.candidates[..*k].iter().filter(|c| c.graphs.contains(&i)).count();
                        assert!(before as f64 >= cap);
                    }
                }
            }
        }
    }
}

#[test]
fn mining_is_deterministic() {
    let ds = oracle::random_corpus(7, &CorpusSpec::default());
    let cfg = config(2, ds.len(), 5);
    let a = serde_json::to_string(&mine(&ds, &cfg).unwrap().candidates).unwrap();
    let b = serde_json::to_string(&mine(&ds, &cfg).unwrap().candidates).unwrap();
    assert_eq!(a, b);
}

#[test]
fn completion_reaches_min_cov_or_reports() {
    for seed in 400..410 {
        let mut ds = oracle::random_corpus(seed, &CorpusSpec::default());
        ds.graphs.push(LabeledGraph::new(ds.len(), vec![0], vec![]));
        ds.graphs.push(LabeledGraph::new(ds.len() + 1, vec![0, 5], vec![Edge { u: 0, v: 1, label: 9 }]));
        ds.labels.extend([0, 1]);
        let ds = GraphDataset::new("padded", ds.graphs, ds.labels, 2);
        let cfg = MinerConfig {
            delta: 0.5,
            min_cov: 3,
            ..MinerConfig::default()
        };
        let done = complete_coverage(&ds, mine(&ds, &cfg).unwrap(), &cfg);
        let reported: BTreeSet<usize> = done.uncoverable.iter().map(|u| u.graph).collect();
        for (i, g) in ds.graphs.iter().enumerate() {
            let cov = done.candidates.iter().filter(|c| c.graphs.contains(&i)).count();
            assert_eq!(cov, done.coverage[i]);
            if cov < cfg.min_cov {
                assert!(reported.contains(&i), "seed {seed}: graph {i} silently under-covered");
            } else {
                assert!(!reported.contains(&i));
            }
            if g.edge_count() == 0 {
                let u = done.uncoverable.iter().find(|u| u.graph == i).unwrap();
                assert_eq!(u.reason, UncoverableReason::Edgeless);
            }
        }
        // the single-edge outlier has exactly one pattern of its own
        let last = ds.len() - 1;
        assert!(done.candidates.iter().any(|c| c.filler && c.graphs == vec![last]));
    }
}
