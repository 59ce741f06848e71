use std::cmp::Ordering;

use dsspan_core::dfs::{compare_codes, contains, embeddings, is_canonical, DfsCode};
use dsspan_core::oracle::{self, CorpusSpec};
use proptest::prelude::*;

fn small_spec() -> CorpusSpec {
    CorpusSpec {
        graphs: 3..=4,
        vertices: 2..=5,
        vertex_labels: 1..=3,
        edge_labels: 1..=2,
        extra_edge_p: 0.3,
        classes: 2,
    }
}

#[test]
fn exactly_the_minimum_traversal_is_canonical() {
    for seed in 0..40 {
        let ds = oracle::random_corpus(seed, &small_spec());
        for g in &ds.graphs {
            if g.edge_count() > 6 {
                continue;
            }
            let codes = oracle::all_dfs_codes(g).unwrap();
            let min = oracle::brute_min_code(g).unwrap();
            let mut canonical = 0;
            for code in &codes {
                assert!(code.is_valid(), "{code}");
                let expected = *code == min;
                assert_eq!(is_canonical(code), expected, "seed {seed}: {code} vs min {min}");
                canonical += usize::from(expected);
            }
            assert!(canonical >= 1, "seed {seed}: minimum traversal missing");
        }
    }
}

#[test]
fn code_order_agrees_with_independent_key() {
    for seed in 0..15 {
        let ds = oracle::random_corpus(seed, &small_spec());
        let mut codes: Vec<DfsCode> = Vec::new();
        for g in &ds.graphs {
            if g.edge_count() <= 5 {
                codes.extend(oracle::all_dfs_codes(g).unwrap().into_iter().take(30));
            }
        }
        for a in &codes {
            for b in &codes {
                assert_eq!(compare_codes(a, b), oracle::brute_code_cmp(a, b), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn matcher_agrees_with_exhaustive_search() {
    for seed in 0..25 {
        let ds = oracle::random_corpus(seed, &CorpusSpec { vertices: 4..=7, ..small_spec() });
        let patterns = oracle::random_corpus(seed + 1000, &small_spec());
        for pg in &patterns.graphs {
            if pg.edge_count() == 0 || pg.edge_count() > 5 {
                continue;
            }
            let code = oracle::brute_min_code(pg).unwrap();
            for g in &ds.graphs {
                let fast = contains(g, &code);
                assert_eq!(fast, oracle::brute_contains(g, pg).unwrap(), "seed {seed}: {code}");
                for m in embeddings(g, &code, 64) {
                    for e in code.edges() {
                        let (u, v) = (m[e.u] as usize, m[e.v] as usize);
                        assert_eq!(g.edge_label(u, v), Some(e.e_label));
                        assert_eq!(g.vertex_label(u), e.u_label);
                        assert_eq!(g.vertex_label(v), e.v_label);
                    }
                }
            }
        }
    }
}

#[test]
fn every_graph_contains_its_own_minimum_code() {
    for seed in 0..20 {
        let ds = oracle::random_corpus(seed, &small_spec());
        for g in &ds.graphs {
            if g.edge_count() > 6 {
                continue;
            }
            let code = oracle::brute_min_code(g).unwrap();
            assert!(contains(g, &code));
            let back = code.to_graph(0);
            assert_eq!(oracle::canonical_form(&back, 8).unwrap(), oracle::canonical_form(g, 8).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn code_order_is_total(seed in 0u64..10_000) {
        let ds = oracle::random_corpus(seed, &small_spec());
        let codes: Vec<DfsCode> = ds.graphs.iter()
            .filter(|g| g.edge_count() <= 5)
            .flat_map(|g| oracle::all_dfs_codes(g).unwrap().into_iter().take(6))
            .collect();
        for a in &codes {
            prop_assert_eq!(compare_codes(a, a), Ordering::Equal);
            for b in &codes {
                prop_assert_eq!(compare_codes(a, b), compare_codes(b, a).reverse());
                for c in &codes {
                    if compare_codes(a, b) != Ordering::Greater && compare_codes(b, c) != Ordering::Greater {
                        prop_assert_ne!(compare_codes(a, c), Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn text_form_round_trips(seed in 0u64..10_000) {
        let ds = oracle::random_corpus(seed, &small_spec());
        for g in ds.graphs.iter().filter(|g| g.edge_count() <= 6) {
            let code = oracle::brute_min_code(g).unwrap();
            let parsed: DfsCode = code.to_string().parse().unwrap();
            prop_assert_eq!(parsed, code);
        }
    }
}
