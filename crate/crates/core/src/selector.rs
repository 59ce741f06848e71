//! Information-gain scoring and greedy coverage-constrained selection.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfs::DfsCode;
use crate::error::{Error, Result};
use crate::miner::{MinedPattern, MiningResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorConfig {
    /// Maximum number of selected features; unlimited when `None`.
    pub budget: Option<usize>,
    /// Fraction of graphs the selection must cover.
    pub tau: f64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig { budget: None, tau: 1.0 }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::config("selector.tau", format!("{} not in (0, 1]", self.tau)));
        }
        if self.budget == Some(0) {
            return Err(Error::config("selector.budget", "must be at least 1"));
        }
        Ok(())
    }
}

/// Shannon entropy in bits of a class histogram.
pub fn entropy(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyDistribution);
    }
    Ok(entropy_of(counts, total))
}

fn entropy_of(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / t;
            h -= p * p.log2();
        }
    }
    h
}

fn histogram(labels: &[usize]) -> Vec<usize> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0; classes];
    for &y in labels {
        counts[y] += 1;
    }
    counts
}

/// `H(y) - (|I|/N H(y|I) + |~I|/N H(y|~I))` for the graphs in `cover`
/// (ascending ids, each < `labels.len()`). Empty and full covers give
/// exactly 0.
pub fn information_gain(cover: &[usize], labels: &[usize]) -> f64 {
    let n = labels.len();
    if cover.is_empty() || cover.len() >= n {
        return 0.0;
    }
    let all = histogram(labels);
    let mut inside = vec![0; all.len()];
    for &i in cover {
        inside[labels[i]] += 1;
    }
    let outside: Vec<usize> = all.iter().zip(&inside).map(|(a, b)| a - b).collect();
    let n_in = cover.len();
    let n_out = n - n_in;
    let h = entropy_of(&all, n);
    let conditional = n_in as f64 / n as f64 * entropy_of(&inside, n_in) + n_out as f64 / n as f64 * entropy_of(&outside, n_out);
    (h - conditional).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub pattern: MinedPattern,
    pub ig: f64,
    /// Weighted conditional entropy, `H(y) - ig`.
    pub we: f64,
}

/// Scores every candidate (fillers included), preserving order. `labels`
/// must be the labels of exactly the graphs the candidates were mined on.
pub fn score_all(mining: &MiningResult, labels: &[usize]) -> Result<Vec<ScoredCandidate>> {
    score_patterns(&mining.candidates, mining.graph_count, labels)
}

pub fn score_patterns(patterns: &[MinedPattern], graph_count: usize, labels: &[usize]) -> Result<Vec<ScoredCandidate>> {
    if labels.len() != graph_count {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            graphs: graph_count,
        });
    }
    let h = if labels.is_empty() { 0.0 } else { entropy_of(&histogram(labels), labels.len()) };
    Ok(patterns
        .par_iter()
        .map(|p| {
            let ig = information_gain(&p.graphs, labels);
            ScoredCandidate {
                pattern: p.clone(),
                ig,
                we: h - ig,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<ScoredCandidate>,
    /// Union of the selected covers, ascending.
    pub covered: Vec<usize>,
    pub coverage_fraction: f64,
    pub constraint_met: bool,
}

impl SelectionResult {
    pub fn codes(&self) -> Vec<DfsCode> {
        self.selected.iter().map(|s| s.pattern.code.clone()).collect()
    }
}

/// Descending IG; ties by fewer edges, then code order.
fn rank(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.ig
        .total_cmp(&a.ig)
        .then(a.pattern.code.len().cmp(&b.pattern.code.len()))
        .then(a.pattern.code.cmp(&b.pattern.code))
}

/// Scans candidates by descending IG, keeping one only if it covers a graph
/// not yet covered and the budget allows, and stops once `tau * n` graphs
/// are covered.
pub fn select(scored: &[ScoredCandidate], config: &SelectorConfig, n: usize) -> SelectionResult {
    let mut order: Vec<&ScoredCandidate> = scored.iter().collect();
    order.sort_by(|a, b| rank(a, b));

    let target = config.tau * n as f64;
    let mut covered = vec![false; n];
    let mut covered_count = 0usize;
    let mut selected = Vec::new();
    let mut met = n > 0 && covered_count as f64 >= target;
    for cand in order {
        if met {
            break;
        }
        if config.budget.is_some_and(|k| selected.len() >= k) {
            break;
        }
        let gain = cand.pattern.graphs.iter().filter(|&&i| !covered[i]).count();
        if gain == 0 {
            continue;
        }
        for &i in &cand.pattern.graphs {
            covered[i] = true;
        }
        covered_count += gain;
        selected.push(cand.clone());
        met = covered_count as f64 >= target;
    }
    SelectionResult {
        selected,
        covered: (0..n).filter(|&i| covered[i]).collect(),
        coverage_fraction: if n == 0 { 0.0 } else { covered_count as f64 / n as f64 },
        constraint_met: met,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::DfsEdge;

    fn pat(edges: usize, label: u32, graphs: Vec<usize>) -> MinedPattern {
        let mut code = DfsCode::new(vec![DfsEdge::new(0, 1, 0, 0, label)]);
        for k in 1..edges {
            code.push(DfsEdge::new(k, k + 1, 0, 0, label));
        }
        MinedPattern {
            code,
            support: graphs.len(),
            graphs,
            filler: false,
        }
    }

    fn scored(ig: f64, label: u32, graphs: Vec<usize>) -> ScoredCandidate {
        ScoredCandidate {
            pattern: pat(1, label, graphs),
            ig,
            we: 1.0 - ig,
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[2, 2]).unwrap(), 1.0);
        assert_eq!(entropy(&[4, 0]).unwrap(), 0.0);
        assert!((entropy(&[2, 1]).unwrap() - 0.918296).abs() < 1e-6);
        assert!(matches!(entropy(&[0, 0]), Err(Error::EmptyDistribution)));
    }

    #[test]
    fn ig_examples() {
        let labels = [1, 1, 0, 0];
        assert_eq!(information_gain(&[0, 1], &labels), 1.0);
        assert_eq!(information_gain(&[], &labels), 0.0);
        assert_eq!(information_gain(&[0, 1, 2, 3], &labels), 0.0);
        let expected = 1.0 - 0.75 * (-(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 3.0).log2());
        assert!((information_gain(&[0, 1, 2], &labels) - expected).abs() < 1e-12);
        assert!((expected - 0.311278).abs() < 1e-6);
    }

    #[test]
    fn scoring_edge_cases() {
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let patterns = vec![
            pat(1, 0, (0..10).collect()),
            pat(1, 1, vec![0, 3]),
            pat(1, 2, vec![0, 3]),
            pat(1, 3, vec![4]),
        ];
        let s = score_patterns(&patterns, 10, &labels).unwrap();
        assert_eq!(s[0].ig, 0.0);
        assert_eq!(s[1].ig, s[2].ig);
        // filler unique to one class-0 graph: H(y) - 9/10 * H(4/9, 5/9)
        let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((s[3].ig - (1.0 - 0.9 * h(4.0 / 9.0))).abs() < 1e-12);
        for c in &s {
            assert!((c.ig + c.we - 1.0).abs() < 1e-12);
        }
        assert!(matches!(score_patterns(&patterns, 10, &labels[..9]), Err(Error::LabelMismatch { .. })));
    }

    #[test]
    fn single_full_cover() {
        let r = select(&[scored(0.0, 0, vec![0, 1, 2])], &SelectorConfig { budget: None, tau: 1.0 }, 3);
        assert_eq!(r.selected.len(), 1);
        assert!(r.constraint_met);
        assert_eq!(r.coverage_fraction, 1.0);
    }

    #[test]
    fn shared_cover_selects_once() {
        let c: Vec<_> = (0..4).map(|k| scored(0.5 - k as f64 * 0.1, k, vec![0, 2])).collect();
        let r = select(&c, &SelectorConfig { budget: None, tau: 1.0 }, 4);
        assert_eq!(r.selected.len(), 1);
        assert!(!r.constraint_met);
    }

    #[test]
    fn hand_traced_example() {
        let a = scored(0.9, 0, vec![0, 1]);
        let b = scored(0.8, 1, vec![0, 1]);
        let c = scored(0.3, 2, vec![2, 3]);
        let r = select(&[c.clone(), b, a.clone()], &SelectorConfig { budget: None, tau: 1.0 }, 4);
        assert_eq!(r.selected, vec![a, c]);
        assert!(r.constraint_met);
        assert_eq!(r.covered, vec![0, 1, 2, 3]);
    }

    #[test]
    fn budget_binds() {
        let c = vec![scored(0.9, 0, vec![0]), scored(0.8, 1, vec![1]), scored(0.7, 2, vec![2])];
        let r = select(&c, &SelectorConfig { budget: Some(2), tau: 1.0 }, 3);
        assert_eq!(r.selected.len(), 2);
        assert!(!r.constraint_met);
    }

    #[test]
    fn ties_prefer_smaller_codes() {
        let big = ScoredCandidate {
            pattern: pat(2, 0, vec![0]),
            ig: 0.5,
            we: 0.5,
        };
        let small = scored(0.5, 9, vec![0]);
        let r = select(&[big, small.clone()], &SelectorConfig { budget: None, tau: 1.0 }, 1);
        assert_eq!(r.selected, vec![small]);
    }

    #[test]
    fn tau_rounds_up_to_whole_graphs() {
        // 0.95 * 20 = 19 graphs needed
        let c: Vec<_> = (0..20).map(|i| scored(1.0 - i as f64 / 100.0, i as u32, vec![i])).collect();
        let r = select(&c, &SelectorConfig { budget: None, tau: 0.95 }, 20);
        assert_eq!(r.selected.len(), 19);
        assert!(r.constraint_met);
    }
}
