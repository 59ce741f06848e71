//! Exhaustive reference implementations for small inputs.
//!
//! Everything here is deliberately naive: permutations, full injective-map
//! enumeration, every DFS traversal. None of it calls into the mining,
//! matching or ordering code it is used to check. Inputs beyond the size
//! bound are rejected, never approximated.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dfs::{DfsCode, DfsEdge};
use crate::error::{Error, Result};
use crate::graph::{Edge, GraphDataset, Label, LabeledGraph};

pub const DEFAULT_VERTEX_BOUND: usize = 8;

/// Isomorphism-invariant key of a small labeled graph: the lexicographically
/// smallest (vertex count, vertex labels, upper-triangle edge labels) over
/// every vertex ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(Vec<u64>);

fn check_bound(what: &str, n: usize, bound: usize) -> Result<()> {
    if n > bound {
        return Err(Error::SizeBound(format!("{what} has {n} vertices, bound is {bound}")));
    }
    Ok(())
}

fn permutations(n: usize, f: &mut impl FnMut(&[usize])) {
    fn go(perm: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut impl FnMut(&[usize])) {
        if perm.len() == used.len() {
            f(perm);
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                go(perm, used, f);
                perm.pop();
                used[v] = false;
            }
        }
    }
    go(&mut Vec::with_capacity(n), &mut vec![false; n], f);
}

fn label_matrix(n: usize, edges: &[(usize, usize, Label)]) -> Vec<Vec<Option<Label>>> {
    let mut m = vec![vec![None; n]; n];
    for &(u, v, l) in edges {
        m[u][v] = Some(l);
        m[v][u] = Some(l);
    }
    m
}

fn form_of(labels: &[Label], edges: &[(usize, usize, Label)]) -> CanonicalForm {
    let n = labels.len();
    let m = label_matrix(n, edges);
    let mut best: Option<Vec<u64>> = None;
    permutations(n, &mut |perm| {
        // perm[i] = original vertex placed at position i
        let mut key = Vec::with_capacity(1 + n + n * n / 2);
        key.push(n as u64);
        key.extend(perm.iter().map(|&v| labels[v] as u64));
        for i in 0..n {
            for j in i + 1..n {
                key.push(m[perm[i]][perm[j]].map_or(0, |l| l as u64 + 1));
            }
        }
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    CanonicalForm(best.unwrap_or_else(|| vec![0]))
}

pub fn canonical_form(graph: &LabeledGraph, bound: usize) -> Result<CanonicalForm> {
    check_bound("graph", graph.vertex_count(), bound)?;
    let edges: Vec<_> = graph.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
    Ok(form_of(graph.vertex_labels(), &edges))
}

/// The pattern graph spelled out by a DFS code.
pub fn code_graph(code: &DfsCode) -> LabeledGraph {
    let n = code.edges().iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0);
    let mut labels = vec![0; n];
    let mut edges = Vec::new();
    for e in code.edges() {
        labels[e.u] = e.u_label;
        labels[e.v] = e.v_label;
        edges.push(Edge { u: e.u, v: e.v, label: e.e_label });
    }
    LabeledGraph::new(0, labels, edges)
}

pub fn code_form(code: &DfsCode, bound: usize) -> Result<CanonicalForm> {
    canonical_form(&code_graph(code), bound)
}

fn connected(n_edges: usize, edges: &[(usize, usize, Label)]) -> bool {
    let mut verts: Vec<usize> = edges.iter().flat_map(|e| [e.0, e.1]).collect();
    verts.sort_unstable();
    verts.dedup();
    let mut reached = BTreeSet::from([verts[0]]);
    loop {
        let before = reached.len();
        for &(u, v, _) in edges {
            if reached.contains(&u) || reached.contains(&v) {
                reached.insert(u);
                reached.insert(v);
            }
        }
        if reached.len() == before {
            break;
        }
    }
    debug_assert!(n_edges == edges.len());
    reached.len() == verts.len()
}

/// Forms of every connected edge-subgraph of `graph` with 1..=max_edges edges.
fn subgraph_forms(graph: &LabeledGraph, max_edges: usize) -> BTreeSet<CanonicalForm> {
    fn go(
        graph: &LabeledGraph,
        start: usize,
        chosen: &mut Vec<usize>,
        max_edges: usize,
        out: &mut BTreeSet<CanonicalForm>,
    ) {
        if !chosen.is_empty() {
            let all = graph.edges();
            let picked: Vec<_> = chosen.iter().map(|&i| (all[i].u, all[i].v, all[i].label)).collect();
            if connected(picked.len(), &picked) {
                let mut verts: Vec<usize> = picked.iter().flat_map(|e| [e.0, e.1]).collect();
                verts.sort_unstable();
                verts.dedup();
                let local = |x: usize| verts.binary_search(&x).expect("endpoint");
                let labels: Vec<Label> = verts.iter().map(|&v| graph.vertex_label(v)).collect();
                let edges: Vec<_> = picked.iter().map(|&(u, v, l)| (local(u), local(v), l)).collect();
                out.insert(form_of(&labels, &edges));
            }
        }
        if chosen.len() == max_edges {
            return;
        }
        for i in start..graph.edge_count() {
            chosen.push(i);
            go(graph, i + 1, chosen, max_edges, out);
            chosen.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(graph, 0, &mut Vec::new(), max_edges, &mut out);
    out
}

/// Every connected labeled pattern with at most `max_edges` edges that
/// occurs in at least `min_support` graphs of the dataset.
pub fn brute_frequent(dataset: &GraphDataset, min_support: usize, max_edges: usize) -> Result<BTreeSet<CanonicalForm>> {
    brute_frequent_bounded(dataset, min_support, max_edges, DEFAULT_VERTEX_BOUND)
}

pub fn brute_frequent_bounded(
    dataset: &GraphDataset,
    min_support: usize,
    max_edges: usize,
    bound: usize,
) -> Result<BTreeSet<CanonicalForm>> {
    let mut counts: std::collections::BTreeMap<CanonicalForm, usize> = Default::default();
    for g in &dataset.graphs {
        check_bound("dataset graph", g.vertex_count(), bound)?;
        for form in subgraph_forms(g, max_edges) {
            *counts.entry(form).or_default() += 1;
        }
    }
    Ok(counts.into_iter().filter(|&(_, c)| c >= min_support).map(|(f, _)| f).collect())
}

/// Number of distinct connected patterns (up to isomorphism) inside one
/// graph with at most `max_edges` edges.
pub fn brute_pattern_count(graph: &LabeledGraph, max_edges: usize, bound: usize) -> Result<usize> {
    check_bound("graph", graph.vertex_count(), bound)?;
    Ok(subgraph_forms(graph, max_edges).len())
}

/// Tries every injective map from pattern vertices into graph vertices.
pub fn brute_contains(graph: &LabeledGraph, pattern: &LabeledGraph) -> Result<bool> {
    brute_contains_bounded(graph, pattern, DEFAULT_VERTEX_BOUND)
}

pub fn brute_contains_bounded(graph: &LabeledGraph, pattern: &LabeledGraph, bound: usize) -> Result<bool> {
    check_bound("graph", graph.vertex_count(), bound)?;
    check_bound("pattern", pattern.vertex_count(), bound)?;
    fn go(graph: &LabeledGraph, pattern: &LabeledGraph, map: &mut Vec<usize>) -> bool {
        if map.len() == pattern.vertex_count() {
            let labels_ok = (0..map.len()).all(|p| pattern.vertex_label(p) == graph.vertex_label(map[p]));
            let edges_ok = pattern
                .edges()
                .iter()
                .all(|e| graph.edges().iter().any(|f| {
                    f.label == e.label
                        && ((f.u == map[e.u] && f.v == map[e.v]) || (f.u == map[e.v] && f.v == map[e.u]))
                }));
            return labels_ok && edges_ok;
        }
        for v in 0..graph.vertex_count() {
            if !map.contains(&v) {
                map.push(v);
                if go(graph, pattern, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    Ok(go(graph, pattern, &mut Vec::new()))
}

/// Independent ordering key for a DFS edge: structural rank then labels.
fn edge_key(e: &DfsEdge) -> (usize, u8, i64, Label, Label, Label) {
    if e.u < e.v {
        (e.v, 0, -(e.u as i64), e.u_label, e.e_label, e.v_label)
    } else {
        (e.u, 1, e.v as i64, e.u_label, e.e_label, e.v_label)
    }
}

fn code_key(code: &DfsCode) -> Vec<(usize, u8, i64, Label, Label, Label)> {
    code.edges().iter().map(edge_key).collect()
}

/// Orders codes by the independent key (lexicographic, prefix smaller).
pub fn brute_code_cmp(a: &DfsCode, b: &DfsCode) -> std::cmp::Ordering {
    code_key(a).cmp(&code_key(b))
}

/// The code produced by every DFS traversal of a connected pattern graph.
pub fn all_dfs_codes(pattern: &LabeledGraph) -> Result<Vec<DfsCode>> {
    check_bound("pattern", pattern.vertex_count(), DEFAULT_VERTEX_BOUND)?;
    let n = pattern.vertex_count();
    if n == 0 || pattern.edge_count() == 0 {
        return Err(Error::Format("pattern has no edges".into()));
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            pattern
                .edges()
                .iter()
                .filter_map(|e| if e.u == v { Some(e.v) } else if e.v == v { Some(e.u) } else { None })
                .collect()
        })
        .collect();

    struct State {
        index: Vec<Option<usize>>,
        parent: Vec<Option<usize>>,
        order: usize,
        stack: Vec<usize>,
    }

    fn emit(pattern: &LabeledGraph, st: &State, out: &mut Vec<DfsCode>) {
        let mut edges: Vec<DfsEdge> = pattern
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = (e.u, e.v);
                let (ia, ib) = (st.index[a].unwrap(), st.index[b].unwrap());
                let tree = st.parent[b] == Some(a) || st.parent[a] == Some(b);
                let (from, to) = if tree == (ia < ib) { (a, b) } else { (b, a) };
                DfsEdge::new(
                    st.index[from].unwrap(),
                    st.index[to].unwrap(),
                    pattern.vertex_label(from),
                    pattern.vertex_label(to),
                    e.label,
                )
            })
            .collect();
        edges.sort_by_key(edge_key);
        out.push(DfsCode::new(edges));
    }

    fn walk(pattern: &LabeledGraph, adj: &[Vec<usize>], st: &mut State, out: &mut Vec<DfsCode>) {
        let Some(&top) = st.stack.last() else {
            if st.index.iter().all(Option::is_some) {
                emit(pattern, st, out);
            }
            return;
        };
        let fresh: Vec<usize> = adj[top].iter().copied().filter(|&w| st.index[w].is_none()).collect();
        if fresh.is_empty() {
            st.stack.pop();
            walk(pattern, adj, st, out);
            st.stack.push(top);
            return;
        }
        for w in fresh {
            st.index[w] = Some(st.order);
            st.parent[w] = Some(top);
            st.order += 1;
            st.stack.push(w);
            walk(pattern, adj, st, out);
            st.stack.pop();
            st.order -= 1;
            st.parent[w] = None;
            st.index[w] = None;
        }
    }

    let mut out = Vec::new();
    for root in 0..n {
        let mut st = State {
            index: vec![None; n],
            parent: vec![None; n],
            order: 1,
            stack: vec![root],
        };
        st.index[root] = Some(0);
        walk(pattern, &adj, &mut st, &mut out);
    }
    if out.is_empty() {
        return Err(Error::Format("pattern graph is disconnected".into()));
    }
    Ok(out)
}

/// Minimum over all DFS traversals of the pattern graph.
pub fn brute_min_code(pattern: &LabeledGraph) -> Result<DfsCode> {
    let codes = all_dfs_codes(pattern)?;
    Ok(codes.into_iter().min_by(brute_code_cmp).expect("non-empty"))
}

fn class_entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / total) * (c / total).log2())
        .sum()
}

/// Information gain of splitting `labels` into graphs inside / outside
/// `cover`, by direct counting.
pub fn brute_ig(cover: &[usize], labels: &[usize]) -> f64 {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let n = labels.len() as f64;
    let mut all = vec![0.0; classes];
    let mut inside = vec![0.0; classes];
    let mut outside = vec![0.0; classes];
    for (i, &y) in labels.iter().enumerate() {
        all[y] += 1.0;
        if cover.contains(&i) {
            inside[y] += 1.0;
        } else {
            outside[y] += 1.0;
        }
    }
    let n_in: f64 = inside.iter().sum();
    let n_out: f64 = outside.iter().sum();
    class_entropy(&all) - (n_in / n * class_entropy(&inside) + n_out / n * class_entropy(&outside))
}

/// Shape of a random test corpus.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub graphs: RangeInclusive<usize>,
    pub vertices: RangeInclusive<usize>,
    pub vertex_labels: RangeInclusive<u32>,
    pub edge_labels: RangeInclusive<u32>,
    /// Chance of each non-tree vertex pair becoming an edge.
    pub extra_edge_p: f64,
    pub classes: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            graphs: 5..=10,
            vertices: 4..=8,
            vertex_labels: 2..=3,
            edge_labels: 1..=2,
            extra_edge_p: 0.2,
            classes: 2,
        }
    }
}

/// Connected random graphs (random spanning tree plus extra edges) with
/// random class labels, fully determined by `seed`.
pub fn random_corpus(seed: u64, spec: &CorpusSpec) -> GraphDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_graphs = rng.random_range(spec.graphs.clone());
    let vl = rng.random_range(spec.vertex_labels.clone());
    let el = rng.random_range(spec.edge_labels.clone());
    let mut graphs = Vec::with_capacity(n_graphs);
    let mut labels = Vec::with_capacity(n_graphs);
    for id in 0..n_graphs {
        let n = rng.random_range(spec.vertices.clone());
        let vertex_labels: Vec<Label> = (0..n).map(|_| rng.random_range(0..vl)).collect();
        let mut edges = Vec::new();
        let mut tree = BTreeSet::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            tree.insert((u, v));
            edges.push(Edge { u, v, label: rng.random_range(0..el) });
        }
        for u in 0..n {
            for v in u + 1..n {
                if !tree.contains(&(u, v)) && rng.random_bool(spec.extra_edge_p) {
                    edges.push(Edge { u, v, label: rng.random_range(0..el) });
                }
            }
        }
        graphs.push(LabeledGraph::new(id, vertex_labels, edges));
        labels.push(rng.random_range(0..spec.classes.max(1)));
    }
    GraphDataset::new(format!("random-{seed}"), graphs, labels, spec.classes.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(labels: Vec<Label>, pairs: &[(usize, usize, Label)]) -> LabeledGraph {
        LabeledGraph::new(0, labels, pairs.iter().map(|&(u, v, label)| Edge { u, v, label }).collect())
    }

    fn triangle() -> LabeledGraph {
        g(vec![0, 0, 0], &[(0, 1, 0), (1, 2, 0), (2, 0, 0)])
    }

    #[test]
    fn isomorphic_graphs_share_form() {
        let a = g(vec![0, 1, 0], &[(0, 1, 0), (1, 2, 1)]);
        let b = g(vec![0, 1, 0], &[(2, 1, 0), (1, 0, 1)]);
        let c = g(vec![0, 1, 0], &[(0, 1, 0), (1, 2, 0)]);
        assert_eq!(canonical_form(&a, 8).unwrap(), canonical_form(&b, 8).unwrap());
        assert_ne!(canonical_form(&a, 8).unwrap(), canonical_form(&c, 8).unwrap());
    }

    #[test]
    fn two_triangles_have_three_frequent_patterns() {
        let ds = GraphDataset::new("t", vec![triangle(), triangle()], vec![0, 0], 1);
        assert_eq!(brute_frequent(&ds, 2, 3).unwrap().len(), 3);
        assert!(brute_frequent(&ds, 3, 3).unwrap().is_empty());
    }

    #[test]
    fn single_graph_all_subgraphs() {
        // path a-b-c with distinct labels: a-b, b-c, a-b-c
        let p = g(vec![0, 1, 2], &[(0, 1, 0), (1, 2, 0)]);
        let ds = GraphDataset::new("t", vec![p], vec![0], 1);
        assert_eq!(brute_frequent(&ds, 1, 5).unwrap().len(), 3);
    }

    #[test]
    fn k4_contains_four_cycle() {
        let k4 = g(vec![0; 4], &[(0, 1, 0), (0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 0), (2, 3, 0)]);
        let c4 = g(vec![0; 4], &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 0, 0)]);
        assert!(brute_contains(&k4, &c4).unwrap());
        let path = g(vec![0; 3], &[(0, 1, 0), (1, 2, 0)]);
        assert!(!brute_contains(&path, &triangle()).unwrap());
    }

    #[test]
    fn min_code_of_single_edge() {
        let e = g(vec![1, 0], &[(0, 1, 3)]);
        assert_eq!(brute_min_code(&e).unwrap().to_string(), "(0,1,0,3,1)");
    }

    #[test]
    fn triangle_traversals() {
        // 3 roots x 2 directions
        assert_eq!(all_dfs_codes(&triangle()).unwrap().len(), 6);
        assert_eq!(brute_min_code(&triangle()).unwrap().to_string(), "(0,1,0,0,0);(1,2,0,0,0);(2,0,0,0,0)");
    }

    #[test]
    fn ig_by_counting() {
        let labels = [1, 1, 0, 0];
        assert!((brute_ig(&[0, 1], &labels) - 1.0).abs() < 1e-12);
        assert_eq!(brute_ig(&[], &labels), 0.0);
        assert!((brute_ig(&[0, 1, 2], &labels) - 0.311278).abs() < 1e-6);
    }

    #[test]
    fn bounds_fail_hard() {
        let big = g(vec![0; 9], &[(0, 1, 0)]);
        assert!(matches!(canonical_form(&big, 8), Err(Error::SizeBound(_))));
        assert!(brute_contains(&big, &triangle()).is_err());
    }
}
