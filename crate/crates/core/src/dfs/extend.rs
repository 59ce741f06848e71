//! Occurrence lists and one-edge rightmost-path growth.
//!
//! A pattern keeps, for every dataset graph that contains it, the list of
//! vertex maps (discovery index -> graph vertex) realizing it. Children are
//! grown by extending those maps rather than re-running isomorphism search.
//! Only graphs flagged eligible contribute new extension edges; the
//! occurrences of each kept child are still collected from every graph the
//! parent occurs in, so support is always counted over the whole dataset.

use std::collections::BTreeMap;

use super::code::{DfsCode, DfsEdge};
use super::matching;
use crate::graph::{GraphDataset, Label, LabeledGraph};

/// Discovery index -> graph vertex id.
pub type VertexMap = Vec<u32>;

/// Default bound on stored vertex maps per (pattern, graph).
pub const DEFAULT_AUTOMORPHISM_CAP: usize = 4096;

/// Occurrences of one pattern inside one graph.
///
/// `complete` is false when the map list was truncated at the automorphism
/// cap or only existence was recorded; presence in the graph is still exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOccurrences {
    pub graph_id: usize,
    pub maps: Vec<VertexMap>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRecord {
    pub code: DfsCode,
    /// One entry per containing graph, ascending graph id.
    pub occurrences: Vec<GraphOccurrences>,
}

impl PatternRecord {
    pub fn support(&self) -> usize {
        self.occurrences.len()
    }

    pub fn occurrence_graphs(&self) -> Vec<usize> {
        self.occurrences.iter().map(|g| g.graph_id).collect()
    }

    pub fn occurs_in_any(&self, eligible: &[bool]) -> bool {
        self.occurrences.iter().any(|g| eligible[g.graph_id])
    }
}

/// Counters for extension work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendStats {
    /// Distinct extension edges produced from eligible graphs.
    pub extensions_generated: u64,
}

/// All distinct 1-edge codes in canonical orientation (smaller endpoint
/// label first) that occur in some graph of `scope`, ascending. Occurrences
/// are collected from every graph of the dataset.
pub fn enumerate_single_edges(dataset: &GraphDataset, scope: &[bool], cap: usize) -> Vec<PatternRecord> {
    let mut wanted = std::collections::BTreeSet::new();
    for (g, graph) in dataset.graphs.iter().enumerate() {
        if scope[g] {
            for_each_oriented_edge(graph, |edge, _, _| {
                wanted.insert(edge);
            });
        }
    }
    let mut groups: BTreeMap<DfsEdge, Vec<GraphOccurrences>> =
        wanted.into_iter().map(|e| (e, Vec::new())).collect();
    for (g, graph) in dataset.graphs.iter().enumerate() {
        let mut local: BTreeMap<DfsEdge, Vec<VertexMap>> = BTreeMap::new();
        for_each_oriented_edge(graph, |edge, a, b| {
            if groups.contains_key(&edge) {
                local.entry(edge).or_default().push(vec![a as u32, b as u32]);
            }
        });
        for (edge, maps) in local {
            groups.get_mut(&edge).expect("filtered").push(capped(g, maps, true, cap));
        }
    }
    groups
        .into_iter()
        .map(|(e, occurrences)| PatternRecord {
            code: DfsCode::new(vec![e]),
            occurrences,
        })
        .collect()
}

fn for_each_oriented_edge(graph: &LabeledGraph, mut f: impl FnMut(DfsEdge, usize, usize)) {
    for e in graph.edges() {
        let (la, lb) = (graph.vertex_label(e.u), graph.vertex_label(e.v));
        if la <= lb {
            f(DfsEdge::new(0, 1, la, lb, e.label), e.u, e.v);
        }
        if lb <= la {
            f(DfsEdge::new(0, 1, lb, la, e.label), e.v, e.u);
        }
    }
}

fn capped(graph_id: usize, mut maps: Vec<VertexMap>, complete: bool, cap: usize) -> GraphOccurrences {
    let truncated = maps.len() > cap;
    maps.truncate(cap);
    GraphOccurrences {
        graph_id,
        maps,
        complete: complete && !truncated,
    }
}

/// Every one-edge rightmost-path extension of `pattern` realized in an
/// eligible graph, keyed by the new edge.
pub fn rightmost_extensions(
    pattern: &PatternRecord,
    eligible: &[bool],
    dataset: &GraphDataset,
    cap: usize,
) -> BTreeMap<DfsEdge, PatternRecord> {
    let mut stats = ExtendStats::default();
    extend_filtered(pattern, eligible, &dataset.graphs, cap, |_| true, &mut stats)
        .into_iter()
        .map(|child| (*child.code.edges().last().expect("non-empty"), child))
        .collect()
}

struct Frame {
    path: Vec<usize>,
    labels: Vec<Label>,
    adjacent: Vec<Vec<bool>>,
}

impl Frame {
    fn of(code: &DfsCode) -> Frame {
        let n = code.vertex_count();
        let mut adjacent = vec![vec![false; n]; n];
        for e in code.edges() {
            adjacent[e.u][e.v] = true;
            adjacent[e.v][e.u] = true;
        }
        Frame {
            path: code.rightmost_path(),
            labels: code.vertex_labels(),
            adjacent,
        }
    }

    /// Calls `f(edge, new_vertex)` for each extension of one embedding.
    fn for_each(&self, graph: &LabeledGraph, map: &[u32], mut f: impl FnMut(DfsEdge, Option<u32>)) {
        let r = self.path[0];
        let gr = map[r] as usize;
        for &t in self.path[1..].iter().rev() {
            if self.adjacent[r][t] {
                continue;
            }
            if let Some(l) = graph.edge_label(gr, map[t] as usize) {
                f(DfsEdge::new(r, t, self.labels[r], self.labels[t], l), None);
            }
        }
        let fresh = self.labels.len();
        for &o in &self.path {
            for n in graph.neighbors(map[o] as usize) {
                let w = n.vertex as u32;
                if map.contains(&w) {
                    continue;
                }
                f(
                    DfsEdge::new(o, fresh, self.labels[o], graph.vertex_label(n.vertex), n.label),
                    Some(w),
                );
            }
        }
    }

    fn grow(&self, graph: &LabeledGraph, group: &GraphOccurrences) -> BTreeMap<DfsEdge, Vec<VertexMap>> {
        let mut local: BTreeMap<DfsEdge, Vec<VertexMap>> = BTreeMap::new();
        for map in &group.maps {
            self.for_each(graph, map, |edge, w| {
                let mut child = Vec::with_capacity(map.len() + 1);
                child.extend_from_slice(map);
                child.extend(w);
                local.entry(edge).or_default().push(child);
            });
        }
        local
    }
}

/// Grows `pattern` by one edge. Extension edges come only from eligible
/// graphs; `keep` decides on each child code before any occurrence work in
/// the remaining graphs is done. Children are returned in ascending code
/// order with dataset-wide occurrences.
pub fn extend_filtered(
    pattern: &PatternRecord,
    eligible: &[bool],
    graphs: &[LabeledGraph],
    cap: usize,
    mut keep: impl FnMut(&DfsCode) -> bool,
    stats: &mut ExtendStats,
) -> Vec<PatternRecord> {
    let frame = Frame::of(&pattern.code);
    let mut children: BTreeMap<DfsEdge, Vec<GraphOccurrences>> = BTreeMap::new();

    for group in pattern.occurrences.iter().filter(|g| eligible[g.graph_id]) {
        let graph = &graphs[group.graph_id];
        for (edge, maps) in frame.grow(graph, group) {
            let slot = children.entry(edge).or_default();
            if group.complete {
                slot.push(capped(group.graph_id, maps, true, cap));
            }
        }
    }
    stats.extensions_generated += children.len() as u64;
    children.retain(|edge, _| keep(&pattern.code.extended(*edge)));
    if children.is_empty() {
        return Vec::new();
    }

    for group in pattern.occurrences.iter().filter(|g| !eligible[g.graph_id] && g.complete) {
        let graph = &graphs[group.graph_id];
        for (edge, maps) in frame.grow(graph, group) {
            if let Some(slot) = children.get_mut(&edge) {
                slot.push(capped(group.graph_id, maps, true, cap));
            }
        }
    }

    for group in pattern.occurrences.iter().filter(|g| !g.complete) {
        let graph = &graphs[group.graph_id];
        for (edge, slot) in children.iter_mut() {
            let child = pattern.code.extended(*edge);
            if eligible[group.graph_id] {
                let maps = matching::embeddings(graph, &child, cap.saturating_add(1));
                if !maps.is_empty() {
                    slot.push(capped(group.graph_id, maps, true, cap));
                }
            } else if matching::contains(graph, &child) {
                slot.push(GraphOccurrences {
                    graph_id: group.graph_id,
                    maps: Vec::new(),
                    complete: false,
                });
            }
        }
    }

    children
        .into_iter()
        .map(|(edge, mut occurrences)| {
            occurrences.sort_by_key(|g| g.graph_id);
            PatternRecord {
                code: pattern.code.extended(edge),
                occurrences,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn graph(id: usize, labels: Vec<Label>, pairs: &[(usize, usize, Label)]) -> LabeledGraph {
        LabeledGraph::new(
            id,
            labels,
            pairs.iter().map(|&(u, v, label)| Edge { u, v, label }).collect(),
        )
    }

    fn dataset(graphs: Vec<LabeledGraph>) -> GraphDataset {
        let n = graphs.len();
        GraphDataset::new("t", graphs, vec![0; n], 1)
    }

    #[test]
    fn one_edge_dataset() {
        let ds = dataset(vec![graph(0, vec![0, 1], &[(0, 1, 0)])]);
        let recs = enumerate_single_edges(&ds, &[true], DEFAULT_AUTOMORPHISM_CAP);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].code.to_string(), "(0,1,0,0,1)");
        assert_eq!(recs[0].support(), 1);
    }

    #[test]
    fn support_counts_graphs_not_occurrences() {
        let g = |id| graph(id, vec![0, 0, 0], &[(0, 1, 0), (1, 2, 0)]);
        let ds = dataset(vec![g(0), g(1)]);
        let recs = enumerate_single_edges(&ds, &[true, true], DEFAULT_AUTOMORPHISM_CAP);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].support(), 2);
        // both orientations of both edges
        assert_eq!(recs[0].occurrences[0].maps.len(), 4);
    }

    #[test]
    fn distinct_edge_labels_give_distinct_records() {
        let ds = dataset(vec![graph(0, vec![0, 0, 0, 0], &[(0, 1, 0), (1, 2, 1), (2, 3, 2)])]);
        assert_eq!(enumerate_single_edges(&ds, &[true], DEFAULT_AUTOMORPHISM_CAP).len(), 3);
    }

    #[test]
    fn scope_limits_codes_not_support() {
        let ds = dataset(vec![
            graph(0, vec![0, 0], &[(0, 1, 0)]),
            graph(1, vec![0, 0, 1], &[(0, 1, 0), (1, 2, 0)]),
        ]);
        let recs = enumerate_single_edges(&ds, &[true, false], DEFAULT_AUTOMORPHISM_CAP);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].occurrence_graphs(), vec![0, 1]);
    }

    #[test]
    fn path_fixture_has_one_forward_extension() {
        let ds = dataset(vec![graph(0, vec![0, 0, 0], &[(0, 1, 0), (1, 2, 0)])]);
        let seed = &enumerate_single_edges(&ds, &[true], DEFAULT_AUTOMORPHISM_CAP)[0];
        let ext = rightmost_extensions(seed, &[true], &ds, DEFAULT_AUTOMORPHISM_CAP);
        let keys: Vec<String> = ext.keys().map(|e| e.to_string()).collect();
        // from the rightmost vertex, and from the root toward the other side
        assert_eq!(keys, vec!["(1,2,0,0,0)", "(0,2,0,0,0)"]);
        let child = &ext[&DfsEdge::new(1, 2, 0, 0, 0)];
        assert_eq!(child.support(), 1);
    }

    #[test]
    fn triangle_closes_with_backward_edge() {
        let ds = dataset(vec![graph(0, vec![0, 0, 0], &[(0, 1, 0), (1, 2, 0), (2, 0, 0)])]);
        let seed = &enumerate_single_edges(&ds, &[true], DEFAULT_AUTOMORPHISM_CAP)[0];
        let path = &rightmost_extensions(seed, &[true], &ds, DEFAULT_AUTOMORPHISM_CAP)[&DfsEdge::new(1, 2, 0, 0, 0)];
        let ext = rightmost_extensions(path, &[true], &ds, DEFAULT_AUTOMORPHISM_CAP);
        assert!(ext.contains_key(&DfsEdge::new(2, 0, 0, 0, 0)));
    }

    #[test]
    fn empty_eligible_set_yields_nothing() {
        let ds = dataset(vec![graph(0, vec![0, 0, 0], &[(0, 1, 0), (1, 2, 0)])]);
        let seed = &enumerate_single_edges(&ds, &[true], DEFAULT_AUTOMORPHISM_CAP)[0];
        assert!(rightmost_extensions(seed, &[false], &ds, DEFAULT_AUTOMORPHISM_CAP).is_empty());
    }

    #[test]
    fn ineligible_graphs_still_count_toward_child_support() {
        let g = |id| graph(id, vec![0, 0, 0], &[(0, 1, 0), (1, 2, 0)]);
        let ds = dataset(vec![g(0), g(1)]);
        let seed = &enumerate_single_edges(&ds, &[true, true], DEFAULT_AUTOMORPHISM_CAP)[0];
        let ext = rightmost_extensions(seed, &[true, false], &ds, DEFAULT_AUTOMORPHISM_CAP);
        assert_eq!(ext[&DfsEdge::new(1, 2, 0, 0, 0)].support(), 2);
    }

    #[test]
    fn truncated_lists_keep_exact_support() {
        // uniform K4 blows past a tiny cap
        let pairs = [(0, 1, 0), (0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 0), (2, 3, 0)];
        let ds = dataset(vec![graph(0, vec![0; 4], &pairs), graph(1, vec![0; 4], &pairs)]);
        let cap = 3;
        let seed = &enumerate_single_edges(&ds, &[true, true], cap)[0];
        assert!(!seed.occurrences[0].complete);
        let ext = rightmost_extensions(seed, &[true, false], &ds, cap);
        let full = rightmost_extensions(seed, &[true, true], &ds, DEFAULT_AUTOMORPHISM_CAP);
        for (edge, child) in &ext {
            assert_eq!(child.support(), 2, "{edge}");
            for occ in &child.occurrences {
                assert!(occ.maps.len() <= cap);
            }
        }
        assert_eq!(ext.len(), full.len());
    }
}
