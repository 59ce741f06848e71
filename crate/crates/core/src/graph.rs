//! Labeled undirected graphs and the classification dataset that holds them.
//!
//! Vertex, edge and class labels are interned to dense small integers when a
//! dataset is loaded; the raw values are kept in [`LabelTables`] so reports
//! can translate back.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

/// Interned vertex or edge label.
pub type Label = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub vertex: usize,
    pub label: Label,
}

/// Vertex- and edge-labeled undirected graph.
///
/// Construction never fails; structural problems (self-loops, duplicate
/// edges, dangling endpoints) are reported by [`GraphDataset::validate`].
/// Adjacency only records edges whose endpoints exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph_id: usize,
    vertex_labels: Vec<Label>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Neighbor>>,
}

impl LabeledGraph {
    pub fn new(graph_id: usize, vertex_labels: Vec<Label>, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); vertex_labels.len()];
        for e in &edges {
            if e.u < vertex_labels.len() && e.v < vertex_labels.len() {
                adjacency[e.u].push(Neighbor { vertex: e.v, label: e.label });
                if e.u != e.v {
                    adjacency[e.v].push(Neighbor { vertex: e.u, label: e.label });
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|n| (n.vertex, n.label));
        }
        LabeledGraph {
            graph_id,
            vertex_labels,
            edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_label(&self, v: usize) -> Label {
        self.vertex_labels[v]
    }

    pub fn vertex_labels(&self) -> &[Label] {
        &self.vertex_labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[Neighbor] {
        &self.adjacency[v]
    }

    /// Label of the edge between `u` and `v`, if present.
    pub fn edge_label(&self, u: usize, v: usize) -> Option<Label> {
        let list = &self.adjacency[u];
        let at = list.partition_point(|n| n.vertex < v);
        list.get(at).filter(|n| n.vertex == v).map(|n| n.label)
    }

    fn with_id(&self, graph_id: usize) -> Self {
        LabeledGraph {
            graph_id,
            ..self.clone()
        }
    }
}

/// Raw label values indexed by their interned id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelTables {
    pub vertex: Vec<i64>,
    pub edge: Vec<i64>,
    pub class: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphDataset {
    pub name: String,
    pub graphs: Vec<LabeledGraph>,
    pub labels: Vec<usize>,
    pub class_count: usize,
    /// Index of each graph in the dataset it was drawn from. Identity for a
    /// freshly loaded dataset; subsets keep pointing at the original ids.
    pub origin: Vec<usize>,
    pub label_tables: LabelTables,
}

impl GraphDataset {
    /// Builds a dataset with identity origin and synthetic label tables
    /// (raw value == interned value).
    pub fn new(name: impl Into<String>, graphs: Vec<LabeledGraph>, labels: Vec<usize>, class_count: usize) -> Self {
        let max_vertex = graphs
            .iter()
            .flat_map(|g| g.vertex_labels.iter().copied())
            .max()
            .map_or(0, |l| l as i64 + 1);
        let max_edge = graphs
            .iter()
            .flat_map(|g| g.edges.iter().map(|e| e.label))
            .max()
            .map_or(0, |l| l as i64 + 1);
        let origin = (0..graphs.len()).collect();
        GraphDataset {
            name: name.into(),
            graphs,
            labels,
            class_count,
            origin,
            label_tables: LabelTables {
                vertex: (0..max_vertex).collect(),
                edge: (0..max_edge).collect(),
                class: (0..class_count as i64).collect(),
            },
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Graphs at `ids` renumbered 0..ids.len(), keeping class count, label
    /// tables and the original ids in `origin`.
    pub fn subset(&self, ids: &[usize]) -> GraphDataset {
        GraphDataset {
            name: self.name.clone(),
            graphs: ids
                .iter()
                .enumerate()
                .map(|(new_id, &i)| self.graphs[i].with_id(new_id))
                .collect(),
            labels: ids.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
            origin: ids.iter().map(|&i| self.origin[i]).collect(),
            label_tables: self.label_tables.clone(),
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for &y in &self.labels {
            if y < counts.len() {
                counts[y] += 1;
            }
        }
        counts
    }

    /// Checks every structural invariant, returning one description per
    /// violation. An empty list means the dataset is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.graphs.is_empty() {
            out.push("dataset has no graphs".to_string());
        }
        if self.class_count == 0 {
            out.push("class count is zero".to_string());
        }
        if self.labels.len() != self.graphs.len() {
            out.push(format!(
                "label count {} does not match graph count {}",
                self.labels.len(),
                self.graphs.len()
            ));
        }
        for (i, &y) in self.labels.iter().enumerate() {
            if y >= self.class_count {
                out.push(format!("class label {y} of graph {i} outside [0, {})", self.class_count));
            }
        }
        for (i, g) in self.graphs.iter().enumerate() {
            if g.graph_id != i {
                out.push(format!("graph at position {i} carries graph_id {}", g.graph_id));
            }
            let n = g.vertex_count();
            let mut seen = HashSet::new();
            for e in &g.edges {
                if e.u >= n || e.v >= n {
                    out.push(format!(
                        "edge ({}, {}) in graph {i} references a vertex outside 0..{n}",
                        e.u, e.v
                    ));
                    continue;
                }
                if e.u == e.v {
                    out.push(format!("self-loop in graph {i}"));
                    continue;
                }
                if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                    out.push(format!("duplicate edge ({}, {}) in graph {i}", e.u, e.v));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> LabeledGraph {
        LabeledGraph::new(
            0,
            vec![0, 0, 1],
            vec![
                Edge { u: 0, v: 1, label: 0 },
                Edge { u: 1, v: 2, label: 0 },
                Edge { u: 2, v: 0, label: 1 },
            ],
        )
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = triangle();
        assert_eq!(g.edge_label(0, 2), Some(1));
        assert_eq!(g.edge_label(2, 0), Some(1));
        assert_eq!(g.edge_label(0, 0), None);
        assert_eq!(g.neighbors(1).len(), 2);
    }

    #[test]
    fn well_formed_dataset_has_no_violations() {
        let ds = GraphDataset::new("t", vec![triangle()], vec![0], 1);
        assert!(ds.validate().is_empty());
    }

    #[test]
    fn self_loop_is_reported() {
        let g = LabeledGraph::new(0, vec![0, 0], vec![Edge { u: 0, v: 0, label: 0 }]);
        let ds = GraphDataset::new("t", vec![g], vec![0], 1);
        assert_eq!(ds.validate(), vec!["self-loop in graph 0".to_string()]);
    }

    #[test]
    fn short_label_list_is_reported() {
        let ds = GraphDataset::new("t", vec![triangle(), triangle().with_id(1)], vec![0], 1);
        let v = ds.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("label count 1"), "{v:?}");
    }

    #[test]
    fn duplicate_and_dangling_edges_are_reported() {
        let g = LabeledGraph::new(
            0,
            vec![0, 0],
            vec![
                Edge { u: 0, v: 1, label: 0 },
                Edge { u: 1, v: 0, label: 0 },
                Edge { u: 1, v: 5, label: 0 },
            ],
        );
        let ds = GraphDataset::new("t", vec![g], vec![0], 1);
        let v = ds.validate();
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v[0].starts_with("duplicate edge"));
        assert!(v[1].contains("outside"));
    }

    #[test]
    fn subset_renumbers_and_keeps_origin() {
        let gs = (0..4).map(|i| triangle().with_id(i)).collect();
        let ds = GraphDataset::new("t", gs, vec![0, 1, 0, 1], 2);
        let sub = ds.subset(&[3, 1]);
        assert_eq!(sub.origin, vec![3, 1]);
        assert_eq!(sub.labels, vec![1, 1]);
        assert_eq!(sub.graphs[1].graph_id, 1);
        assert!(sub.validate().is_empty());
        let subsub = sub.subset(&[1]);
        assert_eq!(subsub.origin, vec![1]);
    }
}
