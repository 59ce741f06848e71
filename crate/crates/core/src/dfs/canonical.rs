use std::cmp::Ordering;

use super::code::{DfsCode, DfsEdge};
use crate::graph::LabeledGraph;

/// Returns true iff no DFS traversal of the code's own pattern graph
/// produces a smaller code.
///
/// Rebuilds the minimum code one edge at a time, tracking every embedding
/// of the current minimal prefix in the pattern graph, and bails out as
/// soon as the minimal next edge is smaller than the code's.
pub fn is_canonical(code: &DfsCode) -> bool {
    if code.is_empty() {
        return true;
    }
    let graph = code.to_graph(0);
    let edges = code.edges();

    let mut first: Option<DfsEdge> = None;
    for a in 0..graph.vertex_count() {
        for n in graph.neighbors(a) {
            let cand = DfsEdge::new(0, 1, graph.vertex_label(a), graph.vertex_label(n.vertex), n.label);
            if first.is_none_or(|f| cand < f) {
                first = Some(cand);
            }
        }
    }
    let first = first.expect("code has an edge");
    match first.cmp(&edges[0]) {
        Ordering::Less => return false,
        Ordering::Greater => unreachable!("code's first edge lies in its own graph"),
        Ordering::Equal => {}
    }

    let mut projections: Vec<Vec<usize>> = Vec::new();
    for a in 0..graph.vertex_count() {
        for n in graph.neighbors(a) {
            if graph.vertex_label(a) == first.u_label
                && graph.vertex_label(n.vertex) == first.v_label
                && n.label == first.e_label
            {
                projections.push(vec![a, n.vertex]);
            }
        }
    }

    // adjacency among discovery indices of the prefix built so far
    let n_vertices = code.vertex_count();
    let mut prefix_adj = vec![vec![false; n_vertices]; n_vertices];
    prefix_adj[0][1] = true;
    prefix_adj[1][0] = true;

    for k in 1..edges.len() {
        let prefix = DfsCode::new(edges[..k].to_vec());
        let path = prefix.rightmost_path();
        let rightmost = path[0];
        let labels = prefix.vertex_labels();

        let (best, next) = match min_backward(&graph, &projections, &path, &prefix_adj, &labels) {
            Some(found) => found,
            None => min_forward(&graph, &projections, &path, &labels)
                .expect("code's next edge is an extension of its own prefix"),
        };
        match best.cmp(&edges[k]) {
            Ordering::Less => return false,
            Ordering::Greater => unreachable!("code's edge {k} is an extension of its own prefix"),
            Ordering::Equal => {}
        }
        projections = next;
        let e = edges[k];
        prefix_adj[e.u][e.v] = true;
        prefix_adj[e.v][e.u] = true;
        debug_assert!(e.is_forward() || e.u == rightmost);
    }
    true
}

type Step = (DfsEdge, Vec<Vec<usize>>);

fn min_backward(
    graph: &LabeledGraph,
    projections: &[Vec<usize>],
    path: &[usize],
    prefix_adj: &[Vec<bool>],
    labels: &[u32],
) -> Option<Step> {
    let rightmost = path[0];
    // ancestors in ascending discovery order; the smallest target wins
    for &target in path[1..].iter().rev() {
        if prefix_adj[rightmost][target] {
            continue;
        }
        let mut best: Option<u32> = None;
        for p in projections {
            if let Some(l) = graph.edge_label(p[rightmost], p[target]) {
                best = Some(best.map_or(l, |b| b.min(l)));
            }
        }
        if let Some(l) = best {
            let edge = DfsEdge::new(rightmost, target, labels[rightmost], labels[target], l);
            let next = projections
                .iter()
                .filter(|p| graph.edge_label(p[rightmost], p[target]) == Some(l))
                .cloned()
                .collect();
            return Some((edge, next));
        }
    }
    None
}

fn min_forward(graph: &LabeledGraph, projections: &[Vec<usize>], path: &[usize], labels: &[u32]) -> Option<Step> {
    let fresh = labels.len();
    // deepest rightmost-path vertex first
    for &origin in path {
        let mut best: Option<(u32, u32)> = None;
        for p in projections {
            for n in graph.neighbors(p[origin]) {
                if p.contains(&n.vertex) {
                    continue;
                }
                let key = (n.label, graph.vertex_label(n.vertex));
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        if let Some((el, vl)) = best {
            let edge = DfsEdge::new(origin, fresh, labels[origin], vl, el);
            let mut next = Vec::new();
            for p in projections {
                for n in graph.neighbors(p[origin]) {
                    if !p.contains(&n.vertex) && n.label == el && graph.vertex_label(n.vertex) == vl {
                        let mut q = p.clone();
                        q.push(n.vertex);
                        next.push(q);
                    }
                }
            }
            return Some((edge, next));
        }
    }
    None
}
