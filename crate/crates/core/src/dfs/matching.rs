use std::ops::ControlFlow;

use super::code::DfsCode;
use crate::graph::LabeledGraph;

/// Whether `graph` contains at least one injective, label-preserving
/// embedding of the pattern described by `code`.
pub fn contains(graph: &LabeledGraph, code: &DfsCode) -> bool {
    if code.is_empty() {
        return true;
    }
    search(graph, code, &mut |_| ControlFlow::Break(())).is_break()
}

/// Up to `limit` embeddings of `code` in `graph`, each as a vertex map from
/// discovery index to graph vertex.
pub fn embeddings(graph: &LabeledGraph, code: &DfsCode, limit: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if limit == 0 || code.is_empty() {
        return out;
    }
    let _ = search(graph, code, &mut |map| {
        out.push(map.iter().map(|&v| v as u32).collect());
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

fn search(
    graph: &LabeledGraph,
    code: &DfsCode,
    visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let first = code.edges()[0];
    let mut map = vec![usize::MAX; code.vertex_count()];
    let mut used = vec![false; graph.vertex_count()];
    for start in 0..graph.vertex_count() {
        if graph.vertex_label(start) != first.u_label {
            continue;
        }
        map[0] = start;
        used[start] = true;
        let flow = step(graph, code, 0, &mut map, &mut used, visit);
        used[start] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

fn step(
    graph: &LabeledGraph,
    code: &DfsCode,
    k: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let Some(&e) = code.edges().get(k) else {
        return visit(map);
    };
    if e.is_forward() {
        let from = map[e.u];
        for n in graph.neighbors(from) {
            if used[n.vertex] || n.label != e.e_label || graph.vertex_label(n.vertex) != e.v_label {
                continue;
            }
            map[e.v] = n.vertex;
            used[n.vertex] = true;
            let flow = step(graph, code, k + 1, map, used, visit);
            used[n.vertex] = false;
            map[e.v] = usize::MAX;
            flow?;
        }
        ControlFlow::Continue(())
    } else if graph.edge_label(map[e.u], map[e.v]) == Some(e.e_label) {
        step(graph, code, k + 1, map, used, visit)
    } else {
        ControlFlow::Continue(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::code::DfsEdge;
    use crate::graph::Edge;

    fn uniform(n: usize, pairs: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::new(
            0,
            vec![0; n],
            pairs.iter().map(|&(u, v)| Edge { u, v, label: 0 }).collect(),
        )
    }

    fn e(u: usize, v: usize) -> DfsEdge {
        DfsEdge::new(u, v, 0, 0, 0)
    }

    #[test]
    fn single_edge_found() {
        let g = uniform(2, &[(0, 1)]);
        assert!(contains(&g, &DfsCode::new(vec![e(0, 1)])));
        let other = DfsCode::new(vec![DfsEdge::new(0, 1, 0, 0, 1)]);
        assert!(!contains(&g, &other));
    }

    #[test]
    fn triangle_not_in_path() {
        let path = uniform(3, &[(0, 1), (1, 2)]);
        let tri = DfsCode::new(vec![e(0, 1), e(1, 2), e(2, 0)]);
        assert!(!contains(&path, &tri));
    }

    #[test]
    fn four_cycle_in_k4() {
        let k4 = uniform(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c4 = DfsCode::new(vec![e(0, 1), e(1, 2), e(2, 3), e(3, 0)]);
        assert!(contains(&k4, &c4));
        // 4! maps, each cycle counted with all rotations/reflections
        assert_eq!(embeddings(&k4, &c4, usize::MAX).len(), 24);
        assert_eq!(embeddings(&k4, &c4, 5).len(), 5);
    }

    #[test]
    fn embedding_is_injective() {
        // star with three leaves cannot host a 3-edge path (needs 4 distinct vertices on a line)
        let star = uniform(4, &[(0, 1), (0, 2), (0, 3)]);
        let p3 = DfsCode::new(vec![e(0, 1), e(1, 2), e(2, 3)]);
        assert!(!contains(&star, &p3));
    }
}
