use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::graph::{Edge, Label, LabeledGraph};

/// One step of a DFS code: an edge between discovery indices `u` and `v`.
/// Forward when `u < v` (discovers `v`), backward when `u > v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DfsEdge {
    pub u: usize,
    pub v: usize,
    pub u_label: Label,
    pub v_label: Label,
    pub e_label: Label,
}

impl DfsEdge {
    pub fn new(u: usize, v: usize, u_label: Label, v_label: Label, e_label: Label) -> Self {
        DfsEdge { u, v, u_label, v_label, e_label }
    }

    pub fn is_forward(&self) -> bool {
        self.u < self.v
    }

    fn structural_cmp(&self, other: &DfsEdge) -> Ordering {
        match (self.is_forward(), other.is_forward()) {
            // deeper origin first among forward edges growing the same vertex
            (true, true) => self.v.cmp(&other.v).then(other.u.cmp(&self.u)),
            (false, false) => self.u.cmp(&other.u).then(self.v.cmp(&other.v)),
            (false, true) => {
                if self.u < other.v {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (true, false) => {
                if self.v <= other.u {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

/// gSpan edge order: structure first (backward before forward at the same
/// step, forward edges from deeper rightmost-path vertices first), then
/// `(u_label, e_label, v_label)`.
impl Ord for DfsEdge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.structural_cmp(other)
            .then(self.u_label.cmp(&other.u_label))
            .then(self.e_label.cmp(&other.e_label))
            .then(self.v_label.cmp(&other.v_label))
    }
}

impl PartialOrd for DfsEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DfsEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.u, self.v, self.u_label, self.e_label, self.v_label)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DfsCode {
    edges: Vec<DfsEdge>,
}

/// Lexicographic comparison of two codes under the gSpan edge order; a
/// proper prefix is smaller.
pub fn compare_codes(a: &DfsCode, b: &DfsCode) -> Ordering {
    a.edges.cmp(&b.edges)
}

impl Ord for DfsCode {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_codes(self, other)
    }
}

impl PartialOrd for DfsCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DfsCode {
    pub fn new(edges: Vec<DfsEdge>) -> Self {
        DfsCode { edges }
    }

    pub fn edges(&self) -> &[DfsEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn push(&mut self, e: DfsEdge) {
        self.edges.push(e);
    }

    pub fn pop(&mut self) -> Option<DfsEdge> {
        self.edges.pop()
    }

    pub fn extended(&self, e: DfsEdge) -> DfsCode {
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.extend_from_slice(&self.edges);
        edges.push(e);
        DfsCode { edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0)
    }

    /// Vertex labels indexed by discovery index.
    pub fn vertex_labels(&self) -> Vec<Label> {
        let mut labels = vec![0; self.vertex_count()];
        for e in &self.edges {
            labels[e.u] = e.u_label;
            labels[e.v] = e.v_label;
        }
        labels
    }

    /// Discovery indices on the rightmost path, from the rightmost vertex
    /// back to the root.
    pub fn rightmost_path(&self) -> Vec<usize> {
        let mut path = Vec::new();
        let mut target = None;
        for e in self.edges.iter().rev() {
            if !e.is_forward() {
                continue;
            }
            match target {
                None => {
                    path.push(e.v);
                    path.push(e.u);
                    target = Some(e.u);
                }
                Some(t) if e.v == t => {
                    path.push(e.u);
                    target = Some(e.u);
                }
                _ => {}
            }
        }
        path
    }

    /// The pattern graph this code describes; vertex ids are discovery
    /// indices.
    pub fn to_graph(&self, graph_id: usize) -> LabeledGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { u: e.u, v: e.v, label: e.e_label })
            .collect();
        LabeledGraph::new(graph_id, self.vertex_labels(), edges)
    }

    /// Checks that the sequence is a well-formed gSpan DFS code: starts with
    /// `(0,1)`, grows forward edges from the rightmost path to the next fresh
    /// index, closes backward edges from the rightmost vertex to a
    /// rightmost-path ancestor without repeating an edge, and keeps vertex
    /// labels consistent.
    pub fn is_valid(&self) -> bool {
        let Some(first) = self.edges.first() else {
            return false;
        };
        if (first.u, first.v) != (0, 1) {
            return false;
        }
        let mut labels = vec![first.u_label, first.v_label];
        let mut seen = vec![(0usize, 1usize)];
        for k in 1..self.edges.len() {
            let e = self.edges[k];
            let prefix = DfsCode { edges: self.edges[..k].to_vec() };
            let path = prefix.rightmost_path();
            let rightmost = labels.len() - 1;
            if e.is_forward() {
                if e.v != labels.len() || !path.contains(&e.u) || labels[e.u] != e.u_label {
                    return false;
                }
                labels.push(e.v_label);
            } else {
                if e.u != rightmost
                    || e.u == e.v
                    || !path[1..].contains(&e.v)
                    || labels[e.u] != e.u_label
                    || labels[e.v] != e.v_label
                {
                    return false;
                }
                let key = (e.v.min(e.u), e.v.max(e.u));
                if seen.contains(&key) {
                    return false;
                }
            }
            seen.push((e.u.min(e.v), e.u.max(e.v)));
        }
        true
    }
}

impl fmt::Display for DfsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for DfsCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Format(format!("malformed DFS code {s:?}"));
        let mut edges = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let inner = part.strip_prefix('(').and_then(|p| p.strip_suffix(')')).ok_or_else(bad)?;
            let nums: Vec<u64> = inner
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            let [u, v, lu, le, lv] = nums[..] else {
                return Err(bad());
            };
            edges.push(DfsEdge::new(u as usize, v as usize, lu as Label, lv as Label, le as Label));
        }
        Ok(DfsCode { edges })
    }
}

impl Serialize for DfsCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DfsCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: usize, v: usize, lu: Label, lv: Label, le: Label) -> DfsEdge {
        DfsEdge::new(u, v, lu, lv, le)
    }

    #[test]
    fn reflexive() {
        let a = DfsCode::new(vec![e(0, 1, 0, 0, 0), e(1, 2, 0, 1, 0)]);
        assert_eq!(compare_codes(&a, &a), Ordering::Equal);
    }

    #[test]
    fn fourth_component_breaks_tie() {
        let a = DfsCode::new(vec![e(0, 1, 0, 0, 0)]);
        let b = DfsCode::new(vec![e(0, 1, 0, 1, 0)]);
        assert_eq!(compare_codes(&a, &b), Ordering::Less);
    }

    #[test]
    fn edge_label_precedes_target_label() {
        // (0,1,a,b,x) vs (0,1,a,a,y): e_label x < y decides first
        assert!(e(0, 1, 0, 1, 0) < e(0, 1, 0, 0, 1));
    }

    #[test]
    fn backward_precedes_forward_at_same_step() {
        let prefix = vec![e(0, 1, 0, 0, 0), e(1, 2, 0, 0, 0)];
        let mut back = prefix.clone();
        back.push(e(2, 0, 0, 0, 0));
        let mut fwd = prefix;
        fwd.push(e(2, 3, 0, 0, 0));
        assert_eq!(compare_codes(&DfsCode::new(back), &DfsCode::new(fwd)), Ordering::Less);
    }

    #[test]
    fn deeper_forward_precedes_shallower() {
        assert!(e(1, 2, 9, 9, 9) < e(0, 2, 0, 0, 0));
    }

    #[test]
    fn prefix_is_smaller() {
        let a = DfsCode::new(vec![e(0, 1, 0, 0, 0)]);
        let b = a.extended(e(1, 2, 0, 0, 0));
        assert!(a < b);
    }

    #[test]
    fn rightmost_path_skips_side_branches() {
        let c = DfsCode::new(vec![
            e(0, 1, 0, 0, 0),
            e(1, 2, 0, 0, 0),
            e(2, 0, 0, 0, 0),
            e(0, 3, 0, 0, 0),
            e(3, 4, 0, 0, 0),
        ]);
        assert_eq!(c.rightmost_path(), vec![4, 3, 0]);
        assert!(c.is_valid());
    }

    #[test]
    fn validity_rejects_bad_codes() {
        assert!(!DfsCode::new(vec![]).is_valid());
        assert!(!DfsCode::new(vec![e(1, 0, 0, 0, 0)]).is_valid());
        // forward edge skipping an index
        assert!(!DfsCode::new(vec![e(0, 1, 0, 0, 0), e(1, 3, 0, 0, 0)]).is_valid());
        // backward edge repeating the tree edge
        assert!(!DfsCode::new(vec![e(0, 1, 0, 0, 0), e(1, 2, 0, 0, 0), e(2, 1, 0, 0, 0)]).is_valid());
        // label mismatch on an existing vertex
        assert!(!DfsCode::new(vec![e(0, 1, 0, 0, 0), e(1, 2, 1, 0, 0)]).is_valid());
    }

    #[test]
    fn text_form_round_trips() {
        let c = DfsCode::new(vec![e(0, 1, 2, 3, 4), e(1, 2, 3, 0, 1), e(2, 0, 0, 2, 1)]);
        let s = c.to_string();
        assert_eq!(s, "(0,1,2,4,3);(1,2,3,1,0);(2,0,0,1,2)");
        assert_eq!(s.parse::<DfsCode>().unwrap(), c);
        assert!("(0,1,2)".parse::<DfsCode>().is_err());
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<DfsCode>(&json).unwrap(), c);
    }
}
