//! Reader and writer for the TU benchmark text format.
//!
//! A dataset `DS` lives in one directory as `DS_A.txt` (1-based global node
//! pairs, usually listed in both directions), `DS_graph_indicator.txt`
//! (graph id per node), `DS_graph_labels.txt` (class per graph) and the
//! optional `DS_node_labels.txt` / `DS_edge_labels.txt`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{Edge, GraphDataset, Label, LabelTables, LabeledGraph};

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Use vertex degree as the vertex label when the node label file is
    /// absent. Off by default: such datasets get a single uniform label.
    pub degree_labels: bool,
}

struct Lines {
    path: PathBuf,
    rows: Vec<(usize, String)>,
}

impl Lines {
    fn read(path: PathBuf, mandatory: bool) -> Result<Option<Lines>> {
        if !path.is_file() {
            return if mandatory { Err(Error::MissingFile(path)) } else { Ok(None) };
        }
        let text = fs::read_to_string(&path)?;
        let rows = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.to_string()))
            .collect();
        Ok(Some(Lines { path, rows }))
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn integers(&self) -> Result<Vec<i64>> {
        self.rows
            .iter()
            .map(|(line, text)| {
                // attribute-style rows ("3, 0.5") keep only the first column
                let tok = text.split(',').next().unwrap_or("").trim();
                tok.parse::<i64>()
                    .map_err(|_| self.err(*line, format!("expected an integer, found {tok:?}")))
            })
            .collect()
    }

    fn pairs(&self) -> Result<Vec<(usize, i64, i64)>> {
        self.rows
            .iter()
            .map(|(line, text)| {
                let mut it = text.split(',').map(str::trim);
                let mut next = || -> Result<i64> {
                    let tok = it.next().unwrap_or("");
                    tok.parse::<i64>()
                        .map_err(|_| self.err(*line, format!("expected an integer, found {tok:?}")))
                };
                let a = next()?;
                let b = next()?;
                Ok((*line, a, b))
            })
            .collect()
    }
}

fn file(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

/// Maps raw values to dense ids in ascending raw order.
fn intern(raw: &[i64]) -> (HashMap<i64, Label>, Vec<i64>) {
    let sorted: Vec<i64> = raw.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let map = sorted.iter().enumerate().map(|(i, &r)| (r, i as Label)).collect();
    (map, sorted)
}

pub fn load_tu_dataset(dir: impl AsRef<Path>, name: &str) -> Result<GraphDataset> {
    load_tu_dataset_with(dir, name, LoadOptions::default())
}

pub fn load_tu_dataset_with(dir: impl AsRef<Path>, name: &str, options: LoadOptions) -> Result<GraphDataset> {
    let dir = dir.as_ref();
    let adjacency = Lines::read(file(dir, name, "A"), true)?.expect("mandatory");
    let indicator = Lines::read(file(dir, name, "graph_indicator"), true)?.expect("mandatory");
    let graph_labels = Lines::read(file(dir, name, "graph_labels"), true)?.expect("mandatory");
    let node_labels = Lines::read(file(dir, name, "node_labels"), false)?;
    let edge_labels = Lines::read(file(dir, name, "edge_labels"), false)?;

    let raw_classes = graph_labels.integers()?;
    let n_graphs = raw_classes.len();
    if n_graphs == 0 {
        return Err(Error::EmptyDataset);
    }

    // node k (0-based global) -> (graph, local id)
    let owners = indicator.integers()?;
    let mut sizes = vec![0usize; n_graphs];
    let mut placement = Vec::with_capacity(owners.len());
    for (k, &gid) in owners.iter().enumerate() {
        if gid < 1 || gid as usize > n_graphs {
            return Err(indicator.err(
                indicator.rows[k].0,
                format!("graph id {gid} outside 1..={n_graphs}"),
            ));
        }
        let g = gid as usize - 1;
        placement.push((g, sizes[g]));
        sizes[g] += 1;
    }

    let raw_vertex: Vec<i64> = match &node_labels {
        Some(lines) => {
            let v = lines.integers()?;
            if v.len() != owners.len() {
                return Err(Error::Format(format!(
                    "{} has {} rows but there are {} nodes",
                    lines.path.display(),
                    v.len(),
                    owners.len()
                )));
            }
            v
        }
        None => vec![0; owners.len()],
    };

    let pairs = adjacency.pairs()?;
    let raw_edge: Vec<i64> = match &edge_labels {
        Some(lines) => {
            let v = lines.integers()?;
            if v.len() != pairs.len() {
                return Err(Error::Format(format!(
                    "{} has {} rows but {} has {}",
                    lines.path.display(),
                    v.len(),
                    adjacency.path.display(),
                    pairs.len()
                )));
            }
            v
        }
        None => vec![0; pairs.len()],
    };

    let mut edges: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); n_graphs];
    let mut seen: Vec<HashSet<(usize, usize)>> = vec![HashSet::new(); n_graphs];
    for (idx, &(line, a, b)) in pairs.iter().enumerate() {
        let node = |x: i64| -> Result<(usize, usize)> {
            if x < 1 || x as usize > placement.len() {
                return Err(adjacency.err(line, format!("node id {x} outside 1..={}", placement.len())));
            }
            Ok(placement[x as usize - 1])
        };
        let (ga, la) = node(a)?;
        let (gb, lb) = node(b)?;
        if ga != gb {
            return Err(adjacency.err(
                line,
                format!("edge ({a}, {b}) joins graph {} and graph {}", ga + 1, gb + 1),
            ));
        }
        if seen[ga].insert((la.min(lb), la.max(lb))) {
            edges[ga].push((la, lb, raw_edge[idx]));
        }
    }

    let mut raw_vertex = raw_vertex;
    if node_labels.is_none() && options.degree_labels {
        let mut degree: Vec<Vec<i64>> = sizes.iter().map(|&s| vec![0; s]).collect();
        for (g, list) in edges.iter().enumerate() {
            for &(a, b, _) in list {
                degree[g][a] += 1;
                if a != b {
                    degree[g][b] += 1;
                }
            }
        }
        for (k, &(g, local)) in placement.iter().enumerate() {
            raw_vertex[k] = degree[g][local];
        }
    }

    let (vmap, vertex_table) = intern(&raw_vertex);
    let kept_edge_raw: Vec<i64> = edges.iter().flatten().map(|e| e.2).collect();
    let (emap, edge_table) = intern(&kept_edge_raw);
    let (cmap, class_table) = intern(&raw_classes);

    let mut vertex_labels: Vec<Vec<Label>> = sizes.iter().map(|&s| vec![0; s]).collect();
    for (k, &(g, local)) in placement.iter().enumerate() {
        vertex_labels[g][local] = vmap[&raw_vertex[k]];
    }

    let graphs = vertex_labels
        .into_iter()
        .zip(edges)
        .enumerate()
        .map(|(g, (labels, list))| {
            let es = list
                .into_iter()
                .map(|(u, v, raw)| Edge { u, v, label: emap[&raw] })
                .collect();
            LabeledGraph::new(g, labels, es)
        })
        .collect();

    Ok(GraphDataset {
        name: name.to_string(),
        graphs,
        labels: raw_classes.iter().map(|r| cmap[r] as usize).collect(),
        class_count: class_table.len(),
        origin: (0..n_graphs).collect(),
        label_tables: LabelTables {
            vertex: vertex_table,
            edge: edge_table,
            class: class_table,
        },
    })
}

/// Writes `dataset` in TU format under `dir` with file prefix `name`, using
/// the raw label values. Every edge is listed in both directions.
pub fn write_tu_dataset(dataset: &GraphDataset, dir: impl AsRef<Path>, name: &str) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let tables = &dataset.label_tables;
    let raw = |table: &[i64], l: usize| table.get(l).copied().unwrap_or(l as i64);

    let (mut a, mut ind, mut nl, mut el, mut gl) =
        (String::new(), String::new(), String::new(), String::new(), String::new());
    let mut base = 0usize;
    for (gi, g) in dataset.graphs.iter().enumerate() {
        for &l in g.vertex_labels() {
            writeln!(ind, "{}", gi + 1).unwrap();
            writeln!(nl, "{}", raw(&tables.vertex, l as usize)).unwrap();
        }
        for e in g.edges() {
            let lab = raw(&tables.edge, e.label as usize);
            writeln!(a, "{}, {}", base + e.u + 1, base + e.v + 1).unwrap();
            writeln!(el, "{lab}").unwrap();
            if e.u != e.v {
                writeln!(a, "{}, {}", base + e.v + 1, base + e.u + 1).unwrap();
                writeln!(el, "{lab}").unwrap();
            }
        }
        base += g.vertex_count();
    }
    for &y in &dataset.labels {
        writeln!(gl, "{}", raw(&tables.class, y)).unwrap();
    }
    fs::write(file(dir, name, "A"), a)?;
    fs::write(file(dir, name, "graph_indicator"), ind)?;
    fs::write(file(dir, name, "node_labels"), nl)?;
    fs::write(file(dir, name, "edge_labels"), el)?;
    fs::write(file(dir, name, "graph_labels"), gl)?;
    Ok(())
}
