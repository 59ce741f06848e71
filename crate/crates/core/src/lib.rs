//! Discriminative frequent-subgraph mining for graph classification.
//!
//! The pipeline: load a TU-format dataset ([`tu`]), mine frequent canonical
//! DFS codes while capping how often each graph may keep generating
//! extensions ([`miner`]), pick a compact, high-information-gain subset that
//! covers the dataset ([`selector`]), embed graphs as normalized pattern
//! incidence vectors and classify them with a shallow softmax model
//! ([`model`]), all evaluated by seeded stratified cross-validation
//! ([`cv`]). [`oracle`] holds slow brute-force references used by tests.

pub mod cv;
pub mod dfs;
pub mod error;
pub mod graph;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod selector;
pub mod tu;

pub use error::{Error, Result};
pub use graph::{Edge, GraphDataset, Label, LabeledGraph};
