//! DFS-code machinery: codes and their order, the canonical minimality
//! test, embedding search, and rightmost-path growth with occurrence lists.

mod canonical;
mod code;
mod extend;
mod matching;

pub use canonical::is_canonical;
pub use code::{compare_codes, DfsCode, DfsEdge};
pub use extend::{
    enumerate_single_edges, extend_filtered, rightmost_extensions, ExtendStats, GraphOccurrences,
    PatternRecord, VertexMap, DEFAULT_AUTOMORPHISM_CAP,
};
pub use matching::{contains, embeddings};
