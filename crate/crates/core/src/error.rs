//! Error type shared by all modules of the toolkit.

use crate::graph::ExternalId;
use crate::spectral::EigenPair;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node id `{0}`")]
    UnknownNode(ExternalId),

    #[error("node index {index} out of range (graph has {n} nodes)")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("operation requires a non-empty graph")]
    EmptyGraph,

    #[error("operation requires a graph with positive edge weight")]
    NoEdges,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint undefined for isolated node `{0}`")]
    ConstraintUndefined(ExternalId),

    #[error("operation requires a non-empty node set")]
    EmptyNodeSet,

    #[error("no spreaders: the seed set is empty")]
    EmptySeeds,

    #[error(
        "budget unreachable: {requested} communities requested but the composed subgraph has \
         only {available} nodes"
    )]
    BudgetUnreachable { requested: usize, available: usize },

    #[error(
        "resolution sweep exhausted at gamma {gamma:.4} after {iterations} iterations: \
         found {found} intersecting communities, budget requires {required}"
    )]
    ResolutionExhausted {
        gamma: f64,
        iterations: usize,
        found: usize,
        required: usize,
    },

    #[error("ranking holds {available} communities, cannot immunize top {requested}")]
    NotEnoughCommunities { requested: usize, available: usize },

    #[error("power iteration did not converge within {max_iter} iterations (last estimate {})", last.lambda)]
    NoConvergence { max_iter: usize, last: Box<EigenPair> },
}
