//! Community-based network immunization toolkit.
//!
//! Given an undirected social graph and a set of harmful spreader nodes, the
//! crate ranks the communities those spreaders reach (the `contain` module),
//! provides spectral node-immunization baselines (`shield`), and evaluates
//! immunization quality with an independent-cascade simulator (`icm`).

pub mod contain;
pub mod error;
pub mod graph;
pub mod icm;
pub mod louvain;
pub mod shield;
pub mod spectral;
pub mod structural;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{EdgeListFormat, ExternalId, Graph, GraphBuilder, NodeId, NodeSet, load_edge_list};
