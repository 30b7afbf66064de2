//! Graph-tensor encoding (GTE) for undirected spatial road graphs.
//!
//! The crate converts a [`SpatialGraph`] into a dense [`GteTensor`] that a
//! dense predictor can be trained against, decodes noisy tensors back into
//! graphs, evaluates the masked training loss, and scores reconstructed graphs
//! with the TOPO and APLS topology metrics. A synthetic road generator and an
//! experiment harness tie the pieces together.
//!
//! Coordinates are meters with the origin at the top-left corner, x to the
//! right and y downward, matching tensor cell indexing.

pub mod decoder;
pub mod encoder;
mod error;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod metrics;
mod par;
pub mod training;

pub use decoder::{decode, DecodeConfig, DecodeReport};
pub use encoder::{encode, EncodeConfig, Encoding, GteTensor};
pub use error::{Error, Result};
pub use geometry::Point;
pub use graph::{GraphStats, SpatialGraph, Vertex, VertexId};

/// Text graph format identifier.
pub const GRAPH_FORMAT: &str = "GRAPH1";
/// Binary tensor format identifier.
pub const TENSOR_FORMAT: &str = "GTE1";
