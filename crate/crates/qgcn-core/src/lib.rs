//! Exactly simulated quantum graph convolutional networks at desk scale.
//!
//! The pipeline: per-node variational quantum feature extraction
//! ([`qfe`]) over an exact statevector simulator ([`sim`]), edge-local
//! qubit-efficient quantum message passing ([`qmp`]), and unsupervised
//! training with a Deep Graph Infomax objective ([`dgi`]). A hybrid baseline
//! with classical sum aggregation ([`hybrid`]), mutual k-NN graph
//! construction and dataset plumbing ([`graph`]), and a clustering
//! evaluation harness ([`eval`]) round out the experimental protocol.
//!
//! Data-parallel inner loops (per-node circuits, per-edge circuits,
//! finite-difference gradients, k-means restarts) run on rayon when the
//! default `parallel` feature is enabled and degrade to sequential loops
//! without it; results are bit-identical either way.

pub mod dgi;
pub mod error;
mod exec;
pub mod eval;
pub mod graph;
pub mod hybrid;
pub mod model;
pub mod qfe;
pub mod qmp;
pub mod sim;

pub use error::{Error, Result};
pub use graph::FeatureGraph;
pub use model::{Model, ModelSpec, Pipeline};
pub use qfe::{EntanglerParams, NodeEncoding, RotationKind};
pub use qmp::{Aggregation, EmbeddingTable, MixerSide, MpParams, ResourceReport};
pub use sim::{Angles3, Axis, StateVector};
