//! Comparison baseline: identical quantum feature extraction, but classical
//! linear sum aggregation in place of the per-edge quantum circuits.

use crate::error::{Error, Result};
use crate::graph::FeatureGraph;
use crate::qfe::{extract_all, EntanglerParams, NodeEncoding};
use crate::qmp::EmbeddingTable;

/// Sum aggregation over the neighborhood: `h'_u = sum_{v in N(u)} h_v`, with
/// the node's own encoding included when `include_self` is set (the
/// self-loop convention of adjacency-plus-identity propagation). No degree
/// normalization and no learned transform.
pub fn classical_message_pass(
    encodings: &[NodeEncoding],
    graph: &FeatureGraph,
    include_self: bool,
) -> Result<EmbeddingTable> {
    if encodings.len() != graph.num_nodes() {
        return Err(Error::DimensionMismatch {
            context: "encodings vs graph node count",
            expected: graph.num_nodes(),
            actual: encodings.len(),
        });
    }
    let n = graph.num_nodes();
    let dim = encodings.first().map_or(0, NodeEncoding::len);
    for e in encodings {
        if e.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "encoding lengths",
                expected: dim,
                actual: e.len(),
            });
        }
    }

    let mut vectors: Vec<Vec<f64>> = if include_self {
        encodings.iter().map(|e| e.values().to_vec()).collect()
    } else {
        vec![vec![0.0; dim]; n]
    };
    let mut multiplicity = vec![usize::from(include_self); n];
    for &(u, v) in graph.edges() {
        for (node, other) in [(u, v), (v, u)] {
            for (acc, x) in vectors[node].iter_mut().zip(encodings[other].values()) {
                *acc += x;
            }
            multiplicity[node] += 1;
        }
    }
    Ok(EmbeddingTable::new(vectors, multiplicity))
}

/// Full hybrid embedding: quantum feature extraction followed by classical
/// sum aggregation.
pub fn hybrid_embed(
    graph: &FeatureGraph,
    qfe_params: &EntanglerParams,
    include_self: bool,
) -> Result<EmbeddingTable> {
    let encodings = extract_all(graph.features(), qfe_params)?;
    classical_message_pass(&encodings, graph, include_self)
}
