//! Edge-local, qubit-efficient quantum message passing: per-edge 2n-qubit
//! circuits built from angle encoding, ZZ-phase couplings across matching
//! feature qubits, and X-mixer rotations, plus the full graph-embedding
//! orchestration and closed-form gate accounting.
//!
//! Each edge circuit starts from freshly angle-encoded node encodings, so no
//! more than `2n` qubits are ever simulated at once regardless of graph size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::FeatureGraph;
use crate::qfe::{extract_state, EntanglerParams, NodeEncoding};
use crate::sim::{angle_encode, Axis};

/// Which registers the X mixer acts on. `Both` keeps undirected edges
/// orientation-independent; `UOnly` follows the restricted single-register
/// form of the edge unitary literally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixerSide {
    Both,
    UOnly,
}

/// How multiple per-edge embeddings of a node are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Sum,
    Average,
}

/// Trainable message-passing ansatz: depth-p lists of cost angles `gammas`
/// and mixer angles `betas`, plus the structural mixer-side choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub mixer: MixerSide,
}

impl MpParams {
    /// Angles drawn uniformly from [-0.1, 0.1] with a seeded generator.
    pub fn seeded(depth: usize, mixer: MixerSide, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gammas = (0..depth).map(|_| rng.gen_range(-0.1..0.1)).collect();
        let betas = (0..depth).map(|_| rng.gen_range(-0.1..0.1)).collect();
        Self::new(gammas, betas, mixer)
    }

    pub fn zeroed(depth: usize, mixer: MixerSide) -> Result<Self> {
        Self::new(vec![0.0; depth], vec![0.0; depth], mixer)
    }

    pub fn new(gammas: Vec<f64>, betas: Vec<f64>, mixer: MixerSide) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::InvalidParameter(
                "message passing depth must be >= 1".into(),
            ));
        }
        if gammas.len() != betas.len() {
            return Err(Error::DimensionMismatch {
                context: "message passing gamma/beta lengths",
                expected: gammas.len(),
                actual: betas.len(),
            });
        }
        Ok(Self { gammas, betas, mixer })
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }
}

/// One refined embedding per node, together with the number of incident-edge
/// contributions that were aggregated into it (0 for isolated nodes, which
/// keep their extraction encoding unchanged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    vectors: Vec<Vec<f64>>,
    multiplicity: Vec<usize>,
}

impl EmbeddingTable {
    pub fn new(vectors: Vec<Vec<f64>>, multiplicity: Vec<usize>) -> Self {
        assert_eq!(vectors.len(), multiplicity.len());
        Self { vectors, multiplicity }
    }

    pub fn num_nodes(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn vector(&self, node: usize) -> &[f64] {
        &self.vectors[node]
    }

    pub fn multiplicity(&self, node: usize) -> usize {
        self.multiplicity[node]
    }
}

/// Instrumentation collected during [`graph_embed_with_stats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedStats {
    /// Largest register simulated at any point (read off live states).
    pub max_register_width: usize,
    /// Number of angle-encoding state preparations performed.
    pub angle_encoded_vectors: usize,
    /// Number of per-edge circuits executed.
    pub edge_circuits: usize,
}

/// Runs the edge-local message-passing circuit for one edge and returns the
/// Z expectations of both registers plus the register width used.
fn edge_circuit(
    h_u: &[f64],
    h_v: &[f64],
    params: &MpParams,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let n = h_u.len();
    if h_v.len() != n {
        return Err(Error::DimensionMismatch {
            context: "edge message pass encoding lengths",
            expected: n,
            actual: h_v.len(),
        });
    }
    let joint: Vec<f64> = h_u.iter().chain(h_v.iter()).copied().collect();
    let mut state = angle_encode(&joint)?;
    let width = state.num_qubits();
    for layer in 0..params.depth() {
        let gamma = params.gammas[layer];
        let beta = params.betas[layer];
        for k in 0..n {
            state.apply_zz_phase(k, n + k, gamma)?;
        }
        for q in 0..n {
            state.apply_axis_rotation(q, Axis::X, 2.0 * beta)?;
        }
        if params.mixer == MixerSide::Both {
            for q in n..2 * n {
                state.apply_axis_rotation(q, Axis::X, 2.0 * beta)?;
            }
        }
    }
    let z = state.expect_z_all();
    let (u_half, v_half) = z.split_at(n);
    Ok((u_half.to_vec(), v_half.to_vec(), width))
}

/// Message passing across one edge: prepares `|phi_u⟩ ⊗ |phi_v⟩` on 2n
/// qubits via angle encoding, applies the layered ZZ couplings and X mixers,
/// and returns the Z expectations split into the u and v halves.
pub fn edge_message_pass(
    h_u: &NodeEncoding,
    h_v: &NodeEncoding,
    params: &MpParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (u, v, _) = edge_circuit(h_u.values(), h_v.values(), params)?;
    Ok((u, v))
}

/// Full graph embedding: feature extraction on every node, one message-pass
/// circuit per edge, then refinement by combining each node's per-edge
/// embeddings (in ascending edge order, so results are bit-reproducible).
/// Nodes without edges keep their extraction encoding.
pub fn graph_embed(
    graph: &FeatureGraph,
    qfe_params: &EntanglerParams,
    mp_params: &MpParams,
    aggregation: Aggregation,
) -> Result<EmbeddingTable> {
    graph_embed_with_stats(graph, qfe_params, mp_params, aggregation).map(|(table, _)| table)
}

/// [`graph_embed`] returning instrumentation alongside the table.
pub fn graph_embed_with_stats(
    graph: &FeatureGraph,
    qfe_params: &EntanglerParams,
    mp_params: &MpParams,
    aggregation: Aggregation,
) -> Result<(EmbeddingTable, EmbedStats)> {
    let mut stats = EmbedStats::default();

    // Feature extraction, one n-qubit register at a time.
    let extracted: Vec<(NodeEncoding, usize)> =
        exec::try_map_indexed(graph.features(), |node, row| {
            let state = extract_state(row, qfe_params).map_err(|e| match e {
                Error::ZeroVector => Error::ZeroFeatureRow { node },
                other => other,
            })?;
            let width = state.num_qubits();
            Ok((NodeEncoding::new(state.expect_z_all()), width))
        })?;
    for (_, width) in &extracted {
        stats.max_register_width = stats.max_register_width.max(*width);
    }
    let encodings: Vec<NodeEncoding> = extracted.into_iter().map(|(e, _)| e).collect();

    // Independent per-edge circuits.
    let edges = graph.edges();
    let contributions: Vec<(Vec<f64>, Vec<f64>, usize)> =
        exec::try_map_indexed(edges, |_, &(u, v)| {
            edge_circuit(encodings[u].values(), encodings[v].values(), mp_params)
        })?;

    // Serialized refinement in ascending edge order.
    let mut vectors: Vec<Vec<f64>> = encodings
        .iter()
        .map(|e| e.values().to_vec())
        .collect();
    let mut multiplicity = vec![0usize; graph.num_nodes()];
    for (&(u, v), (cu, cv, width)) in edges.iter().zip(&contributions) {
        stats.max_register_width = stats.max_register_width.max(*width);
        stats.angle_encoded_vectors += 2;
        stats.edge_circuits += 1;
        for (node, contrib) in [(u, cu), (v, cv)] {
            if multiplicity[node] == 0 {
                vectors[node].copy_from_slice(contrib);
            } else {
                for (acc, c) in vectors[node].iter_mut().zip(contrib) {
                    *acc += c;
                }
            }
            multiplicity[node] += 1;
        }
    }
    if aggregation == Aggregation::Average {
        for (vec, &m) in vectors.iter_mut().zip(&multiplicity) {
            if m > 1 {
                for v in vec.iter_mut() {
                    *v /= m as f64;
                }
            }
        }
    }

    debug_assert!(stats.max_register_width <= 2 * qfe_params.num_qubits);
    Ok((EmbeddingTable::new(vectors, multiplicity), stats))
}

/// Exact gate and encoding counts for one embedding pass over a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub feature_dim: usize,
    pub num_qubits: usize,
    pub depth: usize,
    /// Amplitude-encoding rotations, counted as d per node.
    pub amplitude_encode_rotations: usize,
    /// Angle-encoded vectors: one per edge endpoint visit, 2|E| total.
    pub angle_encoded_vectors: usize,
    /// RX rotations spent on angle encoding: n per encoded vector.
    pub angle_encode_rotations: usize,
    /// ZZ couplings: n per edge per layer.
    pub zz_terms: usize,
    /// CNOTs from the ZZ decomposition: 2 per coupling.
    pub cnot_gates: usize,
    /// RZ rotations from the ZZ decomposition: 1 per coupling.
    pub rz_gates: usize,
    /// Mixer RX rotations per edge per layer: 2n (both registers) or n.
    pub rx_gates: usize,
    /// Widest register the embedding run needs: 2n with edges, n without.
    pub max_register_width: usize,
}

impl ResourceReport {
    pub fn message_passing_gates(&self) -> usize {
        self.cnot_gates + self.rz_gates + self.rx_gates
    }
}

/// Closed-form resource accounting for embedding `graph` with `n`-qubit
/// registers and depth-`p` message passing.
pub fn count_resources(
    graph: &FeatureGraph,
    num_qubits: usize,
    depth: usize,
    mixer: MixerSide,
) -> ResourceReport {
    let nodes = graph.num_nodes();
    let edges = graph.num_edges();
    let zz_terms = edges * depth * num_qubits;
    let mixer_per_edge_layer = match mixer {
        MixerSide::Both => 2 * num_qubits,
        MixerSide::UOnly => num_qubits,
    };
    ResourceReport {
        num_nodes: nodes,
        num_edges: edges,
        feature_dim: graph.feature_dim(),
        num_qubits,
        depth,
        amplitude_encode_rotations: nodes * graph.feature_dim(),
        angle_encoded_vectors: 2 * edges,
        angle_encode_rotations: 2 * edges * num_qubits,
        zz_terms,
        cnot_gates: 2 * zz_terms,
        rz_gates: zz_terms,
        rx_gates: edges * depth * mixer_per_edge_layer,
        max_register_width: if edges > 0 { 2 * num_qubits } else { num_qubits },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FeatureGraph;
    use crate::qfe::extract_all;

    const TOL: f64 = 1e-12;

    fn enc(values: &[f64]) -> NodeEncoding {
        NodeEncoding::new(values.to_vec())
    }

    #[test]
    fn identity_parameters_return_cos_2h() {
        let params = MpParams::zeroed(1, MixerSide::Both).unwrap();
        let h_u = [0.2, -0.5, 0.9];
        let h_v = [0.1, 0.4, -0.3];
        let (out_u, out_v) =
            edge_message_pass(&enc(&h_u), &enc(&h_v), &params).unwrap();
        for (o, h) in out_u.iter().zip(&h_u) {
            assert!((o - (2.0 * h).cos()).abs() < TOL);
        }
        for (o, h) in out_v.iter().zip(&h_v) {
            assert!((o - (2.0 * h).cos()).abs() < TOL);
        }
    }

    #[test]
    fn zero_encodings_give_cos_2beta_everywhere() {
        // On |0...0> every ZZ coupling is a global phase, so only the mixer
        // shows up in the expectations.
        let params = MpParams::new(vec![0.8], vec![0.37], MixerSide::Both).unwrap();
        let zero = enc(&[0.0, 0.0]);
        let (out_u, out_v) = edge_message_pass(&zero, &zero, &params).unwrap();
        for o in out_u.iter().chain(&out_v) {
            assert!((o - (2.0 * 0.37_f64).cos()).abs() < TOL);
        }
    }

    #[test]
    fn u_only_mixer_leaves_v_register_diagonal() {
        // With the mixer restricted to u's register, v's qubits only pick up
        // phases, so their expectations stay cos(2 h_v).
        let params = MpParams::new(vec![0.6], vec![0.9], MixerSide::UOnly).unwrap();
        let h_u = [0.3, -0.2];
        let h_v = [0.7, 0.15];
        let (_, out_v) = edge_message_pass(&enc(&h_u), &enc(&h_v), &params).unwrap();
        for (o, h) in out_v.iter().zip(&h_v) {
            assert!((o - (2.0 * h).cos()).abs() < TOL);
        }
    }

    #[test]
    fn edge_symmetry_under_swap() {
        let params = MpParams::new(vec![0.5, -0.3], vec![0.2, 0.7], MixerSide::Both).unwrap();
        let h_u = enc(&[0.4, -0.6, 0.1]);
        let h_v = enc(&[-0.2, 0.8, 0.5]);
        let (a, b) = edge_message_pass(&h_u, &h_v, &params).unwrap();
        let (b2, a2) = edge_message_pass(&h_v, &h_u, &params).unwrap();
        for (x, y) in a.iter().zip(&a2).chain(b.iter().zip(&b2)) {
            assert!((x - y).abs() < TOL);
        }
    }

    #[test]
    fn mismatched_encoding_lengths_rejected() {
        let params = MpParams::zeroed(1, MixerSide::Both).unwrap();
        let err = edge_message_pass(&enc(&[0.1, 0.2]), &enc(&[0.3]), &params);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    fn small_graph(edges: Vec<(usize, usize)>) -> FeatureGraph {
        let features = vec![
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.2, 0.8, 0.1, 0.4],
            vec![0.1, 0.3, 0.7, 0.2],
        ];
        FeatureGraph::new(features, edges, None).unwrap()
    }

    #[test]
    fn edgeless_graph_embeds_to_extraction_output() {
        let graph = small_graph(vec![]);
        let qfe = EntanglerParams::seeded(2, 2, 1, crate::qfe::RotationKind::Full, 9).unwrap();
        let mp = MpParams::seeded(1, MixerSide::Both, 10).unwrap();
        let (table, stats) =
            graph_embed_with_stats(&graph, &qfe, &mp, Aggregation::Sum).unwrap();
        let encodings = extract_all(graph.features(), &qfe).unwrap();
        for (node, e) in encodings.iter().enumerate() {
            assert_eq!(table.vector(node), e.values());
            assert_eq!(table.multiplicity(node), 0);
        }
        assert_eq!(stats.max_register_width, 2);
        assert_eq!(stats.angle_encoded_vectors, 0);
    }

    #[test]
    fn single_edge_keeps_unsummed_halves() {
        let graph = small_graph(vec![(0, 1)]);
        let qfe = EntanglerParams::seeded(2, 1, 1, crate::qfe::RotationKind::Full, 4).unwrap();
        let mp = MpParams::seeded(1, MixerSide::Both, 5).unwrap();
        let table = graph_embed(&graph, &qfe, &mp, Aggregation::Sum).unwrap();
        let encodings = extract_all(graph.features(), &qfe).unwrap();
        let (u, v) = edge_message_pass(&encodings[0], &encodings[1], &mp).unwrap();
        assert_eq!(table.vector(0), u.as_slice());
        assert_eq!(table.vector(1), v.as_slice());
        assert_eq!(table.multiplicity(0), 1);
        assert_eq!(table.vector(2), encodings[2].values());
    }

    #[test]
    fn path_graph_middle_node_sums_both_edges() {
        let graph = small_graph(vec![(0, 1), (1, 2)]);
        let qfe = EntanglerParams::seeded(2, 1, 1, crate::qfe::RotationKind::Full, 6).unwrap();
        let mp = MpParams::seeded(1, MixerSide::Both, 7).unwrap();
        let table = graph_embed(&graph, &qfe, &mp, Aggregation::Sum).unwrap();

        let encodings = extract_all(graph.features(), &qfe).unwrap();
        let (a_u, a_v) = edge_message_pass(&encodings[0], &encodings[1], &mp).unwrap();
        let (b_u, b_v) = edge_message_pass(&encodings[1], &encodings[2], &mp).unwrap();
        let middle: Vec<f64> = a_v.iter().zip(&b_u).map(|(x, y)| x + y).collect();
        assert_eq!(table.vector(0), a_u.as_slice());
        assert_eq!(table.vector(1), middle.as_slice());
        assert_eq!(table.vector(2), b_v.as_slice());
        assert_eq!(table.multiplicity(1), 2);
    }

    #[test]
    fn average_aggregation_divides_by_multiplicity() {
        let graph = small_graph(vec![(0, 1), (1, 2)]);
        let qfe = EntanglerParams::seeded(2, 1, 1, crate::qfe::RotationKind::Full, 6).unwrap();
        let mp = MpParams::seeded(1, MixerSide::Both, 7).unwrap();
        let summed = graph_embed(&graph, &qfe, &mp, Aggregation::Sum).unwrap();
        let averaged = graph_embed(&graph, &qfe, &mp, Aggregation::Average).unwrap();
        for (s, a) in summed.vector(1).iter().zip(averaged.vector(1)) {
            assert!((s / 2.0 - a).abs() < TOL);
        }
        assert_eq!(summed.vector(0), averaged.vector(0));
    }

    #[test]
    fn embedding_magnitudes_bounded_by_degree() {
        let graph = small_graph(vec![(0, 1), (0, 2), (1, 2)]);
        let qfe = EntanglerParams::seeded(2, 2, 1, crate::qfe::RotationKind::Full, 13).unwrap();
        let mp = MpParams::seeded(2, MixerSide::Both, 14).unwrap();
        let table = graph_embed(&graph, &qfe, &mp, Aggregation::Sum).unwrap();
        for node in 0..graph.num_nodes() {
            let degree = graph.degree(node).max(1);
            for v in table.vector(node) {
                assert!(v.abs() <= degree as f64 + TOL);
            }
        }
    }

    #[test]
    fn resource_counts_for_single_edge() {
        let features = vec![vec![1.0; 16], vec![0.5; 16]];
        let graph = FeatureGraph::new(features, vec![(0, 1)], None).unwrap();
        let report = count_resources(&graph, 4, 1, MixerSide::Both);
        assert_eq!(report.angle_encoded_vectors, 2);
        assert_eq!(report.cnot_gates, 8);
        assert_eq!(report.rz_gates, 4);
        assert_eq!(report.rx_gates, 8);
        assert_eq!(report.amplitude_encode_rotations, 32);
        assert_eq!(report.max_register_width, 8);
    }

    #[test]
    fn resource_counts_edgeless_graph() {
        let features = vec![vec![1.0, 0.2], vec![0.5, 0.1]];
        let graph = FeatureGraph::new(features, vec![], None).unwrap();
        let report = count_resources(&graph, 1, 1, MixerSide::Both);
        assert_eq!(report.angle_encoded_vectors, 0);
        assert_eq!(report.message_passing_gates(), 0);
        assert_eq!(report.max_register_width, 1);
    }
}
