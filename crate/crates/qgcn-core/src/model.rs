//! Trainable model state for both pipelines: the shared feature-extraction
//! ansatz, the message-passing parameters (quantum pipeline only), and the
//! classical training head.

use serde::{Deserialize, Serialize};

use crate::dgi::DgiParams;
use crate::error::Result;
use crate::graph::FeatureGraph;
use crate::hybrid;
use crate::qfe::{EntanglerParams, RotationKind};
use crate::qmp::{self, Aggregation, EmbedStats, EmbeddingTable, MixerSide, MpParams};

/// Which message-passing mechanism produces node embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Per-edge 2n-qubit circuits.
    Quantum,
    /// Classical sum aggregation over neighbors (comparison baseline).
    Hybrid,
}

/// Structural (non-trainable) description of a model; everything needed to
/// re-create parameter shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub pipeline: Pipeline,
    pub num_qubits: usize,
    pub layers: usize,
    pub range: usize,
    pub rotation: RotationKind,
    pub depth: usize,
    pub mixer: MixerSide,
    pub aggregation: Aggregation,
    /// Whether the hybrid baseline's sum includes the node itself.
    pub include_self: bool,
}

impl ModelSpec {
    /// Defaults for a feature dimension `d`: `n = ceil(log2 d)` qubits, two
    /// entangling layers at range 1 with full rotations, single-layer
    /// message passing with the both-register mixer and sum aggregation.
    pub fn for_feature_dim(d: usize) -> Self {
        let num_qubits = if d <= 2 {
            1
        } else {
            (usize::BITS - (d - 1).leading_zeros()) as usize
        };
        Self {
            pipeline: Pipeline::Quantum,
            num_qubits,
            layers: 2,
            range: 1,
            rotation: RotationKind::Full,
            depth: 1,
            mixer: MixerSide::Both,
            aggregation: Aggregation::Sum,
            include_self: true,
        }
    }
}

/// All trainable parameters plus the structural choices they were built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub pipeline: Pipeline,
    pub aggregation: Aggregation,
    pub include_self: bool,
    pub entangler: EntanglerParams,
    pub mp: MpParams,
    pub dgi: DgiParams,
}

impl Model {
    /// Seeded initialization; sub-seeds are derived per parameter group so
    /// the layout of one group does not perturb another.
    pub fn init(spec: &ModelSpec, seed: u64) -> Result<Self> {
        Ok(Self {
            pipeline: spec.pipeline,
            aggregation: spec.aggregation,
            include_self: spec.include_self,
            entangler: EntanglerParams::seeded(
                spec.num_qubits,
                spec.layers,
                spec.range,
                spec.rotation,
                derive_seed(seed, 1),
            )?,
            mp: MpParams::seeded(spec.depth, spec.mixer, derive_seed(seed, 2))?,
            dgi: DgiParams::seeded(spec.num_qubits, derive_seed(seed, 3)),
        })
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            pipeline: self.pipeline,
            num_qubits: self.entangler.num_qubits,
            layers: self.entangler.num_layers(),
            range: self.entangler.range,
            rotation: self.entangler.rotation,
            depth: self.mp.depth(),
            mixer: self.mp.mixer,
            aggregation: self.aggregation,
            include_self: self.include_self,
        }
    }

    /// Embeds every node of the graph with this model's pipeline.
    pub fn embed(&self, graph: &FeatureGraph) -> Result<EmbeddingTable> {
        match self.pipeline {
            Pipeline::Quantum => {
                qmp::graph_embed(graph, &self.entangler, &self.mp, self.aggregation)
            }
            Pipeline::Hybrid => hybrid::hybrid_embed(graph, &self.entangler, self.include_self),
        }
    }

    /// [`Model::embed`] with instrumentation (quantum pipeline only; the
    /// hybrid pipeline reports zero quantum message-passing activity beyond
    /// extraction width).
    pub fn embed_with_stats(&self, graph: &FeatureGraph) -> Result<(EmbeddingTable, EmbedStats)> {
        match self.pipeline {
            Pipeline::Quantum => {
                qmp::graph_embed_with_stats(graph, &self.entangler, &self.mp, self.aggregation)
            }
            Pipeline::Hybrid => {
                let table = hybrid::hybrid_embed(graph, &self.entangler, self.include_self)?;
                let stats = EmbedStats {
                    max_register_width: self.entangler.num_qubits,
                    angle_encoded_vectors: 0,
                    edge_circuits: 0,
                };
                Ok((table, stats))
            }
        }
    }

    /// Number of quantum parameters exposed to the finite-difference
    /// gradient loop: the entangler angles, plus the message-passing angles
    /// when `train_mp` is set (quantum pipeline only).
    pub fn quantum_param_count(&self, train_mp: bool) -> usize {
        let mp = if train_mp && self.pipeline == Pipeline::Quantum {
            2 * self.mp.depth()
        } else {
            0
        };
        self.entangler.trainable_len() + mp
    }

    /// Reads one quantum parameter by flat index (entangler angles first,
    /// then gammas, then betas).
    pub fn quantum_param(&self, index: usize) -> f64 {
        let ent = self.entangler.trainable_len();
        if index < ent {
            self.entangler.trainable_get(index)
        } else {
            let rest = index - ent;
            let p = self.mp.depth();
            if rest < p {
                self.mp.gammas[rest]
            } else {
                self.mp.betas[rest - p]
            }
        }
    }

    /// Adds `delta` to one quantum parameter by flat index.
    pub fn shift_quantum_param(&mut self, index: usize, delta: f64) {
        let ent = self.entangler.trainable_len();
        if index < ent {
            self.entangler.trainable_add(index, delta);
        } else {
            let rest = index - ent;
            let p = self.mp.depth();
            if rest < p {
                self.mp.gammas[rest] += delta;
            } else {
                self.mp.betas[rest - p] += delta;
            }
        }
    }
}

/// Splitmix64-style finalizer for deriving independent sub-seeds from a base
/// seed and a stream index.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_defaults_derive_qubits_from_dimension() {
        assert_eq!(ModelSpec::for_feature_dim(1).num_qubits, 1);
        assert_eq!(ModelSpec::for_feature_dim(2).num_qubits, 1);
        assert_eq!(ModelSpec::for_feature_dim(5).num_qubits, 3);
        assert_eq!(ModelSpec::for_feature_dim(16).num_qubits, 4);
    }

    #[test]
    fn init_is_deterministic_and_round_trips_spec() {
        let spec = ModelSpec::for_feature_dim(8);
        let a = Model::init(&spec, 42).unwrap();
        let b = Model::init(&spec, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.spec(), spec);
        let c = Model::init(&spec, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn quantum_param_indexing_covers_entangler_then_mp() {
        let spec = ModelSpec {
            depth: 2,
            ..ModelSpec::for_feature_dim(4)
        };
        let mut model = Model::init(&spec, 1).unwrap();
        let ent = model.entangler.trainable_len();
        assert_eq!(model.quantum_param_count(true), ent + 4);
        assert_eq!(model.quantum_param_count(false), ent);

        let before = model.quantum_param(ent + 1);
        model.shift_quantum_param(ent + 1, 0.5);
        assert!((model.mp.gammas[1] - before - 0.5).abs() < 1e-15);
        let before = model.quantum_param(ent + 2);
        model.shift_quantum_param(ent + 2, -0.25);
        assert!((model.mp.betas[0] - before + 0.25).abs() < 1e-15);
    }

    #[test]
    fn derive_seed_separates_streams() {
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
