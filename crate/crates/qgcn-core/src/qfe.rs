//! Per-node variational quantum feature extraction: amplitude encoding,
//! stacked entangling blocks, and Pauli-Z readout producing the classical
//! node encoding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::sim::{amplitude_encode, Angles3, StateVector};

/// Per-qubit rotation used inside an entangling block: the full three-angle
/// rotation, or Z-rotations only (using the gamma angle).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationKind {
    Full,
    ZOnly,
}

/// Trainable feature-extraction ansatz: `num_layers` entangling blocks, each
/// a layer of per-qubit rotations followed by CNOTs pairing qubit `k` with
/// qubit `(k + range) mod n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglerParams {
    pub num_qubits: usize,
    pub range: usize,
    pub rotation: RotationKind,
    /// `num_layers x num_qubits` rotation angles.
    pub angles: Vec<Vec<Angles3>>,
}

impl EntanglerParams {
    /// Angles drawn uniformly from [-0.1, 0.1] with a seeded generator,
    /// keeping the initial circuit near identity.
    pub fn seeded(
        num_qubits: usize,
        num_layers: usize,
        range: usize,
        rotation: RotationKind,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles = (0..num_layers)
            .map(|_| {
                (0..num_qubits)
                    .map(|_| {
                        Angles3::new(
                            rng.gen_range(-0.1..0.1),
                            rng.gen_range(-0.1..0.1),
                            rng.gen_range(-0.1..0.1),
                        )
                    })
                    .collect()
            })
            .collect();
        Self::new(num_qubits, range, rotation, angles)
    }

    /// All-zero angles (every block acts as its CNOT layer only).
    pub fn zeroed(num_qubits: usize, num_layers: usize, range: usize) -> Result<Self> {
        Self::new(
            num_qubits,
            range,
            RotationKind::Full,
            vec![vec![Angles3::zero(); num_qubits]; num_layers],
        )
    }

    pub fn new(
        num_qubits: usize,
        range: usize,
        rotation: RotationKind,
        angles: Vec<Vec<Angles3>>,
    ) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidParameter("num_qubits must be >= 1".into()));
        }
        if range < 1 || range > num_qubits {
            return Err(Error::InvalidParameter(format!(
                "entangler range {range} outside [1, {num_qubits}]"
            )));
        }
        for layer in &angles {
            if layer.len() != num_qubits {
                return Err(Error::DimensionMismatch {
                    context: "entangler layer angle count",
                    expected: num_qubits,
                    actual: layer.len(),
                });
            }
        }
        Ok(Self {
            num_qubits,
            range,
            rotation,
            angles,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.angles.len()
    }

    /// Number of trainable angles: 3 per (layer, qubit) for full rotations,
    /// 1 for Z-only rotations.
    pub fn trainable_len(&self) -> usize {
        let per_site = match self.rotation {
            RotationKind::Full => 3,
            RotationKind::ZOnly => 1,
        };
        self.num_layers() * self.num_qubits * per_site
    }

    pub(crate) fn trainable_get(&self, index: usize) -> f64 {
        let (layer, qubit, slot) = self.locate(index);
        let a = &self.angles[layer][qubit];
        match slot {
            0 if self.rotation == RotationKind::ZOnly => a.gamma,
            0 => a.alpha,
            1 => a.beta,
            _ => a.gamma,
        }
    }

    pub(crate) fn trainable_add(&mut self, index: usize, delta: f64) {
        let (layer, qubit, slot) = self.locate(index);
        let a = &mut self.angles[layer][qubit];
        match slot {
            0 if self.rotation == RotationKind::ZOnly => a.gamma += delta,
            0 => a.alpha += delta,
            1 => a.beta += delta,
            _ => a.gamma += delta,
        }
    }

    fn locate(&self, index: usize) -> (usize, usize, usize) {
        let per_site = match self.rotation {
            RotationKind::Full => 3,
            RotationKind::ZOnly => 1,
        };
        let site = index / per_site;
        (site / self.num_qubits, site % self.num_qubits, index % per_site)
    }
}

/// Classical encoding of one node: per-qubit Z expectations, each in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEncoding {
    values: Vec<f64>,
}

impl NodeEncoding {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| (-1.0..=1.0).contains(v)));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// CNOT pairs of one entangling block: control `k`, target `(k + r) mod n`
/// for `k = 0 .. floor(n/r) - 1`. Pairs that would be self-controlled
/// (possible for n = 1 or r = n) are skipped.
fn cnot_pairs(num_qubits: usize, range: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..num_qubits / range).filter_map(move |k| {
        let target = (k + range) % num_qubits;
        (target != k).then_some((k, target))
    })
}

/// Applies one entangling block in place: a rotation on every qubit followed
/// by the ranged CNOT layer.
pub fn entangling_block(
    state: &mut StateVector,
    layer_angles: &[Angles3],
    range: usize,
    rotation: RotationKind,
) -> Result<()> {
    let n = state.num_qubits();
    if layer_angles.len() != n {
        return Err(Error::DimensionMismatch {
            context: "entangling block angle count",
            expected: n,
            actual: layer_angles.len(),
        });
    }
    if range < 1 || range > n {
        return Err(Error::InvalidParameter(format!(
            "entangler range {range} outside [1, {n}]"
        )));
    }
    for (qubit, angles) in layer_angles.iter().enumerate() {
        match rotation {
            RotationKind::Full => state.apply_rotation(qubit, *angles)?,
            RotationKind::ZOnly => {
                state.apply_axis_rotation(qubit, crate::sim::Axis::Z, angles.gamma)?
            }
        }
    }
    for (control, target) in cnot_pairs(n, range) {
        state.apply_cnot(control, target)?;
    }
    Ok(())
}

/// Amplitude-encodes `x` and runs all entangling blocks, returning the final
/// state. The feature dimension must satisfy `ceil(log2 d) == num_qubits`.
pub(crate) fn extract_state(x: &[f64], params: &EntanglerParams) -> Result<StateVector> {
    let mut state = amplitude_encode(x)?;
    if state.num_qubits() != params.num_qubits {
        return Err(Error::DimensionMismatch {
            context: "feature dimension vs entangler qubits",
            expected: params.num_qubits,
            actual: state.num_qubits(),
        });
    }
    for layer in &params.angles {
        entangling_block(&mut state, layer, params.range, params.rotation)?;
    }
    Ok(state)
}

/// Extracts the classical encoding of one feature row: per-qubit Z
/// expectations of the entangled state.
pub fn extract_features(x: &[f64], params: &EntanglerParams) -> Result<NodeEncoding> {
    let state = extract_state(x, params)?;
    Ok(NodeEncoding::new(state.expect_z_all()))
}

/// Row-wise [`extract_features`] over a feature matrix, order preserved.
/// Rows are processed in parallel when the `parallel` feature is enabled.
pub fn extract_all(features: &[Vec<f64>], params: &EntanglerParams) -> Result<Vec<NodeEncoding>> {
    exec::try_map_indexed(features, |node, row| {
        extract_features(row, params).map_err(|e| match e {
            Error::ZeroVector => Error::ZeroFeatureRow { node },
            other => other,
        })
    })
}
