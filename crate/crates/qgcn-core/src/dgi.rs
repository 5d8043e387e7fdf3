//! Deep Graph Infomax training head: readout summary, bilinear
//! discriminator, feature-permutation corruption, binary cross-entropy loss,
//! gradients (closed-form for the classical head, central finite differences
//! for the quantum parameters), and the optimization loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{self, FeatureGraph};
use crate::model::{derive_seed, Model};
use crate::qmp::EmbeddingTable;

/// Discriminator outputs are clamped into [CLAMP, 1 - CLAMP] inside logs to
/// keep the loss finite under saturation.
const CLAMP: f64 = 1e-12;

/// Trainable classical head: the readout projection (`w_summary`,
/// `b_summary`) and the bilinear discriminator matrix `w_disc`, all shaped
/// by the embedding dimension n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgiParams {
    pub w_summary: Vec<Vec<f64>>,
    pub b_summary: Vec<f64>,
    pub w_disc: Vec<Vec<f64>>,
}

impl DgiParams {
    /// Matrices drawn uniformly from [-0.05, 0.05] with a seeded generator;
    /// the readout bias starts at zero.
    pub fn seeded(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matrix = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
            (0..dim)
                .map(|_| (0..dim).map(|_| rng.gen_range(-0.05..0.05)).collect())
                .collect()
        };
        Self {
            w_summary: matrix(&mut rng),
            b_summary: vec![0.0; dim],
            w_disc: matrix(&mut rng),
        }
    }

    pub fn zeroed(dim: usize) -> Self {
        Self {
            w_summary: vec![vec![0.0; dim]; dim],
            b_summary: vec![0.0; dim],
            w_disc: vec![vec![0.0; dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.b_summary.len()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Graph summary vector: componentwise sigmoid of a learned projection of
/// the mean-pooled embeddings, `s = sigmoid(W_s · mean(H) + b_s)`.
pub fn readout_summary(table: &EmbeddingTable, params: &DgiParams) -> Result<Vec<f64>> {
    let n = table.num_nodes();
    if n == 0 {
        return Err(Error::InvalidParameter("empty embedding table".into()));
    }
    let dim = params.dim();
    if table.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "embedding dim vs readout shape",
            expected: dim,
            actual: table.dim(),
        });
    }
    let mean = mean_embedding(table);
    Ok((0..dim)
        .map(|i| {
            let z: f64 = params.w_summary[i]
                .iter()
                .zip(&mean)
                .map(|(w, m)| w * m)
                .sum::<f64>()
                + params.b_summary[i];
            sigmoid(z)
        })
        .collect())
}

fn mean_embedding(table: &EmbeddingTable) -> Vec<f64> {
    let n = table.num_nodes() as f64;
    let mut mean = vec![0.0; table.dim()];
    for row in table.vectors() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    mean
}

/// Bilinear discriminator `D(h, s) = sigmoid(h^T W_D s)`, in (0, 1).
pub fn discriminate(h: &[f64], s: &[f64], params: &DgiParams) -> Result<f64> {
    let dim = params.dim();
    if h.len() != dim || s.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "discriminator input lengths",
            expected: dim,
            actual: if h.len() != dim { h.len() } else { s.len() },
        });
    }
    let mut z = 0.0;
    for (i, hi) in h.iter().enumerate() {
        let row: f64 = params.w_disc[i].iter().zip(s).map(|(w, sj)| w * sj).sum();
        z += hi * row;
    }
    Ok(sigmoid(z))
}

/// Corruption operator: a seeded random permutation of the input feature
/// rows. Topology is preserved and labels are left in place.
pub fn corrupt(graph: &FeatureGraph, seed: u64) -> FeatureGraph {
    graph::permute_features(graph, seed)
}

/// Binary cross-entropy over N positive pairs (clean embedding, summary) and
/// N negative pairs (corrupted embedding, summary), with the summary always
/// computed from the clean table.
pub fn dgi_loss(
    clean: &EmbeddingTable,
    corrupted: &EmbeddingTable,
    params: &DgiParams,
) -> Result<f64> {
    let n = clean.num_nodes();
    if corrupted.num_nodes() != n {
        return Err(Error::DimensionMismatch {
            context: "clean vs corrupted table sizes",
            expected: n,
            actual: corrupted.num_nodes(),
        });
    }
    let s = readout_summary(clean, params)?;
    let mut total = 0.0;
    for j in 0..n {
        let pos = discriminate(clean.vector(j), &s, params)?;
        let neg = discriminate(corrupted.vector(j), &s, params)?;
        total += pos.clamp(CLAMP, 1.0 - CLAMP).ln();
        total += (1.0 - neg).clamp(CLAMP, 1.0 - CLAMP).ln();
    }
    Ok(-total / (2.0 * n as f64))
}

/// How parameters are updated each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Central finite-difference step for quantum parameters.
    pub fd_step: f64,
    /// Whether the message-passing angles join the trainable set.
    pub train_mp_params: bool,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            learning_rate: 0.05,
            seed: 0,
            fd_step: 1e-4,
            train_mp_params: true,
            optimizer: OptimizerKind::Sgd,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be >= 1".into()));
        }
        // learning_rate = 0 is allowed deliberately: it gives a no-op
        // optimizer useful for reproducibility checks.
        if !(self.learning_rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning rate {} must be >= 0",
                self.learning_rate
            )));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step {} must be > 0",
                self.fd_step
            )));
        }
        Ok(())
    }
}

/// Gradients of the DGI loss with respect to every trainable parameter.
/// Quantum entries are ordered exactly like the model's flat quantum
/// parameter indexing (entangler angles, then gammas, then betas).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub quantum: Vec<f64>,
    pub w_summary: Vec<Vec<f64>>,
    pub b_summary: Vec<f64>,
    pub w_disc: Vec<Vec<f64>>,
}

/// Loss of one forward pass: embed the clean graph and a fixed corrupted
/// graph, then evaluate the contrastive objective.
pub fn forward_loss(
    graph: &FeatureGraph,
    corrupted_graph: &FeatureGraph,
    model: &Model,
) -> Result<f64> {
    let clean = model.embed(graph)?;
    let corrupted = model.embed(corrupted_graph)?;
    dgi_loss(&clean, &corrupted, &model.dgi)
}

/// Computes the loss and all gradients for one corruption draw. Classical
/// head gradients are exact (chain rule through the sigmoid/bilinear/mean
/// structure, ignoring the log clamp); quantum parameters use central finite
/// differences with step `config.fd_step`, every evaluation sharing the same
/// corrupted graph.
pub fn compute_gradients(
    graph: &FeatureGraph,
    model: &Model,
    corruption_seed: u64,
    config: &TrainConfig,
) -> Result<(f64, Gradients)> {
    let corrupted_graph = corrupt(graph, corruption_seed);
    let clean = model.embed(graph)?;
    let corrupted = model.embed(&corrupted_graph)?;
    let loss = dgi_loss(&clean, &corrupted, &model.dgi)?;

    let (w_summary, b_summary, w_disc) = analytic_head_gradients(&clean, &corrupted, &model.dgi)?;

    let count = model.quantum_param_count(config.train_mp_params);
    let step = config.fd_step;
    let quantum = exec::try_map_range(count, |idx| {
        let mut plus = model.clone();
        plus.shift_quantum_param(idx, step);
        let lp = forward_loss(graph, &corrupted_graph, &plus)?;
        let mut minus = model.clone();
        minus.shift_quantum_param(idx, -step);
        let lm = forward_loss(graph, &corrupted_graph, &minus)?;
        Ok((lp - lm) / (2.0 * step))
    })?;

    Ok((
        loss,
        Gradients {
            quantum,
            w_summary,
            b_summary,
            w_disc,
        },
    ))
}

type HeadGradients = (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>);

fn analytic_head_gradients(
    clean: &EmbeddingTable,
    corrupted: &EmbeddingTable,
    params: &DgiParams,
) -> Result<HeadGradients> {
    let n = clean.num_nodes();
    let dim = params.dim();
    let scale = 1.0 / (2.0 * n as f64);
    let s = readout_summary(clean, params)?;
    let mean = mean_embedding(clean);

    // d loss / d logit is -(1 - D) for positives and +D' for negatives.
    let mut grad_wd = vec![vec![0.0; dim]; dim];
    let mut grad_s = vec![0.0; dim];
    for j in 0..n {
        for (h, sign_coeff) in [
            (clean.vector(j), {
                let d = discriminate(clean.vector(j), &s, params)?;
                -(1.0 - d)
            }),
            (corrupted.vector(j), {
                discriminate(corrupted.vector(j), &s, params)?
            }),
        ] {
            let coeff = scale * sign_coeff;
            for a in 0..dim {
                for b in 0..dim {
                    grad_wd[a][b] += coeff * h[a] * s[b];
                }
            }
            for b in 0..dim {
                let wt_h: f64 = (0..dim).map(|a| params.w_disc[a][b] * h[a]).sum();
                grad_s[b] += coeff * wt_h;
            }
        }
    }

    // Back through the sigmoid readout: s = sigmoid(W_s m + b_s).
    let grad_z: Vec<f64> = grad_s
        .iter()
        .zip(&s)
        .map(|(g, si)| g * si * (1.0 - si))
        .collect();
    let grad_ws: Vec<Vec<f64>> = grad_z
        .iter()
        .map(|gz| mean.iter().map(|m| gz * m).collect())
        .collect();

    Ok((grad_ws, grad_z, grad_wd))
}

/// Result of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: Model,
    /// Loss evaluated at the start of each epoch (before that epoch's step).
    pub history: Vec<f64>,
    /// Loss of the final parameters on one more corruption draw.
    pub final_loss: f64,
    /// Corruption seed used for the final evaluation, for exact replay.
    pub final_corruption_seed: u64,
}

/// Optimizes all trainable parameters against the DGI objective. Each epoch
/// draws a fresh corruption seed from `(config.seed, epoch)`, computes
/// gradients, and applies one optimizer step. Aborts on non-finite loss.
pub fn train(graph: &FeatureGraph, model: Model, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let mut model = model;
    let mut history = Vec::with_capacity(config.epochs);

    let quantum_count = model.quantum_param_count(config.train_mp_params);
    let dim = model.dgi.dim();
    let total_params = quantum_count + 2 * dim * dim + dim;
    let mut adam = match config.optimizer {
        OptimizerKind::Adam => Some(AdamState::new(total_params)),
        OptimizerKind::Sgd => None,
    };

    for epoch in 0..config.epochs {
        let corruption_seed = derive_seed(config.seed, epoch as u64);
        let (loss, grads) = compute_gradients(graph, &model, corruption_seed, config)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss });
        }
        history.push(loss);
        apply_step(&mut model, &grads, config, adam.as_mut(), epoch)?;
    }

    let final_corruption_seed = derive_seed(config.seed, config.epochs as u64);
    let corrupted_graph = corrupt(graph, final_corruption_seed);
    let final_loss = forward_loss(graph, &corrupted_graph, &model)?;
    if !final_loss.is_finite() {
        return Err(Error::NonFiniteLoss {
            epoch: config.epochs,
            loss: final_loss,
        });
    }
    Ok(TrainOutcome {
        model,
        history,
        final_loss,
        final_corruption_seed,
    })
}

struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

fn apply_step(
    model: &mut Model,
    grads: &Gradients,
    config: &TrainConfig,
    adam: Option<&mut AdamState>,
    epoch: usize,
) -> Result<()> {
    let dim = model.dgi.dim();
    let quantum_count = grads.quantum.len();

    // Flatten gradients in a fixed order: quantum, W_s, b_s, W_D.
    let mut flat: Vec<f64> = Vec::with_capacity(quantum_count + 2 * dim * dim + dim);
    flat.extend_from_slice(&grads.quantum);
    for row in &grads.w_summary {
        flat.extend_from_slice(row);
    }
    flat.extend_from_slice(&grads.b_summary);
    for row in &grads.w_disc {
        flat.extend_from_slice(row);
    }
    if flat.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteLoss {
            epoch,
            loss: f64::NAN,
        });
    }

    let lr = config.learning_rate;
    let deltas: Vec<f64> = match adam {
        None => flat.iter().map(|g| -lr * g).collect(),
        Some(state) => {
            const BETA1: f64 = 0.9;
            const BETA2: f64 = 0.999;
            const EPS: f64 = 1e-8;
            let t = (epoch + 1) as i32;
            flat.iter()
                .enumerate()
                .map(|(i, &g)| {
                    state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * g;
                    state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * g * g;
                    let m_hat = state.m[i] / (1.0 - BETA1.powi(t));
                    let v_hat = state.v[i] / (1.0 - BETA2.powi(t));
                    -lr * m_hat / (v_hat.sqrt() + EPS)
                })
                .collect()
        }
    };

    // With lr = 0 every delta is -0.0; skip the writes so parameters stay
    // bitwise identical.
    if lr == 0.0 {
        return Ok(());
    }

    let mut it = deltas.into_iter();
    for idx in 0..quantum_count {
        model.shift_quantum_param(idx, it.next().unwrap());
    }
    for row in model.dgi.w_summary.iter_mut() {
        for w in row.iter_mut() {
            *w += it.next().unwrap();
        }
    }
    for b in model.dgi.b_summary.iter_mut() {
        *b += it.next().unwrap();
    }
    for row in model.dgi.w_disc.iter_mut() {
        for w in row.iter_mut() {
            *w += it.next().unwrap();
        }
    }
    Ok(())
}
