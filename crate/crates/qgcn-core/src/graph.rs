//! Dataset ingestion and graph construction: cosine-similarity mutual k-NN
//! graphs with isolated-node repair, comma-delimited node/edge file loading,
//! and a synthetic binary-feature generator with planted population labels.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

/// Undirected simple graph with per-node feature rows and optional integer
/// labels (evaluation only; never consulted during training). Edges are
/// stored as (min, max) pairs in ascending order, so iteration order is
/// canonical regardless of how the graph was assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGraph {
    features: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<usize>>,
}

impl FeatureGraph {
    /// Validates and normalizes: every feature row nonzero and finite, all
    /// rows the same length, no self-loops, no duplicate edges, endpoints in
    /// range, label count matching the node count.
    pub fn new(
        features: Vec<Vec<f64>>,
        edges: Vec<(usize, usize)>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = features.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let dim = features[0].len();
        if dim == 0 {
            return Err(Error::InvalidGraph("feature dimension is zero".into()));
        }
        for (node, row) in features.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "feature row length",
                    expected: dim,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGraph(format!(
                    "node {node} has non-finite feature values"
                )));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroFeatureRow { node });
            }
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "label count",
                    expected: n,
                    actual: l.len(),
                });
            }
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Self {
            features,
            edges: normalized,
            labels,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.features.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Option<Vec<usize>>) -> Result<()> {
        if let Some(ref l) = labels {
            if l.len() != self.num_nodes() {
                return Err(Error::DimensionMismatch {
                    context: "label count",
                    expected: self.num_nodes(),
                    actual: l.len(),
                });
            }
        }
        self.labels = labels;
        Ok(())
    }

    /// Replaces the feature matrix, keeping topology and labels. Rows must
    /// keep the same shape and stay nonzero.
    pub fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(features, self.edges.clone(), self.labels.clone())
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| u == node || v == node)
            .count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.num_nodes()];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Adjacency lists with neighbors in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        adj
    }
}

/// Cosine similarity `⟨x, y⟩ / (‖x‖ ‖y‖)`, clamped into [-1, 1].
pub fn cosine_similarity(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "cosine similarity vector lengths",
            expected: x.len(),
            actual: y.len(),
        });
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nx * ny)).clamp(-1.0, 1.0))
}

/// Construction statistics reported alongside a mutual k-NN graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnInfo {
    pub k_requested: usize,
    pub k_used: usize,
    pub mutual_edges: usize,
    pub isolated_repaired: usize,
    pub repair_edges_added: usize,
}

/// Builds the mutual k-nearest-neighbor graph over cosine similarity:
/// an edge (x, y) exists iff each node is among the other's k nearest
/// neighbors. Isolated nodes are then repaired by relaxing reciprocity and
/// connecting them to their k nearest neighbors one-sidedly, so the minimum
/// degree afterwards is at least 1. Similarity ties break toward the lower
/// node index. `k >= num_nodes` is clamped to `num_nodes - 1`.
pub fn mutual_knn_graph(features: &[Vec<f64>], k: usize) -> Result<FeatureGraph> {
    mutual_knn_graph_with_info(features, k).map(|(g, _)| g)
}

/// [`mutual_knn_graph`] returning construction statistics as well.
pub fn mutual_knn_graph_with_info(
    features: &[Vec<f64>],
    k: usize,
) -> Result<(FeatureGraph, KnnInfo)> {
    let n = features.len();
    if n < 2 {
        return Err(Error::InvalidGraph(
            "mutual k-NN construction needs at least 2 nodes".into(),
        ));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    for (node, row) in features.iter().enumerate() {
        if row.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroFeatureRow { node });
        }
    }
    let k_used = k.min(n - 1);

    // Full similarity matrix, row-parallel.
    let sims: Vec<Vec<f64>> = exec::try_map_indexed(features, |i, row| {
        (0..n)
            .map(|j| {
                if i == j {
                    Ok(1.0)
                } else {
                    cosine_similarity(row, &features[j])
                }
            })
            .collect()
    })?;

    let neighbor_lists: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| {
                sims[i][b]
                    .partial_cmp(&sims[i][a])
                    .expect("similarities are finite")
                    .then(a.cmp(&b))
            });
            others.truncate(k_used);
            others
        })
        .collect();
    let neighbor_sets: Vec<Vec<bool>> = neighbor_lists
        .iter()
        .map(|list| {
            let mut set = vec![false; n];
            for &j in list {
                set[j] = true;
            }
            set
        })
        .collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, list) in neighbor_lists.iter().enumerate() {
        for &j in list {
            if i < j && neighbor_sets[j][i] {
                edges.push((i, j));
            }
        }
    }
    let mutual_edges = edges.len();

    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut present: std::collections::HashSet<(usize, usize)> = edges.iter().copied().collect();
    let mut isolated_repaired = 0;
    let mut repair_edges_added = 0;
    for i in 0..n {
        if degree[i] > 0 {
            continue;
        }
        isolated_repaired += 1;
        for &j in &neighbor_lists[i] {
            let e = (i.min(j), i.max(j));
            if present.insert(e) {
                edges.push(e);
                repair_edges_added += 1;
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }

    let graph = FeatureGraph::new(features.to_vec(), edges, None)?;
    Ok((
        graph,
        KnnInfo {
            k_requested: k,
            k_used,
            mutual_edges,
            isolated_repaired,
            repair_edges_added,
        },
    ))
}

/// Statistics from loading a node/edge file pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim().to_string()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .collect())
}

/// Parsed contents of a node file: dense-index features and labels plus the
/// id-to-index mapping used to resolve edge endpoints.
#[derive(Debug, Clone)]
pub struct NodeTable {
    pub features: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
    pub id_to_index: HashMap<u64, usize>,
}

/// Loads a comma-delimited node file. Rows are `node_id[,label],f0,...`;
/// the label column is present iff `has_labels`. Lines starting with '#'
/// and blank lines are ignored.
pub fn load_node_file(node_path: &Path, has_labels: bool) -> Result<NodeTable> {
    let npath = node_path.display().to_string();
    let mut id_to_index: HashMap<u64, usize> = HashMap::new();
    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();

    for (line_no, line) in read_lines(node_path)? {
        let parse = |what: &str, e: String| Error::Parse {
            path: npath.clone(),
            line: line_no,
            message: format!("{what}: {e}"),
        };
        let mut fields = line.split(',').map(str::trim);
        let id: u64 = fields
            .next()
            .ok_or_else(|| parse("missing node id", String::new()))?
            .parse()
            .map_err(|e: std::num::ParseIntError| parse("node id", e.to_string()))?;
        if id_to_index.insert(id, features.len()).is_some() {
            return Err(Error::Parse {
                path: npath.clone(),
                line: line_no,
                message: format!("duplicate node id {id}"),
            });
        }
        if has_labels {
            let label: usize = fields
                .next()
                .ok_or_else(|| parse("missing label", String::new()))?
                .parse()
                .map_err(|e: std::num::ParseIntError| parse("label", e.to_string()))?;
            labels.push(label);
        }
        let row: Vec<f64> = fields
            .map(|f| {
                f.parse()
                    .map_err(|e: std::num::ParseFloatError| parse("feature value", e.to_string()))
            })
            .collect::<Result<_>>()?;
        if row.is_empty() {
            return Err(Error::Parse {
                path: npath.clone(),
                line: line_no,
                message: "node row has no feature values".into(),
            });
        }
        features.push(row);
    }
    Ok(NodeTable {
        features,
        labels: has_labels.then_some(labels),
        id_to_index,
    })
}

/// Loads a graph from comma-delimited node and edge files. Edge rows are
/// `id,id` pairs; self-loops are dropped (counted in the report), and
/// (u,v)/(v,u)/repeated pairs collapse to one undirected edge.
pub fn load_edge_graph(
    node_path: &Path,
    edge_path: &Path,
    has_labels: bool,
) -> Result<(FeatureGraph, LoadReport)> {
    let table = load_node_file(node_path, has_labels)?;
    let id_to_index = table.id_to_index;

    let epath = edge_path.display().to_string();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    let mut self_loops_dropped = 0;
    let mut duplicate_edges_dropped = 0;
    for (line_no, line) in read_lines(edge_path)? {
        let mut fields = line.split(',').map(str::trim);
        let mut next_id = || -> Result<u64> {
            fields
                .next()
                .ok_or_else(|| Error::Parse {
                    path: epath.clone(),
                    line: line_no,
                    message: "edge row needs two node ids".into(),
                })?
                .parse()
                .map_err(|e: std::num::ParseIntError| Error::Parse {
                    path: epath.clone(),
                    line: line_no,
                    message: format!("edge endpoint: {e}"),
                })
        };
        let a = next_id()?;
        let b = next_id()?;
        let resolve = |id: u64| {
            id_to_index.get(&id).copied().ok_or(Error::DanglingEdge {
                id,
                path: epath.clone(),
                line: line_no,
            })
        };
        let (u, v) = (resolve(a)?, resolve(b)?);
        if u == v {
            self_loops_dropped += 1;
            continue;
        }
        let e = (u.min(v), u.max(v));
        if seen.insert(e) {
            edges.push(e);
        } else {
            duplicate_edges_dropped += 1;
        }
    }

    let report = LoadReport {
        num_nodes: table.features.len(),
        num_edges: edges.len(),
        self_loops_dropped,
        duplicate_edges_dropped,
    };
    let graph = FeatureGraph::new(table.features, edges, table.labels)?;
    Ok((graph, report))
}

/// Synthetic dataset with planted population structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

/// Generates `num_nodes` binary feature rows: `num_pops` random prototype
/// rows, each node copying its population's prototype (round-robin
/// assignment) with independent bit flips at `flip_prob`. Rows that come out
/// all-zero get one random bit set so every row stays encodable. Labels are
/// returned for evaluation only.
pub fn synth_population_data(
    num_nodes: usize,
    dim: usize,
    num_pops: usize,
    flip_prob: f64,
    seed: u64,
) -> Result<SyntheticData> {
    if num_nodes == 0 || dim == 0 {
        return Err(Error::InvalidParameter(
            "num_nodes and dim must be positive".into(),
        ));
    }
    if num_pops == 0 || num_pops > num_nodes {
        return Err(Error::InvalidParameter(format!(
            "num_pops {num_pops} outside [1, {num_nodes}]"
        )));
    }
    if !(0.0..0.5).contains(&flip_prob) {
        return Err(Error::InvalidParameter(format!(
            "flip_prob {flip_prob} outside [0, 0.5)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prototypes: Vec<Vec<f64>> = Vec::with_capacity(num_pops);
    while prototypes.len() < num_pops {
        let proto: Vec<f64> = (0..dim)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
            .collect();
        if proto.iter().any(|&v| v != 0.0) {
            prototypes.push(proto);
        }
    }
    let mut features = Vec::with_capacity(num_nodes);
    let mut labels = Vec::with_capacity(num_nodes);
    for node in 0..num_nodes {
        let pop = node % num_pops;
        let mut row = prototypes[pop].clone();
        for v in row.iter_mut() {
            if rng.gen_bool(flip_prob) {
                *v = 1.0 - *v;
            }
        }
        if row.iter().all(|&v| v == 0.0) {
            let idx = rng.gen_range(0..dim);
            row[idx] = 1.0;
        }
        features.push(row);
        labels.push(pop);
    }
    Ok(SyntheticData { features, labels })
}

/// Returns a copy of the graph with feature rows permuted by a seeded
/// uniform random permutation. Topology is untouched; labels, being
/// evaluation-only, are deliberately not permuted.
pub fn permute_features(graph: &FeatureGraph, seed: u64) -> FeatureGraph {
    let mut perm: Vec<usize> = (0..graph.num_nodes()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    let features = perm
        .iter()
        .map(|&src| graph.features()[src].clone())
        .collect();
    FeatureGraph {
        features,
        edges: graph.edges().to_vec(),
        labels: graph.labels().map(<[usize]>::to_vec),
    }
}
