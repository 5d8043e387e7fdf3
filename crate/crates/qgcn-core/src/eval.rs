//! Unsupervised evaluation harness: seeded k-means with k-means++
//! initialization, silhouette score, normalized mutual information, and
//! in-sample logistic-regression accuracy over embedding tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::model::derive_seed;

const KMEANS_RESTARTS: usize = 10;
const KMEANS_MAX_ITERS: usize = 300;
const KMEANS_TOL: f64 = 1e-8;
const LOGREG_L2: f64 = 1e-4;
const LOGREG_MAX_ITERS: usize = 5000;
const LOGREG_GRAD_TOL: f64 = 1e-6;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Outcome of a k-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct KmeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
}

/// Lloyd's algorithm with seeded k-means++ initialization: runs to centroid
/// convergence (max movement below 1e-8) or 300 iterations, best of 10
/// restarts by inertia. Deterministic for a fixed seed; ties break toward
/// lower indices.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KmeansResult> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside [1, {n}]"
        )));
    }
    let runs = exec::map_range(KMEANS_RESTARTS, |restart| {
        single_kmeans(points, k, derive_seed(seed, restart as u64))
    });
    let best = runs
        .into_iter()
        .min_by(|a, b| a.inertia.partial_cmp(&b.inertia).expect("finite inertia"))
        .expect("at least one restart");
    Ok(best)
}

fn single_kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> KmeansResult {
    let n = points.len();
    let dim = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..n)].clone());
    let mut min_d: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = min_d.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in min_d.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.push(points[next].clone());
        for (d, p) in min_d.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, centroids.last().expect("just pushed")));
        }
    }

    let mut labels = vec![0usize; n];
    let mut iterations = 0;
    for iter in 0..KMEANS_MAX_ITERS {
        iterations = iter + 1;
        for (label, p) in labels.iter_mut().zip(points) {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            *label = best;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &label) in points.iter().zip(&labels) {
            counts[label] += 1;
            for (s, v) in sums[label].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut had_empty = false;
        let mut movement: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                // Reseed an empty cluster on the point farthest from its
                // current centroid (ties toward the lower index).
                had_empty = true;
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, sq_dist(p, &centroids[labels[i]])))
                    .fold((0usize, -1.0f64), |acc, x| if x.1 > acc.1 { x } else { acc })
                    .0;
                centroids[c] = points[far].clone();
                continue;
            }
            let new: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            movement = movement.max(sq_dist(&new, &centroids[c]).sqrt());
            centroids[c] = new;
        }
        if !had_empty && movement <= KMEANS_TOL {
            break;
        }
    }

    // Final assignment against converged centroids.
    for (label, p) in labels.iter_mut().zip(points) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let d = sq_dist(p, centroid);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        *label = best;
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum();
    KmeansResult {
        labels,
        centroids,
        inertia,
        iterations,
    }
}

/// Mean silhouette `(b - a) / max(a, b)` over all points with Euclidean
/// distances. Singleton clusters and the degenerate `a = b = 0` case
/// contribute 0.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    let n = points.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: "silhouette labels",
            expected: n,
            actual: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let sizes: Vec<usize> = (0..k)
        .map(|c| labels.iter().filter(|&&l| l == c).count())
        .collect();
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::InvalidParameter(
            "silhouette needs at least 2 nonempty clusters".into(),
        ));
    }
    let scores = exec::map_range(n, |i| {
        let own = labels[i];
        if sizes[own] <= 1 {
            return 0.0;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += sq_dist(&points[i], &points[j]).sqrt();
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom == 0.0 {
            0.0
        } else {
            (b - a) / denom
        }
    });
    Ok(scores.iter().sum::<f64>() / n as f64)
}

/// Normalized mutual information in [0, 1]: mutual information divided by
/// the arithmetic mean of the two label entropies (natural logs). Two
/// constant labelings score 1; a single constant labeling scores 0.
pub fn nmi(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    let n = labels_a.len();
    if labels_b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "nmi label lengths",
            expected: n,
            actual: labels_b.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty labelings".into()));
    }
    let ka = labels_a.iter().max().expect("nonempty") + 1;
    let kb = labels_b.iter().max().expect("nonempty") + 1;
    let mut joint = vec![vec![0usize; kb]; ka];
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        joint[a][b] += 1;
    }
    let row: Vec<usize> = joint.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<usize> = (0..kb).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let nf = n as f64;
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let ha = entropy(&row);
    let hb = entropy(&col);
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (a, r) in joint.iter().enumerate() {
        for (b, &c) in r.iter().enumerate() {
            if c > 0 {
                let p = c as f64 / nf;
                mi += p * ((nf * c as f64) / (row[a] as f64 * col[b] as f64)).ln();
            }
        }
    }
    let normalizer = 0.5 * (ha + hb);
    if normalizer == 0.0 {
        return Ok(0.0);
    }
    Ok((mi / normalizer).clamp(0.0, 1.0))
}

/// In-sample accuracy of multinomial logistic regression trained by gradient
/// descent with Armijo backtracking (grad norm below 1e-6 or 5000
/// iterations). A small L2 penalty (1e-4, all coefficients) keeps the
/// optimum finite on separable data. Evaluated on the training set itself:
/// the protocol measures linear separability of the embedding space, not
/// generalization.
pub fn logreg_accuracy(points: &[Vec<f64>], labels: &[usize], seed: u64) -> Result<f64> {
    let n = points.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: "logreg labels",
            expected: n,
            actual: labels.len(),
        });
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let distinct = {
        let mut seen = vec![false; classes];
        for &l in labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 {
        return Err(Error::InvalidParameter(
            "logistic regression needs at least 2 classes".into(),
        ));
    }
    let dim = points[0].len() + 1; // bias column
    let xs: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut row = p.clone();
            row.push(1.0);
            row
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..classes * dim)
        .map(|_| rng.gen_range(-0.01..0.01))
        .collect();

    let objective = |w: &[f64]| -> (f64, Vec<f64>) {
        let mut loss = 0.0;
        let mut grad = vec![0.0; w.len()];
        for (x, &y) in xs.iter().zip(labels) {
            let logits: Vec<f64> = (0..classes)
                .map(|c| (0..dim).map(|j| w[c * dim + j] * x[j]).sum())
                .collect();
            let maxl = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - maxl).exp()).collect();
            let z: f64 = exps.iter().sum();
            loss += z.ln() + maxl - logits[y];
            for c in 0..classes {
                let p = exps[c] / z;
                let coeff = p - if c == y { 1.0 } else { 0.0 };
                for j in 0..dim {
                    grad[c * dim + j] += coeff * x[j];
                }
            }
        }
        loss /= n as f64;
        for g in grad.iter_mut() {
            *g /= n as f64;
        }
        for (g, wi) in grad.iter_mut().zip(w) {
            *g += LOGREG_L2 * wi;
        }
        loss += 0.5 * LOGREG_L2 * w.iter().map(|v| v * v).sum::<f64>();
        (loss, grad)
    };

    let (mut loss, mut grad) = objective(&w);
    let mut lr: f64 = 1.0;
    for _ in 0..LOGREG_MAX_ITERS {
        let gnorm_sq: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm_sq.sqrt() < LOGREG_GRAD_TOL {
            break;
        }
        // Armijo backtracking from a slightly optimistic starting step.
        lr = (lr * 2.0).min(1e4);
        let mut accepted = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = w
                .iter()
                .zip(&grad)
                .map(|(wi, gi)| wi - lr * gi)
                .collect();
            let (new_loss, new_grad) = objective(&candidate);
            if new_loss <= loss - 0.5 * lr * gnorm_sq {
                w = candidate;
                loss = new_loss;
                grad = new_grad;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break; // step underflow; gradient is numerically flat
        }
    }

    let correct = xs
        .iter()
        .zip(labels)
        .filter(|(x, &y)| {
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for c in 0..classes {
                let v: f64 = (0..dim).map(|j| w[c * dim + j] * x[j]).sum();
                if v > best_v {
                    best_v = v;
                    best = c;
                }
            }
            best == y
        })
        .count();
    Ok(correct as f64 / n as f64)
}

/// Inertia of the best k-means run for each requested k.
pub fn inertia_table(points: &[Vec<f64>], ks: &[usize], seed: u64) -> Result<Vec<(usize, f64)>> {
    ks.iter()
        .map(|&k| kmeans(points, k, seed).map(|r| (k, r.inertia)))
        .collect()
}

/// Full clustering report over an embedding table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k_used: usize,
    pub silhouette: f64,
    /// Logistic-regression accuracy on the k-means pseudo-labels.
    pub pseudo_label_accuracy: f64,
    /// NMI between pseudo-labels and ground truth, when labels exist.
    pub nmi: Option<f64>,
    /// Logistic-regression accuracy on the ground-truth labels, when they
    /// exist and span at least two classes.
    pub ground_truth_accuracy: Option<f64>,
    /// Inertia-vs-k table for elbow inspection.
    pub inertia_by_k: Vec<(usize, f64)>,
}

/// Runs the full protocol: k-means pseudo-labels, silhouette, in-sample
/// logistic-regression accuracy on the pseudo-labels, and (when ground-truth
/// labels are supplied) NMI plus ground-truth accuracy. `elbow_max` bounds
/// the inertia table (clamped to the point count).
pub fn evaluate(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    truth: Option<&[usize]>,
    elbow_max: usize,
) -> Result<EvalReport> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "evaluation needs k >= 2 clusters".into(),
        ));
    }
    let k_used = k.min(points.len());
    let clustering = kmeans(points, k_used, seed)?;
    let silhouette = silhouette(points, &clustering.labels)?;
    let pseudo_label_accuracy = logreg_accuracy(points, &clustering.labels, derive_seed(seed, 1))?;
    let (nmi_score, ground_truth_accuracy) = match truth {
        Some(t) => {
            let distinct = t.iter().collect::<std::collections::HashSet<_>>().len();
            let acc = if distinct >= 2 {
                Some(logreg_accuracy(points, t, derive_seed(seed, 2))?)
            } else {
                None
            };
            (Some(nmi(&clustering.labels, t)?), acc)
        }
        None => (None, None),
    };
    let ks: Vec<usize> = (1..=elbow_max.max(k_used).min(points.len())).collect();
    let inertia_by_k = inertia_table(points, &ks, seed)?;
    Ok(EvalReport {
        k_used,
        silhouette,
        pseudo_label_accuracy,
        nmi: nmi_score,
        ground_truth_accuracy,
        inertia_by_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(centers: &[(f64, f64)], per: usize, spread: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..per {
                points.push(vec![
                    cx + rng.gen_range(-spread..spread),
                    cy + rng.gen_range(-spread..spread),
                ]);
                labels.push(c);
            }
        }
        (points, labels)
    }

    #[test]
    fn kmeans_groups_separated_pairs() {
        let points = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![10.0, 10.0],
            vec![10.1, 10.0],
        ];
        let r = kmeans(&points, 2, 1).unwrap();
        assert_eq!(r.labels[0], r.labels[1]);
        assert_eq!(r.labels[2], r.labels[3]);
        assert_ne!(r.labels[0], r.labels[2]);
    }

    #[test]
    fn kmeans_with_k_equals_n_has_zero_inertia() {
        let points = vec![vec![0.0], vec![1.0], vec![2.0], vec![5.0]];
        let r = kmeans(&points, 4, 3).unwrap();
        assert!(r.inertia < 1e-30);
        let mut sorted = r.labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn kmeans_is_deterministic_for_fixed_seed() {
        let (points, _) = blobs(&[(0.0, 0.0), (4.0, 4.0), (8.0, 0.0)], 10, 0.8, 5);
        let a = kmeans(&points, 3, 7).unwrap();
        let b = kmeans(&points, 3, 7).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn kmeans_matches_multi_restart_oracle_on_blobs() {
        for trial in 0..4 {
            let (points, _) = blobs(
                &[(0.0, 0.0), (6.0, 6.0), (12.0, -2.0)],
                10,
                1.0,
                100 + trial,
            );
            let ours = kmeans(&points, 3, trial).unwrap();
            let oracle = qgcn_testkit::cluster::kmeans_best_inertia(&points, 3, 999, 100);
            assert!(
                (ours.inertia - oracle).abs() <= 1e-9,
                "trial {trial}: {} vs oracle {oracle}",
                ours.inertia
            );
        }
    }

    #[test]
    fn kmeans_rejects_oversized_k() {
        assert!(kmeans(&[vec![1.0], vec![2.0]], 3, 0).is_err());
    }

    #[test]
    fn silhouette_near_one_for_distant_tight_clusters() {
        let (points, labels) = blobs(&[(0.0, 0.0), (100.0, 100.0)], 8, 0.5, 2);
        let s = silhouette(&points, &labels).unwrap();
        assert!(s > 0.9, "silhouette {s}");
    }

    #[test]
    fn silhouette_zero_for_identical_points() {
        let points = vec![vec![1.0, 2.0]; 6];
        let labels = vec![0, 0, 0, 1, 1, 1];
        let s = silhouette(&points, &labels).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn silhouette_matches_direct_formula_oracle() {
        let (points, _) = blobs(&[(0.0, 0.0), (3.0, 1.0)], 7, 1.5, 9);
        let labels = kmeans(&points, 2, 4).unwrap().labels;
        let ours = silhouette(&points, &labels).unwrap();
        let oracle = qgcn_testkit::cluster::silhouette_direct(&points, &labels);
        assert!((ours - oracle).abs() < 1e-12);
    }

    #[test]
    fn silhouette_requires_two_clusters() {
        assert!(silhouette(&[vec![0.0], vec![1.0]], &[0, 0]).is_err());
    }

    #[test]
    fn nmi_reference_values() {
        assert_eq!(nmi(&[0, 1, 2, 0], &[0, 1, 2, 0]).unwrap(), 1.0);
        // Identical up to relabeling is also perfect agreement.
        assert_eq!(nmi(&[0, 1, 1, 0], &[1, 0, 0, 1]).unwrap(), 1.0);
        // A constant labeling carries no information.
        assert_eq!(nmi(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap(), 0.0);
        // Both constant: agreement by convention.
        assert_eq!(nmi(&[0, 0], &[0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn nmi_is_symmetric_and_matches_contingency_oracle() {
        let a = vec![0, 0, 1, 1, 2, 2, 0, 1, 2, 1, 0, 2, 2, 1, 0, 0, 1, 2, 1, 0];
        let b = vec![1, 1, 0, 0, 2, 2, 1, 0, 2, 0, 1, 2, 0, 0, 1, 1, 2, 2, 0, 1];
        let ab = nmi(&a, &b).unwrap();
        let ba = nmi(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-15);
        let oracle = qgcn_testkit::cluster::nmi_contingency(&a, &b);
        assert!((ab - oracle).abs() < 1e-12);
    }

    #[test]
    fn logreg_separable_two_class_is_perfect() {
        let (points, labels) = blobs(&[(0.0, 0.0), (10.0, 10.0)], 10, 1.0, 3);
        let acc = logreg_accuracy(&points, &labels, 1).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn logreg_on_shuffled_labels_is_near_chance() {
        use rand::seq::SliceRandom;
        let (points, mut labels) = blobs(&[(0.0, 0.0), (8.0, 8.0)], 100, 1.0, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        labels.shuffle(&mut rng);
        let acc = logreg_accuracy(&points, &labels, 2).unwrap();
        assert!((acc - 0.5).abs() <= 0.1, "chance-level accuracy {acc}");
    }

    #[test]
    fn logreg_matches_newton_oracle() {
        for trial in 0..3 {
            let (points, labels) = blobs(
                &[(0.0, 0.0), (2.5, 2.0), (-2.0, 3.0)],
                12,
                1.2,
                40 + trial,
            );
            let ours = logreg_accuracy(&points, &labels, trial).unwrap();
            let oracle = qgcn_testkit::cluster::logreg_newton_accuracy(&points, &labels);
            assert!(
                (ours - oracle).abs() <= 1e-3,
                "trial {trial}: {ours} vs {oracle}"
            );
        }
    }

    #[test]
    fn logreg_requires_two_classes() {
        assert!(logreg_accuracy(&[vec![0.0], vec![1.0]], &[1, 1], 0).is_err());
    }

    #[test]
    fn evaluate_produces_in_range_report() {
        let (points, labels) = blobs(&[(0.0, 0.0), (6.0, 6.0)], 12, 1.0, 8);
        let report = evaluate(&points, 2, 3, Some(&labels), 6).unwrap();
        assert_eq!(report.k_used, 2);
        assert!((-1.0..=1.0).contains(&report.silhouette));
        assert!((0.0..=1.0).contains(&report.pseudo_label_accuracy));
        let nmi_val = report.nmi.unwrap();
        assert!((0.0..=1.0).contains(&nmi_val));
        assert!(nmi_val > 0.9, "well-separated blobs should align: {nmi_val}");
        assert_eq!(report.inertia_by_k.len(), 6);
        // Inertia is non-increasing in k for nested-optimal clusterings;
        // allow tiny slack for local optima.
        for w in report.inertia_by_k.windows(2) {
            assert!(w[1].1 <= w[0].1 * 1.01 + 1e-9);
        }
    }
}
