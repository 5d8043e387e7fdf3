//! Independent clustering and metric oracles: plain-random-restart Lloyd
//! k-means, contingency-table NMI, direct-formula silhouette, and a Newton
//! solver for L2-regularized multinomial logistic regression.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best inertia over `restarts` runs of Lloyd's algorithm with uniformly
/// sampled initial centers (deduplicated). Used as the multi-restart oracle.
pub fn kmeans_best_inertia(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> f64 {
    let n = points.len();
    assert!(k >= 1 && k <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut picked = vec![false; n];
        while centers.len() < k {
            let idx = rng.gen_range(0..n);
            if !picked[idx] {
                picked[idx] = true;
                centers.push(points[idx].clone());
            }
            if picked.iter().filter(|p| **p).count() == n && centers.len() < k {
                // fewer distinct points than k; reuse arbitrary points
                centers.push(points[rng.gen_range(0..n)].clone());
            }
        }
        let inertia = lloyd(points, &mut centers, 500);
        if inertia < best {
            best = inertia;
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], centers: &mut Vec<Vec<f64>>, max_iters: usize) -> f64 {
    let n = points.len();
    let k = centers.len();
    let dim = points[0].len();
    let mut assign = vec![0usize; n];
    for _ in 0..max_iters {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(p, center);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if assign[i] != best_c {
                assign[i] = best_c;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assign[i]] += 1;
            for (s, v) in sums[assign[i]].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums[c].iter_mut() {
                    *s /= counts[c] as f64;
                }
                centers[c] = sums[c].clone();
            } else {
                // reseed an empty cluster on the farthest point
                let (far, _) = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, sq_dist(p, &centers[assign[i]])))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                centers[c] = points[far].clone();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    points
        .iter()
        .map(|p| {
            centers
                .iter()
                .map(|c| sq_dist(p, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// NMI from an explicit contingency table, normalized by the arithmetic mean
/// of the two entropies. Natural logarithms throughout.
pub fn nmi_contingency(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0f64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1.0;
    }
    let row: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..kb).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let distinct_a = row.iter().filter(|&&v| v > 0.0).count();
    let distinct_b = col.iter().filter(|&&v| v > 0.0).count();
    if distinct_a == 1 && distinct_b == 1 {
        return 1.0;
    }
    let entropy = |counts: &[f64]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0.0)
            .map(|&c| -(c / n) * (c / n).ln())
            .sum()
    };
    let ha = entropy(&row);
    let hb = entropy(&col);
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let c = table[i][j];
            if c > 0.0 {
                mi += (c / n) * ((n * c) / (row[i] * col[j])).ln();
            }
        }
    }
    let norm = 0.5 * (ha + hb);
    if norm <= 0.0 {
        0.0
    } else {
        (mi / norm).clamp(0.0, 1.0)
    }
}

/// Silhouette score computed from a full pairwise distance matrix.
pub fn silhouette_direct(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = points.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sq_dist(&points[i], &points[j]).sqrt();
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let k = labels.iter().max().unwrap() + 1;
    let sizes: Vec<usize> = (0..k).map(|c| labels.iter().filter(|&&l| l == c).count()).collect();
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        if sizes[own] <= 1 {
            continue; // singleton convention: s_i = 0
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += dist[i][j];
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        total += if denom == 0.0 { 0.0 } else { (b - a) / denom };
    }
    total / n as f64
}

/// In-sample accuracy of L2-regularized multinomial logistic regression
/// fitted by full Newton steps. The objective matches the implementation
/// under test: mean cross-entropy + (lambda/2) * ||W||^2 over all
/// coefficients including the bias column, lambda = 1e-4.
pub fn logreg_newton_accuracy(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let lambda = 1e-4;
    let n = points.len();
    let dim = points[0].len() + 1; // bias column
    let classes = labels.iter().max().unwrap() + 1;
    assert!(classes >= 2);
    let xs: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut row = p.clone();
            row.push(1.0);
            row
        })
        .collect();

    let nparams = classes * dim;
    let mut w = vec![0.0f64; nparams];

    for _ in 0..60 {
        // gradient and Hessian of the objective
        let mut grad = vec![0.0f64; nparams];
        let mut hess = vec![vec![0.0f64; nparams]; nparams];
        for (x, &y) in xs.iter().zip(labels) {
            let mut logits: Vec<f64> = (0..classes)
                .map(|c| (0..dim).map(|j| w[c * dim + j] * x[j]).sum())
                .collect();
            let maxl = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for l in logits.iter_mut() {
                *l = (*l - maxl).exp();
            }
            let z: f64 = logits.iter().sum();
            let p: Vec<f64> = logits.iter().map(|l| l / z).collect();
            for c in 0..classes {
                let coeff = (p[c] - if c == y { 1.0 } else { 0.0 }) / n as f64;
                for j in 0..dim {
                    grad[c * dim + j] += coeff * x[j];
                }
            }
            for c1 in 0..classes {
                for c2 in 0..classes {
                    let h = (p[c1] * ((c1 == c2) as usize as f64 - p[c2])) / n as f64;
                    if h == 0.0 {
                        continue;
                    }
                    for j1 in 0..dim {
                        for j2 in 0..dim {
                            hess[c1 * dim + j1][c2 * dim + j2] += h * x[j1] * x[j2];
                        }
                    }
                }
            }
        }
        for i in 0..nparams {
            grad[i] += lambda * w[i];
            hess[i][i] += lambda;
        }

        let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-10 {
            break;
        }
        let step = solve(&mut hess, &mut grad);
        for (wi, si) in w.iter_mut().zip(&step) {
            *wi -= si;
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
    correct as f64 / n as f64
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
fn solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc -= a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    x
}
