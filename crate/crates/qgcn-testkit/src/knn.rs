//! Brute-force mutual k-nearest-neighbor oracle.

/// Mutual k-NN edge set over cosine similarity, followed by one-sided repair
/// of isolated nodes. Ties broken by ascending node index. Returns edges
/// normalized as (min, max) pairs in sorted order.
pub fn mutual_knn_edges(features: &[Vec<f64>], k: usize) -> Vec<(usize, usize)> {
    let n = features.len();
    let k = k.min(n - 1);
    let cos = |a: &[f64], b: &[f64]| -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    };

    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| {
                cos(&features[i], &features[b])
                    .partial_cmp(&cos(&features[i], &features[a]))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            others.truncate(k);
            others
        })
        .collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for &j in &neighbors[i] {
            if i < j && neighbors[j].contains(&i) {
                edges.push((i, j));
            }
        }
    }

    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    for i in 0..n {
        if degree[i] == 0 {
            for &j in &neighbors[i] {
                let e = (i.min(j), i.max(j));
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}
