//! Shared dataset generators and independent oracles for the integration
//! suites. Everything here is deliberately written against plain arrays so
//! it cannot share a code path with the library it checks.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn feature_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("f{i}")).collect()
}

/// Gaussian blobs: `centers[c]` is the per-coordinate mean of class `c`.
/// Rows interleave classes so any prefix is roughly balanced.
pub fn gaussian_blobs(
    centers: &[f64],
    n_per_class: usize,
    features: usize,
    sigma: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut rng = rng(seed);
    let mut matrix = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n_per_class {
        for (c, &center) in centers.iter().enumerate() {
            let row: Vec<f64> = (0..features)
                .map(|_| {
                    center
                        + sigma
                            * <StandardNormal as Distribution<f64>>::sample(
                                &StandardNormal,
                                &mut rng,
                            )
                })
                .collect();
            matrix.push(row);
            labels.push(format!("class{c}"));
            let _ = i;
        }
    }
    (matrix, labels)
}

/// Planted dataset: feature 0 carries the label (mean ±2, sigma 0.5), the
/// other features are pure N(0,1) noise.
pub fn planted_informative(
    n_per_class: usize,
    features: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut rng = rng(seed);
    let mut matrix = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..n_per_class {
        for c in 0..2 {
            let sign = if c == 0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; features];
            row[0] = 2.0 * sign
                + 0.5 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            for value in row.iter_mut().skip(1) {
                *value = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            }
            matrix.push(row);
            labels.push(format!("class{c}"));
        }
    }
    (matrix, labels)
}

/// Nearest-centroid classifier in raw feature space. The oracle for the
/// blob datasets.
pub fn nearest_centroid_accuracy(
    train: &[Vec<f64>],
    train_labels: &[String],
    test: &[Vec<f64>],
    test_labels: &[String],
) -> f64 {
    let mut classes: Vec<String> = train_labels.to_vec();
    classes.sort();
    classes.dedup();
    let features = train[0].len();
    let mut centroids = vec![vec![0.0; features]; classes.len()];
    let mut counts = vec![0usize; classes.len()];
    for (row, label) in train.iter().zip(train_labels) {
        let c = classes.iter().position(|l| l == label).unwrap();
        counts[c] += 1;
        for (acc, v) in centroids[c].iter_mut().zip(row) {
            *acc += v;
        }
    }
    for (centroid, count) in centroids.iter_mut().zip(&counts) {
        for v in centroid.iter_mut() {
            *v /= *count as f64;
        }
    }
    let mut hits = 0usize;
    for (row, label) in test.iter().zip(test_labels) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let d: f64 = centroid.iter().zip(row).map(|(a, b)| (a - b).powi(2)).sum();
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        if &classes[best] == label {
            hits += 1;
        }
    }
    hits as f64 / test.len() as f64
}

/// Adjusted Rand index between two labelings.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ka = a.iter().max().map(|m| m + 1).unwrap_or(0);
    let kb = b.iter().max().map(|m| m + 1).unwrap_or(0);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |n: u64| (n * n.saturating_sub(1)) / 2;
    let sum_cells: u64 = table.iter().flatten().map(|&n| choose2(n)).sum();
    let row_sums: Vec<u64> = table.iter().map(|row| row.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..kb)
        .map(|j| table.iter().map(|row| row[j]).sum())
        .collect();
    let sum_rows: u64 = row_sums.iter().map(|&n| choose2(n)).sum();
    let sum_cols: u64 = col_sums.iter().map(|&n| choose2(n)).sum();
    let total = choose2(a.len() as u64) as f64;
    let expected = sum_rows as f64 * sum_cols as f64 / total;
    let max_index = (sum_rows + sum_cols) as f64 / 2.0;
    if (max_index - expected).abs() < 1e-12 {
        return 1.0;
    }
    (sum_cells as f64 - expected) / (max_index - expected)
}

/// Dense least squares with a tiny ridge, by Gauss-Jordan elimination.
/// `design` is row-major n×p, `targets` length n; returns p coefficients.
#[allow(clippy::needless_range_loop)]
pub fn least_squares(design: &[Vec<f64>], targets: &[f64]) -> Vec<f64> {
    let p = design[0].len();
    let mut ata = vec![vec![0.0f64; p + 1]; p];
    for (row, &y) in design.iter().zip(targets) {
        for i in 0..p {
            for j in 0..p {
                ata[i][j] += row[i] * row[j];
            }
            ata[i][p] += row[i] * y;
        }
    }
    for (i, row) in ata.iter_mut().enumerate() {
        row[i] += 1e-8;
    }
    // gauss-jordan with partial pivoting
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| ata[i][col].abs().partial_cmp(&ata[j][col].abs()).unwrap())
            .unwrap();
        ata.swap(col, pivot);
        let diag = ata[col][col];
        for v in ata[col].iter_mut() {
            *v /= diag;
        }
        for r in 0..p {
            if r == col {
                continue;
            }
            let factor = ata[r][col];
            for c in 0..=p {
                ata[r][c] -= factor * ata[col][c];
            }
        }
    }
    ata.iter().map(|row| row[p]).collect()
}

/// Gaussian radial-basis design matrix with a trailing bias column.
pub fn rbf_design(xs: &[f64], centers: &[f64], bandwidth: f64) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let mut row: Vec<f64> = centers
                .iter()
                .map(|&c| (-(x - c).powi(2) / (2.0 * bandwidth * bandwidth)).exp())
                .collect();
            row.push(1.0);
            row
        })
        .collect()
}

pub fn rmse(predictions: &[f64], targets: &[f64]) -> f64 {
    let n = predictions.len() as f64;
    (predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}

pub fn r_squared(predictions: &[f64], targets: &[f64]) -> f64 {
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_res: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y).powi(2))
        .sum();
    let ss_tot: f64 = targets.iter().map(|y| (y - mean).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    cov / (va.sqrt() * vb.sqrt())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// Uniform draw in [lo, hi).
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Seeded Erdos-Renyi undirected graph over `n` nodes; returns edges with
/// weight classes assigned round-robin from `weights`.
pub fn random_graph(
    n: usize,
    density: f64,
    weights: &[&str],
    seed: u64,
) -> Vec<(String, String, String)> {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    let mut next_weight = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                let w = weights[next_weight % weights.len()];
                next_weight += 1;
                edges.push((format!("n{i}"), format!("n{j}"), w.to_string()));
            }
        }
    }
    edges
}
