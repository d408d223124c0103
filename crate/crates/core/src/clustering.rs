//! k-means clustering in hyperdimensional space.
//!
//! Points and centroids are bipolar hypervectors. Assignment maximizes
//! cosine similarity; the update step bundles each cluster's members and
//! sign-normalizes. Iteration stops when the assignments repeat exactly or
//! the iteration bound is hit — no objective-value epsilon is involved.

use crate::error::{HdcError, Result};
use crate::hypervector::{bundle, Form, Hypervector};
use crate::{par, rng};

pub const DEFAULT_MAX_ITERATIONS: usize = 100;

/// A fitted clustering model.
///
/// Every non-reseeded centroid satisfies
/// `centroid[j] == bundle(members_j).normalize(centroid_tie_seeds[j])`
/// for the final assignments.
#[derive(Debug, Clone)]
pub struct ClusteringModel {
    k: usize,
    dim: usize,
    centroids: Vec<Hypervector>,
    assignments: Vec<usize>,
    max_iterations: usize,
    iterations_run: usize,
    converged: bool,
    centroid_tie_seeds: Vec<u64>,
    reseeded: Vec<bool>,
    seed: u64,
}

impl ClusteringModel {
    /// Cluster `points` into `k` groups.
    ///
    /// Initial centroids are `k` points sampled by seeded shuffle, preferring
    /// pairwise-distinct values. An empty cluster is reseeded with the point
    /// least covered by the current centroids (lowest maximum similarity).
    pub fn fit(points: &[Hypervector], k: usize, max_iterations: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(HdcError::InvalidParameter(format!(
                "cluster count must be at least 2, got {k}"
            )));
        }
        if points.len() < k {
            return Err(HdcError::InvalidParameter(format!(
                "{} points for {k} clusters",
                points.len()
            )));
        }
        let dim = points[0].dim();
        for p in points {
            if p.dim() != dim {
                return Err(HdcError::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
            if p.form() != Form::Bipolar {
                return Err(HdcError::InvalidForm {
                    expected: Form::Bipolar.name(),
                    found: p.form().name(),
                });
            }
        }

        let mut centroids = initial_centroids(points, k, seed);
        let mut tie_seeds = vec![0u64; k];
        let mut reseeded = vec![false; k];
        let mut assignments = assign_all(points, &centroids);
        let mut iterations_run = 0;
        let mut converged = false;

        for iteration in 0..max_iterations {
            // update step: exact integer bundling per cluster
            let mut any_empty = false;
            for j in 0..k {
                let members: Vec<&Hypervector> = assignments
                    .iter()
                    .zip(points)
                    .filter(|(a, _)| **a == j)
                    .map(|(_, p)| p)
                    .collect();
                if members.is_empty() {
                    any_empty = true;
                    continue;
                }
                let tie = rng::derive2(seed, rng::tag::CENTROID_TIE, pack(iteration, j));
                centroids[j] = bundle(&members)?.normalize(tie)?;
                tie_seeds[j] = tie;
                reseeded[j] = false;
            }
            if any_empty {
                for j in 0..k {
                    if assignments.contains(&j) {
                        continue;
                    }
                    let idx = least_covered_point(points, &centroids);
                    centroids[j] = points[idx].clone();
                    reseeded[j] = true;
                }
            }

            let next = assign_all(points, &centroids);
            iterations_run = iteration + 1;
            if next == assignments {
                converged = true;
                break;
            }
            assignments = next;
        }

        Ok(Self {
            k,
            dim,
            centroids,
            assignments,
            max_iterations,
            iterations_run,
            converged,
            centroid_tie_seeds: tie_seeds,
            reseeded,
            seed,
        })
    }

    /// Cluster index for a new point: argmax cosine over centroids, ties to
    /// the lowest index.
    pub fn predict(&self, point: &Hypervector) -> Result<usize> {
        if point.dim() != self.dim {
            return Err(HdcError::DimensionMismatch {
                left: self.dim,
                right: point.dim(),
            });
        }
        Ok(nearest_centroid(point, &self.centroids))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroids(&self) -> &[Hypervector] {
        &self.centroids
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn centroid_tie_seeds(&self) -> &[u64] {
        &self.centroid_tie_seeds
    }

    pub fn reseeded(&self) -> &[bool] {
        &self.reseeded
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        k: usize,
        dim: usize,
        centroids: Vec<Hypervector>,
        assignments: Vec<usize>,
        max_iterations: usize,
        iterations_run: usize,
        converged: bool,
        centroid_tie_seeds: Vec<u64>,
        reseeded: Vec<bool>,
        seed: u64,
    ) -> Self {
        Self {
            k,
            dim,
            centroids,
            assignments,
            max_iterations,
            iterations_run,
            converged,
            centroid_tie_seeds,
            reseeded,
            seed,
        }
    }
}

fn pack(iteration: usize, cluster: usize) -> u64 {
    ((iteration as u64) << 32) | cluster as u64
}

/// Seeded permutation walk preferring k pairwise-distinct points.
fn initial_centroids(points: &[Hypervector], k: usize, seed: u64) -> Vec<Hypervector> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut rng = rng::rng_from(rng::derive(seed, rng::tag::KMEANS_INIT));
    order.shuffle(&mut rng);

    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for &i in &order {
        if chosen.len() == k {
            break;
        }
        if chosen.iter().all(|&c| points[c] != points[i]) {
            chosen.push(i);
        }
    }
    // fewer than k distinct values in the data: fill with duplicates
    for &i in &order {
        if chosen.len() == k {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn nearest_centroid(point: &Hypervector, centroids: &[Hypervector]) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (j, c) in centroids.iter().enumerate() {
        // all operands are bipolar, zero norms cannot occur
        let score = point.cosine(c).expect("bipolar cosine");
        if score > best_score {
            best_score = score;
            best = j;
        }
    }
    best
}

fn assign_all(points: &[Hypervector], centroids: &[Hypervector]) -> Vec<usize> {
    par::map_slice(points, |p| nearest_centroid(p, centroids))
}

/// Index of the point with the lowest maximum similarity to any centroid.
fn least_covered_point(points: &[Hypervector], centroids: &[Hypervector]) -> usize {
    let coverage = par::map_slice(points, |p| {
        centroids
            .iter()
            .map(|c| p.cosine(c).expect("bipolar cosine"))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let mut best = 0;
    let mut best_cov = f64::INFINITY;
    for (i, &cov) in coverage.iter().enumerate() {
        if cov < best_cov {
            best_cov = cov;
            best = i;
        }
    }
    best
}
