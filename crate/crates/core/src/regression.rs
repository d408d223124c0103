//! Continuous-target regression over a nonlinear random-projection encoder.
//!
//! The encoder maps a d-dimensional input to D components
//! `h_i = cos(⟨bases_i, x⟩ + biases_i)` with standard-normal bases and
//! uniform [0, 2π) biases — random Fourier features, which preserve the
//! similarity structure of the input space.
//!
//! The model keeps k parallel (cluster, regressor) vector pairs. Prediction
//! weights the k regressor outputs by a softmax over the encoded input's
//! similarity to each cluster model. Training standardizes the targets,
//! seeds the cluster models from a k-means pass over sign-quantized
//! encodings, and then per row updates every regressor proportionally to its
//! confidence while only the most similar cluster model is pulled toward the
//! input. Binarized sign copies of all vectors are refreshed after every
//! epoch so Hamming-based quantized inference is always available.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::clustering::ClusteringModel;
use crate::error::{HdcError, Result};
use crate::hypervector::{Form, Hypervector};
use crate::{par, rng};

/// Exponential-moving-average rate for winner cluster refinement.
const CLUSTER_EMA: f64 = 0.1;

/// Inverse softmax temperature on the cluster similarity scores. Cosine
/// scores live in a narrow band, so they are sharpened before the softmax;
/// otherwise the confidence weights stay near-uniform and the k experts
/// collapse into one global model.
const CONFIDENCE_SHARPNESS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionConfig {
    pub dim: usize,
    pub k: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub quantized_prediction: bool,
    pub seed: u64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            dim: 4096,
            k: 8,
            learning_rate: 0.02,
            epochs: 50,
            quantized_prediction: false,
            seed: 0,
        }
    }
}

/// Random-projection encoder from d input features to D components.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionEncoder {
    bases: Vec<Vec<f64>>,
    biases: Vec<f64>,
    input_dim: usize,
    seed: u64,
}

impl RegressionEncoder {
    pub fn build(dim: usize, input_dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(HdcError::InvalidDimension(dim));
        }
        if input_dim == 0 {
            return Err(HdcError::InvalidParameter(
                "encoder needs at least one input feature".into(),
            ));
        }
        let mut rng = rng::rng_from(rng::derive(seed, rng::tag::REG_BASES));
        let bases: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..input_dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let biases: Vec<f64> = (0..dim)
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        Ok(Self {
            bases,
            biases,
            input_dim,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.biases.len()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn bases(&self) -> &[Vec<f64>] {
        &self.bases
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Encode one input; every output component lies in [−1, 1].
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(HdcError::InvalidInput(format!(
                "input has {} values, encoder expects {}",
                x.len(),
                self.input_dim
            )));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return Err(HdcError::InvalidInput(format!(
                "non-finite value at feature {pos}"
            )));
        }
        Ok(self
            .bases
            .iter()
            .zip(&self.biases)
            .map(|(base, bias)| {
                let dot: f64 = base.iter().zip(x).map(|(b, v)| b * v).sum();
                (dot + bias).cos()
            })
            .collect())
    }

    /// Encode many rows in parallel.
    pub fn encode_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        par::map_slice(rows, |row| self.encode(row))
            .into_iter()
            .collect()
    }

    pub(crate) fn from_parts(
        bases: Vec<Vec<f64>>,
        biases: Vec<f64>,
        input_dim: usize,
        seed: u64,
    ) -> Self {
        Self {
            bases,
            biases,
            input_dim,
            seed,
        }
    }
}

/// Sign copies of the model vectors plus the regressor norms needed to
/// rescale Hamming similarities back to dot-product magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarizedCopies {
    pub cluster_signs: Vec<Hypervector>,
    pub regressor_signs: Vec<Hypervector>,
    pub regressor_norms: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RegressionModel {
    config: RegressionConfig,
    encoder: RegressionEncoder,
    cluster_models: Vec<Vec<f64>>,
    regressor_models: Vec<Vec<f64>>,
    binarized: Option<BinarizedCopies>,
    target_mean: f64,
    target_scale: f64,
}

impl RegressionModel {
    /// Fit on (row, target) pairs.
    ///
    /// A zero learning rate is accepted as a documented degenerate case: no
    /// regressor ever moves and every prediction is the target mean.
    pub fn fit(matrix: &[Vec<f64>], targets: &[f64], config: RegressionConfig) -> Result<Self> {
        if matrix.is_empty() {
            return Err(HdcError::EmptyInput("training set is empty"));
        }
        if matrix.len() != targets.len() {
            return Err(HdcError::InvalidInput(format!(
                "{} rows but {} targets",
                matrix.len(),
                targets.len()
            )));
        }
        if config.k == 0 || config.k > matrix.len() {
            return Err(HdcError::InvalidParameter(format!(
                "k = {} must be in 1..={} (row count)",
                config.k,
                matrix.len()
            )));
        }
        if config.learning_rate < 0.0 || !config.learning_rate.is_finite() {
            return Err(HdcError::InvalidParameter(format!(
                "learning rate must be non-negative, got {}",
                config.learning_rate
            )));
        }
        if let Some(pos) = targets.iter().position(|y| !y.is_finite()) {
            return Err(HdcError::InvalidInput(format!(
                "non-finite target at row {pos}"
            )));
        }

        let encoder = RegressionEncoder::build(config.dim, matrix[0].len(), config.seed)?;
        let encoded = encoder.encode_batch(matrix)?;

        let n = targets.len() as f64;
        let target_mean = targets.iter().sum::<f64>() / n;
        let variance = targets
            .iter()
            .map(|y| (y - target_mean).powi(2))
            .sum::<f64>()
            / n;
        let target_scale = if variance > 0.0 { variance.sqrt() } else { 1.0 };
        let scaled: Vec<f64> = targets
            .iter()
            .map(|y| (y - target_mean) / target_scale)
            .collect();

        let cluster_models = init_cluster_models(&encoded, config.k, config.seed)?;
        let mut model = Self {
            config,
            encoder,
            cluster_models,
            regressor_models: vec![vec![0.0; config.dim]; config.k],
            binarized: None,
            target_mean,
            target_scale,
        };

        let mut order: Vec<usize> = (0..encoded.len()).collect();
        for epoch in 0..config.epochs {
            let mut shuffle_rng = rng::rng_from(rng::derive2(
                config.seed,
                rng::tag::REG_SHUFFLE,
                epoch as u64,
            ));
            order.shuffle(&mut shuffle_rng);
            for &i in &order {
                model.apply_update(&encoded[i], scaled[i]);
            }
            model.refresh_binarized();
        }
        if model.binarized.is_none() {
            model.refresh_binarized();
        }
        Ok(model)
    }

    /// One confidence-weighted update on an encoded row with a standardized
    /// target: every regressor moves by its softmax weight (the update is
    /// `η·e·α_j·h`, the loss gradient `−∂(e²/2)/∂M_j` scaled by `η·D`), and
    /// only the winning cluster model is pulled toward the input.
    pub fn apply_update(&mut self, h: &[f64], y_scaled: f64) {
        let scores = self.cluster_scores(h);
        let alpha = self.confidences(h);
        let prediction: f64 = alpha
            .iter()
            .zip(&self.regressor_models)
            .map(|(a, m)| a * dot(h, m) / h.len() as f64)
            .sum();
        let error = y_scaled - prediction;
        let eta = self.config.learning_rate;
        for (a, m) in alpha.iter().zip(self.regressor_models.iter_mut()) {
            let step = eta * error * a;
            for (mi, hi) in m.iter_mut().zip(h) {
                *mi += step * hi;
            }
        }
        let winner = argmax(&scores);
        for (ci, hi) in self.cluster_models[winner].iter_mut().zip(h) {
            *ci += CLUSTER_EMA * (hi - *ci);
        }
    }

    fn cluster_scores(&self, h: &[f64]) -> Vec<f64> {
        self.cluster_models
            .iter()
            .map(|c| cosine_f64(h, c))
            .collect()
    }

    /// Softmax confidences of an encoded input against the cluster models.
    pub fn confidences(&self, h: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = self
            .cluster_scores(h)
            .iter()
            .map(|s| s * CONFIDENCE_SHARPNESS)
            .collect();
        softmax(&scaled)
    }

    /// Full-precision prediction in standardized target units.
    pub fn predict_scaled(&self, h: &[f64]) -> f64 {
        let alpha = self.confidences(h);
        alpha
            .iter()
            .zip(&self.regressor_models)
            .map(|(a, m)| a * dot(h, m) / h.len() as f64)
            .sum()
    }

    /// Quantized prediction in standardized units: cluster scores come from
    /// the Hamming identity on sign vectors, and each regressor output is
    /// the Hamming similarity against the binarized regressor rescaled by
    /// the stored regressor norm (and the query norm) to approximate the
    /// full-precision dot product.
    pub fn predict_scaled_quantized(&self, h: &[f64]) -> Result<f64> {
        let bin = self.binarized.as_ref().ok_or_else(|| {
            HdcError::InvalidParameter(
                "quantized prediction requires binarized copies; call binarize() first".into(),
            )
        })?;
        let dim = h.len() as f64;
        let h_sign = sign_vector(h);
        let h_norm = dot(h, h).sqrt();
        let scores: Vec<f64> = bin
            .cluster_signs
            .iter()
            .map(|c| hamming_similarity(&h_sign, c) * CONFIDENCE_SHARPNESS)
            .collect();
        let alpha = softmax(&scores);
        Ok(alpha
            .iter()
            .zip(bin.regressor_signs.iter().zip(&bin.regressor_norms))
            .map(|(a, (m_sign, m_norm))| {
                a * hamming_similarity(&h_sign, m_sign) * h_norm * m_norm / dim
            })
            .sum())
    }

    /// Predict the target for a raw input row, honoring the model's
    /// `quantized_prediction` flag.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let h = self.encoder.encode(x)?;
        let scaled = if self.config.quantized_prediction {
            self.predict_scaled_quantized(&h)?
        } else {
            self.predict_scaled(&h)
        };
        Ok(scaled * self.target_scale + self.target_mean)
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        par::map_slice(rows, |row| self.predict(row))
            .into_iter()
            .collect()
    }

    /// Store sign copies of every model vector plus the regressor norms.
    /// Idempotent: the copies are always recomputed from the full-precision
    /// vectors.
    pub fn binarize(&mut self) {
        self.refresh_binarized();
    }

    fn refresh_binarized(&mut self) {
        let cluster_signs = self.cluster_models.iter().map(|c| sign_vector(c)).collect();
        let regressor_signs = self
            .regressor_models
            .iter()
            .map(|m| sign_vector(m))
            .collect();
        let regressor_norms = self
            .regressor_models
            .iter()
            .map(|m| dot(m, m).sqrt())
            .collect();
        self.binarized = Some(BinarizedCopies {
            cluster_signs,
            regressor_signs,
            regressor_norms,
        });
    }

    pub fn config(&self) -> &RegressionConfig {
        &self.config
    }

    pub fn encoder(&self) -> &RegressionEncoder {
        &self.encoder
    }

    pub fn cluster_models(&self) -> &[Vec<f64>] {
        &self.cluster_models
    }

    pub fn regressor_models(&self) -> &[Vec<f64>] {
        &self.regressor_models
    }

    pub fn binarized(&self) -> Option<&BinarizedCopies> {
        self.binarized.as_ref()
    }

    pub fn target_scaling(&self) -> (f64, f64) {
        (self.target_mean, self.target_scale)
    }

    pub fn set_quantized_prediction(&mut self, on: bool) {
        self.config.quantized_prediction = on;
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        config: RegressionConfig,
        encoder: RegressionEncoder,
        cluster_models: Vec<Vec<f64>>,
        regressor_models: Vec<Vec<f64>>,
        binarized: Option<BinarizedCopies>,
        target_mean: f64,
        target_scale: f64,
    ) -> Self {
        Self {
            config,
            encoder,
            cluster_models,
            regressor_models,
            binarized,
            target_mean,
            target_scale,
        }
    }
}

/// Cluster models start as the k-means centroids of a seeded sample of
/// sign-quantized encodings.
fn init_cluster_models(encoded: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if k == 1 {
        // degenerate single-cluster model: the mean sign pattern
        let signs: Vec<Hypervector> = encoded.iter().map(|h| sign_vector(h)).collect();
        let refs: Vec<&Hypervector> = signs.iter().collect();
        let centroid = crate::hypervector::bundle(&refs)?
            .normalize(rng::derive(seed, rng::tag::KMEANS_INIT))?;
        return Ok(vec![centroid.values().iter().map(|&v| v as f64).collect()]);
    }
    let sample_size = encoded.len().min((4 * k).max(64)).max(k);
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut rng = rng::rng_from(rng::derive(seed, rng::tag::REG_SAMPLE));
    order.shuffle(&mut rng);
    let sample: Vec<Hypervector> = order[..sample_size]
        .iter()
        .map(|&i| sign_vector(&encoded[i]))
        .collect();
    let clustering =
        ClusteringModel::fit(&sample, k, 25, rng::derive(seed, rng::tag::KMEANS_INIT))?;
    Ok(clustering
        .centroids()
        .iter()
        .map(|c| c.values().iter().map(|&v| v as f64).collect())
        .collect())
}

fn sign_vector(values: &[f64]) -> Hypervector {
    Hypervector::from_parts(
        values
            .iter()
            .map(|&v| if v >= 0.0 { 1 } else { -1 })
            .collect(),
        Form::Bipolar,
    )
}

fn hamming_similarity(a: &Hypervector, b: &Hypervector) -> f64 {
    let ham = a.hamming(b).expect("sign vectors share dimension");
    1.0 - 2.0 * ham as f64 / a.dim() as f64
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cosine_f64(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

/// Numerically stable softmax; the weights sum to 1 and are all positive.
fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_dataset(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = rng::rng_from(seed);
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random::<f64>() * 2.0 - 1.0])
            .collect();
        let targets = matrix.iter().map(|r| 2.0 * r[0]).collect();
        (matrix, targets)
    }

    #[test]
    fn encode_zero_input_isolates_biases() {
        let enc = RegressionEncoder::build(64, 3, 5).unwrap();
        let h = enc.encode(&[0.0, 0.0, 0.0]).unwrap();
        for (hi, bias) in h.iter().zip(enc.biases()) {
            assert!((hi - bias.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn encode_is_deterministic_and_bounded() {
        let enc = RegressionEncoder::build(256, 4, 9).unwrap();
        let x = vec![0.3, -1.2, 0.0, 5.5];
        let h1 = enc.encode(&x).unwrap();
        let h2 = enc.encode(&x).unwrap();
        assert_eq!(h1, h2);
        assert!(h1.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn encode_rejects_bad_input() {
        let enc = RegressionEncoder::build(64, 2, 0).unwrap();
        assert!(enc.encode(&[1.0]).is_err());
        assert!(enc.encode(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn encoding_similarity_decreases_with_distance() {
        let enc = RegressionEncoder::build(4096, 10, 3).unwrap();
        let mut rng = rng::rng_from(7);
        let base: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
        let h0 = enc.encode(&base).unwrap();
        let mut prev = 1.0;
        for delta in [0.1, 0.5, 1.0, 2.0] {
            // displace along a fixed unit direction
            let shifted: Vec<f64> = base
                .iter()
                .enumerate()
                .map(|(i, v)| if i == 0 { v + delta } else { *v })
                .collect();
            let h = enc.encode(&shifted).unwrap();
            let sim = cosine_f64(&h0, &h);
            assert!(sim < prev, "similarity not decreasing at delta {delta}");
            prev = sim;
        }
    }

    #[test]
    fn fit_rejects_bad_parameters() {
        let (matrix, targets) = linear_dataset(10, 0);
        let mut config = RegressionConfig {
            dim: 64,
            k: 2,
            epochs: 1,
            ..Default::default()
        };
        config.k = 11;
        assert!(RegressionModel::fit(&matrix, &targets, config).is_err());
        config.k = 2;
        config.learning_rate = -0.1;
        assert!(RegressionModel::fit(&matrix, &targets, config).is_err());
    }

    #[test]
    fn zero_learning_rate_predicts_the_mean() {
        let (matrix, targets) = linear_dataset(40, 1);
        let config = RegressionConfig {
            dim: 128,
            k: 2,
            learning_rate: 0.0,
            epochs: 3,
            ..Default::default()
        };
        let model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        assert!(model
            .regressor_models()
            .iter()
            .all(|m| m.iter().all(|&v| v == 0.0)));
        let mean = targets.iter().sum::<f64>() / targets.len() as f64;
        for row in &matrix {
            assert!((model.predict(row).unwrap() - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_target_is_absorbed_by_scaling() {
        let (matrix, _) = linear_dataset(30, 2);
        let targets = vec![3.25; 30];
        let config = RegressionConfig {
            dim: 128,
            k: 2,
            epochs: 5,
            ..Default::default()
        };
        let model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        let mse: f64 = matrix
            .iter()
            .map(|r| (model.predict(r).unwrap() - 3.25).powi(2))
            .sum::<f64>()
            / 30.0;
        assert!(mse < 1e-8, "mse {mse}");
    }

    #[test]
    fn singleton_softmax_and_uniform_softmax() {
        assert_eq!(softmax(&[0.37]), vec![1.0]);
        let alpha = softmax(&[0.5, 0.5, 0.5, 0.5]);
        for a in &alpha {
            assert!((a - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn k1_prediction_is_plain_dot_over_dim() {
        let (matrix, targets) = linear_dataset(30, 3);
        let config = RegressionConfig {
            dim: 256,
            k: 1,
            epochs: 5,
            ..Default::default()
        };
        let model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        let h = model.encoder().encode(&matrix[0]).unwrap();
        let alpha = model.confidences(&h);
        assert_eq!(alpha, vec![1.0]);
        let expected = dot(&h, &model.regressor_models()[0]) / 256.0;
        assert!((model.predict_scaled(&h) - expected).abs() < 1e-15);
    }

    #[test]
    fn softmax_weights_sum_to_one_during_prediction() {
        let (matrix, targets) = linear_dataset(50, 4);
        let config = RegressionConfig {
            dim: 256,
            k: 4,
            epochs: 3,
            ..Default::default()
        };
        let model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        for row in matrix.iter().take(10) {
            let h = model.encoder().encode(row).unwrap();
            let alpha = model.confidences(&h);
            let sum: f64 = alpha.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(alpha.iter().all(|&a| a > 0.0));
        }
    }

    #[test]
    fn learns_a_linear_target() {
        let (matrix, targets) = linear_dataset(300, 5);
        let config = RegressionConfig {
            dim: 1024,
            k: 2,
            epochs: 15,
            ..Default::default()
        };
        let model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        let (test, test_targets) = linear_dataset(100, 99);
        let preds = model.predict_batch(&test).unwrap();
        let mean_y = test_targets.iter().sum::<f64>() / 100.0;
        let ss_res: f64 = preds
            .iter()
            .zip(&test_targets)
            .map(|(p, y)| (p - y).powi(2))
            .sum();
        let ss_tot: f64 = test_targets.iter().map(|y| (y - mean_y).powi(2)).sum();
        let r2 = 1.0 - ss_res / ss_tot;
        assert!(r2 >= 0.8, "r2 {r2}");
    }

    #[test]
    fn binarize_is_idempotent_and_signs_match() {
        let (matrix, targets) = linear_dataset(40, 6);
        let config = RegressionConfig {
            dim: 128,
            k: 2,
            epochs: 3,
            ..Default::default()
        };
        let mut model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        let first = model.binarized().unwrap().clone();
        model.binarize();
        assert_eq!(&first, model.binarized().unwrap());
        for (signs, full) in first.regressor_signs.iter().zip(model.regressor_models()) {
            for (s, v) in signs.values().iter().zip(full) {
                assert_eq!(*s, if *v >= 0.0 { 1 } else { -1 });
            }
        }
    }

    #[test]
    fn all_positive_regressor_binarizes_to_ones() {
        let (matrix, targets) = linear_dataset(10, 7);
        let config = RegressionConfig {
            dim: 64,
            k: 1,
            learning_rate: 0.0,
            epochs: 1,
            ..Default::default()
        };
        let mut model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        model.regressor_models = vec![vec![0.5; 64]];
        model.binarize();
        let signs = &model.binarized().unwrap().regressor_signs[0];
        assert!(signs.values().iter().all(|&v| v == 1));
    }

    #[test]
    fn deterministic_under_seed() {
        let (matrix, targets) = linear_dataset(60, 8);
        let config = RegressionConfig {
            dim: 256,
            k: 3,
            epochs: 4,
            ..Default::default()
        };
        let a = RegressionModel::fit(&matrix, &targets, config).unwrap();
        let b = RegressionModel::fit(&matrix, &targets, config).unwrap();
        assert_eq!(a.regressor_models(), b.regressor_models());
        assert_eq!(a.cluster_models(), b.cluster_models());
        for row in matrix.iter().take(5) {
            assert_eq!(a.predict(row).unwrap(), b.predict(row).unwrap());
        }
    }

    /// Scale equivariance on dyadic data: the standardized problem is
    /// bit-identical under c·y + b, so the learned state and the scaled
    /// predictions match exactly; the final affine unscale is bit-exact when
    /// b = 0 and c is a power of two, and within rounding otherwise.
    #[test]
    fn scale_equivariance_on_dyadic_targets() {
        let matrix: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64 / 16.0 - 1.0]).collect();
        let targets: Vec<f64> = (0..32).map(|i| (i % 8) as f64 * 0.25).collect();
        let config = RegressionConfig {
            dim: 128,
            k: 2,
            epochs: 4,
            ..Default::default()
        };
        let base = RegressionModel::fit(&matrix, &targets, config).unwrap();
        for (c, b) in [(2.0, 0.0), (-2.0, 0.0), (2.0, 1.0), (-2.0, 0.5)] {
            let transformed: Vec<f64> = targets.iter().map(|y| c * y + b).collect();
            let model = RegressionModel::fit(&matrix, &transformed, config).unwrap();
            // the standardized problem is the base problem up to the sign of c,
            // so the learned regressors match (or negate) bit-for-bit
            let sign = c.signum();
            let expected_regressors: Vec<Vec<f64>> = base
                .regressor_models()
                .iter()
                .map(|m| m.iter().map(|v| sign * v).collect())
                .collect();
            assert_eq!(model.regressor_models(), &expected_regressors);
            for row in &matrix {
                let h = base.encoder().encode(row).unwrap();
                assert_eq!(model.predict_scaled(&h), sign * base.predict_scaled(&h));
                let expected = c * base.predict(row).unwrap() + b;
                let got = model.predict(row).unwrap();
                if b == 0.0 {
                    assert_eq!(got, expected, "c={c} b={b}");
                } else {
                    assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn quantized_prediction_requires_binarized_copies() {
        let (matrix, targets) = linear_dataset(20, 9);
        let config = RegressionConfig {
            dim: 64,
            k: 2,
            epochs: 1,
            ..Default::default()
        };
        let mut model = RegressionModel::fit(&matrix, &targets, config).unwrap();
        model.binarized = None;
        let h = model.encoder().encode(&matrix[0]).unwrap();
        assert!(model.predict_scaled_quantized(&h).is_err());
    }
}
