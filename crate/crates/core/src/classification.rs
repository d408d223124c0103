//! Supervised HDC classification with retraining, cross-validation,
//! stepwise feature selection, and hyperparameter tuning.
//!
//! A class is the sign-normalized bundle of its training-row encodings.
//! Prediction is nearest class vector by cosine. Retraining applies
//! error-driven accumulator updates per epoch and keeps the best-epoch
//! snapshot. Feature selection evaluates feature subsets by omitting their
//! bind terms from the record encoding, never refitting the level vectors,
//! and scores each candidate subset by mean stratified cross-validation
//! accuracy.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::encoding::{EncodedTerms, FeatureEncoder, RangeSpec};
use crate::error::{HdcError, Result};
use crate::hypervector::{bundle, Hypervector};
use crate::{par, rng};

/// Classifier hyperparameters. Every randomized step derives from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierConfig {
    pub dim: usize,
    pub levels: usize,
    pub retrain_epochs: usize,
    pub per_feature_ranges: bool,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            dim: crate::hypervector::DEFAULT_DIM,
            levels: 10,
            retrain_epochs: 0,
            per_feature_ranges: false,
            seed: 0,
        }
    }
}

/// A fitted classifier. `class_vectors[c]` is always the normalization of
/// `class_accumulators[c]` under the class's fixed tie seed.
#[derive(Debug, Clone)]
pub struct ClassificationModel {
    config: ClassifierConfig,
    encoder: FeatureEncoder,
    classes: Vec<String>,
    class_accumulators: Vec<Hypervector>,
    class_vectors: Vec<Hypervector>,
}

impl ClassificationModel {
    /// Fit from raw rows. Classes are kept in sorted label order so the
    /// model is independent of row order.
    pub fn fit(
        matrix: &[Vec<f64>],
        labels: &[String],
        feature_names: &[String],
        config: ClassifierConfig,
    ) -> Result<Self> {
        if matrix.is_empty() {
            return Err(HdcError::EmptyInput("training set is empty"));
        }
        if matrix.len() != labels.len() {
            return Err(HdcError::InvalidInput(format!(
                "{} rows but {} labels",
                matrix.len(),
                labels.len()
            )));
        }
        let encoder = build_encoder(matrix, feature_names, &config)?;
        let encodings = encoder.encode_batch(matrix)?;
        Self::fit_encoded(encoder, &encodings, labels, config)
    }

    fn fit_encoded(
        encoder: FeatureEncoder,
        encodings: &[Hypervector],
        labels: &[String],
        config: ClassifierConfig,
    ) -> Result<Self> {
        let classes = sorted_classes(labels)?;
        let class_indices = class_index_of(labels, &classes);
        let class_accumulators = par::map_range(classes.len(), |c| {
            let members: Vec<&Hypervector> = encodings
                .iter()
                .zip(&class_indices)
                .filter(|(_, ci)| **ci == c)
                .map(|(h, _)| h)
                .collect();
            bundle(&members)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let class_vectors = normalize_accumulators(&class_accumulators, config.seed)?;
        Ok(Self {
            config,
            encoder,
            classes,
            class_accumulators,
            class_vectors,
        })
    }

    /// Predicted label plus the cosine against every class vector, in class
    /// order. Ties break toward the earlier class.
    pub fn predict(&self, x: &[f64]) -> Result<(String, Vec<(String, f64)>)> {
        let h = self.encoder.encode_record(x)?;
        let (idx, scores) = self.predict_encoded(&h);
        let report = self.classes.iter().cloned().zip(scores).collect::<Vec<_>>();
        Ok((self.classes[idx].clone(), report))
    }

    fn predict_encoded(&self, h: &Hypervector) -> (usize, Vec<f64>) {
        predict_against(h, &self.class_vectors)
    }

    /// Error-driven refinement. Within an epoch, misclassifications are
    /// judged against the epoch-start class vectors and the accumulator
    /// updates are applied as one batch, so the result is independent of row
    /// order. Returns the best-epoch snapshot by training accuracy (the
    /// unretrained model counts as epoch zero).
    pub fn retrain(&self, matrix: &[Vec<f64>], labels: &[String], epochs: usize) -> Result<Self> {
        let encodings = self.encoder.encode_batch(matrix)?;
        let class_indices = class_index_of(labels, &self.classes);
        if let Some(pos) = class_indices.iter().position(|c| *c == usize::MAX) {
            return Err(HdcError::InvalidInput(format!(
                "label {:?} was not present at fit time",
                labels[pos]
            )));
        }
        self.retrain_encoded(&encodings, &class_indices, epochs)
    }

    fn retrain_encoded(
        &self,
        encodings: &[Hypervector],
        class_indices: &[usize],
        epochs: usize,
    ) -> Result<Self> {
        let mut current = self.clone();
        let mut best = current.clone();
        let mut best_acc = current.training_accuracy(encodings, class_indices);
        for _ in 0..epochs {
            let predicted = par::map_slice(encodings, |h| current.predict_encoded(h).0);
            let mut any = false;
            let mut deltas: Vec<Vec<i32>> =
                vec![vec![0i32; current.encoder.dim()]; current.classes.len()];
            for ((h, &truth), &pred) in encodings.iter().zip(class_indices).zip(&predicted) {
                if truth == pred {
                    continue;
                }
                any = true;
                for (i, &v) in h.values().iter().enumerate() {
                    deltas[truth][i] += v;
                    deltas[pred][i] -= v;
                }
            }
            if !any {
                break;
            }
            for (acc, delta) in current.class_accumulators.iter_mut().zip(&deltas) {
                let values: Vec<i32> = acc.values().iter().zip(delta).map(|(a, d)| a + d).collect();
                *acc = Hypervector::from_parts(values, crate::hypervector::Form::Accumulator);
            }
            current.class_vectors =
                normalize_accumulators(&current.class_accumulators, current.config.seed)?;
            let acc = current.training_accuracy(encodings, class_indices);
            if acc > best_acc {
                best_acc = acc;
                best = current.clone();
            }
        }
        Ok(best)
    }

    fn training_accuracy(&self, encodings: &[Hypervector], class_indices: &[usize]) -> f64 {
        let hits = par::map_slice(encodings, |h| self.predict_encoded(h).0)
            .into_iter()
            .zip(class_indices)
            .filter(|(p, t)| p == *t)
            .count();
        hits as f64 / encodings.len() as f64
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn encoder(&self) -> &FeatureEncoder {
        &self.encoder
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_accumulators(&self) -> &[Hypervector] {
        &self.class_accumulators
    }

    pub fn class_vectors(&self) -> &[Hypervector] {
        &self.class_vectors
    }

    pub(crate) fn from_parts(
        config: ClassifierConfig,
        encoder: FeatureEncoder,
        classes: Vec<String>,
        class_accumulators: Vec<Hypervector>,
        class_vectors: Vec<Hypervector>,
    ) -> Self {
        Self {
            config,
            encoder,
            classes,
            class_accumulators,
            class_vectors,
        }
    }
}

pub(crate) fn build_encoder(
    matrix: &[Vec<f64>],
    feature_names: &[String],
    config: &ClassifierConfig,
) -> Result<FeatureEncoder> {
    let ranges = if config.per_feature_ranges {
        RangeSpec::per_feature_from(matrix)?
    } else {
        RangeSpec::global_from(matrix)?
    };
    FeatureEncoder::build(
        feature_names,
        config.dim,
        config.levels,
        &ranges,
        config.seed,
    )
}

fn sorted_classes(labels: &[String]) -> Result<Vec<String>> {
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(HdcError::SingleClass);
    }
    Ok(classes)
}

fn class_index_of(labels: &[String], classes: &[String]) -> Vec<usize> {
    labels
        .iter()
        .map(|l| classes.binary_search(l).unwrap_or(usize::MAX))
        .collect()
}

fn normalize_accumulators(accumulators: &[Hypervector], seed: u64) -> Result<Vec<Hypervector>> {
    accumulators
        .iter()
        .enumerate()
        .map(|(c, acc)| acc.normalize(rng::derive2(seed, rng::tag::TIE_BREAK, c as u64)))
        .collect()
}

fn predict_against(h: &Hypervector, class_vectors: &[Hypervector]) -> (usize, Vec<f64>) {
    let scores: Vec<f64> = class_vectors
        .iter()
        .map(|cv| h.cosine(cv).expect("bipolar cosine"))
        .collect();
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    (best, scores)
}

// ---------------------------------------------------------------------------
// cross-validation

/// Seeded stratified fold assignment: rows of each label are shuffled and
/// dealt round-robin, so per-class fold sizes differ by at most one.
/// A label with fewer rows than folds is an error, except leave-one-out
/// (`folds == rows`), where stratification is vacuous by construction.
pub fn stratified_folds(labels: &[String], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(HdcError::InvalidParameter(format!(
            "folds must be at least 2, got {folds}"
        )));
    }
    if folds > labels.len() {
        return Err(HdcError::InvalidParameter(format!(
            "{folds} folds for {} rows",
            labels.len()
        )));
    }
    let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_label.entry(l.as_str()).or_default().push(i);
    }
    if folds < labels.len() {
        for (label, rows) in &by_label {
            if rows.len() < folds {
                return Err(HdcError::Stratification {
                    label: label.to_string(),
                    count: rows.len(),
                    folds,
                });
            }
        }
    }
    let mut assignment = vec![0usize; labels.len()];
    for (group_idx, rows) in by_label.values_mut().enumerate() {
        let mut rng = rng::rng_from(rng::derive2(seed, rng::tag::FOLDS, group_idx as u64));
        rows.shuffle(&mut rng);
        for (pos, &row) in rows.iter().enumerate() {
            assignment[row] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Per-fold accuracies of a model fit (and retrained per `config`) on the
/// complement of each fold.
pub fn cross_validate(
    matrix: &[Vec<f64>],
    labels: &[String],
    feature_names: &[String],
    config: ClassifierConfig,
    folds: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mask = vec![true; feature_names.len()];
    cross_validate_masked(matrix, labels, feature_names, config, folds, seed, &mask)
}

fn cross_validate_masked(
    matrix: &[Vec<f64>],
    labels: &[String],
    feature_names: &[String],
    config: ClassifierConfig,
    folds: usize,
    seed: u64,
    active: &[bool],
) -> Result<Vec<f64>> {
    let fold_of = stratified_folds(labels, folds, seed)?;
    let folds_data = prepare_folds(matrix, labels, feature_names, &config, folds, &fold_of)?;
    par::map_range(folds, |f| {
        score_fold(&folds_data[f], active, config.retrain_epochs, config.seed)
    })
    .into_iter()
    .collect()
}

/// Precomputed per-fold state: the encoder of the training split and the
/// per-feature bind terms of every row, so candidate feature subsets are
/// scored by re-combining terms instead of re-encoding.
struct FoldData {
    encoder: FeatureEncoder,
    classes: Vec<String>,
    train_terms: Vec<EncodedTerms>,
    train_classes: Vec<usize>,
    test_terms: Vec<EncodedTerms>,
    test_classes: Vec<usize>,
}

fn prepare_folds(
    matrix: &[Vec<f64>],
    labels: &[String],
    feature_names: &[String],
    config: &ClassifierConfig,
    folds: usize,
    fold_of: &[usize],
) -> Result<Vec<FoldData>> {
    par::map_range(folds, |f| {
        let (mut train_rows, mut test_rows) = (Vec::new(), Vec::new());
        for (i, &fi) in fold_of.iter().enumerate() {
            if fi == f {
                test_rows.push(i);
            } else {
                train_rows.push(i);
            }
        }
        let train_matrix: Vec<Vec<f64>> = train_rows.iter().map(|&i| matrix[i].clone()).collect();
        let train_labels: Vec<String> = train_rows.iter().map(|&i| labels[i].clone()).collect();
        let encoder = build_encoder(&train_matrix, feature_names, config)?;
        let classes = sorted_classes(&train_labels)?;
        let term = |rows: &[usize]| -> Result<Vec<EncodedTerms>> {
            rows.iter()
                .map(|&i| encoder.feature_terms(&matrix[i]))
                .collect()
        };
        Ok(FoldData {
            train_terms: term(&train_rows)?,
            train_classes: train_rows
                .iter()
                .map(|&i| classes.binary_search(&labels[i]).unwrap_or(usize::MAX))
                .collect(),
            test_terms: term(&test_rows)?,
            test_classes: test_rows
                .iter()
                .map(|&i| classes.binary_search(&labels[i]).unwrap_or(usize::MAX))
                .collect(),
            encoder,
            classes,
        })
    })
    .into_iter()
    .collect()
}

/// Accuracy of one fold under a feature mask.
fn score_fold(fold: &FoldData, active: &[bool], retrain_epochs: usize, seed: u64) -> Result<f64> {
    let train: Vec<Hypervector> = fold
        .train_terms
        .iter()
        .map(|t| fold.encoder.combine(t, active))
        .collect::<Result<Vec<_>>>()?;
    let accumulators = (0..fold.classes.len())
        .map(|c| {
            let members: Vec<&Hypervector> = train
                .iter()
                .zip(&fold.train_classes)
                .filter(|(_, ci)| **ci == c)
                .map(|(h, _)| h)
                .collect();
            bundle(&members)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut vectors = normalize_accumulators(&accumulators, seed)?;

    if retrain_epochs > 0 {
        let model = ClassificationModel {
            config: ClassifierConfig {
                seed,
                ..ClassifierConfig::default()
            },
            encoder: fold.encoder.clone(),
            classes: fold.classes.clone(),
            class_accumulators: accumulators,
            class_vectors: vectors,
        };
        let refined = model.retrain_encoded(&train, &fold.train_classes, retrain_epochs)?;
        vectors = refined.class_vectors;
    }

    let mut hits = 0usize;
    for (t, &truth) in fold.test_terms.iter().zip(&fold.test_classes) {
        let h = fold.encoder.combine(t, active)?;
        if predict_against(&h, &vectors).0 == truth {
            hits += 1;
        }
    }
    Ok(hits as f64 / fold.test_terms.len().max(1) as f64)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// ---------------------------------------------------------------------------
// stepwise feature selection

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionDirection {
    Backward,
    Forward,
}

/// Outcome of stepwise selection.
///
/// `importance[f]` is the score delta attributable to feature `f` at the
/// last round where it was a candidate: (score of the surrounding set with
/// `f` present) − (score with `f` absent). `ranked_features` lists features
/// in elimination (backward) or addition (forward) order; features still in
/// play when the search stops are appended ordered by importance, weakest
/// first for backward and strongest first for forward.
#[derive(Debug, Clone)]
pub struct SelectionReport {
    pub direction: SelectionDirection,
    pub ranked_features: Vec<String>,
    pub importance: Vec<(String, f64)>,
    pub best_subset: Vec<String>,
    pub best_score: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn stepwise_feature_selection(
    matrix: &[Vec<f64>],
    labels: &[String],
    feature_names: &[String],
    config: ClassifierConfig,
    direction: SelectionDirection,
    threshold: f64,
    folds: usize,
    seed: u64,
) -> Result<SelectionReport> {
    let feature_count = feature_names.len();
    if feature_count < 2 {
        return Err(HdcError::InvalidParameter(format!(
            "stepwise selection needs at least 2 features, got {feature_count}"
        )));
    }
    let fold_of = stratified_folds(labels, folds, seed)?;
    let folds_data = prepare_folds(matrix, labels, feature_names, &config, folds, &fold_of)?;
    let score_mask = |active: &[bool]| -> Result<f64> {
        let per_fold = par::map_slice(&folds_data, |fold| {
            score_fold(fold, active, config.retrain_epochs, config.seed)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        Ok(mean(&per_fold))
    };

    match direction {
        SelectionDirection::Backward => backward_selection(feature_names, threshold, score_mask),
        SelectionDirection::Forward => {
            let baseline = majority_fraction(labels);
            forward_selection(feature_names, threshold, baseline, score_mask)
        }
    }
}

/// Fraction of the most common label: the score a no-information classifier
/// attains, used as the empty-set baseline for forward selection.
fn majority_fraction(labels: &[String]) -> f64 {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_str()).or_default() += 1;
    }
    counts.values().copied().max().unwrap_or(0) as f64 / labels.len() as f64
}

fn backward_selection<F>(
    feature_names: &[String],
    threshold: f64,
    score_mask: F,
) -> Result<SelectionReport>
where
    F: Fn(&[bool]) -> Result<f64>,
{
    let n = feature_names.len();
    let mut active = vec![true; n];
    let mut current_score = score_mask(&active)?;
    let mut importance = vec![0.0f64; n];
    let mut eliminated: Vec<usize> = Vec::new();
    let mut best_mask = active.clone();
    let mut best_score = current_score;

    while active.iter().filter(|a| **a).count() > 1 {
        let candidates: Vec<usize> = (0..n).filter(|&f| active[f]).collect();
        let scores: Vec<f64> = candidates
            .iter()
            .map(|&f| {
                let mut trial = active.clone();
                trial[f] = false;
                score_mask(&trial)
            })
            .collect::<Result<Vec<_>>>()?;
        for (&f, &s) in candidates.iter().zip(&scores) {
            importance[f] = current_score - s;
        }
        let (pos, &round_best) = scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        // on a tie max_by keeps the later element; prefer the earliest feature
        let mut drop_at = pos;
        for (i, &s) in scores.iter().enumerate() {
            if s == round_best {
                drop_at = i;
                break;
            }
        }
        let drop = candidates[drop_at];
        let round_score = scores[drop_at];
        if round_score < best_score - threshold {
            break;
        }
        active[drop] = false;
        eliminated.push(drop);
        current_score = round_score;
        let remaining = active.iter().filter(|a| **a).count();
        let best_size = best_mask.iter().filter(|a| **a).count();
        if round_score > best_score || (round_score == best_score && remaining < best_size) {
            best_score = round_score;
            best_mask = active.clone();
        }
    }

    // survivors appended weakest-first so the strongest feature comes last
    let mut survivors: Vec<usize> = (0..n).filter(|&f| active[f]).collect();
    survivors.sort_by(|&a, &b| importance[a].partial_cmp(&importance[b]).unwrap());
    let ranked = eliminated
        .iter()
        .chain(survivors.iter())
        .map(|&f| feature_names[f].clone())
        .collect();
    Ok(SelectionReport {
        direction: SelectionDirection::Backward,
        ranked_features: ranked,
        importance: feature_names.iter().cloned().zip(importance).collect(),
        best_subset: mask_names(feature_names, &best_mask),
        best_score,
    })
}

fn forward_selection<F>(
    feature_names: &[String],
    threshold: f64,
    baseline: f64,
    score_mask: F,
) -> Result<SelectionReport>
where
    F: Fn(&[bool]) -> Result<f64>,
{
    let n = feature_names.len();
    let mut active = vec![false; n];
    let mut current_score = baseline;
    let mut importance = vec![0.0f64; n];
    let mut added: Vec<usize> = Vec::new();
    let mut best_mask: Option<Vec<bool>> = None;
    let mut best_score = baseline;

    while active.iter().any(|a| !a) {
        let candidates: Vec<usize> = (0..n).filter(|&f| !active[f]).collect();
        let scores: Vec<f64> = candidates
            .iter()
            .map(|&f| {
                let mut trial = active.clone();
                trial[f] = true;
                score_mask(&trial)
            })
            .collect::<Result<Vec<_>>>()?;
        for (&f, &s) in candidates.iter().zip(&scores) {
            importance[f] = s - current_score;
        }
        let round_best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let add_at = scores.iter().position(|&s| s == round_best).unwrap();
        let add = candidates[add_at];
        if round_best < best_score - threshold {
            break;
        }
        active[add] = true;
        added.push(add);
        current_score = round_best;
        let size = active.iter().filter(|a| **a).count();
        let best_size = best_mask
            .as_ref()
            .map(|m| m.iter().filter(|a| **a).count())
            .unwrap_or(usize::MAX);
        if best_mask.is_none()
            || round_best > best_score
            || (round_best == best_score && size < best_size)
        {
            best_score = round_best;
            best_mask = Some(active.clone());
        }
    }

    let mut leftovers: Vec<usize> = (0..n).filter(|&f| !active[f]).collect();
    leftovers.sort_by(|&a, &b| importance[b].partial_cmp(&importance[a]).unwrap());
    let ranked = added
        .iter()
        .chain(leftovers.iter())
        .map(|&f| feature_names[f].clone())
        .collect();
    let best_mask = best_mask.unwrap_or_else(|| vec![false; n]);
    Ok(SelectionReport {
        direction: SelectionDirection::Forward,
        ranked_features: ranked,
        importance: feature_names.iter().cloned().zip(importance).collect(),
        best_subset: mask_names(feature_names, &best_mask),
        best_score,
    })
}

fn mask_names(feature_names: &[String], mask: &[bool]) -> Vec<String> {
    feature_names
        .iter()
        .zip(mask)
        .filter(|(_, keep)| **keep)
        .map(|(n, _)| n.clone())
        .collect()
}

// ---------------------------------------------------------------------------
// hyperparameter tuning

/// Grid of configurations for [`auto_tune`]. The cross product of the three
/// axes is evaluated exhaustively.
#[derive(Debug, Clone)]
pub struct TuneGrid {
    pub dims: Vec<usize>,
    pub levels: Vec<usize>,
    pub retrain_epochs: Vec<usize>,
}

/// One evaluated grid cell.
#[derive(Debug, Clone)]
pub struct TuneEntry {
    pub dim: usize,
    pub levels: usize,
    pub retrain_epochs: usize,
    pub fold_scores: Vec<f64>,
    pub mean_score: f64,
}

/// Exhaustive sweep over the grid by mean cross-validation accuracy.
/// Ties prefer smaller dimension, then fewer levels, then fewer epochs.
/// Returns the winning config and the full score table in grid order.
pub fn auto_tune(
    matrix: &[Vec<f64>],
    labels: &[String],
    feature_names: &[String],
    base: ClassifierConfig,
    grid: &TuneGrid,
    folds: usize,
    seed: u64,
) -> Result<(ClassifierConfig, Vec<TuneEntry>)> {
    if grid.dims.is_empty() || grid.levels.is_empty() || grid.retrain_epochs.is_empty() {
        return Err(HdcError::EmptyInput("tuning grid has an empty axis"));
    }
    let mut cells = Vec::new();
    for &dim in &grid.dims {
        for &levels in &grid.levels {
            for &epochs in &grid.retrain_epochs {
                cells.push((dim, levels, epochs));
            }
        }
    }
    let table = par::map_slice(&cells, |&(dim, levels, retrain_epochs)| {
        let config = ClassifierConfig {
            dim,
            levels,
            retrain_epochs,
            ..base
        };
        let fold_scores = cross_validate(matrix, labels, feature_names, config, folds, seed)?;
        let mean_score = mean(&fold_scores);
        Ok(TuneEntry {
            dim,
            levels,
            retrain_epochs,
            fold_scores,
            mean_score,
        })
    })
    .into_iter()
    .collect::<Result<Vec<TuneEntry>>>()?;

    let mut best = 0;
    for (i, entry) in table.iter().enumerate() {
        let b = &table[best];
        let better = entry.mean_score > b.mean_score
            || (entry.mean_score == b.mean_score
                && (entry.dim, entry.levels, entry.retrain_epochs)
                    < (b.dim, b.levels, b.retrain_epochs));
        if better {
            best = i;
        }
    }
    let winner = ClassifierConfig {
        dim: table[best].dim,
        levels: table[best].levels,
        retrain_epochs: table[best].retrain_epochs,
        ..base
    };
    Ok((winner, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    fn tiny_config(dim: usize) -> ClassifierConfig {
        ClassifierConfig {
            dim,
            levels: 4,
            ..ClassifierConfig::default()
        }
    }

    /// Two separable point clouds on a line, three features.
    fn line_dataset(n_per_class: usize) -> (Vec<Vec<f64>>, Vec<String>) {
        let mut matrix = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per_class {
            let t = i as f64 / n_per_class as f64 * 0.2;
            matrix.push(vec![0.1 + t, 0.2 + t, 0.15 + t]);
            labels.push("low".to_string());
            matrix.push(vec![0.8 + t, 0.9 + t, 0.85 + t]);
            labels.push("high".to_string());
        }
        (matrix, labels)
    }

    #[test]
    fn fit_rejects_degenerate_datasets() {
        let names = names(2);
        assert!(matches!(
            ClassificationModel::fit(&[], &[], &names, tiny_config(256)),
            Err(HdcError::EmptyInput(_))
        ));
        let matrix = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let labels = vec!["a".to_string(), "a".to_string()];
        assert!(matches!(
            ClassificationModel::fit(&matrix, &labels, &names, tiny_config(256)),
            Err(HdcError::SingleClass)
        ));
    }

    #[test]
    fn one_row_per_class_reproduces_encodings() {
        let matrix = vec![vec![0.1, 0.2, 0.3], vec![0.9, 0.8, 0.7]];
        let labels = vec!["a".to_string(), "b".to_string()];
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(2_000)).unwrap();
        for (row, label) in matrix.iter().zip(&labels) {
            let enc = model.encoder().encode_record(row).unwrap();
            let c = model.classes().iter().position(|c| c == label).unwrap();
            assert_eq!(&enc, &model.class_vectors()[c]);
            let (pred, scores) = model.predict(row).unwrap();
            assert_eq!(&pred, label);
            assert!((scores[c].1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicated_training_set_gives_same_vectors() {
        let (matrix, labels) = line_dataset(10);
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(2_000)).unwrap();
        let mut doubled = matrix.clone();
        doubled.extend(matrix.iter().cloned());
        let mut doubled_labels = labels.clone();
        doubled_labels.extend(labels.iter().cloned());
        let model2 =
            ClassificationModel::fit(&doubled, &doubled_labels, &names(3), tiny_config(2_000))
                .unwrap();
        // accumulators scale by two, normalized vectors are identical
        assert_eq!(model.class_vectors(), model2.class_vectors());
        for (a, b) in model
            .class_accumulators()
            .iter()
            .zip(model2.class_accumulators())
        {
            let scaled: Vec<i32> = a.values().iter().map(|v| v * 2).collect();
            assert_eq!(&scaled, b.values());
        }
    }

    #[test]
    fn fit_is_row_order_independent() {
        let (matrix, labels) = line_dataset(8);
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(1_000)).unwrap();
        let mut rev_matrix = matrix.clone();
        rev_matrix.reverse();
        let mut rev_labels = labels.clone();
        rev_labels.reverse();
        let model2 =
            ClassificationModel::fit(&rev_matrix, &rev_labels, &names(3), tiny_config(1_000))
                .unwrap();
        assert_eq!(model.class_accumulators(), model2.class_accumulators());
        assert_eq!(model.class_vectors(), model2.class_vectors());
    }

    #[test]
    fn prediction_invariant_under_accumulator_scaling() {
        let (matrix, labels) = line_dataset(10);
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(2_000)).unwrap();
        let scaled_accs: Vec<Hypervector> = model
            .class_accumulators()
            .iter()
            .enumerate()
            .map(|(c, a)| {
                let mult = if c == 0 { 3 } else { 7 };
                Hypervector::from_accumulator(a.values().iter().map(|v| v * mult).collect())
                    .unwrap()
            })
            .collect();
        let scaled_vectors = normalize_accumulators(&scaled_accs, model.config().seed).unwrap();
        let scaled = ClassificationModel::from_parts(
            *model.config(),
            model.encoder().clone(),
            model.classes().to_vec(),
            scaled_accs,
            scaled_vectors,
        );
        for row in &matrix {
            assert_eq!(
                model.predict(row).unwrap().0,
                scaled.predict(row).unwrap().0
            );
        }
    }

    #[test]
    fn tie_breaks_to_first_class() {
        let (matrix, labels) = line_dataset(4);
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(1_000)).unwrap();
        // force both class vectors identical
        let v = model.class_vectors()[0].clone();
        let tied = ClassificationModel::from_parts(
            *model.config(),
            model.encoder().clone(),
            model.classes().to_vec(),
            model.class_accumulators().to_vec(),
            vec![v.clone(), v],
        );
        let (label, _) = tied.predict(&matrix[0]).unwrap();
        assert_eq!(label, tied.classes()[0]);
    }

    #[test]
    fn retrain_zero_epochs_is_identity() {
        let (matrix, labels) = line_dataset(10);
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(1_000)).unwrap();
        let retrained = model.retrain(&matrix, &labels, 0).unwrap();
        assert_eq!(model.class_accumulators(), retrained.class_accumulators());
        assert_eq!(model.class_vectors(), retrained.class_vectors());
    }

    #[test]
    fn retrain_no_errors_leaves_model_unchanged() {
        let (matrix, labels) = line_dataset(10);
        let model =
            ClassificationModel::fit(&matrix, &labels, &names(3), tiny_config(2_000)).unwrap();
        // the line dataset is fully separable at this dimension
        let base_acc: usize = matrix
            .iter()
            .zip(&labels)
            .filter(|(row, l)| &model.predict(row).unwrap().0 == *l)
            .count();
        assert_eq!(base_acc, matrix.len());
        let retrained = model.retrain(&matrix, &labels, 5).unwrap();
        assert_eq!(model.class_accumulators(), retrained.class_accumulators());
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let labels: Vec<String> = (0..23)
            .map(|i| if i % 3 == 0 { "a" } else { "b" }.to_string())
            .collect();
        let fold_of = stratified_folds(&labels, 4, 17).unwrap();
        for class in ["a", "b"] {
            let mut counts = [0usize; 4];
            for (i, l) in labels.iter().enumerate() {
                if l == class {
                    counts[fold_of[i]] += 1;
                }
            }
            let max = counts.iter().max().unwrap();
            let min = counts.iter().min().unwrap();
            assert!(max - min <= 1, "class {class} fold sizes {counts:?}");
        }
        // determinism
        assert_eq!(fold_of, stratified_folds(&labels, 4, 17).unwrap());
    }

    #[test]
    fn stratified_folds_reject_scarce_labels() {
        let mut labels: Vec<String> = vec!["a".into(); 10];
        labels.extend(vec!["b".into(); 2]);
        assert!(matches!(
            stratified_folds(&labels, 4, 0),
            Err(HdcError::Stratification { .. })
        ));
        // leave-one-out is allowed as a special case
        assert!(stratified_folds(&labels, 12, 0).is_ok());
    }

    #[test]
    fn cross_validate_deterministic_and_accurate_on_separable_data() {
        let (matrix, labels) = line_dataset(15);
        let a = cross_validate(&matrix, &labels, &names(3), tiny_config(2_000), 5, 3).unwrap();
        let b = cross_validate(&matrix, &labels, &names(3), tiny_config(2_000), 5, 3).unwrap();
        assert_eq!(a, b);
        assert!(mean(&a) >= 0.9, "mean accuracy {}", mean(&a));
    }

    #[test]
    fn backward_selection_with_infinite_threshold_ranks_all() {
        let (matrix, labels) = line_dataset(10);
        let report = stepwise_feature_selection(
            &matrix,
            &labels,
            &names(3),
            tiny_config(1_000),
            SelectionDirection::Backward,
            f64::INFINITY,
            5,
            3,
        )
        .unwrap();
        assert_eq!(report.ranked_features.len(), 3);
        assert_eq!(report.importance.len(), 3);
        assert!(!report.best_subset.is_empty());
    }

    #[test]
    fn selection_rejects_single_feature() {
        let (matrix, labels) = line_dataset(6);
        let single: Vec<Vec<f64>> = matrix.iter().map(|r| vec![r[0]]).collect();
        assert!(stepwise_feature_selection(
            &single,
            &labels,
            &names(1),
            tiny_config(1_000),
            SelectionDirection::Backward,
            0.01,
            3,
            0,
        )
        .is_err());
    }

    #[test]
    fn auto_tune_single_cell_and_determinism() {
        let (matrix, labels) = line_dataset(10);
        let grid = TuneGrid {
            dims: vec![1_000],
            levels: vec![4],
            retrain_epochs: vec![0],
        };
        let (best, table) =
            auto_tune(&matrix, &labels, &names(3), tiny_config(1_000), &grid, 5, 3).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!((best.dim, best.levels, best.retrain_epochs), (1_000, 4, 0));
        let (best2, table2) =
            auto_tune(&matrix, &labels, &names(3), tiny_config(1_000), &grid, 5, 3).unwrap();
        assert_eq!(best, best2);
        assert_eq!(table[0].fold_scores, table2[0].fold_scores);
    }

    #[test]
    fn auto_tune_rejects_empty_grid() {
        let (matrix, labels) = line_dataset(4);
        let grid = TuneGrid {
            dims: vec![],
            levels: vec![4],
            retrain_epochs: vec![0],
        };
        assert!(auto_tune(&matrix, &labels, &names(3), tiny_config(256), &grid, 2, 0).is_err());
    }

    #[test]
    fn auto_tune_tie_prefers_smaller_config() {
        // both cells will reach identical (likely perfect) scores
        let (matrix, labels) = line_dataset(10);
        let grid = TuneGrid {
            dims: vec![4_000, 2_000],
            levels: vec![4],
            retrain_epochs: vec![0],
        };
        let (best, table) =
            auto_tune(&matrix, &labels, &names(3), tiny_config(1_000), &grid, 5, 3).unwrap();
        if (table[0].mean_score - table[1].mean_score).abs() < 1e-15 {
            assert_eq!(best.dim, 2_000);
        }
    }
}
