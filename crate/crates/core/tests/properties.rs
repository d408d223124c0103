//! Cross-module behavioral properties from the model contracts, checked by
//! Monte-Carlo against independent constructions.

mod common;

use common::*;

use hdc_core::classification::{
    auto_tune, stepwise_feature_selection, ClassificationModel, ClassifierConfig,
    SelectionDirection, TuneGrid,
};
use hdc_core::graph::GraphModel;
use hdc_core::{bundle, Hypervector};

/// A vector bundled in with a bare majority (101 copies against 100 random
/// vectors) still dominates the normalized bundle.
#[test]
fn bundle_majority_survives_noise() {
    let dim = 10_000;
    let signal = Hypervector::random(dim, 42).unwrap();
    let mut stack: Vec<Hypervector> = vec![signal.clone(); 101];
    for i in 0..100u64 {
        stack.push(Hypervector::random(dim, 1000 + i).unwrap());
    }
    let refs: Vec<&Hypervector> = stack.iter().collect();
    let bundled = bundle(&refs).unwrap().normalize(7).unwrap();
    let cos = bundled.cosine(&signal).unwrap();
    assert!(cos > 0.3, "signal cosine {cos}");
}

/// Training accuracy on the separable two-blob dataset.
#[test]
fn classifier_fit_separates_blobs() {
    let (matrix, labels) = gaussian_blobs(&[0.0, 4.0], 100, 10, 1.0, 900);
    let config = ClassifierConfig {
        dim: 10_000,
        levels: 10,
        seed: 901,
        ..ClassifierConfig::default()
    };
    let model = ClassificationModel::fit(&matrix, &labels, &feature_names(10), config).unwrap();
    let hits = matrix
        .iter()
        .zip(&labels)
        .filter(|(row, label)| &model.predict(row).unwrap().0 == *label)
        .count();
    let accuracy = hits as f64 / matrix.len() as f64;
    assert!(accuracy >= 0.95, "training accuracy {accuracy}");
}

/// On overlapping blobs, retraining with best-epoch snapshotting never ends
/// below the epoch-zero training accuracy.
#[test]
fn retrain_does_not_regress_on_overlapping_blobs() {
    let (matrix, labels) = gaussian_blobs(&[0.0, 1.0], 60, 10, 1.0, 910);
    let config = ClassifierConfig {
        dim: 4_096,
        levels: 10,
        seed: 911,
        ..ClassifierConfig::default()
    };
    let names = feature_names(10);
    let model = ClassificationModel::fit(&matrix, &labels, &names, config).unwrap();
    let accuracy = |m: &ClassificationModel| {
        matrix
            .iter()
            .zip(&labels)
            .filter(|(row, label)| &m.predict(row).unwrap().0 == *label)
            .count() as f64
            / matrix.len() as f64
    };
    let before = accuracy(&model);
    let retrained = model.retrain(&matrix, &labels, 10).unwrap();
    let after = accuracy(&retrained);
    assert!(after >= before, "retraining regressed: {before} -> {after}");
}

/// Capacity is non-decreasing in dimension, up to noise: the larger grid
/// dimension scores at least as well as the smaller minus 0.05.
#[test]
fn auto_tune_capacity_grows_with_dimension() {
    let (matrix, labels) = gaussian_blobs(&[0.0, 4.0], 50, 10, 1.0, 920);
    let config = ClassifierConfig {
        seed: 921,
        ..ClassifierConfig::default()
    };
    let grid = TuneGrid {
        dims: vec![1_000, 10_000],
        levels: vec![2],
        retrain_epochs: vec![0],
    };
    let (_, table) =
        auto_tune(&matrix, &labels, &feature_names(10), config, &grid, 5, 922).unwrap();
    let small = table.iter().find(|e| e.dim == 1_000).unwrap().mean_score;
    let large = table.iter().find(|e| e.dim == 10_000).unwrap().mean_score;
    assert!(
        large >= small - 0.05,
        "capacity dropped with dimension: {small} -> {large}"
    );
}

/// With two copies of the informative feature, backward elimination drops
/// exactly one of them: removal of either is score-neutral while both are
/// present, and the tie breaks by feature order.
#[test]
fn duplicated_feature_backward_elimination() {
    let (mut matrix, labels) = planted_informative(60, 9, 930);
    // append a duplicate of feature 0 as the last column
    for row in matrix.iter_mut() {
        row.push(row[0]);
    }
    let mut names = feature_names(9);
    names.push("f0_copy".to_string());

    let config = ClassifierConfig {
        dim: 4_096,
        levels: 10,
        seed: 931,
        ..ClassifierConfig::default()
    };

    // brute force the score-neutrality premise: dropping either copy alone
    // leaves a dataset the classifier still separates perfectly
    for drop in [0usize, 9] {
        let reduced: Vec<Vec<f64>> = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let reduced_names: Vec<String> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, n)| n.clone())
            .collect();
        let scores = hdc_core::classification::cross_validate(
            &reduced,
            &labels,
            &reduced_names,
            config,
            5,
            932,
        )
        .unwrap();
        assert!(
            mean(&scores) >= 0.99,
            "dropping column {drop} is not score-neutral: {scores:?}"
        );
    }

    let report = stepwise_feature_selection(
        &matrix,
        &labels,
        &names,
        config,
        SelectionDirection::Backward,
        0.01,
        5,
        932,
    )
    .unwrap();
    let kept_original = report.best_subset.contains(&"f0".to_string());
    let kept_copy = report.best_subset.contains(&"f0_copy".to_string());
    assert!(
        kept_original ^ kept_copy,
        "exactly one duplicate should survive, best subset {:?}",
        report.best_subset
    );
}

/// On the 20-node random graph, training-edge retrieval scores separate
/// from non-edge scores by at least five non-edge standard deviations,
/// measured by brute force over every node pair.
#[test]
fn graph_edge_scores_separate_from_non_edges() {
    let edges = random_graph(20, 0.2, &["w"], 950);
    let model = GraphModel::fit(&edges, &["w".to_string()], false, 10_000, 951).unwrap();
    let mut truth = std::collections::BTreeSet::new();
    for (u, v, _) in &edges {
        truth.insert((u.clone(), v.clone()));
        truth.insert((v.clone(), u.clone()));
    }
    let nodes = model.node_names().to_vec();
    let mut edge_scores = Vec::new();
    let mut non_edge_scores = Vec::new();
    for u in &nodes {
        for v in &nodes {
            if u == v {
                continue;
            }
            let (_, score) = model.edge_exists(u, v).unwrap();
            if truth.contains(&(u.clone(), v.clone())) {
                edge_scores.push(score);
            } else {
                non_edge_scores.push(score);
            }
        }
    }
    let gap = mean(&edge_scores) - mean(&non_edge_scores);
    let noise = sample_std(&non_edge_scores);
    assert!(
        gap >= 5.0 * noise,
        "edge/non-edge gap {gap} under 5 sigma ({noise})"
    );
}

/// Training-edge retrieval decays as edges are added but stays above the
/// calibrated threshold while the load is at most D/100.
#[test]
fn graph_retrieval_decays_but_stays_above_threshold() {
    let dim = 10_000;
    let mut curve = Vec::new();
    for &edge_count in &[10usize, 25, 50, 100] {
        // a cycle plus chords gives exactly edge_count distinct edges
        let nodes = edge_count;
        let mut edges = Vec::new();
        for i in 0..nodes {
            let j = (i + 1) % nodes;
            edges.push((format!("n{i}"), format!("n{j}"), "w".to_string()));
        }
        let model = GraphModel::fit(&edges, &["w".to_string()], false, dim, 940).unwrap();
        let scores: Vec<f64> = edges
            .iter()
            .map(|(u, v, _)| model.edge_exists(u, v).unwrap().1)
            .collect();
        let mean_score = mean(&scores);
        let above = scores.iter().filter(|s| **s >= model.threshold()).count();
        assert_eq!(
            above,
            edges.len(),
            "{} of {} training edges fell below threshold at E={edge_count}",
            edges.len() - above,
            edges.len()
        );
        curve.push((edge_count, mean_score));
    }
    for window in curve.windows(2) {
        assert!(
            window[1].1 < window[0].1,
            "retrieval did not decay: {curve:?}"
        );
    }
    println!("retrieval decay curve: {curve:?}");
}
