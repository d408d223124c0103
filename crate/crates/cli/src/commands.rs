//! Subcommand implementations.

use anyhow::{bail, Context, Result};

use hdc_core::classification::{
    auto_tune, cross_validate, stepwise_feature_selection, ClassificationModel, ClassifierConfig,
    SelectionDirection, TuneGrid,
};
use hdc_core::clustering::ClusteringModel;
use hdc_core::dataset::{load_dataset, Dataset, Target, TargetKind};
use hdc_core::encoding::{FeatureEncoder, RangeSpec};
use hdc_core::graph::{parse_edge_list, weight_alphabet_of, GraphModel};
use hdc_core::io::{load_model, save_model, Model, SavedClustering};
use hdc_core::quantum::{QuantumClassificationModel, SimilarityMode};
use hdc_core::regression::{RegressionConfig, RegressionModel};

use crate::{
    ClassifyCmd, ClassifyCv, ClassifyFit, ClassifyPredict, ClassifySelect, ClassifyTune,
    ClusterCmd, ClusterFit, ClusterPredict, Direction, GraphBuild, GraphCmd, GraphMitigate,
    GraphQuery, RegressCmd, RegressFit, RegressPredict,
};

fn print_config(command: &str, pairs: &[(&str, String)]) {
    let rest: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("# config: command={command} {}", rest.join(" "));
}

fn target_kind(unlabeled: bool, labeled: TargetKind) -> TargetKind {
    if unlabeled {
        TargetKind::Unlabeled
    } else {
        labeled
    }
}

fn check_features(expected: &[String], dataset: &Dataset) -> Result<()> {
    if expected != dataset.feature_names.as_slice() {
        bail!(
            "dataset features {:?} do not match the model's features {:?}",
            dataset.feature_names,
            expected
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// classify

pub fn classify(cmd: ClassifyCmd) -> Result<()> {
    match cmd {
        ClassifyCmd::Fit(args) => classify_fit(args),
        ClassifyCmd::Predict(args) => classify_predict(args),
        ClassifyCmd::Cv(args) => classify_cv(args),
        ClassifyCmd::Select(args) => classify_select(args),
        ClassifyCmd::Tune(args) => classify_tune(args),
    }
}

fn classifier_config(
    dim: usize,
    levels: usize,
    retrain: usize,
    per_feature_ranges: bool,
    seed: u64,
) -> ClassifierConfig {
    ClassifierConfig {
        dim,
        levels,
        retrain_epochs: retrain,
        per_feature_ranges,
        seed,
    }
}

fn classify_fit(args: ClassifyFit) -> Result<()> {
    print_config(
        "classify-fit",
        &[
            ("input", args.input.clone()),
            ("output", args.output.clone()),
            ("dim", args.dim.to_string()),
            ("levels", args.levels.to_string()),
            ("retrain", args.retrain.to_string()),
            ("per-feature-ranges", args.per_feature_ranges.to_string()),
            ("quantum", args.quantum.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let dataset = load_dataset(&args.input, TargetKind::Classification)
        .with_context(|| format!("loading {}", args.input))?;
    let labels = dataset.labels()?;
    let config = classifier_config(
        args.dim,
        args.levels,
        args.retrain,
        args.per_feature_ranges,
        args.seed,
    );
    let model = if args.quantum {
        let model = QuantumClassificationModel::fit(
            &dataset.matrix,
            labels,
            &dataset.feature_names,
            config,
        )?;
        Model::QuantumClassification(model)
    } else {
        let mut model =
            ClassificationModel::fit(&dataset.matrix, labels, &dataset.feature_names, config)?;
        if args.retrain > 0 {
            model = model.retrain(&dataset.matrix, labels, args.retrain)?;
        }
        Model::Classification(model)
    };
    save_model(&model, &args.output)?;
    match &model {
        Model::QuantumClassification(m) => {
            for (class, p) in m.classes().iter().zip(m.success_probabilities()) {
                println!("class\t{class}\tsuccess_probability\t{p:.6}");
            }
        }
        Model::Classification(m) => {
            for class in m.classes() {
                println!("class\t{class}");
            }
        }
        _ => unreachable!(),
    }
    println!(
        "fitted\trows={}\tfeatures={}\tmodel={}",
        dataset.rows(),
        dataset.features(),
        args.output
    );
    Ok(())
}

fn classify_predict(args: ClassifyPredict) -> Result<()> {
    print_config(
        "classify-predict",
        &[
            ("model", args.model.clone()),
            ("input", args.input.clone()),
            ("unlabeled", args.unlabeled.to_string()),
            ("shots", args.shots.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let dataset = load_dataset(
        &args.input,
        target_kind(args.unlabeled, TargetKind::Classification),
    )?;
    let loaded = load_model(&args.model)?;
    let predictions: Vec<(String, Vec<(String, f64)>)> = match &loaded {
        Model::Classification(model) => {
            if args.shots > 0 {
                bail!("--shots applies to quantum models; this file holds a classical classifier");
            }
            check_features(model.encoder().feature_names(), &dataset)?;
            dataset
                .matrix
                .iter()
                .map(|row| model.predict(row))
                .collect::<hdc_core::Result<_>>()?
        }
        Model::QuantumClassification(model) => {
            check_features(model.encoder().feature_names(), &dataset)?;
            dataset
                .matrix
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mode = if args.shots == 0 {
                        SimilarityMode::Exact
                    } else {
                        SimilarityMode::Sampled {
                            shots: args.shots,
                            seed: hdc_core::derive_stream_seed(args.seed, i as u64),
                        }
                    };
                    model.predict(row, mode)
                })
                .collect::<hdc_core::Result<_>>()?
        }
        other => bail!(
            "model file holds a {} model, expected a classifier",
            other.kind_name()
        ),
    };

    for ((id, (label, scores)), _) in dataset.sample_ids.iter().zip(&predictions).zip(0..) {
        let score_cols: Vec<String> = scores
            .iter()
            .map(|(class, s)| format!("{class}={s:.6}"))
            .collect();
        println!("{id}\t{label}\t{}", score_cols.join("\t"));
    }
    if let Target::Labels(truth) = &dataset.target {
        let hits = predictions
            .iter()
            .zip(truth)
            .filter(|((p, _), t)| p == *t)
            .count();
        println!("# accuracy: {:.6}", hits as f64 / truth.len() as f64);
    }
    Ok(())
}

fn classify_cv(args: ClassifyCv) -> Result<()> {
    print_config(
        "classify-cv",
        &[
            ("input", args.input.clone()),
            ("folds", args.folds.to_string()),
            ("dim", args.dim.to_string()),
            ("levels", args.levels.to_string()),
            ("retrain", args.retrain.to_string()),
            ("per-feature-ranges", args.per_feature_ranges.to_string()),
            ("quantum", args.quantum.to_string()),
            ("shots", args.shots.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let dataset = load_dataset(&args.input, TargetKind::Classification)?;
    let labels = dataset.labels()?;
    let config = classifier_config(
        args.dim,
        args.levels,
        args.retrain,
        args.per_feature_ranges,
        args.seed,
    );
    let scores = if args.quantum {
        quantum_cross_validate(&dataset, config, args.folds, args.seed, args.shots)?
    } else {
        cross_validate(
            &dataset.matrix,
            labels,
            &dataset.feature_names,
            config,
            args.folds,
            args.seed,
        )?
    };
    for (fold, score) in scores.iter().enumerate() {
        println!("fold\t{fold}\t{score:.6}");
    }
    let mean: f64 = scores.iter().sum::<f64>() / scores.len() as f64;
    println!("mean\t{mean:.6}");
    Ok(())
}

/// Stratified CV over the quantum pipeline: one quantum classifier per fold.
fn quantum_cross_validate(
    dataset: &Dataset,
    config: ClassifierConfig,
    folds: usize,
    seed: u64,
    shots: usize,
) -> Result<Vec<f64>> {
    let labels = dataset.labels()?;
    let fold_of = hdc_core::classification::stratified_folds(labels, folds, seed)?;
    let mut scores = Vec::with_capacity(folds);
    for fold in 0..folds {
        let (mut train_m, mut train_l, mut test_m, mut test_l) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (i, &f) in fold_of.iter().enumerate() {
            if f == fold {
                test_m.push(dataset.matrix[i].clone());
                test_l.push(labels[i].clone());
            } else {
                train_m.push(dataset.matrix[i].clone());
                train_l.push(labels[i].clone());
            }
        }
        let model =
            QuantumClassificationModel::fit(&train_m, &train_l, &dataset.feature_names, config)?;
        let mut hits = 0usize;
        for (i, (row, truth)) in test_m.iter().zip(&test_l).enumerate() {
            let mode = if shots == 0 {
                SimilarityMode::Exact
            } else {
                let fold_seed = hdc_core::derive_stream_seed(seed, fold as u64);
                SimilarityMode::Sampled {
                    shots,
                    seed: hdc_core::derive_stream_seed(fold_seed, i as u64),
                }
            };
            if &model.predict(row, mode)?.0 == truth {
                hits += 1;
            }
        }
        scores.push(hits as f64 / test_m.len().max(1) as f64);
    }
    Ok(scores)
}

fn classify_select(args: ClassifySelect) -> Result<()> {
    let direction_name = match args.direction {
        Direction::Backward => "backward",
        Direction::Forward => "forward",
    };
    print_config(
        "classify-select",
        &[
            ("input", args.input.clone()),
            ("direction", direction_name.to_string()),
            ("threshold", args.threshold.to_string()),
            ("folds", args.folds.to_string()),
            ("dim", args.dim.to_string()),
            ("levels", args.levels.to_string()),
            ("retrain", args.retrain.to_string()),
            ("per-feature-ranges", args.per_feature_ranges.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let dataset = load_dataset(&args.input, TargetKind::Classification)?;
    let labels = dataset.labels()?;
    let config = classifier_config(
        args.dim,
        args.levels,
        args.retrain,
        args.per_feature_ranges,
        args.seed,
    );
    let report = stepwise_feature_selection(
        &dataset.matrix,
        labels,
        &dataset.feature_names,
        config,
        match args.direction {
            Direction::Backward => SelectionDirection::Backward,
            Direction::Forward => SelectionDirection::Forward,
        },
        args.threshold,
        args.folds,
        args.seed,
    )?;
    for (rank, feature) in report.ranked_features.iter().enumerate() {
        println!("ranked\t{rank}\t{feature}");
    }
    for (feature, importance) in &report.importance {
        println!("importance\t{feature}\t{importance:.6}");
    }
    println!("best_subset\t{}", report.best_subset.join(","));
    println!("best_score\t{:.6}", report.best_score);
    Ok(())
}

fn classify_tune(args: ClassifyTune) -> Result<()> {
    print_config(
        "classify-tune",
        &[
            ("input", args.input.clone()),
            (
                "grid-dim",
                args.grid_dim
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "grid-levels",
                args.grid_levels
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "grid-retrain",
                args.grid_retrain
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("folds", args.folds.to_string()),
            ("per-feature-ranges", args.per_feature_ranges.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let dataset = load_dataset(&args.input, TargetKind::Classification)?;
    let labels = dataset.labels()?;
    let base = classifier_config(
        args.grid_dim[0],
        args.grid_levels[0],
        args.grid_retrain[0],
        args.per_feature_ranges,
        args.seed,
    );
    let grid = TuneGrid {
        dims: args.grid_dim,
        levels: args.grid_levels,
        retrain_epochs: args.grid_retrain,
    };
    let (best, table) = auto_tune(
        &dataset.matrix,
        labels,
        &dataset.feature_names,
        base,
        &grid,
        args.folds,
        args.seed,
    )?;
    for entry in &table {
        let folds: Vec<String> = entry
            .fold_scores
            .iter()
            .map(|s| format!("{s:.6}"))
            .collect();
        println!(
            "cell\tdim={}\tlevels={}\tretrain={}\tmean={:.6}\tfolds={}",
            entry.dim,
            entry.levels,
            entry.retrain_epochs,
            entry.mean_score,
            folds.join(",")
        );
    }
    println!(
        "best\tdim={}\tlevels={}\tretrain={}",
        best.dim, best.levels, best.retrain_epochs
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// cluster

pub fn cluster(cmd: ClusterCmd) -> Result<()> {
    match cmd {
        ClusterCmd::Fit(args) => cluster_fit(args),
        ClusterCmd::Predict(args) => cluster_predict(args),
    }
}

fn cluster_fit(args: ClusterFit) -> Result<()> {
    print_config(
        "cluster-fit",
        &[
            ("input", args.input.clone()),
            ("output", args.output.clone()),
            ("k", args.k.to_string()),
            ("max-iter", args.max_iter.to_string()),
            ("dim", args.dim.to_string()),
            ("levels", args.levels.to_string()),
            ("unlabeled", args.unlabeled.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let dataset = load_dataset(
        &args.input,
        target_kind(args.unlabeled, TargetKind::Classification),
    )?;
    let ranges = RangeSpec::global_from(&dataset.matrix)?;
    let encoder = FeatureEncoder::build(
        &dataset.feature_names,
        args.dim,
        args.levels,
        &ranges,
        args.seed,
    )?;
    let points = encoder.encode_batch(&dataset.matrix)?;
    let model = ClusteringModel::fit(&points, args.k, args.max_iter, args.seed)?;
    save_model(
        &Model::Clustering(SavedClustering {
            model: model.clone(),
            encoder: Some(encoder),
        }),
        &args.output,
    )?;
    println!(
        "fitted\tconverged={}\titerations={}",
        model.converged(),
        model.iterations_run()
    );
    for (id, assignment) in dataset.sample_ids.iter().zip(model.assignments()) {
        println!("{id}\t{assignment}");
    }
    Ok(())
}

fn cluster_predict(args: ClusterPredict) -> Result<()> {
    print_config(
        "cluster-predict",
        &[
            ("model", args.model.clone()),
            ("input", args.input.clone()),
            ("unlabeled", args.unlabeled.to_string()),
        ],
    );
    let dataset = load_dataset(
        &args.input,
        target_kind(args.unlabeled, TargetKind::Classification),
    )?;
    let Model::Clustering(saved) = load_model(&args.model)? else {
        bail!("model file does not hold a clustering model");
    };
    let encoder = saved
        .encoder
        .as_ref()
        .context("clustering model was saved without its record encoder")?;
    check_features(encoder.feature_names(), &dataset)?;
    for (id, row) in dataset.sample_ids.iter().zip(&dataset.matrix) {
        let point = encoder.encode_record(row)?;
        println!("{id}\t{}", saved.model.predict(&point)?);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// regress

pub fn regress(cmd: RegressCmd) -> Result<()> {
    match cmd {
        RegressCmd::Fit(args) => regress_fit(args),
        RegressCmd::Predict(args) => regress_predict(args),
    }
}

fn regress_fit(args: RegressFit) -> Result<()> {
    print_config(
        "regress-fit",
        &[
            ("input", args.input.clone()),
            ("output", args.output.clone()),
            ("dim", args.dim.to_string()),
            ("k", args.k.to_string()),
            ("lr", args.lr.to_string()),
            ("epochs", args.epochs.to_string()),
            ("quantized", args.quantized.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    if args.lr == 0.0 {
        eprintln!("warning: learning rate is 0; fitting a mean-predictor model");
    }
    let dataset = load_dataset(&args.input, TargetKind::Regression)?;
    let targets = dataset.values()?;
    let config = RegressionConfig {
        dim: args.dim,
        k: args.k,
        learning_rate: args.lr,
        epochs: args.epochs,
        quantized_prediction: args.quantized,
        seed: args.seed,
    };
    let model = RegressionModel::fit(&dataset.matrix, targets, config)?;
    save_model(&Model::Regression(model.clone()), &args.output)?;
    let predictions = model.predict_batch(&dataset.matrix)?;
    let rmse = (predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y).powi(2))
        .sum::<f64>()
        / targets.len() as f64)
        .sqrt();
    println!("fitted\trows={}\ttrain_rmse={rmse:.6}", dataset.rows());
    Ok(())
}

fn regress_predict(args: RegressPredict) -> Result<()> {
    print_config(
        "regress-predict",
        &[
            ("model", args.model.clone()),
            ("input", args.input.clone()),
            ("unlabeled", args.unlabeled.to_string()),
            ("quantized", args.quantized.to_string()),
        ],
    );
    let dataset = load_dataset(
        &args.input,
        target_kind(args.unlabeled, TargetKind::Regression),
    )?;
    let Model::Regression(mut model) = load_model(&args.model)? else {
        bail!("model file does not hold a regression model");
    };
    if args.quantized {
        model.set_quantized_prediction(true);
    }
    let predictions = model.predict_batch(&dataset.matrix)?;
    for (id, p) in dataset.sample_ids.iter().zip(&predictions) {
        println!("{id}\t{p:.6}");
    }
    if let Target::Values(truth) = &dataset.target {
        let rmse = (predictions
            .iter()
            .zip(truth)
            .map(|(p, y)| (p - y).powi(2))
            .sum::<f64>()
            / truth.len() as f64)
            .sqrt();
        println!("# rmse: {rmse:.6}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// graph

pub fn graph(cmd: GraphCmd) -> Result<()> {
    match cmd {
        GraphCmd::Build(args) => graph_build(args),
        GraphCmd::Query(args) => graph_query(args, false),
        GraphCmd::Predict(args) => graph_query(args, true),
        GraphCmd::Mitigate(args) => graph_mitigate(args),
    }
}

fn graph_build(args: GraphBuild) -> Result<()> {
    print_config(
        "graph-build",
        &[
            ("input", args.input.clone()),
            ("output", args.output.clone()),
            ("directed", args.directed.to_string()),
            ("dim", args.dim.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    let text =
        std::fs::read_to_string(&args.input).with_context(|| format!("loading {}", args.input))?;
    let edges = parse_edge_list(&text)?;
    let alphabet = weight_alphabet_of(&edges);
    let model = GraphModel::fit(&edges, &alphabet, args.directed, args.dim, args.seed)?;
    save_model(&Model::Graph(model.clone()), &args.output)?;
    println!(
        "built\tnodes={}\tedges={}\tweight_classes={}\tthreshold={:.6}",
        model.node_names().len(),
        model.edge_count(),
        model.weight_alphabet().len(),
        model.threshold()
    );
    Ok(())
}

fn graph_query(args: GraphQuery, weight: bool) -> Result<()> {
    print_config(
        if weight {
            "graph-predict"
        } else {
            "graph-query"
        },
        &[
            ("model", args.model.clone()),
            ("source", args.source.clone()),
            ("target", args.target.clone()),
        ],
    );
    let Model::Graph(model) = load_model(&args.model)? else {
        bail!("model file does not hold a graph model");
    };
    if weight {
        let (class, score) = model.predict(&args.source, &args.target)?;
        println!("weight\t{class}\t{score:.6}");
    } else {
        let (exists, score) = model.edge_exists(&args.source, &args.target)?;
        println!("exists\t{exists}\t{score:.6}");
    }
    Ok(())
}

fn graph_mitigate(args: GraphMitigate) -> Result<()> {
    let output = args.output.clone().unwrap_or_else(|| args.model.clone());
    print_config(
        "graph-mitigate",
        &[
            ("model", args.model.clone()),
            ("output", output.clone()),
            ("rounds", args.rounds.to_string()),
        ],
    );
    let Model::Graph(model) = load_model(&args.model)? else {
        bail!("model file does not hold a graph model");
    };
    let before = model.training_weight_accuracy();
    let refined = model.error_mitigation(args.rounds)?;
    let after = refined.training_weight_accuracy();
    save_model(&Model::Graph(refined.clone()), &output)?;
    println!(
        "mitigated\trounds_run={}\taccuracy_before={before:.6}\taccuracy_after={after:.6}",
        refined.mitigation_rounds()
    );
    Ok(())
}
