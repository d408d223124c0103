//! Whole-graph hypervector memories with edge queries and error mitigation.
//!
//! Every node and weight class gets an independent random hypervector, so
//! all of them are pairwise quasi-orthogonal. Fitting builds one memory per
//! node — the bundle of `bind(weight, destination)` terms over its edges,
//! where the destination vector is rotated by one position in directed
//! graphs to break symmetry — and then compresses the whole graph into a
//! single vector: the normalized bundle of `bind(node, normalize(memory))`
//! over all nodes that hold at least one term. Node memories are normalized
//! before compression so high-degree nodes cannot dominate the graph vector.
//!
//! Querying unbinds the graph vector with a node vector, which recovers that
//! node's memory plus crosstalk from everything else superposed in the same
//! vector, and scores candidate neighbors against it. The existence
//! threshold is calibrated at fit time as the midpoint between the mean
//! retrieval score of training edges and the mean score of a seeded sample
//! of non-edges, since crosstalk grows with the edge count and no constant
//! threshold works across graph sizes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{HdcError, Result};
use crate::hypervector::{Form, Hypervector};
use crate::{par, rng};

/// A graph encoded into a single hypervector, retaining the pieces needed
/// for querying, calibration, and error mitigation.
#[derive(Debug, Clone)]
pub struct GraphModel {
    directed: bool,
    dim: usize,
    seed: u64,
    node_names: Vec<String>,
    node_index: BTreeMap<String, usize>,
    node_vectors: Vec<Hypervector>,
    weight_alphabet: Vec<String>,
    weight_vectors: Vec<Hypervector>,
    memories: Vec<Option<Hypervector>>,
    memory_tie_seeds: Vec<u64>,
    graph_accumulator: Hypervector,
    graph_vector: Hypervector,
    graph_tie_seed: u64,
    edges: Vec<(usize, usize, usize)>,
    threshold: f64,
    mitigation_rounds: usize,
}

impl GraphModel {
    /// Encode an edge list. Node vectors are assigned in order of first
    /// appearance, weight vectors in alphabet order; both come from seeded
    /// streams, so renaming nodes while keeping the assignment order leaves
    /// every score identical. Self-loops are rejected.
    pub fn fit(
        edges: &[(String, String, String)],
        weight_alphabet: &[String],
        directed: bool,
        dim: usize,
        seed: u64,
    ) -> Result<Self> {
        if edges.is_empty() {
            return Err(HdcError::EmptyInput("edge list is empty"));
        }
        if weight_alphabet.is_empty() {
            return Err(HdcError::EmptyInput("weight alphabet is empty"));
        }

        let mut node_index: BTreeMap<String, usize> = BTreeMap::new();
        let mut node_names: Vec<String> = Vec::new();
        let mut weight_index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, w) in weight_alphabet.iter().enumerate() {
            weight_index.insert(w.as_str(), i);
        }

        let mut edge_ids = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u == v {
                return Err(HdcError::SelfLoop(u.clone()));
            }
            let wi = *weight_index
                .get(w.as_str())
                .ok_or_else(|| HdcError::UnknownWeightClass(w.clone()))?;
            let ui = *node_index.entry(u.clone()).or_insert_with(|| {
                node_names.push(u.clone());
                node_names.len() - 1
            });
            let vi = *node_index.entry(v.clone()).or_insert_with(|| {
                node_names.push(v.clone());
                node_names.len() - 1
            });
            edge_ids.push((ui, vi, wi));
        }

        let mut node_rng = rng::rng_from(rng::derive(seed, rng::tag::GRAPH_NODE));
        let node_vectors = node_names
            .iter()
            .map(|_| Hypervector::random_from_rng(dim, &mut node_rng))
            .collect::<Result<Vec<_>>>()?;
        let mut weight_rng = rng::rng_from(rng::derive(seed, rng::tag::GRAPH_WEIGHT));
        let weight_vectors = weight_alphabet
            .iter()
            .map(|_| Hypervector::random_from_rng(dim, &mut weight_rng))
            .collect::<Result<Vec<_>>>()?;

        // per-node memory accumulation; the terms are independent binds, the
        // sums exact integer additions
        let terms: Vec<Vec<(usize, Hypervector)>> = par::map_slice(&edge_ids, |&(ui, vi, wi)| {
            let mut out = Vec::with_capacity(2);
            let dest = destination_vector(&node_vectors[vi], directed);
            out.push((ui, weight_vectors[wi].bind(&dest).expect("bipolar bind")));
            if !directed {
                out.push((
                    vi,
                    weight_vectors[wi]
                        .bind(&node_vectors[ui])
                        .expect("bipolar bind"),
                ));
            }
            out
        });
        let mut memory_values: Vec<Option<Vec<i32>>> = vec![None; node_names.len()];
        for edge_terms in &terms {
            for (node, term) in edge_terms {
                let acc = memory_values[*node].get_or_insert_with(|| vec![0i32; dim]);
                for (a, v) in acc.iter_mut().zip(term.values()) {
                    *a += v;
                }
            }
        }
        let memories: Vec<Option<Hypervector>> = memory_values
            .into_iter()
            .map(|m| m.map(|values| Hypervector::from_parts(values, Form::Accumulator)))
            .collect();
        let memory_tie_seeds: Vec<u64> = (0..node_names.len())
            .map(|i| rng::derive2(seed, rng::tag::GRAPH_MEMORY_TIE, i as u64))
            .collect();

        let mut graph_values = vec![0i32; dim];
        for (i, memory) in memories.iter().enumerate() {
            let Some(memory) = memory else { continue };
            let normalized = memory.normalize(memory_tie_seeds[i])?;
            let bound = node_vectors[i].bind(&normalized)?;
            for (g, v) in graph_values.iter_mut().zip(bound.values()) {
                *g += v;
            }
        }
        let graph_accumulator = Hypervector::from_parts(graph_values, Form::Accumulator);
        let graph_tie_seed = rng::derive(seed, rng::tag::GRAPH_GLOBAL_TIE);
        let graph_vector = graph_accumulator.normalize(graph_tie_seed)?;

        let mut model = Self {
            directed,
            dim,
            seed,
            node_names,
            node_index,
            node_vectors,
            weight_alphabet: weight_alphabet.to_vec(),
            weight_vectors,
            memories,
            memory_tie_seeds,
            graph_accumulator,
            graph_vector,
            graph_tie_seed,
            edges: edge_ids,
            threshold: 0.0,
            mitigation_rounds: 0,
        };
        model.threshold = model.calibrate_threshold()?;
        Ok(model)
    }

    /// Midpoint between the mean training-edge score and the mean score of
    /// an equal-sized seeded non-edge sample. On a complete graph, where no
    /// non-edge exists, half the edge mean is used.
    fn calibrate_threshold(&self) -> Result<f64> {
        let edge_scores = par::map_slice(&self.edges, |&(u, v, _)| self.pair_score(u, v));
        let edge_mean = mean(&edge_scores);
        let non_edges = self.sample_non_edges(
            self.edges.len(),
            rng::derive(self.seed, rng::tag::GRAPH_NONEDGE),
        );
        if non_edges.is_empty() {
            return Ok(edge_mean / 2.0);
        }
        let non_scores = par::map_slice(&non_edges, |&(u, v)| self.pair_score(u, v));
        Ok((edge_mean + mean(&non_scores)) / 2.0)
    }

    /// Seeded sample of node pairs that are not edges (ordered pairs when
    /// directed, unordered otherwise), without replacement.
    fn sample_non_edges(&self, count: usize, seed: u64) -> Vec<(usize, usize)> {
        let mut known: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(u, v, _) in &self.edges {
            known.insert((u, v));
            if !self.directed {
                known.insert((v, u));
            }
        }
        let n = self.node_names.len();
        let mut rng = rng::rng_from(seed);
        let mut taken: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        let max_attempts = count.saturating_mul(200).max(1000);
        use rand::Rng;
        while out.len() < count && attempts < max_attempts {
            attempts += 1;
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v {
                continue;
            }
            let key = if self.directed || u <= v {
                (u, v)
            } else {
                (v, u)
            };
            if known.contains(&key) || taken.contains(&key) {
                continue;
            }
            taken.insert(key);
            out.push(key);
        }
        out
    }

    fn node_id(&self, name: &str) -> Result<usize> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| HdcError::UnknownNode(name.to_string()))
    }

    /// Retrieval score of the ordered pair (u, v): unbind the graph vector
    /// with u, then take the best cosine over weight classes against the
    /// candidate destination term.
    fn pair_score(&self, u: usize, v: usize) -> f64 {
        self.pair_weight_scores(u, v)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn pair_weight_scores(&self, u: usize, v: usize) -> Vec<f64> {
        let probe = self
            .graph_vector
            .bind(&self.node_vectors[u])
            .expect("bipolar bind");
        let dest = destination_vector(&self.node_vectors[v], self.directed);
        self.weight_vectors
            .iter()
            .map(|w| {
                let term = w.bind(&dest).expect("bipolar bind");
                probe.cosine(&term).expect("bipolar cosine")
            })
            .collect()
    }

    /// Does an edge from `u` to `v` exist? Returns the decision and the
    /// retrieval score behind it.
    pub fn edge_exists(&self, u: &str, v: &str) -> Result<(bool, f64)> {
        if u == v {
            return Err(HdcError::SelfLoop(u.to_string()));
        }
        let ui = self.node_id(u)?;
        let vi = self.node_id(v)?;
        let score = self.pair_score(ui, vi);
        Ok((score >= self.threshold, score))
    }

    /// Weight class of the assumed edge (u, v): the class whose term best
    /// matches the retrieved memory, ties to the earlier class.
    pub fn predict(&self, u: &str, v: &str) -> Result<(String, f64)> {
        if u == v {
            return Err(HdcError::SelfLoop(u.to_string()));
        }
        let ui = self.node_id(u)?;
        let vi = self.node_id(v)?;
        let (w, score) = self.best_weight(ui, vi);
        Ok((self.weight_alphabet[w].clone(), score))
    }

    fn best_weight(&self, u: usize, v: usize) -> (usize, f64) {
        let scores = self.pair_weight_scores(u, v);
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        (best, scores[best])
    }

    /// Iterative refinement: per round, every misclassified training edge
    /// gets its wrong weight term subtracted and the right one added, and
    /// every sampled non-edge that passes `edge_exists` gets its best term
    /// subtracted. Rounds stop early when nothing needed correcting. The
    /// returned snapshot has training-edge weight accuracy at least the
    /// input model's.
    pub fn error_mitigation(&self, max_rounds: usize) -> Result<Self> {
        if self.edges.is_empty() {
            return Err(HdcError::InvalidParameter(
                "model retains no training edges".into(),
            ));
        }
        let mut current = self.clone();
        let mut best = current.clone();
        let mut best_accuracy = current.training_weight_accuracy();

        for round in 0..max_rounds {
            let mut delta = vec![0i64; self.dim];
            let mut corrections = 0usize;

            let verdicts = par::map_slice(&current.edges, |&(u, v, w_true)| {
                (u, v, w_true, current.best_weight(u, v).0)
            });
            for (u, v, w_true, w_pred) in verdicts {
                if w_pred == w_true {
                    continue;
                }
                corrections += 1;
                current.add_edge_term(&mut delta, u, v, w_true, 1);
                current.add_edge_term(&mut delta, u, v, w_pred, -1);
            }

            let sample_seed = rng::derive2(current.seed, rng::tag::GRAPH_MITIGATE, round as u64);
            let non_edges = current.sample_non_edges(current.edges.len(), sample_seed);
            let accepted = par::map_slice(&non_edges, |&(u, v)| {
                let (w_best, score) = current.best_weight(u, v);
                (u, v, w_best, score >= current.threshold)
            });
            for (u, v, w_best, is_accepted) in accepted {
                if !is_accepted {
                    continue;
                }
                corrections += 1;
                current.add_edge_term(&mut delta, u, v, w_best, -1);
            }

            if corrections == 0 {
                break;
            }
            let values: Vec<i32> = current
                .graph_accumulator
                .values()
                .iter()
                .zip(&delta)
                .map(|(g, d)| (*g as i64 + d) as i32)
                .collect();
            current.graph_accumulator = Hypervector::from_parts(values, Form::Accumulator);
            current.graph_tie_seed =
                rng::derive2(current.seed, rng::tag::GRAPH_GLOBAL_TIE, round as u64 + 1);
            current.graph_vector = current
                .graph_accumulator
                .normalize(current.graph_tie_seed)?;
            current.mitigation_rounds += 1;

            let accuracy = current.training_weight_accuracy();
            if accuracy >= best_accuracy {
                best_accuracy = accuracy;
                best = current.clone();
            }
        }
        Ok(best)
    }

    fn add_edge_term(&self, delta: &mut [i64], u: usize, v: usize, w: usize, sign: i64) {
        let dest = destination_vector(&self.node_vectors[v], self.directed);
        let term = self.weight_vectors[w]
            .bind(&dest)
            .and_then(|t| self.node_vectors[u].bind(&t))
            .expect("bipolar bind");
        for (d, t) in delta.iter_mut().zip(term.values()) {
            *d += sign * *t as i64;
        }
    }

    /// Fraction of training edges whose weight class is predicted correctly.
    pub fn training_weight_accuracy(&self) -> f64 {
        let hits = par::map_slice(&self.edges, |&(u, v, w)| self.best_weight(u, v).0 == w)
            .into_iter()
            .filter(|ok| *ok)
            .count();
        hits as f64 / self.edges.len() as f64
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn weight_alphabet(&self) -> &[String] {
        &self.weight_alphabet
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Training edges as (source, target, weight-class) names.
    pub fn edge_list(&self) -> Vec<(String, String, String)> {
        self.edges
            .iter()
            .map(|&(u, v, w)| {
                (
                    self.node_names[u].clone(),
                    self.node_names[v].clone(),
                    self.weight_alphabet[w].clone(),
                )
            })
            .collect()
    }

    pub fn graph_vector(&self) -> &Hypervector {
        &self.graph_vector
    }

    pub fn graph_accumulator(&self) -> &Hypervector {
        &self.graph_accumulator
    }

    pub fn node_vector(&self, name: &str) -> Result<&Hypervector> {
        Ok(&self.node_vectors[self.node_id(name)?])
    }

    pub fn memory(&self, name: &str) -> Result<Option<&Hypervector>> {
        Ok(self.memories[self.node_id(name)?].as_ref())
    }

    pub fn mitigation_rounds(&self) -> usize {
        self.mitigation_rounds
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        directed: bool,
        dim: usize,
        seed: u64,
        node_names: Vec<String>,
        node_vectors: Vec<Hypervector>,
        weight_alphabet: Vec<String>,
        weight_vectors: Vec<Hypervector>,
        memories: Vec<Option<Hypervector>>,
        memory_tie_seeds: Vec<u64>,
        graph_accumulator: Hypervector,
        graph_vector: Hypervector,
        graph_tie_seed: u64,
        edges: Vec<(usize, usize, usize)>,
        threshold: f64,
        mitigation_rounds: usize,
    ) -> Self {
        let node_index = node_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Self {
            directed,
            dim,
            seed,
            node_names,
            node_index,
            node_vectors,
            weight_alphabet,
            weight_vectors,
            memories,
            memory_tie_seeds,
            graph_accumulator,
            graph_vector,
            graph_tie_seed,
            edges,
            threshold,
            mitigation_rounds,
        }
    }

    pub(crate) fn memory_tie_seeds(&self) -> &[u64] {
        &self.memory_tie_seeds
    }

    pub(crate) fn graph_tie_seed(&self) -> u64 {
        self.graph_tie_seed
    }

    pub(crate) fn edges_raw(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub(crate) fn node_vectors_raw(&self) -> &[Hypervector] {
        &self.node_vectors
    }

    pub(crate) fn weight_vectors_raw(&self) -> &[Hypervector] {
        &self.weight_vectors
    }

    pub(crate) fn memories_raw(&self) -> &[Option<Hypervector>] {
        &self.memories
    }
}

fn destination_vector(v: &Hypervector, directed: bool) -> Hypervector {
    if directed {
        v.permute(1)
    } else {
        v.clone()
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Parse a delimited edge list: one `source<TAB>target<TAB>weight-class`
/// per line, optional header (detected by its first two fields reading
/// "source" and "target"), blank lines skipped.
pub fn parse_edge_list(text: &str) -> Result<Vec<(String, String, String)>> {
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(HdcError::Parse {
                line: lineno + 1,
                column: fields.len(),
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        if lineno == 0
            && fields[0].eq_ignore_ascii_case("source")
            && fields[1].eq_ignore_ascii_case("target")
        {
            continue;
        }
        edges.push((
            fields[0].to_string(),
            fields[1].to_string(),
            fields[2].to_string(),
        ));
    }
    if edges.is_empty() {
        return Err(HdcError::EmptyInput("edge list file has no edges"));
    }
    Ok(edges)
}

/// Distinct weight classes of an edge list, sorted.
pub fn weight_alphabet_of(edges: &[(String, String, String)]) -> Vec<String> {
    let mut set: Vec<String> = edges.iter().map(|(_, _, w)| w.clone()).collect();
    set.sort();
    set.dedup();
    set
}
