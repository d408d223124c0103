//! Versioned binary model files.
//!
//! Layout (all integers little-endian, floats as IEEE-754 bit patterns):
//!
//! ```text
//! magic "HDCM" | version u32 | kind u8 | payload_len u64 | payload | sha256
//! ```
//!
//! The trailing SHA-256 covers everything before it. Accumulators are stored
//! as raw integers and every real as its exact bit pattern, so a loaded
//! model reproduces the saved model's predictions bit-for-bit. An
//! unrecognized version is always an explicit error, never a silent
//! reinterpretation.

use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::classification::{ClassificationModel, ClassifierConfig};
use crate::clustering::ClusteringModel;
use crate::encoding::{FeatureEncoder, LevelEncoding};
use crate::error::{HdcError, Result};
use crate::graph::GraphModel;
use crate::hypervector::{Form, Hypervector};
use crate::quantum::QuantumClassificationModel;
use crate::regression::{BinarizedCopies, RegressionConfig, RegressionEncoder, RegressionModel};

pub const MAGIC: &[u8; 4] = b"HDCM";
pub const FORMAT_VERSION: u32 = 1;

const CHECKSUM_LEN: usize = 32;
const HEADER_LEN: usize = 4 + 4 + 1 + 8;

/// A clustering model together with the record encoder that produced its
/// points, so raw rows can be assigned after loading.
#[derive(Debug, Clone)]
pub struct SavedClustering {
    pub model: ClusteringModel,
    pub encoder: Option<FeatureEncoder>,
}

/// Any persistable model.
#[derive(Debug, Clone)]
pub enum Model {
    Classification(ClassificationModel),
    Clustering(SavedClustering),
    Regression(RegressionModel),
    Graph(GraphModel),
    QuantumClassification(QuantumClassificationModel),
}

impl Model {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Classification(_) => "classification",
            Model::Clustering(_) => "clustering",
            Model::Regression(_) => "regression",
            Model::Graph(_) => "graph",
            Model::QuantumClassification(_) => "quantum-classification",
        }
    }

    fn kind_byte(&self) -> u8 {
        match self {
            Model::Classification(_) => 1,
            Model::Clustering(_) => 2,
            Model::Regression(_) => 3,
            Model::Graph(_) => 4,
            Model::QuantumClassification(_) => 5,
        }
    }
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_model(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let bytes = std::fs::read(path)?;
    decode_model(&bytes)
}

pub fn encode_model(model: &Model) -> Vec<u8> {
    let mut payload = Writer::new();
    match model {
        Model::Classification(m) => write_classification(&mut payload, m),
        Model::Clustering(m) => write_clustering(&mut payload, m),
        Model::Regression(m) => write_regression(&mut payload, m),
        Model::Graph(m) => write_graph(&mut payload, m),
        Model::QuantumClassification(m) => write_quantum(&mut payload, m),
    }
    let payload = payload.into_bytes();

    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + CHECKSUM_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(model.kind_byte());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn decode_model(bytes: &[u8]) -> Result<Model> {
    if bytes.len() < HEADER_LEN {
        return Err(HdcError::BadModelFile(format!(
            "file too short for a model header ({} bytes)",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(HdcError::BadModelFile("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(HdcError::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let kind = bytes[8];
    let payload_len = u64::from_le_bytes(bytes[9..17].try_into().unwrap()) as usize;
    let expected_total = HEADER_LEN + payload_len + CHECKSUM_LEN;
    if bytes.len() != expected_total {
        // truncated or padded: fails integrity validation
        return Err(HdcError::ChecksumMismatch);
    }
    let body_end = HEADER_LEN + payload_len;
    let digest = Sha256::digest(&bytes[..body_end]);
    if digest.as_slice() != &bytes[body_end..] {
        return Err(HdcError::ChecksumMismatch);
    }

    let mut reader = Reader::new(&bytes[HEADER_LEN..body_end]);
    let model = match kind {
        1 => Model::Classification(read_classification(&mut reader)?),
        2 => Model::Clustering(read_clustering(&mut reader)?),
        3 => Model::Regression(read_regression(&mut reader)?),
        4 => Model::Graph(read_graph(&mut reader)?),
        5 => Model::QuantumClassification(read_quantum(&mut reader)?),
        other => {
            return Err(HdcError::BadModelFile(format!(
                "unknown model kind {other}"
            )))
        }
    };
    reader.finish()?;
    Ok(model)
}

// ---------------------------------------------------------------------------
// primitive writer/reader

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Self { buf: Vec::new() }
    }

    fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn bool(&mut self, v: bool) {
        self.buf.push(v as u8);
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn i32(&mut self, v: i32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_bits().to_le_bytes());
    }

    fn string(&mut self, s: &str) {
        self.usize(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }

    fn strings(&mut self, ss: &[String]) {
        self.usize(ss.len());
        for s in ss {
            self.string(s);
        }
    }

    fn f64s(&mut self, vs: &[f64]) {
        self.usize(vs.len());
        for &v in vs {
            self.f64(v);
        }
    }

    fn u64s(&mut self, vs: &[u64]) {
        self.usize(vs.len());
        for &v in vs {
            self.u64(v);
        }
    }

    fn hypervector(&mut self, hv: &Hypervector) {
        self.u8(match hv.form() {
            Form::Bipolar => 0,
            Form::Accumulator => 1,
        });
        self.usize(hv.dim());
        for &v in hv.values() {
            self.i32(v);
        }
        match hv.name() {
            Some(name) => {
                self.bool(true);
                self.string(name);
            }
            None => self.bool(false),
        }
        match hv.seed() {
            Some(seed) => {
                self.bool(true);
                self.u64(seed);
            }
            None => self.bool(false),
        }
    }

    fn hypervectors(&mut self, hvs: &[Hypervector]) {
        self.usize(hvs.len());
        for hv in hvs {
            self.hypervector(hv);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(HdcError::BadModelFile("payload ended unexpectedly".into()));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(HdcError::BadModelFile(format!(
                "{} trailing bytes after payload",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn bool(&mut self) -> Result<bool> {
        Ok(self.u8()? != 0)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize_(&mut self) -> Result<usize> {
        Ok(self.u64()? as usize)
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(u64::from_le_bytes(
            self.take(8)?.try_into().unwrap(),
        )))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.usize_()?;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| HdcError::BadModelFile("invalid utf-8 string".into()))
    }

    fn strings(&mut self) -> Result<Vec<String>> {
        let len = self.usize_()?;
        (0..len).map(|_| self.string()).collect()
    }

    fn f64s(&mut self) -> Result<Vec<f64>> {
        let len = self.usize_()?;
        (0..len).map(|_| self.f64()).collect()
    }

    fn u64s(&mut self) -> Result<Vec<u64>> {
        let len = self.usize_()?;
        (0..len).map(|_| self.u64()).collect()
    }

    fn hypervector(&mut self) -> Result<Hypervector> {
        let form = match self.u8()? {
            0 => Form::Bipolar,
            1 => Form::Accumulator,
            other => {
                return Err(HdcError::BadModelFile(format!(
                    "unknown hypervector form {other}"
                )))
            }
        };
        let dim = self.usize_()?;
        let values = (0..dim).map(|_| self.i32()).collect::<Result<Vec<_>>>()?;
        let mut hv = Hypervector::from_parts(values, form);
        if self.bool()? {
            hv = hv.with_name(self.string()?);
        }
        if self.bool()? {
            let seed = self.u64()?;
            hv.set_seed(Some(seed));
        }
        Ok(hv)
    }

    fn hypervectors(&mut self) -> Result<Vec<Hypervector>> {
        let len = self.usize_()?;
        (0..len).map(|_| self.hypervector()).collect()
    }
}

// ---------------------------------------------------------------------------
// per-kind payloads

fn write_classifier_config(w: &mut Writer, c: &ClassifierConfig) {
    w.usize(c.dim);
    w.usize(c.levels);
    w.usize(c.retrain_epochs);
    w.bool(c.per_feature_ranges);
    w.u64(c.seed);
}

fn read_classifier_config(r: &mut Reader) -> Result<ClassifierConfig> {
    Ok(ClassifierConfig {
        dim: r.usize_()?,
        levels: r.usize_()?,
        retrain_epochs: r.usize_()?,
        per_feature_ranges: r.bool()?,
        seed: r.u64()?,
    })
}

fn write_feature_encoder(w: &mut Writer, e: &FeatureEncoder) {
    w.strings(e.feature_names());
    w.hypervectors(e.feature_ids());
    let levels = e.level_encoding();
    w.hypervectors(levels.levels());
    let (min, max) = levels.range();
    w.f64(min);
    w.f64(max);
    match e.per_feature_ranges() {
        Some(ranges) => {
            w.bool(true);
            w.usize(ranges.len());
            for (lo, hi) in ranges {
                w.f64(*lo);
                w.f64(*hi);
            }
        }
        None => w.bool(false),
    }
    w.u64(e.seed());
}

fn read_feature_encoder(r: &mut Reader) -> Result<FeatureEncoder> {
    let feature_names = r.strings()?;
    let feature_ids = r.hypervectors()?;
    let levels = r.hypervectors()?;
    let min = r.f64()?;
    let max = r.f64()?;
    let per_feature = if r.bool()? {
        let len = r.usize_()?;
        let mut ranges = Vec::with_capacity(len);
        for _ in 0..len {
            ranges.push((r.f64()?, r.f64()?));
        }
        Some(ranges)
    } else {
        None
    };
    let seed = r.u64()?;
    Ok(FeatureEncoder::from_parts(
        feature_names,
        feature_ids,
        LevelEncoding::from_parts(levels, min, max),
        per_feature,
        seed,
    ))
}

fn write_classification(w: &mut Writer, m: &ClassificationModel) {
    write_classifier_config(w, m.config());
    write_feature_encoder(w, m.encoder());
    w.strings(m.classes());
    w.hypervectors(m.class_accumulators());
    w.hypervectors(m.class_vectors());
}

fn read_classification(r: &mut Reader) -> Result<ClassificationModel> {
    let config = read_classifier_config(r)?;
    let encoder = read_feature_encoder(r)?;
    let classes = r.strings()?;
    let accumulators = r.hypervectors()?;
    let vectors = r.hypervectors()?;
    Ok(ClassificationModel::from_parts(
        config,
        encoder,
        classes,
        accumulators,
        vectors,
    ))
}

fn write_clustering(w: &mut Writer, saved: &SavedClustering) {
    let m = &saved.model;
    w.usize(m.k());
    w.usize(m.dim());
    w.hypervectors(m.centroids());
    w.usize(m.assignments().len());
    for &a in m.assignments() {
        w.usize(a);
    }
    w.usize(m.max_iterations());
    w.usize(m.iterations_run());
    w.bool(m.converged());
    w.u64s(m.centroid_tie_seeds());
    w.usize(m.reseeded().len());
    for &b in m.reseeded() {
        w.bool(b);
    }
    w.u64(m.seed());
    match &saved.encoder {
        Some(encoder) => {
            w.bool(true);
            write_feature_encoder(w, encoder);
        }
        None => w.bool(false),
    }
}

fn read_clustering(r: &mut Reader) -> Result<SavedClustering> {
    let k = r.usize_()?;
    let dim = r.usize_()?;
    let centroids = r.hypervectors()?;
    let n = r.usize_()?;
    let assignments = (0..n).map(|_| r.usize_()).collect::<Result<Vec<_>>>()?;
    let max_iterations = r.usize_()?;
    let iterations_run = r.usize_()?;
    let converged = r.bool()?;
    let tie_seeds = r.u64s()?;
    let nr = r.usize_()?;
    let reseeded = (0..nr).map(|_| r.bool()).collect::<Result<Vec<_>>>()?;
    let seed = r.u64()?;
    let encoder = if r.bool()? {
        Some(read_feature_encoder(r)?)
    } else {
        None
    };
    Ok(SavedClustering {
        model: ClusteringModel::from_parts(
            k,
            dim,
            centroids,
            assignments,
            max_iterations,
            iterations_run,
            converged,
            tie_seeds,
            reseeded,
            seed,
        ),
        encoder,
    })
}

fn write_regression(w: &mut Writer, m: &RegressionModel) {
    let c = m.config();
    w.usize(c.dim);
    w.usize(c.k);
    w.f64(c.learning_rate);
    w.usize(c.epochs);
    w.bool(c.quantized_prediction);
    w.u64(c.seed);

    let e = m.encoder();
    w.usize(e.input_dim());
    w.usize(e.bases().len());
    for base in e.bases() {
        w.f64s(base);
    }
    w.f64s(e.biases());
    w.u64(e.seed());

    w.usize(m.cluster_models().len());
    for v in m.cluster_models() {
        w.f64s(v);
    }
    w.usize(m.regressor_models().len());
    for v in m.regressor_models() {
        w.f64s(v);
    }
    match m.binarized() {
        Some(b) => {
            w.bool(true);
            w.hypervectors(&b.cluster_signs);
            w.hypervectors(&b.regressor_signs);
            w.f64s(&b.regressor_norms);
        }
        None => w.bool(false),
    }
    let (mean, scale) = m.target_scaling();
    w.f64(mean);
    w.f64(scale);
}

fn read_regression(r: &mut Reader) -> Result<RegressionModel> {
    let config = RegressionConfig {
        dim: r.usize_()?,
        k: r.usize_()?,
        learning_rate: r.f64()?,
        epochs: r.usize_()?,
        quantized_prediction: r.bool()?,
        seed: r.u64()?,
    };
    let input_dim = r.usize_()?;
    let n_bases = r.usize_()?;
    let bases = (0..n_bases).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
    let biases = r.f64s()?;
    let encoder_seed = r.u64()?;
    let encoder = RegressionEncoder::from_parts(bases, biases, input_dim, encoder_seed);

    let nc = r.usize_()?;
    let cluster_models = (0..nc).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
    let nm = r.usize_()?;
    let regressor_models = (0..nm).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
    let binarized = if r.bool()? {
        Some(BinarizedCopies {
            cluster_signs: r.hypervectors()?,
            regressor_signs: r.hypervectors()?,
            regressor_norms: r.f64s()?,
        })
    } else {
        None
    };
    let target_mean = r.f64()?;
    let target_scale = r.f64()?;
    Ok(RegressionModel::from_parts(
        config,
        encoder,
        cluster_models,
        regressor_models,
        binarized,
        target_mean,
        target_scale,
    ))
}

fn write_graph(w: &mut Writer, m: &GraphModel) {
    w.bool(m.directed());
    w.usize(m.dim());
    w.u64(m.seed());
    w.strings(m.node_names());
    w.hypervectors(m.node_vectors_raw());
    w.strings(m.weight_alphabet());
    w.hypervectors(m.weight_vectors_raw());
    w.usize(m.memories_raw().len());
    for memory in m.memories_raw() {
        match memory {
            Some(hv) => {
                w.bool(true);
                w.hypervector(hv);
            }
            None => w.bool(false),
        }
    }
    w.u64s(m.memory_tie_seeds());
    w.hypervector(m.graph_accumulator());
    w.hypervector(m.graph_vector());
    w.u64(m.graph_tie_seed());
    w.usize(m.edges_raw().len());
    for &(u, v, wt) in m.edges_raw() {
        w.usize(u);
        w.usize(v);
        w.usize(wt);
    }
    w.f64(m.threshold());
    w.usize(m.mitigation_rounds());
}

fn read_graph(r: &mut Reader) -> Result<GraphModel> {
    let directed = r.bool()?;
    let dim = r.usize_()?;
    let seed = r.u64()?;
    let node_names = r.strings()?;
    let node_vectors = r.hypervectors()?;
    let weight_alphabet = r.strings()?;
    let weight_vectors = r.hypervectors()?;
    let nm = r.usize_()?;
    let mut memories = Vec::with_capacity(nm);
    for _ in 0..nm {
        memories.push(if r.bool()? {
            Some(r.hypervector()?)
        } else {
            None
        });
    }
    let memory_tie_seeds = r.u64s()?;
    let graph_accumulator = r.hypervector()?;
    let graph_vector = r.hypervector()?;
    let graph_tie_seed = r.u64()?;
    let ne = r.usize_()?;
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        edges.push((r.usize_()?, r.usize_()?, r.usize_()?));
    }
    let threshold = r.f64()?;
    let mitigation_rounds = r.usize_()?;
    Ok(GraphModel::from_parts(
        directed,
        dim,
        seed,
        node_names,
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
    ))
}

fn write_quantum(w: &mut Writer, m: &QuantumClassificationModel) {
    write_classifier_config(w, m.config());
    write_feature_encoder(w, m.encoder());
    w.strings(m.classes());
    w.usize(m.class_states().len());
    for state in m.class_states() {
        let (amplitudes, source_dim) = QuantumClassificationModel::state_parts(state);
        w.usize(amplitudes.len());
        for a in amplitudes {
            w.f64(a.re);
            w.f64(a.im);
        }
        match source_dim {
            Some(d) => {
                w.bool(true);
                w.usize(d);
            }
            None => w.bool(false),
        }
    }
    w.f64s(m.success_probabilities());
}

fn read_quantum(r: &mut Reader) -> Result<QuantumClassificationModel> {
    let config = read_classifier_config(r)?;
    let encoder = read_feature_encoder(r)?;
    let classes = r.strings()?;
    let ns = r.usize_()?;
    let mut class_states = Vec::with_capacity(ns);
    for _ in 0..ns {
        let len = r.usize_()?;
        if !len.is_power_of_two() {
            return Err(HdcError::BadModelFile(format!(
                "statevector length {len} is not a power of two"
            )));
        }
        let mut amplitudes = Vec::with_capacity(len);
        for _ in 0..len {
            let re = r.f64()?;
            let im = r.f64()?;
            amplitudes.push(Complex64::new(re, im));
        }
        let source_dim = if r.bool()? { Some(r.usize_()?) } else { None };
        class_states.push(QuantumClassificationModel::state_from_parts(
            amplitudes, source_dim,
        ));
    }
    let success_probabilities = r.f64s()?;
    Ok(QuantumClassificationModel::from_parts(
        config,
        encoder,
        classes,
        class_states,
        success_probabilities,
    ))
}
