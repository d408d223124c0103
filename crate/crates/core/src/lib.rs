//! Hyperdimensional computing (vector-symbolic architecture) toolkit.
//!
//! Dense bipolar hypervector arithmetic plus the models built on it:
//! supervised classification with feature selection and hyperparameter
//! tuning, k-means clustering in hyperdimensional space, multi-model
//! regression over a random-projection encoder, whole-graph hypervector
//! memories with edge queries and error mitigation, and a classically
//! emulated quantum arithmetic that is equivalent to the bipolar operations.
//!
//! Everything is deterministic under an explicit `u64` seed. With the default
//! `parallel` feature the data-parallel inner loops run on rayon; disabling
//! it selects a sequential fallback that produces bit-identical results.

pub mod classification;
pub mod clustering;
pub mod dataset;
pub mod encoding;
pub mod error;
pub mod graph;
pub mod hypervector;
pub mod io;
pub mod quantum;
pub mod regression;
pub mod space;

mod par;
mod rng;

pub use error::{HdcError, Result};
pub use hypervector::{bundle, bundle_owned, Form, Hypervector, DEFAULT_DIM};
pub use space::Space;

/// Derive an independent sub-seed from a base seed and a stream index.
/// Lets callers give every row or trial its own reproducible stream.
pub fn derive_stream_seed(base: u64, index: u64) -> u64 {
    rng::derive2(base, 0x5eed, index)
}
