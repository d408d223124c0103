//! Level-vector construction and record encoding of numeric feature rows.
//!
//! A [`LevelEncoding`] is an ordered family of L bipolar vectors whose
//! pairwise similarity decreases with level distance. Level 0 is random and
//! each subsequent level flips `floor(D / (2(L−1)))` positions that were
//! never flipped before, chosen by a seeded shuffle of the index range. The
//! flips are cumulative and never reverted, so the similarity from level 0
//! is monotone non-increasing *exactly*, not just in expectation, and the
//! endpoints differ in ~D/2 positions (near-orthogonal).
//!
//! A [`FeatureEncoder`] turns a numeric row into one hypervector by binding
//! each feature's random identity vector with the level vector of its
//! quantized value, bundling the terms, and sign-normalizing. Tie breaks in
//! normalization are content-addressed: the tie seed is a stable hash of the
//! quantized level indices, so identical rows encode identically and model
//! fitting is independent of row order.

use rand::seq::SliceRandom;

use crate::error::{HdcError, Result};
use crate::hypervector::{bundle, Hypervector};
use crate::{par, rng};

/// Ordered family of level vectors covering a closed value range.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelEncoding {
    levels: Vec<Hypervector>,
    range_min: f64,
    range_max: f64,
}

impl LevelEncoding {
    /// Build `level_count` level vectors of dimension `dim` covering
    /// `[range_min, range_max]`, deterministically from `seed`.
    pub fn build(
        level_count: usize,
        dim: usize,
        range_min: f64,
        range_max: f64,
        seed: u64,
    ) -> Result<Self> {
        if level_count < 2 {
            return Err(HdcError::InvalidParameter(format!(
                "level count must be at least 2, got {level_count}"
            )));
        }
        if range_min.partial_cmp(&range_max) != Some(std::cmp::Ordering::Less) {
            return Err(HdcError::InvalidParameter(format!(
                "degenerate range [{range_min}, {range_max}]"
            )));
        }
        let mut rng = rng::rng_from(rng::derive(seed, rng::tag::LEVELS));
        let base = Hypervector::random_from_rng(dim, &mut rng)?;

        let mut positions: Vec<usize> = (0..dim).collect();
        positions.shuffle(&mut rng);

        let flips_per_step = dim / (2 * (level_count - 1));
        let mut levels = Vec::with_capacity(level_count);
        let mut current = base.values().to_vec();
        levels.push(base);
        for step in 0..level_count - 1 {
            for &p in &positions[step * flips_per_step..(step + 1) * flips_per_step] {
                current[p] = -current[p];
            }
            levels.push(Hypervector::from_bipolar(current.clone())?);
        }
        Ok(Self {
            levels,
            range_min,
            range_max,
        })
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].dim()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.range_min, self.range_max)
    }

    pub fn levels(&self) -> &[Hypervector] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> &Hypervector {
        &self.levels[index]
    }

    /// Quantize a value into a level index using this encoding's range.
    /// Values are clamped, never rejected: test rows may exceed the training
    /// range. The bins are half-open with the maximum mapping to the top
    /// level.
    pub fn quantize(&self, value: f64) -> usize {
        quantize_with_range(value, self.range_min, self.range_max, self.levels.len())
    }

    pub(crate) fn from_parts(levels: Vec<Hypervector>, range_min: f64, range_max: f64) -> Self {
        Self {
            levels,
            range_min,
            range_max,
        }
    }
}

/// Quantize `value` in `[min, max]` into one of `level_count` bins.
pub fn quantize_with_range(value: f64, min: f64, max: f64, level_count: usize) -> usize {
    if min.partial_cmp(&max) != Some(std::cmp::Ordering::Less) {
        // degenerate per-feature range: every value is the boundary
        return 0;
    }
    let clamped = value.clamp(min, max);
    let idx = ((clamped - min) / (max - min) * level_count as f64).floor() as usize;
    idx.min(level_count - 1)
}

/// How value ranges are determined for quantization.
#[derive(Debug, Clone, PartialEq)]
pub enum RangeSpec {
    /// One range shared by all features.
    Global(f64, f64),
    /// A range per feature, in feature order.
    PerFeature(Vec<(f64, f64)>),
}

impl RangeSpec {
    /// Global min/max over every cell of a row-major matrix.
    pub fn global_from(matrix: &[Vec<f64>]) -> Result<Self> {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for row in matrix {
            for &v in row {
                min = min.min(v);
                max = max.max(v);
            }
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(HdcError::InvalidInput(
                "cannot derive a range from an empty or non-finite matrix".into(),
            ));
        }
        Ok(Self::Global(min, max))
    }

    /// Columnwise min/max of a row-major matrix.
    pub fn per_feature_from(matrix: &[Vec<f64>]) -> Result<Self> {
        let cols = matrix.first().map(|r| r.len()).unwrap_or(0);
        if cols == 0 {
            return Err(HdcError::InvalidInput(
                "cannot derive ranges from an empty matrix".into(),
            ));
        }
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); cols];
        for row in matrix {
            for (j, &v) in row.iter().enumerate() {
                ranges[j].0 = ranges[j].0.min(v);
                ranges[j].1 = ranges[j].1.max(v);
            }
        }
        Ok(Self::PerFeature(ranges))
    }
}

/// Per-feature bipolar bind terms of one row, kept so feature subsets can be
/// re-combined without re-encoding (used heavily by stepwise selection).
#[derive(Debug, Clone)]
pub struct EncodedTerms {
    terms: Vec<Hypervector>,
    level_indices: Vec<usize>,
}

impl EncodedTerms {
    pub fn feature_count(&self) -> usize {
        self.terms.len()
    }

    pub fn level_indices(&self) -> &[usize] {
        &self.level_indices
    }
}

/// Record encoder: one random identity vector per feature plus a shared
/// level encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureEncoder {
    feature_names: Vec<String>,
    feature_ids: Vec<Hypervector>,
    level_encoding: LevelEncoding,
    per_feature_ranges: Option<Vec<(f64, f64)>>,
    seed: u64,
}

impl FeatureEncoder {
    /// Build an encoder for `feature_names` at dimension `dim` with
    /// `level_count` levels over `ranges`, deterministically from `seed`.
    pub fn build(
        feature_names: &[String],
        dim: usize,
        level_count: usize,
        ranges: &RangeSpec,
        seed: u64,
    ) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(HdcError::EmptyInput("encoder needs at least one feature"));
        }
        let (global_min, global_max, per_feature_ranges) = match ranges {
            RangeSpec::Global(min, max) => (*min, *max, None),
            RangeSpec::PerFeature(list) => {
                if list.len() != feature_names.len() {
                    return Err(HdcError::InvalidParameter(format!(
                        "{} per-feature ranges for {} features",
                        list.len(),
                        feature_names.len()
                    )));
                }
                let min = list.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
                let max = list.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
                (min, max, Some(list.clone()))
            }
        };
        // A globally degenerate range can still be encoded when per-feature
        // ranges are in play; widen it so level construction succeeds.
        let (lo, hi) = if global_min < global_max {
            (global_min, global_max)
        } else {
            (global_min - 0.5, global_max + 0.5)
        };
        let level_encoding = LevelEncoding::build(level_count, dim, lo, hi, seed)?;

        let mut id_rng = rng::rng_from(rng::derive(seed, rng::tag::FEATURE_IDS));
        let feature_ids = feature_names
            .iter()
            .map(|_| Hypervector::random_from_rng(dim, &mut id_rng))
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            feature_names: feature_names.to_vec(),
            feature_ids,
            level_encoding,
            per_feature_ranges,
            seed,
        })
    }

    pub fn feature_count(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_ids(&self) -> &[Hypervector] {
        &self.feature_ids
    }

    pub fn level_encoding(&self) -> &LevelEncoding {
        &self.level_encoding
    }

    pub fn per_feature_ranges(&self) -> Option<&[(f64, f64)]> {
        self.per_feature_ranges.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.level_encoding.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Level index for feature `f` at `value`.
    pub fn quantize(&self, feature: usize, value: f64) -> usize {
        match &self.per_feature_ranges {
            Some(ranges) => {
                let (min, max) = ranges[feature];
                quantize_with_range(value, min, max, self.level_encoding.level_count())
            }
            None => self.level_encoding.quantize(value),
        }
    }

    fn check_row(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_count() {
            return Err(HdcError::InvalidInput(format!(
                "row has {} values, encoder expects {}",
                x.len(),
                self.feature_count()
            )));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return Err(HdcError::InvalidInput(format!(
                "non-finite value at feature {pos}"
            )));
        }
        Ok(())
    }

    /// Per-feature bind terms for one row.
    pub fn feature_terms(&self, x: &[f64]) -> Result<EncodedTerms> {
        self.check_row(x)?;
        let level_indices: Vec<usize> = x
            .iter()
            .enumerate()
            .map(|(f, &v)| self.quantize(f, v))
            .collect();
        let terms = level_indices
            .iter()
            .enumerate()
            .map(|(f, &idx)| self.feature_ids[f].bind(self.level_encoding.level(idx)))
            .collect::<Result<Vec<_>>>()?;
        Ok(EncodedTerms {
            terms,
            level_indices,
        })
    }

    /// Bundle-and-normalize the terms of the active features.
    pub fn combine(&self, terms: &EncodedTerms, active: &[bool]) -> Result<Hypervector> {
        if active.len() != terms.terms.len() {
            return Err(HdcError::InvalidInput(format!(
                "active mask has {} entries for {} features",
                active.len(),
                terms.terms.len()
            )));
        }
        let picked: Vec<&Hypervector> = terms
            .terms
            .iter()
            .zip(active)
            .filter(|(_, keep)| **keep)
            .map(|(t, _)| t)
            .collect();
        if picked.is_empty() {
            return Err(HdcError::EmptyInput("no active features to encode"));
        }
        let acc = bundle(&picked)?;
        acc.normalize(self.tie_seed(&terms.level_indices, active))
    }

    /// Tie seed hashed from the active quantized indices, so identical rows
    /// produce identical encodings regardless of position in the dataset.
    fn tie_seed(&self, level_indices: &[usize], active: &[bool]) -> u64 {
        let mut bytes = Vec::with_capacity(level_indices.len() * 9);
        for (f, (&idx, &keep)) in level_indices.iter().zip(active).enumerate() {
            if keep {
                bytes.extend_from_slice(&(f as u64).to_le_bytes());
                bytes.extend_from_slice(&(idx as u64).to_le_bytes());
            }
        }
        rng::derive_bytes(self.seed, rng::tag::TIE_BREAK, &bytes)
    }

    /// Encode one row with every feature active.
    pub fn encode_record(&self, x: &[f64]) -> Result<Hypervector> {
        let terms = self.feature_terms(x)?;
        let active = vec![true; terms.terms.len()];
        self.combine(&terms, &active)
    }

    /// Encode one row with the given feature subset.
    pub fn encode_record_subset(&self, x: &[f64], active: &[bool]) -> Result<Hypervector> {
        let terms = self.feature_terms(x)?;
        self.combine(&terms, active)
    }

    /// Encode many rows. Rows are independent, so this maps in parallel.
    pub fn encode_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<Hypervector>> {
        par::map_slice(rows, |row| self.encode_record(row))
            .into_iter()
            .collect()
    }

    /// Encode many rows against a feature subset.
    pub fn encode_batch_subset(
        &self,
        rows: &[Vec<f64>],
        active: &[bool],
    ) -> Result<Vec<Hypervector>> {
        par::map_slice(rows, |row| self.encode_record_subset(row, active))
            .into_iter()
            .collect()
    }

    pub(crate) fn from_parts(
        feature_names: Vec<String>,
        feature_ids: Vec<Hypervector>,
        level_encoding: LevelEncoding,
        per_feature_ranges: Option<Vec<(f64, f64)>>,
        seed: u64,
    ) -> Self {
        Self {
            feature_names,
            feature_ids,
            level_encoding,
            per_feature_ranges,
            seed,
        }
    }
}
