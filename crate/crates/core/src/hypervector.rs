//! Bipolar hypervectors and the four VSA arithmetic operations.
//!
//! A [`Hypervector`] is a dense D-dimensional vector of small signed
//! integers, in one of two forms:
//!
//! - **bipolar**: every component is −1 or +1. This is the canonical domain:
//!   binding (componentwise multiplication) is self-inverse, and cosine and
//!   Hamming distance are linked by the exact identity
//!   `cosine = 1 − 2·hamming/D`.
//! - **accumulator**: componentwise integer sums of bundled constituents.
//!   Integer addition is exact, so bundling is order-independent and may be
//!   reduced in parallel in any partition order.
//!
//! Random hypervectors at D ≈ 10⁴ are quasi-orthogonal: the cosine between
//! independent draws concentrates around 0 with standard deviation 1/√D.

use rand::Rng;

use crate::error::{HdcError, Result};
use crate::rng;

/// Default dimensionality. The standard regime where the concentration
/// bounds that HDC relies on hold comfortably.
pub const DEFAULT_DIM: usize = 10_000;

/// Representation form of a hypervector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Every component in {−1, +1}.
    Bipolar,
    /// Componentwise integer sums, bounded by the bundle count.
    Accumulator,
}

impl Form {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Form::Bipolar => "bipolar",
            Form::Accumulator => "accumulator",
        }
    }
}

/// A dense D-dimensional hypervector.
///
/// Equality compares form and components only; the `name` and `seed`
/// metadata are bookkeeping and do not affect algebraic identity.
#[derive(Debug, Clone)]
pub struct Hypervector {
    values: Vec<i32>,
    form: Form,
    name: Option<String>,
    seed: Option<u64>,
}

impl PartialEq for Hypervector {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form && self.values == other.values
    }
}

impl Eq for Hypervector {}

impl Hypervector {
    /// Draw a random bipolar hypervector; each component is independently
    /// ±1 with probability 1/2. The same seed always yields the same vector.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(HdcError::InvalidDimension(dim));
        }
        let mut rng = rng::rng_from(rng::derive(seed, rng::tag::RANDOM_VECTOR));
        let mut hv = Self::random_from_rng(dim, &mut rng)?;
        hv.seed = Some(seed);
        Ok(hv)
    }

    /// Draw from an already-positioned generator. Used when a model draws a
    /// whole family of vectors from one seeded stream.
    pub fn random_from_rng<R: Rng>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(HdcError::InvalidDimension(dim));
        }
        let values = (0..dim)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        Ok(Self {
            values,
            form: Form::Bipolar,
            name: None,
            seed: None,
        })
    }

    /// Build a bipolar vector from explicit ±1 components.
    pub fn from_bipolar(values: Vec<i32>) -> Result<Self> {
        if values.len() < 2 {
            return Err(HdcError::InvalidDimension(values.len()));
        }
        if let Some(bad) = values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(HdcError::InvalidInput(format!(
                "bipolar component must be -1 or +1, found {bad}"
            )));
        }
        Ok(Self {
            values,
            form: Form::Bipolar,
            name: None,
            seed: None,
        })
    }

    /// Build an accumulator-form vector from explicit integer components.
    pub fn from_accumulator(values: Vec<i32>) -> Result<Self> {
        if values.len() < 2 {
            return Err(HdcError::InvalidDimension(values.len()));
        }
        Ok(Self {
            values,
            form: Form::Accumulator,
            name: None,
            seed: None,
        })
    }

    pub(crate) fn from_parts(values: Vec<i32>, form: Form) -> Self {
        Self {
            values,
            form,
            name: None,
            seed: None,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn form(&self) -> Form {
        self.form
    }

    #[inline]
    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub(crate) fn set_seed(&mut self, seed: Option<u64>) {
        self.seed = seed;
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(HdcError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    fn check_bipolar(&self) -> Result<()> {
        if self.form != Form::Bipolar {
            return Err(HdcError::InvalidForm {
                expected: Form::Bipolar.name(),
                found: self.form.name(),
            });
        }
        Ok(())
    }

    /// Binding: componentwise product of two bipolar vectors.
    ///
    /// Commutative and self-inverse (`a.bind(b).bind(b) == a` exactly); the
    /// result is quasi-orthogonal to both factors.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        self.check_bipolar()?;
        other.check_bipolar()?;
        self.check_same_dim(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self::from_parts(values, Form::Bipolar))
    }

    /// Sign normalization of an accumulator. Zero components are resolved by
    /// a deterministic per-position coin seeded with `tie_seed`; the flip for
    /// position `i` depends only on the seed and `i`, never on the zero
    /// pattern, so recorded seeds reproduce the exact vector.
    pub fn normalize(&self, tie_seed: u64) -> Result<Self> {
        if self.form != Form::Accumulator {
            return Err(HdcError::InvalidForm {
                expected: Form::Accumulator.name(),
                found: self.form.name(),
            });
        }
        let mut tie_rng = rng::rng_from(rng::derive(tie_seed, rng::tag::TIE_BREAK));
        let values = self
            .values
            .iter()
            .map(|&v| {
                let flip = if tie_rng.random::<bool>() { 1 } else { -1 };
                match v {
                    0 => flip,
                    v if v > 0 => 1,
                    _ => -1,
                }
            })
            .collect();
        Ok(Self::from_parts(values, Form::Bipolar))
    }

    /// Cyclic rotation: component `i` moves to `(i + k) mod D`. Negative `k`
    /// rotates the other way; `permute(a, D) == a`.
    pub fn permute(&self, k: i64) -> Self {
        let dim = self.dim() as i64;
        let shift = k.rem_euclid(dim) as usize;
        let mut values = self.values.clone();
        values.rotate_right(shift);
        Self::from_parts(values, self.form)
    }

    /// Componentwise negation. Keeps form.
    pub fn negate(&self) -> Self {
        Self::from_parts(self.values.iter().map(|v| -v).collect(), self.form)
    }

    /// Dot product with exact 64-bit integer accumulation.
    pub fn dot(&self, other: &Self) -> Result<i64> {
        self.check_same_dim(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a as i64 * *b as i64)
            .sum())
    }

    /// Cosine similarity, in [−1, 1]. Errors on a zero-norm operand.
    pub fn cosine(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        let dot = self.dot(other)? as f64;
        let na = self.norm_sq();
        let nb = other.norm_sq();
        if na == 0 || nb == 0 {
            return Err(HdcError::ZeroNorm);
        }
        Ok(dot / ((na as f64).sqrt() * (nb as f64).sqrt()))
    }

    fn norm_sq(&self) -> i64 {
        self.values.iter().map(|v| *v as i64 * *v as i64).sum()
    }

    /// Hamming distance between bipolar vectors: the number of disagreeing
    /// positions. Satisfies `cosine == 1 − 2·hamming/D` exactly.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_bipolar()?;
        other.check_bipolar()?;
        self.check_same_dim(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count())
    }
}

/// Bundling: componentwise integer sum of a nonempty uniform-form list.
/// The result is in accumulator form; integer addition makes it independent
/// of input order and of how a parallel reduction partitions the list.
pub fn bundle(vectors: &[&Hypervector]) -> Result<Hypervector> {
    if vectors.is_empty() {
        return Err(HdcError::EmptyInput("bundle of zero vectors"));
    }
    let dim = vectors[0].dim();
    let form = vectors[0].form();
    for v in vectors {
        if v.dim() != dim {
            return Err(HdcError::DimensionMismatch {
                left: dim,
                right: v.dim(),
            });
        }
        if v.form() != form {
            return Err(HdcError::InvalidForm {
                expected: form.name(),
                found: v.form().name(),
            });
        }
    }
    let values = crate::par::sum_rows(vectors.len(), dim, |i| vectors[i].values());
    Ok(Hypervector::from_parts(values, Form::Accumulator))
}

/// Convenience for bundling owned vectors.
pub fn bundle_owned(vectors: &[Hypervector]) -> Result<Hypervector> {
    let refs: Vec<&Hypervector> = vectors.iter().collect();
    bundle(&refs)
}
