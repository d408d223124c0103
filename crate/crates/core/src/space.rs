//! Named collection of hypervectors with shared dimensionality and tags.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{HdcError, Result};
use crate::hypervector::Hypervector;

/// A space holds uniquely named hypervectors of one dimension, with optional
/// tags grouping members. Iteration order is the name order, so a space is
/// deterministic regardless of insertion order.
#[derive(Debug, Clone, Default)]
pub struct Space {
    dim: usize,
    members: BTreeMap<String, Hypervector>,
    tags: BTreeMap<String, BTreeSet<String>>,
}

impl Space {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(HdcError::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            members: BTreeMap::new(),
            tags: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Insert a vector under a unique name. The vector keeps the name as its
    /// own metadata.
    pub fn insert(&mut self, name: impl Into<String>, vector: Hypervector) -> Result<()> {
        let name = name.into();
        if vector.dim() != self.dim {
            return Err(HdcError::DimensionMismatch {
                left: self.dim,
                right: vector.dim(),
            });
        }
        if self.members.contains_key(&name) {
            return Err(HdcError::DuplicateName(name));
        }
        self.members.insert(name.clone(), vector.with_name(name));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Hypervector> {
        self.members.get(name)
    }

    /// Remove a member and drop it from every tag set.
    pub fn remove(&mut self, name: &str) -> Result<Hypervector> {
        let hv = self
            .members
            .remove(name)
            .ok_or_else(|| HdcError::UnknownMember(name.to_string()))?;
        for set in self.tags.values_mut() {
            set.remove(name);
        }
        self.tags.retain(|_, set| !set.is_empty());
        Ok(hv)
    }

    /// Tag an existing member.
    pub fn tag(&mut self, name: &str, tag: impl Into<String>) -> Result<()> {
        if !self.members.contains_key(name) {
            return Err(HdcError::UnknownMember(name.to_string()));
        }
        self.tags
            .entry(tag.into())
            .or_default()
            .insert(name.to_string());
        Ok(())
    }

    /// Names carrying a tag, in name order.
    pub fn names_with_tag(&self, tag: &str) -> Vec<&str> {
        self.tags
            .get(tag)
            .map(|set| set.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.members.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Hypervector)> {
        self.members.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// The member most similar to `query` by cosine, with the score.
    /// Ties break toward the earlier name.
    pub fn nearest(&self, query: &Hypervector) -> Result<(&str, f64)> {
        if self.members.is_empty() {
            return Err(HdcError::EmptyInput("space has no members"));
        }
        let mut best: Option<(&str, f64)> = None;
        for (name, hv) in &self.members {
            let score = query.cosine(hv)?;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((name, score));
            }
        }
        Ok(best.unwrap())
    }
}
