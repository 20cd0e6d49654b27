use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::textproc::TermId;

/// Non-negative sparse vector over term ids.
///
/// Entries are kept sorted by id with no explicit zeros, so every binary
/// operation is a single linear merge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    ids: Vec<TermId>,
    weights: Vec<f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from unordered pairs; repeated ids are summed and
    /// zero weights dropped. Negative or non-finite weights are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (TermId, f64)>) -> Result<Self> {
        let mut pairs: Vec<(TermId, f64)> = pairs.into_iter().collect();
        if let Some(&(_, w)) = pairs.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeight(w));
        }
        pairs.sort_by_key(|&(id, _)| id);
        let mut v = SparseVector::new();
        for (id, w) in pairs {
            match v.ids.last() {
                Some(&last) if last == id => *v.weights.last_mut().unwrap() += w,
                _ => {
                    v.ids.push(id);
                    v.weights.push(w);
                }
            }
        }
        v.drop_zeros();
        Ok(v)
    }

    /// Caller guarantees ids strictly increasing and weights positive.
    pub(crate) fn from_sorted(ids: Vec<TermId>, weights: Vec<f64>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(weights.iter().all(|&w| w > 0.0));
        Self { ids, weights }
    }

    fn drop_zeros(&mut self) {
        if self.weights.iter().all(|&w| w > 0.0) {
            return;
        }
        let (ids, weights) = self
            .ids
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&i, &w)| (i, w))
            .unzip();
        self.ids = ids;
        self.weights = weights;
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[TermId] {
        &self.ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, f64)> + '_ {
        self.ids.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn get(&self, id: TermId) -> f64 {
        self.ids
            .binary_search(&id)
            .map_or(0.0, |i| self.weights[i])
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.ids.len() && j < other.ids.len() {
            match self.ids[i].cmp(&other.ids[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    acc += self.weights[i] * other.weights[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Cosine similarity; 0 when either side is empty.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        cosine(self, other)
    }

    /// Element-wise maximum over the union of supports.
    pub fn max_aggregate(&self, other: &SparseVector) -> SparseVector {
        let mut ids = Vec::with_capacity(self.len() + other.len());
        let mut weights = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.ids.len() || j < other.ids.len() {
            let a = self.ids.get(i);
            let b = other.ids.get(j);
            let ord = match (a, b) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    ids.push(self.ids[i]);
                    weights.push(self.weights[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    ids.push(other.ids[j]);
                    weights.push(other.weights[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    ids.push(self.ids[i]);
                    weights.push(self.weights[i].max(other.weights[j]));
                    i += 1;
                    j += 1;
                }
            }
        }
        SparseVector { ids, weights }
    }

    /// Multiplies every weight by `factor` (which must be ≥ 0). Entries that
    /// underflow to zero are removed.
    pub fn scale(&self, factor: f64) -> Result<SparseVector> {
        if !factor.is_finite() || factor < 0.0 {
            return Err(Error::NegativeScale(factor));
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let mut v = SparseVector {
            ids: self.ids.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        };
        v.drop_zeros();
        Ok(v)
    }

    pub fn l2_normalized(&self) -> SparseVector {
        let n = self.norm();
        if n == 0.0 {
            return SparseVector::new();
        }
        let mut v = SparseVector {
            ids: self.ids.clone(),
            weights: self.weights.iter().map(|w| w / n).collect(),
        };
        v.drop_zeros();
        v
    }
}

/// Dot product over the shared support divided by both norms.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (a.dot(b) / denom).min(1.0)
}
