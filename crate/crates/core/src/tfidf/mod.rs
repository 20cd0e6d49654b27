//! TF-IDF weighting over preprocessed term sequences.
//!
//! Weights are `tf(t) · idf(t)` with raw counts for `tf` (or `1 + ln tf` when
//! `sublinear_tf` is set) and
//!
//! ```text
//! idf(t) = ln((1 + N) / (1 + df(t))) + 1     smooth_idf = true (default)
//! idf(t) = ln(N / df(t)) + 1                 smooth_idf = false
//! ```
//!
//! Document vectors are L2-normalized. Terms never seen at fit time are
//! dropped on transform.

mod cache;
mod sparse;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::textproc::{build_vocabulary, TermId, TermSeq, Vocabulary};

pub use cache::VectorCache;
pub use sparse::{cosine, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfidfConfig {
    pub sublinear_tf: bool,
    pub smooth_idf: bool,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        Self {
            sublinear_tf: false,
            smooth_idf: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TfidfModel {
    vocab: Vocabulary,
    idf: Vec<f64>,
    config: TfidfConfig,
}

impl TfidfModel {
    /// Learns the vocabulary and idf weights from `docs`.
    pub fn fit(docs: &[TermSeq], config: TfidfConfig) -> Result<Self> {
        let vocab = build_vocabulary(docs)?;
        let n = vocab.n_docs() as f64;
        let idf = (0..vocab.len() as TermId)
            .map(|id| {
                let df = vocab.df(id) as f64;
                if config.smooth_idf {
                    ((1.0 + n) / (1.0 + df)).ln() + 1.0
                } else {
                    (n / df).ln() + 1.0
                }
            })
            .collect();
        Ok(Self { vocab, idf, config })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> TfidfConfig {
        self.config
    }

    pub fn n_docs(&self) -> usize {
        self.vocab.n_docs()
    }

    pub fn idf(&self, id: TermId) -> f64 {
        self.idf[id as usize]
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.vocab.id(term).map(|id| self.idf(id))
    }

    /// L2-normalized tf-idf vector for `terms`; empty when no term is known.
    pub fn transform(&self, terms: &[String]) -> SparseVector {
        let mut counts: HashMap<TermId, u32> = HashMap::new();
        for t in terms {
            if let Some(id) = self.vocab.id(t) {
                *counts.entry(id).or_default() += 1;
            }
        }
        let mut entries: Vec<(TermId, u32)> = counts.into_iter().collect();
        entries.sort_unstable_by_key(|&(id, _)| id);
        let (ids, weights): (Vec<TermId>, Vec<f64>) = entries
            .into_iter()
            .map(|(id, tf)| {
                let tf = if self.config.sublinear_tf {
                    1.0 + (tf as f64).ln()
                } else {
                    tf as f64
                };
                (id, tf * self.idf(id))
            })
            .unzip();
        SparseVector::from_sorted(ids, weights).l2_normalized()
    }

    pub fn transform_all(&self, docs: &[TermSeq]) -> Vec<SparseVector> {
        docs.iter().map(|d| self.transform(d)).collect()
    }

    /// Stable digest of everything that affects `transform` output.
    pub(crate) fn fingerprint(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.push(self.config.sublinear_tf as u8);
        out.push(self.config.smooth_idf as u8);
        for (term, idf) in self.vocab.terms().iter().zip(&self.idf) {
            out.extend_from_slice(term.as_bytes());
            out.push(0);
            out.extend_from_slice(&idf.to_bits().to_le_bytes());
        }
        out
    }
}
