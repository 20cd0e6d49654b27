//! Whole-store rankings of facts per question.
//!
//! * [`Retriever::rank_optimized`]: one-shot cosine ranking against the
//!   question vector.
//! * [`Retriever::rank_iterated`]: greedy chain building where each selected
//!   fact is max-merged into the query vector before the next pick.
//! * [`ensemble_ranks`]: mean-rank fusion of several rankings.
//! * [`apply_external_scores`]: reorders the head of a ranking by scores
//!   produced outside this crate (e.g. a learned re-ranker).

mod ensemble;
mod rerank;
mod retriever;

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::FactStore;
use crate::error::{Error, Result};

pub use ensemble::ensemble_ranks;
pub use rerank::{apply_external_scores, ScoreFile, DEFAULT_TOP_N};
pub use retriever::Retriever;

/// Fact uids for one question, most relevant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub qid: String,
    uids: Vec<Arc<str>>,
}

impl Ranking {
    pub fn new(qid: impl Into<String>, uids: Vec<Arc<str>>) -> Self {
        Self {
            qid: qid.into(),
            uids,
        }
    }

    pub fn from_strs<S: AsRef<str>>(qid: impl Into<String>, uids: impl IntoIterator<Item = S>) -> Self {
        Self::new(qid, uids.into_iter().map(|u| Arc::from(u.as_ref())).collect())
    }

    pub fn uids(&self) -> &[Arc<str>] {
        &self.uids
    }

    pub fn into_uids(self) -> Vec<Arc<str>> {
        self.uids
    }

    pub fn len(&self) -> usize {
        self.uids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uids.is_empty()
    }

    pub fn top(&self, n: usize) -> &[Arc<str>] {
        &self.uids[..n.min(self.uids.len())]
    }

    /// 1-based position of `uid`, if present.
    pub fn rank_of(&self, uid: &str) -> Option<usize> {
        self.uids.iter().position(|u| &**u == uid).map(|p| p + 1)
    }

    /// True when the ranking lists every fact of `store` exactly once.
    pub fn is_permutation_of(&self, store: &FactStore) -> bool {
        if self.uids.len() != store.len() {
            return false;
        }
        let mut seen = HashSet::with_capacity(self.uids.len());
        self.uids
            .iter()
            .all(|u| store.contains(u) && seen.insert(&**u))
    }

    pub fn check_permutation(&self, store: &FactStore) -> Result<()> {
        if self.is_permutation_of(store) {
            Ok(())
        } else {
            Err(Error::MismatchedRankings {
                qid: self.qid.clone(),
                detail: format!(
                    "ranking of {} entries is not a permutation of the {} stored facts",
                    self.uids.len(),
                    store.len()
                ),
            })
        }
    }
}

/// Parameters of the iterated ranker.
///
/// At selection step `k` (1-based) the chosen fact's vector is scaled by
/// `decay^k` before being max-merged into the query, and the merged query is
/// then scaled by `downscale_base^|chain|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIterConfig", into = "RawIterConfig")]
pub struct IterConfig {
    maxlen: usize,
    decay: f64,
    downscale_base: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawIterConfig {
    maxlen: usize,
    decay: f64,
    downscale_base: f64,
}

impl Default for RawIterConfig {
    fn default() -> Self {
        let d = IterConfig::default();
        Self {
            maxlen: d.maxlen,
            decay: d.decay,
            downscale_base: d.downscale_base,
        }
    }
}

impl TryFrom<RawIterConfig> for IterConfig {
    type Error = Error;

    fn try_from(r: RawIterConfig) -> Result<Self> {
        IterConfig::new(r.maxlen, r.decay, r.downscale_base)
    }
}

impl From<IterConfig> for RawIterConfig {
    fn from(c: IterConfig) -> Self {
        Self {
            maxlen: c.maxlen,
            decay: c.decay,
            downscale_base: c.downscale_base,
        }
    }
}

impl Default for IterConfig {
    fn default() -> Self {
        Self {
            maxlen: 128,
            decay: 0.8,
            downscale_base: 1.0,
        }
    }
}

fn unit_interval(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x <= 1.0 {
        Ok(x)
    } else {
        Err(Error::InvalidConfig(format!("{name} must be in (0, 1], got {x}")))
    }
}

impl IterConfig {
    pub fn new(maxlen: usize, decay: f64, downscale_base: f64) -> Result<Self> {
        if maxlen == 0 {
            return Err(Error::InvalidConfig("maxlen must be at least 1".into()));
        }
        Ok(Self {
            maxlen,
            decay: unit_interval("decay", decay)?,
            downscale_base: unit_interval("downscale_base", downscale_base)?,
        })
    }

    pub fn maxlen(&self) -> usize {
        self.maxlen
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn downscale_base(&self) -> f64 {
        self.downscale_base
    }

    pub fn with_maxlen(self, maxlen: usize) -> Result<Self> {
        Self::new(maxlen, self.decay, self.downscale_base)
    }

    pub fn with_decay(self, decay: f64) -> Result<Self> {
        Self::new(self.maxlen, decay, self.downscale_base)
    }

    pub fn with_downscale_base(self, base: f64) -> Result<Self> {
        Self::new(self.maxlen, self.decay, base)
    }
}
