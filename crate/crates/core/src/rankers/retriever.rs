use std::cmp::Ordering;
use std::sync::Arc;

use super::{IterConfig, Ranking};
use crate::corpus::FactStore;
use crate::error::{Error, Result};
use crate::tfidf::SparseVector;

/// Precomputed fact vectors plus an inverted index for scoring a query
/// against the whole store in one pass over the query's postings.
#[derive(Debug)]
pub struct Retriever<'s> {
    store: &'s FactStore,
    vectors: Vec<SparseVector>,
    norms: Vec<f64>,
    /// term id → (fact position, weight)
    postings: Vec<Vec<(u32, f64)>>,
    /// fact position → position in ascending-uid order
    uid_rank: Vec<u32>,
}

impl<'s> Retriever<'s> {
    /// `vectors[i]` must be the vector of `store.facts()[i]`.
    pub fn new(store: &'s FactStore, vectors: Vec<SparseVector>) -> Result<Self> {
        if vectors.len() != store.len() {
            return Err(Error::InvalidConfig(format!(
                "{} fact vectors for {} facts",
                vectors.len(),
                store.len()
            )));
        }
        let n_terms = vectors
            .iter()
            .filter_map(|v| v.ids().last())
            .max()
            .map_or(0, |&m| m as usize + 1);
        let mut postings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_terms];
        for (f, v) in vectors.iter().enumerate() {
            for (id, w) in v.iter() {
                postings[id as usize].push((f as u32, w));
            }
        }
        let norms = vectors.iter().map(SparseVector::norm).collect();

        let mut by_uid: Vec<usize> = (0..store.len()).collect();
        by_uid.sort_by(|&a, &b| store.facts()[a].uid.cmp(&store.facts()[b].uid));
        let mut uid_rank = vec![0u32; store.len()];
        for (r, &f) in by_uid.iter().enumerate() {
            uid_rank[f] = r as u32;
        }

        Ok(Self {
            store,
            vectors,
            norms,
            postings,
            uid_rank,
        })
    }

    pub fn store(&self) -> &FactStore {
        self.store
    }

    pub fn vectors(&self) -> &[SparseVector] {
        &self.vectors
    }

    /// Cosine of `query` against every fact, indexed by fact position.
    pub fn scores(&self, query: &SparseVector) -> Vec<f64> {
        let mut acc = vec![0.0; self.vectors.len()];
        let qn = query.norm();
        if qn == 0.0 {
            return acc;
        }
        for (id, qw) in query.iter() {
            if let Some(list) = self.postings.get(id as usize) {
                for &(f, fw) in list {
                    acc[f as usize] += qw * fw;
                }
            }
        }
        for (a, &fnorm) in acc.iter_mut().zip(&self.norms) {
            *a = if fnorm == 0.0 { 0.0 } else { (*a / (qn * fnorm)).min(1.0) };
        }
        acc
    }

    /// Higher score first, then ascending uid.
    fn order(&self, scores: &[f64], a: usize, b: usize) -> Ordering {
        scores[b]
            .total_cmp(&scores[a])
            .then(self.uid_rank[a].cmp(&self.uid_rank[b]))
    }

    fn uid(&self, f: usize) -> Arc<str> {
        self.store.facts()[f].uid.clone()
    }

    fn sorted(&self, mut positions: Vec<usize>, scores: &[f64]) -> Vec<usize> {
        positions.sort_unstable_by(|&a, &b| self.order(scores, a, b));
        positions
    }

    /// Every fact by descending cosine to `query`, ties by ascending uid.
    /// An empty query therefore yields plain uid order.
    pub fn rank_optimized(&self, qid: &str, query: &SparseVector) -> Ranking {
        let scores = self.scores(query);
        let order = self.sorted((0..self.vectors.len()).collect(), &scores);
        Ranking::new(qid, order.into_iter().map(|f| self.uid(f)).collect())
    }

    /// Greedy chain: repeatedly pick the unused fact closest to the running
    /// query vector, fold its decayed vector in with an element-wise max and
    /// shrink the result by `downscale_base^|chain|`. The chain (in selection
    /// order) heads the ranking; the rest follow by cosine to the final
    /// query.
    pub fn rank_iterated(&self, qid: &str, query: &SparseVector, cfg: &IterConfig) -> Ranking {
        let n = self.vectors.len();
        let steps = cfg.maxlen().min(n);
        let mut used = vec![false; n];
        let mut chain = Vec::with_capacity(steps);
        let mut v = query.clone();

        for k in 1..=steps {
            let scores = self.scores(&v);
            let best = (0..n)
                .filter(|&f| !used[f])
                .min_by(|&a, &b| self.order(&scores, a, b))
                .expect("steps never exceed the store size");
            used[best] = true;
            chain.push(best);

            let weighted = self.vectors[best]
                .scale(cfg.decay().powi(k as i32))
                .expect("decay is validated to (0, 1]");
            v = v
                .max_aggregate(&weighted)
                .scale(cfg.downscale_base().powi(chain.len() as i32))
                .expect("downscale_base is validated to (0, 1]");
        }

        let scores = self.scores(&v);
        let rest = self.sorted((0..n).filter(|&f| !used[f]).collect(), &scores);
        let uids = chain
            .into_iter()
            .chain(rest)
            .map(|f| self.uid(f))
            .collect();
        Ranking::new(qid, uids)
    }
}
