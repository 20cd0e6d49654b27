use std::collections::HashMap;

use super::TermSeq;
use crate::error::{Error, Result};

pub type TermId = u32;

/// Dense term ids (assigned in first-seen order) with document frequencies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    ids: HashMap<String, TermId>,
    terms: Vec<String>,
    df: Vec<u32>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id as usize]
    }

    pub fn df(&self, id: TermId) -> u32 {
        self.df[id as usize]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// Counts, for every distinct term, how many documents contain it.
pub fn build_vocabulary(docs: &[TermSeq]) -> Result<Vocabulary> {
    let mut v = Vocabulary {
        n_docs: docs.len(),
        ..Default::default()
    };
    // last document index that bumped each term's df
    let mut last_seen: Vec<usize> = Vec::new();
    for (d, doc) in docs.iter().enumerate() {
        for term in doc.iter() {
            let id = match v.ids.get(term.as_str()) {
                Some(&id) => id,
                None => {
                    let id = v.terms.len() as TermId;
                    v.ids.insert(term.clone(), id);
                    v.terms.push(term.clone());
                    v.df.push(0);
                    last_seen.push(usize::MAX);
                    id
                }
            };
            if last_seen[id as usize] != d {
                last_seen[id as usize] = d;
                v.df[id as usize] += 1;
            }
        }
    }
    if v.terms.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(v)
}
