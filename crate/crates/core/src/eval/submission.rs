use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::diag::{Diagnostics, WarningKind};
use crate::error::{Error, Result};
use crate::rankers::Ranking;

/// Predictions in the shared-task submission format: headerless rows of
/// `qid<TAB>uid`, facts of each question in ranked order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Submission {
    rankings: Vec<Ranking>,
    index: HashMap<String, usize>,
}

impl Submission {
    pub fn from_rankings(rankings: Vec<Ranking>) -> Result<Self> {
        let mut index = HashMap::with_capacity(rankings.len());
        for (i, r) in rankings.iter().enumerate() {
            if index.insert(r.qid.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("question {} ranked twice", r.qid)));
            }
        }
        Ok(Self { rankings, index })
    }

    /// Rows for one question need not be contiguous; repeated
    /// (qid, uid) pairs keep their first position and are reported.
    pub fn parse(text: &str, source: &Path, diag: &mut Diagnostics) -> Result<Self> {
        let mut order: Vec<String> = Vec::new();
        // per question: uids in file order and the set already seen
        type Rows = (Vec<Arc<str>>, HashSet<Arc<str>>);
        let mut lists: HashMap<String, Rows> = HashMap::new();
        let file = source.display().to_string();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let Some((qid, uid)) = line.split_once('\t') else {
                return Err(Error::parse(source, i + 1, "expected qid<TAB>uid"));
            };
            let (qid, uid) = (qid.trim(), uid.trim());
            if qid.is_empty() || uid.is_empty() || uid.contains('\t') {
                return Err(Error::parse(source, i + 1, "expected qid<TAB>uid"));
            }
            let entry = lists.entry(qid.to_owned()).or_insert_with(|| {
                order.push(qid.to_owned());
                Default::default()
            });
            let uid: Arc<str> = uid.into();
            if entry.1.insert(uid.clone()) {
                entry.0.push(uid);
            } else {
                diag.warn(
                    WarningKind::DuplicatePrediction,
                    &file,
                    format!("line {}: {qid} lists {uid} again", i + 1),
                );
            }
        }
        let rankings = order
            .into_iter()
            .map(|q| {
                let uids = lists.remove(&q).map(|(v, _)| v).unwrap_or_default();
                Ranking::new(q, uids)
            })
            .collect();
        Self::from_rankings(rankings)
    }

    pub fn load(path: &Path, diag: &mut Diagnostics) -> Result<Self> {
        Self::parse(&crate::io::read_to_string(path)?, path, diag)
    }

    pub fn get(&self, qid: &str) -> Option<&Ranking> {
        self.index.get(qid).map(|&i| &self.rankings[i])
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub fn into_rankings(self) -> Vec<Ranking> {
        self.rankings
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.rankings.iter().map(|r| r.qid.as_str())
    }

    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }

    pub fn write<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        write_rankings(&self.rankings, out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, |w| self.write(w))
    }

    /// Question ids present in exactly one of the two submissions.
    pub fn question_difference(&self, other: &Submission) -> (Vec<String>, Vec<String>) {
        let only_self = self.qids().filter(|q| other.get(q).is_none()).map(str::to_owned).collect();
        let only_other = other.qids().filter(|q| self.get(q).is_none()).map(str::to_owned).collect();
        (only_self, only_other)
    }
}

pub fn write_rankings<W: Write + ?Sized>(rankings: &[Ranking], out: &mut W) -> std::io::Result<()> {
    for r in rankings {
        for uid in r.uids() {
            writeln!(out, "{}\t{}", r.qid, uid)?;
        }
    }
    Ok(())
}
