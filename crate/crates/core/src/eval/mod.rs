//! Mean average precision with the rank-10⁹ convention for missing facts,
//! plus per-role and per-gold-length breakdowns.
//!
//! For a gold set `G` and a predicted list, each gold fact `g` gets its
//! 1-based position `rank(g)`, or [`MISSING_RANK`] when the prediction does
//! not contain it. Then
//!
//! ```text
//! AP = (1/|G|) · Σ_g  |{g' ∈ G : rank(g') ≤ rank(g)}| / rank(g)
//! ```
//!
//! A missing fact thus contributes at most `|G| / 10⁹` instead of voiding
//! the whole question. The older behaviour (any missing gold fact scores the
//! question 0) is kept as [`MissingRank::ZeroQuestion`] for comparisons.

mod report;
mod submission;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{GoldRef, Question, Role};
use crate::diag::{Diagnostics, WarningKind};
use crate::rankers::Ranking;

pub use report::{comparison_table, LENGTH_CSV, REPORT_JSON, REPORT_TABLE};
pub use submission::{write_rankings, Submission};

pub const MISSING_RANK: usize = 1_000_000_000;

/// How gold facts absent from a prediction are scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingRank {
    /// Absent facts sit at rank 10⁹.
    #[default]
    Billion,
    /// Any absent fact makes the question's AP zero.
    ZeroQuestion,
}

/// Average precision of `predicted` against `gold` (duplicates in either are
/// ignored after their first occurrence). `None` when `gold` is empty.
///
/// ```
/// use exregen::eval::{average_precision, MissingRank};
///
/// let ap = average_precision(&["a", "x", "b"], &["a", "b"], MissingRank::Billion).unwrap();
/// assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
/// ```
pub fn average_precision<P, G>(predicted: &[P], gold: &[G], convention: MissingRank) -> Option<f64>
where
    P: AsRef<str>,
    G: AsRef<str>,
{
    let mut ranks: HashMap<&str, usize> = gold.iter().map(|g| (g.as_ref(), MISSING_RANK)).collect();
    if ranks.is_empty() {
        return None;
    }
    let mut found = 0;
    for (pos, uid) in predicted.iter().enumerate() {
        if let Some(r) = ranks.get_mut(uid.as_ref()) {
            if *r == MISSING_RANK {
                *r = pos + 1;
                found += 1;
                if found == ranks.len() {
                    break;
                }
            }
        }
    }
    if convention == MissingRank::ZeroQuestion && found < ranks.len() {
        return Some(0.0);
    }
    let mut sorted: Vec<usize> = ranks.into_values().collect();
    sorted.sort_unstable();
    let total: f64 = sorted
        .iter()
        .map(|&r| {
            let at_or_above = sorted.partition_point(|&x| x <= r);
            at_or_above as f64 / r as f64
        })
        .sum();
    Some(total / sorted.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub qid: String,
    pub gold_len: usize,
    pub ap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub n_questions: usize,
    pub map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub convention: MissingRank,
    pub n_questions: usize,
    pub map: f64,
    pub role_map: BTreeMap<Role, Bucket>,
    pub length_map: BTreeMap<usize, Bucket>,
    pub per_question: Vec<QuestionScore>,
    /// Questions with gold but no prediction; scored as if nothing was predicted.
    pub missing_predictions: Vec<String>,
    /// Questions left out for lack of gold facts.
    pub skipped: Vec<String>,
}

/// Gold explanations by question id.
#[derive(Debug, Clone, Default)]
pub struct GoldSet {
    by_qid: HashMap<String, Vec<GoldRef>>,
}

impl GoldSet {
    pub fn from_questions(questions: &[Question]) -> Self {
        Self {
            by_qid: questions
                .iter()
                .map(|q| (q.qid.clone(), q.gold.clone()))
                .collect(),
        }
    }

    pub fn insert(&mut self, qid: impl Into<String>, gold: Vec<GoldRef>) {
        self.by_qid.insert(qid.into(), gold);
    }

    pub fn get(&self, qid: &str) -> Option<&[GoldRef]> {
        self.by_qid.get(qid).map(Vec::as_slice)
    }
}

struct Entry<'a> {
    qid: &'a str,
    predicted: &'a [Arc<str>],
    gold: &'a [GoldRef],
}

fn ap_of(e: &Entry<'_>, role: Option<&Role>, conv: MissingRank) -> Option<f64> {
    let gold: Vec<&str> = e
        .gold
        .iter()
        .filter(|g| role.is_none_or(|r| &g.role == r))
        .map(|g| g.uid.as_str())
        .collect();
    average_precision(e.predicted, &gold, conv)
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<Bucket> {
    let (n, sum) = xs.into_iter().fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| Bucket {
        n_questions: n,
        map: sum / n as f64,
    })
}

fn build_report(entries: &[Entry<'_>], conv: MissingRank) -> EvalReport {
    let per_question: Vec<QuestionScore> = entries
        .iter()
        .filter_map(|e| {
            ap_of(e, None, conv).map(|ap| QuestionScore {
                qid: e.qid.to_owned(),
                gold_len: distinct(e.gold),
                ap,
            })
        })
        .collect();

    let mut roles: Vec<&Role> = entries.iter().flat_map(|e| e.gold.iter().map(|g| &g.role)).collect();
    roles.sort();
    roles.dedup();
    let role_map = roles
        .into_iter()
        .filter_map(|r| {
            mean(entries.iter().filter_map(|e| ap_of(e, Some(r), conv))).map(|b| (r.clone(), b))
        })
        .collect();

    let mut by_len: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for q in &per_question {
        by_len.entry(q.gold_len).or_default().push(q.ap);
    }
    let length_map = by_len
        .into_iter()
        .filter_map(|(len, aps)| mean(aps).map(|b| (len, b)))
        .collect();

    let overall = mean(per_question.iter().map(|q| q.ap));
    EvalReport {
        convention: conv,
        n_questions: per_question.len(),
        map: overall.map_or(0.0, |b| b.map),
        role_map,
        length_map,
        per_question,
        missing_predictions: Vec::new(),
        skipped: Vec::new(),
    }
}

fn distinct(gold: &[GoldRef]) -> usize {
    let mut uids: Vec<&str> = gold.iter().map(|g| g.uid.as_str()).collect();
    uids.sort_unstable();
    uids.dedup();
    uids.len()
}

/// Scores rankings against gold. Rankings whose question has no (or empty)
/// gold are skipped with a warning.
pub fn mean_ap(rankings: &[Ranking], golds: &GoldSet, conv: MissingRank, diag: &mut Diagnostics) -> EvalReport {
    let mut skipped = Vec::new();
    let mut entries = Vec::new();
    for r in rankings {
        match golds.get(&r.qid) {
            Some(g) if !g.is_empty() => entries.push(Entry {
                qid: &r.qid,
                predicted: r.uids(),
                gold: g,
            }),
            Some(_) => {
                diag.warn(WarningKind::EmptyGold, &r.qid, "no gold explanation; skipped");
                skipped.push(r.qid.clone());
            }
            None => {
                diag.warn(WarningKind::MissingGold, &r.qid, "question not in gold set; skipped");
                skipped.push(r.qid.clone());
            }
        }
    }
    let mut report = build_report(&entries, conv);
    report.skipped = skipped;
    report
}

/// Scores a submission over every question that has gold. Questions the
/// submission does not cover are listed and scored with an empty prediction.
pub fn evaluate_submission(
    submission: &Submission,
    questions: &[Question],
    conv: MissingRank,
    diag: &mut Diagnostics,
) -> EvalReport {
    let mut skipped = Vec::new();
    let mut missing = Vec::new();
    let mut entries = Vec::new();
    for q in questions {
        if q.gold.is_empty() {
            skipped.push(q.qid.clone());
            continue;
        }
        let predicted = match submission.get(&q.qid) {
            Some(r) => r.uids(),
            None => {
                diag.warn(WarningKind::MissingPrediction, &q.qid, "no prediction; scored as empty");
                missing.push(q.qid.clone());
                &[]
            }
        };
        entries.push(Entry {
            qid: &q.qid,
            predicted,
            gold: &q.gold,
        });
    }
    let mut report = build_report(&entries, conv);
    report.skipped = skipped;
    report.missing_predictions = missing;
    report
}

/// MAP with gold restricted to facts of `role`; questions left with no gold
/// after filtering are skipped. `None` if no question has that role.
pub fn role_filtered_map(rankings: &[Ranking], golds: &GoldSet, role: &Role, conv: MissingRank) -> Option<f64> {
    let aps = rankings.iter().filter_map(|r| {
        let gold = golds.get(&r.qid)?;
        ap_of(
            &Entry {
                qid: &r.qid,
                predicted: r.uids(),
                gold,
            },
            Some(role),
            conv,
        )
    });
    mean(aps).map(|b| b.map)
}

/// Mean AP grouped by the number of gold facts; empty groups are absent.
pub fn map_by_gold_length(rankings: &[Ranking], golds: &GoldSet, conv: MissingRank) -> BTreeMap<usize, Bucket> {
    mean_ap(rankings, golds, conv, &mut Diagnostics::new()).length_map
}
