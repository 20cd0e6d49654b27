use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use super::Ranking;
use crate::diag::{Diagnostics, WarningKind};
use crate::error::{Error, Result};

pub const DEFAULT_TOP_N: usize = 64;

/// External relevance scores: a TSV with header `qid\tuid\tscore` and one
/// decimal score per (question, fact) row.
#[derive(Debug, Clone, Default)]
pub struct ScoreFile {
    scores: HashMap<String, HashMap<String, f64>>,
    rows: usize,
}

impl ScoreFile {
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.split('\t').map(|c| c.trim().to_ascii_lowercase()).eq(["qid", "uid", "score"]) => {}
            Some((n, _)) => return Err(Error::parse(source, n, "expected header qid<TAB>uid<TAB>score")),
            None => return Err(Error::parse(source, 1, "empty score file")),
        }
        let mut sf = ScoreFile::default();
        for (n, line) in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            let [qid, uid, score] = cols[..] else {
                return Err(Error::parse(source, n, format!("expected 3 columns, found {}", cols.len())));
            };
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| Error::parse(source, n, format!("bad score {score:?}")))?;
            if !score.is_finite() {
                return Err(Error::parse(source, n, "score is not finite"));
            }
            sf.insert(qid.trim(), uid.trim(), score)
                .map_err(|m| Error::parse(source, n, m))?;
        }
        Ok(sf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&crate::io::read_to_string(path)?, path)
    }

    fn insert(&mut self, qid: &str, uid: &str, score: f64) -> std::result::Result<(), String> {
        if qid.is_empty() || uid.is_empty() {
            return Err("empty qid or uid".into());
        }
        let prev = self
            .scores
            .entry(qid.to_owned())
            .or_default()
            .insert(uid.to_owned(), score);
        if prev.is_some() {
            return Err(format!("duplicate score for {qid} {uid}"));
        }
        self.rows += 1;
        Ok(())
    }

    /// In-memory construction, rows in any order.
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = (&'a str, &'a str, f64)>) -> Result<Self> {
        let mut sf = ScoreFile::default();
        for (i, (q, u, s)) in rows.into_iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::parse("<memory>", i + 1, "score is not finite"));
            }
            sf.insert(q, u, s).map_err(|m| Error::parse("<memory>", i + 1, m))?;
        }
        Ok(sf)
    }

    pub fn get(&self, qid: &str, uid: &str) -> Option<f64> {
        self.scores.get(qid)?.get(uid).copied()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn has_question(&self, qid: &str) -> bool {
        self.scores.contains_key(qid)
    }

    /// Writes rows sorted by qid then uid.
    pub fn write_tsv<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "qid\tuid\tscore")?;
        let mut qids: Vec<_> = self.scores.keys().collect();
        qids.sort();
        for q in qids {
            let mut rows: Vec<_> = self.scores[q].iter().collect();
            rows.sort_by(|a, b| a.0.cmp(b.0));
            for (u, s) in rows {
                writeln!(out, "{q}\t{u}\t{s}")?;
            }
        }
        Ok(())
    }
}

/// Reorders the first `top_n` entries of `base` by descending external score
/// (equal scores keep their base order). Entries past `top_n` do not move.
/// A `top_n` beyond the ranking length is clamped with a warning.
pub fn apply_external_scores(
    base: &Ranking,
    scores: &ScoreFile,
    top_n: usize,
    diag: &mut Diagnostics,
) -> Result<Ranking> {
    if top_n == 0 {
        return Err(Error::InvalidConfig("top_n must be at least 1".into()));
    }
    let n = if top_n > base.len() {
        diag.warn(
            WarningKind::TopNClamped,
            &base.qid,
            format!("top_n {top_n} clamped to ranking length {}", base.len()),
        );
        base.len()
    } else {
        top_n
    };

    let mut head = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for uid in base.top(n) {
        match scores.get(&base.qid, uid) {
            Some(s) => head.push((uid.clone(), s)),
            None => missing.push(uid.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingScores {
            qid: base.qid.clone(),
            uids: missing,
        });
    }
    // stable: ties keep base order
    head.sort_by(|a, b| b.1.total_cmp(&a.1));

    let uids = head
        .into_iter()
        .map(|(u, _)| u)
        .chain(base.uids()[n..].iter().cloned())
        .collect();
    Ok(Ranking::new(base.qid.clone(), uids))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uids(r: &Ranking) -> Vec<&str> {
        r.uids().iter().map(|u| &**u).collect()
    }

    fn base(n: usize) -> Ranking {
        Ranking::from_strs("q", (0..n).map(|i| format!("f{i:03}")))
    }

    #[test]
    fn equal_scores_leave_ranking_unchanged() {
        let b = base(100);
        let rows: Vec<(String, f64)> = b.top(64).iter().map(|u| (u.to_string(), 0.5)).collect();
        let sf = ScoreFile::from_rows(rows.iter().map(|(u, s)| ("q", u.as_str(), *s))).unwrap();
        let mut d = Diagnostics::new();
        assert_eq!(apply_external_scores(&b, &sf, 64, &mut d).unwrap(), b);
        assert!(d.is_empty());
    }

    #[test]
    fn last_of_head_can_jump_to_first_but_tail_is_fixed() {
        let b = base(100);
        let rows: Vec<(String, f64)> = b
            .top(64)
            .iter()
            .enumerate()
            .map(|(i, u)| (u.to_string(), if i == 63 { 10.0 } else { 1.0 - i as f64 / 100.0 }))
            .collect();
        let sf = ScoreFile::from_rows(rows.iter().map(|(u, s)| ("q", u.as_str(), *s))).unwrap();
        let out = apply_external_scores(&b, &sf, 64, &mut Diagnostics::new()).unwrap();
        assert_eq!(uids(&out)[0], "f063");
        assert_eq!(uids(&out)[1], "f000");
        assert_eq!(uids(&out)[64..], uids(&b)[64..]);
    }

    #[test]
    fn missing_scores_are_listed() {
        let b = base(5);
        let sf = ScoreFile::from_rows([("q", "f000", 1.0), ("q", "f002", 1.0)]).unwrap();
        match apply_external_scores(&b, &sf, 3, &mut Diagnostics::new()) {
            Err(Error::MissingScores { uids, .. }) => assert_eq!(uids, ["f001"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oversized_top_n_is_clamped_with_warning() {
        let b = base(3);
        let sf = ScoreFile::from_rows([("q", "f000", 0.0), ("q", "f001", 1.0), ("q", "f002", 2.0)]).unwrap();
        let mut d = Diagnostics::new();
        let out = apply_external_scores(&b, &sf, 64, &mut d).unwrap();
        assert_eq!(uids(&out), ["f002", "f001", "f000"]);
        assert_eq!(d.count(WarningKind::TopNClamped), 1);
    }

    #[test]
    fn score_file_grammar() {
        let p = Path::new("s.tsv");
        let sf = ScoreFile::parse("qid\tuid\tscore\nq1\ta\t0.25\nq1\tb\t-1e-3\n", p).unwrap();
        assert_eq!(sf.get("q1", "b"), Some(-0.001));
        assert_eq!(sf.rows(), 2);
        assert!(ScoreFile::parse("q1\ta\t0.2\n", p).is_err());
        assert!(ScoreFile::parse("qid\tuid\tscore\nq1\ta\n", p).is_err());
        assert!(ScoreFile::parse("qid\tuid\tscore\nq1\ta\tabc\n", p).is_err());
        assert!(ScoreFile::parse("qid\tuid\tscore\nq1\ta\tNaN\n", p).is_err());
        assert!(ScoreFile::parse("qid\tuid\tscore\nq1\ta\t1\nq1\ta\t2\n", p).is_err());
    }

    #[test]
    fn write_then_parse() {
        let sf = ScoreFile::from_rows([("q2", "b", 0.5), ("q1", "a", 1.25)]).unwrap();
        let mut buf = Vec::new();
        sf.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "qid\tuid\tscore\nq1\ta\t1.25\nq2\tb\t0.5\n");
        let back = ScoreFile::parse(&text, Path::new("x")).unwrap();
        assert_eq!(back.get("q2", "b"), Some(0.5));
    }
}
