use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use super::{Choice, GoldRef, Question, Role, Split};
use crate::diag::{Diagnostics, WarningKind};
use crate::error::{Error, Result};

/// Header names (case-insensitive) tried in order for each question column.
#[derive(Debug, Clone)]
pub struct QuestionColumns {
    pub qid: Vec<String>,
    pub question: Vec<String>,
    pub answer_key: Vec<String>,
    pub gold: Vec<String>,
}

impl Default for QuestionColumns {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            qid: v(&["questionid", "qid", "id"]),
            question: v(&["question"]),
            answer_key: v(&["answerkey", "answer"]),
            gold: v(&["explanation", "gold"]),
        }
    }
}

fn find_col(headers: &[&str], names: &[String]) -> Option<usize> {
    names.iter().find_map(|n| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(n))
    })
}

struct Marker {
    label: String,
    start: usize,
    end: usize,
}

fn paren_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(\(([A-Z]|[1-9])\))").unwrap())
}

fn dot_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|\s)(([A-Z]|[1-9])\.)").unwrap())
}

fn next_label(label: &str) -> Option<String> {
    let c = label.chars().next()?;
    char::from_u32(c as u32 + 1).map(String::from)
}

/// Keeps the first in-order run of markers that starts at A (or 1) and
/// increments by one; stray markers elsewhere stay part of the text.
fn marker_chain(text: &str, re: &Regex) -> Vec<Marker> {
    let mut chain: Vec<Marker> = Vec::new();
    for caps in re.captures_iter(text) {
        let marker = caps.get(1).unwrap();
        let label = caps.get(2).unwrap().as_str();
        // "A." must be followed by whitespace or the end of the text
        if text[marker.end()..].chars().next().is_some_and(|c| !c.is_whitespace()) {
            continue;
        }
        let accept = match chain.last() {
            None => label == "A" || label == "1",
            Some(prev) => next_label(&prev.label).as_deref() == Some(label),
        };
        if accept {
            chain.push(Marker {
                label: label.to_owned(),
                start: marker.start(),
                end: marker.end(),
            });
        }
    }
    chain
}

/// Splits "stem (A) one (B) two" into the stem and labelled choices. Also
/// accepts "A. one B. two". Without markers the whole text is the stem.
pub fn parse_choices(text: &str) -> (String, Vec<Choice>) {
    let mut chain = marker_chain(text, paren_marker());
    if chain.is_empty() {
        chain = marker_chain(text, dot_marker());
    }
    if chain.is_empty() {
        return (text.trim().to_owned(), Vec::new());
    }
    let stem = text[..chain[0].start].trim().to_owned();
    let choices = chain
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let stop = chain.get(i + 1).map_or(text.len(), |n| n.start);
            Choice {
                label: m.label.clone(),
                text: text[m.end..stop].trim().to_owned(),
            }
        })
        .collect();
    (stem, choices)
}

fn parse_gold(field: &str, file: &str, qid: &str, diag: &mut Diagnostics) -> Vec<GoldRef> {
    let mut gold = Vec::new();
    for pair in field.split_whitespace() {
        match pair.rsplit_once('|') {
            Some((uid, role)) if !uid.is_empty() && !role.is_empty() => gold.push(GoldRef {
                uid: uid.to_owned(),
                role: Role::parse(role),
            }),
            _ => diag.warn(
                WarningKind::MalformedGoldPair,
                file,
                format!("{qid}: malformed gold pair {pair:?}"),
            ),
        }
    }
    gold
}

/// Reads one split's question file (tab-separated with a header row).
pub fn load_questions(
    path: &Path,
    split: Split,
    columns: &QuestionColumns,
    diag: &mut Diagnostics,
) -> Result<Vec<Question>> {
    let text = crate::io::read_to_string(path)?;
    let file = path.display().to_string();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let headers: Vec<&str> = header.split('\t').collect();
    let qid_col = find_col(&headers, &columns.qid)
        .ok_or_else(|| Error::parse(path, 1, "no question id column"))?;
    let q_col = find_col(&headers, &columns.question)
        .ok_or_else(|| Error::parse(path, 1, "no question text column"))?;
    let key_col = find_col(&headers, &columns.answer_key);
    let gold_col = find_col(&headers, &columns.gold);

    let mut out = Vec::new();
    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split('\t').collect();
        let cell = |i: usize| cells.get(i).map(|s| s.trim()).unwrap_or_default();
        let qid = cell(qid_col);
        if qid.is_empty() {
            return Err(Error::parse(path, line_no, "row has no question id"));
        }
        let (question_text, choices) = parse_choices(cell(q_col));
        let key = key_col.map(cell).unwrap_or_default();
        let correct_label = if choices.iter().any(|c| c.label == key) {
            Some(key.to_owned())
        } else {
            diag.warn(
                WarningKind::UnknownAnswerKey,
                &file,
                format!("{qid}: answer key {key:?} not among parsed choices"),
            );
            None
        };
        let gold = gold_col
            .map(|c| parse_gold(cell(c), &file, qid, diag))
            .unwrap_or_default();
        out.push(Question {
            qid: qid.to_owned(),
            split,
            question_text,
            choices,
            correct_label,
            gold,
        });
    }
    Ok(out)
}
