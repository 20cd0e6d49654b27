//! Tablestore facts, questions with gold explanations, and the lexical
//! resources (lemma map, stopwords) used by preprocessing.

mod lexicon;
mod questions;
mod tablestore;

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostics, WarningKind};
use crate::error::{Error, Result};

pub use lexicon::{load_lemmas, load_stopwords, LemmaMap, LemmaOrder, StopwordSet};
pub use questions::{load_questions, parse_choices, QuestionColumns};
pub use tablestore::load_tablestore;

/// One tablestore row read off as free text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub uid: Arc<str>,
    pub table: String,
    pub text: String,
}

/// All facts in a stable order with a uid index.
#[derive(Debug, Clone, Default)]
pub struct FactStore {
    facts: Vec<Fact>,
    index: HashMap<Arc<str>, usize>,
}

impl PartialEq for FactStore {
    fn eq(&self, other: &Self) -> bool {
        self.facts == other.facts
    }
}

pub(crate) struct StoreBuilder {
    store: FactStore,
    locations: Vec<String>,
}

impl StoreBuilder {
    pub(crate) fn new() -> Self {
        Self {
            store: FactStore::default(),
            locations: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, fact: Fact, location: String) -> Result<()> {
        if let Some(&prev) = self.store.index.get(&fact.uid) {
            return Err(Error::DuplicateUid {
                uid: fact.uid.to_string(),
                first: self.locations[prev].clone(),
                second: location,
            });
        }
        let pos = self.store.facts.len();
        self.store.index.insert(fact.uid.clone(), pos);
        self.store.facts.push(fact);
        self.locations.push(location);
        Ok(())
    }

    pub(crate) fn finish(self, source: &Path) -> Result<FactStore> {
        if self.store.facts.is_empty() {
            return Err(Error::EmptyStore(source.to_path_buf()));
        }
        Ok(self.store)
    }
}

impl FactStore {
    /// Builds a store from facts already in memory. Uids must be unique and
    /// non-empty, texts non-empty.
    pub fn from_facts(facts: impl IntoIterator<Item = Fact>) -> Result<Self> {
        let mut b = StoreBuilder::new();
        for (i, fact) in facts.into_iter().enumerate() {
            if fact.uid.is_empty() {
                return Err(Error::parse("<memory>", i + 1, "empty fact uid"));
            }
            if fact.text.trim().is_empty() {
                return Err(Error::EmptyFactText {
                    file: "<memory>".into(),
                    line: i + 1,
                });
            }
            b.push(fact, format!("fact #{}", i + 1))?;
        }
        b.finish(Path::new("<memory>"))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fact> {
        self.facts.iter()
    }

    pub fn get(&self, uid: &str) -> Option<&Fact> {
        self.position(uid).map(|i| &self.facts[i])
    }

    pub fn position(&self, uid: &str) -> Option<usize> {
        self.index.get(uid).copied()
    }

    pub fn contains(&self, uid: &str) -> bool {
        self.index.contains_key(uid)
    }

    /// The interned uid for `uid`, so rankings can share the store's strings.
    pub fn uid(&self, uid: &str) -> Option<&Arc<str>> {
        self.index.get_key_value(uid).map(|(k, _)| k)
    }

    /// Canonical dump: header `uid\ttable\ttext`, one fact per line, store order.
    pub fn write_canonical<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "uid\ttable\ttext")?;
        for f in &self.facts {
            writeln!(out, "{}\t{}\t{}", f.uid, f.table, f.text)?;
        }
        Ok(())
    }

    pub fn save_canonical(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, |w| self.write_canonical(w))
    }

    pub fn load_canonical(path: &Path) -> Result<Self> {
        let text = crate::io::read_to_string(path)?;
        let mut b = StoreBuilder::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "uid\ttable\ttext")) => {}
            _ => return Err(Error::parse(path, 1, "expected canonical header")),
        }
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut cols = line.splitn(3, '\t');
            let (Some(uid), Some(table), Some(text)) = (cols.next(), cols.next(), cols.next())
            else {
                return Err(Error::parse(path, i + 1, "expected 3 columns"));
            };
            if text.is_empty() {
                return Err(Error::EmptyFactText {
                    file: path.to_path_buf(),
                    line: i + 1,
                });
            }
            let fact = Fact {
                uid: uid.into(),
                table: table.to_owned(),
                text: text.to_owned(),
            };
            b.push(fact, format!("{}:{}", path.display(), i + 1))?;
        }
        b.finish(path)
    }
}

impl<'a> IntoIterator for &'a FactStore {
    type Item = &'a Fact;
    type IntoIter = std::slice::Iter<'a, Fact>;

    fn into_iter(self) -> Self::IntoIter {
        self.facts.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidConfig(format!("unknown split {other:?}"))),
        }
    }
}

/// The function a fact plays in a gold explanation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Central,
    Grounding,
    LexGlue,
    Background,
    Neg,
    Role,
    Other(String),
}

impl Role {
    /// Case-insensitive; separators are ignored so "lex-glue" reads as LEXGLUE.
    /// Anything unrecognised becomes `Other` with the uppercased name.
    pub fn parse(s: &str) -> Role {
        let norm: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_uppercase)
            .collect();
        match norm.as_str() {
            "CENTRAL" => Role::Central,
            "GROUNDING" => Role::Grounding,
            "LEXGLUE" | "LEXICALGLUE" => Role::LexGlue,
            "BACKGROUND" => Role::Background,
            "NEG" => Role::Neg,
            "ROLE" => Role::Role,
            _ => Role::Other(s.trim().to_uppercase()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Role::Central => "CENTRAL",
            Role::Grounding => "GROUNDING",
            Role::LexGlue => "LEXGLUE",
            Role::Background => "BACKGROUND",
            Role::Neg => "NEG",
            Role::Role => "ROLE",
            Role::Other(s) => s,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Role {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Role {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Role::parse(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub label: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldRef {
    pub uid: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub qid: String,
    pub split: Split,
    pub question_text: String,
    pub choices: Vec<Choice>,
    pub correct_label: Option<String>,
    pub gold: Vec<GoldRef>,
}

impl Question {
    pub fn correct_answer(&self) -> Option<&str> {
        let label = self.correct_label.as_deref()?;
        self.choices
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.text.as_str())
    }

    pub fn gold_uids(&self) -> impl Iterator<Item = &str> {
        self.gold.iter().map(|g| g.uid.as_str())
    }
}

/// Counts from checking gold references against a store.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GoldResolution {
    pub resolved: usize,
    pub unresolved: usize,
}

impl GoldResolution {
    pub fn total(&self) -> usize {
        self.resolved + self.unresolved
    }
}

/// Reports every gold uid that does not resolve in `store`. Questions are
/// left untouched.
pub fn resolve_gold(questions: &[Question], store: &FactStore, diag: &mut Diagnostics) -> GoldResolution {
    let mut res = GoldResolution::default();
    for q in questions {
        for g in &q.gold {
            if store.contains(&g.uid) {
                res.resolved += 1;
            } else {
                res.unresolved += 1;
                diag.warn(
                    WarningKind::UnresolvedGoldUid,
                    &q.qid,
                    format!("gold uid {} not in tablestore", g.uid),
                );
            }
        }
    }
    res
}
