//! Text normalization: tokenize, lowercase, lemmatize, drop stopwords.

mod tokenize;
mod vocab;

use std::ops::Deref;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::corpus::{LemmaMap, Question, StopwordSet};

pub use tokenize::{tokenize, treebank_tokenize};
pub use vocab::{build_vocabulary, TermId, Vocabulary};

/// Normalized terms in text order. Never holds an empty term, an uppercase
/// character, or (when produced by [`Preprocessor`]) a stopword.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermSeq(Vec<String>);

impl TermSeq {
    pub fn new(terms: Vec<String>) -> Self {
        Self(terms)
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    /// Space-joined terms.
    pub fn joined(&self) -> String {
        self.0.join(" ")
    }
}

impl Deref for TermSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TermSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

fn is_punctuation(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

/// Holds the lexical resources and applies the full normalization pipeline.
#[derive(Debug, Default)]
pub struct Preprocessor {
    lemmas: LemmaMap,
    stops: StopwordSet,
    missing_answers: AtomicUsize,
}

impl Preprocessor {
    pub fn new(lemmas: LemmaMap, stops: StopwordSet) -> Self {
        Self {
            lemmas,
            stops,
            missing_answers: AtomicUsize::new(0),
        }
    }

    pub fn lemmas(&self) -> &LemmaMap {
        &self.lemmas
    }

    pub fn stopwords(&self) -> &StopwordSet {
        &self.stops
    }

    /// tokenize → lowercase → drop punctuation → lemmatize → drop stopwords.
    ///
    /// ```
    /// use exregen::corpus::{LemmaMap, StopwordSet};
    /// use exregen::textproc::Preprocessor;
    ///
    /// let pre = Preprocessor::new(
    ///     LemmaMap::from_pairs([("mice", "mouse"), ("holes", "hole")]),
    ///     StopwordSet::from_words(["in"]),
    /// );
    /// assert_eq!(&*pre.preprocess("Mice live in holes."), ["mouse", "live", "hole"]);
    /// ```
    pub fn preprocess(&self, text: &str) -> TermSeq {
        let mut out = Vec::new();
        for tok in tokenize(text) {
            let lower = tok.to_lowercase();
            if is_punctuation(&lower) {
                continue;
            }
            let lemma = self.lemmas.lookup_lower(&lower);
            if lemma.is_empty() || self.stops.contains(lemma) {
                continue;
            }
            out.push(lemma.to_lowercase());
        }
        TermSeq(out)
    }

    /// Question text plus the correct answer only; distractor choices never
    /// reach the pipeline. Falls back to the question text alone (and bumps
    /// [`missing_answers`](Self::missing_answers)) when no correct answer is known.
    pub fn question_repr(&self, q: &Question) -> TermSeq {
        match q.correct_answer() {
            Some(ans) => self.preprocess(&format!("{} {}", q.question_text, ans)),
            None => {
                self.missing_answers.fetch_add(1, Ordering::Relaxed);
                self.preprocess(&q.question_text)
            }
        }
    }

    /// Number of `question_repr` calls that had no correct answer.
    pub fn missing_answers(&self) -> usize {
        self.missing_answers.load(Ordering::Relaxed)
    }
}
