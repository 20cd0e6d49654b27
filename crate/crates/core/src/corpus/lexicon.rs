use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::Result;

/// Column order of a lemma file line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaOrder {
    /// `inflected<sep>lemma`
    #[default]
    FormFirst,
    /// `lemma<sep>inflected`
    LemmaFirst,
}

/// Flat inflected-form → lemma dictionary keyed on lowercase forms.
#[derive(Debug, Clone, Default)]
pub struct LemmaMap {
    map: HashMap<String, String>,
    duplicates: usize,
    malformed: usize,
}

impl LemmaMap {
    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut m = LemmaMap::default();
        for (k, v) in pairs {
            m.insert(k.as_ref(), v.as_ref());
        }
        m
    }

    fn insert(&mut self, form: &str, lemma: &str) {
        if self
            .map
            .insert(form.to_lowercase(), lemma.to_lowercase())
            .is_some()
        {
            self.duplicates += 1;
        }
    }

    /// Lemma for `token`, or the lowercased token itself when unmapped.
    pub fn lookup(&self, token: &str) -> String {
        let lower = token.to_lowercase();
        match self.map.get(&lower) {
            Some(l) => l.clone(),
            None => lower,
        }
    }

    /// Like [`lookup`](Self::lookup) for a token that is already lowercase.
    pub fn lookup_lower<'a>(&'a self, lower: &'a str) -> &'a str {
        self.map.get(lower).map_or(lower, String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Lines whose key had already been seen (the later line wins).
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Non-blank lines that did not split into two non-empty fields.
    pub fn malformed(&self) -> usize {
        self.malformed
    }
}

/// Reads a lemma file. The separator is a tab if the first non-blank line
/// has one, otherwise a comma.
pub fn load_lemmas(path: &Path, order: LemmaOrder) -> Result<LemmaMap> {
    let text = crate::io::read_to_string(path)?;
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty()).peekable();
    let sep = match lines.peek() {
        Some(first) if first.contains('\t') => '\t',
        _ => ',',
    };
    let mut m = LemmaMap::default();
    for line in lines {
        let mut parts = line.splitn(2, sep).map(str::trim);
        match (parts.next(), parts.next()) {
            (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => {
                let (form, lemma) = match order {
                    LemmaOrder::FormFirst => (a, b),
                    LemmaOrder::LemmaFirst => (b, a),
                };
                m.insert(form, lemma);
            }
            _ => m.malformed += 1,
        }
    }
    Ok(m)
}

/// Lowercase stopword membership set.
#[derive(Debug, Clone, Default)]
pub struct StopwordSet {
    words: HashSet<String>,
}

// NLTK's English stopword list.
const NLTK_ENGLISH: &str = "i me my myself we our ours ourselves you you're you've you'll you'd \
your yours yourself yourselves he him his himself she she's her hers herself it it's its itself \
they them their theirs themselves what which who whom this that that'll these those am is are was \
were be been being have has had having do does did doing a an the and but if or because as until \
while of at by for with about against between into through during before after above below to \
from up down in out on off over under again further then once here there when where why how all \
any both each few more most other some such no nor not only own same so than too very s t can will \
just don don't should should've now d ll m o re ve y ain aren aren't couldn couldn't didn didn't \
doesn doesn't hadn hadn't hasn hasn't haven haven't isn isn't ma mightn mightn't mustn mustn't \
needn needn't shan shan't shouldn shouldn't wasn wasn't weren weren't won won't wouldn wouldn't";

impl StopwordSet {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// The 179-word NLTK English list, used when no stopword file is given.
    pub fn nltk_english() -> Self {
        Self::from_words(NLTK_ENGLISH.split_whitespace())
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.chars().any(char::is_uppercase) {
            self.words.contains(&word.to_lowercase())
        } else {
            self.words.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Reads one stopword per line; blank lines are skipped.
pub fn load_stopwords(path: &Path) -> Result<StopwordSet> {
    let text = crate::io::read_to_string(path)?;
    Ok(StopwordSet::from_words(text.lines()))
}
