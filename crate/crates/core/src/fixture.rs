//! Seeded synthetic datasets with planted multi-hop explanation chains.
//!
//! Every question owns a private slice of the vocabulary. Its first gold
//! fact repeats the question and answer terms plus a link term; each later
//! hop shares only the previous link term and introduces the next one, so
//! hops two onwards have no term in common with the question. Distractor
//! facts share one question term and are padded with shared noise words.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::StopwordSet;
use crate::error::{Error, Result};
use crate::io::OutputBatch;

pub const MAX_HOPS: usize = 16;

const QUESTION_TERMS: usize = 2;
const DISTRACTOR_CHOICES: usize = 3;
const MIN_NOISE: usize = 24;
const MAX_VOCAB: usize = 100_000;

const TABLES: [&str; 4] = ["KINDOF", "PROPERTIES", "CAUSE", "LOCATION"];
const FUNCTION_WORDS: [&str; 12] = [
    "the", "a", "of", "is", "in", "which", "to", "and", "that", "by", "with", "are",
];
const CONSONANTS: &[u8] = b"bdfgklmnprtvz";
const VOWELS: &[u8] = b"aeiou";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixtureSpec {
    pub questions: usize,
    pub facts: usize,
    /// Longest chain; every gold list has between `min_hops` and `hops` facts.
    pub hops: usize,
    pub min_hops: Option<usize>,
    pub vocab_size: usize,
    /// Facts per question that share a question term but are not gold.
    pub distractors: usize,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            questions: 5,
            facts: 50,
            hops: 3,
            min_hops: None,
            vocab_size: 400,
            distractors: 2,
            seed: 7,
        }
    }
}

impl FixtureSpec {
    fn min_hops(&self) -> usize {
        self.min_hops.unwrap_or(self.hops)
    }

    fn dedicated_words(&self) -> usize {
        self.questions * (QUESTION_TERMS + 1 + DISTRACTOR_CHOICES + self.hops)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.questions == 0 {
            return bad("fixture needs at least one question".into());
        }
        if self.hops == 0 || self.hops > MAX_HOPS {
            return bad(format!("hops must be in 1..={MAX_HOPS}, got {}", self.hops));
        }
        if self.min_hops() == 0 || self.min_hops() > self.hops {
            return bad(format!("min_hops must be in 1..={}, got {}", self.hops, self.min_hops()));
        }
        let planted = self.questions * (self.hops + self.distractors);
        if planted > self.facts {
            return bad(format!(
                "{} questions with {} hops and {} distractors need {planted} facts, spec allows {}",
                self.questions, self.hops, self.distractors, self.facts
            ));
        }
        let needed = self.dedicated_words() + MIN_NOISE;
        if self.vocab_size < needed || self.vocab_size > MAX_VOCAB {
            return bad(format!(
                "vocab_size must be in {needed}..={MAX_VOCAB} for this spec, got {}",
                self.vocab_size
            ));
        }
        Ok(())
    }
}

/// Generated files, relative paths in write order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub files: Vec<(PathBuf, String)>,
    /// Planted gold chain per question, in hop order.
    pub chains: Vec<(String, Vec<String>)>,
}

struct Row {
    uid: String,
    table: &'static str,
    tokens: Vec<String>,
}

struct Gen {
    rng: ChaCha8Rng,
    stops: StopwordSet,
}

impl Gen {
    fn word(&mut self) -> String {
        let syllables = self.rng.gen_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(*CONSONANTS.choose(&mut self.rng).unwrap() as char);
            w.push(*VOWELS.choose(&mut self.rng).unwrap() as char);
        }
        if self.rng.gen_bool(0.5) {
            w.push(*CONSONANTS.choose(&mut self.rng).unwrap() as char);
        }
        w
    }

    fn words(&mut self, n: usize) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = self.word();
            if self.stops.contains(&w) || self.stops.contains(&format!("{w}s")) {
                continue;
            }
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
        out
    }

    fn uid(&mut self, taken: &mut HashSet<String>) -> String {
        loop {
            let mut s = String::with_capacity(19);
            for group in 0..4 {
                if group > 0 {
                    s.push('-');
                }
                let _ = write!(s, "{:04x}", self.rng.gen::<u16>());
            }
            if taken.insert(s.clone()) {
                return s;
            }
        }
    }

    /// Surface form: occasional plural inflection.
    fn inflect(&mut self, w: &str) -> String {
        if self.rng.gen_bool(0.3) {
            format!("{w}s")
        } else {
            w.to_owned()
        }
    }

    /// Content words in a random order with function words sprinkled between.
    fn sentence(&mut self, content: &[String]) -> Vec<String> {
        let mut words: Vec<String> = content.iter().map(|w| self.inflect(w)).collect();
        words.shuffle(&mut self.rng);
        let mut out = Vec::new();
        for (i, w) in words.into_iter().enumerate() {
            if i > 0 && self.rng.gen_bool(0.5) {
                out.push((*FUNCTION_WORDS.choose(&mut self.rng).unwrap()).to_owned());
            }
            out.push(w);
        }
        if let Some(first) = out.first_mut() {
            *first = capitalize(first);
        }
        out
    }

    fn noise(&mut self, pool: &[String], n: usize) -> Vec<String> {
        pool.choose_multiple(&mut self.rng, n).cloned().collect()
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn role_for(hop: usize, len: usize) -> &'static str {
    match hop {
        1 => "CENTRAL",
        h if h == len => "GROUNDING",
        _ => "LEXGLUE",
    }
}

pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    spec.validate()?;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        stops: StopwordSet::nltk_english(),
    };
    let vocab = g.words(spec.vocab_size);
    let (dedicated, noise) = vocab.split_at(spec.dedicated_words());
    let per_q = QUESTION_TERMS + 1 + DISTRACTOR_CHOICES + spec.hops;

    let mut taken = HashSet::new();
    let mut rows: Vec<Row> = Vec::with_capacity(spec.facts);
    let mut question_lines = vec!["QuestionID\tquestion\tAnswerKey\texplanation".to_owned()];
    let mut chains = Vec::new();

    for qi in 0..spec.questions {
        let words = &dedicated[qi * per_q..(qi + 1) * per_q];
        let (qterms, rest) = words.split_at(QUESTION_TERMS);
        let (answer, rest) = rest.split_at(1);
        let (wrong, links) = rest.split_at(DISTRACTOR_CHOICES);
        let len = g.rng.gen_range(spec.min_hops()..=spec.hops);

        let mut chain = Vec::with_capacity(len);
        for hop in 1..=len {
            let content: Vec<String> = if hop == 1 {
                let mut c = qterms.to_vec();
                c.push(answer[0].clone());
                if len > 1 {
                    c.push(links[0].clone());
                }
                c
            } else {
                vec![links[hop - 2].clone(), links[hop - 1].clone()]
            };
            let uid = g.uid(&mut taken);
            chain.push(uid.clone());
            let tokens = g.sentence(&content);
            rows.push(Row {
                uid,
                table: TABLES[g.rng.gen_range(0..TABLES.len())],
                tokens,
            });
        }
        for d in 0..spec.distractors {
            let mut content = vec![qterms[d % QUESTION_TERMS].clone()];
            if d < DISTRACTOR_CHOICES {
                content.push(wrong[d].clone());
            }
            content.extend(g.noise(noise, 4));
            let uid = g.uid(&mut taken);
            let tokens = g.sentence(&content);
            rows.push(Row {
                uid,
                table: TABLES[g.rng.gen_range(0..TABLES.len())],
                tokens,
            });
        }

        let qid = format!("SYN_{:04}", qi + 1);
        let answer_slot = g.rng.gen_range(0..=DISTRACTOR_CHOICES);
        let mut choices: Vec<String> = wrong.iter().map(|w| g.inflect(w)).collect();
        choices.insert(answer_slot, g.inflect(&answer[0]));
        let mut text = format!("Which {} is in the {}?", g.inflect(&qterms[0]), g.inflect(&qterms[1]));
        for (i, c) in choices.iter().enumerate() {
            let _ = write!(text, " ({}) {c}", (b'A' + i as u8) as char);
        }
        let key = (b'A' + answer_slot as u8) as char;
        let gold = chain
            .iter()
            .enumerate()
            .map(|(i, u)| format!("{u}|{}", role_for(i + 1, len)))
            .collect::<Vec<_>>()
            .join(" ");
        question_lines.push(format!("{qid}\t{text}\t{key}\t{gold}"));
        chains.push((qid, chain));
    }

    while rows.len() < spec.facts {
        let n = g.rng.gen_range(3..=6);
        let content = g.noise(noise, n);
        let uid = g.uid(&mut taken);
        let tokens = g.sentence(&content);
        rows.push(Row {
            uid,
            table: TABLES[g.rng.gen_range(0..TABLES.len())],
            tokens,
        });
    }
    rows.shuffle(&mut g.rng);

    let mut files = Vec::new();
    for table in TABLES {
        let mut body = String::from("[SKIP] UID\tSUBJECT\tRELATION\tOBJECT\t[SKIP] COMMENT\n");
        for row in rows.iter().filter(|r| r.table == table) {
            let n = row.tokens.len();
            let (a, b) = (n.div_ceil(3), (2 * n).div_ceil(3));
            let _ = writeln!(
                body,
                "{}\t{}\t{}\t{}\tsynthetic",
                row.uid,
                row.tokens[..a].join(" "),
                row.tokens[a..b].join(" "),
                row.tokens[b..].join(" ")
            );
        }
        files.push((PathBuf::from("tables").join(format!("{table}.tsv")), body));
    }

    let mut questions = question_lines.join("\n");
    questions.push('\n');
    files.push((PathBuf::from("questions").join("dev.tsv"), questions));

    let lemma_keys: BTreeSet<&String> = vocab.iter().collect();
    let mut lemmas = String::new();
    for w in lemma_keys {
        let _ = writeln!(lemmas, "{w}s\t{w}");
    }
    files.push((PathBuf::from("lemmatization-en.txt"), lemmas));

    let mut stops: Vec<&str> = FUNCTION_WORDS.to_vec();
    stops.sort_unstable();
    files.push((PathBuf::from("stopwords.txt"), stops.join("\n") + "\n"));

    Ok(Fixture { files, chains })
}

impl Fixture {
    /// Writes every file under `root`, which must be absent or empty. All
    /// files appear together or not at all.
    pub fn write(&self, root: &Path) -> Result<()> {
        if root.exists() {
            let mut entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
            if entries.next().is_some() {
                return Err(Error::InvalidConfig(format!(
                    "{} is not empty; refusing to write a fixture there",
                    root.display()
                )));
            }
        }
        let mut batch = OutputBatch::new();
        for (rel, body) in &self.files {
            let path = root.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            batch.stage(&path, |w| w.write_all(body.as_bytes()))?;
        }
        batch.commit()
    }
}
