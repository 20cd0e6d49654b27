//! End-to-end runs: load a dataset, fit TF-IDF, rank questions in parallel,
//! and the submission-level operations the command line exposes.

mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    load_lemmas, load_questions, load_stopwords, load_tablestore, resolve_gold, FactStore, GoldRef, LemmaOrder,
    Question, QuestionColumns, Split, StopwordSet,
};
use crate::diag::{Diagnostics, WarningKind};
use crate::error::{Error, Result};
use crate::eval::{evaluate_submission, MissingRank, Submission};
use crate::rankers::{apply_external_scores, ensemble_ranks, IterConfig, Ranking, Retriever, ScoreFile};
use crate::textproc::{Preprocessor, TermSeq};
use crate::tfidf::{SparseVector, TfidfConfig, TfidfModel, VectorCache};

pub use config::{DataPaths, FitCorpus, Method, PathOverrides, RunConfig, DATA_ENV};

/// Wall-clock time per named phase, in the order the phases ran.
#[derive(Debug, Clone, Default)]
pub struct Timings(Vec<(&'static str, Duration)>);

impl Timings {
    pub fn time<T>(&mut self, phase: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        tracing::info!(phase, seconds = took.as_secs_f64(), "phase finished");
        self.0.push((phase, took));
        out
    }

    pub fn get(&self, phase: &str) -> Option<Duration> {
        self.0.iter().find(|(p, _)| *p == phase).map(|(_, d)| *d)
    }

    pub fn phases(&self) -> &[(&'static str, Duration)] {
        &self.0
    }
}

/// A loaded dataset: facts, every question split found on disk, and the
/// preprocessing resources.
#[derive(Debug)]
pub struct Dataset {
    pub store: FactStore,
    pub questions: BTreeMap<Split, Vec<Question>>,
    pub preprocessor: Preprocessor,
    pub diagnostics: Diagnostics,
}

impl Dataset {
    pub fn load(paths: &DataPaths, lemma_order: LemmaOrder) -> Result<Self> {
        let mut diag = Diagnostics::new();
        let store = load_tablestore(&paths.tables)?;
        let mut questions = BTreeMap::new();
        for split in Split::ALL {
            let file = paths.questions_file(split);
            if file.is_file() {
                let qs = load_questions(&file, split, &QuestionColumns::default(), &mut diag)?;
                resolve_gold(&qs, &store, &mut diag);
                questions.insert(split, qs);
            }
        }
        if questions.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no train.tsv, dev.tsv or test.tsv under {}",
                paths.questions.display()
            )));
        }
        let lemmas = load_lemmas(&paths.lemmas, lemma_order)?;
        if lemmas.duplicates() > 0 {
            diag.warn(
                WarningKind::DuplicateLemma,
                paths.lemmas.display().to_string(),
                format!("{} forms listed more than once; the last entry wins", lemmas.duplicates()),
            );
        }
        let stops = match &paths.stopwords {
            Some(p) => load_stopwords(p)?,
            None => StopwordSet::nltk_english(),
        };
        tracing::info!(
            facts = store.len(),
            splits = questions.len(),
            lemmas = lemmas.len(),
            stopwords = stops.len(),
            "dataset loaded"
        );
        Ok(Self {
            store,
            questions,
            preprocessor: Preprocessor::new(lemmas, stops),
            diagnostics: diag,
        })
    }

    pub fn split(&self, split: Split) -> Result<&[Question]> {
        self.questions
            .get(&split)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidConfig(format!("no questions file for split {split}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub tfidf: TfidfConfig,
    pub fit_corpus: FitCorpus,
}

impl From<&RunConfig> for EngineConfig {
    fn from(c: &RunConfig) -> Self {
        Self {
            tfidf: c.tfidf,
            fit_corpus: c.fit_corpus,
        }
    }
}

/// Fitted model, fact vectors and retrieval index over a [`Dataset`].
#[derive(Debug)]
pub struct Engine<'d> {
    data: &'d Dataset,
    model: TfidfModel,
    retriever: Retriever<'d>,
    fact_terms: Vec<TermSeq>,
    question_terms: BTreeMap<Split, Vec<TermSeq>>,
    timings: Timings,
}

impl<'d> Engine<'d> {
    pub fn build(data: &'d Dataset, cfg: EngineConfig, cache_dir: Option<&Path>) -> Result<Self> {
        let mut timings = Timings::default();
        let pre = &data.preprocessor;
        let (fact_terms, question_terms) = timings.time("preprocess", || {
            let facts: Vec<TermSeq> = data.store.facts().par_iter().map(|f| pre.preprocess(&f.text)).collect();
            let questions: BTreeMap<Split, Vec<TermSeq>> = data
                .questions
                .iter()
                .map(|(s, qs)| (*s, qs.par_iter().map(|q| pre.question_repr(q)).collect()))
                .collect();
            (facts, questions)
        });

        let model = timings.time("fit", || {
            let mut docs = fact_terms.clone();
            if cfg.fit_corpus == FitCorpus::FactsAndQuestions {
                docs.extend(question_terms.values().flatten().cloned());
            }
            TfidfModel::fit(&docs, cfg.tfidf)
        })?;

        let vectors = timings.time("transform", || match cache_dir {
            Some(dir) => match std::fs::create_dir_all(dir) {
                Ok(()) => VectorCache::new(dir).transform_all(&model, &fact_terms),
                Err(e) => {
                    tracing::warn!(dir = %dir.display(), error = %e, "cache directory unusable");
                    model.transform_all(&fact_terms)
                }
            },
            None => model.transform_all(&fact_terms),
        });
        let retriever = Retriever::new(&data.store, vectors)?;
        Ok(Self {
            data,
            model,
            retriever,
            fact_terms,
            question_terms,
            timings,
        })
    }

    pub fn model(&self) -> &TfidfModel {
        &self.model
    }

    pub fn retriever(&self) -> &Retriever<'d> {
        &self.retriever
    }

    pub fn timings(&self) -> &Timings {
        &self.timings
    }

    pub fn fact_terms(&self) -> &[TermSeq] {
        &self.fact_terms
    }

    pub fn question_terms(&self, split: Split) -> Option<&[TermSeq]> {
        self.question_terms.get(&split).map(Vec::as_slice)
    }

    fn query_vectors(&self, split: Split, diag: &mut Diagnostics) -> Result<Vec<SparseVector>> {
        let questions = self.data.split(split)?;
        let terms = &self.question_terms[&split];
        Ok(questions
            .iter()
            .zip(terms)
            .map(|(q, t)| {
                let v = self.model.transform(t);
                if v.is_empty() {
                    diag.warn(WarningKind::EmptyQueryVector, &q.qid, "no known query terms; ranking by uid");
                }
                v
            })
            .collect())
    }

    /// Ranks every question of `split`, in file order. Each ranking is
    /// checked to be a permutation of the store.
    pub fn rank(&mut self, split: Split, method: Method, iter: &IterConfig, diag: &mut Diagnostics) -> Result<Vec<Ranking>> {
        let questions = self.data.split(split)?;
        let queries = self.query_vectors(split, diag)?;
        let retriever = &self.retriever;
        let rankings: Vec<Ranking> = self.timings.time("rank", || {
            questions
                .par_iter()
                .zip(queries.par_iter())
                .map(|(q, v)| match method {
                    Method::Optimized => retriever.rank_optimized(&q.qid, v),
                    Method::Iterated => retriever.rank_iterated(&q.qid, v, iter),
                })
                .collect()
        });
        for r in &rankings {
            r.check_permutation(&self.data.store)?;
        }
        tracing::info!(split = %split, questions = rankings.len(), method = ?method, "ranked");
        Ok(rankings)
    }

    /// Iterated-ranker MAP for every config in `grid`, in grid order.
    pub fn sweep(&mut self, split: Split, grid: &[IterConfig], conv: MissingRank) -> Result<Vec<SweepPoint>> {
        let questions = self.data.split(split)?;
        let mut out = Vec::with_capacity(grid.len());
        for cfg in grid {
            let rankings = self.rank(split, Method::Iterated, cfg, &mut Diagnostics::new())?;
            let sub = Submission::from_rankings(rankings)?;
            let report = evaluate_submission(&sub, questions, conv, &mut Diagnostics::new());
            tracing::info!(maxlen = cfg.maxlen(), decay = cfg.decay(), downscale_base = cfg.downscale_base(), map = report.map, "sweep point");
            out.push(SweepPoint { iter: *cfg, map: report.map });
        }
        Ok(out)
    }

    /// Preprocessed text of every fact and question as JSON lines.
    pub fn write_export<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        for (f, terms) in self.data.store.iter().zip(&self.fact_terms) {
            let rec = ExportRecord::Fact {
                uid: f.uid.to_string(),
                table: f.table.clone(),
                text: f.text.clone(),
                terms: terms.clone(),
            };
            serde_json::to_writer(&mut *out, &rec)?;
            out.write_all(b"\n")?;
        }
        for (split, qs) in &self.data.questions {
            for (q, terms) in qs.iter().zip(&self.question_terms[split]) {
                let rec = ExportRecord::Question {
                    qid: q.qid.clone(),
                    split: *split,
                    question: q.question_text.clone(),
                    answer: q.correct_answer().map(str::to_owned),
                    terms: terms.clone(),
                    gold: q.gold.clone(),
                };
                serde_json::to_writer(&mut *out, &rec)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub iter: IterConfig,
    pub map: f64,
}

pub fn write_sweep<W: Write + ?Sized>(points: &[SweepPoint], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "maxlen\tdecay\tdownscale_base\tmap")?;
    for p in points {
        writeln!(out, "{}\t{}\t{}\t{:.6}", p.iter.maxlen(), p.iter.decay(), p.iter.downscale_base(), p.map)?;
    }
    Ok(())
}

/// One line of the preprocessed-corpus export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExportRecord {
    Fact {
        uid: String,
        table: String,
        text: String,
        terms: TermSeq,
    },
    Question {
        qid: String,
        split: Split,
        question: String,
        answer: Option<String>,
        terms: TermSeq,
        gold: Vec<GoldRef>,
    },
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check_same_questions(first: &Submission, other: &Submission) -> Result<()> {
    let (only_first, only_other) = first.question_difference(other);
    if only_first.is_empty() && only_other.is_empty() {
        Ok(())
    } else {
        Err(Error::QuestionSetMismatch { only_first, only_other })
    }
}

/// Rank-averages several submissions question by question, in the first
/// submission's question order.
pub fn ensemble_submissions(inputs: &[Submission]) -> Result<Submission> {
    let Some(first) = inputs.first() else {
        return Err(Error::InvalidConfig("nothing to ensemble".into()));
    };
    for other in &inputs[1..] {
        check_same_questions(first, other)?;
    }
    let fused = first
        .rankings()
        .iter()
        .map(|r| {
            let per_input: Vec<Ranking> = inputs
                .iter()
                .map(|s| s.get(&r.qid).expect("question sets checked").clone())
                .collect();
            ensemble_ranks(&per_input)
        })
        .collect::<Result<Vec<_>>>()?;
    Submission::from_rankings(fused)
}

/// Applies external scores to every question of `base`.
pub fn rerank_submission(base: &Submission, scores: &ScoreFile, top_n: usize, diag: &mut Diagnostics) -> Result<Submission> {
    let out = base
        .rankings()
        .iter()
        .map(|r| apply_external_scores(r, scores, top_n, diag))
        .collect::<Result<Vec<_>>>()?;
    Submission::from_rankings(out)
}
