use std::path::Path;

use exregen::corpus::{load_questions, QuestionColumns};
use exregen::diag::Diagnostics;
use exregen::eval::{comparison_table, evaluate_submission, EvalReport, MissingRank, Submission};
use exregen::fixture::{generate, FixtureSpec};
use exregen::io::write_atomic;
use exregen::pipeline::{
    ensemble_submissions, rerank_submission, with_threads, write_sweep, Dataset, Engine, EngineConfig, RunConfig,
    SweepPoint, Timings, DATA_ENV,
};
use exregen::rankers::{IterConfig, ScoreFile};
use exregen::{Error, Result};

use crate::{
    Command, DataArgs, EnsembleArgs, EvaluateArgs, ExportArgs, FixtureArgs, ModelArgs, RankArgs, RerankArgs,
    ReportArgs, SweepArgs,
};

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Rank(a) => rank(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Ensemble(a) => ensemble(a),
        Command::RerankApply(a) => rerank_apply(a),
        Command::GenFixture(a) => gen_fixture(a),
        Command::Report(a) => report(a),
        Command::Export(a) => export(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn env_root() -> Option<std::path::PathBuf> {
    std::env::var_os(DATA_ENV).filter(|v| !v.is_empty()).map(Into::into)
}

fn base_config(data: &DataArgs) -> Result<RunConfig> {
    let mut cfg = match &data.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &data.data {
        cfg.data_root = Some(d.clone());
    }
    let p = &mut cfg.paths;
    for (slot, flag) in [
        (&mut p.tables, &data.tables),
        (&mut p.questions, &data.questions),
        (&mut p.lemmas, &data.lemmas),
        (&mut p.stopwords, &data.stopwords),
    ] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    if let Some(o) = data.lemma_order {
        cfg.lemma_order = o.into();
    }
    Ok(cfg)
}

fn apply_model(cfg: &mut RunConfig, m: &ModelArgs) {
    if m.sublinear_tf {
        cfg.tfidf.sublinear_tf = true;
    }
    if m.no_smooth_idf {
        cfg.tfidf.smooth_idf = false;
    }
    if let Some(f) = m.fit_corpus {
        cfg.fit_corpus = f.into();
    }
    if m.threads.is_some() {
        cfg.threads = m.threads;
    }
    if m.cache_dir.is_some() {
        cfg.cache_dir.clone_from(&m.cache_dir);
    }
}

fn load_dataset(cfg: &RunConfig, timings: &mut Timings) -> Result<Dataset> {
    cfg.check()?;
    let paths = cfg.data_paths(env_root())?;
    timings.time("load", || Dataset::load(&paths, cfg.lemma_order))
}

fn finish_warnings(diag: &Diagnostics, path: Option<&Path>) -> Result<()> {
    if !diag.is_empty() {
        tracing::warn!(count = diag.len(), "warnings recorded");
    }
    if let Some(p) = path {
        diag.save_jsonl(p)?;
    }
    Ok(())
}

fn rank(a: RankArgs) -> Result<()> {
    let mut cfg = base_config(&a.data)?;
    apply_model(&mut cfg, &a.model);
    if let Some(m) = a.method {
        cfg.method = m.into();
    }
    let mut iter = cfg.iter;
    if let Some(n) = a.maxlen {
        iter = iter.with_maxlen(n)?;
    }
    if let Some(d) = a.decay {
        iter = iter.with_decay(d)?;
    }
    if let Some(b) = a.downscale_base {
        iter = iter.with_downscale_base(b)?;
    }
    cfg.iter = iter;

    let mut timings = Timings::default();
    let data = load_dataset(&cfg, &mut timings)?;
    let mut diag = data.diagnostics.clone();
    let rankings = with_threads(cfg.threads, || -> Result<_> {
        let mut engine = Engine::build(&data, EngineConfig::from(&cfg), cfg.cache_dir.as_deref())?;
        engine.rank(a.split, cfg.method, &cfg.iter, &mut diag)
    })??;
    let sub = Submission::from_rankings(rankings)?;
    timings.time("write", || sub.save(&a.out))?;
    tracing::info!(out = %a.out.display(), questions = sub.len(), facts = data.store.len(), "predictions written");
    finish_warnings(&diag, a.warnings.as_deref())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut diag = Diagnostics::new();
    let gold_file = match &a.gold {
        Some(g) => g.clone(),
        None => {
            let cfg = base_config(&a.data)?;
            let root = cfg.data_root.clone().or_else(env_root);
            let dir = cfg
                .paths
                .questions
                .clone()
                .or_else(|| root.map(|r| r.join("questions")))
                .ok_or_else(|| Error::InvalidConfig(format!("no gold: pass --gold, --data or set {DATA_ENV}")))?;
            dir.join(format!("{}.tsv", a.split))
        }
    };
    if !gold_file.is_file() {
        return Err(Error::MissingPath { what: "gold file", path: gold_file });
    }
    let mut timings = Timings::default();
    let questions = load_questions(&gold_file, a.split, &QuestionColumns::default(), &mut diag)?;
    let sub = Submission::load(&a.predictions, &mut diag)?;
    let conv = if a.legacy_zero { MissingRank::ZeroQuestion } else { MissingRank::Billion };
    let report = timings.time("evaluate", || evaluate_submission(&sub, &questions, conv, &mut diag));
    let written = report.save(&a.out_dir)?;
    print!("{}", report.to_table());
    for p in written {
        tracing::info!(file = %p.display(), "written");
    }
    finish_warnings(&diag, a.warnings.as_deref())
}

fn ensemble(a: EnsembleArgs) -> Result<()> {
    let mut diag = Diagnostics::new();
    let inputs = a
        .inputs
        .iter()
        .map(|p| Submission::load(p, &mut diag))
        .collect::<Result<Vec<_>>>()?;
    let fused = ensemble_submissions(&inputs)?;
    fused.save(&a.out)?;
    tracing::info!(out = %a.out.display(), inputs = inputs.len(), questions = fused.len(), "ensemble written");
    finish_warnings(&diag, None)
}

fn rerank_apply(a: RerankArgs) -> Result<()> {
    let mut diag = Diagnostics::new();
    let base = Submission::load(&a.base, &mut diag)?;
    let scores = ScoreFile::load(&a.scores)?;
    let out = rerank_submission(&base, &scores, a.top_n, &mut diag)?;
    out.save(&a.out)?;
    tracing::info!(out = %a.out.display(), questions = out.len(), top_n = a.top_n, "re-ranked predictions written");
    finish_warnings(&diag, a.warnings.as_deref())
}

fn gen_fixture(a: FixtureArgs) -> Result<()> {
    let spec = FixtureSpec {
        questions: a.questions,
        facts: a.facts,
        hops: a.hops,
        min_hops: a.min_hops,
        vocab_size: a.vocab_size,
        distractors: a.distractors,
        seed: a.seed,
    };
    let fixture = generate(&spec)?;
    fixture.write(&a.out)?;
    tracing::info!(out = %a.out.display(), files = fixture.files.len(), "fixture written");
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let reports = a
        .reports
        .iter()
        .map(|p| {
            let label = p
                .parent()
                .and_then(|d| d.file_name())
                .or_else(|| p.file_stem())
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            EvalReport::load(p).map(|r| (label, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = comparison_table(&reports);
    match &a.out {
        Some(p) => write_atomic(p, |w| w.write_all(table.as_bytes())),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn export(a: ExportArgs) -> Result<()> {
    let cfg = base_config(&a.data)?;
    let mut timings = Timings::default();
    let data = load_dataset(&cfg, &mut timings)?;
    let engine = Engine::build(&data, EngineConfig::from(&cfg), None)?;
    write_atomic(&a.out, |w| engine.write_export(w))?;
    tracing::info!(out = %a.out.display(), "export written");
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let mut cfg = base_config(&a.data)?;
    apply_model(&mut cfg, &a.model);
    let mut grid = Vec::new();
    for &maxlen in &a.maxlen {
        for &base in &a.downscale_base {
            for &decay in &a.decay {
                grid.push(IterConfig::new(maxlen, decay, base)?);
            }
        }
    }
    let mut timings = Timings::default();
    let data = load_dataset(&cfg, &mut timings)?;
    let points = with_threads(cfg.threads, || -> Result<_> {
        let mut engine = Engine::build(&data, EngineConfig::from(&cfg), cfg.cache_dir.as_deref())?;
        engine.sweep(a.split, &grid, MissingRank::Billion)
    })??;
    write_atomic(&a.out, |w| write_sweep(&points, w))?;
    let best = points.iter().fold(None, |best: Option<&SweepPoint>, p| match best {
        Some(b) if b.map >= p.map => Some(b),
        _ => Some(p),
    });
    if let Some(best) = best {
        println!(
            "best: maxlen={} decay={} downscale_base={} MAP={:.4}",
            best.iter.maxlen(),
            best.iter.decay(),
            best.iter.downscale_base(),
            best.map
        );
    }
    Ok(())
}
