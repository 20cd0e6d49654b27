mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exregen::corpus::{LemmaOrder, Split};
use exregen::pipeline::{FitCorpus, Method};
use tracing_subscriber::EnvFilter;

/// Retrieval and evaluation of ranked explanation facts for science questions.
#[derive(Debug, Parser)]
#[command(name = "exregen", version)]
struct Cli {
    /// Log filter, e.g. `info` or `exregen=debug`. Logs go to stderr.
    #[arg(long, global = true, default_value = "info")]
    log: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank every fact for each question of a split.
    Rank(RankArgs),
    /// Score a prediction file against gold explanations.
    Evaluate(EvaluateArgs),
    /// Fuse prediction files by mean rank.
    Ensemble(EnsembleArgs),
    /// Reorder the head of each ranking by an external score file.
    RerankApply(RerankArgs),
    /// Write a synthetic dataset with planted multi-hop chains.
    GenFixture(FixtureArgs),
    /// Compare saved evaluation reports side by side.
    Report(ReportArgs),
    /// Dump preprocessed facts and questions as JSON lines.
    Export(ExportArgs),
    /// Evaluate the iterated ranker over a grid of decay settings.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Optimized,
    Iterated,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Optimized => Method::Optimized,
            MethodArg::Iterated => Method::Iterated,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitArg {
    Facts,
    FactsAndQuestions,
}

impl From<FitArg> for FitCorpus {
    fn from(f: FitArg) -> Self {
        match f {
            FitArg::Facts => FitCorpus::Facts,
            FitArg::FactsAndQuestions => FitCorpus::FactsAndQuestions,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LemmaOrderArg {
    FormFirst,
    LemmaFirst,
}

impl From<LemmaOrderArg> for LemmaOrder {
    fn from(o: LemmaOrderArg) -> Self {
        match o {
            LemmaOrderArg::FormFirst => LemmaOrder::FormFirst,
            LemmaOrderArg::LemmaFirst => LemmaOrder::LemmaFirst,
        }
    }
}

/// Dataset location and preprocessing. Flags win over the config file,
/// which wins over the EXREGEN_DATA environment variable.
#[derive(Debug, Clone, Args)]
struct DataArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset root holding tables/, questions/ and lemmatization-en.txt.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Directory holding train.tsv, dev.tsv and test.tsv.
    #[arg(long)]
    questions: Option<PathBuf>,
    #[arg(long)]
    lemmas: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, value_enum)]
    lemma_order: Option<LemmaOrderArg>,
}

/// TF-IDF weighting and parallelism.
#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Use 1 + ln(tf) instead of raw counts.
    #[arg(long)]
    sublinear_tf: bool,
    /// Use ln(N/df) + 1 instead of the smoothed idf.
    #[arg(long)]
    no_smooth_idf: bool,
    #[arg(long, value_enum)]
    fit_corpus: Option<FitArg>,
    /// Worker threads for ranking (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for cached fact vectors.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "dev")]
    split: Split,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    maxlen: Option<usize>,
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    downscale_base: Option<f64>,
    /// Prediction file to write (qid<TAB>uid rows).
    #[arg(long)]
    out: PathBuf,
    /// Also write ingestion and ranking warnings as JSON lines.
    #[arg(long)]
    warnings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Prediction file (qid<TAB>uid rows).
    #[arg(long)]
    predictions: PathBuf,
    /// Questions file with gold explanations; otherwise taken from the dataset.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "dev")]
    split: Split,
    /// Score a question 0 when any gold fact is missing (older convention).
    #[arg(long)]
    legacy_zero: bool,
    /// Directory for report.json, report.txt and map_by_length.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    warnings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    /// Prediction files to fuse.
    #[arg(required = true, num_args = 2..)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RerankArgs {
    /// Base prediction file.
    #[arg(long)]
    base: PathBuf,
    /// Score file with header qid<TAB>uid<TAB>score.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long, default_value_t = exregen::rankers::DEFAULT_TOP_N)]
    top_n: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    warnings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    questions: usize,
    #[arg(long, default_value_t = 50)]
    facts: usize,
    /// Longest gold chain.
    #[arg(long, default_value_t = 3)]
    hops: usize,
    /// Shortest gold chain (default: same as --hops).
    #[arg(long)]
    min_hops: Option<usize>,
    #[arg(long, default_value_t = 400)]
    vocab_size: usize,
    /// Non-gold facts per question that share a question term.
    #[arg(long, default_value_t = 2)]
    distractors: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// report.json files; each column is labelled with its parent directory.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "dev")]
    split: Split,
    #[arg(long, value_delimiter = ',', default_value = "0.6,0.7,0.8,0.9,1.0")]
    decay: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    downscale_base: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "128")]
    maxlen: Vec<usize>,
    /// TSV of maxlen, decay, downscale_base and MAP.
    #[arg(long)]
    out: PathBuf,
}

fn init_logging(filter: &str) {
    let filter = EnvFilter::try_new(filter).unwrap_or_else(|_| EnvFilter::new("info"));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .with_ansi(std::io::IsTerminal::is_terminal(&std::io::stderr()))
        .with_target(false)
        .try_init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(&cli.log);
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
