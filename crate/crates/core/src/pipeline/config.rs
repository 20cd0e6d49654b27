use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{LemmaOrder, Split};
use crate::error::{Error, Result};
use crate::rankers::{IterConfig, DEFAULT_TOP_N};
use crate::tfidf::TfidfConfig;

/// Environment variable naming the dataset root.
pub const DATA_ENV: &str = "EXREGEN_DATA";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Optimized,
    #[default]
    Iterated,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimized" => Ok(Method::Optimized),
            "iterated" => Ok(Method::Iterated),
            _ => Err(Error::InvalidConfig(format!("unknown method {s:?}"))),
        }
    }
}

/// Documents the idf statistics are computed over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitCorpus {
    Facts,
    #[default]
    FactsAndQuestions,
}

/// Per-file overrides of the default dataset layout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathOverrides {
    pub tables: Option<PathBuf>,
    pub questions: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
}

/// Everything a ranking run needs. Loaded from TOML; every field has a
/// default, and command-line flags override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_root: Option<PathBuf>,
    pub paths: PathOverrides,
    pub lemma_order: LemmaOrder,
    pub method: Method,
    pub fit_corpus: FitCorpus,
    pub tfidf: TfidfConfig,
    pub iter: IterConfig,
    pub top_n: usize,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data_root: None,
            paths: PathOverrides::default(),
            lemma_order: LemmaOrder::default(),
            method: Method::default(),
            fit_corpus: FitCorpus::default(),
            tfidf: TfidfConfig::default(),
            iter: IterConfig::default(),
            top_n: DEFAULT_TOP_N,
            threads: None,
            cache_dir: None,
        }
    }
}

/// Resolved dataset locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPaths {
    pub tables: PathBuf,
    /// Directory holding `train.tsv`, `dev.tsv`, `test.tsv`.
    pub questions: PathBuf,
    pub lemmas: PathBuf,
    /// `None` selects the built-in English list.
    pub stopwords: Option<PathBuf>,
}

impl DataPaths {
    /// The standard layout under one root directory.
    pub fn under(root: &Path) -> Self {
        let stop = root.join("stopwords.txt");
        Self {
            tables: root.join("tables"),
            questions: root.join("questions"),
            lemmas: root.join("lemmatization-en.txt"),
            stopwords: stop.is_file().then_some(stop),
        }
    }

    pub fn questions_file(&self, split: Split) -> PathBuf {
        self.questions.join(format!("{split}.tsv"))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tables.is_dir() {
            return Err(Error::MissingPath { what: "tablestore directory", path: self.tables.clone() });
        }
        if !self.questions.is_dir() {
            return Err(Error::MissingPath { what: "questions directory", path: self.questions.clone() });
        }
        if !self.lemmas.is_file() {
            return Err(Error::MissingPath { what: "lemma file", path: self.lemmas.clone() });
        }
        if let Some(s) = &self.stopwords {
            if !s.is_file() {
                return Err(Error::MissingPath { what: "stopword file", path: s.clone() });
            }
        }
        Ok(())
    }
}

impl RunConfig {
    /// Parses TOML; relative paths are taken relative to `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        rebase(&mut cfg.data_root);
        rebase(&mut cfg.paths.tables);
        rebase(&mut cfg.paths.questions);
        rebase(&mut cfg.paths.lemmas);
        rebase(&mut cfg.paths.stopwords);
        rebase(&mut cfg.cache_dir);
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Range checks not already enforced by the field types.
    pub fn check(&self) -> Result<()> {
        if self.top_n == 0 {
            return Err(Error::InvalidConfig("top_n must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Dataset root from the config, else from `env_root` (normally the
    /// [`DATA_ENV`] variable), with per-file overrides applied.
    pub fn data_paths(&self, env_root: Option<PathBuf>) -> Result<DataPaths> {
        let root = self.data_root.clone().or(env_root);
        let p = &self.paths;
        let fallback = root.as_deref().map(DataPaths::under);
        let pick = |over: &Option<PathBuf>, def: Option<PathBuf>, what: &str| {
            over.clone().or(def).ok_or_else(|| {
                Error::InvalidConfig(format!("no {what} path: set data_root, {DATA_ENV} or paths.{what}"))
            })
        };
        let paths = DataPaths {
            tables: pick(&p.tables, fallback.as_ref().map(|d| d.tables.clone()), "tables")?,
            questions: pick(&p.questions, fallback.as_ref().map(|d| d.questions.clone()), "questions")?,
            lemmas: pick(&p.lemmas, fallback.as_ref().map(|d| d.lemmas.clone()), "lemmas")?,
            stopwords: p.stopwords.clone().or_else(|| fallback.and_then(|d| d.stopwords)),
        };
        paths.validate()?;
        Ok(paths)
    }
}
