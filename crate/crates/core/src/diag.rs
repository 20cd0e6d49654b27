//! Non-fatal ingestion and ranking warnings.
//!
//! Warnings are collected rather than logged so that callers can count them,
//! assert on them in tests, and dump them as a JSON-lines report.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    UnknownAnswerKey,
    MalformedGoldPair,
    UnresolvedGoldUid,
    DuplicateLemma,
    MissingCorrectAnswer,
    EmptyQueryVector,
    EmptyGold,
    MissingGold,
    MissingPrediction,
    TopNClamped,
    DuplicatePrediction,
}

impl fmt::Display for WarningKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        f.write_str(&s)
    }
}

/// One warning line: `{"kind": ..., "file": ..., "detail": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub file: String,
    pub detail: String,
}

#[derive(Debug, Default, Clone)]
pub struct Diagnostics {
    warnings: Vec<Warning>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn warn(&mut self, kind: WarningKind, file: impl Into<String>, detail: impl Into<String>) {
        let w = Warning {
            kind,
            file: file.into(),
            detail: detail.into(),
        };
        tracing::debug!(kind = %w.kind, file = %w.file, "{}", w.detail);
        self.warnings.push(w);
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.warnings.extend(other.warnings);
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn count(&self, kind: WarningKind) -> usize {
        self.warnings.iter().filter(|w| w.kind == kind).count()
    }

    pub fn is_empty(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.warnings.len()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for w in &self.warnings {
            serde_json::to_writer(&mut out, w)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, |w| self.write_jsonl(w))
    }
}
