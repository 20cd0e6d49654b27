use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{EvalReport, MissingRank};
use crate::error::{Error, Result};
use crate::io::OutputBatch;

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TABLE: &str = "report.txt";
pub const LENGTH_CSV: &str = "map_by_length.csv";

impl EvalReport {
    pub fn write_json<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        out.write_all(b"\n")
    }

    /// `gold_length,n_questions,map` rows, one per non-empty bucket.
    pub fn write_length_csv<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "gold_length,n_questions,map")?;
        for (len, b) in &self.length_map {
            writeln!(out, "{len},{},{:.6}", b.n_questions, b.map)?;
        }
        Ok(())
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let conv = match self.convention {
            MissingRank::Billion => "missing facts at rank 1e9",
            MissingRank::ZeroQuestion => "legacy: missing fact zeroes the question",
        };
        let _ = writeln!(s, "MAP {:.4} over {} questions ({conv})", self.map, self.n_questions);
        if !self.missing_predictions.is_empty() {
            let _ = writeln!(s, "questions without predictions: {}", self.missing_predictions.len());
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(s, "questions skipped (no gold): {}", self.skipped.len());
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<14}{:>10}{:>10}", "role", "questions", "MAP");
        for (role, b) in &self.role_map {
            let _ = writeln!(s, "{:<14}{:>10}{:>10.4}", role.as_str(), b.n_questions, b.map);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<14}{:>10}{:>10}", "gold length", "questions", "MAP");
        for (len, b) in &self.length_map {
            let _ = writeln!(s, "{:<14}{:>10}{:>10.4}", len, b.n_questions, b.map);
        }
        s
    }

    /// Writes the JSON report, the text table and the length CSV into `dir`
    /// together; on failure none of them is left behind.
    pub fn save(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths: Vec<PathBuf> = [REPORT_JSON, REPORT_TABLE, LENGTH_CSV].iter().map(|f| dir.join(f)).collect();
        let mut batch = OutputBatch::new();
        batch.stage(&paths[0], |w| self.write_json(w))?;
        batch.stage(&paths[1], |w| w.write_all(self.to_table().as_bytes()))?;
        batch.stage(&paths[2], |w| self.write_length_csv(w))?;
        batch.commit()?;
        Ok(paths)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&crate::io::read_to_string(path)?)?)
    }
}

/// Side-by-side overall and per-role MAP for several labelled reports.
pub fn comparison_table(reports: &[(String, EvalReport)]) -> String {
    let mut roles: Vec<_> = reports.iter().flat_map(|(_, r)| r.role_map.keys().cloned()).collect();
    roles.sort();
    roles.dedup();
    let width = reports.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(8) + 2;

    let mut s = String::new();
    let _ = write!(s, "{:<14}", "");
    for (label, _) in reports {
        let _ = write!(s, "{label:>width$}");
    }
    let _ = writeln!(s);
    let _ = write!(s, "{:<14}", "MAP");
    for (_, r) in reports {
        let _ = write!(s, "{:>width$.4}", r.map);
    }
    let _ = writeln!(s);
    for role in roles {
        let _ = write!(s, "{:<14}", role.as_str());
        for (_, r) in reports {
            match r.role_map.get(&role) {
                Some(b) => {
                    let _ = write!(s, "{:>width$.4}", b.map);
                }
                None => {
                    let _ = write!(s, "{:>width$}", "-");
                }
            }
        }
        let _ = writeln!(s);
    }
    s
}
