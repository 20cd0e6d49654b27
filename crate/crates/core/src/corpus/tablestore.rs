use std::fs;
use std::path::{Path, PathBuf};

use super::{Fact, FactStore, StoreBuilder};
use crate::error::{Error, Result};

const SKIP_TAG: &str = "[SKIP]";

fn is_uid_header(h: &str) -> bool {
    h.split(|c: char| !c.is_alphanumeric())
        .any(|tok| tok.eq_ignore_ascii_case("uid"))
}

fn is_content_header(h: &str) -> bool {
    let h = h.trim_start();
    !(h.len() >= SKIP_TAG.len() && h[..SKIP_TAG.len()].eq_ignore_ascii_case(SKIP_TAG))
}

/// Cell text for retrieval: alternation markers become plain spaces and
/// runs of whitespace collapse.
fn clean_cell(cell: &str) -> String {
    cell.replace(';', " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

fn table_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_tsv = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("tsv"));
        if is_tsv && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn load_table(path: &Path, builder: &mut StoreBuilder) -> Result<()> {
    let text = crate::io::read_to_string(path)?;
    let table = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_owned();

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let Some((_, header)) = lines.next() else {
        return Ok(());
    };
    let headers: Vec<&str> = header.split('\t').collect();
    let uid_col = headers
        .iter()
        .position(|h| is_uid_header(h))
        .ok_or_else(|| Error::MissingUidColumn {
            file: path.to_path_buf(),
        })?;
    let content_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != uid_col && is_content_header(headers[i]))
        .collect();

    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split('\t').collect();
        let uid = cells.get(uid_col).map(|s| s.trim()).unwrap_or_default();
        if uid.is_empty() {
            return Err(Error::parse(path, line_no, "row has no uid"));
        }
        let text = content_cols
            .iter()
            .filter_map(|&i| cells.get(i))
            .map(|c| clean_cell(c))
            .filter(|c| !c.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        if text.is_empty() {
            return Err(Error::EmptyFactText {
                file: path.to_path_buf(),
                line: line_no,
            });
        }
        let fact = Fact {
            uid: uid.into(),
            table: table.clone(),
            text,
        };
        builder.push(fact, format!("{}:{}", path.display(), line_no))?;
    }
    Ok(())
}

/// Reads every `*.tsv` table in `dir` (sorted by file name) into a store.
///
/// The column whose header contains the token `UID` supplies the id; columns
/// tagged `[SKIP]` are left out of the text; the remaining non-empty cells are
/// joined with spaces in header order.
pub fn load_tablestore(dir: &Path) -> Result<FactStore> {
    let mut builder = StoreBuilder::new();
    for file in table_files(dir)? {
        load_table(&file, &mut builder)?;
    }
    builder.finish(dir)
}
