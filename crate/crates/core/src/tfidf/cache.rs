use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{SparseVector, TfidfModel};
use crate::textproc::TermSeq;

const MAGIC: &[u8; 8] = b"EXRVEC01";

/// On-disk cache of transformed document vectors, keyed by a SHA-256 over the
/// fitted model and the documents. Unreadable or mismatched entries are
/// treated as misses.
#[derive(Debug, Clone)]
pub struct VectorCache {
    dir: PathBuf,
}

impl VectorCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn key(model: &TfidfModel, docs: &[TermSeq]) -> String {
        let mut h = Sha256::new();
        h.update(model.fingerprint());
        for d in docs {
            for t in d.iter() {
                h.update(t.as_bytes());
                h.update([0x1f]);
            }
            h.update([0x1e]);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.vec"))
    }

    /// Transforms `docs`, reusing a cached result when one exists.
    pub fn transform_all(&self, model: &TfidfModel, docs: &[TermSeq]) -> Vec<SparseVector> {
        let key = Self::key(model, docs);
        let path = self.path(&key);
        if let Some(v) = read(&path).filter(|v| v.len() == docs.len()) {
            tracing::debug!(key = %key, "vector cache hit");
            return v;
        }
        let vectors = model.transform_all(docs);
        if let Err(e) = self.write(&path, &vectors) {
            tracing::debug!(error = %e, "vector cache not written");
        }
        vectors
    }

    fn write(&self, path: &Path, vectors: &[SparseVector]) -> crate::error::Result<()> {
        crate::io::write_atomic(path, |w| {
            w.write_all(MAGIC)?;
            w.write_all(&(vectors.len() as u64).to_le_bytes())?;
            for v in vectors {
                w.write_all(&(v.len() as u32).to_le_bytes())?;
                for (id, wt) in v.iter() {
                    w.write_all(&id.to_le_bytes())?;
                    w.write_all(&wt.to_le_bytes())?;
                }
            }
            Ok(())
        })
    }
}

fn take<'a>(buf: &mut &'a [u8], n: usize) -> Option<&'a [u8]> {
    if buf.len() < n {
        return None;
    }
    let (head, tail) = buf.split_at(n);
    *buf = tail;
    Some(head)
}

fn read(path: &Path) -> Option<Vec<SparseVector>> {
    let bytes = fs::read(path).ok()?;
    let mut buf = bytes.as_slice();
    if take(&mut buf, 8)? != MAGIC {
        return None;
    }
    let n = u64::from_le_bytes(take(&mut buf, 8)?.try_into().ok()?) as usize;
    let mut out = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let len = u32::from_le_bytes(take(&mut buf, 4)?.try_into().ok()?) as usize;
        let mut ids = Vec::with_capacity(len);
        let mut weights = Vec::with_capacity(len);
        for _ in 0..len {
            ids.push(u32::from_le_bytes(take(&mut buf, 4)?.try_into().ok()?));
            weights.push(f64::from_le_bytes(take(&mut buf, 8)?.try_into().ok()?));
        }
        if !ids.windows(2).all(|w| w[0] < w[1]) || !weights.iter().all(|&w| w > 0.0 && w.is_finite()) {
            return None;
        }
        out.push(SparseVector::from_sorted(ids, weights));
    }
    buf.is_empty().then_some(out)
}
