//! On-disk embedding cache.
//!
//! Layout: `<root>/<model>/<sha256>.vec` holds the vector as little-endian
//! `f64`s and `<root>/<model>/<sha256>.meta.json` records
//! `{"model", "dim", "hash"}`. Files are written to a temporary name and
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct Meta {
    model: String,
    dim: usize,
    hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub entries: usize,
    pub bytes: u64,
    /// (model directory, entry count), sorted by name.
    pub models: Vec<(String, usize)>,
}

#[derive(Debug, Clone)]
pub struct EmbeddingCache {
    root: PathBuf,
}

/// Hex SHA-256 of a text, the cache key within a model directory.
pub fn text_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Model names become directory names; anything outside `[A-Za-z0-9._-]` is
/// replaced by `_`.
fn model_dir_name(model: &str) -> String {
    model.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect()
}

impl EmbeddingCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn model_dir(&self, model: &str) -> PathBuf {
        self.root.join(model_dir_name(model))
    }

    fn vec_path(&self, model: &str, hash: &str) -> PathBuf {
        self.model_dir(model).join(format!("{hash}.vec"))
    }

    pub fn get(&self, model: &str, hash: &str) -> Result<Option<Vec<f64>>> {
        let path = self.vec_path(model, hash);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        if bytes.len() % 8 != 0 || bytes.is_empty() {
            return Err(Error::Cache { path, message: format!("{} bytes is not a whole f64 array", bytes.len()) });
        }
        let values: Vec<f64> =
            bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
        let meta_path = self.model_dir(model).join(format!("{hash}.meta.json"));
        if let Ok(text) = fs::read_to_string(&meta_path) {
            let meta: Meta = serde_json::from_str(&text)
                .map_err(|e| Error::Cache { path: meta_path.clone(), message: e.to_string() })?;
            if meta.dim != values.len() || meta.hash != hash {
                return Err(Error::Cache { path, message: "sidecar does not match vector".into() });
            }
        }
        Ok(Some(values))
    }

    pub fn put(&self, model: &str, hash: &str, vector: &[f64]) -> Result<()> {
        let dir = self.model_dir(model);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let bytes: Vec<u8> = vector.iter().flat_map(|v| v.to_le_bytes()).collect();
        let meta = Meta { model: model.into(), dim: vector.len(), hash: hash.into() };
        let meta_json = serde_json::to_vec(&meta).expect("meta serializes");
        // sidecar first so a present .vec always has a matching description
        write_atomic(&dir, &dir.join(format!("{hash}.meta.json")), &meta_json)?;
        write_atomic(&dir, &dir.join(format!("{hash}.vec")), &bytes)
    }

    pub fn stats(&self) -> Result<CacheStats> {
        let mut stats = CacheStats::default();
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(stats),
            Err(e) => return Err(Error::io(&self.root, e)),
        };
        let mut models = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            if !entry.path().is_dir() {
                continue;
            }
            let mut count = 0;
            for file in fs::read_dir(entry.path()).map_err(|e| Error::io(entry.path(), e))? {
                let file = file.map_err(|e| Error::io(entry.path(), e))?;
                let path = file.path();
                if path.extension().is_some_and(|e| e == "vec") {
                    count += 1;
                }
                stats.bytes += file.metadata().map(|m| m.len()).unwrap_or(0);
            }
            stats.entries += count;
            models.push((entry.file_name().to_string_lossy().into_owned(), count));
        }
        models.sort();
        stats.models = models;
        Ok(stats)
    }

    /// Removes all entries, or only one model's entries. Returns the number
    /// of vectors removed.
    pub fn clear(&self, model: Option<&str>) -> Result<usize> {
        let before = self.stats()?;
        match model {
            Some(m) => {
                let dir = self.model_dir(m);
                let removed = before.models.iter().find(|(name, _)| *name == model_dir_name(m)).map_or(0, |e| e.1);
                if dir.exists() {
                    fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                }
                Ok(removed)
            }
            None => {
                for (name, _) in &before.models {
                    let dir = self.root.join(name);
                    fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                }
                Ok(before.entries)
            }
        }
    }
}

fn write_atomic(dir: &Path, dest: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(dest).map_err(|e| Error::io(dest, e.error))?;
    Ok(())
}
