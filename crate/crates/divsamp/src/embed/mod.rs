//! Text to dense embeddings: local TF-IDF or a remote embeddings service.

mod cache;
mod remote;

use divsamp_core::tfidf::{self, TfidfConfig};
use divsamp_core::{Matrix, TextDataset};

pub use cache::{text_hash, CacheStats, EmbeddingCache};
pub use remote::{embed_remote, RemoteEmbedder, RemoteEmbedderConfig, DEFAULT_API_KEY_ENV, DEFAULT_MODEL};

use crate::error::Result;

/// One embedding row per dataset row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub values: Matrix,
    pub embedder_id: String,
}

pub fn tfidf_fit_transform(data: &TextDataset, config: &TfidfConfig) -> Result<EmbeddingMatrix> {
    let (_, values) = tfidf::fit_transform(&data.rows, config)?;
    Ok(EmbeddingMatrix { values, embedder_id: "tfidf".into() })
}

#[derive(Debug, Clone)]
pub enum EmbedderKind {
    Tfidf(TfidfConfig),
    Remote(RemoteEmbedderConfig),
}

/// An embedder plus post-processing options.
#[derive(Debug, Clone)]
pub struct Embedder {
    pub kind: EmbedderKind,
    /// L2-normalize every row after embedding.
    pub normalize: bool,
}

impl Embedder {
    pub fn tfidf(config: TfidfConfig) -> Self {
        Self { kind: EmbedderKind::Tfidf(config), normalize: false }
    }

    pub fn remote(config: RemoteEmbedderConfig) -> Self {
        Self { kind: EmbedderKind::Remote(config), normalize: false }
    }

    pub fn id(&self) -> String {
        match &self.kind {
            EmbedderKind::Tfidf(_) => "tfidf".into(),
            EmbedderKind::Remote(c) => format!("remote:{}", c.model_name),
        }
    }

    pub fn embed(&self, data: &TextDataset) -> Result<EmbeddingMatrix> {
        let mut m = match &self.kind {
            EmbedderKind::Tfidf(c) => tfidf_fit_transform(data, c)?,
            EmbedderKind::Remote(c) => embed_remote(data, c)?,
        };
        if self.normalize {
            m.values.normalize_rows();
        }
        Ok(m)
    }
}

/// Embedder ids accepted on the command line.
pub const EMBEDDER_IDS: [&str; 2] = ["tfidf", "remote"];
