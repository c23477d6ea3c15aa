//! Client for an OpenAI-style embeddings endpoint.
//!
//! Request: `POST {"model": ..., "input": [texts]}` with a bearer token.
//! Response: `{"data": [{"index": i, "embedding": [floats]}, ...]}`.
//! Every vector is cached by (model, SHA-256 of the text); only texts
//! missing from the cache are requested, each distinct text once.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use divsamp_core::rng::SplitMix64;
use divsamp_core::{Matrix, TextDataset};
use serde::Deserialize;

use super::cache::{text_hash, EmbeddingCache};
use super::EmbeddingMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_MODEL: &str = "text-embedding-3-small";
pub const DEFAULT_API_KEY_ENV: &str = "DIVSAMP_API_KEY";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/embeddings";

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteEmbedderConfig {
    pub endpoint_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub batch_size: usize,
    pub max_retries: usize,
    pub cache_dir: PathBuf,
    /// Upper bound on batches in flight at once.
    pub concurrency: usize,
    pub timeout: Duration,
    /// First retry delay; doubles per attempt, plus up to 100% jitter.
    pub initial_backoff: Duration,
}

impl Default for RemoteEmbedderConfig {
    fn default() -> Self {
        Self {
            endpoint_url: DEFAULT_ENDPOINT.into(),
            model_name: DEFAULT_MODEL.into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            batch_size: 64,
            max_retries: 5,
            cache_dir: PathBuf::from(".divsamp-cache"),
            concurrency: 4,
            timeout: Duration::from_secs(60),
            initial_backoff: Duration::from_millis(500),
        }
    }
}

#[derive(Deserialize)]
struct ResponseBody {
    data: Vec<ResponseItem>,
}

#[derive(Deserialize)]
struct ResponseItem {
    index: usize,
    embedding: Vec<f64>,
}

enum Attempt {
    Retry(String),
    Fatal(Error),
}

pub struct RemoteEmbedder {
    config: RemoteEmbedderConfig,
    cache: EmbeddingCache,
    agent: ureq::Agent,
    requests: AtomicUsize,
}

impl RemoteEmbedder {
    pub fn new(config: RemoteEmbedderConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let cache = EmbeddingCache::new(&config.cache_dir);
        Self { config, cache, agent, requests: AtomicUsize::new(0) }
    }

    /// HTTP requests issued so far, retries included.
    pub fn requests_made(&self) -> usize {
        self.requests.load(Ordering::Relaxed)
    }

    pub fn cache(&self) -> &EmbeddingCache {
        &self.cache
    }

    pub fn embed(&self, data: &TextDataset) -> Result<EmbeddingMatrix> {
        let model = &self.config.model_name;
        let hashes: Vec<String> = data.rows.iter().map(|t| text_hash(t)).collect();
        let mut vectors: HashMap<&str, Vec<f64>> = HashMap::new();
        let mut missing: Vec<(&str, &str)> = Vec::new();
        for (text, hash) in data.rows.iter().zip(&hashes) {
            if vectors.contains_key(hash.as_str()) || missing.iter().any(|(h, _)| h == hash) {
                continue;
            }
            match self.cache.get(model, hash)? {
                Some(v) => {
                    vectors.insert(hash, v);
                }
                None => missing.push((hash, text)),
            }
        }

        if !missing.is_empty() {
            let key = std::env::var(&self.config.api_key_env)
                .map_err(|_| Error::MissingApiKey(self.config.api_key_env.clone()))?;
            let batches: Vec<&[(&str, &str)]> = missing.chunks(self.config.batch_size.max(1)).collect();
            for group in batches.chunks(self.config.concurrency.max(1)) {
                let results: Vec<Result<Vec<Vec<f64>>>> = std::thread::scope(|s| {
                    let handles: Vec<_> = group
                        .iter()
                        .enumerate()
                        .map(|(b, batch)| {
                            let key = &key;
                            s.spawn(move || {
                                let texts: Vec<&str> = batch.iter().map(|(_, t)| *t).collect();
                                self.request_with_retries(key, &texts, b as u64)
                            })
                        })
                        .collect();
                    handles.into_iter().map(|h| h.join().expect("embedding worker panicked")).collect()
                });
                for (batch, result) in group.iter().zip(results) {
                    for ((hash, _), v) in batch.iter().zip(result?) {
                        self.cache.put(model, hash, &v)?;
                        vectors.insert(hash, v);
                    }
                }
            }
        }

        let dim = vectors.get(hashes[0].as_str()).map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(hashes.len() * dim);
        for h in &hashes {
            let v = &vectors[h.as_str()];
            if v.len() != dim {
                return Err(Error::EmbeddingDimension { expected: dim, got: v.len() });
            }
            flat.extend_from_slice(v);
        }
        let values = Matrix::from_vec(hashes.len(), dim, flat)?;
        values.check_finite()?;
        Ok(EmbeddingMatrix { values, embedder_id: format!("remote:{model}") })
    }

    fn request_with_retries(&self, key: &str, texts: &[&str], salt: u64) -> Result<Vec<Vec<f64>>> {
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64);
        let mut jitter = SplitMix64::new(now ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let attempts = self.config.max_retries + 1;
        let mut last = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                let base = self.config.initial_backoff.saturating_mul(1 << (attempt - 1).min(16));
                std::thread::sleep(base.mul_f64(1.0 + jitter.next_f64()));
            }
            match self.request(key, texts) {
                Ok(v) => return Ok(v),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => {
                    log::warn!("embedding request attempt {} failed: {msg}", attempt + 1);
                    last = msg;
                }
            }
        }
        Err(Error::Network { attempts, message: last })
    }

    fn request(&self, key: &str, texts: &[&str]) -> std::result::Result<Vec<Vec<f64>>, Attempt> {
        self.requests.fetch_add(1, Ordering::Relaxed);
        let body = serde_json::json!({ "model": self.config.model_name, "input": texts }).to_string();
        let mut response = self
            .agent
            .post(&self.config.endpoint_url)
            .header("Authorization", &format!("Bearer {key}"))
            .header("Content-Type", "application/json")
            .send(&body)
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| Attempt::Retry(e.to_string()))?;
        if status == 429 || status >= 500 {
            return Err(Attempt::Retry(format!("HTTP {status}: {text}")));
        }
        if !(200..300).contains(&status) {
            return Err(Attempt::Fatal(Error::Http { status, body: text }));
        }
        parse_response(&text, texts.len()).map_err(Attempt::Fatal)
    }
}

/// Orders response items by `index` and checks count and dimensions.
fn parse_response(text: &str, expected: usize) -> Result<Vec<Vec<f64>>> {
    let body: ResponseBody = serde_json::from_str(text).map_err(|e| Error::Response(e.to_string()))?;
    if body.data.len() != expected {
        return Err(Error::Response(format!("{} embeddings for {expected} inputs", body.data.len())));
    }
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; expected];
    for item in body.data {
        let slot = slots
            .get_mut(item.index)
            .ok_or_else(|| Error::Response(format!("index {} out of range", item.index)))?;
        if slot.replace(item.embedding).is_some() {
            return Err(Error::Response(format!("index {} repeated", item.index)));
        }
    }
    let out: Vec<Vec<f64>> = slots.into_iter().map(|s| s.expect("every slot filled")).collect();
    let dim = out[0].len();
    if dim == 0 {
        return Err(Error::Response("empty embedding".into()));
    }
    if let Some(bad) = out.iter().find(|v| v.len() != dim) {
        return Err(Error::EmbeddingDimension { expected: dim, got: bad.len() });
    }
    Ok(out)
}

pub fn embed_remote(data: &TextDataset, config: &RemoteEmbedderConfig) -> Result<EmbeddingMatrix> {
    RemoteEmbedder::new(config.clone()).embed(data)
}
