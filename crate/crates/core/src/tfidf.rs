//! TF-IDF vectorizer with document-frequency filtering.
//!
//! Tokens are maximal runs of alphanumeric characters with at least two
//! characters, optionally lowercased, minus stop words. A term is kept when
//! `min_df <= df <= ceil(max_df * N)`. Weights are raw count times
//! `ln((1 + N) / (1 + df)) + 1`, and every nonzero row is scaled to unit
//! Euclidean norm. Columns are the kept terms in lexicographic order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const ENGLISH_STOP_WORDS: &str = include_str!("../data/stop_words_en.txt");

/// The 318-word English stop-word list shipped with the crate.
pub fn english_stop_words() -> BTreeSet<String> {
    ENGLISH_STOP_WORDS.lines().map(str::trim).filter(|w| !w.is_empty()).map(String::from).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfidfConfig {
    /// Upper document-frequency limit as a fraction of documents, in `(0, 1]`.
    pub max_df: f64,
    pub min_df: usize,
    pub stop_words: BTreeSet<String>,
    pub lowercase: bool,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        Self { max_df: 0.5, min_df: 5, stop_words: english_stop_words(), lowercase: true }
    }
}

impl TfidfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_df > 0.0 && self.max_df <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "max_df must be in (0, 1], got {}",
                self.max_df
            )));
        }
        Ok(())
    }
}

pub fn tokenize(text: &str, config: &TfidfConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = 0usize;
    let mut flush = |current: &mut String, chars: &mut usize| {
        if *chars >= 2 && !config.stop_words.contains(current.as_str()) {
            tokens.push(core::mem::take(current));
        } else {
            current.clear();
        }
        *chars = 0;
    };
    for c in text.chars() {
        if c.is_alphanumeric() {
            if config.lowercase {
                current.extend(c.to_lowercase());
            } else {
                current.push(c);
            }
            chars += 1;
        } else if chars > 0 {
            flush(&mut current, &mut chars);
        }
    }
    if chars > 0 {
        flush(&mut current, &mut chars);
    }
    tokens
}

/// A fitted vocabulary with per-term inverse document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    pub vocabulary: Vec<String>,
    pub idf: Vec<f64>,
}

impl TfidfModel {
    pub fn fit<S: AsRef<str>>(docs: &[S], config: &TfidfConfig) -> Result<Self> {
        Ok(fit_inner(docs, config)?.0)
    }

    pub fn transform<S: AsRef<str>>(&self, docs: &[S], config: &TfidfConfig) -> Matrix {
        let tokenized: Vec<Vec<String>> = docs.iter().map(|d| tokenize(d.as_ref(), config)).collect();
        self.weigh(&tokenized)
    }

    fn weigh(&self, tokenized: &[Vec<String>]) -> Matrix {
        let column: BTreeMap<&str, usize> =
            self.vocabulary.iter().enumerate().map(|(j, t)| (t.as_str(), j)).collect();
        let mut out = Matrix::zeros(tokenized.len(), self.vocabulary.len());
        for (i, tokens) in tokenized.iter().enumerate() {
            let row = out.row_mut(i);
            for t in tokens {
                if let Some(&j) = column.get(t.as_str()) {
                    row[j] += 1.0;
                }
            }
            for (v, idf) in row.iter_mut().zip(&self.idf) {
                *v *= idf;
            }
        }
        out.normalize_rows();
        out
    }
}

fn fit_inner<S: AsRef<str>>(docs: &[S], config: &TfidfConfig) -> Result<(TfidfModel, Vec<Vec<String>>)> {
    config.validate()?;
    if docs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = docs.len();
    let tokenized: Vec<Vec<String>> = docs.iter().map(|d| tokenize(d.as_ref(), config)).collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in &tokenized {
        let unique: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let max_count = libm::ceil(config.max_df * n as f64) as usize;
    let mut vocabulary = Vec::new();
    let mut idf = Vec::new();
    // BTreeMap iteration is already lexicographic
    for (term, &count) in &df {
        if count >= config.min_df && count <= max_count {
            vocabulary.push(String::from(*term));
            idf.push(libm::log((1.0 + n as f64) / (1.0 + count as f64)) + 1.0);
        }
    }
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok((TfidfModel { vocabulary, idf }, tokenized))
}

/// Fits a vocabulary on `docs` and returns their dense TF-IDF rows.
pub fn fit_transform<S: AsRef<str>>(docs: &[S], config: &TfidfConfig) -> Result<(TfidfModel, Matrix)> {
    let (model, tokenized) = fit_inner(docs, config)?;
    let m = model.weigh(&tokenized);
    Ok((model, m))
}
