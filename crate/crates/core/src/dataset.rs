//! In-memory text datasets and seeded benchmark down-sampling.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::{partial_shuffle, SplitMix64};

/// Default benchmark size: each experiment works on 250 rows.
pub const DEFAULT_TARGET_SIZE: usize = 250;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextDataset {
    pub rows: Vec<String>,
    pub source_id: String,
}

impl TextDataset {
    pub fn new(source_id: impl Into<String>, rows: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { rows, source_id: source_id.into() })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Text rows with one opaque category label per row. Labels compare by exact
/// string equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub base: TextDataset,
    pub labels: Vec<String>,
}

impl LabeledDataset {
    pub fn new(base: TextDataset, labels: Vec<String>) -> Result<Self> {
        if labels.len() != base.rows.len() {
            return Err(Error::LabelCountMismatch { rows: base.rows.len(), labels: labels.len() });
        }
        Ok(Self { base, labels })
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Distinct labels in order of first appearance.
    pub fn distinct_labels(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for l in &self.labels {
            if !seen.contains(&l.as_str()) {
                seen.push(l);
            }
        }
        seen
    }

    /// Keeps the given rows in the given order.
    pub fn select(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            base: TextDataset {
                rows: indices.iter().map(|&i| self.base.rows[i].clone()).collect(),
                source_id: self.base.source_id.clone(),
            },
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// One down-sampled benchmark drawn from a labeled dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkInstance {
    pub data: LabeledDataset,
    /// Row indices into the source dataset, ascending.
    pub source_rows: Vec<usize>,
    pub subsample_seed: u64,
    pub target_size: usize,
}

/// Row indices of a seeded subsample: all rows when `target_size >= n`,
/// otherwise `target_size` distinct indices drawn by partial Fisher-Yates,
/// returned in ascending order.
pub fn subsample_indices(n: usize, target_size: usize, seed: u64) -> Vec<usize> {
    if target_size >= n {
        return (0..n).collect();
    }
    let mut rng = SplitMix64::new(seed);
    let mut picks = partial_shuffle(n, target_size, &mut rng);
    picks.sort_unstable();
    picks
}

pub fn subsample(data: &LabeledDataset, target_size: usize, seed: u64) -> Result<BenchmarkInstance> {
    if target_size == 0 {
        return Err(Error::InvalidParameter("target_size must be at least 1".into()));
    }
    let rows = subsample_indices(data.len(), target_size, seed);
    Ok(BenchmarkInstance {
        data: data.select(&rows),
        source_rows: rows,
        subsample_seed: seed,
        target_size,
    })
}
