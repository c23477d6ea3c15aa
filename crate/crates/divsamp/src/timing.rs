//! Wall-clock sweeps over dataset size and sample count.
//!
//! Only the sampling step is timed as `sample_ns`. PCA, where a sampler
//! needs it, is fitted and timed separately as `pca_ns`. Each cell is
//! summarized by the mean after dropping its fastest and slowest repetition.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use divsamp_core::dataset::subsample_indices;
use divsamp_core::rng::{derive_seed, SeedPart};
use divsamp_core::samplers::{Distance, SamplerParams};
use divsamp_core::summary::trimmed_mean;
use divsamp_core::{Matrix, SamplerId};

use crate::error::{Error, Result};
use crate::harness::Prepared;

pub const DATASET_SIZES: [usize; 7] = [250, 500, 1000, 1500, 2000, 2500, 3000];
pub const DATASET_SIZE_K: usize = 60;
pub const SAMPLE_COUNTS: [usize; 4] = [18, 36, 54, 72];
pub const SAMPLE_COUNT_ROWS: usize = 2500;
pub const DEFAULT_REPETITIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingMode {
    DatasetSize,
    SampleCount,
}

impl fmt::Display for TimingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimingMode::DatasetSize => "dataset-size",
            TimingMode::SampleCount => "sample-count",
        })
    }
}

impl FromStr for TimingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dataset-size" => Ok(TimingMode::DatasetSize),
            "sample-count" => Ok(TimingMode::SampleCount),
            _ => Err(Error::Config(vec![format!("unknown timing mode {s:?} (expected dataset-size or sample-count)")])),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub rows: usize,
    /// Sample length; principled samplers use `n = k / 3` components.
    pub k: usize,
}

pub fn grid(mode: TimingMode) -> Vec<GridPoint> {
    match mode {
        TimingMode::DatasetSize => DATASET_SIZES.iter().map(|&rows| GridPoint { rows, k: DATASET_SIZE_K }).collect(),
        TimingMode::SampleCount => SAMPLE_COUNTS.iter().map(|&k| GridPoint { rows: SAMPLE_COUNT_ROWS, k }).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct TimingConfig {
    pub samplers: Vec<SamplerId>,
    pub grid: Vec<GridPoint>,
    pub repetitions: usize,
    pub seed: u64,
    pub distance: Distance,
}

impl TimingConfig {
    pub fn new(mode: TimingMode, samplers: Vec<SamplerId>) -> Self {
        Self { samplers, grid: grid(mode), repetitions: DEFAULT_REPETITIONS, seed: 0, distance: Distance::Euclidean }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub sampler_id: String,
    pub rows: usize,
    pub k: usize,
    pub repetition: usize,
    pub sample_ns: u64,
    pub pca_ns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingCell {
    pub sampler_id: String,
    pub rows: usize,
    pub k: usize,
    pub repetitions: usize,
    pub sample_ns: f64,
    pub pca_ns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub records: Vec<TimingRecord>,
    pub cells: Vec<TimingCell>,
    /// Grid points skipped because `x` had too few rows.
    pub skipped: Vec<GridPoint>,
}

impl TimingReport {
    pub fn cell(&self, sampler: &str, rows: usize, k: usize) -> Option<&TimingCell> {
        self.cells.iter().find(|c| c.sampler_id == sampler && c.rows == rows && c.k == k)
    }
}

/// Times every sampler at every grid point on seeded row subsets of `x`.
pub fn timing_sweep(x: &Matrix, config: &TimingConfig) -> Result<TimingReport> {
    let mut errors = Vec::new();
    if config.repetitions == 0 {
        errors.push("repetitions must be at least 1".to_string());
    }
    if config.samplers.is_empty() {
        errors.push("no samplers configured".to_string());
    }
    for p in &config.grid {
        if p.k == 0 || p.k % 3 != 0 {
            errors.push(format!("sample count {} is not a positive multiple of 3", p.k));
        }
    }
    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    let mut report = TimingReport { records: Vec::new(), cells: Vec::new(), skipped: Vec::new() };
    for &point in &config.grid {
        if point.rows > x.rows() {
            log::warn!("skipping grid point N={} k={}: only {} rows available", point.rows, point.k, x.rows());
            report.skipped.push(point);
            continue;
        }
        let seed = derive_seed(config.seed, &[SeedPart::Str("timing"), SeedPart::Int(point.rows as u64)]);
        let subset = x.select_rows(&subsample_indices(x.rows(), point.rows, seed));
        let n = point.k / 3;
        for &id in &config.samplers {
            let sampler_id = id.to_string();
            let mut sample = Vec::with_capacity(config.repetitions);
            let mut pca = Vec::with_capacity(config.repetitions);
            for repetition in 0..config.repetitions {
                let params = SamplerParams { n, seed: seed ^ repetition as u64, n_components: None, distance: config.distance };
                let timed = Prepared::new(&subset, n).run(id, &params)?;
                sample.push(timed.sample_ns as f64);
                pca.push(timed.pca_ns as f64);
                report.records.push(TimingRecord {
                    sampler_id: sampler_id.clone(),
                    rows: point.rows,
                    k: point.k,
                    repetition,
                    sample_ns: timed.sample_ns,
                    pca_ns: timed.pca_ns,
                });
            }
            report.cells.push(TimingCell {
                sampler_id,
                rows: point.rows,
                k: point.k,
                repetitions: config.repetitions,
                sample_ns: trimmed_mean(&sample),
                pca_ns: trimmed_mean(&pca),
            });
        }
    }
    Ok(report)
}

/// One row per (sampler, grid point), trimmed means in nanoseconds.
pub fn timing_csv(report: &TimingReport) -> String {
    let mut out = String::from("sampler,rows,k,repetitions,sample_ns,pca_ns,total_ns\n");
    for c in &report.cells {
        writeln!(
            out,
            "{},{},{},{},{:.0},{:.0},{:.0}",
            c.sampler_id,
            c.rows,
            c.k,
            c.repetitions,
            c.sample_ns,
            c.pca_ns,
            c.sample_ns + c.pca_ns
        )
        .expect("string write");
    }
    out
}

pub fn timing_raw_csv(report: &TimingReport) -> String {
    let mut out = String::from("sampler,rows,k,repetition,sample_ns,pca_ns\n");
    for r in &report.records {
        writeln!(out, "{},{},{},{},{},{}", r.sampler_id, r.rows, r.k, r.repetition, r.sample_ns, r.pca_ns)
            .expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::random_embeddings;

    #[test]
    fn grids() {
        assert_eq!(grid(TimingMode::DatasetSize).len(), 7);
        assert!(grid(TimingMode::DatasetSize).iter().all(|p| p.k == 60));
        assert_eq!(grid(TimingMode::SampleCount).iter().map(|p| p.k).collect::<Vec<_>>(), SAMPLE_COUNTS);
        assert_eq!("sample-count".parse::<TimingMode>().unwrap(), TimingMode::SampleCount);
        assert!("fast".parse::<TimingMode>().is_err());
    }

    #[test]
    fn records_and_cells() {
        let x = random_embeddings(120, 8, 1);
        let mut config = TimingConfig::new(TimingMode::DatasetSize, vec!["v1".parse().unwrap(), "random".parse().unwrap()]);
        config.grid = vec![GridPoint { rows: 60, k: 9 }, GridPoint { rows: 120, k: 9 }, GridPoint { rows: 500, k: 9 }];
        config.repetitions = 3;
        let report = timing_sweep(&x, &config).unwrap();
        assert_eq!(report.records.len(), 2 * 2 * 3);
        assert_eq!(report.cells.len(), 4);
        assert_eq!(report.skipped, vec![GridPoint { rows: 500, k: 9 }]);
        assert!(report.records.iter().all(|r| r.sample_ns > 0));
        assert!(report.records.iter().filter(|r| r.sampler_id == "v1").all(|r| r.pca_ns > 0));
        assert!(report.records.iter().filter(|r| r.sampler_id == "random").all(|r| r.pca_ns == 0));
        assert_eq!(timing_csv(&report).lines().count(), 5);
    }

    #[test]
    fn rejects_bad_sample_counts() {
        let x = random_embeddings(10, 2, 1);
        let mut config = TimingConfig::new(TimingMode::DatasetSize, vec![SamplerId::Random]);
        config.grid = vec![GridPoint { rows: 10, k: 4 }];
        config.repetitions = 0;
        match timing_sweep(&x, &config) {
            Err(Error::Config(e)) => assert_eq!(e.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}
