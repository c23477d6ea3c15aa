//! Ordered diversity sampling over embedded text datasets.
//!
//! Everything in this crate is pure computation over in-memory data and
//! builds without `std` (an allocator is required). File formats, remote
//! embeddings, the benchmark harness and the CLI live in the `divsamp`
//! crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod error;
pub mod matrix;
pub mod metric;
pub mod pca;
pub mod rng;
pub mod samplers;
pub mod summary;
pub mod tfidf;

pub use dataset::{subsample, BenchmarkInstance, LabeledDataset, TextDataset};
pub use error::Error;
pub use matrix::Matrix;
pub use metric::{agg_wasted, wasted, AggWastedCurve, IsNewOracle, LabelOracle, ThresholdOracle};
pub use pca::{PcaModel, PcaProjection};
pub use rng::SplitMix64;
pub use samplers::{SampleSequence, SamplerId};
pub use tfidf::TfidfConfig;
