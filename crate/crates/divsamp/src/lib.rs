//! File formats, embedders, benchmark harness and command-line front end
//! for the samplers in `divsamp-core`.

pub mod cli;
pub mod embed;
pub mod error;
pub mod harness;
pub mod loader;
pub mod synthetic;
pub mod timing;

pub use error::{Error, Result};
