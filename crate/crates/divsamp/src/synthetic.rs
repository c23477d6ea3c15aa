//! Seeded Gaussian-cluster datasets with known labels.
//!
//! Each dataset is written as a CSV (`text,label`) whose embeddings are
//! stored in the embedding cache under [`SYNTHETIC_MODEL`], so a remote
//! embedder with that model name serves them without any network access.

use std::path::{Path, PathBuf};

use divsamp_core::rng::{derive_seed, SeedPart, SplitMix64};
use divsamp_core::Matrix;

use crate::embed::{text_hash, EmbeddingCache, RemoteEmbedderConfig};
use crate::error::{Error, Result};
use crate::harness::DatasetSpec;

pub const SYNTHETIC_MODEL: &str = "synthetic-gaussian";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub datasets: usize,
    pub rows: usize,
    pub dims: usize,
    pub min_clusters: usize,
    pub max_clusters: usize,
    /// Standard deviation of cluster centers around the origin.
    pub center_scale: f64,
    /// Standard deviation of points around their center.
    pub spread: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            datasets: 20,
            rows: 250,
            dims: 32,
            min_clusters: 6,
            max_clusters: 12,
            center_scale: 10.0,
            spread: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub id: String,
    pub texts: Vec<String>,
    pub labels: Vec<String>,
    pub embeddings: Matrix,
}

/// Standard normal entries.
pub fn random_embeddings(rows: usize, dims: usize, seed: u64) -> Matrix {
    let mut rng = SplitMix64::new(seed);
    Matrix::from_vec(rows, dims, (0..rows * dims).map(|_| rng.normal()).collect()).expect("shape matches")
}

/// Cluster sizes: two rows each, the rest assigned with log-normal weights
/// so that sizes are uneven.
fn cluster_sizes(rows: usize, clusters: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let floor = 2.min(rows / clusters);
    let weights: Vec<f64> = (0..clusters).map(|_| rng.normal().exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut sizes = vec![floor; clusters];
    for _ in 0..rows - floor * clusters {
        let mut u = rng.next_f64() * total;
        let mut c = 0;
        while c + 1 < clusters && u >= weights[c] {
            u -= weights[c];
            c += 1;
        }
        sizes[c] += 1;
    }
    sizes
}

pub fn generate(spec: &SyntheticSpec) -> Vec<SyntheticDataset> {
    (0..spec.datasets)
        .map(|d| {
            let id = format!("synth-{d:02}");
            let mut rng = SplitMix64::new(derive_seed(spec.seed, &[SeedPart::Str("synthetic"), SeedPart::Int(d as u64)]));
            let span = spec.max_clusters - spec.min_clusters + 1;
            let clusters = spec.min_clusters + rng.index(span);
            let centers: Vec<Vec<f64>> =
                (0..clusters).map(|_| (0..spec.dims).map(|_| spec.center_scale * rng.normal()).collect()).collect();
            let sizes = cluster_sizes(spec.rows, clusters, &mut rng);
            let mut members: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
            // Fisher-Yates so labels are interleaved.
            for i in (1..members.len()).rev() {
                members.swap(i, rng.index(i + 1));
            }
            let mut values = Vec::with_capacity(spec.rows * spec.dims);
            for &c in &members {
                values.extend(centers[c].iter().map(|m| m + spec.spread * rng.normal()));
            }
            SyntheticDataset {
                texts: (0..spec.rows).map(|i| format!("{id} row {i}")).collect(),
                labels: members.iter().map(|c| format!("c{c}")).collect(),
                embeddings: Matrix::from_vec(spec.rows, spec.dims, values).expect("shape matches"),
                id,
            }
        })
        .collect()
}

/// Writes each dataset as `<dir>/<id>.csv` and stores its embeddings in the
/// cache at `cache_dir`.
pub fn write_suite(spec: &SyntheticSpec, dir: &Path, cache_dir: &Path) -> Result<Vec<DatasetSpec>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cache = EmbeddingCache::new(cache_dir);
    let mut out = Vec::new();
    for ds in generate(spec) {
        let path = dir.join(format!("{}.csv", ds.id));
        let csv_err = |e: csv::Error| Error::Csv { path: path.clone(), line: 0, message: e.to_string() };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(["text", "label"]).map_err(csv_err)?;
        for (i, (t, l)) in ds.texts.iter().zip(&ds.labels).enumerate() {
            w.write_record([t, l]).map_err(csv_err)?;
            cache.put(SYNTHETIC_MODEL, &text_hash(t), ds.embeddings.row(i))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        out.push(DatasetSpec { id: ds.id, path, text_col: "text".into(), label_col: "label".into() });
    }
    Ok(out)
}

/// Remote embedder settings that read the synthetic vectors from the cache.
pub fn cached_embedder_config(cache_dir: impl Into<PathBuf>) -> RemoteEmbedderConfig {
    RemoteEmbedderConfig {
        model_name: SYNTHETIC_MODEL.into(),
        endpoint_url: "http://127.0.0.1:9/unused".into(),
        cache_dir: cache_dir.into(),
        ..Default::default()
    }
}

/// A bench config (TOML) over `datasets` using the cached synthetic vectors.
pub fn bench_config_toml(datasets: &[DatasetSpec], cache_dir: &Path, output_dir: &Path) -> String {
    let path = |p: &Path| toml::Value::String(p.display().to_string());
    let mut root = toml::Table::new();
    let list = datasets
        .iter()
        .map(|d| {
            let mut t = toml::Table::new();
            t.insert("id".into(), d.id.clone().into());
            t.insert("path".into(), path(&d.path));
            t.insert("text_col".into(), d.text_col.clone().into());
            t.insert("label_col".into(), d.label_col.clone().into());
            toml::Value::Table(t)
        })
        .collect();
    let mut embedder = toml::Table::new();
    embedder.insert("kind".into(), "remote".into());
    embedder.insert("model".into(), SYNTHETIC_MODEL.into());
    embedder.insert("cache_dir".into(), path(cache_dir));
    root.insert("output_dir".into(), path(output_dir));
    root.insert("seeds".into(), toml::Value::Array((0..10).map(toml::Value::Integer).collect()));
    root.insert("datasets".into(), toml::Value::Array(list));
    root.insert("embedders".into(), toml::Value::Array(vec![toml::Value::Table(embedder)]));
    toml::to_string(&root).expect("table serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_cluster_counts() {
        let spec = SyntheticSpec { datasets: 5, ..Default::default() };
        let suite = generate(&spec);
        assert_eq!(suite.len(), 5);
        for ds in &suite {
            assert_eq!(ds.texts.len(), 250);
            assert_eq!((ds.embeddings.rows(), ds.embeddings.cols()), (250, 32));
            let mut labels = ds.labels.clone();
            labels.sort();
            labels.dedup();
            assert!((6..=12).contains(&labels.len()));
        }
    }

    #[test]
    fn sizes_sum_and_floor() {
        let mut rng = SplitMix64::new(3);
        let sizes = cluster_sizes(250, 9, &mut rng);
        assert_eq!(sizes.iter().sum::<usize>(), 250);
        assert!(sizes.iter().all(|&s| s >= 2));
    }

    #[test]
    fn deterministic() {
        let spec = SyntheticSpec { datasets: 2, ..Default::default() };
        assert_eq!(generate(&spec), generate(&spec));
    }

    #[test]
    fn clusters_are_separated() {
        let ds = &generate(&SyntheticSpec { datasets: 1, ..Default::default() })[0];
        let x = &ds.embeddings;
        let mut within: f64 = 0.0;
        let mut between = f64::INFINITY;
        for i in 0..x.rows() {
            for j in i + 1..x.rows() {
                let d = divsamp_core::matrix::distance(x.row(i), x.row(j));
                if ds.labels[i] == ds.labels[j] {
                    within = within.max(d);
                } else {
                    between = between.min(d);
                }
            }
        }
        assert!(between > within, "between {between} within {within}");
    }
}
