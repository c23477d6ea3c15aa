//! Benchmark sweeps over datasets x embedders x samplers x seeds.
//!
//! Every (dataset, seed) pair is an independent task: it draws its own
//! subsample, embeds it, and runs each sampler with a seed derived from
//! `(master_seed, dataset id, sampler id, run seed)`. Results are sorted
//! before anything is written, so outputs do not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use divsamp_core::pca::{self, PcaProjection};
use divsamp_core::rng::{derive_seed, SeedPart};
use divsamp_core::samplers::{self, Distance, PrincipledVersion, SamplerParams, SAMPLER_IDS};
use divsamp_core::summary::{aggregate_curves, SummaryTable};
use divsamp_core::{subsample, AggWastedCurve, LabelOracle, LabeledDataset, Matrix, SampleSequence, SamplerId, TfidfConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{Embedder, EmbedderKind, RemoteEmbedderConfig};
use crate::error::{Error, Result};
use crate::loader;

pub const DEFAULT_N: usize = 6;
pub const DEFAULT_SEED_COUNT: u64 = 10;
pub const DEFAULT_SAMPLERS: [&str; 7] = ["v1", "v2", "clustering", "pca-clustering", "rss", "kcenter", "random"];

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub id: String,
    pub path: PathBuf,
    pub text_col: String,
    pub label_col: String,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub datasets: Vec<DatasetSpec>,
    pub embedders: Vec<Embedder>,
    pub samplers: Vec<SamplerId>,
    pub n: usize,
    pub subsample_size: usize,
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Sampler that percent increases are measured against.
    pub reference: SamplerId,
    /// PCA dimension for `pca-clustering`; `n` when unset.
    pub n_components: Option<usize>,
    pub distance: Distance,
}

impl RunConfig {
    pub fn new(datasets: Vec<DatasetSpec>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            datasets,
            embedders: vec![Embedder::tfidf(TfidfConfig::default())],
            samplers: DEFAULT_SAMPLERS.iter().map(|s| s.parse().expect("known id")).collect(),
            n: DEFAULT_N,
            subsample_size: divsamp_core::dataset::DEFAULT_TARGET_SIZE,
            seeds: (0..DEFAULT_SEED_COUNT).collect(),
            master_seed: 0,
            output_dir: output_dir.into(),
            reference: SamplerId::Principled(PrincipledVersion::V2),
            n_components: None,
            distance: Distance::Euclidean,
        }
    }

    /// Reads a TOML file (or JSON for `.json`). Relative paths inside are
    /// resolved against the file's directory. All problems are reported
    /// together.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: RawConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        raw.into_config(base)
    }

    /// Checks every field and returns all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        self.collect_errors(&mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    fn collect_errors(&self, errors: &mut Vec<String>) {
        if self.datasets.is_empty() {
            errors.push("no datasets configured".into());
        }
        let mut ids = BTreeSet::new();
        for d in &self.datasets {
            if !ids.insert(d.id.as_str()) {
                errors.push(format!("duplicate dataset id {:?}", d.id));
            }
            if !d.path.is_file() {
                errors.push(format!("dataset {:?}: file {} not found", d.id, d.path.display()));
            }
        }
        if self.embedders.is_empty() {
            errors.push("no embedders configured".into());
        }
        let mut embedder_ids = BTreeSet::new();
        for e in &self.embedders {
            if !embedder_ids.insert(e.id()) {
                errors.push(format!("duplicate embedder {:?}", e.id()));
            }
            if let EmbedderKind::Tfidf(c) = &e.kind {
                if let Err(err) = c.validate() {
                    errors.push(format!("tfidf: {err}"));
                }
            }
        }
        if self.samplers.is_empty() {
            errors.push("no samplers configured".into());
        }
        if !self.samplers.contains(&self.reference) {
            errors.push(format!("reference sampler {} is not among the configured samplers", self.reference));
        }
        if self.n == 0 {
            errors.push("n must be at least 1".into());
        }
        if self.n_components == Some(0) {
            errors.push("n_components must be at least 1".into());
        }
        if self.subsample_size == 0 {
            errors.push("subsample_size must be at least 1".into());
        }
        if self.seeds.is_empty() {
            errors.push("seeds must not be empty".into());
        }
    }

    pub(crate) fn sampler_params(&self, seed: u64) -> SamplerParams {
        SamplerParams { n: self.n, seed, n_components: self.n_components, distance: self.distance }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    path: PathBuf,
    id: Option<String>,
    #[serde(default = "default_text_col")]
    text_col: String,
    #[serde(default = "default_label_col")]
    label_col: String,
}

fn default_text_col() -> String {
    "text".into()
}

fn default_label_col() -> String {
    "label".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmbedder {
    kind: String,
    max_df: Option<f64>,
    min_df: Option<usize>,
    model: Option<String>,
    endpoint: Option<String>,
    api_key_env: Option<String>,
    cache_dir: Option<PathBuf>,
    batch_size: Option<usize>,
    max_retries: Option<usize>,
    concurrency: Option<usize>,
    timeout_secs: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    datasets: Vec<RawDataset>,
    embedders: Option<Vec<RawEmbedder>>,
    samplers: Option<Vec<String>>,
    n: Option<usize>,
    subsample_size: Option<usize>,
    seeds: Option<Vec<u64>>,
    master_seed: Option<u64>,
    output_dir: Option<PathBuf>,
    reference: Option<String>,
    n_components: Option<usize>,
    distance: Option<String>,
    #[serde(default)]
    normalize_embeddings: bool,
}

impl RawConfig {
    fn into_config(self, base: &Path) -> Result<RunConfig> {
        let mut errors = Vec::new();
        let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        let datasets = self
            .datasets
            .into_iter()
            .map(|d| {
                let id = d.id.unwrap_or_else(|| {
                    d.path.file_stem().map_or_else(|| d.path.display().to_string(), |s| s.to_string_lossy().into_owned())
                });
                DatasetSpec { id, path: resolve(d.path), text_col: d.text_col, label_col: d.label_col }
            })
            .collect();
        let mut config = RunConfig::new(datasets, resolve(self.output_dir.unwrap_or_else(|| "divsamp-out".into())));
        if let Some(list) = self.embedders {
            config.embedders.clear();
            for e in list {
                match e.kind.as_str() {
                    "tfidf" => {
                        let mut c = TfidfConfig::default();
                        c.max_df = e.max_df.unwrap_or(c.max_df);
                        c.min_df = e.min_df.unwrap_or(c.min_df);
                        config.embedders.push(Embedder::tfidf(c));
                    }
                    "remote" => {
                        let mut c = RemoteEmbedderConfig::default();
                        c.model_name = e.model.unwrap_or(c.model_name);
                        c.endpoint_url = e.endpoint.unwrap_or(c.endpoint_url);
                        c.api_key_env = e.api_key_env.unwrap_or(c.api_key_env);
                        c.cache_dir = e.cache_dir.map(resolve).unwrap_or(c.cache_dir);
                        c.batch_size = e.batch_size.unwrap_or(c.batch_size);
                        c.max_retries = e.max_retries.unwrap_or(c.max_retries);
                        c.concurrency = e.concurrency.unwrap_or(c.concurrency);
                        c.timeout = e.timeout_secs.map_or(c.timeout, std::time::Duration::from_secs);
                        config.embedders.push(Embedder::remote(c));
                    }
                    other => errors.push(format!("unknown embedder kind {other:?} (expected tfidf or remote)")),
                }
            }
        }
        for e in &mut config.embedders {
            e.normalize = self.normalize_embeddings;
        }
        if let Some(list) = self.samplers {
            config.samplers.clear();
            for s in list {
                match s.parse() {
                    Ok(id) => config.samplers.push(id),
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
        if let Some(r) = self.reference {
            match r.parse() {
                Ok(id) => config.reference = id,
                Err(e) => errors.push(format!("reference: {e}")),
            }
        }
        if let Some(d) = self.distance {
            match d.parse() {
                Ok(d) => config.distance = d,
                Err(e) => errors.push(e.to_string()),
            }
        }
        config.n = self.n.unwrap_or(config.n);
        config.subsample_size = self.subsample_size.unwrap_or(config.subsample_size);
        config.seeds = self.seeds.unwrap_or(config.seeds);
        config.master_seed = self.master_seed.unwrap_or(config.master_seed);
        config.n_components = self.n_components;
        config.collect_errors(&mut errors);
        if errors.is_empty() {
            Ok(config)
        } else {
            Err(Error::Config(errors))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub dataset_id: String,
    pub embedder_id: String,
    pub sampler_id: String,
    pub seed: u64,
    pub sampler_seed: u64,
    pub sequence: SampleSequence,
    /// `sequence.indices` mapped back to rows of the source file.
    pub source_indices: Vec<usize>,
    pub curve: AggWastedCurve,
    /// Sampling wall time in nanoseconds.
    pub sample_ns: u64,
    /// PCA fit time attributed to this run (0 for samplers without PCA).
    pub pca_ns: u64,
}

impl RunResult {
    pub fn final_agg_wasted(&self) -> usize {
        self.curve.total()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunFailure {
    pub dataset_id: String,
    pub embedder_id: String,
    /// `None` when the failure happened before sampling (e.g. embedding).
    pub sampler_id: Option<String>,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkOutcome {
    pub results: Vec<RunResult>,
    pub failures: Vec<RunFailure>,
}

/// Holds the embeddings of one benchmark instance and fits PCA on demand,
/// sharing one `n`-component projection between the samplers that use it.
pub(crate) struct Prepared<'a> {
    x: &'a Matrix,
    n: usize,
    projection: Option<(PcaProjection, u64)>,
    cluster_projection: Option<(PcaProjection, u64)>,
}

pub(crate) struct Timed {
    pub sequence: SampleSequence,
    pub sample_ns: u64,
    pub pca_ns: u64,
}

fn elapsed_ns(start: Instant) -> u64 {
    (start.elapsed().as_nanos() as u64).max(1)
}

impl<'a> Prepared<'a> {
    pub(crate) fn new(x: &'a Matrix, n: usize) -> Self {
        Self { x, n, projection: None, cluster_projection: None }
    }

    fn projection(&mut self) -> Result<&(PcaProjection, u64)> {
        if self.projection.is_none() {
            let start = Instant::now();
            let (_, p) = pca::fit_project(self.x, self.n)?;
            self.projection = Some((p, elapsed_ns(start)));
        }
        Ok(self.projection.as_ref().expect("just fitted"))
    }

    pub(crate) fn run(&mut self, id: SamplerId, params: &SamplerParams) -> Result<Timed> {
        if id.uses_projection() {
            let x = self.x;
            let (p, pca_ns) = self.projection()?;
            let start = Instant::now();
            let sequence = samplers::run(id, x, Some(p), params)?;
            return Ok(Timed { sequence, sample_ns: elapsed_ns(start), pca_ns: *pca_ns });
        }
        if id == SamplerId::PcaClustering {
            let dims = params.n_components.unwrap_or(params.n);
            let shared = dims == self.n && params.distance == Distance::Euclidean;
            let (p, pca_ns) = if shared {
                self.projection()?
            } else {
                if self.cluster_projection.is_none() {
                    let start = Instant::now();
                    let mut x = self.x.clone();
                    if params.distance == Distance::Cosine {
                        x.normalize_rows();
                    }
                    let (_, p) = pca::fit_project(&x, dims)?;
                    self.cluster_projection = Some((p, elapsed_ns(start)));
                }
                self.cluster_projection.as_ref().expect("just fitted")
            };
            let start = Instant::now();
            let sequence = samplers::baseline_clustering_projected(p, params.n, params.seed)?;
            return Ok(Timed { sequence, sample_ns: elapsed_ns(start), pca_ns: *pca_ns });
        }
        let start = Instant::now();
        let sequence = samplers::run(id, self.x, None, params)?;
        Ok(Timed { sequence, sample_ns: elapsed_ns(start), pca_ns: 0 })
    }
}

pub fn subsample_seed(master: u64, dataset_id: &str, seed: u64) -> u64 {
    derive_seed(master, &[SeedPart::Str("subsample"), SeedPart::Str(dataset_id), SeedPart::Int(seed)])
}

pub fn sampler_seed(master: u64, dataset_id: &str, sampler_id: &str, seed: u64) -> u64 {
    derive_seed(master, &[SeedPart::Str(dataset_id), SeedPart::Str(sampler_id), SeedPart::Int(seed)])
}

fn load_datasets(config: &RunConfig) -> Result<Vec<LabeledDataset>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for spec in &config.datasets {
        match loader::load(&spec.path, &spec.text_col, Some(&spec.label_col)) {
            Ok(loaded) => match loaded.labeled() {
                Some(l) => {
                    let mut l = l.clone();
                    l.base.source_id = spec.id.clone();
                    out.push(l);
                }
                None => errors.push(format!("dataset {:?} has no labels", spec.id)),
            },
            Err(e) => errors.push(format!("dataset {:?}: {e}", spec.id)),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(Error::Config(errors))
    }
}

/// Ordering key: (dataset, embedder, sampler) by position in the config,
/// then seed.
type SortKey = (usize, usize, usize, u64);

enum TaskOutput {
    Result(SortKey, RunResult),
    Failure(SortKey, RunFailure),
}

/// Runs every sampler on every (dataset, seed, embedder) instance.
/// Individual failures are collected; an error is returned only when the
/// configuration is invalid or no run succeeded.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchmarkOutcome> {
    config.validate()?;
    let datasets = load_datasets(config)?;
    let tasks: Vec<(usize, u64)> =
        (0..datasets.len()).flat_map(|d| config.seeds.iter().map(move |&s| (d, s))).collect();
    let mut outputs: Vec<TaskOutput> =
        tasks.par_iter().flat_map_iter(|&(d, seed)| run_task(config, &datasets[d], d, seed)).collect();
    outputs.sort_by_key(|o| match o {
        TaskOutput::Result(k, _) | TaskOutput::Failure(k, _) => *k,
    });
    let mut outcome = BenchmarkOutcome::default();
    for o in outputs {
        match o {
            TaskOutput::Result(_, r) => outcome.results.push(r),
            TaskOutput::Failure(_, f) => {
                log::warn!(
                    "run failed: dataset={} embedder={} sampler={} seed={}: {}",
                    f.dataset_id,
                    f.embedder_id,
                    f.sampler_id.as_deref().unwrap_or("-"),
                    f.seed,
                    f.message
                );
                outcome.failures.push(f)
            }
        }
    }
    if outcome.results.is_empty() {
        return Err(Error::NoSuccessfulRuns(outcome.failures.len()));
    }
    Ok(outcome)
}

fn run_task(config: &RunConfig, data: &LabeledDataset, d: usize, seed: u64) -> Vec<TaskOutput> {
    let dataset_id = data.base.source_id.as_str();
    let mut out = Vec::new();
    let failure = |e_idx: usize, s_idx: usize, embedder_id: &str, sampler_id: Option<String>, message: String| {
        TaskOutput::Failure(
            (d, e_idx, s_idx, seed),
            RunFailure { dataset_id: dataset_id.into(), embedder_id: embedder_id.into(), sampler_id, seed, message },
        )
    };
    let instance = match subsample(data, config.subsample_size, subsample_seed(config.master_seed, dataset_id, seed)) {
        Ok(i) => i,
        Err(e) => {
            out.push(failure(0, 0, "-", None, e.to_string()));
            return out;
        }
    };
    let oracle = LabelOracle::from_labels(&instance.data.labels);
    for (e_idx, embedder) in config.embedders.iter().enumerate() {
        let embedder_id = embedder.id();
        let embedding = match embedder.embed(&instance.data.base) {
            Ok(m) => m,
            Err(e) => {
                out.push(failure(e_idx, 0, &embedder_id, None, e.to_string()));
                continue;
            }
        };
        let mut prepared = Prepared::new(&embedding.values, config.n);
        for (s_idx, &id) in config.samplers.iter().enumerate() {
            let sampler_id = id.to_string();
            let s_seed = sampler_seed(config.master_seed, dataset_id, &sampler_id, seed);
            let timed = prepared.run(id, &config.sampler_params(s_seed)).and_then(|t| {
                let curve = oracle.curve(&t.sequence.indices)?;
                Ok((t, curve))
            });
            match timed {
                Ok((t, curve)) => {
                    let source_indices = t.sequence.indices.iter().map(|&i| instance.source_rows[i]).collect();
                    out.push(TaskOutput::Result(
                        (d, e_idx, s_idx, seed),
                        RunResult {
                            dataset_id: dataset_id.into(),
                            embedder_id: embedder_id.clone(),
                            sampler_id,
                            seed,
                            sampler_seed: s_seed,
                            sequence: t.sequence,
                            source_indices,
                            curve,
                            sample_ns: t.sample_ns,
                            pca_ns: t.pca_ns,
                        },
                    ));
                }
                Err(e) => out.push(failure(e_idx, s_idx, &embedder_id, Some(sampler_id), e.to_string())),
            }
        }
    }
    out
}

#[derive(Serialize)]
struct ResultRecord<'a> {
    dataset: &'a str,
    embedder: &'a str,
    sampler: &'a str,
    seed: u64,
    sampler_seed: u64,
    indices: &'a [usize],
    source_indices: &'a [usize],
    wasted: &'a [u8],
    agg_wasted: &'a [usize],
    final_agg_wasted: usize,
    truncated: bool,
    params: &'a BTreeMap<String, String>,
}

/// One JSON object per run, without timings.
pub fn results_jsonl(results: &[RunResult]) -> String {
    let mut out = String::new();
    for r in results {
        let record = ResultRecord {
            dataset: &r.dataset_id,
            embedder: &r.embedder_id,
            sampler: &r.sampler_id,
            seed: r.seed,
            sampler_seed: r.sampler_seed,
            indices: &r.sequence.indices,
            source_indices: &r.source_indices,
            wasted: &r.curve.wasted_flags,
            agg_wasted: &r.curve.running_total,
            final_agg_wasted: r.final_agg_wasted(),
            truncated: r.sequence.truncated,
            params: &r.sequence.params,
        };
        out.push_str(&serde_json::to_string(&record).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

/// Distinct values in first-appearance order.
fn ordered<'a>(values: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = Vec::new();
    for v in values {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen
}

/// `step,sampler,embedder,mean_total`: per-step mean running totals over
/// all complete (non-truncated) runs of each (embedder, sampler).
pub fn curves_csv(results: &[RunResult]) -> Result<String> {
    let mut out = String::from("step,sampler,embedder,mean_total\n");
    let complete: Vec<&RunResult> = results.iter().filter(|r| !r.sequence.truncated).collect();
    for embedder in ordered(complete.iter().map(|r| r.embedder_id.as_str())) {
        for sampler in ordered(complete.iter().map(|r| r.sampler_id.as_str())) {
            let curves: Vec<&[usize]> = complete
                .iter()
                .filter(|r| r.embedder_id == embedder && r.sampler_id == sampler)
                .map(|r| r.curve.running_total.as_slice())
                .collect();
            for (step, mean) in aggregate_curves(&curves)?.iter().enumerate() {
                writeln!(out, "{},{sampler},{embedder},{mean}", step + 1).expect("string write");
            }
        }
    }
    Ok(out)
}

/// Mean final score per (embedder, sampler) with percent increases over
/// `reference`. Embedders with no successful reference run are dropped.
pub fn summary_table(results: &[RunResult], reference: &str) -> SummaryTable {
    let scores: Vec<(&str, &str, f64)> = results
        .iter()
        .filter(|r| !r.sequence.truncated)
        .map(|r| (r.embedder_id.as_str(), r.sampler_id.as_str(), r.final_agg_wasted() as f64))
        .collect();
    let mut table = SummaryTable { reference: reference.into(), rows: Vec::new() };
    for embedder in ordered(scores.iter().map(|s| s.0)).into_iter().collect::<BTreeSet<_>>() {
        let group: Vec<_> = scores.iter().filter(|s| s.0 == embedder).copied().collect();
        match SummaryTable::build(&group, reference) {
            Ok(t) => table.rows.extend(t.rows),
            Err(e) => log::warn!("no summary for embedder {embedder}: {e}"),
        }
    }
    table
}

/// Wide table: one row per embedder, one column per sampler holding the
/// percent increase over the reference (an absolute difference when
/// `relative` is false).
pub fn summary_csv(table: &SummaryTable) -> String {
    let samplers = ordered(table.rows.iter().map(|r| r.sampler.as_str()));
    let mut out = format!("embedder,reference,relative,{}\n", samplers.join(","));
    for embedder in ordered(table.rows.iter().map(|r| r.group.as_str())) {
        let relative = table.row(embedder, &table.reference).is_none_or(|r| r.change.relative);
        let cells: Vec<String> = samplers
            .iter()
            .map(|s| table.row(embedder, s).map_or_else(String::new, |r| format!("{:.2}", r.change.value)))
            .collect();
        writeln!(out, "{embedder},{},{relative},{}", table.reference, cells.join(",")).expect("string write");
    }
    out
}

/// Long table: `embedder,sampler,runs,mean_final,change,relative`.
pub fn scores_csv(table: &SummaryTable) -> String {
    let mut out = String::from("embedder,sampler,runs,mean_final,change,relative\n");
    for r in &table.rows {
        writeln!(out, "{},{},{},{},{},{}", r.group, r.sampler, r.runs, r.mean_final, r.change.value, r.change.relative)
            .expect("string write");
    }
    out
}

pub fn run_times_csv(results: &[RunResult]) -> String {
    let mut out = String::from("dataset,embedder,sampler,seed,sample_ns,pca_ns\n");
    for r in results {
        writeln!(out, "{},{},{},{},{},{}", r.dataset_id, r.embedder_id, r.sampler_id, r.seed, r.sample_ns, r.pca_ns)
            .expect("string write");
    }
    out
}

fn failures_jsonl(failures: &[RunFailure]) -> String {
    failures.iter().map(|f| serde_json::to_string(f).expect("plain data serializes") + "\n").collect()
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `results.jsonl`, `curves.csv`, `summary.csv`, `scores.csv`,
/// `failures.jsonl` and `run_times.csv`. Everything except the run times
/// is a pure function of the configuration.
pub fn write_outputs(config: &RunConfig, outcome: &BenchmarkOutcome) -> Result<SummaryTable> {
    let dir = &config.output_dir;
    let table = summary_table(&outcome.results, &config.reference.to_string());
    write_file(dir, "results.jsonl", &results_jsonl(&outcome.results))?;
    write_file(dir, "curves.csv", &curves_csv(&outcome.results)?)?;
    write_file(dir, "summary.csv", &summary_csv(&table))?;
    write_file(dir, "scores.csv", &scores_csv(&table))?;
    write_file(dir, "failures.jsonl", &failures_jsonl(&outcome.failures))?;
    write_file(dir, "run_times.csv", &run_times_csv(&outcome.results))?;
    Ok(table)
}

/// [`run_benchmark`] followed by [`write_outputs`].
pub fn bench(config: &RunConfig) -> Result<(BenchmarkOutcome, SummaryTable)> {
    let outcome = run_benchmark(config)?;
    let table = write_outputs(config, &outcome)?;
    Ok((outcome, table))
}

/// Sampler ids of one ablation family: the base followed by the variants
/// with Y, Z and W replaced by random picks.
pub fn ablation_family(base: PrincipledVersion) -> Vec<SamplerId> {
    let mut ids = vec![SamplerId::Principled(base)];
    ids.extend(samplers::Part::ALL.iter().map(|&p| SamplerId::Ablated(base, p)));
    ids
}

#[derive(Debug, Clone)]
pub struct AblationOutcome {
    pub outcome: BenchmarkOutcome,
    /// One table per base, each relative to its own unablated sampler.
    pub tables: Vec<SummaryTable>,
}

/// Runs each base and its three ablated variants on identical instances
/// and reports percent increases relative to the base.
pub fn run_ablation_suite(config: &RunConfig, bases: &[PrincipledVersion]) -> Result<AblationOutcome> {
    let mut cfg = config.clone();
    cfg.samplers = bases.iter().flat_map(|&b| ablation_family(b)).collect();
    cfg.reference = SamplerId::Principled(*bases.first().ok_or_else(|| Error::Config(vec!["no ablation bases".into()]))?);
    let outcome = run_benchmark(&cfg)?;
    let tables = bases
        .iter()
        .map(|&b| {
            let family: Vec<String> = ablation_family(b).iter().map(ToString::to_string).collect();
            let subset: Vec<RunResult> =
                outcome.results.iter().filter(|r| family.contains(&r.sampler_id)).cloned().collect();
            summary_table(&subset, &b.to_string())
        })
        .collect();
    Ok(AblationOutcome { outcome, tables })
}

/// `base,embedder,sampler,runs,mean_final,change,relative`.
pub fn ablation_csv(tables: &[SummaryTable]) -> String {
    let mut out = String::from("base,embedder,sampler,runs,mean_final,change,relative\n");
    for t in tables {
        for r in &t.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.2},{}",
                t.reference, r.group, r.sampler, r.runs, r.mean_final, r.change.value, r.change.relative
            )
            .expect("string write");
        }
    }
    out
}

/// Every accepted sampler id, for help texts.
pub fn sampler_ids() -> &'static [&'static str] {
    &SAMPLER_IDS
}
