//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};
use divsamp_core::samplers::{self, Distance, SamplerParams, SAMPLER_IDS};
use divsamp_core::{LabelOracle, SamplerId, TextDataset, TfidfConfig};
use serde::Serialize;

use crate::embed::{Embedder, EmbeddingCache, RemoteEmbedderConfig, DEFAULT_API_KEY_ENV, DEFAULT_MODEL, EMBEDDER_IDS};
use crate::error::{Error, Result};
use crate::harness::{self, RunConfig, DEFAULT_SAMPLERS};
use crate::loader::{self, Loaded};
use crate::synthetic::{self, SyntheticSpec};
use crate::timing::{self, TimingConfig, TimingMode};

const IDS_HELP: &str = concat!(
    "Sampler ids: v1, v2, v1-Y, v1-Z, v1-W, v2-Y, v2-Z, v2-W, clustering, pca-clustering, rss, kcenter, random\n",
    "Embedder ids: tfidf, remote"
);

#[derive(Debug, Parser)]
#[command(name = "divsamp", version, about = "Ordered diversity sampling of text datasets", after_help = IDS_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw an ordered diverse sample and print it as JSON.
    #[command(after_help = IDS_HELP)]
    Sample(SampleArgs),
    /// Score a sample with the aggregated wasted-opportunity metric.
    #[command(after_help = IDS_HELP)]
    Eval(EvalArgs),
    /// Run a benchmark sweep described by a config file.
    Bench(BenchArgs),
    /// Time samplers across dataset sizes or sample counts.
    #[command(after_help = IDS_HELP)]
    Time(TimeArgs),
    /// Inspect or clear the embedding cache.
    Cache(CacheArgs),
    /// Write the synthetic Gaussian-cluster suite and a matching bench config.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Dataset file (.csv, .jsonl or .json lines).
    #[arg(long)]
    pub input: PathBuf,
    /// Column or field holding the text.
    #[arg(long, default_value = "text")]
    pub text_col: String,
    /// Column or field holding the label.
    #[arg(long)]
    pub label_col: Option<String>,
    /// Down-sample the input to this many rows first.
    #[arg(long)]
    pub subsample_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Embedder id.
    #[arg(long, default_value = "tfidf", value_parser = PossibleValuesParser::new(EMBEDDER_IDS))]
    pub embedder: String,
    /// Remote embedding model name.
    #[arg(long, default_value = DEFAULT_MODEL)]
    pub model: String,
    /// Embedding cache directory.
    #[arg(long, default_value = ".divsamp-cache")]
    pub cache_dir: PathBuf,
    /// Remote embeddings endpoint URL.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long, default_value = DEFAULT_API_KEY_ENV)]
    pub api_key_env: String,
    /// L2-normalize every embedding row.
    #[arg(long)]
    pub normalize_embeddings: bool,
    /// TF-IDF: drop terms in fewer documents than this.
    #[arg(long, default_value_t = 5)]
    pub min_df: usize,
    /// TF-IDF: drop terms in more than this fraction of documents.
    #[arg(long, default_value_t = 0.5)]
    pub max_df: f64,
}

impl EmbedArgs {
    pub fn embedder(&self) -> Result<Embedder> {
        let mut e = match self.embedder.as_str() {
            "tfidf" => {
                let config = TfidfConfig { min_df: self.min_df, max_df: self.max_df, ..TfidfConfig::default() };
                config.validate()?;
                Embedder::tfidf(config)
            }
            _ => {
                let mut c = RemoteEmbedderConfig {
                    model_name: self.model.clone(),
                    api_key_env: self.api_key_env.clone(),
                    cache_dir: self.cache_dir.clone(),
                    ..Default::default()
                };
                if let Some(url) = &self.endpoint {
                    c.endpoint_url = url.clone();
                }
                Embedder::remote(c)
            }
        };
        e.normalize = self.normalize_embeddings;
        Ok(e)
    }
}

#[derive(Debug, Args)]
pub struct SamplerArgs {
    /// Number of principal components; the sample has 3n rows.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distance for the clustering, rss and kcenter baselines.
    #[arg(long, default_value = "euclidean", value_parser = PossibleValuesParser::new(["euclidean", "cosine"]))]
    pub distance: String,
    /// PCA dimension for pca-clustering (defaults to n).
    #[arg(long)]
    pub n_components: Option<usize>,
}

impl SamplerArgs {
    fn params(&self) -> SamplerParams {
        SamplerParams {
            n: self.n as usize,
            seed: self.seed,
            n_components: self.n_components,
            distance: self.distance.parse::<Distance>().expect("restricted by clap"),
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Sampler id.
    #[arg(long, value_parser = PossibleValuesParser::new(SAMPLER_IDS))]
    pub sampler: String,
    #[command(flatten)]
    pub sampler_args: SamplerArgs,
    #[command(flatten)]
    pub embed: EmbedArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Sampler id to generate the sequence with.
    #[arg(long, value_parser = PossibleValuesParser::new(SAMPLER_IDS), required_unless_present = "sequence", conflicts_with = "sequence")]
    pub sampler: Option<String>,
    /// JSON file with an array of row indices to score instead.
    #[arg(long, conflicts_with = "subsample_size")]
    pub sequence: Option<PathBuf>,
    /// Write the per-step curve as CSV here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub sampler_args: SamplerArgs,
    #[command(flatten)]
    pub embed: EmbedArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Sweep config (TOML, or JSON with a .json extension).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also run the v1/v2 ablation suite and write ablation.csv.
    #[arg(long)]
    pub ablation: bool,
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    #[arg(long, value_parser = PossibleValuesParser::new(["dataset-size", "sample-count"]))]
    pub mode: String,
    /// Dataset to embed and time on; random 32-dimensional Gaussian
    /// embeddings are used when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    pub text_col: String,
    /// Rows of random embeddings when no input is given.
    #[arg(long, default_value_t = 3000)]
    pub rows: usize,
    /// Sampler to time (repeatable); defaults to the seven main samplers.
    #[arg(long, value_parser = PossibleValuesParser::new(SAMPLER_IDS))]
    pub sampler: Vec<String>,
    #[arg(long, default_value_t = timing::DEFAULT_REPETITIONS)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "divsamp-timing")]
    pub output_dir: PathBuf,
    #[command(flatten)]
    pub embed: EmbedArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("action").required(true).args(["stats", "clear"])))]
pub struct CacheArgs {
    #[arg(long, default_value = ".divsamp-cache")]
    pub cache_dir: PathBuf,
    /// Print entry, byte and model counts as JSON.
    #[arg(long)]
    pub stats: bool,
    /// Delete cached embeddings.
    #[arg(long)]
    pub clear: bool,
    /// Restrict --clear to one model.
    #[arg(long, requires = "clear")]
    pub model: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub datasets: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn load_input(args: &InputArgs) -> Result<(Loaded, Vec<usize>)> {
    let loaded = loader::load(&args.input, &args.text_col, args.label_col.as_deref())?;
    let rows = match args.subsample_size {
        Some(size) => divsamp_core::dataset::subsample_indices(loaded.len(), size, 0),
        None => (0..loaded.len()).collect(),
    };
    Ok((loaded, rows))
}

fn select_text(data: &TextDataset, rows: &[usize]) -> Result<TextDataset> {
    Ok(TextDataset::new(data.source_id.clone(), rows.iter().map(|&i| data.rows[i].clone()).collect())?)
}

/// Embeds `rows` of the input and runs the sampler; returns source row indices.
fn draw(data: &TextDataset, rows: &[usize], sampler: &str, args: &SamplerArgs, embed: &EmbedArgs) -> Result<Vec<usize>> {
    let id: SamplerId = sampler.parse()?;
    let subset = select_text(data, rows)?;
    let x = embed.embedder()?.embed(&subset)?;
    let seq = samplers::run(id, &x.values, None, &args.params())?;
    if seq.truncated {
        log::warn!("dataset has only {} rows; sample truncated to {}", subset.len(), seq.len());
    }
    Ok(seq.indices.iter().map(|&i| rows[i]).collect())
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    sampler: &'a str,
    indices: &'a [usize],
    texts: Vec<&'a str>,
}

fn cmd_sample(args: &SampleArgs, out: &mut dyn Write) -> Result<()> {
    let (loaded, rows) = load_input(&args.input)?;
    let indices = draw(loaded.text(), &rows, &args.sampler, &args.sampler_args, &args.embed)?;
    let texts = indices.iter().map(|&i| loaded.text().rows[i].as_str()).collect();
    let json = serde_json::to_string(&SampleOutput { sampler: &args.sampler, indices: &indices, texts })
        .expect("plain data serializes");
    writeln!(out, "{json}").map_err(|e| Error::io("<stdout>", e))
}

fn read_sequence(path: &Path, len: usize) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let seq: Vec<usize> = serde_json::from_str(&text)
        .map_err(|e| Error::Json { path: path.into(), line: e.line(), message: e.to_string() })?;
    if let Some(&bad) = seq.iter().find(|&&i| i >= len) {
        return Err(divsamp_core::Error::IndexOutOfRange { index: bad, len }.into());
    }
    Ok(seq)
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let mut input = args.input.clone();
    input.label_col.get_or_insert_with(|| "label".into());
    let (loaded, rows) = load_input(&input)?;
    let labeled = loaded
        .labeled()
        .ok_or_else(|| Error::Config(vec!["eval needs labels (--label-col)".into()]))?;
    let sequence = match (&args.sequence, &args.sampler) {
        (Some(path), _) => read_sequence(path, labeled.len())?,
        (None, Some(sampler)) => draw(&labeled.base, &rows, sampler, &args.sampler_args, &args.embed)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let oracle = LabelOracle::from_labels(&labeled.labels);
    let curve = oracle.curve(&sequence)?;
    if let Some(path) = &args.output {
        let mut csv = String::from("step,index,label,wasted,agg_wasted\n");
        for (step, &i) in sequence.iter().enumerate() {
            csv.push_str(&format!(
                "{},{i},{},{},{}\n",
                step + 1,
                labeled.labels[i],
                curve.wasted_flags[step],
                curve.running_total[step]
            ));
        }
        std::fs::write(path, csv).map_err(|e| Error::io(path, e))?;
    }
    writeln!(out, "{}", curve.total()).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = RunConfig::from_file(&args.config)?;
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    let (outcome, table) = harness::bench(&config)?;
    if !outcome.failures.is_empty() {
        log::warn!("{} runs failed; see failures.jsonl", outcome.failures.len());
    }
    let mut text = harness::summary_csv(&table);
    if args.ablation {
        let bases = [divsamp_core::samplers::PrincipledVersion::V1, divsamp_core::samplers::PrincipledVersion::V2];
        let ablation = harness::run_ablation_suite(&config, &bases)?;
        let csv = harness::ablation_csv(&ablation.tables);
        harness::write_file(&config.output_dir, "ablation.csv", &csv)?;
        text.push_str(&csv);
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_time(args: &TimeArgs, out: &mut dyn Write) -> Result<()> {
    let mode: TimingMode = args.mode.parse()?;
    let x = match &args.input {
        Some(path) => {
            let loaded = loader::load(path, &args.text_col, None)?;
            args.embed.embedder()?.embed(loaded.text())?.values
        }
        None => synthetic::random_embeddings(args.rows, 32, args.seed),
    };
    let names: Vec<&str> =
        if args.sampler.is_empty() { DEFAULT_SAMPLERS.to_vec() } else { args.sampler.iter().map(String::as_str).collect() };
    let samplers = names.iter().map(|s| s.parse()).collect::<std::result::Result<Vec<SamplerId>, _>>()?;
    let mut config = TimingConfig::new(mode, samplers);
    config.repetitions = args.repetitions;
    config.seed = args.seed;
    let report = timing::timing_sweep(&x, &config)?;
    let csv = timing::timing_csv(&report);
    harness::write_file(&args.output_dir, "timing.csv", &csv)?;
    harness::write_file(&args.output_dir, "timing_raw.csv", &timing::timing_raw_csv(&report))?;
    out.write_all(csv.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_cache(args: &CacheArgs, out: &mut dyn Write) -> Result<()> {
    let cache = EmbeddingCache::new(&args.cache_dir);
    let text = if args.clear {
        let removed = cache.clear(args.model.as_deref())?;
        serde_json::json!({ "removed": removed })
    } else {
        let s = cache.stats()?;
        serde_json::json!({ "entries": s.entries, "bytes": s.bytes, "models": s.models })
    };
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let cache_dir = args.cache_dir.clone().unwrap_or_else(|| args.output_dir.join("cache"));
    let spec = SyntheticSpec { datasets: args.datasets, seed: args.seed, ..Default::default() };
    let datasets = synthetic::write_suite(&spec, &args.output_dir, &cache_dir)?;
    let config = synthetic::bench_config_toml(&datasets, &cache_dir, &args.output_dir.join("bench-out"));
    let path = harness::write_file(&args.output_dir, "bench.toml", &config)?;
    writeln!(out, "{}", path.display()).map_err(|e| Error::io("<stdout>", e))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Sample(a) => cmd_sample(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Time(a) => cmd_time(a, out),
        Command::Cache(a) => cmd_cache(a, out),
        Command::Synth(a) => cmd_synth(a, out),
    }
}
