//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero when any criterion fails.

use std::collections::{HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use divsamp::embed::Embedder;
use divsamp::harness::{self, RunConfig};
use divsamp::synthetic::{self, SyntheticSpec};
use divsamp::timing::{self, TimingConfig, TimingMode};
use divsamp_core::metric::{agg_wasted, brute_force_min_agg_wasted, wasted, LabelOracle, ThresholdOracle};
use divsamp_core::pca::{self, fix_sign, PcaProjection};
use divsamp_core::rng::SplitMix64;
use divsamp_core::samplers::{
    ablate_parts, baseline_random, principled_v1, principled_v2, selection_sets, Part, PrincipledVersion,
};
use divsamp_core::summary::{ks_two_sample, trimmed_mean};
use divsamp_core::tfidf::{english_stop_words, fit_transform, TfidfConfig};
use divsamp_core::{Matrix, SamplerId};
use nalgebra::DMatrix;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn example_oracle(position: usize) -> LabelOracle {
    let d = ["1A", "1B", "2B", "2C", "1A", "2B"];
    let keys: Vec<char> = d.iter().map(|s| s.chars().nth(position).unwrap()).collect();
    LabelOracle::from_labels(&keys)
}

fn worked_examples() -> Verdict {
    let first = example_oracle(0);
    let second = example_oracle(1);
    let start = Instant::now();
    let values = [
        agg_wasted(&[0, 1, 2], &first).unwrap().total(),
        agg_wasted(&[0, 2, 3], &first).unwrap().total(),
        agg_wasted(&[0, 1, 2], &second).unwrap().total(),
        agg_wasted(&[0, 2, 3], &second).unwrap().total(),
        wasted(&[0, 1], &first) as usize,
        wasted(&[0, 2, 3], &first) as usize,
    ];
    let elapsed = start.elapsed();
    ensure(values == [1, 0, 1, 0, 1, 0], format!("got {values:?}, expected [1, 0, 1, 0, 1, 0]"))?;
    ensure(elapsed < Duration::from_millis(1), format!("took {elapsed:?}"))?;
    Ok(format!("values {values:?} in {elapsed:?}"))
}

fn threshold_oracle_minimum() -> Verdict {
    let oracle = ThresholdOracle { values: (1..=7).map(f64::from).collect(), threshold: 3.0 };
    let start = Instant::now();
    let (free, witness) = brute_force_min_agg_wasted(&oracle, 3, &[]).unwrap();
    let (forced, forced_witness) = brute_force_min_agg_wasted(&oracle, 3, &[0, 4]).unwrap();
    let elapsed = start.elapsed();
    let witness_values: Vec<usize> = witness.iter().map(|i| i + 1).collect();
    let forced_values: Vec<usize> = forced_witness.iter().map(|i| i + 1).collect();
    let detail = format!(
        "free min {free} (witness {witness_values:?}), min after prefix <1,5> {forced} (witness {forced_values:?}) in {elapsed:?}"
    );
    ensure(free == 0 && agg_wasted(&witness, &oracle).unwrap().total() == 0, format!("free search: {detail}"))?;
    ensure(forced == 1, format!("expected 1 after prefix <1,5>: {detail}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("too slow: {detail}"))?;
    Ok(detail)
}

fn label_oracle_zero_optimum() -> Verdict {
    let mut rng = SplitMix64::new(0xA11CE);
    let start = Instant::now();
    let mut searches = 0;
    for case in 0..200 {
        let n = 1 + rng.index(12);
        let labels_used = 1 + rng.index(5);
        let labels: Vec<usize> = (0..n).map(|_| rng.index(labels_used)).collect();
        let oracle = LabelOracle::from_labels(&labels);
        for k in 1..=n {
            let (min, witness) = brute_force_min_agg_wasted(&oracle, k, &[]).unwrap();
            searches += 1;
            ensure(min == 0, format!("case {case}: labels {labels:?}, k={k}: minimum {min}"))?;
            ensure(agg_wasted(&witness, &oracle).unwrap().total() == 0, format!("case {case}: bad witness"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("{searches} exhaustive searches, all minimum 0, in {elapsed:?}"))
}

fn proj(rows: &[&[f64]]) -> PcaProjection {
    PcaProjection(Matrix::from_rows(rows).unwrap())
}

fn random_projection(rng: &mut SplitMix64, rows: usize, cols: usize) -> PcaProjection {
    PcaProjection(Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.normal()).collect()).unwrap())
}

fn algorithm_fidelity() -> Verdict {
    let v1_single = principled_v1(&proj(&[&[5.0], &[-4.0], &[0.5], &[2.0], &[-1.0], &[0.0]]), 1).unwrap().indices;
    ensure(v1_single == [0, 1, 5], format!("v1 single column: {v1_single:?}"))?;

    let p = proj(&[&[9.0, 9.0], &[-9.0, 0.0], &[0.0, -9.0], &[0.1, 0.1], &[5.0, 5.0], &[-1.0, 8.0]]);
    let sets = selection_sets(&p, 2, PrincipledVersion::V1, &[], 0).unwrap();
    ensure(
        sets.y == [0, 5] && sets.z == [1, 2] && sets.w == [3, 4],
        format!("v1 collision example sets: {sets:?}"),
    )?;
    let v1_pair = principled_v1(&p, 2).unwrap().indices;
    ensure(v1_pair == [0, 5, 1, 2, 3, 4], format!("v1 collision example: {v1_pair:?}"))?;

    let ties = principled_v1(&proj(&[&[1.0], &[1.0], &[1.0]]), 1).unwrap().indices;
    ensure(ties == [0, 1, 2], format!("v1 all ties: {ties:?}"))?;

    let p = proj(&[&[3.0, 2.0], &[2.5, 0.1], &[-4.0, -3.0], &[-0.5, 3.0], &[0.1, 0.05], &[0.0, 0.0]]);
    let sets = selection_sets(&p, 2, PrincipledVersion::V2, &[], 0).unwrap();
    ensure(
        sets.y == [1, 3] && sets.z == [2, 5] && sets.w == [4, 0],
        format!("v2 collision example sets: {sets:?}"),
    )?;
    let v2_pair = principled_v2(&p, 2).unwrap().indices;
    ensure(v2_pair == [1, 3, 2, 5, 4, 0], format!("v2 example: {v2_pair:?}"))?;

    let p = proj(&[&[12.0, 11.0], &[10.0, 0.0], &[-1.0, -1.0], &[0.5, 0.4], &[-2.0, 3.0], &[1.0, -6.0]]);
    let first = selection_sets(&p, 2, PrincipledVersion::V2, &[], 0).unwrap().y[0];
    ensure(first == 1, format!("v2 single-axis row: Y[0] = {first}"))?;

    let mut rng = SplitMix64::new(4);
    for case in 0..100 {
        let rows = 1 + rng.index(30);
        let p = random_projection(&mut rng, rows, 1);
        let (a, b) = (principled_v1(&p, 1).unwrap(), principled_v2(&p, 1).unwrap());
        ensure(a.indices == b.indices, format!("n=1 case {case}: v1 {:?} vs v2 {:?}", a.indices, b.indices))?;
    }
    for case in 0..100 {
        let n = 1 + rng.index(4);
        let rows = 1 + rng.index(40);
        let p = random_projection(&mut rng, rows, n);
        let c = 0.01 + 100.0 * rng.next_f64();
        let mut scaled = p.0.clone();
        scaled.scale(c);
        let scaled = PcaProjection(scaled);
        for (version, f) in [("v1", principled_v1 as fn(&_, _) -> _), ("v2", principled_v2)] {
            let (a, b) = (f(&p, n).unwrap(), f(&scaled, n).unwrap());
            ensure(a.indices == b.indices, format!("{version} scaling case {case} (c={c})"))?;
        }
    }
    Ok("hand examples exact; n=1 equivalence 100/100; scaling invariance 100/100".into())
}

fn pca_oracle_equivalence() -> Verdict {
    let mut rng = SplitMix64::new(0x9CA);
    let mut worst_component: f64 = 0.0;
    let mut worst_variance: f64 = 0.0;
    for case in 0..50 {
        let rows = 2 + rng.index(59);
        let cols = 1 + rng.index(12);
        let data = (0..rows * cols).map(|i| rng.normal() * (1.0 + (i % cols) as f64)).collect();
        let x = Matrix::from_vec(rows, cols, data).unwrap();
        let n = cols.min(rows - 1);
        let (model, p) = pca::fit_project(&x, n).unwrap();

        let a = DMatrix::from_row_slice(rows, cols, x.as_slice());
        let mean = a.row_mean();
        let mut centered = a.clone();
        for mut row in centered.row_iter_mut() {
            row -= &mean;
        }
        let cov = centered.transpose() * &centered / (rows as f64 - 1.0);
        let eig = cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
        for (c, &e) in order.iter().take(n).enumerate() {
            let mut v: Vec<f64> = eig.eigenvectors.column(e).iter().copied().collect();
            fix_sign(&mut v);
            for (u, w) in model.components.row(c).iter().zip(&v) {
                worst_component = worst_component.max((u - w).abs());
            }
            let col = p.values().column(c);
            let m = col.iter().sum::<f64>() / rows as f64;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (rows - 1) as f64;
            let ev = model.explained_variance[c];
            worst_variance = worst_variance.max((var - ev).abs() / ev.max(f64::MIN_POSITIVE));
        }
        ensure(worst_component <= 1e-8, format!("case {case} ({rows}x{cols}): component error {worst_component:e}"))?;
        ensure(worst_variance <= 1e-6, format!("case {case} ({rows}x{cols}): variance error {worst_variance:e}"))?;
    }
    Ok(format!("max component error {worst_component:.2e}, max relative variance error {worst_variance:.2e}"))
}

fn tfidf_reference(docs: &[String], max_df: f64, min_df: usize) -> Option<Vec<Vec<f64>>> {
    let stop: HashSet<String> = english_stop_words().into_iter().collect();
    let tokens: Vec<Vec<String>> = docs
        .iter()
        .map(|d| {
            d.to_lowercase()
                .split(|c: char| !c.is_alphanumeric())
                .filter(|t| t.chars().count() >= 2 && !stop.contains(*t))
                .map(String::from)
                .collect()
        })
        .collect();
    let n = docs.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for toks in &tokens {
        for t in toks.iter().map(String::as_str).collect::<HashSet<_>>() {
            *df.entry(t).or_default() += 1;
        }
    }
    let cap = (max_df * n).ceil() as usize;
    let mut vocab: Vec<&str> = df.iter().filter(|(_, &c)| c >= min_df && c <= cap).map(|(t, _)| *t).collect();
    if vocab.is_empty() {
        return None;
    }
    vocab.sort();
    Some(
        tokens
            .iter()
            .map(|toks| {
                let mut row: Vec<f64> = vocab
                    .iter()
                    .map(|t| {
                        let tf = toks.iter().filter(|x| x == t).count() as f64;
                        tf * (((1.0 + n) / (1.0 + df[t] as f64)).ln() + 1.0)
                    })
                    .collect();
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter_mut().for_each(|v| *v /= norm);
                }
                row
            })
            .collect(),
    )
}

fn tfidf_equivalence() -> Verdict {
    const WORDS: [&str; 12] =
        ["river", "stone", "the", "and", "x", "Moon", "moon", "a1", "b2", "LIGHT", "shadow", "tree"];
    let mut rng = SplitMix64::new(0x7F1D);
    let (mut corpora, mut worst, mut worst_norm) = (0, 0.0f64, 0.0f64);
    while corpora < 20 {
        let docs: Vec<String> = (0..2 + rng.index(9))
            .map(|_| (0..rng.index(10)).map(|_| WORDS[rng.index(WORDS.len())]).collect::<Vec<_>>().join(" "))
            .collect();
        let config = TfidfConfig { max_df: 0.6 + 0.4 * rng.next_f64(), min_df: 1 + rng.index(2), ..Default::default() };
        let Some(expected) = tfidf_reference(&docs, config.max_df, config.min_df) else {
            ensure(fit_transform(&docs, &config).is_err(), "empty vocabulary not reported")?;
            continue;
        };
        let (_, m) = fit_transform(&docs, &config).map_err(|e| e.to_string())?;
        for (i, row) in expected.iter().enumerate() {
            ensure(m.row(i).len() == row.len(), format!("corpus {corpora}: width mismatch"))?;
            for (a, b) in m.row(i).iter().zip(row) {
                worst = worst.max((a - b).abs());
            }
            let norm = m.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                worst_norm = worst_norm.max((norm - 1.0).abs());
            }
        }
        corpora += 1;
    }
    ensure(worst <= 1e-9, format!("max entry error {worst:e}"))?;
    ensure(worst_norm <= 1e-12, format!("max norm error {worst_norm:e}"))?;
    Ok(format!("20 corpora, max entry error {worst:.2e}, max norm error {worst_norm:.2e}"))
}

fn synthetic_config(dir: &Path, datasets: usize, seeds: u64) -> RunConfig {
    let cache = dir.join("cache");
    let spec = SyntheticSpec { datasets, ..Default::default() };
    let specs = synthetic::write_suite(&spec, &dir.join("data"), &cache).unwrap();
    let mut config = RunConfig::new(specs, dir.join("out"));
    config.embedders = vec![Embedder::remote(synthetic::cached_embedder_config(&cache))];
    config.seeds = (0..seeds).collect();
    config
}

fn directional_ordering() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let mut config = synthetic_config(dir.path(), 20, 10);
    config.samplers = ["v1", "v2", "random"].iter().map(|s| s.parse().unwrap()).collect();
    let outcome = harness::run_benchmark(&config).map_err(|e| e.to_string())?;
    ensure(outcome.failures.is_empty(), format!("{} failed runs", outcome.failures.len()))?;
    let mut per: HashMap<(&str, &str), Vec<f64>> = HashMap::new();
    for r in &outcome.results {
        ensure(r.curve.len() == 18, "sample length is not 18")?;
        per.entry((r.dataset_id.as_str(), r.sampler_id.as_str())).or_default().push(r.final_agg_wasted() as f64);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let overall = |s: &str| {
        let all: Vec<f64> = outcome.results.iter().filter(|r| r.sampler_id == s).map(|r| r.final_agg_wasted() as f64).collect();
        mean(&all)
    };
    let (v1, v2, random) = (overall("v1"), overall("v2"), overall("random"));
    let datasets: HashSet<&str> = outcome.results.iter().map(|r| r.dataset_id.as_str()).collect();
    let mut v1_wins = 0;
    let mut v2_wins = 0;
    for d in &datasets {
        ensure(per[&(*d, "random")].len() >= 10, "fewer than 10 seeds per dataset")?;
        let r = mean(&per[&(*d, "random")]);
        v1_wins += (mean(&per[&(*d, "v1")]) <= r) as usize;
        v2_wins += (mean(&per[&(*d, "v2")]) <= r) as usize;
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "mean final AggWasted v1 {v1:.3}, v2 {v2:.3}, random {random:.3}; per-dataset v1<=random {v1_wins}/{}, v2<=random {v2_wins}/{}; {elapsed:?}",
        datasets.len(),
        datasets.len()
    );
    ensure(v1 <= random && v2 <= random, detail.clone())?;
    ensure(elapsed < Duration::from_secs(120), format!("too slow: {detail}"))?;
    Ok(detail)
}

fn ablation_machinery() -> Verdict {
    let ds = &synthetic::generate(&SyntheticSpec { datasets: 1, ..Default::default() })[0];
    let oracle = LabelOracle::from_labels(&ds.labels);
    let (_, p) = pca::fit_project(&ds.embeddings, 6).unwrap();
    let runs = 200u64;
    let mut ablated = Vec::new();
    let mut random = Vec::new();
    for seed in 0..runs {
        let seq = ablate_parts(PrincipledVersion::V1, &Part::ALL, &p, 6, seed).unwrap();
        ablated.push(oracle.curve(&seq.indices).unwrap().total() as f64);
        let seq = baseline_random(ds.embeddings.rows(), 18, seed + 1_000_000).unwrap();
        random.push(oracle.curve(&seq.indices).unwrap().total() as f64);
    }
    let (d, p_value) = ks_two_sample(&ablated, &random);
    ensure(p_value > 0.01, format!("KS D={d:.3}, p={p_value:.4} over {runs} seeds"))?;

    let dir = tempfile::tempdir().unwrap();
    let config = synthetic_config(dir.path(), 3, 3);
    let suite = harness::run_ablation_suite(&config, &[PrincipledVersion::V1, PrincipledVersion::V2])
        .map_err(|e| e.to_string())?;
    for (table, base) in suite.tables.iter().zip(["v1", "v2"]) {
        let samplers: Vec<&str> = table.rows.iter().map(|r| r.sampler.as_str()).collect();
        let expected = [base.to_string(), format!("{base}-Y"), format!("{base}-Z"), format!("{base}-W")];
        ensure(samplers == expected, format!("{base} table rows {samplers:?}"))?;
        let reference = table.rows.iter().find(|r| r.sampler == base).unwrap();
        ensure(reference.change.value == 0.0, format!("{base} reference change {}", reference.change.value))?;
    }
    Ok(format!("KS D={d:.3}, p={p_value:.3} over {runs} seeds; ablation tables v1/v2 with reference rows at 0.0"))
}

fn timing_shape() -> Verdict {
    let x = synthetic::random_embeddings(3000, 32, 11);
    let samplers: Vec<SamplerId> = harness::DEFAULT_SAMPLERS.iter().map(|s| s.parse().unwrap()).collect();
    let mut notes = Vec::new();
    let mut ratio = 0.0;
    for mode in [TimingMode::DatasetSize, TimingMode::SampleCount] {
        let config = TimingConfig::new(mode, samplers.clone());
        let report = timing::timing_sweep(&x, &config).map_err(|e| e.to_string())?;
        let grid = timing::grid(mode);
        ensure(report.cells.len() == grid.len() * samplers.len(), format!("{mode}: {} cells", report.cells.len()))?;
        ensure(report.skipped.is_empty(), format!("{mode}: skipped grid points"))?;
        ensure(config.repetitions >= 5, "fewer than 5 repetitions")?;
        for point in &grid {
            for s in &samplers {
                let id = s.to_string();
                let cell = report.cell(&id, point.rows, point.k).ok_or(format!("{mode}: missing {id} {point:?}"))?;
                let raw: Vec<&timing::TimingRecord> = report
                    .records
                    .iter()
                    .filter(|r| r.sampler_id == id && r.rows == point.rows && r.k == point.k)
                    .collect();
                ensure(raw.len() == config.repetitions, format!("{mode}: {id} {point:?} has {} records", raw.len()))?;
                ensure(raw.iter().all(|r| r.sample_ns > 0), "non-positive time")?;
                let times: Vec<f64> = raw.iter().map(|r| r.sample_ns as f64).collect();
                ensure(cell.sample_ns == trimmed_mean(&times), "summary is not the trimmed mean")?;
            }
        }
        let rows: Vec<usize> = grid.iter().map(|p| p.rows).collect();
        let ks: Vec<usize> = grid.iter().map(|p| p.k).collect();
        notes.push(format!("{mode} grid N={rows:?} k={ks:?}"));
        if mode == TimingMode::DatasetSize {
            let big = report.cell("rss", 2000, 60).unwrap().sample_ns;
            let small = report.cell("rss", 500, 60).unwrap().sample_ns;
            ratio = big / small;
        }
    }
    let detail = format!("{}; rss time ratio N=2000/N=500 = {ratio:.1}", notes.join("; "));
    ensure(ratio >= 4.0, detail.clone())?;
    Ok(detail)
}

fn end_to_end_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let specs = synthetic::write_suite(&SyntheticSpec::default(), &dir.path().join("data"), &cache).unwrap();
    let config_path = dir.path().join("bench.toml");
    std::fs::write(&config_path, synthetic::bench_config_toml(&specs, &cache, &dir.path().join("unused"))).unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_divsamp"))
            .arg("bench")
            .arg("--config")
            .arg(&config_path)
            .arg("--output-dir")
            .arg(&out)
            .output()
            .unwrap();
        ensure(status.status.success(), format!("bench failed: {}", String::from_utf8_lossy(&status.stderr)))?;
        let files: Vec<Vec<u8>> =
            ["curves.csv", "summary.csv"].iter().map(|f| std::fs::read(out.join(f)).unwrap()).collect();
        outputs.push(files);
    }
    ensure(outputs[0][0] == outputs[1][0], "curves.csv differs between runs")?;
    ensure(outputs[0][1] == outputs[1][1], "summary.csv differs between runs")?;
    let lines = String::from_utf8_lossy(&outputs[0][0]).lines().count();
    Ok(format!("curves.csv ({lines} lines) and summary.csv byte-identical across two runs"))
}

fn main() {
    let criteria: [(u8, &str, fn() -> Verdict); 10] = [
        (1, "worked-example exactness", worked_examples),
        (2, "threshold-oracle minimum search", threshold_oracle_minimum),
        (3, "label-oracle zero optimum", label_oracle_zero_optimum),
        (4, "principled sampler fidelity", algorithm_fidelity),
        (5, "PCA vs covariance eigendecomposition", pca_oracle_equivalence),
        (6, "TF-IDF formula equivalence", tfidf_equivalence),
        (7, "synthetic suite ordering v1,v2 <= random", directional_ordering),
        (8, "ablation machinery", ablation_machinery),
        (9, "timing sweep shape", timing_shape),
        (10, "end-to-end determinism", end_to_end_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        let verdict = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", e.downcast_ref::<String>().cloned().unwrap_or_default())));
        match verdict {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
