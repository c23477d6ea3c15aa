//! Aggregation of per-run scores into curves and comparison tables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Per-step arithmetic mean of running totals. All curves must have the
/// same length.
pub fn aggregate_curves<C: AsRef<[usize]>>(curves: &[C]) -> Result<Vec<f64>> {
    let Some(first) = curves.first() else {
        return Ok(Vec::new());
    };
    let len = first.as_ref().len();
    let mut sums = vec![0.0; len];
    for c in curves {
        let c = c.as_ref();
        if c.len() != len {
            return Err(Error::MixedCurveLengths { expected: len, got: c.len() });
        }
        for (s, &v) in sums.iter_mut().zip(c) {
            *s += v as f64;
        }
    }
    let count = curves.len() as f64;
    Ok(sums.into_iter().map(|s| s / count).collect())
}

/// Change of `value` relative to `reference`: percent when the reference is
/// nonzero, plain difference otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Change {
    pub value: f64,
    /// `false` when the reference was zero and `value` is an absolute difference.
    pub relative: bool,
}

pub fn percent_increase(value: f64, reference: f64) -> Change {
    if reference == 0.0 {
        Change { value: value - reference, relative: false }
    } else {
        Change { value: 100.0 * (value - reference) / reference, relative: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// Row group, normally the embedder id.
    pub group: String,
    pub sampler: String,
    pub runs: usize,
    pub mean_final: f64,
    pub change: Change,
}

/// Mean final score per (group, sampler) and its change against the
/// reference sampler of the same group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    pub reference: String,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// `scores` holds `(group, sampler, final score)` per run. Rows come out
    /// sorted by group, with samplers in first-appearance order.
    pub fn build<G: AsRef<str>, S: AsRef<str>>(scores: &[(G, S, f64)], reference: &str) -> Result<Self> {
        let mut groups: BTreeMap<&str, (Vec<&str>, BTreeMap<&str, (f64, usize)>)> = BTreeMap::new();
        for (g, s, v) in scores {
            let (order, acc) = groups.entry(g.as_ref()).or_default();
            let e = acc.entry(s.as_ref()).or_insert_with(|| {
                order.push(s.as_ref());
                (0.0, 0)
            });
            e.0 += v;
            e.1 += 1;
        }
        let mut rows = Vec::new();
        for (group, (order, acc)) in &groups {
            let (ref_sum, ref_n) = acc.get(reference).ok_or_else(|| Error::MissingReference(reference.into()))?;
            let ref_mean = ref_sum / *ref_n as f64;
            for s in order {
                let (sum, n) = acc[s];
                let mean = sum / n as f64;
                let change =
                    if *s == reference { Change { value: 0.0, relative: ref_mean != 0.0 } } else { percent_increase(mean, ref_mean) };
                rows.push(SummaryRow { group: String::from(*group), sampler: String::from(*s), runs: n, mean_final: mean, change });
            }
        }
        Ok(Self { reference: reference.into(), rows })
    }

    pub fn row(&self, group: &str, sampler: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.group == group && r.sampler == sampler)
    }
}

/// Mean after dropping one minimum and one maximum (plain mean for fewer
/// than three values).
pub fn trimmed_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let kept = if v.len() >= 3 { &v[1..v.len() - 1] } else { &v[..] };
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Two-sample Kolmogorov-Smirnov test. Returns the statistic `D` and the
/// asymptotic p-value (with the usual small-sample correction of lambda).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (0.0, 1.0);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    let cmp = |p: &f64, q: &f64| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal);
    x.sort_by(cmp);
    y.sort_by(cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max(libm::fabs(i as f64 / n as f64 - j as f64 / m as f64));
    }
    let en = libm::sqrt((n * m) as f64 / (n + m) as f64);
    let lambda = (en + 0.12 + 0.11 / en) * d;
    (d, kolmogorov_q(lambda))
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = sign * 2.0 * libm::exp(-2.0 * kf * kf * lambda * lambda);
        sum += term;
        if libm::fabs(term) <= 1e-10 * libm::fabs(sum) {
            return sum.clamp(0.0, 1.0);
        }
        sign = -sign;
    }
    // the series did not settle, which only happens for tiny lambda
    1.0
}
