//! Ordered diversity samplers.
//!
//! Every sampler maps an embedded dataset to an ordered list of distinct
//! row indices. The PCA-projection samplers (`v1`, `v2` and their ablated
//! variants) are deterministic; the baselines take a seed.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::{self, PcaProjection};

mod baselines;
pub mod kmeans;
mod principled;

pub use baselines::{
    baseline_clustering, baseline_clustering_projected, baseline_kcenter, baseline_kcenter_from, baseline_pca_clustering,
    baseline_random, baseline_reverse_semantic_search, covering_radius,
};
pub use principled::{
    ablate, ablate_parts, dedup_next_best, principled_v1, principled_v2, selection_sets, AblationSpec,
    Part, PrincipledVersion, SelectionSets,
};

/// Every accepted sampler id, in display order.
pub const SAMPLER_IDS: [&str; 13] = [
    "v1",
    "v2",
    "v1-Y",
    "v1-Z",
    "v1-W",
    "v2-Y",
    "v2-Z",
    "v2-W",
    "clustering",
    "pca-clustering",
    "rss",
    "kcenter",
    "random",
];

/// An ordered diversity sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSequence {
    pub indices: Vec<usize>,
    pub sampler_id: String,
    pub params: BTreeMap<String, String>,
    /// Set when the dataset ran out of rows before the requested length.
    pub truncated: bool,
}

impl SampleSequence {
    pub(crate) fn new(sampler_id: &str, indices: Vec<usize>, requested: usize) -> Self {
        let truncated = indices.len() < requested;
        Self { indices, sampler_id: sampler_id.to_string(), params: BTreeMap::new(), truncated }
    }

    pub(crate) fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SamplerId {
    Principled(PrincipledVersion),
    Ablated(PrincipledVersion, Part),
    Clustering,
    PcaClustering,
    ReverseSemanticSearch,
    KCenter,
    Random,
}

impl SamplerId {
    pub fn all() -> Vec<SamplerId> {
        SAMPLER_IDS.iter().map(|s| s.parse().expect("registry ids parse")).collect()
    }

    /// Whether the sampler consumes the PCA projection of the embeddings.
    pub fn uses_projection(self) -> bool {
        matches!(self, SamplerId::Principled(_) | SamplerId::Ablated(..))
    }

    pub fn uses_pca(self) -> bool {
        self.uses_projection() || self == SamplerId::PcaClustering
    }
}

impl fmt::Display for SamplerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerId::Principled(v) => write!(f, "{v}"),
            SamplerId::Ablated(v, p) => write!(f, "{v}-{p}"),
            SamplerId::Clustering => f.write_str("clustering"),
            SamplerId::PcaClustering => f.write_str("pca-clustering"),
            SamplerId::ReverseSemanticSearch => f.write_str("rss"),
            SamplerId::KCenter => f.write_str("kcenter"),
            SamplerId::Random => f.write_str("random"),
        }
    }
}

impl FromStr for SamplerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let version = |v: &str| match v {
            "v1" => Some(PrincipledVersion::V1),
            "v2" => Some(PrincipledVersion::V2),
            _ => None,
        };
        Ok(match s {
            "clustering" => SamplerId::Clustering,
            "pca-clustering" => SamplerId::PcaClustering,
            "rss" => SamplerId::ReverseSemanticSearch,
            "kcenter" => SamplerId::KCenter,
            "random" => SamplerId::Random,
            _ => {
                if let Some(v) = version(s) {
                    SamplerId::Principled(v)
                } else {
                    let (base, part) = s.split_once('-').ok_or_else(|| Error::UnknownSampler(s.into()))?;
                    let v = version(base).ok_or_else(|| Error::UnknownSampler(s.into()))?;
                    let p = match part {
                        "Y" => Part::Y,
                        "Z" => Part::Z,
                        "W" => Part::W,
                        _ => return Err(Error::UnknownSampler(s.into())),
                    };
                    SamplerId::Ablated(v, p)
                }
            }
        })
    }
}

/// Distance used by the clustering, reverse-semantic-search and k-center
/// baselines. Cosine is realized as Euclidean distance between unit-norm
/// rows, which orders pairs identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    Euclidean,
    Cosine,
}

impl FromStr for Distance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Distance::Euclidean),
            "cosine" => Ok(Distance::Cosine),
            _ => Err(Error::InvalidParameter(alloc::format!("unknown distance {s:?}"))),
        }
    }
}

pub(crate) fn apply_distance(x: &Matrix, distance: Distance) -> alloc::borrow::Cow<'_, Matrix> {
    match distance {
        Distance::Euclidean => alloc::borrow::Cow::Borrowed(x),
        Distance::Cosine => {
            let mut m = x.clone();
            m.normalize_rows();
            alloc::borrow::Cow::Owned(m)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerParams {
    /// Number of principal components; samplers return `3n` indices.
    pub n: usize,
    pub seed: u64,
    /// PCA dimension for `pca-clustering`; defaults to `n`.
    pub n_components: Option<usize>,
    pub distance: Distance,
}

impl SamplerParams {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, n_components: None, distance: Distance::Euclidean }
    }
}

/// Runs any sampler by id. `projection` may carry a precomputed
/// `n`-component projection of `x`; it is fitted on demand otherwise.
pub fn run(id: SamplerId, x: &Matrix, projection: Option<&PcaProjection>, params: &SamplerParams) -> Result<SampleSequence> {
    let n = params.n;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let k = 3 * n;
    let owned;
    let projection = if id.uses_projection() {
        match projection {
            Some(p) if p.cols() == n && p.rows() == x.rows() => Some(p),
            Some(p) => return Err(Error::DimensionMismatch { expected: n, got: p.cols() }),
            None => {
                owned = pca::fit_project(x, n)?.1;
                Some(&owned)
            }
        }
    } else {
        None
    };
    let seq = match id {
        SamplerId::Principled(PrincipledVersion::V1) => principled_v1(projection.expect("projection"), n)?,
        SamplerId::Principled(PrincipledVersion::V2) => principled_v2(projection.expect("projection"), n)?,
        SamplerId::Ablated(base, part) => {
            ablate(&AblationSpec { base, removed_part: part, seed: params.seed }, projection.expect("projection"), n)?
        }
        SamplerId::Clustering => baseline_clustering(x, n, params.seed, params.distance)?,
        SamplerId::PcaClustering => {
            baseline_pca_clustering(x, n, params.n_components.unwrap_or(n), params.seed, params.distance)?
        }
        SamplerId::ReverseSemanticSearch => baseline_reverse_semantic_search(x, k, params.distance)?,
        SamplerId::KCenter => baseline_kcenter(x, k, params.seed, params.distance)?,
        SamplerId::Random => baseline_random(x.rows(), k, params.seed)?,
    };
    Ok(seq)
}

/// Index of the best unselected score; ties go to the lowest index.
pub(crate) fn best_unselected(scores: &[f64], selected: &[bool], maximize: bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, &s) in scores.iter().enumerate() {
        if selected[j] {
            continue;
        }
        best = match best {
            None => Some(j),
            Some(b) if (maximize && s > scores[b]) || (!maximize && s < scores[b]) => Some(j),
            keep => keep,
        };
    }
    best
}

/// Indices ordered by score (ascending or descending), ties by index.
pub(crate) fn ranking(scores: &[f64], descending: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let ord = scores[a].partial_cmp(&scores[b]).unwrap_or(core::cmp::Ordering::Equal);
        let ord = if descending { ord.reverse() } else { ord };
        ord.then(a.cmp(&b))
    });
    order
}

/// Uniform pick among unselected indices in `pool` (all rows when `None`).
pub(crate) fn random_unselected(
    n: usize,
    pool: Option<&[usize]>,
    selected: &[bool],
    rng: &mut crate::rng::SplitMix64,
) -> Option<usize> {
    let free: Vec<usize> = match pool {
        Some(p) => p.iter().copied().filter(|&i| !selected[i]).collect(),
        None => (0..n).filter(|&i| !selected[i]).collect(),
    };
    if free.is_empty() {
        None
    } else {
        Some(free[rng.index(free.len())])
    }
}
