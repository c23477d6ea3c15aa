//! Projection-extreme samplers.
//!
//! For each of the `n` principal components the sampler picks the row with
//! the largest score (set Y) and the row with the smallest score (set Z),
//! then the `n` rows with the smallest infinity norm across all components
//! (set W). Output order is Y, then Z, then W.
//!
//! v1 scores a row by its projection on the component. v2 subtracts (for
//! Y) or adds (for Z) the absolute projections on every other component, so
//! it favours rows that load on one component only.
//!
//! Picks are made one at a time in output order against a global selected
//! set. When a set's preferred row is already taken, the next row in that
//! set's own ranking is used instead, so the result always holds `3n`
//! distinct rows when the dataset has that many.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{best_unselected, random_unselected, ranking, SampleSequence};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::{row_infinity_norms, PcaProjection};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrincipledVersion {
    V1,
    V2,
}

impl fmt::Display for PrincipledVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrincipledVersion::V1 => "v1",
            PrincipledVersion::V2 => "v2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Y,
    Z,
    W,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::Y, Part::Z, Part::W];
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Y => "Y",
            Part::Z => "Z",
            Part::W => "W",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SelectionSets {
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub w: Vec<usize>,
}

impl SelectionSets {
    pub fn concat(&self) -> Vec<usize> {
        self.y.iter().chain(&self.z).chain(&self.w).copied().collect()
    }

    fn part_mut(&mut self, part: Part) -> &mut Vec<usize> {
        match part {
            Part::Y => &mut self.y,
            Part::Z => &mut self.z,
            Part::W => &mut self.w,
        }
    }
}

/// A principled sampler with one of its three sets replaced by random picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AblationSpec {
    pub base: PrincipledVersion,
    pub removed_part: Part,
    pub seed: u64,
}

/// First entry of `ranking` that is not yet selected.
pub fn dedup_next_best(ranking: &[usize], selected: &[bool]) -> Option<usize> {
    ranking.iter().copied().find(|&j| !selected[j])
}

/// Score of every row for set Y (`upper`) or Z of component `i`.
fn component_scores(p: &Matrix, i: usize, version: PrincipledVersion, upper: bool) -> Vec<f64> {
    p.iter_rows()
        .map(|row| match version {
            PrincipledVersion::V1 => row[i],
            PrincipledVersion::V2 => {
                let others: f64 =
                    row.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| libm::fabs(*v)).sum();
                if upper {
                    row[i] - others
                } else {
                    row[i] + others
                }
            }
        })
        .collect()
}

/// Builds Y, Z and W. Parts listed in `removed` are filled with uniform
/// random unselected rows drawn from `seed` instead. Sets stop early if the
/// dataset is exhausted.
pub fn selection_sets(
    projection: &PcaProjection,
    n: usize,
    version: PrincipledVersion,
    removed: &[Part],
    seed: u64,
) -> Result<SelectionSets> {
    let p = projection.values();
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if p.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if p.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.cols() });
    }
    let rows = p.rows();
    let mut selected = vec![false; rows];
    let mut sets = SelectionSets::default();
    let mut rng = SplitMix64::new(seed);

    'parts: for part in [Part::Y, Part::Z, Part::W] {
        let w_ranking = (part == Part::W && !removed.contains(&part))
            .then(|| ranking(&row_infinity_norms(p), false));
        for i in 0..n {
            let pick = if removed.contains(&part) {
                random_unselected(rows, None, &selected, &mut rng)
            } else {
                match part {
                    Part::Y => best_unselected(&component_scores(p, i, version, true), &selected, true),
                    Part::Z => best_unselected(&component_scores(p, i, version, false), &selected, false),
                    Part::W => dedup_next_best(w_ranking.as_deref().unwrap_or(&[]), &selected),
                }
            };
            match pick {
                Some(j) => {
                    selected[j] = true;
                    sets.part_mut(part).push(j);
                }
                None => break 'parts,
            }
        }
    }
    Ok(sets)
}

fn finish(id: &str, sets: SelectionSets, n: usize) -> SampleSequence {
    SampleSequence::new(id, sets.concat(), 3 * n).with_param("n", n)
}

pub fn principled_v1(projection: &PcaProjection, n: usize) -> Result<SampleSequence> {
    let sets = selection_sets(projection, n, PrincipledVersion::V1, &[], 0)?;
    Ok(finish("v1", sets, n))
}

pub fn principled_v2(projection: &PcaProjection, n: usize) -> Result<SampleSequence> {
    let sets = selection_sets(projection, n, PrincipledVersion::V2, &[], 0)?;
    Ok(finish("v2", sets, n))
}

pub fn ablate(spec: &AblationSpec, projection: &PcaProjection, n: usize) -> Result<SampleSequence> {
    let sets = selection_sets(projection, n, spec.base, &[spec.removed_part], spec.seed)?;
    let id = alloc::format!("{}-{}", spec.base, spec.removed_part);
    Ok(finish(&id, sets, n).with_param("seed", spec.seed))
}

/// Ablation with any combination of parts removed.
pub fn ablate_parts(
    base: PrincipledVersion,
    removed: &[Part],
    projection: &PcaProjection,
    n: usize,
    seed: u64,
) -> Result<SampleSequence> {
    let sets = selection_sets(projection, n, base, removed, seed)?;
    let mut id = alloc::format!("{base}");
    for part in removed {
        id.push_str(&alloc::format!("-{part}"));
    }
    Ok(finish(&id, sets, n).with_param("seed", seed))
}
