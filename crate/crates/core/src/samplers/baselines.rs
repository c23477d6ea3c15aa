//! Baseline samplers: k-means clustering (with and without a PCA step),
//! reverse semantic search, greedy k-center and uniform random.

use alloc::vec;
use alloc::vec::Vec;

use super::kmeans::kmeans;
use super::principled::dedup_next_best;
use super::{apply_distance, random_unselected, Distance, SampleSequence};
use crate::error::{Error, Result};
use crate::matrix::{distance, squared_distance, Matrix};
use crate::pca::{self, PcaProjection};
use crate::rng::{partial_shuffle, SplitMix64};

/// Above this many rows the pairwise table is not materialized.
const PAIR_TABLE_LIMIT: usize = 4096;

fn check_rows(x: &Matrix) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

/// k-means with `k = n`, then three picks per cluster, clusters ordered by
/// their smallest member row: the member nearest the centroid, the member
/// farthest from it, and a random remaining member. Taken rows are replaced
/// by the next row in the same ranking; rankings continue past the cluster
/// into non-members ordered by distance to the centroid. An empty cluster
/// contributes three random rows.
pub fn baseline_clustering(x: &Matrix, n: usize, seed: u64, metric: Distance) -> Result<SampleSequence> {
    check_rows(x)?;
    let x = apply_distance(x, metric);
    let indices = cluster_picks(&x, n, seed)?;
    Ok(SampleSequence::new("clustering", indices, 3 * n).with_param("n", n).with_param("seed", seed))
}

/// [`baseline_clustering`] run on the PCA projection of the embeddings.
pub fn baseline_pca_clustering(
    x: &Matrix,
    n: usize,
    n_components: usize,
    seed: u64,
    metric: Distance,
) -> Result<SampleSequence> {
    check_rows(x)?;
    let x = apply_distance(x, metric);
    let (_, projection) = pca::fit_project(&x, n_components)?;
    baseline_clustering_projected(&projection, n, seed)
}

/// The clustering step of [`baseline_pca_clustering`] on a projection that
/// was computed (and distance-adjusted) by the caller.
pub fn baseline_clustering_projected(projection: &PcaProjection, n: usize, seed: u64) -> Result<SampleSequence> {
    check_rows(projection.values())?;
    let indices = cluster_picks(projection.values(), n, seed)?;
    Ok(SampleSequence::new("pca-clustering", indices, 3 * n)
        .with_param("n", n)
        .with_param("n_components", projection.cols())
        .with_param("seed", seed))
}

fn cluster_picks(x: &Matrix, n: usize, seed: u64) -> Result<Vec<usize>> {
    let rows = x.rows();
    let mut rng = SplitMix64::new(seed);
    let mut km = kmeans(x, n, &mut rng)?;
    km.canonicalize();
    let mut selected = vec![false; rows];
    let mut picks = Vec::with_capacity(3 * n);
    let take = |pick: Option<usize>, selected: &mut [bool], picks: &mut Vec<usize>| {
        if let Some(j) = pick {
            selected[j] = true;
            picks.push(j);
        }
    };
    for c in 0..n {
        let members = km.members(c);
        if members.is_empty() {
            for _ in 0..3 {
                let pick = random_unselected(rows, None, &selected, &mut rng);
                take(pick, &mut selected, &mut picks);
            }
            continue;
        }
        let centroid = km.centroids.row(c);
        let d: Vec<f64> = x.iter_rows().map(|r| squared_distance(r, centroid)).collect();
        let by_distance = |ids: &mut Vec<usize>, descending: bool| {
            ids.sort_by(|&a, &b| {
                let ord = d[a].partial_cmp(&d[b]).unwrap_or(core::cmp::Ordering::Equal);
                let ord = if descending { ord.reverse() } else { ord };
                ord.then(a.cmp(&b))
            });
        };
        let mut outsiders: Vec<usize> = (0..rows).filter(|&i| km.assignment[i] != c).collect();
        by_distance(&mut outsiders, false);

        let mut nearest = members.clone();
        by_distance(&mut nearest, false);
        nearest.extend_from_slice(&outsiders);
        let pick = dedup_next_best(&nearest, &selected);
        take(pick, &mut selected, &mut picks);

        let mut farthest = members.clone();
        by_distance(&mut farthest, true);
        farthest.extend_from_slice(&outsiders);
        let pick = dedup_next_best(&farthest, &selected);
        take(pick, &mut selected, &mut picks);

        let pick = random_unselected(rows, Some(&members), &selected, &mut rng)
            .or_else(|| random_unselected(rows, None, &selected, &mut rng));
        take(pick, &mut selected, &mut picks);
    }
    Ok(picks)
}

/// Repeatedly takes the farthest-apart pair of unselected rows, lower index
/// first. Ties go to the lexicographically smallest pair. An odd `k` ends
/// with the lower index of the final pair.
pub fn baseline_reverse_semantic_search(x: &Matrix, k: usize, metric: Distance) -> Result<SampleSequence> {
    check_rows(x)?;
    let x = apply_distance(x, metric);
    let n = x.rows();
    let table = (n <= PAIR_TABLE_LIMIT).then(|| {
        let mut t = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                t.push(squared_distance(x.row(i), x.row(j)));
            }
        }
        t
    });
    let mut selected = vec![false; n];
    let mut picks = Vec::with_capacity(k);
    while picks.len() < k {
        let mut best: Option<(usize, usize, f64)> = None;
        let mut offset = 0;
        for i in 0..n {
            let row_start = offset;
            offset += n - i - 1;
            if selected[i] {
                continue;
            }
            for j in i + 1..n {
                if selected[j] {
                    continue;
                }
                let d = match &table {
                    Some(t) => t[row_start + (j - i - 1)],
                    None => squared_distance(x.row(i), x.row(j)),
                };
                if best.is_none_or(|(_, _, b)| d > b) {
                    best = Some((i, j, d));
                }
            }
        }
        match best {
            Some((i, j, _)) => {
                selected[i] = true;
                picks.push(i);
                if picks.len() < k {
                    selected[j] = true;
                    picks.push(j);
                }
            }
            None => {
                if let Some(last) = selected.iter().position(|s| !s) {
                    selected[last] = true;
                    picks.push(last);
                }
                break;
            }
        }
    }
    Ok(SampleSequence::new("rss", picks, k).with_param("k", k))
}

/// Greedy k-center from a seeded-uniform start row.
pub fn baseline_kcenter(x: &Matrix, k: usize, seed: u64, metric: Distance) -> Result<SampleSequence> {
    check_rows(x)?;
    let start = SplitMix64::new(seed).index(x.rows());
    let seq = baseline_kcenter_from(x, k, start, metric)?;
    Ok(seq.with_param("seed", seed))
}

/// Greedy k-center from a given start row: each step adds the unselected
/// row whose distance to the nearest selected row is largest (lowest index
/// on ties).
pub fn baseline_kcenter_from(x: &Matrix, k: usize, start: usize, metric: Distance) -> Result<SampleSequence> {
    check_rows(x)?;
    let x = apply_distance(x, metric);
    let n = x.rows();
    if start >= n {
        return Err(Error::InvalidParameter(alloc::format!("start row {start} out of range for {n} rows")));
    }
    let mut selected = vec![false; n];
    let mut min_d: Vec<f64> = vec![f64::INFINITY; n];
    let mut picks = Vec::with_capacity(k.min(n));
    let mut next = Some(start);
    while let Some(p) = next {
        if picks.len() == k {
            break;
        }
        selected[p] = true;
        picks.push(p);
        let anchor = x.row(p);
        for (i, r) in x.iter_rows().enumerate() {
            if !selected[i] {
                min_d[i] = min_d[i].min(squared_distance(r, anchor));
            }
        }
        next = super::best_unselected(&min_d, &selected, true);
    }
    Ok(SampleSequence::new("kcenter", picks, k).with_param("k", k).with_param("start", start))
}

/// Largest distance from an unselected row to its nearest selected row.
pub fn covering_radius(x: &Matrix, chosen: &[usize]) -> f64 {
    let mut selected = vec![false; x.rows()];
    for &c in chosen {
        selected[c] = true;
    }
    x.iter_rows()
        .enumerate()
        .filter(|&(i, _)| !selected[i])
        .map(|(_, r)| chosen.iter().map(|&c| distance(r, x.row(c))).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// The first `k` draws of a seeded Fisher-Yates shuffle of `0..n`.
pub fn baseline_random(n: usize, k: usize, seed: u64) -> Result<SampleSequence> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let picks = partial_shuffle(n, k, &mut SplitMix64::new(seed));
    Ok(SampleSequence::new("random", picks, k).with_param("k", k).with_param("seed", seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Matrix {
        Matrix::from_vec(points.len(), 1, points.to_vec()).unwrap()
    }

    #[test]
    fn clustering_separated_groups() {
        let x = line(&[0.0, 0.1, 0.2, 10.0, 10.1, 10.2]);
        for seed in 0..10 {
            let seq = baseline_clustering(&x, 2, seed, Distance::Euclidean).unwrap();
            assert_eq!(&seq.indices[..3], &[1, 0, 2]);
            assert_eq!(seq.indices[3], 4);
            let mut rest = seq.indices[4..].to_vec();
            rest.sort_unstable();
            assert_eq!(rest, vec![3, 5]);
        }
    }

    #[test]
    fn clustering_exhausts_triples() {
        let mut pts = Vec::new();
        for c in 0..4 {
            for d in [0.0, 0.3, 0.5] {
                pts.push(c as f64 * 1000.0 + d);
            }
        }
        let x = line(&pts);
        for seed in 0..10 {
            let seq = baseline_clustering(&x, 4, seed, Distance::Euclidean).unwrap();
            let mut s = seq.indices.clone();
            s.sort_unstable();
            assert_eq!(s, (0..12).collect::<Vec<_>>());
            // grouped cluster by cluster
            for (g, chunk) in seq.indices.chunks(3).enumerate() {
                assert!(chunk.iter().all(|&i| i / 3 == g));
            }
        }
    }

    #[test]
    fn clustering_deterministic() {
        let mut rng = SplitMix64::new(11);
        let x = Matrix::from_vec(30, 3, (0..90).map(|_| rng.normal()).collect()).unwrap();
        assert_eq!(
            baseline_clustering(&x, 3, 5, Distance::Euclidean).unwrap(),
            baseline_clustering(&x, 3, 5, Distance::Euclidean).unwrap()
        );
    }

    #[test]
    fn rss_hand_example() {
        let x = line(&[0.0, 1.0, 10.0, 11.0]);
        let seq = baseline_reverse_semantic_search(&x, 4, Distance::Euclidean).unwrap();
        assert_eq!(seq.indices, vec![0, 3, 1, 2]);
    }

    #[test]
    fn rss_identical_pair() {
        let x = line(&[2.0, 2.0]);
        assert_eq!(baseline_reverse_semantic_search(&x, 2, Distance::Euclidean).unwrap().indices, vec![0, 1]);
    }

    #[test]
    fn rss_simplex_tie_rule() {
        let x = Matrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(baseline_reverse_semantic_search(&x, 4, Distance::Euclidean).unwrap().indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rss_odd_k_and_truncation() {
        let x = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(baseline_reverse_semantic_search(&x, 3, Distance::Euclidean).unwrap().indices, vec![0, 3, 1]);
        let x = line(&[0.0, 1.0, 10.0]);
        let seq = baseline_reverse_semantic_search(&x, 4, Distance::Euclidean).unwrap();
        assert_eq!(seq.indices, vec![0, 2, 1]);
        assert!(seq.truncated);
    }

    #[test]
    fn kcenter_hand_example() {
        let x = line(&[0.0, 1.0, 10.0]);
        assert_eq!(baseline_kcenter_from(&x, 3, 0, Distance::Euclidean).unwrap().indices, vec![0, 2, 1]);
    }

    #[test]
    fn kcenter_duplicate_of_start_comes_last() {
        let x = line(&[0.0, 4.0, 0.0, 9.0, 2.0]);
        let seq = baseline_kcenter_from(&x, 5, 0, Distance::Euclidean).unwrap();
        assert_eq!(*seq.indices.last().unwrap(), 2);
    }

    #[test]
    fn kcenter_full_permutation() {
        let x = line(&[3.0, 1.0, 4.0, 1.5, 9.0, 2.6]);
        let mut s = baseline_kcenter(&x, 6, 8, Distance::Euclidean).unwrap().indices;
        s.sort_unstable();
        assert_eq!(s, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn random_singleton_and_determinism() {
        assert_eq!(baseline_random(1, 1, 99).unwrap().indices, vec![0]);
        assert_eq!(baseline_random(50, 10, 4).unwrap(), baseline_random(50, 10, 4).unwrap());
    }

    #[test]
    fn covering_radius_of_line() {
        let x = line(&[0.0, 1.0, 10.0]);
        assert_eq!(covering_radius(&x, &[0]), 10.0);
        assert_eq!(covering_radius(&x, &[0, 2]), 1.0);
    }

    #[test]
    fn cosine_ignores_row_length() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [5.0, 0.0], [0.0, 1.0], [0.0, 3.0]]).unwrap();
        let seq = baseline_kcenter_from(&x, 2, 0, Distance::Cosine).unwrap();
        assert_eq!(seq.indices, vec![0, 2]);
    }
}
