//! Lloyd's k-means with k-means++ seeding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::rng::SplitMix64;

pub const MAX_ITERATIONS: usize = 300;
pub const RELATIVE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Matrix,
    /// Cluster of each row.
    pub assignment: Vec<usize>,
    pub inertia: f64,
    pub iterations: usize,
}

impl KMeans {
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignment.iter().enumerate().filter(|&(_, &c)| c == cluster).map(|(i, _)| i).collect()
    }

    /// Renumbers clusters by their smallest member row; empty clusters go last.
    pub fn canonicalize(&mut self) {
        let k = self.centroids.rows();
        let mut first = vec![usize::MAX; k];
        for (i, &c) in self.assignment.iter().enumerate() {
            first[c] = first[c].min(i);
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&c| (first[c], c));
        let mut new_of = vec![0; k];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        self.centroids = self.centroids.select_rows(&order);
        for c in &mut self.assignment {
            *c = new_of[*c];
        }
    }
}

/// Seeds `k` centers: the first uniformly, each next one with probability
/// proportional to its squared distance from the nearest chosen center.
pub fn plus_plus_init(x: &Matrix, k: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let n = x.rows();
    let mut centers = vec![rng.index(n)];
    let mut d2: Vec<f64> = x.iter_rows().map(|r| squared_distance(r, x.row(centers[0]))).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave target just past the running sum
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap_or(0))
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !centers.contains(i)).collect();
            if free.is_empty() {
                rng.index(n)
            } else {
                free[rng.index(free.len())]
            }
        };
        centers.push(next);
        for (i, r) in x.iter_rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(r, x.row(next)));
        }
    }
    centers
}

fn nearest(row: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter_rows().enumerate() {
        let d = squared_distance(row, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

pub fn kmeans(x: &Matrix, k: usize, rng: &mut SplitMix64) -> Result<KMeans> {
    let n = x.rows();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if n < k {
        return Err(Error::TooFewRows { needed: k, got: n });
    }
    let seeds = plus_plus_init(x, k, rng);
    let mut centroids = x.select_rows(&seeds);
    let mut assignment = vec![0usize; n];
    let mut previous = f64::INFINITY;
    let mut inertia = 0.0;
    let mut iterations = 0;
    for it in 0..MAX_ITERATIONS {
        iterations = it + 1;
        inertia = 0.0;
        for (i, row) in x.iter_rows().enumerate() {
            let (c, d) = nearest(row, &centroids);
            assignment[i] = c;
            inertia += d;
        }
        let mut sums = Matrix::zeros(k, x.cols());
        let mut counts = vec![0usize; k];
        for (i, row) in x.iter_rows().enumerate() {
            counts[assignment[i]] += 1;
            for (s, v) in sums.row_mut(assignment[i]).iter_mut().zip(row) {
                *s += v;
            }
        }
        for c in 0..k {
            // empty clusters keep their previous centroid
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s * inv;
                }
            }
        }
        if inertia == 0.0 || (previous - inertia) / previous < RELATIVE_TOLERANCE {
            break;
        }
        previous = inertia;
    }
    // final assignment against the last centroid update
    for (i, row) in x.iter_rows().enumerate() {
        assignment[i] = nearest(row, &centroids).0;
    }
    Ok(KMeans { centroids, assignment, inertia, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Matrix {
        Matrix::from_vec(points.len(), 1, points.to_vec()).unwrap()
    }

    #[test]
    fn separates_two_groups() {
        let x = line(&[0.0, 0.1, 0.2, 10.0, 10.1, 10.2]);
        for seed in 0..20 {
            let mut km = kmeans(&x, 2, &mut SplitMix64::new(seed)).unwrap();
            km.canonicalize();
            assert_eq!(km.assignment, vec![0, 0, 0, 1, 1, 1]);
            assert!((km.centroids.get(0, 0) - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn plus_plus_picks_distinct_points() {
        let x = line(&[0.0, 0.0, 5.0, 9.0]);
        for seed in 0..20 {
            let c = plus_plus_init(&x, 3, &mut SplitMix64::new(seed));
            let mut vals: Vec<f64> = c.iter().map(|&i| x.get(i, 0)).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(vals, vec![0.0, 5.0, 9.0]);
        }
    }

    #[test]
    fn rejects_bad_k() {
        let x = line(&[1.0, 2.0]);
        assert!(kmeans(&x, 0, &mut SplitMix64::new(0)).is_err());
        assert!(kmeans(&x, 3, &mut SplitMix64::new(0)).is_err());
    }
}
