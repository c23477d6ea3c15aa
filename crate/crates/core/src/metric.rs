//! Wasted-opportunity scoring of ordered samples.
//!
//! A pick is *wasted* when it is not new relative to the earlier picks
//! while some point of the dataset would have been. The aggregate over all
//! prefixes counts those picks; lower is better.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Judges whether the last element of a sequence of dataset indices is new
/// relative to the elements before it. Implementations must be pure.
pub trait IsNewOracle {
    /// Number of points in the dataset.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `sequence` is non-empty; its last element is the candidate.
    fn is_new(&self, sequence: &[usize]) -> bool;

    /// Whether some point of the dataset would be new after `prefix`.
    /// Every point is considered, including ones already in `prefix`.
    fn exists_new(&self, prefix: &[usize]) -> bool {
        let mut seq = Vec::with_capacity(prefix.len() + 1);
        seq.extend_from_slice(prefix);
        seq.push(0);
        (0..self.len()).any(|j| {
            *seq.last_mut().expect("non-empty") = j;
            self.is_new(&seq)
        })
    }
}

/// 1 unless `candidate` already occurs among `prefix_labels`.
pub fn is_new_label<L: PartialEq>(prefix_labels: &[L], candidate: &L) -> bool {
    !prefix_labels.contains(candidate)
}

/// Label-induced oracle: a point is new iff its label has not been seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelOracle {
    /// Dense label id of every point.
    labels: Vec<u32>,
    n_labels: usize,
}

impl LabelOracle {
    /// Maps labels to dense ids by exact equality, in order of first appearance.
    pub fn from_labels<L: PartialEq>(labels: &[L]) -> Self {
        let mut distinct: Vec<&L> = Vec::new();
        let ids = labels
            .iter()
            .map(|l| match distinct.iter().position(|d| *d == l) {
                Some(p) => p as u32,
                None => {
                    distinct.push(l);
                    (distinct.len() - 1) as u32
                }
            })
            .collect();
        Self { labels: ids, n_labels: distinct.len() }
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Incremental curve: tracks the seen labels so each step is O(1).
    pub fn curve(&self, sequence: &[usize]) -> Result<AggWastedCurve> {
        check_indices(sequence, self.len())?;
        let mut seen = vec![false; self.n_labels];
        let mut seen_count = 0;
        let mut flags = Vec::with_capacity(sequence.len());
        for &i in sequence {
            let l = self.labels[i] as usize;
            let new = !seen[l];
            // some label is still unseen iff an alternative new pick existed
            flags.push(!new && seen_count < self.n_labels);
            if new {
                seen[l] = true;
                seen_count += 1;
            }
        }
        Ok(AggWastedCurve::from_flags(&flags))
    }
}

impl IsNewOracle for LabelOracle {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn is_new(&self, sequence: &[usize]) -> bool {
        match sequence.split_last() {
            Some((&last, earlier)) => {
                let l = self.labels[last];
                !earlier.iter().any(|&i| self.labels[i] == l)
            }
            None => true,
        }
    }

    fn exists_new(&self, prefix: &[usize]) -> bool {
        let mut seen = vec![false; self.n_labels];
        let mut count = 0;
        for &i in prefix {
            let l = self.labels[i] as usize;
            if !seen[l] {
                seen[l] = true;
                count += 1;
            }
        }
        count < self.n_labels
    }
}

/// Numeric points; a point is new iff every earlier point is at least
/// `threshold` away.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdOracle {
    pub values: Vec<f64>,
    pub threshold: f64,
}

impl IsNewOracle for ThresholdOracle {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn is_new(&self, sequence: &[usize]) -> bool {
        match sequence.split_last() {
            Some((&last, earlier)) => {
                let v = self.values[last];
                !earlier.iter().any(|&i| libm::fabs(self.values[i] - v) < self.threshold)
            }
            None => true,
        }
    }
}

/// Per-prefix wasted flags and their running total.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AggWastedCurve {
    pub wasted_flags: Vec<u8>,
    pub running_total: Vec<usize>,
}

impl AggWastedCurve {
    pub fn from_flags(flags: &[bool]) -> Self {
        let mut total = 0;
        let mut running_total = Vec::with_capacity(flags.len());
        for &f in flags {
            total += f as usize;
            running_total.push(total);
        }
        Self { wasted_flags: flags.iter().map(|&f| f as u8).collect(), running_total }
    }

    /// The aggregated score of the whole sequence.
    pub fn total(&self) -> usize {
        self.running_total.last().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.wasted_flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wasted_flags.is_empty()
    }
}

fn check_indices(sequence: &[usize], len: usize) -> Result<()> {
    match sequence.iter().find(|&&i| i >= len) {
        Some(&index) => Err(Error::IndexOutOfRange { index, len }),
        None => Ok(()),
    }
}

/// Whether the last pick of `prefix` wastes an opportunity: it is not new,
/// yet some point would have been new in its place.
pub fn wasted<O: IsNewOracle + ?Sized>(prefix: &[usize], oracle: &O) -> bool {
    match prefix.split_last() {
        Some((_, earlier)) => !oracle.is_new(prefix) && oracle.exists_new(earlier),
        None => false,
    }
}

pub fn agg_wasted<O: IsNewOracle + ?Sized>(sequence: &[usize], oracle: &O) -> Result<AggWastedCurve> {
    check_indices(sequence, oracle.len())?;
    let flags: Vec<bool> = (1..=sequence.len()).map(|k| wasted(&sequence[..k], oracle)).collect();
    Ok(AggWastedCurve::from_flags(&flags))
}

/// Exhaustive minimum of the aggregated score over all orderings of `k`
/// distinct points that start with `fixed_prefix`. Returns the minimum and
/// one sequence attaining it.
///
/// Only for small instances (at most 12 points, or `k <= 6`). Branches are
/// cut once their running total cannot beat the best found, and the search
/// stops at a zero score.
///
/// Under a [`LabelOracle`] the minimum is always 0: a greedy order that
/// takes an unseen label whenever one remains never wastes a pick, and once
/// every label has been seen no point is new, so no later pick can be
/// wasted either.
pub fn brute_force_min_agg_wasted<O: IsNewOracle + ?Sized>(
    oracle: &O,
    k: usize,
    fixed_prefix: &[usize],
) -> Result<(usize, Vec<usize>)> {
    let n = oracle.len();
    if !(n <= 12 || k <= 6) {
        return Err(Error::SearchTooLarge { points: n, k });
    }
    if k > n {
        return Err(Error::InvalidParameter(alloc::format!("cannot pick {k} distinct points from {n}")));
    }
    if fixed_prefix.len() > k {
        return Err(Error::InvalidParameter("fixed prefix longer than k".into()));
    }
    check_indices(fixed_prefix, n)?;
    let mut used = vec![false; n];
    for &i in fixed_prefix {
        if core::mem::replace(&mut used[i], true) {
            return Err(Error::InvalidParameter(alloc::format!("index {i} repeated in prefix")));
        }
    }
    let prefix_total = agg_wasted(fixed_prefix, oracle)?.total();

    struct Search<'a, O: ?Sized> {
        oracle: &'a O,
        k: usize,
        best: usize,
        witness: Vec<usize>,
    }

    impl<O: IsNewOracle + ?Sized> Search<'_, O> {
        fn descend(&mut self, seq: &mut Vec<usize>, used: &mut [bool], total: usize) {
            if total >= self.best {
                return;
            }
            if seq.len() == self.k {
                self.best = total;
                self.witness = seq.clone();
                return;
            }
            let mut children: Vec<(bool, usize)> = Vec::new();
            for j in 0..used.len() {
                if !used[j] {
                    seq.push(j);
                    children.push((wasted(seq, self.oracle), j));
                    seq.pop();
                }
            }
            // unwasted children first so good sequences are found early
            children.sort_by_key(|&(w, j)| (w, j));
            for (w, j) in children {
                if self.best == 0 {
                    return;
                }
                used[j] = true;
                seq.push(j);
                self.descend(seq, used, total + w as usize);
                seq.pop();
                used[j] = false;
            }
        }
    }

    let mut search = Search { oracle, k, best: usize::MAX, witness: Vec::new() };
    let mut seq = fixed_prefix.to_vec();
    search.descend(&mut seq, &mut used, prefix_total);
    Ok((search.best, search.witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const D: [&str; 6] = ["1A", "1B", "2B", "2C", "1A", "2B"];

    fn char_oracle(pos: usize) -> LabelOracle {
        let keys: Vec<char> = D.iter().map(|s| s.chars().nth(pos).unwrap()).collect();
        LabelOracle::from_labels(&keys)
    }

    #[test]
    fn first_character_examples() {
        let o = char_oracle(0);
        assert!(!o.is_new(&[0, 1]));
        assert!(o.is_new(&[0, 1, 2]));
        assert!(wasted(&[0, 1], &o));
        assert!(!wasted(&[0, 1, 2], &o));
        assert!(!wasted(&[0, 2, 3], &o));
        let c = agg_wasted(&[0, 1, 2], &o).unwrap();
        assert_eq!(c.wasted_flags, vec![0, 1, 0]);
        assert_eq!(c.total(), 1);
        assert_eq!(agg_wasted(&[0, 2, 3], &o).unwrap().total(), 0);
    }

    #[test]
    fn second_character_examples() {
        let o = char_oracle(1);
        let c = agg_wasted(&[0, 1, 2], &o).unwrap();
        assert_eq!(c.wasted_flags, vec![0, 0, 1]);
        assert_eq!(agg_wasted(&[0, 2, 3], &o).unwrap().total(), 0);
    }

    #[test]
    fn label_fast_path_matches_generic() {
        let o = char_oracle(0);
        for seq in [vec![0, 1, 2], vec![0, 2, 3], vec![4, 0, 1, 5, 2, 3], vec![3]] {
            assert_eq!(o.curve(&seq).unwrap(), agg_wasted(&seq, &o).unwrap());
        }
    }

    #[test]
    fn single_new_pick_never_wasted() {
        assert!(!wasted(&[3], &char_oracle(0)));
    }

    #[test]
    fn is_new_label_cases() {
        assert!(is_new_label(&["A"], &"B"));
        assert!(!is_new_label(&["A"], &"A"));
        assert!(is_new_label::<&str>(&[], &"A"));
    }

    #[test]
    fn out_of_range_index() {
        let o = char_oracle(0);
        assert_eq!(agg_wasted(&[0, 6], &o).unwrap_err(), Error::IndexOutOfRange { index: 6, len: 6 });
        assert!(o.curve(&[9]).is_err());
    }

    fn within_three_oracle() -> ThresholdOracle {
        ThresholdOracle { values: (1..=7).map(|v| v as f64).collect(), threshold: 3.0 }
    }

    #[test]
    fn threshold_examples() {
        let o = within_three_oracle();
        assert_eq!(agg_wasted(&[0, 3, 6], &o).unwrap().total(), 0);
        let (min, witness) = brute_force_min_agg_wasted(&o, 3, &[]).unwrap();
        assert_eq!(min, 0);
        assert_eq!(agg_wasted(&witness, &o).unwrap().total(), 0);
        assert_eq!(witness, vec![0, 3, 6]);
    }

    #[test]
    fn prefix_one_five_blocks_every_new_point() {
        // Every value in 1..=7 lies within 3 of either 1 or 5, so condition
        // (b) fails for the third pick and it cannot be counted as wasted.
        let o = within_three_oracle();
        assert!(!o.exists_new(&[0, 4]));
        for third in [1, 2, 3, 5, 6] {
            assert!(!o.is_new(&[0, 4, third]));
            assert!(!wasted(&[0, 4, third], &o));
        }
        let (min, witness) = brute_force_min_agg_wasted(&o, 3, &[0, 4]).unwrap();
        assert_eq!(min, 0);
        assert_eq!(&witness[..2], &[0, 4]);
    }

    #[test]
    fn brute_force_guards() {
        let big = ThresholdOracle { values: vec![0.0; 13], threshold: 1.0 };
        assert!(matches!(brute_force_min_agg_wasted(&big, 7, &[]), Err(Error::SearchTooLarge { .. })));
        assert!(brute_force_min_agg_wasted(&big, 6, &[]).is_ok());
        let o = within_three_oracle();
        assert!(brute_force_min_agg_wasted(&o, 8, &[]).is_err());
        assert!(brute_force_min_agg_wasted(&o, 3, &[1, 1]).is_err());
    }

    #[test]
    fn label_oracle_zero_optimum() {
        let o = char_oracle(0);
        for k in 1..=6 {
            assert_eq!(brute_force_min_agg_wasted(&o, k, &[]).unwrap().0, 0);
        }
    }
}
