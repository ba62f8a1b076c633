//! Fixed-capacity label sets.
//!
//! Every root system handled by the engine has at most [`MAX_LABELS`]
//! positive roots, so a subset of labels fits in a single `u128` bitmask.
//! The bitmask doubles as the exact memo invariant of a subarrangement.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest number of positive roots a single object may carry.
pub const MAX_LABELS: usize = 128;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct LabelSet(u128);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_bits(bits: u128) -> Self {
        LabelSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_LABELS, "label set capacity exceeded: {n}");
        if n == MAX_LABELS {
            LabelSet(u128::MAX)
        } else {
            LabelSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(label: usize) -> Self {
        LabelSet(1u128 << label)
    }

    pub fn contains(self, label: usize) -> bool {
        label < MAX_LABELS && self.0 >> label & 1 == 1
    }

    pub fn insert(&mut self, label: usize) {
        self.0 |= 1u128 << label;
    }

    pub fn remove(&mut self, label: usize) {
        self.0 &= !(1u128 << label);
    }

    pub fn with(self, label: usize) -> Self {
        LabelSet(self.0 | 1u128 << label)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        LabelSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        LabelSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest label plus one, or 0 for the empty set.
    pub fn bound(self) -> usize {
        128 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> Labels {
        Labels(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for LabelSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut set = LabelSet::EMPTY;
        for label in iter {
            set.insert(label);
        }
        set
    }
}

impl From<Vec<usize>> for LabelSet {
    fn from(labels: Vec<usize>) -> Self {
        labels.into_iter().collect()
    }
}

impl From<LabelSet> for Vec<usize> {
    fn from(set: LabelSet) -> Self {
        set.to_vec()
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Ascending iterator over the labels of a [`LabelSet`].
pub struct Labels(u128);

impl Iterator for Labels {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let label = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(label)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Labels {}
