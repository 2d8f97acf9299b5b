use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// Strictly increasing multi-index over `1..=8`, stored as a bitmask
/// (bit `i - 1` set iff index `i` is present).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex(u8);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);
    pub const FULL: MultiIndex = MultiIndex(0xff);

    pub fn new(indices: &[u8]) -> Result<Self> {
        let valid = indices.iter().all(|&i| (1..=8).contains(&i))
            && indices.windows(2).all(|w| w[0] < w[1]);
        if !valid {
            return Err(Error::InvalidIndex(indices.to_vec()));
        }
        Ok(MultiIndex(indices.iter().fold(0u8, |m, &i| m | 1 << (i - 1))))
    }

    pub const fn from_mask(mask: u8) -> Self {
        MultiIndex(mask)
    }

    pub const fn mask(self) -> u8 {
        self.0
    }

    pub const fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: u8) -> bool {
        (1..=8).contains(&index) && self.0 & (1 << (index - 1)) != 0
    }

    /// Indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1..=8u8).filter(move |&i| self.0 & (1 << (i - 1)) != 0)
    }

    pub fn indices(self) -> Vec<u8> {
        self.iter().collect()
    }

    pub fn complement(self) -> Self {
        MultiIndex(!self.0)
    }

    /// Complement inside `1..=7`.
    pub fn complement_in_seven(self) -> Self {
        MultiIndex(!self.0 & 0x7f)
    }

    /// Sign of `e^self ∧ e^other` relative to `e^{self ∪ other}`, or `None`
    /// when the indices overlap.
    pub fn wedge_sign(self, other: MultiIndex) -> Option<i8> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // each pair (i in self, j in other) with i > j is one transposition
        let inversions: u32 = other
            .iter()
            .map(|j| ((self.0 as u16) >> j).count_ones())
            .sum();
        Some(if inversions % 2 == 0 { 1 } else { -1 })
    }

    /// Every multi-index of the given degree, in lexicographic order.
    pub fn all_of_degree(degree: usize) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = (0u16..256)
            .map(|m| MultiIndex(m as u8))
            .filter(|m| m.degree() == degree)
            .collect();
        out.sort();
        out
    }

    /// Sorts an arbitrary index sequence. Returns the canonical index with
    /// the permutation sign, or `None` if an index repeats.
    pub fn canonicalize(indices: &[u8]) -> Result<Option<(MultiIndex, i8)>> {
        if let Some(&bad) = indices.iter().find(|&&i| !(1..=8).contains(&i)) {
            return Err(Error::InvalidIndex(vec![bad]));
        }
        let mut sorted = indices.to_vec();
        let mut sign = 1i8;
        // insertion sort, counting swaps
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(None);
        }
        Ok(Some((MultiIndex::new(&sorted)?, sign)))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("e^{")?;
        for i in self.iter() {
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
