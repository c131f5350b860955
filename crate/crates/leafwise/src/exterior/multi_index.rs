//! Strictly increasing multi-indices and their colexicographic ranking.
//!
//! A degree-`k` alternating form in dimension `m` stores one coefficient per
//! strictly increasing `k`-tuple of coordinate indices. Tuples are ranked
//! colexicographically, which for bitmask subsets coincides with numeric
//! order of the masks, so rank arithmetic needs nothing but a binomial
//! table.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 16;

const fn build_binom() -> [[u64; MAX_DIM + 1]; MAX_DIM + 1] {
    let mut t = [[0u64; MAX_DIM + 1]; MAX_DIM + 1];
    let mut n = 0;
    while n <= MAX_DIM {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k <= n - 1 { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
}

static BINOM: [[u64; MAX_DIM + 1]; MAX_DIM + 1] = build_binom();

/// C(n, k), zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if n > MAX_DIM || k > n {
        return if k > n && n <= MAX_DIM { 0 } else { panic!("binomial out of table range") };
    }
    BINOM[n][k] as usize
}

/// Colexicographic rank of a subset given as a bitmask.
pub fn rank_of_mask(mask: u32) -> usize {
    let mut rank = 0;
    let mut rest = mask;
    let mut pos = 0;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        pos += 1;
        rank += binomial(bit, pos);
        rest &= rest - 1;
    }
    rank
}

/// All `k`-element subsets of `{0..m}` as bitmasks, in colex order.
pub fn masks_colex(m: usize, k: usize) -> Vec<u32> {
    assert!(m <= MAX_DIM && k <= m);
    if k == 0 {
        return vec![0];
    }
    let count = binomial(m, k);
    let mut out = Vec::with_capacity(count);
    // Gosper's hack enumerates equal-popcount masks in numeric = colex order.
    let mut v: u32 = (1 << k) - 1;
    let limit: u32 = 1 << m;
    while v < limit {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    debug_assert_eq!(out.len(), count);
    out
}

/// Parity sign of the shuffle that sorts the concatenation of two disjoint
/// masks, i.e. the sign picked up when wedging basis forms `dx_a ∧ dx_b`.
pub fn shuffle_sign(a: u32, b: u32) -> f64 {
    debug_assert_eq!(a & b, 0);
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        inversions += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn mask_from_indices(indices: &[usize]) -> u32 {
    let mut m = 0u32;
    for &i in indices {
        m |= 1 << i;
    }
    m
}

pub fn indices_from_mask(mut mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// A strictly increasing tuple of coordinate indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::contract(format!(
                "multi-index {indices:?} is not strictly increasing"
            )));
        }
        if indices.iter().any(|&i| i >= MAX_DIM) {
            return Err(Error::contract(format!(
                "multi-index {indices:?} exceeds the supported dimension {MAX_DIM}"
            )));
        }
        Ok(MultiIndex { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn mask(&self) -> u32 {
        mask_from_indices(&self.indices)
    }

    /// Colex rank among all tuples of the same degree.
    pub fn rank(&self) -> usize {
        rank_of_mask(self.mask())
    }

    pub fn from_rank(m: usize, k: usize, rank: usize) -> Result<Self> {
        let masks = masks_colex(m, k);
        let mask = masks.get(rank).ok_or_else(|| {
            Error::contract(format!("rank {rank} out of range for C({m},{k})"))
        })?;
        Ok(MultiIndex { indices: indices_from_mask(*mask) })
    }

    /// Sorted union with the shuffle sign, or `None` when the tuples
    /// overlap (the wedge of the corresponding basis forms is zero).
    pub fn merge(&self, other: &MultiIndex) -> Option<(MultiIndex, f64)> {
        let (a, b) = (self.mask(), other.mask());
        if a & b != 0 {
            return None;
        }
        let sign = shuffle_sign(a, b);
        Some((MultiIndex { indices: indices_from_mask(a | b) }, sign))
    }
}
