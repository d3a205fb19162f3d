//! Integer vectors over the terminal alphabet and multisets of nonterminals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// Index of a nonterminal inside its grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NtId(pub usize);

/// Index of a transition inside its grammar (file order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransId(pub usize);

impl fmt::Display for TransId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Text ids are 1-based: the first transition line is `t1`.
        write!(f, "t{}", self.0 + 1)
    }
}

/// A Parikh vector: one signed count per terminal, in alphabet order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TermVector(Vec<i64>);

impl TermVector {
    pub fn zero(dim: usize) -> Self {
        TermVector(vec![0; dim])
    }

    pub fn from_vec(entries: Vec<i64>) -> Self {
        TermVector(entries)
    }

    /// The unit vector `[x]` for terminal index `x`.
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[index] = 1;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, index: usize) -> i64 {
        self.0[index]
    }

    pub fn set(&mut self, index: usize, value: i64) {
        self.0[index] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// `Σ |v_x|`
    pub fn norm1(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).sum()
    }

    /// `max |v_x|`, zero for the empty alphabet.
    pub fn norm_inf(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        TermVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add_scaled(&mut self, other: &TermVector, k: i64) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * k;
        }
    }

    /// Reorders/extends the entries: entry `i` of the result is entry
    /// `map[i]` of `self`, or zero when `map[i]` is `None`.
    pub fn remap(&self, map: &[Option<usize>]) -> Self {
        TermVector(map.iter().map(|m| m.map_or(0, |i| self.0[i])).collect())
    }
}

impl From<Vec<i64>> for TermVector {
    fn from(v: Vec<i64>) -> Self {
        TermVector(v)
    }
}

impl Add for &TermVector {
    type Output = TermVector;
    fn add(self, rhs: &TermVector) -> TermVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &TermVector {
    type Output = TermVector;
    fn sub(self, rhs: &TermVector) -> TermVector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&TermVector> for TermVector {
    fn add_assign(&mut self, rhs: &TermVector) {
        self.add_scaled(rhs, 1);
    }
}

impl SubAssign<&TermVector> for TermVector {
    fn sub_assign(&mut self, rhs: &TermVector) {
        self.add_scaled(rhs, -1);
    }
}

impl Neg for &TermVector {
    type Output = TermVector;
    fn neg(self) -> TermVector {
        self.scaled(-1)
    }
}

/// A multiset of nonterminals. Zero multiplicities are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NtMultiset(BTreeMap<NtId, u64>);

impl NtMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// `[q]`
    pub fn singleton(q: NtId) -> Self {
        let mut m = Self::new();
        m.insert(q, 1);
        m
    }

    pub fn from_pairs<I: IntoIterator<Item = (NtId, u64)>>(pairs: I) -> Self {
        let mut m = Self::new();
        for (q, k) in pairs {
            m.insert(q, k);
        }
        m
    }

    pub fn insert(&mut self, q: NtId, k: u64) {
        if k > 0 {
            *self.0.entry(q).or_insert(0) += k;
        }
    }

    pub fn count(&self, q: NtId) -> u64 {
        self.0.get(&q).copied().unwrap_or(0)
    }

    /// Total multiplicity `|t|`.
    pub fn size(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NtId, u64)> + '_ {
        self.0.iter().map(|(&q, &k)| (q, k))
    }

    /// Each nonterminal repeated by its multiplicity, in id order.
    pub fn expanded(&self) -> Vec<NtId> {
        self.iter()
            .flat_map(|(q, k)| std::iter::repeat(q).take(k as usize))
            .collect()
    }

    /// Dense signed counts, indexed by nonterminal.
    pub fn to_dense(&self, n: usize) -> Vec<i64> {
        let mut out = vec![0; n];
        for (q, k) in self.iter() {
            out[q.0] += k as i64;
        }
        out
    }

    pub fn from_dense(counts: &[i64]) -> Self {
        debug_assert!(counts.iter().all(|&c| c >= 0));
        Self::from_pairs(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (NtId(i), c.max(0) as u64)),
        )
    }

    pub fn map_ids(&self, f: impl Fn(NtId) -> NtId) -> Self {
        Self::from_pairs(self.iter().map(|(q, k)| (f(q), k)))
    }
}

impl FromIterator<NtId> for NtMultiset {
    fn from_iter<I: IntoIterator<Item = NtId>>(iter: I) -> Self {
        Self::from_pairs(iter.into_iter().map(|q| (q, 1)))
    }
}
