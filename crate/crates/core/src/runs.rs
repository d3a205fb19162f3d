//! Multisets of transitions, the subrun conditions and the ordering of
//! subruns into firing sequences.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::grammar::Grammar;
use crate::vector::{NtId, NtMultiset, TermVector, TransId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("not a subrun: {0}")]
    Invalid(SubrunViolation),
    #[error("expected a singleton source multiset")]
    NotSingleton,
    #[error("the empty subrun has no derivation tree")]
    Empty,
    #[error("multiset has {got} entries but the grammar has {expected} transitions")]
    WrongLength { expected: usize, got: usize },
    #[error("search exceeded its cap of {0} states")]
    CapExceeded(usize),
}

/// Why a multiset fails to be a subrun.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubrunViolation {
    Euler,
    Connectivity,
}

impl fmt::Display for SubrunViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubrunViolation::Euler => write!(f, "euler-violation"),
            SubrunViolation::Connectivity => write!(f, "connectivity-violation"),
        }
    }
}

/// Dense multiplicities indexed by transition id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TransitionMultiset(Vec<u64>);

impl TransitionMultiset {
    pub fn zero(len: usize) -> Self {
        TransitionMultiset(vec![0; len])
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        TransitionMultiset(counts)
    }

    pub fn from_pairs(len: usize, pairs: &[(usize, u64)]) -> Self {
        let mut m = Self::zero(len);
        for &(i, k) in pairs {
            m.0[i] += k;
        }
        m
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, t: TransId) -> u64 {
        self.0[t.0]
    }

    pub fn add_one(&mut self, t: TransId) {
        self.0[t.0] += 1;
    }

    pub fn add_count(&mut self, t: TransId, k: u64) {
        self.0[t.0] += k;
    }

    /// `|R|`
    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn plus(&self, other: &Self) -> Self {
        TransitionMultiset(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn plus_scaled(&self, other: &Self, k: u64) -> Self {
        TransitionMultiset(self.0.iter().zip(&other.0).map(|(a, b)| a + b * k).collect())
    }

    /// `self − other`, or `None` if some count would go negative.
    pub fn minus(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(TransitionMultiset)
    }

    pub fn support_ids(&self) -> impl Iterator<Item = TransId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, _)| TransId(i))
    }
}

/// Linear summaries of a transition multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub source: NtMultiset,
    pub target: NtMultiset,
    pub parikh: TermVector,
    /// Nonterminals with positive source count.
    pub supp: BTreeSet<NtId>,
    pub size: u64,
}

fn check_len(g: &Grammar, r: &TransitionMultiset) -> Result<(), RunError> {
    if r.len() != g.num_transitions() {
        return Err(RunError::WrongLength {
            expected: g.num_transitions(),
            got: r.len(),
        });
    }
    Ok(())
}

pub fn run_stats(g: &Grammar, r: &TransitionMultiset) -> RunStats {
    let mut source = NtMultiset::new();
    let mut target = NtMultiset::new();
    let mut parikh = TermVector::zero(g.alphabet_size());
    for t in r.support_ids() {
        let k = r.get(t);
        let tr = g.transition(t);
        source.insert(tr.source, k);
        for (q, c) in tr.targets.iter() {
            target.insert(q, c * k);
        }
        parikh.add_scaled(&tr.output, k as i64);
    }
    let supp = source.iter().map(|(q, _)| q).collect();
    RunStats {
        source,
        target,
        parikh,
        supp,
        size: r.size(),
    }
}

/// `Ψ(R)`
pub fn parikh(g: &Grammar, r: &TransitionMultiset) -> TermVector {
    let mut v = TermVector::zero(g.alphabet_size());
    for t in r.support_ids() {
        v.add_scaled(&g.transition(t).output, r.get(t) as i64);
    }
    v
}

/// `supp(R)`
pub fn support(g: &Grammar, r: &TransitionMultiset) -> BTreeSet<NtId> {
    r.support_ids().map(|t| g.transition(t).source).collect()
}

/// Nonterminals reachable from `from` along `→_R`.
fn reachable(g: &Grammar, r: &TransitionMultiset, from: &NtMultiset) -> Vec<bool> {
    let n = g.num_nonterminals();
    let mut adj: Vec<Vec<NtId>> = vec![Vec::new(); n];
    for t in r.support_ids() {
        let tr = g.transition(t);
        for (q, _) in tr.targets.iter() {
            adj[tr.source.0].push(q);
        }
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<NtId> = VecDeque::new();
    for (q, _) in from.iter() {
        if !seen[q.0] {
            seen[q.0] = true;
            queue.push_back(q);
        }
    }
    while let Some(p) = queue.pop_front() {
        for &q in &adj[p.0] {
            if !seen[q.0] {
                seen[q.0] = true;
                queue.push_back(q);
            }
        }
    }
    seen
}

/// Checks the Euler condition, then connectivity.
pub fn check_subrun(
    g: &Grammar,
    r: &TransitionMultiset,
    from: &NtMultiset,
    to: &NtMultiset,
) -> Result<(), SubrunViolation> {
    let n = g.num_nonterminals();
    let mut balance = vec![0i64; n];
    for t in r.support_ids() {
        let k = r.get(t) as i64;
        let tr = g.transition(t);
        balance[tr.source.0] += k;
        for (q, c) in tr.targets.iter() {
            balance[q.0] -= c as i64 * k;
        }
    }
    for (q, k) in from.iter() {
        balance[q.0] -= k as i64;
    }
    for (q, k) in to.iter() {
        balance[q.0] += k as i64;
    }
    if balance.iter().any(|&b| b != 0) {
        return Err(SubrunViolation::Euler);
    }
    let seen = reachable(g, r, from);
    if r.support_ids().any(|t| !seen[g.transition(t).source.0]) {
        return Err(SubrunViolation::Connectivity);
    }
    Ok(())
}

pub fn is_subrun(g: &Grammar, r: &TransitionMultiset, from: &NtMultiset, to: &NtMultiset) -> bool {
    r.len() == g.num_transitions() && check_subrun(g, r, from, to).is_ok()
}

/// A run from `p`: a subrun from `[p]` to 0.
pub fn is_run(g: &Grammar, r: &TransitionMultiset, p: NtId) -> bool {
    is_subrun(g, r, &NtMultiset::singleton(p), &NtMultiset::new())
}

/// A path from `p1` to `p2`.
pub fn is_path(g: &Grammar, r: &TransitionMultiset, p1: NtId, p2: NtId) -> bool {
    is_subrun(g, r, &NtMultiset::singleton(p1), &NtMultiset::singleton(p2))
}

/// A cycle from `p` (possibly empty).
pub fn is_cycle(g: &Grammar, r: &TransitionMultiset, p: NtId) -> bool {
    is_path(g, r, p, p)
}

/// A transition multiset together with its claimed endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubrunCert {
    pub multiset: TransitionMultiset,
    pub from: NtMultiset,
    pub to: NtMultiset,
}

impl SubrunCert {
    pub fn new(multiset: TransitionMultiset, from: NtMultiset, to: NtMultiset) -> Self {
        SubrunCert { multiset, from, to }
    }

    pub fn check(&self, g: &Grammar) -> Result<(), RunError> {
        check_len(g, &self.multiset)?;
        check_subrun(g, &self.multiset, &self.from, &self.to).map_err(RunError::Invalid)
    }
}

/// Applies one firing to dense nonterminal counts; `false` if the source is
/// not available.
pub(crate) fn fire(g: &Grammar, state: &mut [i64], t: TransId) -> bool {
    let tr = g.transition(t);
    if state[tr.source.0] <= 0 {
        return false;
    }
    state[tr.source.0] -= 1;
    for (q, k) in tr.targets.iter() {
        state[q.0] += k as i64;
    }
    true
}

/// Orders a valid subrun into a firing sequence. At each step the first
/// transition (by id) whose source is present and whose removal leaves a
/// subrun from the new state is fired.
pub fn order_subrun(g: &Grammar, cert: &SubrunCert) -> Result<Vec<TransId>, RunError> {
    cert.check(g)?;
    let n = g.num_nonterminals();
    let mut remaining = cert.multiset.clone();
    let mut state = cert.from.to_dense(n);
    let mut sequence = Vec::with_capacity(remaining.size() as usize);
    while !remaining.is_zero() {
        let mut chosen = None;
        for t in remaining.support_ids() {
            let mut next_state = state.clone();
            if !fire(g, &mut next_state, t) {
                continue;
            }
            let mut rest = remaining.clone();
            rest.0[t.0] -= 1;
            let s = NtMultiset::from_dense(&next_state);
            if check_subrun(g, &rest, &s, &cert.to).is_ok() {
                chosen = Some((t, rest, next_state));
                break;
            }
        }
        let (t, rest, next_state) =
            chosen.expect("a valid subrun always has a transition that can fire first");
        sequence.push(t);
        remaining = rest;
        state = next_state;
    }
    Ok(sequence)
}

/// Breadth-first enumeration of subruns from `from` to `to`, by firing
/// transitions one at a time (every firing sequence gives a subrun and every
/// subrun has one). States are deduplicated by multiset.
pub struct SubrunSearch<'a> {
    pub grammar: &'a Grammar,
    pub from: NtMultiset,
    pub to: NtMultiset,
    pub max_size: u64,
    /// Only multisets below this bound are explored.
    pub within: Option<&'a TransitionMultiset>,
    /// Abort once this many distinct multisets have been visited.
    pub state_cap: usize,
}

impl<'a> SubrunSearch<'a> {
    pub fn new(g: &'a Grammar, from: NtMultiset, to: NtMultiset, max_size: u64) -> Self {
        SubrunSearch {
            grammar: g,
            from,
            to,
            max_size,
            within: None,
            state_cap: 2_000_000,
        }
    }

    pub fn within(mut self, bound: &'a TransitionMultiset) -> Self {
        self.within = Some(bound);
        self
    }

    pub fn state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    /// Every subrun from `from` to `to` of size at most `max_size`, in
    /// (size, lexicographic) order, including the empty one when
    /// `from == to`.
    pub fn run(&self) -> Result<Vec<TransitionMultiset>, RunError> {
        let mut found = Vec::new();
        self.visit(|r, _| found.push(r.clone()))?;
        Ok(found)
    }

    /// Calls `f` on every subrun reaching `to`, with its size layer.
    pub fn visit(&self, mut f: impl FnMut(&TransitionMultiset, u64)) -> Result<(), RunError> {
        let g = self.grammar;
        let n = g.num_nonterminals();
        let target = self.to.to_dense(n);
        let start = self.from.to_dense(n);
        let mut seen: HashSet<TransitionMultiset> = HashSet::new();
        let empty = TransitionMultiset::zero(g.num_transitions());
        seen.insert(empty.clone());
        let mut layer = vec![(empty, start)];
        for size in 0..=self.max_size {
            layer.sort();
            for (r, state) in &layer {
                if *state == target {
                    f(r, size);
                }
            }
            if size == self.max_size {
                break;
            }
            let remaining = self.max_size - size - 1;
            let mut next = Vec::new();
            for (r, state) in &layer {
                for t in 0..g.num_transitions() {
                    let t = TransId(t);
                    if let Some(b) = self.within {
                        if r.get(t) >= b.get(t) {
                            continue;
                        }
                    }
                    let mut s = state.clone();
                    if !fire(g, &mut s, t) {
                        continue;
                    }
                    // Each firing consumes one nonterminal, so the surplus
                    // over `to` must be spendable in the remaining steps.
                    let surplus: i64 = s
                        .iter()
                        .zip(&target)
                        .map(|(a, b)| (a - b).max(0))
                        .sum();
                    if surplus as u64 > remaining {
                        continue;
                    }
                    let mut r2 = r.clone();
                    r2.add_one(t);
                    if seen.insert(r2.clone()) {
                        if seen.len() > self.state_cap {
                            return Err(RunError::CapExceeded(self.state_cap));
                        }
                        next.push((r2, s));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layer = next;
        }
        Ok(())
    }
}
