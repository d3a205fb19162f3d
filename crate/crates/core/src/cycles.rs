//! Size bounds, simple cycles and skeleton runs.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::grammar::Grammar;
use crate::linalg::hadamard_bound;
use crate::runs::{is_cycle, is_run, support, RunError, SubrunSearch, TransitionMultiset};
use crate::vector::{NtId, NtMultiset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("grammar is not in normal form")]
    NotNormalForm,
    #[error("multiset is not a run from the given nonterminal")]
    NotARun,
    #[error(transparent)]
    Run(#[from] RunError),
}

/// `γ(M)`: `M + 1` for regular grammars, `2^(M+1)` otherwise.
pub fn gamma_bound(m: u64, regular: bool) -> BigInt {
    if regular {
        BigInt::from(m) + 1
    } else {
        BigInt::one() << (m + 1)
    }
}

/// `γ(M)` when it fits in a `u64`.
pub fn gamma_u64(m: u64, regular: bool) -> Option<u64> {
    gamma_bound(m, regular).to_u64()
}

/// `B_G = γ(N²) + (2γ(N))^(1+A) · h(A, γ(N))`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BgBound {
    pub n: usize,
    pub a: usize,
    pub regular: bool,
    pub value: BigInt,
}

impl BgBound {
    /// The value, saturated to `u64::MAX`.
    pub fn saturated(&self) -> u64 {
        self.value.to_u64().unwrap_or(u64::MAX)
    }
}

pub fn bg_formula(n: usize, a: usize, regular: bool) -> BigInt {
    let gn = gamma_bound(n as u64, regular);
    let gn2 = gamma_bound((n * n) as u64, regular);
    let base = BigInt::from(2) * &gn;
    let mut power = BigInt::one();
    for _ in 0..=a {
        power *= &base;
    }
    gn2 + power * hadamard_bound(a, &gn)
}

pub fn compute_bg(g: &Grammar) -> Result<BgBound, CycleError> {
    let c = g.classify();
    if !c.normal_form {
        return Err(CycleError::NotNormalForm);
    }
    let (n, a) = (g.num_nonterminals(), g.alphabet_size());
    Ok(BgBound {
        n,
        a,
        regular: c.regular,
        value: bg_formula(n, a, c.regular),
    })
}

/// `γ(N) − 1`, the largest possible size of a simple cycle, saturated.
pub fn simple_cycle_limit(g: &Grammar) -> u64 {
    gamma_u64(g.num_nonterminals() as u64, g.is_regular())
        .map_or(u64::MAX, |x| x - 1)
}

/// `γ(N²) − 1`, the largest possible size of a skeleton run, saturated.
pub fn skeleton_run_limit(g: &Grammar) -> u64 {
    let n = g.num_nonterminals() as u64;
    gamma_u64(n * n, g.is_regular()).map_or(u64::MAX, |x| x - 1)
}

/// Nonzero cycles from `q` with at most `max_size` transitions, in
/// (size, lexicographic) order.
pub fn enumerate_cycles(
    g: &Grammar,
    q: NtId,
    max_size: u64,
    state_cap: usize,
) -> Result<Vec<TransitionMultiset>, RunError> {
    let at = NtMultiset::singleton(q);
    let mut all = SubrunSearch::new(g, at.clone(), at, max_size)
        .state_cap(state_cap)
        .run()?;
    all.retain(|c| !c.is_zero());
    Ok(all)
}

/// Keeps the cycles of `own` that are not the sum of two nonzero cycles,
/// each from any nonterminal. `any` must hold every nonzero cycle (from
/// every anchor) smaller than the largest cycle in `own`.
fn simple_only(own: Vec<TransitionMultiset>, any: &[TransitionMultiset]) -> Vec<TransitionMultiset> {
    let known: HashSet<&TransitionMultiset> = any.iter().collect();
    let mut by_size: Vec<&TransitionMultiset> = any.iter().collect();
    by_size.sort_by_key(|d| d.size());
    let mut out = Vec::new();
    for c in own {
        let half = c.size() / 2;
        let composite = by_size
            .iter()
            .take_while(|d| d.size() <= half)
            .any(|d| c.minus(d).is_some_and(|rest| known.contains(&rest)));
        if !composite {
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleCycles {
    pub cycles: Vec<TransitionMultiset>,
    /// False when `cap` stopped the search below `γ(N) − 1`.
    pub complete: bool,
}

/// All simple cycles from `q` of size below `min(γ(N), cap + 1)`.
pub fn enumerate_simple_cycles(
    g: &Grammar,
    q: NtId,
    cap: u64,
) -> Result<SimpleCycles, RunError> {
    enumerate_simple_cycles_capped(g, q, cap, 2_000_000)
}

pub fn enumerate_simple_cycles_capped(
    g: &Grammar,
    q: NtId,
    cap: u64,
    state_cap: usize,
) -> Result<SimpleCycles, RunError> {
    let limit = simple_cycle_limit(g);
    let size = limit.min(cap);
    let own = enumerate_cycles(g, q, size, state_cap)?;
    let mut any: Vec<TransitionMultiset> = Vec::new();
    let mut seen: HashSet<TransitionMultiset> = HashSet::new();
    for x in 0..g.num_nonterminals() {
        // Only anchors that the cycles from q can pass through matter.
        if !own.iter().any(|c| support(g, c).contains(&NtId(x))) {
            continue;
        }
        let below = own.iter().map(|c| c.size()).max().unwrap_or(1) - 1;
        for d in enumerate_cycles(g, NtId(x), below, state_cap)? {
            if seen.insert(d.clone()) {
                any.push(d);
            }
        }
    }
    Ok(SimpleCycles {
        cycles: simple_only(own, &any),
        complete: cap >= limit,
    })
}

/// Whether `c` is a nonzero cycle from `q` that does not split into two
/// nonzero cycles. The parts may be cycles from any nonterminals; this is
/// what makes `|C| < γ(N)` hold.
pub fn is_simple_cycle(
    g: &Grammar,
    c: &TransitionMultiset,
    q: NtId,
    state_cap: usize,
) -> Result<bool, RunError> {
    if c.len() != g.num_transitions() || c.is_zero() || !is_cycle(g, c, q) {
        return Ok(false);
    }
    let supp = support(g, c);
    let mut split = false;
    for &x in &supp {
        let at = NtMultiset::singleton(x);
        SubrunSearch::new(g, at.clone(), at, c.size() - 1)
            .within(c)
            .state_cap(state_cap)
            .visit(|d, _| {
                if split || d.is_zero() {
                    return;
                }
                let rest = c.minus(d).expect("search stays below c");
                split = support(g, &rest).iter().any(|&y| is_cycle(g, &rest, y));
            })?;
        if split {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nonzero cycles `C ≤ R` (from any nonterminal of `supp(R)`) such that
/// `R − C` is still a run from `p` with the same support, smallest first
/// (size, then lexicographic); the anchor is the smallest nonterminal the
/// cycle starts from.
pub fn removable_cycles(
    g: &Grammar,
    r: &TransitionMultiset,
    p: NtId,
    max_size: u64,
    state_cap: usize,
) -> Result<Vec<(TransitionMultiset, NtId)>, RunError> {
    let supp = support(g, r);
    let mut found: std::collections::BTreeMap<(u64, TransitionMultiset), NtId> = Default::default();
    for &q in &supp {
        let at = NtMultiset::singleton(q);
        SubrunSearch::new(g, at.clone(), at, max_size.min(r.size()))
            .within(r)
            .state_cap(state_cap)
            .visit(|c, size| {
                if c.is_zero() || found.contains_key(&(size, c.clone())) {
                    return;
                }
                let rest = r.minus(c).expect("search stays below r");
                if is_run(g, &rest, p) && support(g, &rest) == supp {
                    found.insert((size, c.clone()), q);
                }
            })?;
    }
    Ok(found.into_iter().map(|((_, c), q)| (c, q)).collect())
}

/// Whether no cycle can be removed from the run `r` without shrinking its
/// support.
pub fn is_skeleton_run(
    g: &Grammar,
    r: &TransitionMultiset,
    p: NtId,
    state_cap: usize,
) -> Result<bool, CycleError> {
    if r.len() != g.num_transitions() || !is_run(g, r, p) {
        return Err(CycleError::NotARun);
    }
    let supp = support(g, r);
    for &q in &supp {
        let at = NtMultiset::singleton(q);
        let mut removable = false;
        SubrunSearch::new(g, at.clone(), at, r.size())
            .within(r)
            .state_cap(state_cap)
            .visit(|c, _| {
                if removable || c.is_zero() {
                    return;
                }
                let rest = r.minus(c).expect("search stays below r");
                removable = is_run(g, &rest, p) && support(g, &rest) == supp;
            })?;
        if removable {
            return Ok(false);
        }
    }
    Ok(true)
}
