//! Brute-force enumeration of the Parikh image by expanding sentential
//! forms. Used as an independent reference for the deciders.

use std::collections::{BTreeSet, HashSet};

use crate::grammar::Grammar;

/// Per-nonterminal extremal value of some additive weight over all finite
/// derivation trees. `None` marks unproductive nonterminals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extreme {
    Unbounded,
    Finite(i64),
}

/// Minimum over all derivation trees from each nonterminal of the summed
/// transition weights. Relaxation converges within `N` rounds for bounded
/// values; anything still improving after that is unbounded, and the
/// computation is repeated with those pinned until it is stable.
fn min_tree_weight(g: &Grammar, weight: impl Fn(usize) -> i64) -> Vec<Option<Extreme>> {
    let n = g.num_nonterminals();
    let mut pinned = vec![false; n];
    loop {
        let mut best: Vec<Option<Extreme>> = (0..n)
            .map(|q| pinned[q].then_some(Extreme::Unbounded))
            .collect();
        let mut changed_last = vec![false; n];
        for _round in 0..=n {
            let mut next = best.clone();
            changed_last = vec![false; n];
            for (i, t) in g.transitions().iter().enumerate() {
                let q = t.source.0;
                if pinned[q] {
                    continue;
                }
                let mut value = Some(Extreme::Finite(weight(i)));
                for (r, k) in t.targets.iter() {
                    value = match (value, best[r.0]) {
                        (None, _) | (_, None) => None,
                        (Some(Extreme::Unbounded), _) | (_, Some(Extreme::Unbounded)) => {
                            Some(Extreme::Unbounded)
                        }
                        (Some(Extreme::Finite(a)), Some(Extreme::Finite(b))) => {
                            Some(Extreme::Finite(a.saturating_add(b.saturating_mul(k as i64))))
                        }
                    };
                }
                let improves = match (value, next[q]) {
                    (None, _) => false,
                    (Some(_), None) => true,
                    (Some(Extreme::Unbounded), Some(Extreme::Finite(_))) => true,
                    (Some(Extreme::Finite(a)), Some(Extreme::Finite(b))) => a < b,
                    (_, Some(Extreme::Unbounded)) => false,
                };
                if improves {
                    next[q] = value;
                    changed_last[q] = true;
                }
            }
            best = next;
        }
        let newly: Vec<usize> = (0..n).filter(|&q| changed_last[q] && !pinned[q]).collect();
        if newly.is_empty() {
            return best;
        }
        for q in newly {
            pinned[q] = true;
        }
    }
}

/// Admissible bounds for pruning the expansion.
struct Bounds {
    min_size: Vec<Option<u64>>,
    /// `low[q][x]` / `high[q][x]`; `None` means unbounded in that direction.
    low: Vec<Vec<Option<i64>>>,
    high: Vec<Vec<Option<i64>>>,
}

impl Bounds {
    fn new(g: &Grammar) -> Self {
        let n = g.num_nonterminals();
        let dim = g.alphabet_size();
        let min_size = min_tree_weight(g, |_| 1)
            .into_iter()
            .map(|e| match e {
                Some(Extreme::Finite(k)) => Some(k as u64),
                Some(Extreme::Unbounded) => unreachable!("sizes are positive"),
                None => None,
            })
            .collect();
        let mut low = vec![vec![None; dim]; n];
        let mut high = vec![vec![None; dim]; n];
        for x in 0..dim {
            let lo = min_tree_weight(g, |i| g.transitions()[i].output.get(x));
            let hi = min_tree_weight(g, |i| -g.transitions()[i].output.get(x));
            for q in 0..n {
                low[q][x] = match lo[q] {
                    Some(Extreme::Finite(k)) => Some(k),
                    _ => None,
                };
                high[q][x] = match hi[q] {
                    Some(Extreme::Finite(k)) => Some(-k),
                    _ => None,
                };
            }
        }
        Bounds {
            min_size,
            low,
            high,
        }
    }

    /// Whether a form with these pending counts and accumulated vector can
    /// still complete within `steps_left` firings inside the window.
    fn viable(&self, pending: &[u16], psi: &[i64], steps_left: u64, window: i64) -> bool {
        let mut need = 0u64;
        for (q, &k) in pending.iter().enumerate() {
            if k == 0 {
                continue;
            }
            match self.min_size[q] {
                None => return false,
                Some(s) => need = need.saturating_add(s * k as u64),
            }
        }
        if need > steps_left {
            return false;
        }
        for (x, &v) in psi.iter().enumerate() {
            let mut lo = Some(v);
            let mut hi = Some(v);
            for (q, &k) in pending.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                lo = lo.zip(self.low[q][x]).map(|(a, b)| a.saturating_add(b * k as i64));
                hi = hi.zip(self.high[q][x]).map(|(a, b)| a.saturating_add(b * k as i64));
            }
            if lo.is_some_and(|l| l > window) || hi.is_some_and(|h| h < -window) {
                return false;
            }
        }
        true
    }
}

/// Ψ of every run from the initial nonterminal with at most `depth`
/// transitions, restricted to `‖v‖∞ ≤ window`.
///
/// Forms are expanded at their smallest pending nonterminal only; every
/// derivation tree can be built in that order, so nothing is lost. Forms
/// that provably cannot finish within the step budget or inside the window
/// are dropped.
pub fn oracle_language(g: &Grammar, depth: usize, window: u64) -> BTreeSet<crate::vector::TermVector> {
    let n = g.num_nonterminals();
    let dim = g.alphabet_size();
    let window = window.min(i64::MAX as u64) as i64;
    let bounds = Bounds::new(g);
    let by_source: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            g.transitions()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.source.0 == q)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut out = BTreeSet::new();
    let mut start = vec![0u16; n];
    start[g.start().0] = 1;
    let origin = vec![0i64; dim];
    if !bounds.viable(&start, &origin, depth as u64, window) {
        return out;
    }
    let mut seen: HashSet<(Vec<u16>, Vec<i64>)> = HashSet::new();
    seen.insert((start.clone(), origin.clone()));
    let mut layer = vec![(start, origin)];
    for step in 0..depth {
        let steps_left = (depth - step - 1) as u64;
        let mut next = Vec::new();
        for (pending, psi) in &layer {
            let Some(q) = pending.iter().position(|&k| k > 0) else {
                continue;
            };
            for &i in &by_source[q] {
                let t = &g.transitions()[i];
                let mut p2 = pending.clone();
                p2[q] -= 1;
                for (r, k) in t.targets.iter() {
                    p2[r.0] = p2[r.0].saturating_add(k as u16);
                }
                let mut v2 = psi.clone();
                for (a, b) in v2.iter_mut().zip(t.output.entries()) {
                    *a += b;
                }
                if !bounds.viable(&p2, &v2, steps_left, window) {
                    continue;
                }
                let key = (p2, v2);
                if seen.contains(&key) {
                    continue;
                }
                seen.insert(key.clone());
                if key.0.iter().all(|&k| k == 0) {
                    out.insert(crate::vector::TermVector::from_vec(key.1.clone()));
                }
                next.push(key);
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    out
}
