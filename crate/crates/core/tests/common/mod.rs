//! Seeded generators shared by the integration suites.

#![allow(dead_code)]

use commgram::runs::TransitionMultiset;
use commgram::{Grammar, NtId, NtMultiset, TermVector, Transition, TransId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LETTERS: [&str; 3] = ["a", "b", "c"];

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_n: usize,
    pub max_a: usize,
    /// At most one target per transition.
    pub regular: bool,
    pub negative: bool,
    /// Every non-final transition emits exactly one letter.
    pub one_letter: bool,
    /// Extra transitions per nonterminal beyond the guaranteed final one.
    pub max_extra: usize,
}

fn unit_output<R: Rng>(rng: &mut R, dim: usize, negative: bool, allow_zero: bool) -> TermVector {
    let mut v = TermVector::zero(dim);
    if dim == 0 || (allow_zero && rng.gen_bool(0.3)) {
        return v;
    }
    let x = rng.gen_range(0..dim);
    let sign = if negative && rng.gen_bool(0.35) { -1 } else { 1 };
    v.set(x, sign);
    v
}

/// A random normal-form grammar in which every nonterminal has a final
/// transition, so forward simulation can always be completed.
pub fn random_grammar<R: Rng>(rng: &mut R, shape: Shape) -> Grammar {
    let n = rng.gen_range(1..=shape.max_n);
    let a = rng.gen_range(1..=shape.max_a);
    let alphabet: Vec<String> = LETTERS[..a].iter().map(|s| s.to_string()).collect();
    let nonterminals: Vec<String> = (0..n).map(|i| format!("Q{i}")).collect();
    let mut transitions = Vec::new();
    for q in 0..n {
        let output = unit_output(rng, a, shape.negative, true);
        transitions.push(Transition {
            id: TransId(0),
            source: NtId(q),
            output,
            targets: NtMultiset::new(),
        });
        for _ in 0..rng.gen_range(1..=shape.max_extra.max(1)) {
            let k = if shape.regular { 1 } else { rng.gen_range(1..=2) };
            let targets: NtMultiset = (0..k).map(|_| NtId(rng.gen_range(0..n))).collect();
            let output = unit_output(rng, a, shape.negative, !shape.one_letter);
            transitions.push(Transition {
                id: TransId(0),
                source: NtId(q),
                output,
                targets,
            });
        }
    }
    transitions.dedup_by(|x, y| x.source == y.source && x.output == y.output && x.targets == y.targets);
    Grammar::new(alphabet, nonterminals, NtId(0), transitions).expect("generated grammar is well formed")
}

/// Independent firing: returns false when the source is not available.
pub fn fire(g: &Grammar, state: &mut [i64], t: TransId) -> bool {
    let tr = g.transition(t);
    if state[tr.source.0] <= 0 {
        return false;
    }
    state[tr.source.0] -= 1;
    for (r, k) in tr.targets.iter() {
        state[r.0] += k as i64;
    }
    true
}

pub fn dense(g: &Grammar, m: &NtMultiset) -> Vec<i64> {
    m.to_dense(g.num_nonterminals())
}

/// Fires `steps` random enabled transitions from `from`, stopping early
/// when nothing is pending. Returns the fired sequence.
pub fn simulate<R: Rng>(rng: &mut R, g: &Grammar, from: &NtMultiset, steps: usize) -> Vec<TransId> {
    let mut state = dense(g, from);
    let mut seq = Vec::new();
    for _ in 0..steps {
        let pending: Vec<usize> = (0..state.len()).filter(|&q| state[q] > 0).collect();
        let Some(&q) = pending.choose(rng) else { break };
        let options: Vec<TransId> = g.transitions_from(NtId(q)).map(|t| t.id).collect();
        let Some(&t) = options.choose(rng) else { break };
        fire(g, &mut state, t);
        seq.push(t);
    }
    seq
}

/// A random run from `p`: random firings for a while, then finals only.
pub fn random_run<R: Rng>(rng: &mut R, g: &Grammar, p: NtId, grow: usize) -> TransitionMultiset {
    let mut state = vec![0i64; g.num_nonterminals()];
    state[p.0] = 1;
    let mut r = TransitionMultiset::zero(g.num_transitions());
    let mut step = 0;
    while let Some(q) = (0..state.len()).filter(|&q| state[q] > 0).collect::<Vec<_>>().choose(rng).copied() {
        let options: Vec<TransId> = g
            .transitions_from(NtId(q))
            .filter(|t| step < grow || t.is_final())
            .map(|t| t.id)
            .collect();
        let t = *options.choose(rng).expect("every nonterminal has a final transition");
        fire(g, &mut state, t);
        r.add_one(t);
        step += 1;
    }
    r
}

pub fn multiset_of(g: &Grammar, seq: &[TransId]) -> TransitionMultiset {
    let mut r = TransitionMultiset::zero(g.num_transitions());
    for &t in seq {
        r.add_one(t);
    }
    r
}

pub fn state_after(g: &Grammar, from: &NtMultiset, seq: &[TransId]) -> Option<Vec<i64>> {
    let mut state = dense(g, from);
    for &t in seq {
        if !fire(g, &mut state, t) {
            return None;
        }
    }
    Some(state)
}

/// Independent subrun classification: `Ok(())`, or `Err(true)` for an
/// Euler violation and `Err(false)` for a connectivity violation.
pub fn classify_subrun(g: &Grammar, r: &TransitionMultiset, from: &[i64], to: &[i64]) -> Result<(), bool> {
    let n = g.num_nonterminals();
    let mut balance = vec![0i64; n];
    for (i, t) in g.transitions().iter().enumerate() {
        let k = r.counts()[i] as i64;
        balance[t.source.0] += k;
        for (q, m) in t.targets.iter() {
            balance[q.0] -= k * m as i64;
        }
    }
    for q in 0..n {
        if balance[q] - from[q] != -to[q] {
            return Err(true);
        }
    }
    let mut reached: Vec<bool> = from.iter().map(|&k| k > 0).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (i, t) in g.transitions().iter().enumerate() {
            if r.counts()[i] > 0 && reached[t.source.0] {
                for (q, _) in t.targets.iter() {
                    if !reached[q.0] {
                        reached[q.0] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    for (i, t) in g.transitions().iter().enumerate() {
        if r.counts()[i] > 0 && !reached[t.source.0] {
            return Err(false);
        }
    }
    Ok(())
}

pub fn random_multiset<R: Rng>(rng: &mut R, n: usize, max_size: u64) -> NtMultiset {
    let size = rng.gen_range(0..=max_size);
    (0..size).map(|_| NtId(rng.gen_range(0..n))).collect()
}

pub fn parikh_of(g: &Grammar, r: &TransitionMultiset) -> TermVector {
    let mut v = TermVector::zero(g.alphabet_size());
    for (i, t) in g.transitions().iter().enumerate() {
        v.add_scaled(&t.output, r.counts()[i] as i64);
    }
    v
}

/// Prepends `k` fresh nonterminals, each emitting a random letter, in front
/// of the start symbol.
pub fn with_prefix<R: Rng>(rng: &mut R, g: &Grammar, k: usize) -> Grammar {
    let dim = g.alphabet_size();
    let n = g.num_nonterminals();
    let mut nonterminals = g.nonterminals().to_vec();
    let mut transitions = g.transitions().to_vec();
    let mut next = g.start();
    for i in 0..k {
        nonterminals.push(format!("P{i}"));
        let p = NtId(n + i);
        transitions.push(Transition {
            id: TransId(0),
            source: p,
            output: TermVector::unit(dim, rng.gen_range(0..dim)),
            targets: NtMultiset::singleton(next),
        });
        next = p;
    }
    Grammar::new(g.alphabet().to_vec(), nonterminals, next, transitions).expect("prefix keeps the grammar valid")
}
