//! Membership deciders: tables of bounded runs and short paths for regular
//! grammars, and bounded base-run and cycle guessing for general ones.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::cycles::{compute_bg, enumerate_simple_cycles, simple_cycle_limit, CycleError};
use crate::grammar::Grammar;
use crate::linalg::LatticeSolver;
use crate::runs::{parikh, support, RunError, SubrunSearch, TransitionMultiset};
use crate::semilinear::maximal_independent_subsets;
use crate::vector::{NtId, NtMultiset, TermVector, TransId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MemberError {
    #[error("grammar is not regular")]
    NotRegular,
    #[error("grammar has {0} nonterminals; at most 64 are supported by the run tables")]
    TooManyNonterminals(usize),
    #[error("vector has dimension {got}, alphabet has {expected} letters")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// A set of nonterminals as a bit mask.
pub type NtSet = u64;

fn mask_of(qs: impl IntoIterator<Item = NtId>) -> NtSet {
    qs.into_iter().fold(0, |m, q| m | (1 << q.0))
}

fn ids_of(mask: NtSet) -> Vec<NtId> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(NtId).collect()
}

/// All sets of at most `k` nonterminals out of `n`, by size then mask.
pub fn small_subsets(n: usize, k: usize) -> Vec<NtSet> {
    let mut out: Vec<NtSet> = vec![0];
    let mut frontier: Vec<NtSet> = vec![0];
    for _ in 0..k.min(n) {
        let mut next = BTreeSet::new();
        for &m in &frontier {
            let top = 64 - m.leading_zeros() as usize;
            for i in top..n {
                next.insert(m | 1 << i);
            }
        }
        frontier = next.into_iter().collect();
        out.extend(&frontier);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    /// A final transition.
    Final(TransId),
    /// A transition followed by the entry at the target with this set.
    Then(TransId, NtSet),
}

/// `ℛ_B(P, q)`: images of runs from `q` with at most `B` transitions whose
/// support contains `P`, for every `|P| ≤ k`. Each stored vector keeps the
/// first step of one run producing it, so runs can be rebuilt.
#[derive(Clone, Debug)]
pub struct RunTable {
    bound: u64,
    sets: Vec<NtSet>,
    entries: HashMap<(NtSet, NtId), HashMap<TermVector, Step>>,
}

impl RunTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// The support sets the table was built for.
    pub fn sets(&self) -> &[NtSet] {
        &self.sets
    }

    /// Sorted images in entry `(P, q)`.
    pub fn entry(&self, p: &[NtId], q: NtId) -> Vec<TermVector> {
        self.entry_mask(mask_of(p.iter().copied()), q)
    }

    pub fn entry_mask(&self, p: NtSet, q: NtId) -> Vec<TermVector> {
        let mut out: Vec<TermVector> = self
            .entries
            .get(&(p, q))
            .map(|e| e.keys().cloned().collect())
            .unwrap_or_default();
        out.sort();
        out
    }

    pub fn contains(&self, p: NtSet, q: NtId, v: &TermVector) -> bool {
        self.entries.get(&(p, q)).is_some_and(|e| e.contains_key(v))
    }

    /// One run from `q` with image `v` whose support contains `p`.
    pub fn witness(&self, g: &Grammar, p: NtSet, q: NtId, v: &TermVector) -> Option<TransitionMultiset> {
        let mut r = TransitionMultiset::zero(g.num_transitions());
        let (mut p, mut q, mut v) = (p, q, v.clone());
        loop {
            match *self.entries.get(&(p, q))?.get(&v)? {
                Step::Final(t) => {
                    r.add_one(t);
                    return Some(r);
                }
                Step::Then(t, p2) => {
                    r.add_one(t);
                    let tr = g.transition(t);
                    v -= &tr.output;
                    q = tr.targets.iter().next().expect("non-final").0;
                    p = p2;
                }
            }
        }
    }
}

/// Builds `ℛ_B(P, q)` for all `|P| ≤ k` by layers of run length:
/// `ℛₙ(P,q) = ℛₙ₋₁(P,q) ∪ {Ψ(δ) : δ final from q, P ⊆ {q}}
///          ∪ {Ψ(δ) + ℛₙ₋₁(P∖{q}, r) : δ from q to r}`.
/// Only vectors new in layer `n − 1` are extended in layer `n`.
pub fn build_run_table(g: &Grammar, bound: u64, k: usize) -> Result<RunTable, MemberError> {
    if !g.is_regular() {
        return Err(MemberError::NotRegular);
    }
    let n = g.num_nonterminals();
    if n > 64 {
        return Err(MemberError::TooManyNonterminals(n));
    }
    let sets = small_subsets(n, k);
    let set_index: HashMap<NtSet, usize> = sets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut entries: HashMap<(NtSet, NtId), HashMap<TermVector, Step>> = HashMap::new();
    let mut fresh: Vec<((NtSet, NtId), TermVector)> = Vec::new();
    if bound >= 1 {
        for &p in &sets {
            for t in g.transitions().iter().filter(|t| t.is_final()) {
                if p & !(1 << t.source.0) == 0 {
                    let e = entries.entry((p, t.source)).or_default();
                    if !e.contains_key(&t.output) {
                        e.insert(t.output.clone(), Step::Final(t.id));
                        fresh.push(((p, t.source), t.output.clone()));
                    }
                }
            }
        }
    }
    // Non-final transitions grouped by target.
    let mut into: Vec<Vec<TransId>> = vec![Vec::new(); n];
    for t in g.transitions().iter().filter(|t| !t.is_final()) {
        into[t.targets.iter().next().expect("regular").0 .0].push(t.id);
    }
    for _ in 2..=bound {
        if fresh.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for ((p2, r), w) in &fresh {
            for &tid in &into[r.0] {
                let t = g.transition(tid);
                let q = t.source;
                let v = &t.output + w;
                // P ∖ {q} = p2 for P = p2 and, when q ∉ p2, also P = p2 ∪ {q}.
                let mut targets = vec![*p2];
                if p2 >> q.0 & 1 == 0 && set_index.contains_key(&(p2 | 1 << q.0)) {
                    targets.push(p2 | 1 << q.0);
                }
                for p in targets {
                    let e = entries.entry((p, q)).or_default();
                    if !e.contains_key(&v) {
                        e.insert(v.clone(), Step::Then(tid, *p2));
                        next.push(((p, q), v.clone()));
                    }
                }
            }
        }
        fresh = next;
    }
    Ok(RunTable {
        bound,
        sets,
        entries,
    })
}

/// `𝒫ₙ(q₁, q₂)`: images of paths from `q₁` to `q₂` with at most `n`
/// transitions, each with one representative path.
#[derive(Clone, Debug)]
pub struct PathTable {
    bound: u64,
    entries: HashMap<(NtId, NtId), HashMap<TermVector, TransitionMultiset>>,
}

impl PathTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn entry(&self, q1: NtId, q2: NtId) -> Vec<TermVector> {
        let mut out: Vec<TermVector> = self
            .entries
            .get(&(q1, q2))
            .map(|e| e.keys().cloned().collect())
            .unwrap_or_default();
        out.sort();
        out
    }

    pub fn representative(&self, q1: NtId, q2: NtId, v: &TermVector) -> Option<&TransitionMultiset> {
        self.entries.get(&(q1, q2))?.get(v)
    }
}

/// `𝒫₀(q, q) = {0}`, `𝒫₀(q₁, q₂) = ∅` for `q₁ ≠ q₂`, and
/// `𝒫ₙ(q₁, q₂) = 𝒫ₙ₋₁(q₁, q₂) ∪ {Ψ(δ) + 𝒫ₙ₋₁(r, q₂) : δ from q₁ to r}`.
pub fn build_path_table(g: &Grammar, n: u64) -> Result<PathTable, MemberError> {
    if !g.is_regular() {
        return Err(MemberError::NotRegular);
    }
    let nn = g.num_nonterminals();
    let m = g.num_transitions();
    let mut entries: HashMap<(NtId, NtId), HashMap<TermVector, TransitionMultiset>> = HashMap::new();
    let mut fresh: Vec<(NtId, NtId, TermVector)> = Vec::new();
    for q in (0..nn).map(NtId) {
        let zero = TermVector::zero(g.alphabet_size());
        entries
            .entry((q, q))
            .or_default()
            .insert(zero.clone(), TransitionMultiset::zero(m));
        fresh.push((q, q, zero));
    }
    for _ in 0..n {
        let mut next = Vec::new();
        for (r, q2, w) in &fresh {
            let rep = entries[&(*r, *q2)][w].clone();
            for t in g.transitions() {
                if t.is_final() || t.targets.count(*r) == 0 {
                    continue;
                }
                let v = &t.output + w;
                let e = entries.entry((t.source, *q2)).or_default();
                if !e.contains_key(&v) {
                    let mut path = rep.clone();
                    path.add_one(t.id);
                    e.insert(v.clone(), path);
                    next.push((t.source, *q2, v));
                }
            }
        }
        fresh = next;
    }
    Ok(PathTable { bound: n, entries })
}

/// A base run plus nonnegative multiples of cycles anchored in its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberWitness {
    pub base: TermVector,
    pub base_run: TransitionMultiset,
    pub cycles: Vec<WitnessCycle>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCycle {
    pub image: TermVector,
    pub anchor: NtId,
    pub cycle: TransitionMultiset,
    pub coefficient: u64,
}

impl MemberWitness {
    /// The run `base_run + Σ coefficient · cycle`.
    pub fn expand(&self) -> TransitionMultiset {
        self.cycles
            .iter()
            .fold(self.base_run.clone(), |r, c| r.plus_scaled(&c.cycle, c.coefficient))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularOutcome {
    Member(MemberWitness),
    NonMember,
    /// No witness with base runs of at most the bound, which was below
    /// `B_G`.
    NotWithinBound,
}

impl RegularOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, RegularOutcome::Member(_))
    }
}

/// A cycle image with the anchor and cycle realizing it.
type CycleSource = (TermVector, NtId, TransitionMultiset);

/// A candidate period set `Z` with its solver.
#[derive(Clone, Debug)]
struct PeriodChoice {
    solver: LatticeSolver,
    /// Indices of the periods in the family's image list.
    indices: Vec<usize>,
}

/// Solutions of `d ∈ ℕZ` over the maximal independent `Z ⊆ Y`, memoized.
/// Shared by every support set with the same sorted image list `Y`; the
/// cycles realizing the images belong to each support set.
#[derive(Debug)]
struct PeriodFamily {
    choices: Vec<PeriodChoice>,
    /// Per letter: whether some period is positive / negative there.
    signs: Vec<(bool, bool)>,
    memo: std::cell::RefCell<HashMap<TermVector, Option<(usize, Vec<u64>)>>>,
}

impl PeriodFamily {
    fn new(images: &[TermVector], dim: usize) -> Self {
        let choices = maximal_independent_subsets(images)
            .into_iter()
            .map(|indices| {
                let periods: Vec<TermVector> = indices.iter().map(|&i| images[i].clone()).collect();
                PeriodChoice {
                    solver: LatticeSolver::new(&periods, dim).expect("independent"),
                    indices,
                }
            })
            .collect();
        let signs = (0..dim)
            .map(|x| (images.iter().any(|z| z.get(x) > 0), images.iter().any(|z| z.get(x) < 0)))
            .collect();
        PeriodFamily {
            choices,
            signs,
            memo: Default::default(),
        }
    }

    /// Bounds on a base `w` for which `v − w` can lie in the cone of the
    /// periods: a letter with no positive period needs `w ≥ v` there, one
    /// with no negative period needs `w ≤ v`.
    fn base_box(&self, v: &TermVector) -> (Vec<i64>, Vec<i64>) {
        self.signs
            .iter()
            .enumerate()
            .map(|(x, &(pos, neg))| {
                let lo = if pos { i64::MIN } else { v.get(x) };
                let hi = if neg { i64::MAX } else { v.get(x) };
                (lo, hi)
            })
            .unzip()
    }

    fn solve(&self, d: &TermVector) -> Option<(usize, Vec<u64>)> {
        if let Some(hit) = self.memo.borrow().get(d) {
            return hit.clone();
        }
        let found = self
            .choices
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.solver.solve(d).map(|x| (i, x)));
        self.memo.borrow_mut().insert(d.clone(), found.clone());
        found
    }

    /// `sources[i]` is the `(image, anchor, cycle)` behind the `i`-th image.
    fn witness(
        &self,
        sources: &[CycleSource],
        base: TermVector,
        base_run: TransitionMultiset,
        hit: (usize, Vec<u64>),
    ) -> MemberWitness {
        let choice = &self.choices[hit.0];
        MemberWitness {
            base,
            base_run,
            cycles: choice
                .indices
                .iter()
                .zip(hit.1)
                .map(|(&i, coefficient)| {
                    let (image, anchor, cycle) = &sources[i];
                    WitnessCycle {
                        image: image.clone(),
                        anchor: *anchor,
                        cycle: cycle.clone(),
                        coefficient,
                    }
                })
                .collect(),
        }
    }
}

/// Visits, in order, the vectors of a lexicographically sorted slice that
/// lie in the box `[lo, hi]`, until `f` returns true. Every vector in
/// `sorted` must agree on the letters before `x`.
fn find_in_box<'a>(
    sorted: &'a [TermVector],
    x: usize,
    lo: &[i64],
    hi: &[i64],
    f: &mut impl FnMut(&'a TermVector) -> bool,
) -> bool {
    let start = sorted.partition_point(|w| w.get(x) < lo[x]);
    let end = sorted.partition_point(|w| w.get(x) <= hi[x]);
    if start >= end {
        return false;
    }
    let slice = &sorted[start..end];
    if x + 1 == lo.len() {
        return slice.iter().any(|w| f(w));
    }
    let mut i = 0;
    while i < slice.len() {
        let value = slice[i].get(x);
        let run = slice[i..].partition_point(|w| w.get(x) == value);
        if find_in_box(&slice[i..i + run], x + 1, lo, hi, f) {
            return true;
        }
        i += run;
    }
    false
}

/// One support set `P`: its bases `ℛ_B(P, q_ini)` sorted, its period
/// family, and per image the anchor in `P` and cycle realizing it.
#[derive(Debug)]
struct Group {
    support: NtSet,
    bases: Vec<TermVector>,
    family: usize,
    sources: Vec<CycleSource>,
}

/// Prepared tables for repeated membership queries against a regular
/// grammar: for every support set `P` with `|P| ≤ A`, the bases
/// `ℛ_B(P, q_ini)` and the nonzero short cycles through `P`.
#[derive(Debug)]
pub struct RegularMember {
    grammar: Grammar,
    complete: bool,
    runs: RunTable,
    groups: Vec<Group>,
    families: Vec<PeriodFamily>,
}

impl RegularMember {
    /// `bound` defaults to `B_G`; a smaller bound keeps positive answers
    /// sound but turns negative ones into [`RegularOutcome::NotWithinBound`].
    pub fn new(g: &Grammar, bound: Option<u64>) -> Result<Self, MemberError> {
        if !g.is_regular() {
            return Err(MemberError::NotRegular);
        }
        let bg = compute_bg(g)?;
        let b = bound.unwrap_or_else(|| bg.saturated());
        let complete = BigInt::from(b) >= bg.value;
        let a = g.alphabet_size();
        let runs = build_run_table(g, b, a)?;
        let paths = build_path_table(g, g.num_nonterminals() as u64)?;
        let mut families: Vec<PeriodFamily> = Vec::new();
        let mut family_of: HashMap<Vec<TermVector>, usize> = HashMap::new();
        let mut groups = Vec::new();
        for &p in runs.sets() {
            let bases = runs.entry_mask(p, g.start());
            if bases.is_empty() {
                continue;
            }
            let mut y: Vec<CycleSource> = Vec::new();
            for q in ids_of(p) {
                for v in paths.entry(q, q) {
                    if !v.is_zero() && !y.iter().any(|e| e.0 == v) {
                        let rep = paths.representative(q, q, &v).expect("present").clone();
                        y.push((v, q, rep));
                    }
                }
            }
            y.sort_by(|a, b| a.0.cmp(&b.0));
            let key: Vec<TermVector> = y.iter().map(|e| e.0.clone()).collect();
            let family = *family_of.entry(key).or_insert_with_key(|key| {
                families.push(PeriodFamily::new(key, a));
                families.len() - 1
            });
            groups.push(Group {
                support: p,
                bases,
                family,
                sources: y,
            });
        }
        // Larger supports carry more periods; try them first.
        groups.sort_by_key(|gr| (std::cmp::Reverse(gr.support.count_ones()), gr.support));
        Ok(RegularMember {
            grammar: g.clone(),
            complete,
            runs,
            groups,
            families,
        })
    }

    pub fn bound(&self) -> u64 {
        self.runs.bound()
    }

    /// Whether the bound reaches `B_G`, so negative answers are exact.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn query(&self, v: &TermVector) -> Result<RegularOutcome, MemberError> {
        let a = self.grammar.alphabet_size();
        if v.dim() != a {
            return Err(MemberError::Dimension {
                expected: a,
                got: v.dim(),
            });
        }
        for gr in &self.groups {
            let family = &self.families[gr.family];
            let bases = &gr.bases;
            let (lo, hi) = family.base_box(v);
            let mut found = None;
            let mut try_base = |w: &TermVector| match family.solve(&(v - w)) {
                Some(hit) => {
                    found = Some((w.clone(), hit));
                    true
                }
                None => false,
            };
            if a == 0 {
                bases.iter().any(&mut try_base);
            } else {
                find_in_box(bases, 0, &lo, &hi, &mut try_base);
            }
            if let Some((w, hit)) = found {
                let run = self
                    .runs
                    .witness(&self.grammar, gr.support, self.grammar.start(), &w)
                    .expect("stored entries have witnesses");
                return Ok(RegularOutcome::Member(family.witness(&gr.sources, w, run, hit)));
            }
        }
        Ok(if self.complete {
            RegularOutcome::NonMember
        } else {
            RegularOutcome::NotWithinBound
        })
    }
}

/// Decides `v ∈ Ψ(g)` for a regular grammar: some support set `P`, base
/// `w ∈ ℛ_B(P, q_ini)` and independent `Z` of short cycle images through
/// `P` with `v − w ∈ ℕZ`.
pub fn member_regular(g: &Grammar, v: &TermVector, bound: Option<u64>) -> Result<RegularOutcome, MemberError> {
    RegularMember::new(g, bound)?.query(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralCaps {
    pub run_cap: u64,
    pub cycle_cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneralOutcome {
    Member(MemberWitness),
    NonMember,
    Unknown,
}

impl GeneralOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, GeneralOutcome::Member(_))
    }
}

/// Prepared base runs and cycle families for repeated general membership
/// queries.
#[derive(Debug)]
pub struct GeneralMember {
    complete: bool,
    /// `(image, run, family)` per distinct (support, image), in run order.
    bases: Vec<(TermVector, TransitionMultiset, usize)>,
    /// Per support set: the family and the cycles behind its images.
    families: Vec<(PeriodFamily, Vec<CycleSource>)>,
    dim: usize,
}

impl GeneralMember {
    pub fn new(g: &Grammar, caps: GeneralCaps) -> Result<Self, MemberError> {
        let bg = compute_bg(g)?;
        let complete = BigInt::from(caps.run_cap) >= bg.value && caps.cycle_cap >= simple_cycle_limit(g);
        let dim = g.alphabet_size();
        let mut cycles_from: Vec<Vec<CycleSource>> = Vec::new();
        for q in (0..g.num_nonterminals()).map(NtId) {
            let mut ys: Vec<CycleSource> = Vec::new();
            for c in enumerate_simple_cycles(g, q, caps.cycle_cap)?.cycles {
                let v = parikh(g, &c);
                if !v.is_zero() && !ys.iter().any(|e| e.0 == v) {
                    ys.push((v, q, c));
                }
            }
            cycles_from.push(ys);
        }
        let mut runs: Vec<TransitionMultiset> = Vec::new();
        SubrunSearch::new(g, NtMultiset::singleton(g.start()), NtMultiset::new(), caps.run_cap)
            .visit(|r, _| runs.push(r.clone()))?;
        let mut seen: BTreeSet<(NtSet, TermVector)> = BTreeSet::new();
        let mut families: Vec<(PeriodFamily, Vec<CycleSource>)> = Vec::new();
        let mut family_of: HashMap<NtSet, usize> = HashMap::new();
        let mut bases = Vec::new();
        for r in runs {
            let supp = support(g, &r);
            let mask = mask_of(supp.iter().copied());
            let w = parikh(g, &r);
            if !seen.insert((mask, w.clone())) {
                continue;
            }
            let idx = *family_of.entry(mask).or_insert_with(|| {
                let mut y: Vec<CycleSource> = Vec::new();
                for q in &supp {
                    for e in &cycles_from[q.0] {
                        if !y.iter().any(|f| f.0 == e.0) {
                            y.push(e.clone());
                        }
                    }
                }
                y.sort_by(|a, b| a.0.cmp(&b.0));
                let images: Vec<TermVector> = y.iter().map(|e| e.0.clone()).collect();
                families.push((PeriodFamily::new(&images, dim), y));
                families.len() - 1
            });
            bases.push((w, r, idx));
        }
        Ok(GeneralMember {
            complete,
            bases,
            families,
            dim,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn query(&self, v: &TermVector) -> Result<GeneralOutcome, MemberError> {
        if v.dim() != self.dim {
            return Err(MemberError::Dimension {
                expected: self.dim,
                got: v.dim(),
            });
        }
        for (w, r, fam) in &self.bases {
            let (family, sources) = &self.families[*fam];
            if let Some(hit) = family.solve(&(v - w)) {
                return Ok(GeneralOutcome::Member(family.witness(sources, w.clone(), r.clone(), hit)));
            }
        }
        Ok(if self.complete {
            GeneralOutcome::NonMember
        } else {
            GeneralOutcome::Unknown
        })
    }
}

/// Guesses a base run of at most `run_cap` transitions and independent
/// simple cycles (at most `cycle_cap` transitions) anchored in its support.
/// A negative answer is definite only when the caps reach `B_G` and
/// `γ(N) − 1`.
pub fn member_general(g: &Grammar, v: &TermVector, caps: GeneralCaps) -> Result<GeneralOutcome, MemberError> {
    GeneralMember::new(g, caps)?.query(v)
}

/// Saturating `u64` view of a `B_G` value.
pub fn bound_u64(b: &BigInt) -> u64 {
    b.to_u64().unwrap_or(u64::MAX)
}
