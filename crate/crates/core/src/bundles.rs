//! Representations of Ψ(G) as unions of simple bundles.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cycles::{compute_bg, enumerate_simple_cycles, CycleError};
use crate::grammar::Grammar;
use crate::linalg::LatticeSolver;
use crate::runs::{parikh, support, RunError, SubrunSearch};
use crate::semilinear::{maximal_independent_subsets, SimpleBundle};
use crate::vector::{NtId, NtMultiset, TermVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("grammar is not regular")]
    NotRegular,
    #[error("expected a two-letter alphabet, found {0} letters")]
    NotTwoLetters(usize),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Run(#[from] RunError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSet {
    pub bundles: Vec<SimpleBundle>,
    /// Set when the caps were below the completeness thresholds; the union
    /// is then only guaranteed to be a subset of Ψ(G).
    pub truncated: bool,
}

impl BundleSet {
    pub fn contains(&self, v: &TermVector) -> bool {
        self.bundles.iter().any(|b| b.contains(v))
    }
}

/// Distinct (image, support) pairs over all runs from the start symbol of
/// size at most `run_cap`.
fn base_runs(
    g: &Grammar,
    run_cap: u64,
) -> Result<BTreeSet<(BTreeSet<NtId>, TermVector)>, RunError> {
    let mut out = BTreeSet::new();
    SubrunSearch::new(g, NtMultiset::singleton(g.start()), NtMultiset::new(), run_cap)
        .visit(|r, _| {
            out.insert((support(g, r), parikh(g, r)));
        })?;
    Ok(out)
}

/// Nonzero distinct images of simple cycles from each nonterminal.
fn cycle_images(g: &Grammar, cap: u64) -> Result<(Vec<Vec<TermVector>>, bool), RunError> {
    let mut complete = true;
    let mut out = Vec::with_capacity(g.num_nonterminals());
    for q in 0..g.num_nonterminals() {
        let sc = enumerate_simple_cycles(g, NtId(q), cap)?;
        complete &= sc.complete;
        let mut images: Vec<TermVector> = Vec::new();
        for c in &sc.cycles {
            let v = parikh(g, c);
            if !v.is_zero() && !images.contains(&v) {
                images.push(v);
            }
        }
        out.push(images);
    }
    Ok((out, complete))
}

/// Drops bases already covered by another base plus the periods.
fn minimize_bases(bases: BTreeSet<TermVector>, periods: &[TermVector]) -> Vec<TermVector> {
    let dim = bases.iter().next().map_or(0, TermVector::dim);
    let solver = LatticeSolver::new(periods, dim).expect("periods are independent");
    let all: Vec<TermVector> = bases.into_iter().collect();
    all.iter()
        .filter(|w| {
            !all
                .iter()
                .any(|u| u != *w && solver.solve(&(*w - u)).is_some())
        })
        .cloned()
        .collect()
}

fn assemble(groups: BTreeMap<Vec<TermVector>, BTreeSet<TermVector>>, truncated: bool) -> BundleSet {
    let bundles = groups
        .into_iter()
        .map(|(periods, bases)| {
            let bases = minimize_bases(bases, &periods);
            SimpleBundle::new(bases, periods).expect("independent periods")
        })
        .collect();
    BundleSet { bundles, truncated }
}

/// Bundles `W + ⊕ℕP` for a regular grammar: each base run contributes its
/// image to every maximal independent set `P` of simple-cycle images
/// anchored in its support; runs sharing `P` are grouped.
pub fn regular_bundles(g: &Grammar, run_cap: u64) -> Result<BundleSet, BundleError> {
    if !g.is_regular() {
        return Err(BundleError::NotRegular);
    }
    let bg = compute_bg(g)?;
    let (images, cycles_complete) = cycle_images(g, u64::MAX)?;
    let mut groups: BTreeMap<Vec<TermVector>, BTreeSet<TermVector>> = BTreeMap::new();
    for (supp, w) in base_runs(g, run_cap)? {
        let mut y: Vec<TermVector> = Vec::new();
        for q in &supp {
            for v in &images[q.0] {
                if !y.contains(v) {
                    y.push(v.clone());
                }
            }
        }
        y.sort();
        for subset in maximal_independent_subsets(&y) {
            let periods: Vec<TermVector> = subset.iter().map(|&i| y[i].clone()).collect();
            groups.entry(periods).or_default().insert(w.clone());
        }
    }
    let truncated = !cycles_complete || num_bigint::BigInt::from(run_cap) < bg.value;
    Ok(assemble(groups, truncated))
}

fn cross(a: &TermVector, b: &TermVector) -> i128 {
    a.get(0) as i128 * b.get(1) as i128 - a.get(1) as i128 * b.get(0) as i128
}

fn dot(a: &TermVector, b: &TermVector) -> i128 {
    a.get(0) as i128 * b.get(0) as i128 + a.get(1) as i128 * b.get(1) as i128
}

fn upper_half(v: &TermVector) -> bool {
    v.get(1) > 0 || (v.get(1) == 0 && v.get(0) > 0)
}

/// Counter-clockwise order starting at the positive x axis.
fn angle_cmp(a: &TermVector, b: &TermVector) -> Ordering {
    match (upper_half(a), upper_half(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => 0.cmp(&cross(a, b)),
    }
}

fn same_direction(a: &TermVector, b: &TermVector) -> bool {
    cross(a, b) == 0 && dot(a, b) > 0
}

/// Whether the counter-clockwise angle from `a` to `b` is below π.
fn turn_below_pi(a: &TermVector, b: &TermVector) -> bool {
    cross(a, b) > 0
}

fn positively_spanning(dirs: &[&TermVector]) -> bool {
    dirs.len() >= 3
        && (0..dirs.len()).all(|i| turn_below_pi(dirs[i], dirs[(i + 1) % dirs.len()]))
}

/// A small set of vectors from `vs` (nonzero, two-dimensional) whose
/// nonnegative real combinations give the same cone, in counter-clockwise
/// order:
/// a single ray or a pointed cone gives its one or two boundary vectors, a
/// line its two opposite vectors, a half-plane its two boundary vectors and
/// one interior vector, and the whole plane a positively spanning set of
/// three or four vectors. Among parallel vectors the one with the smallest
/// `‖·‖∞` (then the smallest) represents the direction.
pub fn extreme_vectors(vs: &[TermVector]) -> Vec<TermVector> {
    let mut sorted: Vec<TermVector> = vs.iter().filter(|v| !v.is_zero()).cloned().collect();
    sorted.sort_by(|a, b| {
        angle_cmp(a, b)
            .then(a.norm_inf().cmp(&b.norm_inf()))
            .then(a.cmp(b))
    });
    let mut dirs: Vec<TermVector> = Vec::new();
    for v in sorted {
        if !dirs.last().is_some_and(|d| same_direction(d, &v)) {
            dirs.push(v);
        }
    }
    let k = dirs.len();
    if k <= 1 {
        return dirs;
    }
    // Gap from dirs[i] to dirs[i+1], counter-clockwise.
    for i in 0..k {
        let (a, b) = (&dirs[i], &dirs[(i + 1) % k]);
        if cross(a, b) < 0 || (k == 1) {
            // reflex gap: the cone runs from b round to a
            return if same_direction(a, b) {
                vec![a.clone()]
            } else {
                vec![b.clone(), a.clone()]
            };
        }
    }
    for i in 0..k {
        let (a, b) = (&dirs[i], &dirs[(i + 1) % k]);
        if cross(a, b) == 0 && dot(a, b) < 0 {
            if k == 2 {
                return vec![dirs[0].clone(), dirs[1].clone()];
            }
            // half-plane from b round to a; any vector strictly inside
            let inner = dirs[(i + 2) % k].clone();
            return vec![b.clone(), inner, a.clone()];
        }
    }
    // Every gap is below π: the whole plane.
    for size in 3..=4 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let pick: Vec<&TermVector> = idx.iter().map(|&i| &dirs[i]).collect();
            if positively_spanning(&pick) {
                return pick.into_iter().cloned().collect();
            }
            // next combination
            let mut j = size;
            while j > 0 && idx[j - 1] == k - size + j - 1 {
                j -= 1;
            }
            if j == 0 {
                break;
            }
            idx[j - 1] += 1;
            for t in j..size {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    unreachable!("a positively spanning set in the plane has a spanning subset of size at most 4")
}

/// Whether the extreme vectors describe the whole plane.
fn is_full_plane(ext: &[TermVector]) -> bool {
    let refs: Vec<&TermVector> = ext.iter().collect();
    positively_spanning(&refs)
}

/// Pairs of consecutive extreme vectors (cyclically for the whole plane);
/// each pair spans a sector of the cone. Rays and lines give singletons.
fn sectors(ext: &[TermVector]) -> Vec<Vec<TermVector>> {
    match ext.len() {
        0 => vec![vec![]],
        1 => vec![vec![ext[0].clone()]],
        2 if cross(&ext[0], &ext[1]) == 0 => vec![vec![ext[0].clone()], vec![ext[1].clone()]],
        _ => {
            let k = ext.len();
            let pairs = if is_full_plane(ext) { k } else { k - 1 };
            (0..pairs)
                .map(|i| vec![ext[i].clone(), ext[(i + 1) % k].clone()])
                .collect()
        }
    }
}

/// Extreme simple-cycle images from `q` for a two-letter grammar.
pub fn extreme_cycles(g: &Grammar, q: NtId, cap: u64) -> Result<Vec<TermVector>, BundleError> {
    if g.alphabet_size() != 2 {
        return Err(BundleError::NotTwoLetters(g.alphabet_size()));
    }
    let sc = enumerate_simple_cycles(g, q, cap)?;
    let images: Vec<TermVector> = sc.cycles.iter().map(|c| parikh(g, c)).collect();
    Ok(extreme_vectors(&images))
}

/// Bundles for a two-letter grammar built only from extreme cycles: for each
/// base run, the extreme vectors of the extreme cycles anchored in its
/// support are split into sectors, and each sector gives the periods of a
/// bundle.
pub fn dim2_bundles(g: &Grammar, run_cap: u64, cycle_cap: u64) -> Result<BundleSet, BundleError> {
    if g.alphabet_size() != 2 {
        return Err(BundleError::NotTwoLetters(g.alphabet_size()));
    }
    let bg = compute_bg(g)?;
    let mut per_q = Vec::with_capacity(g.num_nonterminals());
    let mut complete = true;
    for q in 0..g.num_nonterminals() {
        let sc = enumerate_simple_cycles(g, NtId(q), cycle_cap)?;
        complete &= sc.complete;
        let images: Vec<TermVector> = sc.cycles.iter().map(|c| parikh(g, c)).collect();
        per_q.push(extreme_vectors(&images));
    }
    let mut groups: BTreeMap<Vec<TermVector>, BTreeSet<TermVector>> = BTreeMap::new();
    for (supp, w) in base_runs(g, run_cap)? {
        let pooled: Vec<TermVector> = supp.iter().flat_map(|q| per_q[q.0].clone()).collect();
        let ext = extreme_vectors(&pooled);
        for periods in sectors(&ext) {
            groups.entry(periods).or_default().insert(w.clone());
        }
    }
    let truncated = !complete || num_bigint::BigInt::from(run_cap) < bg.value;
    Ok(assemble(groups, truncated))
}
