//! Splitting a run into a bounded base run plus independent simple cycles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cycles::{
    compute_bg, is_simple_cycle, removable_cycles, simple_cycle_limit, BgBound, CycleError,
};
use crate::grammar::Grammar;
use crate::linalg::{is_linearly_independent, reduce_multiplicities};
use crate::runs::{is_run, parikh, support, RunError, TransitionMultiset};
use crate::vector::{NtId, TermVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Run(#[from] RunError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposedCycle {
    pub cycle: TransitionMultiset,
    pub anchor: NtId,
    pub multiplicity: u64,
}

/// `Ψ(R) = Ψ(R₁) + Σ nₖ Ψ(Cₖ)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub base_run: TransitionMultiset,
    pub cycles: Vec<DecomposedCycle>,
}

impl Decomposition {
    /// `Ψ(R₁) + Σ nₖ Ψ(Cₖ)`
    pub fn parikh(&self, g: &Grammar) -> TermVector {
        let mut v = parikh(g, &self.base_run);
        for c in &self.cycles {
            v.add_scaled(&parikh(g, &c.cycle), c.multiplicity as i64);
        }
        v
    }

    /// Checks every invariant against the run `r` from `p`: Ψ equality, `R₁`
    /// a run with `|R₁| ≤ B_G`, anchors in `supp(R₁)`, simple cycles with
    /// positive multiplicities, independent cycle images.
    pub fn validate(
        &self,
        g: &Grammar,
        r: &TransitionMultiset,
        p: NtId,
        bg: &BgBound,
    ) -> Result<(), String> {
        if self.parikh(g) != parikh(g, r) {
            return Err("Parikh images differ".into());
        }
        if !is_run(g, &self.base_run, p) {
            return Err("base is not a run".into());
        }
        if BigInt::from(self.base_run.size()) > bg.value {
            return Err(format!("base run has {} transitions, above B_G", self.base_run.size()));
        }
        let supp = support(g, &self.base_run);
        for c in &self.cycles {
            if !supp.contains(&c.anchor) {
                return Err(format!("anchor {} not in the base support", g.nt_name(c.anchor)));
            }
            if c.multiplicity == 0 {
                return Err("zero multiplicity".into());
            }
            match is_simple_cycle(g, &c.cycle, c.anchor, 5_000_000) {
                Ok(true) => {}
                Ok(false) => return Err("cycle is not simple".into()),
                Err(e) => return Err(e.to_string()),
            }
        }
        let images: Vec<TermVector> = self.cycles.iter().map(|c| parikh(g, &c.cycle)).collect();
        let refs: Vec<&TermVector> = images.iter().collect();
        if !is_linearly_independent(&refs) {
            return Err("cycle images are dependent".into());
        }
        Ok(())
    }
}

/// Strips smallest removable cycles until a skeleton remains, merges
/// cycles with equal images, reduces multiplicities so that only an
/// independent family stays unbounded, and folds the rest back into the
/// base run.
pub fn decompose_run(
    g: &Grammar,
    r: &TransitionMultiset,
    p: NtId,
) -> Result<Decomposition, DecomposeError> {
    decompose_run_capped(g, r, p, 2_000_000)
}

pub fn decompose_run_capped(
    g: &Grammar,
    r: &TransitionMultiset,
    p: NtId,
    state_cap: usize,
) -> Result<Decomposition, DecomposeError> {
    compute_bg(g)?;
    if r.len() != g.num_transitions() || !is_run(g, r, p) {
        return Err(CycleError::NotARun.into());
    }
    let limit = simple_cycle_limit(g);
    let supp = support(g, r);
    let mut rest = r.clone();
    // (cycle, anchor, count) in order of discovery
    let mut stripped: Vec<(TransitionMultiset, NtId, u64)> = Vec::new();
    loop {
        let candidates = removable_cycles(g, &rest, p, limit, state_cap)?;
        let Some((cycle, anchor)) = candidates.into_iter().next() else {
            break;
        };
        let mut count = 0;
        while let Some(next) = rest.minus(&cycle) {
            if !(is_run(g, &next, p) && support(g, &next) == supp) {
                break;
            }
            rest = next;
            count += 1;
        }
        match stripped.iter_mut().find(|(c, _, _)| *c == cycle) {
            Some(entry) => entry.2 += count,
            None => stripped.push((cycle, anchor, count)),
        }
    }

    // Merge by image, keeping the first cycle seen for each image.
    let mut by_image: BTreeMap<TermVector, usize> = BTreeMap::new();
    let mut merged: Vec<(TransitionMultiset, NtId, u64, TermVector)> = Vec::new();
    for (cycle, anchor, count) in stripped {
        let image = parikh(g, &cycle);
        match by_image.get(&image) {
            Some(&i) => merged[i].2 += count,
            None => {
                by_image.insert(image.clone(), merged.len());
                merged.push((cycle, anchor, count, image));
            }
        }
    }

    let images: Vec<TermVector> = merged.iter().map(|m| m.3.clone()).collect();
    let counts: Vec<u64> = merged.iter().map(|m| m.2).collect();
    let c = images.iter().map(TermVector::norm_inf).max().unwrap_or(0);
    let reduction = reduce_multiplicities(&images, &counts, c, g.alphabet_size())
        .expect("lengths agree");

    let mut base_run = rest;
    let mut cycles = Vec::new();
    for (i, (cycle, anchor, _, _)) in merged.into_iter().enumerate() {
        let n = reduction.coefficients[i];
        if reduction.p0.contains(&i) {
            cycles.push(DecomposedCycle {
                cycle,
                anchor,
                multiplicity: n,
            });
        } else if n > 0 {
            base_run = base_run.plus_scaled(&cycle, n);
        }
    }
    Ok(Decomposition { base_run, cycles })
}
