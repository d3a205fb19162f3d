//! Linear and semilinear sets and simple bundles.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::linalg::{hadamard_bound, is_linearly_independent, rank, LatticeSolver};
use crate::vector::TermVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemilinearError {
    #[error("bundle periods must be linearly independent")]
    DependentPeriods,
    #[error("dimension mismatch")]
    Dimension,
}

/// `v₀ + ⊕ℕ P`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSet {
    pub base: TermVector,
    pub periods: Vec<TermVector>,
}

impl LinearSet {
    pub fn new(base: TermVector, periods: Vec<TermVector>) -> Self {
        LinearSet { base, periods }
    }
}

/// Every maximal linearly independent subset of `vs` (as index lists, in
/// lexicographic order). Zero vectors are never included.
pub fn maximal_independent_subsets(vs: &[TermVector]) -> Vec<Vec<usize>> {
    let nonzero: Vec<usize> = (0..vs.len()).filter(|&i| !vs[i].is_zero()).collect();
    let all: Vec<&TermVector> = nonzero.iter().map(|&i| &vs[i]).collect();
    let target = rank(&all);
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(
        vs: &[TermVector],
        candidates: &[usize],
        from: usize,
        target: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == target {
            out.push(current.clone());
            return;
        }
        // Not enough candidates left to reach full rank.
        if candidates.len() - from < target - current.len() {
            return;
        }
        for k in from..candidates.len() {
            current.push(candidates[k]);
            let refs: Vec<&TermVector> = current.iter().map(|&i| &vs[i]).collect();
            if is_linearly_independent(&refs) {
                go(vs, candidates, k + 1, target, current, out);
            }
            current.pop();
        }
    }
    go(vs, &nonzero, 0, target, &mut current, &mut out);
    out
}

/// Decides `v ∈ v₀ + ⊕ℕ P`. With `H = h(A, max ‖p‖∞)`, some independent
/// `P₀ ⊆ P` carries all coefficients above `H`; every maximal independent
/// `P₀` is tried with the other coefficients enumerated in `[0..H]`.
pub fn linear_member(l: &LinearSet, v: &TermVector) -> bool {
    linear_member_witness(l, v).is_some()
}

/// Coefficients (aligned with `l.periods`) witnessing membership.
pub fn linear_member_witness(l: &LinearSet, v: &TermVector) -> Option<Vec<u64>> {
    let dim = v.dim();
    let d = v - &l.base;
    let mut periods: Vec<usize> = Vec::new();
    for (i, p) in l.periods.iter().enumerate() {
        if !p.is_zero() && !periods.iter().any(|&j| l.periods[j] == *p) {
            periods.push(i);
        }
    }
    if periods.is_empty() {
        return d.is_zero().then(|| vec![0; l.periods.len()]);
    }
    let vecs: Vec<TermVector> = periods.iter().map(|&i| l.periods[i].clone()).collect();
    let c = vecs.iter().map(TermVector::norm_inf).max().unwrap_or(0);
    let h = hadamard_bound(dim, &BigInt::from(c))
        .to_u64()
        .expect("coefficient bound too large to enumerate");
    for p0 in maximal_independent_subsets(&vecs) {
        let basis: Vec<TermVector> = p0.iter().map(|&i| vecs[i].clone()).collect();
        let solver = LatticeSolver::new(&basis, dim).expect("independent by construction");
        let rest: Vec<usize> = (0..vecs.len()).filter(|i| !p0.contains(i)).collect();
        let mut coeff = vec![0u64; rest.len()];
        loop {
            let mut target = d.clone();
            for (k, &i) in rest.iter().enumerate() {
                target.add_scaled(&vecs[i], -(coeff[k] as i64));
            }
            if let Some(x) = solver.solve(&target) {
                let mut out = vec![0u64; l.periods.len()];
                for (k, &i) in p0.iter().enumerate() {
                    out[periods[i]] = x[k];
                }
                for (k, &i) in rest.iter().enumerate() {
                    out[periods[i]] = coeff[k];
                }
                return Some(out);
            }
            // odometer over [0..H]^rest
            let mut k = 0;
            while k < coeff.len() && coeff[k] == h {
                coeff[k] = 0;
                k += 1;
            }
            if k == coeff.len() {
                break;
            }
            coeff[k] += 1;
        }
    }
    None
}

/// A finite union of linear sets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SemilinearSet {
    pub components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(components: Vec<LinearSet>) -> Self {
        SemilinearSet { components }
    }
}

pub fn semilinear_member(s: &SemilinearSet, v: &TermVector) -> bool {
    s.components.iter().any(|l| linear_member(l, v))
}

/// `W + ⊕ℕ P` with finite `W` and linearly independent `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleBundle {
    bases: Vec<TermVector>,
    periods: Vec<TermVector>,
}

impl SimpleBundle {
    pub fn new(bases: Vec<TermVector>, periods: Vec<TermVector>) -> Result<Self, SemilinearError> {
        let refs: Vec<&TermVector> = periods.iter().collect();
        if !is_linearly_independent(&refs) {
            return Err(SemilinearError::DependentPeriods);
        }
        Ok(SimpleBundle { bases, periods })
    }

    pub fn bases(&self) -> &[TermVector] {
        &self.bases
    }

    pub fn periods(&self) -> &[TermVector] {
        &self.periods
    }

    /// `‖w‖∞ ≤ b` for every base and `‖p‖∞ ≤ y` for every period.
    pub fn is_bounded_by(&self, b: u64, y: u64) -> bool {
        self.bases.iter().all(|w| w.norm_inf() <= b)
            && self.periods.iter().all(|p| p.norm_inf() <= y)
    }

    pub fn contains(&self, v: &TermVector) -> bool {
        let solver = match LatticeSolver::new(&self.periods, v.dim()) {
            Ok(s) => s,
            Err(_) => return false,
        };
        self.bases.iter().any(|w| solver.solve(&(v - w)).is_some())
    }

    pub fn to_semilinear(&self) -> SemilinearSet {
        SemilinearSet::new(
            self.bases
                .iter()
                .map(|w| LinearSet::new(w.clone(), self.periods.clone()))
                .collect(),
        )
    }
}
