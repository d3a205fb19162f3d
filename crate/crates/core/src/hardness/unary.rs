//! Unary regular grammars whose non-members encode satisfying assignments.

use crate::grammar::Grammar;

use super::formula::{CnfFormula, FormulaError};

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// For clause `i` over variables with primes `p₁…p_r` and `Mᵢ = Πp`, states
/// `S{i}_{j}` for `j < Mᵢ` cycle with `a`, and stop with `ε` at every `j`
/// whose residues falsify the clause (a positive literal needs residue 1,
/// a negative one residue 0). The start `s0` moves silently to each
/// `S{i}_0`. Then `x ∉ Ψ` iff the residues `x mod p` satisfy every clause,
/// so the grammar is universal over ℕ iff the formula is unsatisfiable.
///
/// Variables are numbered `x`s first, then `y`s; `primes[v]` belongs to
/// variable `v`.
pub fn encode_3sat_unary_universality(f: &CnfFormula, primes: &[u64]) -> Result<Grammar, FormulaError> {
    f.validate()?;
    let n = f.num_vars();
    if primes.len() < n {
        return Err(FormulaError::NotEnoughPrimes {
            needed: n,
            given: primes.len(),
        });
    }
    let used = &primes[..n];
    if !used.iter().all(|&p| is_prime(p)) || (1..n).any(|i| used[..i].contains(&used[i])) {
        return Err(FormulaError::BadPrimes);
    }
    let mut b = Grammar::builder(["a"]).start("s0");
    for (i, clause) in f.clauses.iter().enumerate() {
        let mut vars: Vec<usize> = clause.iter().map(|l| f.var_position(l)).collect();
        vars.sort_unstable();
        vars.dedup();
        let modulus: u64 = vars.iter().map(|&v| used[v]).product();
        let state = |j: u64| format!("S{i}_{j}");
        b = b.rule("s0", "", &state(0));
        for j in 0..modulus {
            b = b.rule(&state(j), "a", &state((j + 1) % modulus));
            let satisfied = clause
                .iter()
                .any(|l| j % used[f.var_position(l)] == u64::from(l.positive));
            if !satisfied {
                b = b.rule(&state(j), "", "");
            }
        }
    }
    Ok(b.build().expect("well-formed construction"))
}

/// Whether `x` (as residues) satisfies every clause.
pub fn residues_satisfy(f: &CnfFormula, primes: &[u64], x: u64) -> bool {
    f.clauses.iter().all(|c| {
        c.iter()
            .any(|l| x % primes[f.var_position(l)] == u64::from(l.positive))
    })
}
