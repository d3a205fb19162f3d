//! Unary grammars encoding 3-CNF formulas with one quantifier alternation.

use crate::grammar::{Grammar, GrammarBuilder};
use crate::vector::TermVector;

use super::formula::{CnfFormula, FormulaError, VarKind};

fn a(i: usize) -> String {
    format!("A{i}")
}

fn a_opt(i: usize) -> String {
    format!("A{i}_opt")
}

fn c(j: usize) -> String {
    format!("C{j}")
}

fn c_opt(j: usize) -> String {
    format!("C{j}_opt")
}

/// Counts per target name, in first-appearance order.
fn product(names: impl IntoIterator<Item = String>) -> Vec<(String, u64)> {
    let mut out: Vec<(String, u64)> = Vec::new();
    for n in names {
        match out.iter_mut().find(|(m, _)| *m == n) {
            Some(e) => e.1 += 1,
            None => out.push((n, 1)),
        }
    }
    out
}

fn rule(b: GrammarBuilder, source: &str, letters: i64, targets: Vec<(String, u64)>) -> GrammarBuilder {
    let output: Vec<(&str, i64)> = if letters == 0 { vec![] } else { vec![("a", letters)] };
    b.rule_parts(source, output, targets)
}

/// Clauses containing the literal, without repetition.
fn clauses_with(f: &CnfFormula, kind: VarKind, index: usize, positive: bool) -> Vec<usize> {
    (0..f.num_clauses())
        .filter(|&j| {
            f.clauses[j]
                .iter()
                .any(|l| l.kind == kind && l.index == index && l.positive == positive)
        })
        .collect()
}

/// Declares `S1` and `S2` (choice symbols first, then the deterministic
/// powers) and all their rules.
fn base_builder(f: &CnfFormula, starts: &[&str]) -> GrammarBuilder {
    let (k, l, m) = (f.num_x, f.num_y, f.num_clauses());
    let mut b = Grammar::builder(["a"]);
    for s in starts {
        b = b.nonterminal(s);
    }
    b = b.start(starts[0]);

    // S1 → Π A_i? Π C_j
    let s1 = product((0..k).map(a_opt).chain((0..m).map(c)));
    b = rule(b, "S1", 0, s1);
    // S2 → Π X_i Π Y_i
    let s2 = product((0..k).map(|i| format!("X{i}")).chain((0..l).map(|i| format!("Y{i}"))));
    b = rule(b, "S2", 0, s2);
    for i in 0..k {
        let x = format!("X{i}");
        let pos = product(std::iter::once(a(i)).chain(clauses_with(f, VarKind::X, i, true).into_iter().map(c_opt)));
        let neg = product(clauses_with(f, VarKind::X, i, false).into_iter().map(c_opt));
        b = rule(b, &x, 0, pos);
        b = rule(b, &x, 0, neg);
    }
    for i in 0..l {
        let y = format!("Y{i}");
        let pos = product(clauses_with(f, VarKind::Y, i, true).into_iter().map(c_opt));
        let neg = product(clauses_with(f, VarKind::Y, i, false).into_iter().map(c_opt));
        b = rule(b, &y, 0, pos);
        b = rule(b, &y, 0, neg);
    }
    for i in 0..k {
        b = rule(b, &a_opt(i), 0, vec![]);
        b = rule(b, &a_opt(i), 0, vec![(a(i), 1)]);
    }
    for j in 0..m {
        b = rule(b, &c_opt(j), 0, vec![]);
        b = rule(b, &c_opt(j), 0, vec![(c(j), 1)]);
    }
    b = declare_powers(b, k, m);
    b
}

/// `A_i` generates `a^(2^i)` and `C_j` generates `a^(2^k·4^j)`.
fn declare_powers(mut b: GrammarBuilder, k: usize, m: usize) -> GrammarBuilder {
    for j in (0..m).rev() {
        if j > 0 {
            b = rule(b, &c(j), 0, vec![(c(j - 1), 4)]);
        } else if k > 0 {
            b = rule(b, &c(0), 0, vec![(a(k - 1), 2)]);
        } else {
            b = rule(b, &c(0), 1, vec![]);
        }
    }
    for i in (0..k).rev() {
        if i > 0 {
            b = rule(b, &a(i), 0, vec![(a(i - 1), 2)]);
        } else {
            b = rule(b, &a(0), 1, vec![]);
        }
    }
    b
}

/// `(S1 grammar, S2 grammar)` over `{a}`: `Ψ(S1) ⊆ Ψ(S2)` iff
/// `∀x ∃y ⋀ Cⱼ` holds. Both share the same rules; only the start differs.
pub fn encode_qsat2_inclusion(f: &CnfFormula) -> Result<(Grammar, Grammar), FormulaError> {
    f.validate()?;
    let g = base_builder(f, &["S1", "S2"]).build().expect("well-formed construction");
    let s2 = g.nt_id("S2").expect("declared");
    Ok((g.clone(), g.with_start(s2)))
}

/// A grammar over `{a}` with `Ψ = ℤ` iff the formula holds:
/// `S4 → S2 | S3` where `S3` generates every integer not generated by `S1`.
///
/// `S3 → Z⁺ | Z⁻ | T_{j₀}` for each clause `j₀`, with
/// `T_{j₀} → Π A_i? · C_{j₀}^H · Π_{j≠j₀} C_j^*`, `C^H` giving 0, 2 or 3
/// copies and `C^*` giving 0 to 3 copies: a value below `2^k·4^m` is
/// outside `Ψ(S1)` exactly when some base-4 digit above `2^k` differs
/// from 1.
pub fn encode_qsat2_universality(f: &CnfFormula) -> Result<Grammar, FormulaError> {
    f.validate()?;
    let (k, m) = (f.num_x, f.num_clauses());
    let mut b = base_builder(f, &["S4", "S2", "S3", "S1", "Z_plus", "Z_minus"]);
    b = rule(b, "S4", 0, vec![("S2".into(), 1)]);
    b = rule(b, "S4", 0, vec![("S3".into(), 1)]);
    b = rule(b, "S3", 0, vec![("Z_plus".into(), 1)]);
    b = rule(b, "S3", 0, vec![("Z_minus".into(), 1)]);
    for j0 in 0..m {
        let t = format!("T{j0}");
        let mut targets: Vec<String> = (0..k).map(a_opt).collect();
        targets.extend((0..m).map(|j| if j == j0 { format!("C{j}_H") } else { format!("C{j}_any") }));
        b = rule(b, "S3", 0, vec![(t.clone(), 1)]);
        b = rule(b, &t, 0, product(targets));
    }
    for j in 0..m {
        let h = format!("C{j}_H");
        b = rule(b, &h, 0, vec![]);
        b = rule(b, &h, 0, vec![(c(j), 2)]);
        b = rule(b, &h, 0, vec![(c(j), 3)]);
        let any = format!("C{j}_any");
        for copies in 0..=3 {
            let t = if copies == 0 { vec![] } else { vec![(c(j), copies)] };
            b = rule(b, &any, 0, t);
        }
    }
    // Z⁺ → a^(2^k·4^m) | a Z⁺
    let top: Vec<(String, u64)> = if m > 0 {
        vec![(c(m - 1), 4)]
    } else if k > 0 {
        vec![(a(k - 1), 2)]
    } else {
        vec![]
    };
    let top_letters = if m == 0 && k == 0 { 1 } else { 0 };
    b = rule(b, "Z_plus", top_letters, top);
    b = rule(b, "Z_plus", 1, vec![("Z_plus".into(), 1)]);
    // Z⁻ → a⁻¹ Z⁻ | a⁻¹
    b = rule(b, "Z_minus", -1, vec![("Z_minus".into(), 1)]);
    b = rule(b, "Z_minus", -1, vec![]);
    Ok(b.build().expect("well-formed construction"))
}

/// The `S2` grammar for a formula without universal variables, and the
/// image `Σⱼ 4^j·a` of `S1`; membership holds iff the formula is
/// satisfiable.
pub fn encode_3sat_membership(f: &CnfFormula) -> Result<(Grammar, TermVector), FormulaError> {
    if f.num_x > 0 {
        return Err(FormulaError::HasUniversals);
    }
    let (_, g2) = encode_qsat2_inclusion(f)?;
    let v: i64 = (0..f.num_clauses()).map(|j| 4i64.pow(j as u32)).sum();
    Ok((g2, TermVector::from_vec(vec![v])))
}

/// `2^k·4^m`: every value generated by `S1` or `S2` is below this.
pub fn qsat_value_bound(f: &CnfFormula) -> u64 {
    (1u64 << f.num_x) << (2 * f.num_clauses())
}
