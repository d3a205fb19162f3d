//! Grammars whose Parikh image has a convex hull with `2^n` vertices.

use std::fmt;
use std::str::FromStr;

use crate::grammar::Grammar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardVariant {
    /// `G_n` over `x`, `y` and the temporary terminals `A{n}`, `S{n+1}`.
    Full,
    /// `G′_n`: the temporary terminals erased, leaving `{x, y}`.
    Stripped,
    /// `G°_n` over `{x, y, z}`: a new start `S_cone → z S0 S_cone | ε`.
    Cone,
}

impl FromStr for HardVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(HardVariant::Full),
            "stripped" => Ok(HardVariant::Stripped),
            "cone" => Ok(HardVariant::Cone),
            _ => Err(format!("unknown variant `{s}` (expected full, stripped or cone)")),
        }
    }
}

impl fmt::Display for HardVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HardVariant::Full => "full",
            HardVariant::Stripped => "stripped",
            HardVariant::Cone => "cone",
        })
    }
}

/// The level-`n` grammar. `G₀` is `S0 → S1 A0`, `X0 → x`; level `m + 1`
/// turns the terminals `A{m}` and `S{m+1}` into nonterminals with
/// `A{m} → A{m+1}² | S{m+2}² X{m} y`, `S{m+1} → A{m+1} S{m+2}`, and adds
/// `X{m+1} → X{m}²`. `X{n}` generates `x^(2^n)`.
pub fn gen_hard_grammar(n: usize, variant: HardVariant) -> Grammar {
    let temp_a = format!("A{n}");
    let temp_s = format!("S{}", n + 1);
    let alphabet: Vec<String> = match variant {
        HardVariant::Full => vec!["x".into(), "y".into(), temp_a.clone(), temp_s.clone()],
        HardVariant::Stripped => vec!["x".into(), "y".into()],
        HardVariant::Cone => vec!["x".into(), "y".into(), "z".into()],
    };
    let keep_temps = variant == HardVariant::Full;
    let mut b = Grammar::builder(&alphabet);
    if variant == HardVariant::Cone {
        b = b.start("S_cone");
        b = b.rule("S_cone", "z", "S0 S_cone");
        b = b.rule("S_cone", "", "");
    } else {
        b = b.start("S0");
    }

    // Splits a list of symbols into (terminal outputs, nonterminal targets).
    let place = |symbols: &[(String, u64)], letters: &[(&str, i64)]| {
        let mut output: Vec<(String, i64)> = letters.iter().map(|(s, k)| (s.to_string(), *k)).collect();
        let mut targets: Vec<(String, u64)> = Vec::new();
        for (s, k) in symbols {
            if *s == temp_a || *s == temp_s {
                if keep_temps {
                    output.push((s.clone(), *k as i64));
                }
            } else {
                targets.push((s.clone(), *k));
            }
        }
        (output, targets)
    };

    let (o, t) = place(&[("S1".into(), 1), ("A0".into(), 1)], &[]);
    b = b.rule_parts("S0", o, t);
    for m in 0..n {
        let a_next = format!("A{}", m + 1);
        let s_next2 = format!("S{}", m + 2);
        let (o, t) = place(&[(a_next.clone(), 2)], &[]);
        b = b.rule_parts(&format!("A{m}"), o, t);
        let (o, t) = place(&[(s_next2.clone(), 2), (format!("X{m}"), 1)], &[("y", 1)]);
        b = b.rule_parts(&format!("A{m}"), o, t);
        let (o, t) = place(&[(a_next, 1), (s_next2, 1)], &[]);
        b = b.rule_parts(&format!("S{}", m + 1), o, t);
    }
    b = b.rule("X0", "x", "");
    for m in 0..n {
        b = b.rule(&format!("X{}", m + 1), "", &format!("X{m}^2"));
    }
    b.build().expect("well-formed construction")
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Vertices of the convex hull (no collinear points), counter-clockwise
/// from the lowest-then-leftmost point.
pub fn convex_hull_vertices(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort_by_key(|&(x, y)| (y, x));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    // Monotone chain over (y, x) order.
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
