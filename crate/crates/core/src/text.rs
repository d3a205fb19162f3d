//! The line-oriented grammar file format and the monomial syntax shared with
//! the command line.
//!
//! ```text
//! alphabet: a b
//! nonterminals: S T
//! start: S
//! S -> a^2 b^-1 : S T
//! T -> :
//! ```
//!
//! `nonterminals:` is optional on input; without it nonterminals are ordered
//! by first appearance (start first). Lines beginning with `VERDICT` are
//! ignored so that command output can be fed back in.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::grammar::{is_identifier, Grammar, GrammarError, Transition};
use crate::vector::{NtId, NtMultiset, TermVector, TransId};

struct Token {
    name: String,
    exponent: i64,
    column: usize,
}

/// Splits `a b^2 c^-1` into tokens; columns are 1-based offsets into the
/// line, starting from `offset`.
fn tokenize(text: &str, offset: usize, line: usize) -> Result<Vec<Token>, GrammarError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    for piece in text.split_whitespace() {
        let start = pos + text[pos..].find(piece).expect("piece comes from text");
        pos = start + piece.len();
        let column = offset + start + 1;
        let syntax = |message: String| GrammarError::Syntax {
            line,
            column,
            message,
        };
        let (name, exponent) = match piece.split_once('^') {
            Some((name, exp)) => {
                let k = exp
                    .parse::<i64>()
                    .map_err(|_| syntax(format!("bad exponent `{exp}`")))?;
                (name, k)
            }
            None => (piece, 1),
        };
        if !is_identifier(name) {
            return Err(syntax(format!("bad symbol `{name}`")));
        }
        tokens.push(Token {
            name: name.to_string(),
            exponent,
            column,
        });
    }
    Ok(tokens)
}

/// `a^2 b` as name/exponent pairs, without reference to an alphabet.
pub fn split_powers(text: &str) -> Result<Vec<(String, i64)>, GrammarError> {
    Ok(tokenize(text, 0, 0)?
        .into_iter()
        .map(|t| (t.name, t.exponent))
        .collect())
}

fn monomial(
    tokens: &[Token],
    alphabet: &[String],
    line: usize,
) -> Result<TermVector, GrammarError> {
    let mut v = TermVector::zero(alphabet.len());
    for t in tokens {
        let x = alphabet.iter().position(|a| *a == t.name).ok_or_else(|| {
            GrammarError::UndeclaredTerminal {
                line,
                name: t.name.clone(),
            }
        })?;
        v.set(x, v.get(x) + t.exponent);
    }
    Ok(v)
}

/// Parses a monomial such as `a^3 b^-2`. `0` and the empty string denote
/// the zero vector.
pub fn parse_vector(text: &str, alphabet: &[String]) -> Result<TermVector, GrammarError> {
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(TermVector::zero(alphabet.len()));
    }
    monomial(&tokenize(text, 0, 0)?, alphabet, 0)
}

fn write_powers<'a>(out: &mut String, terms: impl Iterator<Item = (&'a str, i64)>) {
    let mut first = true;
    for (name, k) in terms {
        if k == 0 {
            continue;
        }
        if !first {
            out.push(' ');
        }
        first = false;
        out.push_str(name);
        if k != 1 {
            let _ = write!(out, "^{k}");
        }
    }
}

fn monomial_text(v: &TermVector, alphabet: &[String]) -> String {
    let mut out = String::new();
    write_powers(
        &mut out,
        alphabet.iter().map(String::as_str).zip(v.entries().iter().copied()),
    );
    out
}

/// The monomial form of `v`; the zero vector prints as `0`.
pub fn format_vector(v: &TermVector, alphabet: &[String]) -> String {
    if v.is_zero() {
        "0".to_string()
    } else {
        monomial_text(v, alphabet)
    }
}

/// `S T^2`; the empty multiset prints as `0`.
pub fn format_nt_multiset(m: &NtMultiset, g: &Grammar) -> String {
    if m.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    write_powers(&mut out, m.iter().map(|(q, k)| (g.nt_name(q), k as i64)));
    out
}

/// Parses `S T^2` against the nonterminals of `g`; `0` or empty is the
/// empty multiset.
pub fn parse_nt_multiset(text: &str, g: &Grammar) -> Result<NtMultiset, GrammarError> {
    if text.trim() == "0" {
        return Ok(NtMultiset::new());
    }
    let mut m = NtMultiset::new();
    for t in tokenize(text, 0, 0)? {
        let q = g
            .nt_id(&t.name)
            .ok_or_else(|| GrammarError::UndeclaredNonterminal {
                line: 0,
                name: t.name.clone(),
            })?;
        if t.exponent < 1 {
            return Err(GrammarError::Syntax {
                line: 0,
                column: t.column,
                message: "multiplicity must be positive".into(),
            });
        }
        m.insert(q, t.exponent as u64);
    }
    Ok(m)
}

/// Parses `t1*3 t2` (1-based transition ids) into dense counts.
pub fn parse_transition_counts(text: &str, g: &Grammar) -> Result<Vec<u64>, GrammarError> {
    let mut counts = vec![0u64; g.num_transitions()];
    for (i, piece) in text.split_whitespace().enumerate() {
        let bad = |message: String| GrammarError::Syntax {
            line: 0,
            column: i + 1,
            message,
        };
        let (id, k) = match piece.split_once('*') {
            Some((id, k)) => (
                id,
                k.parse::<u64>()
                    .map_err(|_| bad(format!("bad count in `{piece}`")))?,
            ),
            None => (piece, 1),
        };
        let index = id
            .strip_prefix('t')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 1 && n <= counts.len())
            .ok_or_else(|| bad(format!("unknown transition `{id}`")))?;
        counts[index - 1] += k;
    }
    Ok(counts)
}

/// `t1*3 t2*1`, listing nonzero counts only; empty prints as `0`.
pub fn format_transition_counts(counts: &[u64]) -> String {
    let parts: Vec<String> = counts
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, k)| format!("{}*{k}", TransId(i)))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" ")
    }
}

enum Header {
    Alphabet,
    Nonterminals,
    Start,
}

fn header(line: &str) -> Option<(Header, &str)> {
    if line.contains("->") {
        return None;
    }
    let (key, rest) = line.split_once(':')?;
    let kind = match key.trim() {
        "alphabet" => Header::Alphabet,
        "nonterminals" => Header::Nonterminals,
        "start" => Header::Start,
        _ => return None,
    };
    Some((kind, rest))
}

struct RawRule {
    line: usize,
    source: String,
    source_column: usize,
    output: Vec<Token>,
    targets: Vec<Token>,
}

pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut declared: Option<Vec<String>> = None;
    let mut start: Option<String> = None;
    let mut rules = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() || trimmed.starts_with("VERDICT") {
            continue;
        }
        let syntax = |column: usize, message: &str| GrammarError::Syntax {
            line: line_no,
            column,
            message: message.to_string(),
        };
        if let Some((kind, rest)) = header(content) {
            let offset = content.len() - rest.len();
            let names: Vec<String> = tokenize(rest, offset, line_no)?
                .into_iter()
                .map(|t| {
                    if t.exponent != 1 || rest.contains('^') {
                        Err(syntax(t.column, "exponent not allowed in a declaration"))
                    } else {
                        Ok(t.name)
                    }
                })
                .collect::<Result<_, _>>()?;
            let slot_taken = match kind {
                Header::Alphabet => alphabet.replace(names).is_some(),
                Header::Nonterminals => declared.replace(names).is_some(),
                Header::Start => {
                    if names.len() != 1 {
                        return Err(syntax(offset + 1, "expected one start symbol"));
                    }
                    start.replace(names[0].clone()).is_some()
                }
            };
            if slot_taken {
                return Err(syntax(1, "repeated declaration"));
            }
            continue;
        }
        let arrow = content
            .find("->")
            .ok_or_else(|| syntax(1, "expected `SRC -> MONOMIAL : TARGETS`"))?;
        let source = content[..arrow].trim();
        let source_column = content.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        if !is_identifier(source) {
            return Err(syntax(source_column, "bad source nonterminal"));
        }
        let after = arrow + 2;
        let colon = content[after..]
            .find(':')
            .map(|c| c + after)
            .ok_or_else(|| syntax(after + 1, "missing `:` before targets"))?;
        let output = tokenize(&content[after..colon], after, line_no)?;
        let targets = tokenize(&content[colon + 1..], colon + 1, line_no)?;
        if let Some(t) = targets.iter().find(|t| t.exponent < 1) {
            return Err(syntax(t.column, "target multiplicity must be positive"));
        }
        rules.push(RawRule {
            line: line_no,
            source: source.to_string(),
            source_column,
            output,
            targets,
        });
    }

    let alphabet = alphabet.unwrap_or_default();
    let start = start.ok_or(GrammarError::MissingStart)?;
    let terminals: HashSet<&str> = alphabet.iter().map(String::as_str).collect();

    let explicit = declared.is_some();
    let mut nonterminals = declared.unwrap_or_default();
    let mut index: HashMap<String, NtId> = HashMap::new();
    for (i, name) in nonterminals.iter().enumerate() {
        if index.insert(name.clone(), NtId(i)).is_some() {
            return Err(GrammarError::Duplicate(name.clone()));
        }
    }
    let mut lookup = |name: &str, line: usize| -> Result<NtId, GrammarError> {
        if terminals.contains(name) {
            return Err(GrammarError::NameClash {
                name: name.to_string(),
            });
        }
        if let Some(&q) = index.get(name) {
            return Ok(q);
        }
        if explicit {
            return Err(GrammarError::UndeclaredNonterminal {
                line,
                name: name.to_string(),
            });
        }
        let q = NtId(nonterminals.len());
        nonterminals.push(name.to_string());
        index.insert(name.to_string(), q);
        Ok(q)
    };

    let start_id = lookup(&start, 0)?;
    let mut transitions = Vec::with_capacity(rules.len());
    for r in &rules {
        let source = lookup(&r.source, r.line).map_err(|e| match e {
            GrammarError::NameClash { .. } => GrammarError::Syntax {
                line: r.line,
                column: r.source_column,
                message: format!("`{}` is a terminal", r.source),
            },
            other => other,
        })?;
        let output = monomial(&r.output, &alphabet, r.line)?;
        let mut targets = NtMultiset::new();
        for t in &r.targets {
            targets.insert(lookup(&t.name, r.line)?, t.exponent as u64);
        }
        transitions.push(Transition {
            id: TransId(transitions.len()),
            source,
            output,
            targets,
        });
    }
    Grammar::new(alphabet, nonterminals, start_id, transitions)
}

/// Canonical text: header lines, then one line per transition in id order.
pub fn serialize_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alphabet:{}", list(g.alphabet()));
    let _ = writeln!(out, "nonterminals:{}", list(g.nonterminals()));
    let _ = writeln!(out, "start: {}", g.nt_name(g.start()));
    for t in g.transitions() {
        out.push_str(&transition_line(g, t));
        out.push('\n');
    }
    out
}

fn list(names: &[String]) -> String {
    names.iter().map(|n| format!(" {n}")).collect()
}

/// `S -> a : S T`
pub fn transition_line(g: &Grammar, t: &Transition) -> String {
    let mut line = format!("{} ->", g.nt_name(t.source));
    let out = monomial_text(&t.output, g.alphabet());
    if !out.is_empty() {
        line.push(' ');
        line.push_str(&out);
    }
    line.push_str(" :");
    if !t.targets.is_empty() {
        line.push(' ');
        line.push_str(&format_nt_multiset(&t.targets, g));
    }
    line
}
