//! Commutative grammars: the data model, classification, normal form and
//! the negation/difference constructions.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::vector::{NtId, NtMultiset, TermVector, TransId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: undeclared terminal `{name}`")]
    UndeclaredTerminal { line: usize, name: String },
    #[error("line {line}: undeclared nonterminal `{name}`")]
    UndeclaredNonterminal { line: usize, name: String },
    #[error("`{name}` is used both as a terminal and as a nonterminal")]
    NameClash { name: String },
    #[error("missing `start:` declaration")]
    MissingStart,
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("transition {0} refers to a symbol outside the grammar")]
    DanglingTransition(TransId),
    #[error("operation requires a regular grammar")]
    NotRegular,
    #[error("operation requires a grammar in normal form")]
    NotNormalForm,
    #[error("alphabets differ: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
}

/// One rule `source -> output : targets`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub id: TransId,
    pub source: NtId,
    pub output: TermVector,
    pub targets: NtMultiset,
}

impl Transition {
    pub fn is_final(&self) -> bool {
        self.targets.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub regular: bool,
    pub normal_form: bool,
    pub positive: bool,
}

/// A commutative grammar. Transition ids always equal their position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    alphabet: Vec<String>,
    nonterminals: Vec<String>,
    start: NtId,
    transitions: Vec<Transition>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Smallest `base__k` (k ≥ 1) not in `used`; the result is added to `used`.
pub(crate) fn fresh_name(base: &str, used: &mut HashSet<String>) -> String {
    let mut k = 1usize;
    loop {
        let candidate = format!("{base}__{k}");
        if !used.contains(&candidate) {
            used.insert(candidate.clone());
            return candidate;
        }
        k += 1;
    }
}

impl Grammar {
    /// Validates and assembles a grammar. Transition ids are reassigned to
    /// their list positions.
    pub fn new(
        alphabet: Vec<String>,
        nonterminals: Vec<String>,
        start: NtId,
        transitions: Vec<Transition>,
    ) -> Result<Self, GrammarError> {
        let mut seen = HashSet::new();
        for name in alphabet.iter().chain(&nonterminals) {
            if !is_identifier(name) {
                return Err(GrammarError::InvalidName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                let clash = alphabet.contains(name) && nonterminals.contains(name);
                return Err(if clash {
                    GrammarError::NameClash { name: name.clone() }
                } else {
                    GrammarError::Duplicate(name.clone())
                });
            }
        }
        if start.0 >= nonterminals.len() {
            return Err(GrammarError::MissingStart);
        }
        let transitions: Vec<Transition> = transitions
            .into_iter()
            .enumerate()
            .map(|(i, t)| Transition {
                id: TransId(i),
                ..t
            })
            .collect();
        for t in &transitions {
            let dangling = t.source.0 >= nonterminals.len()
                || t.output.dim() != alphabet.len()
                || t.targets.iter().any(|(q, _)| q.0 >= nonterminals.len());
            if dangling {
                return Err(GrammarError::DanglingTransition(t.id));
            }
        }
        Ok(Grammar {
            alphabet,
            nonterminals,
            start,
            transitions,
        })
    }

    pub fn builder<S: AsRef<str>>(alphabet: impl IntoIterator<Item = S>) -> GrammarBuilder {
        GrammarBuilder::new(alphabet)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// `A = |Σ|`
    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    /// `N = |Q|`
    pub fn num_nonterminals(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransId) -> &Transition {
        &self.transitions[id.0]
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn nt_name(&self, q: NtId) -> &str {
        &self.nonterminals[q.0]
    }

    pub fn nt_id(&self, name: &str) -> Option<NtId> {
        self.nonterminals.iter().position(|n| n == name).map(NtId)
    }

    pub fn terminal_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|n| n == name)
    }

    pub fn transitions_from(&self, q: NtId) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions.iter().filter(move |t| t.source == q)
    }

    /// Same grammar with a different initial nonterminal.
    pub fn with_start(&self, start: NtId) -> Self {
        assert!(start.0 < self.nonterminals.len());
        Grammar {
            start,
            ..self.clone()
        }
    }

    pub fn classify(&self) -> Classification {
        let mut c = Classification {
            regular: true,
            normal_form: true,
            positive: true,
        };
        for t in &self.transitions {
            let letters = t.output.norm1();
            let width = t.targets.size();
            c.normal_form &= letters <= 1 && width <= 2;
            c.regular &= letters <= 1 && width <= 1;
            c.positive &= t.output.is_nonneg();
        }
        c
    }

    pub fn is_regular(&self) -> bool {
        self.classify().regular
    }

    pub fn is_normal_form(&self) -> bool {
        self.classify().normal_form
    }

    pub fn is_positive(&self) -> bool {
        self.classify().positive
    }

    /// Rewrites every rule emitting more than one letter or producing more
    /// than two nonterminals into a chain through fresh nonterminals. The
    /// first link keeps the original id; extra links get ids after the
    /// originals. Rules already in normal form are untouched.
    pub fn normalize(&self) -> Grammar {
        let dim = self.alphabet.len();
        let mut used: HashSet<String> = self
            .alphabet
            .iter()
            .chain(&self.nonterminals)
            .cloned()
            .collect();
        let mut nonterminals = self.nonterminals.clone();
        let mut heads: Vec<Transition> = Vec::with_capacity(self.transitions.len());
        let mut tail: Vec<Transition> = Vec::new();

        for t in &self.transitions {
            if t.output.norm1() <= 1 && t.targets.size() <= 2 {
                heads.push(t.clone());
                continue;
            }
            let mut letters: Vec<TermVector> = Vec::new();
            for (x, &k) in t.output.entries().iter().enumerate() {
                let unit = TermVector::unit(dim, x).scaled(k.signum());
                letters.extend(std::iter::repeat(unit).take(k.unsigned_abs() as usize));
            }
            letters.reverse();
            let mut targets = t.targets.expanded();
            targets.reverse();

            let source_name = self.nonterminals[t.source.0].clone();
            let mut source = t.source;
            let mut first = true;
            while letters.len() > 1 || targets.len() > 2 {
                let output = letters.pop().unwrap_or_else(|| TermVector::zero(dim));
                let fresh = NtId(nonterminals.len());
                nonterminals.push(fresh_name(&source_name, &mut used));
                let mut link_targets = NtMultiset::new();
                if let Some(q) = targets.pop() {
                    link_targets.insert(q, 1);
                }
                link_targets.insert(fresh, 1);
                let link = Transition {
                    id: TransId(0),
                    source,
                    output,
                    targets: link_targets,
                };
                if first {
                    heads.push(link);
                    first = false;
                } else {
                    tail.push(link);
                }
                source = fresh;
            }
            let last = Transition {
                id: TransId(0),
                source,
                output: letters.pop().unwrap_or_else(|| TermVector::zero(dim)),
                targets: targets.into_iter().collect(),
            };
            tail.push(last);
        }
        heads.extend(tail);
        Grammar::new(self.alphabet.clone(), nonterminals, self.start, heads)
            .expect("normalization preserves well-formedness")
    }

    /// Every transition output negated.
    pub fn negate(&self) -> Grammar {
        let mut g = self.clone();
        for t in &mut g.transitions {
            t.output = -&t.output;
        }
        g
    }

    /// The same grammar over a larger (or reordered) alphabet. Every current
    /// terminal must appear in `alphabet`.
    pub fn with_alphabet(&self, alphabet: &[String]) -> Result<Grammar, GrammarError> {
        let map: Vec<Option<usize>> = alphabet
            .iter()
            .map(|name| self.terminal_index(name))
            .collect();
        let covered = self.alphabet.iter().all(|a| alphabet.contains(a));
        if !covered {
            return Err(GrammarError::AlphabetMismatch(
                self.alphabet.clone(),
                alphabet.to_vec(),
            ));
        }
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                output: t.output.remap(&map),
                ..t.clone()
            })
            .collect();
        Grammar::new(
            alphabet.to_vec(),
            self.nonterminals.clone(),
            self.start,
            transitions,
        )
    }

    /// Reorders `other` onto this grammar's alphabet, requiring equal sets.
    pub fn align_alphabet(&self, other: &Grammar) -> Result<Grammar, GrammarError> {
        let same = self.alphabet.len() == other.alphabet.len()
            && other.alphabet.iter().all(|a| self.alphabet.contains(a));
        if !same {
            return Err(GrammarError::AlphabetMismatch(
                self.alphabet.clone(),
                other.alphabet.clone(),
            ));
        }
        other.with_alphabet(&self.alphabet)
    }
}

/// `Ψ(g1) − Ψ(g2)`: negate `g2`, then redirect every final transition of
/// `g1` into the initial nonterminal of the negated copy. Both grammars must
/// be regular.
pub fn difference_grammar(g1: &Grammar, g2: &Grammar) -> Result<Grammar, GrammarError> {
    if !g1.is_regular() || !g2.is_regular() {
        return Err(GrammarError::NotRegular);
    }
    let mut alphabet = g1.alphabet.clone();
    for a in &g2.alphabet {
        if !alphabet.contains(a) {
            alphabet.push(a.clone());
        }
    }
    let g1 = g1.with_alphabet(&alphabet)?;
    let g2 = g2.negate().with_alphabet(&alphabet)?;

    let mut used: HashSet<String> = alphabet.iter().cloned().collect();
    let mut nonterminals = Vec::new();
    for name in g1.nonterminals.iter().chain(&g2.nonterminals) {
        let name = if used.contains(name) {
            fresh_name(name, &mut used)
        } else {
            used.insert(name.clone());
            name.clone()
        };
        nonterminals.push(name);
    }
    let offset = g1.nonterminals.len();
    let start2 = NtId(g2.start.0 + offset);

    let mut transitions: Vec<Transition> = g1
        .transitions
        .iter()
        .map(|t| {
            let mut t = t.clone();
            if t.is_final() {
                t.targets = NtMultiset::singleton(start2);
            }
            t
        })
        .collect();
    transitions.extend(g2.transitions.iter().map(|t| Transition {
        id: t.id,
        source: NtId(t.source.0 + offset),
        output: t.output.clone(),
        targets: t.targets.map_ids(|q| NtId(q.0 + offset)),
    }));
    Grammar::new(alphabet, nonterminals, g1.start, transitions)
}

/// Programmatic grammar construction by symbol names. Nonterminals are
/// declared on first use (start first).
#[derive(Clone, Debug)]
pub struct GrammarBuilder {
    alphabet: Vec<String>,
    nonterminals: Vec<String>,
    index: HashMap<String, NtId>,
    start: Option<String>,
    rules: Vec<(String, Vec<(String, i64)>, Vec<(String, u64)>)>,
}

impl GrammarBuilder {
    pub fn new<S: AsRef<str>>(alphabet: impl IntoIterator<Item = S>) -> Self {
        GrammarBuilder {
            alphabet: alphabet.into_iter().map(|s| s.as_ref().to_string()).collect(),
            nonterminals: Vec::new(),
            index: HashMap::new(),
            start: None,
            rules: Vec::new(),
        }
    }

    fn declare(&mut self, name: &str) {
        if !self.index.contains_key(name) {
            self.index
                .insert(name.to_string(), NtId(self.nonterminals.len()));
            self.nonterminals.push(name.to_string());
        }
    }

    pub fn start(mut self, name: &str) -> Self {
        self.declare(name);
        self.start = Some(name.to_string());
        self
    }

    /// Declares a nonterminal without giving it rules.
    pub fn nonterminal(mut self, name: &str) -> Self {
        self.declare(name);
        self
    }

    /// Adds `source -> output : targets` where `output` pairs terminal
    /// names with exponents and `targets` pairs nonterminals with counts.
    pub fn rule_parts<S: AsRef<str>, T: AsRef<str>>(
        mut self,
        source: &str,
        output: impl IntoIterator<Item = (S, i64)>,
        targets: impl IntoIterator<Item = (T, u64)>,
    ) -> Self {
        self.declare(source);
        let targets: Vec<(String, u64)> = targets
            .into_iter()
            .map(|(n, k)| (n.as_ref().to_string(), k))
            .collect();
        for (n, _) in &targets {
            self.declare(n);
        }
        let output = output
            .into_iter()
            .map(|(n, k)| (n.as_ref().to_string(), k))
            .collect();
        self.rules.push((source.to_string(), output, targets));
        self
    }

    /// Adds a rule written in the file syntax, e.g. `rule("S", "a^2 b", "S T")`.
    /// Panics on malformed text; intended for literals.
    pub fn rule(self, source: &str, output: &str, targets: &str) -> Self {
        let output = crate::text::split_powers(output)
            .unwrap_or_else(|e| panic!("bad monomial `{output}`: {e}"));
        let targets = crate::text::split_powers(targets)
            .unwrap_or_else(|e| panic!("bad targets `{targets}`: {e}"));
        let targets: Vec<(String, u64)> = targets
            .into_iter()
            .map(|(n, k)| {
                assert!(k >= 1, "target multiplicity must be positive");
                (n, k as u64)
            })
            .collect();
        self.rule_parts(source, output, targets)
    }

    pub fn build(self) -> Result<Grammar, GrammarError> {
        let start_name = self.start.ok_or(GrammarError::MissingStart)?;
        let dim = self.alphabet.len();
        let mut transitions = Vec::with_capacity(self.rules.len());
        for (source, output, targets) in &self.rules {
            let mut vector = TermVector::zero(dim);
            for (name, k) in output {
                let x = self
                    .alphabet
                    .iter()
                    .position(|a| a == name)
                    .ok_or_else(|| GrammarError::UndeclaredTerminal {
                        line: 0,
                        name: name.clone(),
                    })?;
                vector.set(x, vector.get(x) + k);
            }
            let targets =
                NtMultiset::from_pairs(targets.iter().map(|(n, k)| (self.index[n], *k)));
            transitions.push(Transition {
                id: TransId(0),
                source: self.index[source],
                output: vector,
                targets,
            });
        }
        Grammar::new(
            self.alphabet,
            self.nonterminals,
            self.index[&start_name],
            transitions,
        )
    }
}
