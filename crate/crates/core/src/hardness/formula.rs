//! CNF formulas over universal (`x`) and existential (`y`) variables.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub kind: VarKind,
    pub index: usize,
    pub positive: bool,
}

impl Literal {
    pub fn x(index: usize, positive: bool) -> Self {
        Literal {
            kind: VarKind::X,
            index,
            positive,
        }
    }

    pub fn y(index: usize, positive: bool) -> Self {
        Literal {
            kind: VarKind::Y,
            index,
            positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { "" } else { "-" };
        let kind = match self.kind {
            VarKind::X => 'x',
            VarKind::Y => 'y',
        };
        write!(f, "{sign}{kind}{}", self.index)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("clause {clause} has {width} literals; at most 3 are allowed")]
    ClauseTooWide { clause: usize, width: usize },
    #[error("literal {literal} is out of range")]
    OutOfRange { literal: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("formula has universal variables")]
    HasUniversals,
    #[error("{needed} distinct primes needed, {given} given")]
    NotEnoughPrimes { needed: usize, given: usize },
    #[error("primes must be distinct primes")]
    BadPrimes,
}

/// `∀x₀…x_{k−1} ∃y₀…y_{l−1} ⋀ⱼ Cⱼ`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_x: usize,
    pub num_y: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_x: usize, num_y: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        let f = CnfFormula {
            num_x,
            num_y,
            clauses,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        for (j, c) in self.clauses.iter().enumerate() {
            if c.len() > 3 {
                return Err(FormulaError::ClauseTooWide {
                    clause: j,
                    width: c.len(),
                });
            }
            for l in c {
                let limit = match l.kind {
                    VarKind::X => self.num_x,
                    VarKind::Y => self.num_y,
                };
                if l.index >= limit {
                    return Err(FormulaError::OutOfRange {
                        literal: l.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_x + self.num_y
    }

    /// Position of a variable when `x`s and `y`s are numbered together,
    /// `x`s first.
    pub fn var_position(&self, l: &Literal) -> usize {
        match l.kind {
            VarKind::X => l.index,
            VarKind::Y => self.num_x + l.index,
        }
    }

    /// Truth of the matrix under an assignment indexed by [`Self::var_position`].
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| assignment[self.var_position(l)] == l.positive)
        })
    }
}

/// Evaluates the quantified formula by trying every assignment.
pub fn qbf_holds(f: &CnfFormula) -> bool {
    let (k, l) = (f.num_x, f.num_y);
    let mut assignment = vec![false; k + l];
    (0u64..1 << k).all(|xs| {
        for i in 0..k {
            assignment[i] = xs >> i & 1 == 1;
        }
        (0u64..1 << l).any(|ys| {
            for i in 0..l {
                assignment[k + i] = ys >> i & 1 == 1;
            }
            f.eval(&assignment)
        })
    })
}

/// Satisfiability with every variable read existentially.
pub fn sat_satisfiable(f: &CnfFormula) -> bool {
    let n = f.num_vars();
    let mut assignment = vec![false; n];
    (0u64..1 << n).any(|bits| {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = bits >> i & 1 == 1;
        }
        f.eval(&assignment)
    })
}

fn parse_literal(tok: &str, line: usize) -> Result<Literal, FormulaError> {
    let (positive, body) = match tok.strip_prefix('-') {
        Some(rest) => (false, rest),
        None => (true, tok),
    };
    let bad = || FormulaError::Syntax {
        line,
        message: format!("bad literal `{tok}`"),
    };
    let mut chars = body.chars();
    let kind = match chars.next() {
        Some('x') => VarKind::X,
        Some('y') => VarKind::Y,
        _ => return Err(bad()),
    };
    let index: usize = chars.as_str().parse().map_err(|_| bad())?;
    Ok(Literal {
        kind,
        index,
        positive,
    })
}

/// Reads a formula: `c` or `#` comment lines, an optional header
/// `p qbf <k> <l>`, then one clause per line as literals `x3`, `-y0`, ...,
/// optionally ending in `0`. Without a header the variable counts are the
/// largest indices used plus one.
pub fn parse_formula(text: &str) -> Result<CnfFormula, FormulaError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() || s == "c" || s.starts_with("c ") {
            continue;
        }
        if let Some(rest) = s.strip_prefix("p ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let nums = match parts.as_slice() {
                ["qbf" | "cnf", k, l] => k.parse().ok().zip(l.parse().ok()),
                _ => None,
            };
            header = Some(nums.ok_or_else(|| FormulaError::Syntax {
                line,
                message: "expected `p qbf <k> <l>`".into(),
            })?);
            continue;
        }
        let mut clause = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "0" {
                break;
            }
            clause.push(parse_literal(tok, line)?);
        }
        clauses.push(clause);
    }
    let (num_x, num_y) = header.unwrap_or_else(|| {
        let top = |kind| {
            clauses
                .iter()
                .flatten()
                .filter(|l: &&Literal| l.kind == kind)
                .map(|l| l.index + 1)
                .max()
                .unwrap_or(0)
        };
        (top(VarKind::X), top(VarKind::Y))
    });
    CnfFormula::new(num_x, num_y, clauses)
}

pub fn format_formula(f: &CnfFormula) -> String {
    let mut out = format!("p qbf {} {}\n", f.num_x, f.num_y);
    for c in &f.clauses {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
