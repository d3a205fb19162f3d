//! Window-restricted inclusion, equivalence, disjointness and universality.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cycles::{compute_bg, gamma_bound, CycleError};
use crate::grammar::Grammar;
use crate::linalg::hadamard_bound;
use crate::membership::{GeneralCaps, GeneralMember, GeneralOutcome, MemberError, RegularMember, RegularOutcome};
use crate::oracle::oracle_language;
use crate::vector::TermVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("alphabets differ: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
    #[error(transparent)]
    Member(#[from] MemberError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

pub const WINDOW_NOTE: &str = "the window constant of the comparison theorem carries an \
unspecified constant factor; sweeps use the window given by the caller";

/// Computable ingredients for choosing a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub bg1: BigInt,
    pub bg2: BigInt,
    /// `γ(N)` per grammar: simple cycles are smaller than this.
    pub gamma1: BigInt,
    pub gamma2: BigInt,
    /// `h(A, γ(N))` per grammar.
    pub h1: BigInt,
    pub h2: BigInt,
    pub note: &'static str,
}

fn same_alphabet(g1: &Grammar, g2: &Grammar) -> Result<(), WindowError> {
    if g1.alphabet() != g2.alphabet() {
        return Err(WindowError::AlphabetMismatch(g1.alphabet().to_vec(), g2.alphabet().to_vec()));
    }
    Ok(())
}

pub fn window_bound_report(g1: &Grammar, g2: &Grammar) -> Result<BoundReport, WindowError> {
    same_alphabet(g1, g2)?;
    let b1 = compute_bg(g1)?;
    let b2 = compute_bg(g2)?;
    let gamma1 = gamma_bound(b1.n as u64, b1.regular);
    let gamma2 = gamma_bound(b2.n as u64, b2.regular);
    Ok(BoundReport {
        h1: hadamard_bound(b1.a, &gamma1),
        h2: hadamard_bound(b2.a, &gamma2),
        bg1: b1.value,
        bg2: b2.value,
        gamma1,
        gamma2,
        note: WINDOW_NOTE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Run and path tables; `bound` defaults to `B_G`.
    RegularDp { bound: Option<u64> },
    General(GeneralCaps),
    /// Exhaustive derivation search with at most `depth` transitions.
    Oracle { depth: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    /// Not found below a bound that is smaller than `B_G`.
    NoWithinBound,
    Unknown,
}

impl Answer {
    fn yes(self) -> bool {
        self == Answer::Yes
    }

    fn no(self) -> bool {
        matches!(self, Answer::No | Answer::NoWithinBound)
    }
}

/// A grammar prepared for membership queries with one engine.
pub enum Decider {
    Regular(Box<RegularMember>),
    General(Box<GeneralMember>),
    Oracle(BTreeSet<TermVector>),
}

impl Decider {
    /// `window` is the largest `‖v‖∞` that will be queried; only the
    /// oracle uses it.
    pub fn new(g: &Grammar, engine: Engine, window: u64) -> Result<Self, WindowError> {
        Ok(match engine {
            Engine::RegularDp { bound } => Decider::Regular(Box::new(RegularMember::new(g, bound)?)),
            Engine::General(caps) => Decider::General(Box::new(GeneralMember::new(g, caps)?)),
            Engine::Oracle { depth } => Decider::Oracle(oracle_language(g, depth, window)),
        })
    }

    pub fn query(&self, v: &TermVector) -> Result<Answer, WindowError> {
        Ok(match self {
            Decider::Regular(m) => match m.query(v)? {
                RegularOutcome::Member(_) => Answer::Yes,
                RegularOutcome::NonMember => Answer::No,
                RegularOutcome::NotWithinBound => Answer::NoWithinBound,
            },
            Decider::General(m) => match m.query(v)? {
                GeneralOutcome::Member(_) => Answer::Yes,
                GeneralOutcome::NonMember => Answer::No,
                GeneralOutcome::Unknown => Answer::Unknown,
            },
            Decider::Oracle(set) => {
                if set.contains(v) {
                    Answer::Yes
                } else {
                    Answer::No
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Inclusion,
    Equivalence,
    Disjointness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The least vector (in sweep order) refuting the property.
    Fails(TermVector),
    /// No refutation found, but this vector (the first one) could not be
    /// settled.
    Unknown(TermVector),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        *self == Verdict::Holds
    }

    pub fn witness(&self) -> Option<&TermVector> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(v) | Verdict::Unknown(v) => Some(v),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "true",
            Verdict::Fails(_) => "false",
            Verdict::Unknown(_) => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowReport {
    pub verdict: Verdict,
    /// Every vector of `[lo..hi]^A` was examined.
    pub lo: i64,
    pub hi: i64,
    /// Set when some negative answer came from a bound below `B_G`.
    pub bounded: bool,
}

/// Visits `[lo..hi]^dim` in lexicographic order until `f` returns false.
pub fn sweep_box(dim: usize, lo: i64, hi: i64, mut f: impl FnMut(&TermVector) -> bool) {
    if lo > hi {
        return;
    }
    let mut v = TermVector::from_vec(vec![lo; dim]);
    loop {
        if !f(&v) {
            return;
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if v.get(k) < hi {
                v.set(k, v.get(k) + 1);
                break;
            }
            v.set(k, lo);
        }
    }
}

enum Check {
    Ok,
    Refuted,
    Unsettled,
}

fn run_sweep(
    dim: usize,
    lo: i64,
    hi: i64,
    mut check: impl FnMut(&TermVector) -> Result<(Check, bool), WindowError>,
) -> Result<WindowReport, WindowError> {
    let mut verdict = Verdict::Holds;
    let mut bounded = false;
    let mut error = None;
    sweep_box(dim, lo, hi, |v| match check(v) {
        Ok((c, b)) => {
            bounded |= b;
            match c {
                Check::Ok => true,
                Check::Refuted => {
                    verdict = Verdict::Fails(v.clone());
                    false
                }
                Check::Unsettled => {
                    if verdict == Verdict::Holds {
                        verdict = Verdict::Unknown(v.clone());
                    }
                    true
                }
            }
        }
        Err(e) => {
            error = Some(e);
            false
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(WindowReport {
            verdict,
            lo,
            hi,
            bounded,
        }),
    }
}

fn compare_answers(mode: Mode, a1: Answer, a2: Answer) -> Check {
    let unsettled = a1 == Answer::Unknown || a2 == Answer::Unknown;
    match mode {
        Mode::Inclusion => {
            if a1.yes() && a2.no() {
                Check::Refuted
            } else if a1.no() || a2.yes() {
                Check::Ok
            } else {
                Check::Unsettled
            }
        }
        Mode::Equivalence => {
            if (a1.yes() && a2.no()) || (a1.no() && a2.yes()) {
                Check::Refuted
            } else if unsettled {
                Check::Unsettled
            } else {
                Check::Ok
            }
        }
        Mode::Disjointness => {
            if a1.yes() && a2.yes() {
                Check::Refuted
            } else if a1.no() || a2.no() {
                Check::Ok
            } else {
                Check::Unsettled
            }
        }
    }
}

/// Compares two prepared grammars on every `v` with `‖v‖∞ ≤ window`.
pub fn compare_deciders(
    d1: &Decider,
    d2: &Decider,
    dim: usize,
    window: u64,
    mode: Mode,
) -> Result<WindowReport, WindowError> {
    let w = window as i64;
    run_sweep(dim, -w, w, |v| {
        let a1 = d1.query(v)?;
        let a2 = d2.query(v)?;
        let bounded = a1 == Answer::NoWithinBound || a2 == Answer::NoWithinBound;
        Ok((compare_answers(mode, a1, a2), bounded))
    })
}

/// Sweeps `[−B..B]^Σ` and decides the relation between `Ψ(g1)` and `Ψ(g2)`
/// restricted to that box, with the least refuting vector as witness.
pub fn compare_within_window(
    g1: &Grammar,
    g2: &Grammar,
    window: u64,
    mode: Mode,
    engine: Engine,
) -> Result<WindowReport, WindowError> {
    same_alphabet(g1, g2)?;
    let d1 = Decider::new(g1, engine, window)?;
    let d2 = Decider::new(g2, engine, window)?;
    compare_deciders(&d1, &d2, g1.alphabet_size(), window, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    Naturals,
    Integers,
}

/// Checks that every vector of `[0..B]^Σ` (naturals) or `[−B..B]^Σ`
/// (integers) is in `Ψ(g)`; the witness is the first missing one.
pub fn universality_within_window(
    g: &Grammar,
    window: u64,
    ambient: Ambient,
    engine: Engine,
) -> Result<WindowReport, WindowError> {
    let d = Decider::new(g, engine, window)?;
    universality_decider(&d, g.alphabet_size(), window, ambient)
}

pub fn universality_decider(
    d: &Decider,
    dim: usize,
    window: u64,
    ambient: Ambient,
) -> Result<WindowReport, WindowError> {
    let w = window as i64;
    let lo = match ambient {
        Ambient::Naturals => 0,
        Ambient::Integers => -w,
    };
    run_sweep(dim, lo, w, |v| {
        let a = d.query(v)?;
        let c = match a {
            Answer::Yes => Check::Ok,
            Answer::No | Answer::NoWithinBound => Check::Refuted,
            Answer::Unknown => Check::Unsettled,
        };
        Ok((c, a == Answer::NoWithinBound))
    })
}
