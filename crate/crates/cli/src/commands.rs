//! One function per subcommand. Each returns the text to print before the
//! verdict line.

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::Path;

use commgram::bundles::{dim2_bundles, regular_bundles, BundleSet};
use commgram::cycles::{compute_bg, enumerate_simple_cycles, simple_cycle_limit, CycleError};
use commgram::decompose::{decompose_run, DecomposeError};
use commgram::hardness::{
    encode_3sat_unary_universality, encode_hamiltonian_membership, encode_qsat2_inclusion,
    encode_qsat2_universality, gen_hard_grammar, parse_formula, parse_graph, CnfFormula, HardVariant,
};
use commgram::membership::{
    GeneralCaps, GeneralMember, GeneralOutcome, MemberWitness, RegularMember, RegularOutcome,
};
use commgram::runs::{order_subrun, parikh, RunError};
use commgram::text::{
    format_nt_multiset, format_transition_counts, format_vector, parse_nt_multiset, parse_transition_counts,
    parse_vector,
};
use commgram::window::{
    compare_deciders, universality_decider, window_bound_report, Ambient, Decider, Engine, Mode, Verdict,
    WindowReport,
};
use commgram::{oracle_language, parse_grammar, serialize_grammar, Grammar, NtId, NtMultiset, SubrunCert, TransitionMultiset};
use thiserror::Error;

use crate::args::{AmbientArg, Command, EngineArg, EngineArgs, GenCommand, ModeArg, SideArg, VariantArg};

/// Caps for the general procedure when none are given.
const DEFAULT_CAPS: GeneralCaps = GeneralCaps {
    run_cap: 10,
    cycle_cap: 8,
};

/// Largest `(2B + 1)^A` allowed when the regular bound is left at its
/// default; `B_G` itself is far beyond desk scale for most grammars.
const TABLE_BUDGET: u64 = 200_000;

/// `B_G`, or the largest bound whose table fits the budget when smaller.
fn default_bound(g: &Grammar) -> Result<u64, CliError> {
    let bg = compute_bg(g).map_err(input)?.saturated();
    let a = g.alphabet_size() as u32;
    let mut b = 0u64;
    while b < bg && (2 * (b + 1) + 1).checked_pow(a).is_some_and(|size| size <= TABLE_BUDGET) {
        b += 1;
    }
    Ok(if a == 0 { bg } else { b })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

fn input(e: impl Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn word(self) -> &'static str {
        match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Truth::True => 0,
            Truth::False => 1,
            Truth::Unknown => 2,
        }
    }
}

pub struct Outcome {
    pub body: String,
    pub truth: Truth,
    pub witness: Option<String>,
}

impl Outcome {
    fn new(body: String, truth: Truth) -> Self {
        Outcome {
            body,
            truth,
            witness: None,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Grammar, CliError> {
    parse_grammar(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_formula(path: &Path) -> Result<CnfFormula, CliError> {
    parse_formula(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn require_normal_form(g: &Grammar) -> Result<(), CliError> {
    if g.is_normal_form() {
        Ok(())
    } else {
        Err(CliError::Input(
            "grammar is not in normal form; transition ids would change, run `normalize` first".into(),
        ))
    }
}

fn nonterminal(g: &Grammar, name: &str) -> Result<NtId, CliError> {
    g.nt_id(name).ok_or_else(|| CliError::Input(format!("unknown nonterminal `{name}`")))
}

fn multiset(g: &Grammar, text: &str) -> Result<TransitionMultiset, CliError> {
    Ok(TransitionMultiset::from_counts(parse_transition_counts(text, g).map_err(input)?))
}

/// Either prints the grammar or writes it to `output`.
fn emit_grammar(g: &Grammar, output: Option<&Path>, extra: &str) -> Result<Outcome, CliError> {
    let text = format!("{}{extra}", serialize_grammar(g));
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(Outcome::new(String::new(), Truth::True))
        }
        None => Ok(Outcome::new(text, Truth::True)),
    }
}

pub fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Parse { grammar } => Ok(Outcome::new(serialize_grammar(&load(&grammar)?), Truth::True)),
        Command::Normalize { grammar, output } => emit_grammar(&load(&grammar)?.normalize(), output.as_deref(), ""),
        Command::Classify { grammar } => classify(&load(&grammar)?),
        Command::Member {
            grammar,
            vector,
            bound,
            caps,
            oracle,
        } => member(&load(&grammar)?, &vector, bound, caps, oracle),
        Command::Oracle { grammar, depth, window } => oracle(&load(&grammar)?, depth, window),
        Command::Order {
            grammar,
            multiset,
            from,
            to,
        } => order(&load(&grammar)?, &multiset, from.as_deref(), to.as_deref()),
        Command::Decompose { grammar, multiset, from } => decompose(&load(&grammar)?, &multiset, from.as_deref()),
        Command::Cycles { grammar, nonterminal, cap } => cycles(&load(&grammar)?, &nonterminal, cap),
        Command::Bundles {
            grammar,
            run_cap,
            cycle_cap,
        } => bundles(&load(&grammar)?, run_cap, cycle_cap),
        Command::Compare {
            g1,
            g2,
            mode,
            window,
            engine,
        } => compare(&load(&g1)?, &load(&g2)?, mode, window, &engine),
        Command::Universal {
            grammar,
            window,
            ambient,
            engine,
        } => universal(&load(&grammar)?, window, ambient, &engine),
        Command::Gen { family, output } => generate(family, output.as_deref()),
        Command::BoundReport { g1, g2 } => {
            let g1 = load(&g1)?;
            let g2 = match g2 {
                Some(p) => load(&p)?,
                None => g1.clone(),
            };
            bound_report(&g1, &g2)
        }
    }
}

fn classify(g: &Grammar) -> Result<Outcome, CliError> {
    let c = g.classify();
    let mut body = String::new();
    let _ = writeln!(body, "regular: {}", c.regular);
    let _ = writeln!(body, "normal-form: {}", c.normal_form);
    let _ = writeln!(body, "positive: {}", c.positive);
    let _ = writeln!(body, "nonterminals: {}", g.num_nonterminals());
    let _ = writeln!(body, "letters: {}", g.alphabet_size());
    let _ = writeln!(body, "transitions: {}", g.num_transitions());
    Ok(Outcome::new(body, Truth::True))
}

fn write_witness(body: &mut String, g: &Grammar, w: &MemberWitness) {
    let _ = writeln!(body, "base: {}", format_vector(&w.base, g.alphabet()));
    let _ = writeln!(body, "base-run: {}", format_transition_counts(w.base_run.counts()));
    for c in w.cycles.iter().filter(|c| c.coefficient > 0) {
        let _ = writeln!(
            body,
            "cycle: {} x{} {} : {}",
            g.nt_name(c.anchor),
            c.coefficient,
            format_transition_counts(c.cycle.counts()),
            format_vector(&c.image, g.alphabet())
        );
    }
    let _ = writeln!(body, "run: {}", format_transition_counts(w.expand().counts()));
}

fn normalized_note(g: &Grammar, body: &mut String) -> Grammar {
    if g.is_normal_form() {
        g.clone()
    } else {
        body.push_str("note: grammar normalized; transition ids refer to the normal form\n");
        g.normalize()
    }
}

fn member(
    g: &Grammar,
    vector: &str,
    bound: Option<u64>,
    caps: Option<(u64, u64)>,
    oracle: Option<(u64, u64)>,
) -> Result<Outcome, CliError> {
    let v = parse_vector(vector, g.alphabet()).map_err(input)?;
    let mut body = String::new();
    if let Some((depth, window)) = oracle {
        if v.norm_inf() > window {
            return Err(CliError::Usage(format!("vector lies outside the oracle window {window}")));
        }
        let _ = writeln!(body, "engine: oracle (depth {depth}, window {window})");
        let found = oracle_language(g, depth as usize, window).contains(&v);
        return Ok(Outcome::new(body, if found { Truth::True } else { Truth::False }));
    }
    let g = normalized_note(g, &mut body);
    if caps.is_none() && g.is_regular() {
        let bound = match bound {
            Some(b) => b,
            None => default_bound(&g)?,
        };
        let m = RegularMember::new(&g, Some(bound)).map_err(input)?;
        let _ = writeln!(
            body,
            "engine: regular (bound {}, {})",
            m.bound(),
            if m.is_complete() { "complete" } else { "below B_G" }
        );
        let truth = match m.query(&v).map_err(input)? {
            RegularOutcome::Member(w) => {
                write_witness(&mut body, &g, &w);
                Truth::True
            }
            RegularOutcome::NonMember => Truth::False,
            RegularOutcome::NotWithinBound => Truth::Unknown,
        };
        return Ok(Outcome::new(body, truth));
    }
    if bound.is_some() {
        return Err(CliError::Usage("--bound applies to regular grammars only; use --caps".into()));
    }
    let caps = caps.map_or(DEFAULT_CAPS, |(run_cap, cycle_cap)| GeneralCaps { run_cap, cycle_cap });
    let m = GeneralMember::new(&g, caps).map_err(input)?;
    let _ = writeln!(
        body,
        "engine: general (run cap {}, cycle cap {}, {})",
        caps.run_cap,
        caps.cycle_cap,
        if m.is_complete() { "complete" } else { "capped" }
    );
    let truth = match m.query(&v).map_err(input)? {
        GeneralOutcome::Member(w) => {
            write_witness(&mut body, &g, &w);
            Truth::True
        }
        GeneralOutcome::NonMember => Truth::False,
        GeneralOutcome::Unknown => Truth::Unknown,
    };
    Ok(Outcome::new(body, truth))
}

fn oracle(g: &Grammar, depth: usize, window: u64) -> Result<Outcome, CliError> {
    let lang = oracle_language(g, depth, window);
    let mut body = String::new();
    for v in &lang {
        let _ = writeln!(body, "{}", format_vector(v, g.alphabet()));
    }
    let _ = writeln!(body, "count: {}", lang.len());
    Ok(Outcome::new(body, Truth::True))
}

fn order(g: &Grammar, text: &str, from: Option<&str>, to: Option<&str>) -> Result<Outcome, CliError> {
    let r = multiset(g, text)?;
    let from = match from {
        Some(s) => parse_nt_multiset(s, g).map_err(input)?,
        None => NtMultiset::singleton(g.start()),
    };
    let to = match to {
        Some(s) => parse_nt_multiset(s, g).map_err(input)?,
        None => NtMultiset::new(),
    };
    let cert = SubrunCert::new(r, from.clone(), to.clone());
    let route = format!("from {} to {}\n", format_nt_multiset(&from, g), format_nt_multiset(&to, g));
    match order_subrun(g, &cert) {
        Ok(seq) => {
            let steps: Vec<String> = seq.iter().map(|t| t.to_string()).collect();
            let body = format!("{route}order: {}\n", if steps.is_empty() { "-".into() } else { steps.join(" ") });
            Ok(Outcome::new(body, Truth::True))
        }
        Err(RunError::Invalid(why)) => Ok(Outcome::new(format!("{route}not a subrun: {why}\n"), Truth::False)),
        Err(e) => Err(input(e)),
    }
}

fn decompose(g: &Grammar, text: &str, from: Option<&str>) -> Result<Outcome, CliError> {
    require_normal_form(g)?;
    let r = multiset(g, text)?;
    let p = match from {
        Some(name) => nonterminal(g, name)?,
        None => g.start(),
    };
    let d = match decompose_run(g, &r, p) {
        Ok(d) => d,
        Err(DecomposeError::Cycle(CycleError::NotARun)) => {
            return Ok(Outcome::new(format!("not a run from {}\n", g.nt_name(p)), Truth::False));
        }
        Err(e) => return Err(input(e)),
    };
    let bg = compute_bg(g).map_err(input)?;
    d.validate(g, &r, p, &bg)
        .map_err(|e| CliError::Input(format!("decomposition failed validation: {e}")))?;
    let mut body = String::new();
    let _ = writeln!(body, "base-run: {}", format_transition_counts(d.base_run.counts()));
    let _ = writeln!(body, "base: {}", format_vector(&parikh(g, &d.base_run), g.alphabet()));
    for c in &d.cycles {
        let _ = writeln!(
            body,
            "cycle: {} x{} {} : {}",
            g.nt_name(c.anchor),
            c.multiplicity,
            format_transition_counts(c.cycle.counts()),
            format_vector(&parikh(g, &c.cycle), g.alphabet())
        );
    }
    let _ = writeln!(body, "image: {}", format_vector(&parikh(g, &r), g.alphabet()));
    Ok(Outcome::new(body, Truth::True))
}

fn cycles(g: &Grammar, name: &str, cap: Option<u64>) -> Result<Outcome, CliError> {
    require_normal_form(g)?;
    let q = nonterminal(g, name)?;
    let cap = cap.unwrap_or_else(|| simple_cycle_limit(g));
    let sc = enumerate_simple_cycles(g, q, cap).map_err(input)?;
    let mut body = String::new();
    for c in &sc.cycles {
        let _ = writeln!(
            body,
            "{} : {}",
            format_transition_counts(c.counts()),
            format_vector(&parikh(g, c), g.alphabet())
        );
    }
    let _ = writeln!(body, "count: {}", sc.cycles.len());
    Ok(Outcome::new(body, if sc.complete { Truth::True } else { Truth::Unknown }))
}

fn write_bundles(body: &mut String, set: &BundleSet, alphabet: &[String]) {
    for (i, b) in set.bundles.iter().enumerate() {
        if i > 0 {
            body.push('\n');
        }
        let _ = writeln!(body, "bundle {}", i + 1);
        for w in b.bases() {
            let _ = writeln!(body, "W: {}", format_vector(w, alphabet));
        }
        for p in b.periods() {
            let _ = writeln!(body, "P: {}", format_vector(p, alphabet));
        }
    }
}

fn bundles(g: &Grammar, run_cap: u64, cycle_cap: u64) -> Result<Outcome, CliError> {
    let mut body = String::new();
    let g = normalized_note(g, &mut body);
    let set = if g.is_regular() {
        regular_bundles(&g, run_cap).map_err(input)?
    } else if g.alphabet_size() == 2 {
        dim2_bundles(&g, run_cap, cycle_cap).map_err(input)?
    } else {
        return Err(CliError::Input(
            "bundles need a regular grammar or a two-letter alphabet".into(),
        ));
    };
    write_bundles(&mut body, &set, g.alphabet());
    Ok(Outcome::new(body, if set.truncated { Truth::Unknown } else { Truth::True }))
}

/// Both grammars over the union of their alphabets, in first-seen order.
fn common_alphabet(g1: &Grammar, g2: &Grammar) -> Result<(Grammar, Grammar), CliError> {
    let mut letters = g1.alphabet().to_vec();
    for a in g2.alphabet() {
        if !letters.contains(a) {
            letters.push(a.clone());
        }
    }
    Ok((
        g1.with_alphabet(&letters).map_err(input)?,
        g2.with_alphabet(&letters).map_err(input)?,
    ))
}

/// One prepared decider per grammar and a label for the output. Table
/// engines see the normal form; the oracle runs on the grammar as written.
fn deciders(args: &EngineArgs, grammars: &[&Grammar], window: u64) -> Result<(Vec<Decider>, String), CliError> {
    let caps = args
        .caps
        .map_or(DEFAULT_CAPS, |(run_cap, cycle_cap)| GeneralCaps { run_cap, cycle_cap });
    let regular = grammars.iter().all(|g| g.is_regular());
    let kind = match args.engine {
        EngineArg::Auto if regular && args.caps.is_none() => EngineArg::Regular,
        EngineArg::Auto => EngineArg::General,
        k => k,
    };
    if kind == EngineArg::Regular && !regular {
        return Err(CliError::Input("the regular engine needs regular grammars".into()));
    }
    let mut out = Vec::new();
    let mut labels = Vec::new();
    for g in grammars {
        let (engine, prepared) = match kind {
            EngineArg::Regular => {
                let h = g.normalize();
                let bound = match args.bound {
                    Some(b) => b,
                    None => default_bound(&h)?,
                };
                labels.push(format!("regular (bound {bound})"));
                (Engine::RegularDp { bound: Some(bound) }, h)
            }
            EngineArg::General => {
                labels.push(format!("general (run cap {}, cycle cap {})", caps.run_cap, caps.cycle_cap));
                (Engine::General(caps), g.normalize())
            }
            _ => {
                labels.push(format!("oracle (depth {})", args.depth));
                (Engine::Oracle { depth: args.depth }, (*g).clone())
            }
        };
        out.push(Decider::new(&prepared, engine, window).map_err(input)?);
    }
    labels.dedup();
    Ok((out, labels.join(", ")))
}

fn window_outcome(mut body: String, report: WindowReport, alphabet: &[String]) -> Outcome {
    let _ = writeln!(body, "window: [{}..{}]^{}", report.lo, report.hi, alphabet.len());
    if report.bounded {
        body.push_str("note: some negative answers hold only below the bound\n");
    }
    let (truth, witness) = match &report.verdict {
        Verdict::Holds => (Truth::True, None),
        Verdict::Fails(v) => (Truth::False, Some(v)),
        Verdict::Unknown(v) => (Truth::Unknown, Some(v)),
    };
    Outcome {
        body,
        truth,
        witness: witness.map(|v| format_vector(v, alphabet)),
    }
}

fn compare(g1: &Grammar, g2: &Grammar, mode: ModeArg, window: u64, args: &EngineArgs) -> Result<Outcome, CliError> {
    let (g1, g2) = common_alphabet(g1, g2)?;
    let (d, label) = deciders(args, &[&g1, &g2], window)?;
    let mode = match mode {
        ModeArg::Include => Mode::Inclusion,
        ModeArg::Equiv => Mode::Equivalence,
        ModeArg::Disjoint => Mode::Disjointness,
    };
    let report = compare_deciders(&d[0], &d[1], g1.alphabet_size(), window, mode).map_err(input)?;
    Ok(window_outcome(format!("engine: {label}\n"), report, g1.alphabet()))
}

fn universal(g: &Grammar, window: u64, ambient: AmbientArg, args: &EngineArgs) -> Result<Outcome, CliError> {
    let (d, label) = deciders(args, &[g], window)?;
    let ambient = match ambient {
        AmbientArg::Nat => Ambient::Naturals,
        AmbientArg::Int => Ambient::Integers,
    };
    let report = universality_decider(&d[0], g.alphabet_size(), window, ambient).map_err(input)?;
    Ok(window_outcome(format!("engine: {label}\n"), report, g.alphabet()))
}

fn generate(family: GenCommand, output: Option<&Path>) -> Result<Outcome, CliError> {
    match family {
        GenCommand::Hard { n, variant } => {
            let variant = match variant {
                VariantArg::Full => HardVariant::Full,
                VariantArg::Stripped => HardVariant::Stripped,
                VariantArg::Cone => HardVariant::Cone,
            };
            emit_grammar(&gen_hard_grammar(n, variant), output, "")
        }
        GenCommand::Qsat2 { formula, side } => {
            let f = load_formula(&formula)?;
            let g = match side {
                SideArg::Left => encode_qsat2_inclusion(&f).map_err(input)?.0,
                SideArg::Right => encode_qsat2_inclusion(&f).map_err(input)?.1,
                SideArg::Universal => encode_qsat2_universality(&f).map_err(input)?,
            };
            emit_grammar(&g, output, "")
        }
        GenCommand::SatUnary { formula, primes } => {
            let f = load_formula(&formula)?;
            emit_grammar(&encode_3sat_unary_universality(&f, &primes).map_err(input)?, output, "")
        }
        GenCommand::Ham { graph, start } => {
            let gr = parse_graph(&read(&graph)?).map_err(input)?;
            let s = match start {
                Some(name) => gr
                    .vertex(&name)
                    .ok_or_else(|| CliError::Input(format!("unknown vertex `{name}`")))?,
                None => 0,
            };
            let (g, target) = encode_hamiltonian_membership(&gr, s).map_err(input)?;
            let extra = format!("# target: {}\n", format_vector(&target, g.alphabet()));
            emit_grammar(&g, output, &extra)
        }
    }
}

fn bound_report(g1: &Grammar, g2: &Grammar) -> Result<Outcome, CliError> {
    let (g1, g2) = common_alphabet(g1, g2)?;
    let r = window_bound_report(&g1.normalize(), &g2.normalize()).map_err(input)?;
    let mut body = String::new();
    let _ = writeln!(body, "B_G1: {}", r.bg1);
    let _ = writeln!(body, "B_G2: {}", r.bg2);
    let _ = writeln!(body, "gamma1: {}", r.gamma1);
    let _ = writeln!(body, "gamma2: {}", r.gamma2);
    let _ = writeln!(body, "h1: {}", r.h1);
    let _ = writeln!(body, "h2: {}", r.h2);
    let _ = writeln!(body, "note: {}", r.note);
    Ok(Outcome::new(body, Truth::True))
}

