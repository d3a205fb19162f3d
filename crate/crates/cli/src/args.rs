//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "commgram", version, about = "Analyze commutative grammars and their Parikh images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a grammar file and print it in canonical form.
    Parse {
        grammar: PathBuf,
    },
    /// Rewrite a grammar into normal form.
    Normalize {
        grammar: PathBuf,
        /// Write the grammar here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report whether a grammar is regular, in normal form and positive.
    Classify {
        grammar: PathBuf,
    },
    /// Decide whether a vector such as `a^3 b^-2` is in the Parikh image.
    Member {
        grammar: PathBuf,
        vector: String,
        /// Base-run bound for regular grammars (default `B_G`).
        #[arg(long, conflicts_with_all = ["caps", "oracle"])]
        bound: Option<u64>,
        /// Run and cycle caps, `run,cycle`, for the general procedure.
        #[arg(long, value_parser = parse_pair, conflicts_with = "oracle")]
        caps: Option<(u64, u64)>,
        /// Exhaustive search, `depth,window`.
        #[arg(long, value_parser = parse_pair)]
        oracle: Option<(u64, u64)>,
    },
    /// List the images of all runs with at most `depth` transitions inside the window.
    Oracle {
        grammar: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        window: u64,
    },
    /// Order a transition multiset such as `t1*2 t3` into a firing sequence.
    Order {
        grammar: PathBuf,
        multiset: String,
        /// Source nonterminal multiset (default: the start symbol).
        #[arg(long)]
        from: Option<String>,
        /// Remaining nonterminal multiset (default: `0`).
        #[arg(long)]
        to: Option<String>,
    },
    /// Split a run into a bounded base run plus simple cycles.
    Decompose {
        grammar: PathBuf,
        multiset: String,
        /// Nonterminal the run starts from (default: the start symbol).
        #[arg(long)]
        from: Option<String>,
    },
    /// Enumerate the simple cycles from a nonterminal.
    Cycles {
        grammar: PathBuf,
        nonterminal: String,
        /// Largest cycle size searched (default `γ(N) − 1`).
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Describe the Parikh image as a union of simple bundles.
    Bundles {
        grammar: PathBuf,
        /// Largest base run enumerated.
        #[arg(long, default_value_t = 12)]
        run_cap: u64,
        /// Largest cycle enumerated (two-letter general grammars only).
        #[arg(long, default_value_t = 8)]
        cycle_cap: u64,
    },
    /// Compare two Parikh images on every vector with `‖v‖∞ ≤ window`.
    Compare {
        g1: PathBuf,
        g2: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        window: u64,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Check that every vector of the window is in the Parikh image.
    Universal {
        grammar: PathBuf,
        #[arg(long)]
        window: u64,
        #[arg(long, value_enum, default_value_t = AmbientArg::Nat)]
        ambient: AmbientArg,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Generate hard instances.
    Gen {
        #[command(subcommand)]
        family: GenCommand,
        /// Write the grammar here instead of standard output.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Print the computable bounds used to choose a comparison window.
    BoundReport {
        g1: PathBuf,
        g2: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// The family whose Parikh image has a hull with `2^n` vertices.
    Hard {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
    },
    /// Grammars for a `∀x ∃y` formula.
    Qsat2 {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// A unary regular grammar universal over ℕ iff the formula is unsatisfiable.
    SatUnary {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u64>,
    },
    /// A regular grammar containing the all-ones vector iff the graph is Hamiltonian.
    Ham {
        #[arg(long)]
        graph: PathBuf,
        /// Start vertex (default: the first vertex).
        #[arg(long)]
        start: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    pub engine: EngineArg,
    /// Base-run bound for the regular engine (default `B_G`).
    #[arg(long)]
    pub bound: Option<u64>,
    /// Run and cycle caps, `run,cycle`, for the general engine.
    #[arg(long, value_parser = parse_pair)]
    pub caps: Option<(u64, u64)>,
    /// Derivation length for the oracle engine.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    /// Regular tables when both grammars are regular, the general procedure otherwise.
    Auto,
    Regular,
    General,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Include,
    Equiv,
    Disjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AmbientArg {
    Nat,
    Int,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Stripped,
    Cone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    /// The `S1` grammar of the inclusion pair.
    Left,
    /// The `S2` grammar of the inclusion pair.
    Right,
    /// The grammar universal over ℤ iff the formula holds.
    Universal,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two numbers `x,y`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad number `{t}`"));
    Ok((num(a)?, num(b)?))
}
