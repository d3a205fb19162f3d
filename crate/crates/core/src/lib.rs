//! Commutative grammars over integer Parikh vectors: runs and derivation
//! trees, cycle decomposition, membership, window-bounded comparisons and
//! generators for hard instances.

pub mod bundles;
pub mod cycles;
pub mod decompose;
pub mod grammar;
pub mod hardness;
pub mod linalg;
pub mod membership;
pub mod oracle;
pub mod runs;
pub mod semilinear;
pub mod text;
pub mod tree;
pub mod vector;
pub mod window;

pub use grammar::{difference_grammar, Classification, Grammar, GrammarError, Transition};
pub use oracle::oracle_language;
pub use runs::{SubrunCert, TransitionMultiset};
pub use text::{parse_grammar, serialize_grammar};
pub use vector::{NtId, NtMultiset, TermVector, TransId};
