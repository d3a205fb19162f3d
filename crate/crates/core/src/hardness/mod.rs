//! Generators for hard instances, each with a direct solver for
//! cross-checking.

pub mod family;
pub mod formula;
pub mod graph;
pub mod qsat;
pub mod unary;

pub use family::{convex_hull_vertices, gen_hard_grammar, HardVariant};
pub use formula::{parse_formula, qbf_holds, sat_satisfiable, CnfFormula, FormulaError, Literal, VarKind};
pub use graph::{encode_hamiltonian_membership, hamiltonian_circuit, parse_graph, Graph, GraphError};
pub use qsat::{encode_3sat_membership, encode_qsat2_inclusion, encode_qsat2_universality, qsat_value_bound};
pub use unary::{encode_3sat_unary_universality, residues_satisfy};
