//! Formula core for a certifying nonlinear-arithmetic satisfiability engine.
//!
//! This crate owns the term/formula AST with exact rational constants, the
//! parser and canonical printer for the accepted SMT-LIB subset, CNF
//! normalization, disjunctive expansion, and the extraction of selected
//! square systems (equations F, inequalities G) from a literal selector and
//! a partial floating-point instantiation.

mod formula;
mod parser;
mod printer;
mod system;
mod term;

pub use formula::{normalize, Clause, Formula, Literal, Rel};
pub use parser::{parse_formula, ParseError, CNF_CLAUSE_CAP};
pub use printer::{print_formula, print_literal, print_term};
pub use system::{
    conjunct_formula, dnf_expand, dnf_selectors, partition_selected, selected_literals,
    PartitionError, SystemPair,
};
pub use term::{Func, Term, VarId};
