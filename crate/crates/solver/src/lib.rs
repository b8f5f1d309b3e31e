//! A certificate-producing satisfiability search for conjunctions and
//! disjunctions of nonlinear real constraints.
//!
//! The solver never asserts satisfiability on its own authority: every
//! candidate answer is assembled into a certificate — a literal selector,
//! a partial variable assignment, and a set of boxes — and handed to the
//! independent interval/degree checker. Only a checker-validated
//! certificate is reported as `sat`.
//!
//! The crate is organized along the levels of the search:
//!
//! * [`objective`] / [`dual`] / [`local`] / [`basin`] — a smooth penalty
//!   objective over the formula, forward-mode derivatives, gradient
//!   descent, and the basin-hopping sampler that yields candidate points;
//! * [`forced`] — an exact linear-arithmetic consistency check over the
//!   literals every selector is forced to include;
//! * [`matching`] — bipartite matching and the coarse
//!   Dulmage–Mendelsohn decomposition of equation systems;
//! * [`linalg`] — Jacobians, a small SVD, numeric rank, null-space
//!   variable weights, and the enumeration of instantiation candidates;
//! * [`search`] — the four-level driver tying it all together.

pub mod basin;
pub mod dual;
pub mod forced;
pub mod linalg;
pub mod local;
pub mod matching;
pub mod objective;
pub mod search;

pub use basin::{basin_hopping, MinimizerResult};
pub use dual::{eval_dual, eval_f64, Dual};
pub use forced::{forced_consistency, single_var_linear, Consistency};
pub use linalg::{
    instantiation_candidates, jacobian_at, kearfott_order, newton_polish, numeric_rank,
    rank_with_threshold, svd_jacobi, CandidateFilters, InstantiationCandidate, Svd,
};
pub use local::{descend, DescentResult, MAX_DESCENT_STEPS};
pub use matching::{
    build_graph, dm_decompose, is_overconstrained_free, maximum_matching, BipartiteGraph,
    DmDecomposition,
};
pub use objective::{build_objective, literal_penalty, Objective};
pub use search::{
    approx_sat_literals, children_instantiations, children_literals, children_points, solve,
    BoxStrategy, SearchConfig, SearchOutcome, SearchStats, SolveResult,
};
