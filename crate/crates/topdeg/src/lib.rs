//! Verified topological degree for interval-evaluated maps on boxes.
//!
//! `degree(F, B, budget)` computes the Brouwer degree deg(F, B, 0) of a
//! square system of terms over a named box, certifying 0 ∉ F(∂B) with
//! interval arithmetic as it goes; a nonzero degree therefore proves that F
//! has a root inside B. The algorithm reduces the boundary of the box to
//! coverings of oriented cells on which single components have certified
//! signs, recursing one dimension down per step. Answers are exact integers;
//! failure modes are explicit (`BoundaryZeroUnverified`, `BudgetExceeded`)
//! and never guessed around.

mod chain;
mod degree;

pub use degree::{degree, verify_boundary_nonzero, DegreeResult, DEFAULT_FACE_BUDGET};
