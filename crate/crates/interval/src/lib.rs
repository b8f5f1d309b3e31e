//! Outward-rounded interval arithmetic over f64, exact conversions, boxes
//! over named variables, and interval evaluation of nonlinear terms.
//!
//! This crate is the numeric trust base of the certificate checker: every
//! returned interval is guaranteed to contain the exact mathematical result,
//! and operations that happen to be exact in binary64 do not widen. Directed
//! rounding is implemented with error-free transformations instead of FPU
//! mode switches; transcendental functions get a two-ulp bracket around the
//! platform libm plus exact handling of the zero argument and of interior
//! extrema located through a tight interval enclosure of pi.

mod boxes;
mod eval;
mod hex;
mod interval;
mod rational;
mod round;

pub use boxes::{union_hull_if_box, BoxesError, Face, NamedBox};
pub use eval::{eval_point, eval_term, EvalError};
pub use hex::{f64_from_hex, f64_to_hex, HexFloatError};
pub use interval::{half_pi, pi, two_pi, Interval};
pub use rational::rational_to_interval;
pub use round::{add_down, add_up, mul_both, next_down, next_up, wide_down, wide_up};
