//! Satisfiability certificates and their independent checker.
//!
//! A certificate (σ, ν, β) claims that a clausal formula over nonlinear real
//! arithmetic is satisfiable: σ selects one literal per clause, ν pins some
//! variables to floats, and β is a set of boxes whose union B_β must contain
//! a root of the selected equations — established by a nonzero topological
//! degree — while the selected inequalities hold throughout every box.
//! Checking needs only interval arithmetic and the degree computation;
//! nothing from the certificate *search* is trusted or even linked.
//!
//! Certificates serialize to JSON with hex-literal floats, so values
//! round-trip bitwise; the document pins the exact formula via a SHA-256
//! digest of its canonical print.

mod check;
mod codec;
mod model;

pub use check::{
    check_certificate, CheckReport, ConditionReport, Outcome, Verdict, CONDITION_NAMES,
};
pub use codec::{deserialize_certificate, serialize_certificate, CertError, FORMAT_VERSION};
pub use model::{formula_digest, Certificate};
