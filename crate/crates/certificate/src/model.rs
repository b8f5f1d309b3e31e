//! The certificate data model and the formula digest it is pinned to.

use std::collections::BTreeMap;

use ntacert_formula::{normalize, print_formula, Formula};
use sha2::{Digest, Sha256};

/// A satisfiability certificate (σ, ν, β) for a clausal formula.
///
/// `sigma` picks one literal per clause by index; `nu` pins a subset of the
/// variables, by name, to binary64 values; `beta` is a nonempty set of boxes
/// over the remaining variables whose union must form a single box. The
/// digest ties the certificate to the exact normalized formula it was issued
/// for, so a certificate cannot silently be replayed against a different
/// input.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub formula_digest: String,
    pub sigma: Vec<usize>,
    pub nu: BTreeMap<String, f64>,
    /// Each box maps variable names to `(lo, hi)` endpoint pairs. A
    /// zero-dimensional box is the empty map.
    pub beta: Vec<BTreeMap<String, (f64, f64)>>,
}

/// SHA-256 of the canonical print of the normalized formula, lowercase hex.
pub fn formula_digest(phi: &Formula) -> String {
    let canonical = print_formula(&normalize(phi));
    let hash = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in hash {
        use std::fmt::Write;
        write!(out, "{byte:02x}").unwrap();
    }
    out
}
