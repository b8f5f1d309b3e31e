//! Exact linear consistency check for sets of forced literals.
//!
//! When every literal of a clause except one is ruled out near a point, the
//! remaining literals must hold simultaneously. This module linearizes them
//! over exact rationals — treating nonlinear subterms as opaque atoms — and
//! runs Gaussian elimination. Because opaque atoms only relax the real
//! semantics, a derived contradiction is sound: the literal set has no real
//! solution and the point can be abandoned without further box search.

use ntacert_formula::{Func, Literal, Rel, Term, VarId};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Outcome of the check. There is no `Consistent`: satisfiable linearized
/// systems say nothing about the nonlinear original.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    ConsistentUnknown,
    Inconsistent,
}

/// Atoms of the linearization: plain variables, or whole nonlinear subterms
/// keyed by their (injective) debug rendering. Variables order first, so
/// pivot selection prefers them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKey {
    Var(VarId),
    Opaque(String),
}

/// `sum(coeffs) + k`, with zero coefficients never stored.
#[derive(Debug, Clone, Default)]
struct LinExpr {
    coeffs: BTreeMap<AtomKey, BigRational>,
    k: BigRational,
}

impl LinExpr {
    fn constant(k: BigRational) -> LinExpr {
        LinExpr {
            coeffs: BTreeMap::new(),
            k,
        }
    }

    fn atom(key: AtomKey) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(key, BigRational::one());
        LinExpr {
            coeffs,
            k: BigRational::zero(),
        }
    }

    fn add_scaled(&mut self, other: &LinExpr, scale: &BigRational) {
        if scale.is_zero() {
            return;
        }
        for (key, c) in &other.coeffs {
            let entry = self
                .coeffs
                .entry(key.clone())
                .or_insert_with(BigRational::zero);
            *entry += c * scale;
            if entry.is_zero() {
                self.coeffs.remove(key);
            }
        }
        self.k += &other.k * scale;
    }

    fn scaled(mut self, scale: &BigRational) -> LinExpr {
        if scale.is_zero() {
            return LinExpr::constant(BigRational::zero());
        }
        for c in self.coeffs.values_mut() {
            *c *= scale;
        }
        self.k *= scale;
        self
    }
}

fn linearize(t: &Term) -> LinExpr {
    match t {
        Term::Var(v) => LinExpr::atom(AtomKey::Var(*v)),
        Term::Const(c) => LinExpr::constant(c.clone()),
        Term::Add(a, b) => {
            let mut e = linearize(a);
            e.add_scaled(&linearize(b), &BigRational::one());
            e
        }
        Term::Neg(a) => linearize(a).scaled(&-BigRational::one()),
        Term::Mul(a, b) => {
            if let Some(c) = a.fold_constant() {
                linearize(b).scaled(&c)
            } else if let Some(c) = b.fold_constant() {
                linearize(a).scaled(&c)
            } else {
                LinExpr::atom(AtomKey::Opaque(format!("{t:?}")))
            }
        }
        Term::App(f, a) => {
            match a.fold_constant() {
                // Exact function values exist only at zero.
                Some(c) if c.is_zero() => match f {
                    Func::Sin | Func::Tan => LinExpr::constant(BigRational::zero()),
                    Func::Cos | Func::Exp => LinExpr::constant(BigRational::one()),
                },
                _ => LinExpr::atom(AtomKey::Opaque(format!("{t:?}"))),
            }
        }
    }
}

/// Substitutes every known pivot row into `e`.
fn reduce(e: &mut LinExpr, rows: &[(AtomKey, LinExpr)]) {
    for (pivot, row) in rows {
        if let Some(c) = e.coeffs.get(pivot).cloned() {
            e.coeffs.remove(pivot);
            let mut stripped = row.clone();
            stripped.coeffs.remove(pivot);
            e.add_scaled(&stripped, &-c);
        }
    }
}

/// Recognizes terms of the shape `a·x + k` over a single variable and no
/// nonlinear atoms, returning `(x, a, k)` with `a ≠ 0`.
pub fn single_var_linear(t: &Term) -> Option<(VarId, BigRational, BigRational)> {
    let e = linearize(t);
    if e.coeffs.len() != 1 {
        return None;
    }
    match e.coeffs.first_key_value() {
        Some((AtomKey::Var(v), a)) => Some((*v, a.clone(), e.k)),
        _ => None,
    }
}

/// Decides whether the conjunction of `literals` is linearly refutable.
pub fn forced_consistency(literals: &[Literal]) -> Consistency {
    let mut rows: Vec<(AtomKey, LinExpr)> = Vec::new();
    let mut inequalities: Vec<(LinExpr, Rel)> = Vec::new();

    for lit in literals {
        let e = linearize(&lit.term);
        match lit.rel {
            Rel::Eq => {
                let mut e = e;
                reduce(&mut e, &rows);
                match e.coeffs.first_key_value() {
                    None => {
                        if !e.k.is_zero() {
                            return Consistency::Inconsistent;
                        }
                    }
                    Some((pivot, c)) => {
                        let pivot = pivot.clone();
                        let inv = BigRational::one() / c.clone();
                        let e = e.scaled(&inv);
                        // Inter-reduce so earlier rows stay pivot-free.
                        for (_, row) in rows.iter_mut() {
                            if let Some(c) = row.coeffs.get(&pivot).cloned() {
                                row.coeffs.remove(&pivot);
                                let mut stripped = e.clone();
                                stripped.coeffs.remove(&pivot);
                                row.add_scaled(&stripped, &-c);
                            }
                        }
                        rows.push((pivot, e));
                    }
                }
            }
            rel => inequalities.push((e, rel)),
        }
    }

    for (mut g, rel) in inequalities {
        reduce(&mut g, &rows);
        if g.coeffs.is_empty() {
            let bad = match rel {
                Rel::Le => g.k.is_positive(),
                Rel::Lt => !g.k.is_negative(),
                Rel::Eq => unreachable!(),
            };
            if bad {
                return Consistency::Inconsistent;
            }
        }
    }
    Consistency::ConsistentUnknown
}
