//! Real-valued terms over exact rational constants.
//!
//! A term is a tree of `+`, `*`, unary `-` and the unary function symbols
//! `sin`, `cos`, `tan`, `exp` over variables and arbitrary-precision rational
//! constants. Integer powers and constant divisors are expanded away by the
//! parser, so they never appear here.

use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// Index of a variable in its formula's variable table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Unary function symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    Const(BigRational),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    App(Func, Box<Term>),
}

impl Term {
    pub fn int(n: i64) -> Term {
        Term::Const(BigRational::from_integer(n.into()))
    }

    pub fn rat(p: i64, q: i64) -> Term {
        assert!(q != 0, "zero denominator");
        Term::Const(BigRational::new(p.into(), q.into()))
    }

    /// Sum of two terms; adjacent constants fold.
    pub fn add(a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Const(x), Term::Const(y)) => Term::Const(x + y),
            (a, b) => Term::Add(Box::new(a), Box::new(b)),
        }
    }

    /// Product of two terms; adjacent constants fold.
    pub fn mul(a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Const(x), Term::Const(y)) => Term::Const(x * y),
            (a, b) => Term::Mul(Box::new(a), Box::new(b)),
        }
    }

    /// Negation; constants fold so that printed terms re-parse to the same tree.
    pub fn neg(a: Term) -> Term {
        match a {
            Term::Const(x) => Term::Const(-x),
            a => Term::Neg(Box::new(a)),
        }
    }

    pub fn app(f: Func, a: Term) -> Term {
        Term::App(f, Box::new(a))
    }

    /// `a - b` as `a + (-b)`.
    pub fn sub(a: Term, b: Term) -> Term {
        Term::add(a, Term::neg(b))
    }

    pub fn var(i: usize) -> Term {
        Term::Var(VarId(i))
    }

    /// Rebuilds the term with the same shape, re-applying constant folding.
    /// Idempotent: a canonical term maps to itself.
    pub fn canonicalize(&self) -> Term {
        match self {
            Term::Var(v) => Term::Var(*v),
            Term::Const(c) => Term::Const(c.clone()),
            Term::Add(a, b) => Term::add(a.canonicalize(), b.canonicalize()),
            Term::Mul(a, b) => Term::mul(a.canonicalize(), b.canonicalize()),
            Term::Neg(a) => Term::neg(a.canonicalize()),
            Term::App(f, a) => Term::app(*f, a.canonicalize()),
        }
    }

    pub fn collect_vars(&self, acc: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                acc.insert(*v);
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(acc);
                b.collect_vars(acc);
            }
            Term::Neg(a) | Term::App(_, a) => a.collect_vars(acc),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut acc = BTreeSet::new();
        self.collect_vars(&mut acc);
        acc
    }

    /// Replaces assigned variables by exact rational constants.
    pub fn substitute(&self, assignment: &BTreeMap<VarId, BigRational>) -> Term {
        match self {
            Term::Var(v) => match assignment.get(v) {
                Some(c) => Term::Const(c.clone()),
                None => Term::Var(*v),
            },
            Term::Const(c) => Term::Const(c.clone()),
            Term::Add(a, b) => Term::add(a.substitute(assignment), b.substitute(assignment)),
            Term::Mul(a, b) => Term::mul(a.substitute(assignment), b.substitute(assignment)),
            Term::Neg(a) => Term::neg(a.substitute(assignment)),
            Term::App(f, a) => Term::app(*f, a.substitute(assignment)),
        }
    }

    /// Rewrites every variable index through `map`. Used when a formula's
    /// variable table is rebuilt (parsing, DNF expansion).
    pub fn remap_vars(&self, map: &BTreeMap<VarId, VarId>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map[v]),
            Term::Const(c) => Term::Const(c.clone()),
            Term::Add(a, b) => Term::Add(
                Box::new(a.remap_vars(map)),
                Box::new(b.remap_vars(map)),
            ),
            Term::Mul(a, b) => Term::Mul(
                Box::new(a.remap_vars(map)),
                Box::new(b.remap_vars(map)),
            ),
            Term::Neg(a) => Term::Neg(Box::new(a.remap_vars(map))),
            Term::App(f, a) => Term::App(*f, Box::new(a.remap_vars(map))),
        }
    }

    /// Exact rational value of a constant term. Function applications are
    /// never folded — `sin` of a nonzero rational is irrational.
    pub fn fold_constant(&self) -> Option<BigRational> {
        match self {
            Term::Var(_) => None,
            Term::Const(c) => Some(c.clone()),
            Term::Add(a, b) => Some(a.fold_constant()? + b.fold_constant()?),
            Term::Mul(a, b) => Some(a.fold_constant()? * b.fold_constant()?),
            Term::Neg(a) => Some(-a.fold_constant()?),
            Term::App(_, _) => None,
        }
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self, Term::Const(c) if c.is_zero())
    }
}
