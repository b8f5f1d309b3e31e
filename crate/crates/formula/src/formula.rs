//! Clausal formulas: conjunctions of disjunctions of literals `t ⋈ 0`.

use crate::term::{Term, VarId};
use std::collections::BTreeSet;

/// Relation of a literal against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    /// `t = 0`
    Eq,
    /// `t ≤ 0`
    Le,
    /// `t < 0`
    Lt,
}

/// An atomic constraint `term ⋈ 0`. Negation does not exist at this level;
/// normalization eliminates it before literals are built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub term: Term,
    pub rel: Rel,
}

impl Literal {
    pub fn new(term: Term, rel: Rel) -> Literal {
        Literal { term, rel }
    }

    pub fn eq0(term: Term) -> Literal {
        Literal::new(term, Rel::Eq)
    }

    pub fn le0(term: Term) -> Literal {
        Literal::new(term, Rel::Le)
    }

    pub fn lt0(term: Term) -> Literal {
        Literal::new(term, Rel::Lt)
    }
}

/// A nonempty disjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Clause {
        assert!(!literals.is_empty(), "empty clause");
        Clause { literals }
    }

    pub fn unit(lit: Literal) -> Clause {
        Clause::new(vec![lit])
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut acc = BTreeSet::new();
        for lit in &self.literals {
            lit.term.collect_vars(&mut acc);
        }
        acc
    }
}

/// A quantifier-free formula in CNF. `vars` holds the names of exactly the
/// variables occurring in some clause, in declaration order; `VarId(i)`
/// indexes into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub vars: Vec<String>,
    pub clauses: Vec<Clause>,
}

impl Formula {
    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|n| n == name).map(VarId)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// All variables of the formula, i.e. `0..num_vars()` by the table
    /// invariant.
    pub fn all_vars(&self) -> Vec<VarId> {
        (0..self.vars.len()).map(VarId).collect()
    }

    /// Checks the variable-table invariant: every table entry occurs in some
    /// clause and every occurring id points into the table.
    pub fn vars_consistent(&self) -> bool {
        let mut used = BTreeSet::new();
        for c in &self.clauses {
            used.extend(c.vars());
        }
        used.len() == self.vars.len()
            && used.iter().all(|v| v.0 < self.vars.len())
    }
}

/// Re-canonicalizes every literal term (constant folding through the smart
/// constructors). Parsing already produces canonical formulas, so this is
/// idempotent and `normalize(parse(s)) == parse(s)`.
pub fn normalize(phi: &Formula) -> Formula {
    Formula {
        vars: phi.vars.clone(),
        clauses: phi
            .clauses
            .iter()
            .map(|c| {
                Clause::new(
                    c.literals
                        .iter()
                        .map(|l| Literal::new(l.term.canonicalize(), l.rel))
                        .collect(),
                )
            })
            .collect(),
    }
}
