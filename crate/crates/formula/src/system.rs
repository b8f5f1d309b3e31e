//! Selected systems: applying a literal selector and a partial instantiation
//! to a formula yields the square-system candidate (F, G) that the box search
//! and the certificate checker both work on.

use crate::formula::{Clause, Formula, Literal, Rel};
use crate::term::{Term, VarId};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Equations `F = 0` and inequalities `G ≤ 0` of a selected, partially
/// instantiated formula, over the remaining (uninstantiated) variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemPair {
    /// Remaining variables `Vars(φ) \ V`, ascending.
    pub domain: Vec<VarId>,
    /// Selected equation terms with the instantiation substituted, in clause
    /// order.
    pub f: Vec<Term>,
    /// Selected inequality terms (each read as `g ≤ 0`), in clause order.
    /// Strict literals are weakened by the caller-supplied margin so that
    /// `g ≤ 0` implies the original `< 0`.
    pub g: Vec<Term>,
    /// Whether the corresponding `g` entry came from a strict literal.
    pub g_strict: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("selector has {got} entries for {expected} clauses")]
    SelectorLength { expected: usize, got: usize },
    #[error("selector picks literal {index} of clause {clause}, which has {len} literals")]
    SelectorRange { clause: usize, index: usize, len: usize },
    #[error("instantiation of `{var}` is not a finite float")]
    NonFiniteValue { var: String },
}

/// Extracts the selected literals `σ(φ)` in clause order.
pub fn selected_literals<'a>(
    phi: &'a Formula,
    sigma: &[usize],
) -> Result<Vec<&'a Literal>, PartitionError> {
    if sigma.len() != phi.clauses.len() {
        return Err(PartitionError::SelectorLength {
            expected: phi.clauses.len(),
            got: sigma.len(),
        });
    }
    phi.clauses
        .iter()
        .zip(sigma)
        .enumerate()
        .map(|(i, (clause, &k))| {
            clause.literals.get(k).ok_or(PartitionError::SelectorRange {
                clause: i,
                index: k,
                len: clause.literals.len(),
            })
        })
        .collect()
}

/// Splits `σ(φ)` under the partial instantiation `ν` into equations F and
/// inequalities G over the remaining variables `Vars(φ) \ dom(ν)`.
///
/// Strict inequalities are weakened to `f + strict_eps ≤ 0`; passing zero
/// keeps the term unchanged (the checker does that and tests `hi < 0`
/// instead). Instantiated variables that do not occur in `σ(φ)` are accepted
/// but reported in the warning list.
pub fn partition_selected(
    phi: &Formula,
    sigma: &[usize],
    nu: &BTreeMap<VarId, f64>,
    strict_eps: &BigRational,
) -> Result<(SystemPair, Vec<String>), PartitionError> {
    let selected = selected_literals(phi, sigma)?;

    let mut rational_nu = BTreeMap::new();
    for (&v, &x) in nu {
        let Some(r) = BigRational::from_float(x) else {
            return Err(PartitionError::NonFiniteValue {
                var: phi.var_name(v).to_string(),
            });
        };
        rational_nu.insert(v, r);
    }

    let mut selected_vars = BTreeSet::new();
    for lit in &selected {
        lit.term.collect_vars(&mut selected_vars);
    }
    let warnings: Vec<String> = nu
        .keys()
        .filter(|v| !selected_vars.contains(v))
        .map(|v| {
            format!(
                "instantiated variable `{}` does not occur in the selected literals",
                phi.var_name(*v)
            )
        })
        .collect();

    let domain: Vec<VarId> = phi
        .all_vars()
        .into_iter()
        .filter(|v| !nu.contains_key(v))
        .collect();

    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut g_strict = Vec::new();
    for lit in selected {
        let term = lit.term.substitute(&rational_nu);
        match lit.rel {
            Rel::Eq => f.push(term),
            Rel::Le => {
                g.push(term);
                g_strict.push(false);
            }
            Rel::Lt => {
                let weakened = if strict_eps.is_zero() {
                    term
                } else {
                    Term::add(term, Term::Const(strict_eps.clone()))
                };
                g.push(weakened);
                g_strict.push(true);
            }
        }
    }

    Ok((
        SystemPair {
            domain,
            f,
            g,
            g_strict,
        },
        warnings,
    ))
}

/// Enumerates literal selectors in lexicographic clause-literal order
/// (last clause varies fastest), up to `cap` tuples. The flag reports
/// truncation.
pub fn dnf_selectors(phi: &Formula, cap: usize) -> (Vec<Vec<usize>>, bool) {
    let sizes: Vec<usize> = phi.clauses.iter().map(|c| c.literals.len()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; sizes.len()];
    loop {
        if out.len() == cap {
            return (out, true);
        }
        out.push(idx.clone());
        // odometer increment; done when it wraps
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return (out, false);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Expands the formula into its disjunctive normal form: one conjunction of
/// unit clauses per literal selector, enumerated lexicographically, capped.
pub fn dnf_expand(phi: &Formula, cap: usize) -> (Vec<Formula>, bool) {
    let (selectors, truncated) = dnf_selectors(phi, cap);
    let conjuncts = selectors
        .iter()
        .map(|sigma| conjunct_formula(phi, sigma))
        .collect();
    (conjuncts, truncated)
}

/// Builds the unit-clause formula for one selector. Its variable table is
/// the subset of `φ`'s variables occurring in the selected literals, in the
/// same order.
pub fn conjunct_formula(phi: &Formula, sigma: &[usize]) -> Formula {
    let selected =
        selected_literals(phi, sigma).expect("selector must be total over the clauses");
    let mut used = BTreeSet::new();
    for lit in &selected {
        lit.term.collect_vars(&mut used);
    }
    let mut map = BTreeMap::new();
    let mut vars = Vec::new();
    for v in used {
        map.insert(v, VarId(vars.len()));
        vars.push(phi.var_name(v).to_string());
    }
    let clauses = selected
        .iter()
        .map(|lit| Clause::unit(Literal::new(lit.term.remap_vars(&map), lit.rel)))
        .collect();
    Formula { vars, clauses }
}
