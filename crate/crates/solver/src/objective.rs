//! Translation of formulas into non-negative objective functions.
//!
//! A literal `f = 0` contributes `|f(p)|`, and `f ≤ 0` / `f < 0` contribute
//! `max(f(p), 0)`; a clause contributes the minimum over its literals and the
//! formula sums its clauses. Every model of the formula is a zero of the
//! objective (the converse need not hold: strict inequalities and min over
//! unsatisfiable branches can vanish without a model). Evaluation that runs
//! into NaN (e.g. a tan pole) is mapped to `+∞` so minimizers steer away.

use crate::dual::{eval_dual, eval_f64};
use ntacert_formula::{Formula, Literal, Rel, VarId};

/// A formula translated to a non-negative objective over the formula's
/// variables, in table order.
#[derive(Debug, Clone)]
pub struct Objective {
    clauses: Vec<Vec<Literal>>,
    arity: usize,
}

/// Penalty of a single literal at a point: `|f|` for equations, `max(f, 0)`
/// for inequalities, `+∞` if the term evaluates to NaN.
pub fn literal_penalty(lit: &Literal, p: &[f64]) -> f64 {
    let v = eval_f64(&lit.term, p);
    if v.is_nan() {
        return f64::INFINITY;
    }
    match lit.rel {
        Rel::Eq => v.abs(),
        Rel::Le | Rel::Lt => v.max(0.0),
    }
}

pub fn build_objective(phi: &Formula) -> Objective {
    Objective {
        clauses: phi
            .clauses
            .iter()
            .map(|c| c.literals.clone())
            .collect(),
        arity: phi.vars.len(),
    }
}

impl Objective {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Sum over clauses of the cheapest literal penalty. Non-negative; zero
    /// at every model.
    pub fn eval(&self, p: &[f64]) -> f64 {
        self.clauses
            .iter()
            .map(|clause| {
                clause
                    .iter()
                    .map(|l| literal_penalty(l, p))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    /// Gradient of the smooth branch active at `p`. In each clause the
    /// first literal attaining the minimum is differentiated; `|f|` at
    /// `f = 0` takes the `+∇f` branch and `max(f, 0)` contributes `∇f`
    /// exactly when `f ≥ 0`. Clauses whose best penalty is `+∞` contribute
    /// nothing (there is no useful direction).
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let dirs: Vec<VarId> = (0..self.arity).map(VarId).collect();
        let mut grad = vec![0.0; self.arity];
        for clause in &self.clauses {
            let mut best: Option<(usize, f64)> = None;
            for (i, lit) in clause.iter().enumerate() {
                let v = literal_penalty(lit, p);
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let Some((i, v)) = best else { continue };
            if v.is_infinite() {
                continue;
            }
            let lit = &clause[i];
            let dual = eval_dual(&lit.term, p, &dirs);
            let scale = match lit.rel {
                Rel::Eq => {
                    if dual.value < 0.0 {
                        -1.0
                    } else {
                        1.0
                    }
                }
                Rel::Le | Rel::Lt => {
                    if dual.value >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            for (g, d) in grad.iter_mut().zip(&dual.d) {
                let contribution = scale * d;
                if contribution.is_finite() {
                    *g += contribution;
                }
            }
        }
        grad
    }
}
