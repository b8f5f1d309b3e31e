//! Forward-mode differentiation of terms.
//!
//! A [`Dual`] carries a value together with its partial derivatives along a
//! fixed list of directions (one per differentiated variable). Evaluating a
//! term on duals yields the value and the gradient row in a single pass over
//! the tree, which is exact up to floating-point rounding — no step-size
//! tuning as with finite differences.

use ntacert_formula::{Func, Term, VarId};
use num_traits::ToPrimitive;

/// Value plus derivatives along `d.len()` directions.
#[derive(Debug, Clone)]
pub struct Dual {
    pub value: f64,
    pub d: Vec<f64>,
}

impl Dual {
    fn constant(value: f64, n: usize) -> Dual {
        Dual {
            value,
            d: vec![0.0; n],
        }
    }

    fn binary(a: &Dual, b: &Dual, value: f64, da: f64, db: f64) -> Dual {
        let d = a
            .d
            .iter()
            .zip(&b.d)
            .map(|(x, y)| da * x + db * y)
            .collect();
        Dual { value, d }
    }

    fn chain(a: &Dual, value: f64, derivative: f64) -> Dual {
        Dual {
            value,
            d: a.d.iter().map(|x| derivative * x).collect(),
        }
    }
}

/// Evaluates `term` at the point `vals` (indexed by `VarId`), differentiating
/// with respect to the variables listed in `dirs`; direction `j` is the
/// variable `dirs[j]`.
pub fn eval_dual(term: &Term, vals: &[f64], dirs: &[VarId]) -> Dual {
    let n = dirs.len();
    match term {
        Term::Var(v) => {
            let mut d = vec![0.0; n];
            if let Some(j) = dirs.iter().position(|w| w == v) {
                d[j] = 1.0;
            }
            Dual {
                value: vals[v.0],
                d,
            }
        }
        Term::Const(c) => Dual::constant(c.to_f64().unwrap_or(f64::NAN), n),
        Term::Add(a, b) => {
            let (a, b) = (eval_dual(a, vals, dirs), eval_dual(b, vals, dirs));
            Dual::binary(&a, &b, a.value + b.value, 1.0, 1.0)
        }
        Term::Mul(a, b) => {
            let (a, b) = (eval_dual(a, vals, dirs), eval_dual(b, vals, dirs));
            Dual::binary(&a, &b, a.value * b.value, b.value, a.value)
        }
        Term::Neg(a) => {
            let a = eval_dual(a, vals, dirs);
            Dual::chain(&a, -a.value, -1.0)
        }
        Term::App(f, a) => {
            let a = eval_dual(a, vals, dirs);
            let (value, derivative) = match f {
                Func::Sin => (a.value.sin(), a.value.cos()),
                Func::Cos => (a.value.cos(), -a.value.sin()),
                Func::Tan => {
                    let t = a.value.tan();
                    (t, 1.0 + t * t)
                }
                Func::Exp => {
                    let e = a.value.exp();
                    (e, e)
                }
            };
            Dual::chain(&a, value, derivative)
        }
    }
}

/// Plain evaluation at a point, without derivatives.
pub fn eval_f64(term: &Term, vals: &[f64]) -> f64 {
    match term {
        Term::Var(v) => vals[v.0],
        Term::Const(c) => c.to_f64().unwrap_or(f64::NAN),
        Term::Add(a, b) => eval_f64(a, vals) + eval_f64(b, vals),
        Term::Mul(a, b) => eval_f64(a, vals) * eval_f64(b, vals),
        Term::Neg(a) => -eval_f64(a, vals),
        Term::App(f, a) => {
            let x = eval_f64(a, vals);
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
            }
        }
    }
}
