//! Interval evaluation of terms over a box.

use ntacert_formula::{Func, Term, VarId};
use thiserror::Error;

use crate::boxes::NamedBox;
use crate::interval::Interval;
use crate::rational::rational_to_interval;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable {0:?} is not bound by the box")]
    UnboundVar(VarId),
}

/// Evaluates `t` over `bx`, returning an interval containing the exact range
/// of the term on the box. Every variable of the term must be bound.
pub fn eval_term(t: &Term, bx: &NamedBox) -> Result<Interval, EvalError> {
    match t {
        Term::Var(v) => bx.get(*v).ok_or(EvalError::UnboundVar(*v)),
        Term::Const(r) => Ok(rational_to_interval(r)),
        Term::Add(a, b) => Ok(eval_term(a, bx)?.add(eval_term(b, bx)?)),
        Term::Mul(a, b) => Ok(eval_term(a, bx)?.mul(eval_term(b, bx)?)),
        Term::Neg(a) => Ok(eval_term(a, bx)?.neg()),
        Term::App(f, a) => {
            let inner = eval_term(a, bx)?;
            Ok(match f {
                Func::Sin => inner.sin(),
                Func::Cos => inner.cos(),
                Func::Tan => inner.tan(),
                Func::Exp => inner.exp(),
            })
        }
    }
}

/// Evaluates `t` at a single floating-point assignment, exactly: the point is
/// lifted to a degenerate box. Exact operations keep point intervals thin, so
/// `eval_point(t, ..).is_point()` means the term value was computed without
/// any rounding at all.
pub fn eval_point(t: &Term, vars: &[VarId], point: &[f64]) -> Result<Interval, EvalError> {
    let bx = NamedBox::new(
        vars.iter()
            .zip(point)
            .map(|(&v, &p)| (v, Interval::point(p)))
            .collect(),
    );
    eval_term(t, &bx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ntacert_formula::Term;

    fn x() -> Term {
        Term::var(0)
    }
    fn y() -> Term {
        Term::var(1)
    }

    #[test]
    fn polynomial_over_box() {
        // x*x - y over x in [-2, 1], y in [0, 1]: range [-1, 4].
        let t = Term::sub(Term::mul(x(), x()), y());
        let bx = NamedBox::new(vec![
            (VarId(0), Interval::new(-2.0, 1.0)),
            (VarId(1), Interval::new(0.0, 1.0)),
        ]);
        let iv = eval_term(&t, &bx).unwrap();
        // Naive interval multiplication gives x*x in [-2, 4]; the result must
        // at least contain the true range and stay within the naive one.
        assert!(iv.lo() <= -1.0 && iv.hi() >= 4.0);
        assert!(iv.lo() >= -3.0 && iv.hi() <= 4.0);
    }

    #[test]
    fn unbound_variable_is_reported() {
        let t = Term::add(x(), y());
        let bx = NamedBox::new(vec![(VarId(0), Interval::new(0.0, 1.0))]);
        assert_eq!(eval_term(&t, &bx), Err(EvalError::UnboundVar(VarId(1))));
    }

    #[test]
    fn exact_point_evaluation_stays_thin() {
        // 2*x + y at (0.25, 0.5): all operations exact in binary64.
        let t = Term::add(Term::mul(Term::int(2), x()), y());
        let iv = eval_point(&t, &[VarId(0), VarId(1)], &[0.25, 0.5]).unwrap();
        assert!(iv.is_point());
        assert_eq!(iv.lo(), 1.0);
    }

    #[test]
    fn certificate_example_inequalities_verify() {
        // Inequality sides from a worked certificate: over the box
        // x in [-0.1, 0.05], y in [1.4, 1.9], z pinned to 0.2,
        // both x - y - cos(z) and sin(z) - x - y evaluate strictly negative.
        let z2 = 0.2f64;
        let bx = NamedBox::new(vec![
            (VarId(0), Interval::new(-0.1, 0.05)),
            (VarId(1), Interval::new(1.4, 1.9)),
            (VarId(2), Interval::point(z2)),
        ]);
        let g1 = Term::sub(
            Term::sub(x(), y()),
            Term::App(Func::Cos, Box::new(Term::var(2))),
        );
        let g2 = Term::sub(
            Term::App(Func::Sin, Box::new(Term::var(2))),
            Term::add(x(), y()),
        );
        let i1 = eval_term(&g1, &bx).unwrap();
        let i2 = eval_term(&g2, &bx).unwrap();
        assert!(i1.hi() < 0.0, "x - y - cos z not verified: {i1:?}");
        assert!(i2.hi() < 0.0, "sin z - x - y not verified: {i2:?}");
    }

    #[test]
    fn certificate_example_equation_signs_on_faces() {
        // Equation sides on the x-faces of the same box:
        // sin(y) - exp(x) is positive on the lower face, negative on the
        // upper face.
        let f1 = Term::sub(
            Term::App(Func::Sin, Box::new(y())),
            Term::App(Func::Exp, Box::new(x())),
        );
        let y_iv = Interval::new(1.4, 1.9);
        let lo_face = NamedBox::new(vec![
            (VarId(0), Interval::point(-0.1)),
            (VarId(1), y_iv),
        ]);
        let hi_face = NamedBox::new(vec![
            (VarId(0), Interval::point(0.05)),
            (VarId(1), y_iv),
        ]);
        assert!(eval_term(&f1, &lo_face).unwrap().lo() > 0.0);
        assert!(eval_term(&f1, &hi_face).unwrap().hi() < 0.0);
    }
}
