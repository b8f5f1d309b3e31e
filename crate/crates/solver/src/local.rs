//! Local descent: gradient steps with a backtracking (Armijo) line search.

use crate::objective::Objective;

/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Outer iteration cap for one descent run.
pub const MAX_DESCENT_STEPS: usize = 500;
/// Stop when the accepted step is shorter than this (∞-norm).
const MIN_STEP: f64 = 1e-12;
/// Stop when the gradient ∞-norm falls below this.
const MIN_GRAD: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DescentResult {
    pub point: Vec<f64>,
    pub value: f64,
    /// Outer gradient steps consumed (for the caller's budget accounting).
    pub steps: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs at most `max_steps` gradient steps from `start`, halving the step
/// until the Armijo condition `H(x - αg) ≤ H(x) - c·α·‖g‖²` holds. Never
/// moves to a worse point, so the returned value is ≤ the start value.
pub fn descend(obj: &Objective, start: &[f64], max_steps: usize) -> DescentResult {
    let mut x = start.to_vec();
    let mut fx = obj.eval(&x);
    let mut steps = 0;
    if !fx.is_finite() {
        // Started inside a pole/overflow region; there is no usable slope.
        return DescentResult {
            point: x,
            value: fx,
            steps,
        };
    }
    while steps < max_steps {
        let g = obj.gradient(&x);
        let gnorm = inf_norm(&g);
        if gnorm < MIN_GRAD {
            break;
        }
        let g_sq: f64 = g.iter().map(|v| v * v).sum();
        let mut alpha = 1.0;
        let mut moved = false;
        loop {
            if alpha * gnorm < MIN_STEP {
                break;
            }
            let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
            let fy = obj.eval(&y);
            if fy <= fx - ARMIJO_C * alpha * g_sq {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        steps += 1;
        if !moved {
            break;
        }
    }
    DescentResult {
        point: x,
        value: fx,
        steps: steps.max(1),
    }
}
