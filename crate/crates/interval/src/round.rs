//! Directed-rounding scalar primitives built from error-free transformations.
//!
//! The platform FPU stays in round-to-nearest; instead of switching rounding
//! modes we compute each operation's exact residual (TwoSum for addition, an
//! FMA for multiplication) and step the rounded result one float toward the
//! requested direction only when the residual shows it lies on the wrong side.
//! Exact operations therefore stay exact, which the rest of the crate relies
//! on: a point interval times a point interval is a point interval whenever
//! the product is representable.

/// Exact residual of `s = a + b` in round-to-nearest (Knuth's TwoSum).
///
/// Valid for any finite `a`, `b` with finite `s`; the returned value satisfies
/// `a + b = s + err` exactly.
#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bv = s - a;
    let av = s - bv;
    let br = b - bv;
    let ar = a - av;
    ar + br
}

/// Largest f64 less than or equal to the exact sum `a + b`.
///
/// `a` and `b` must not be NaN and must not be an (+inf, -inf) pair; interval
/// endpoints never are.
#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_infinite() {
        if s > 0.0 && a.is_finite() && b.is_finite() {
            // Rounded up to +inf from a finite sum: the exact sum exceeds MAX,
            // so MAX is the tightest finite lower bound.
            return f64::MAX;
        }
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        next_down(s)
    } else {
        s
    }
}

/// Smallest f64 greater than or equal to the exact sum `a + b`.
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_infinite() {
        if s < 0.0 && a.is_finite() && b.is_finite() {
            return -f64::MAX;
        }
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        next_up(s)
    } else {
        s
    }
}

/// Both directed roundings of the product `a * b`.
///
/// Returns `(down, up)` with `down <= a*b <= up`. The convention `0 * inf = 0`
/// is applied, matching the set-valued product when one factor is exactly the
/// point zero. The FMA residual is exact unless the product falls in the
/// subnormal range, where a zero residual is inconclusive and both directions
/// are widened.
#[inline]
pub fn mul_both(a: f64, b: f64) -> (f64, f64) {
    if a == 0.0 || b == 0.0 {
        return (0.0, 0.0);
    }
    let p = a * b;
    if p.is_infinite() {
        if a.is_finite() && b.is_finite() {
            // Overflowed: the exact product is finite-signed beyond MAX.
            return if p > 0.0 {
                (f64::MAX, f64::INFINITY)
            } else {
                (f64::NEG_INFINITY, -f64::MAX)
            };
        }
        return (p, p);
    }
    let r = a.mul_add(b, -p);
    if r > 0.0 {
        (p, next_up(p))
    } else if r < 0.0 {
        (next_down(p), p)
    } else if p.abs() < RESIDUAL_TRUST_FLOOR {
        // A zero residual may be an artifact of the FMA itself underflowing:
        // the true residual of a product with magnitude below 2^-968 can have
        // significant bits under the 2^-1074 absolute floor. Give up a float
        // on each side. (A nonzero residual always has the correct sign:
        // round-to-nearest never flips it.)
        (next_down(p), next_up(p))
    } else {
        (p, p)
    }
}

/// Below this magnitude a zero FMA residual is inconclusive: the lowest bit
/// of an exact 106-bit product of magnitude 2^e has weight 2^(e-105), which
/// falls below the 2^-1074 absolute floor once e < -969. The floor here is
/// 2^-968 = MIN_POSITIVE * 2^54, one bit of headroom over the worst case.
const RESIDUAL_TRUST_FLOOR: f64 = f64::MIN_POSITIVE * 1.8014398509481984e16; // * 2^54

/// Next representable float above `x` (identity at +inf).
#[inline]
pub fn next_up(x: f64) -> f64 {
    x.next_up()
}

/// Next representable float below `x` (identity at -inf).
#[inline]
pub fn next_down(x: f64) -> f64 {
    x.next_down()
}

/// Two floats down: bracket slop for library functions accurate to <2 ulp.
#[inline]
pub fn wide_down(x: f64) -> f64 {
    x.next_down().next_down()
}

/// Two floats up: bracket slop for library functions accurate to <2 ulp.
#[inline]
pub fn wide_up(x: f64) -> f64 {
    x.next_up().next_up()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sums_do_not_widen() {
        assert_eq!(add_down(0.25, 0.5), 0.75);
        assert_eq!(add_up(0.25, 0.5), 0.75);
        assert_eq!(add_down(1.0, -1.0), 0.0);
        assert_eq!(add_up(1.0, -1.0), 0.0);
    }

    #[test]
    fn inexact_sums_straddle() {
        // 0.1 + 0.2 rounds up in binary64, so the down value must be strictly
        // below the rounded sum.
        let s = 0.1 + 0.2;
        assert_eq!(add_up(0.1, 0.2), s);
        assert_eq!(add_down(0.1, 0.2), next_down(s));
        assert!(add_down(0.1, 0.2) < add_up(0.1, 0.2));
    }

    #[test]
    fn exact_products_do_not_widen() {
        let (d, u) = mul_both(1.5, 2.0);
        assert_eq!((d, u), (3.0, 3.0));
        let (d, u) = mul_both(-0.5, 0.5);
        assert_eq!((d, u), (-0.25, -0.25));
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(mul_both(0.0, f64::INFINITY), (0.0, 0.0));
        assert_eq!(mul_both(f64::NEG_INFINITY, 0.0), (0.0, 0.0));
    }

    #[test]
    fn overflow_keeps_a_finite_inner_bound() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        let (d, u) = mul_both(1e300, 1e300);
        assert_eq!(d, f64::MAX);
        assert_eq!(u, f64::INFINITY);
        let (d, u) = mul_both(1e300, -1e300);
        assert_eq!(d, f64::NEG_INFINITY);
        assert_eq!(u, -f64::MAX);
    }

    #[test]
    fn subnormal_products_are_widened() {
        let a = 1e-200;
        let b = 1e-140;
        let (d, u) = mul_both(a, b);
        assert!(d < u);
        assert!(d < a * b && a * b < u);
    }
}
