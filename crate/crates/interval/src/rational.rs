//! Exact conversion from arbitrary rationals to f64 interval enclosures.
//!
//! The enclosure is computed dyadically: find the binade of the value, take
//! the floor of the scaled mantissa with big-integer division, and widen by
//! one float exactly when the division had a remainder. Representable
//! rationals therefore convert to point intervals, which downstream exactness
//! checks (point evaluation of equations) depend on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::interval::Interval;
use crate::round::next_up;

/// Tightest f64 interval containing the rational `r`.
pub fn rational_to_interval(r: &BigRational) -> Interval {
    if r.is_zero() {
        return Interval::point(0.0);
    }
    if r.is_negative() {
        return rational_to_interval(&-r.clone()).neg();
    }
    // r > 0. Locate e with 2^e <= r < 2^(e+1), starting from bit lengths.
    let mut e = r.numer().bits() as i64 - r.denom().bits() as i64;
    while cmp_pow2(r, e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp_pow2(r, e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }
    if e > 1023 {
        return Interval::new(f64::MAX, f64::INFINITY);
    }
    // Mantissa scale: 52 fraction bits in the normal range, fixed grid below.
    let k = if e >= -1022 { e - 52 } else { -1074 };
    let (m, exact) = floor_scaled(r, k);
    let lo = scale2(m, k);
    if exact {
        Interval::point(lo)
    } else {
        Interval::new(lo, next_up(lo))
    }
}

/// Compares `r` (positive) against `2^e` exactly.
fn cmp_pow2(r: &BigRational, e: i64) -> std::cmp::Ordering {
    // p/q vs 2^e  <=>  p*2^max(-e,0) vs q*2^max(e,0)
    let mut lhs = r.numer().clone();
    let mut rhs = r.denom().clone();
    if e >= 0 {
        rhs <<= e as u64;
    } else {
        lhs <<= (-e) as u64;
    }
    lhs.cmp(&rhs)
}

/// Returns `(floor(r / 2^k), remainder == 0)` for positive `r`.
fn floor_scaled(r: &BigRational, k: i64) -> (u64, bool) {
    let mut num: BigInt = r.numer().clone();
    let mut den: BigInt = r.denom().clone();
    if k <= 0 {
        num <<= (-k) as u64;
    } else {
        den <<= k as u64;
    }
    // Both operands are positive, so truncating division is floor division.
    let q = &num / &den;
    let rem = num % den;
    let m = u64::try_from(&q).expect("scaled mantissa exceeds 53 bits");
    debug_assert!(m < (1u64 << 53));
    (m, rem.is_zero())
}

/// Exact product `m * 2^k` for mantissas produced by `floor_scaled`; the
/// result is representable by construction.
fn scale2(m: u64, k: i64) -> f64 {
    let mut x = m as f64;
    let mut k = k;
    while k > 0 {
        let c = k.min(512);
        x *= f64::powi(2.0, c as i32);
        k -= c;
    }
    while k < 0 {
        let c = (-k).min(512);
        x /= f64::powi(2.0, c as i32);
        k += c;
    }
    x
}
