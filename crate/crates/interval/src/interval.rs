//! Closed f64 intervals with outward-rounded arithmetic.
//!
//! Invariants: no NaN endpoint, `lo <= hi`, `lo < +inf`, `hi > -inf`. Every
//! operation returns an interval containing the exact image of its arguments;
//! operations whose float result is exact do not widen.

use crate::round::{add_down, add_up, mul_both, next_up, wide_down, wide_up};

/// Inputs with magnitude beyond this are not argument-reduced for the
/// trigonometric enclosures; the full range of the function is returned
/// instead. At 2^50 the slack in locating period multiples is still far
/// below one.
const TRIG_ARG_LIMIT: f64 = 1e15;

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl std::fmt::Debug for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl Interval {
    /// Builds an interval, panicking if the endpoints violate the invariants.
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        assert!(
            lo < f64::INFINITY && hi > f64::NEG_INFINITY,
            "interval degenerate at infinity"
        );
        Interval { lo, hi }
    }

    /// Degenerate interval holding a single finite value.
    pub fn point(v: f64) -> Interval {
        assert!(v.is_finite(), "point interval at non-finite value");
        Interval { lo: v, hi: v }
    }

    /// The whole real line.
    pub fn entire() -> Interval {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Width `hi - lo`, rounded up; +inf for unbounded intervals.
    pub fn width(&self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    /// Outward midpoint: a finite value inside the interval usable as a
    /// bisection point. Falls back to clamped endpoints for unbounded sides.
    pub fn midpoint(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * (self.lo + self.hi);
        if m.is_finite() && m >= self.lo && m <= self.hi {
            return m;
        }
        // Over/underflow or an unbounded side.
        let lo = self.lo.max(-f64::MAX);
        let hi = self.hi.min(f64::MAX);
        let m = 0.5 * lo + 0.5 * hi;
        m.clamp(lo, hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Smallest interval containing both arguments.
    pub fn hull(a: Interval, b: Interval) -> Interval {
        Interval {
            lo: a.lo.min(b.lo),
            hi: a.hi.max(b.hi),
        }
    }

    /// Distance of the interval from zero: `lo` if entirely positive, `-hi`
    /// if entirely negative, and 0.0 if zero is inside. Used to pick the
    /// component with the most robust sign.
    pub fn margin_from_zero(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    pub fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }

    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn sub(self, rhs: Interval) -> Interval {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Interval) -> Interval {
        let (d1, u1) = mul_both(self.lo, rhs.lo);
        let (d2, u2) = mul_both(self.lo, rhs.hi);
        let (d3, u3) = mul_both(self.hi, rhs.lo);
        let (d4, u4) = mul_both(self.hi, rhs.hi);
        Interval {
            lo: d1.min(d2).min(d3).min(d4),
            hi: u1.max(u2).max(u3).max(u4),
        }
    }

    /// Enclosure of the exponential. Exact at zero; monotone otherwise, with
    /// two-ulp slop on each rounded endpoint and a clamp to nonnegative.
    pub fn exp(self) -> Interval {
        let lo = if self.lo == 0.0 {
            1.0
        } else if self.lo == f64::NEG_INFINITY {
            0.0
        } else {
            let e = self.lo.exp();
            if e.is_finite() {
                wide_down(e).max(0.0)
            } else {
                // Overflowed: the exact value is finite beyond MAX.
                f64::MAX
            }
        };
        let hi = if self.hi == 0.0 {
            1.0
        } else if self.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            let e = self.hi.exp();
            if e.is_finite() {
                wide_up(e)
            } else {
                f64::INFINITY
            }
        };
        Interval { lo, hi }
    }

    /// Enclosure of the sine. Exact at the point zero.
    pub fn sin(self) -> Interval {
        if self.lo == 0.0 && self.hi == 0.0 {
            return Interval::point(0.0);
        }
        if !self.is_trig_reducible() || self.width() >= two_pi().lo {
            return Interval::new(-1.0, 1.0);
        }
        let (slo_d, slo_u) = sin_point(self.lo);
        let (shi_d, shi_u) = sin_point(self.hi);
        let mut lo = slo_d.min(shi_d);
        let mut hi = slo_u.max(shi_u);
        // Maxima of sine at pi/2 + 2k*pi, minima at -pi/2 + 2k*pi.
        if contains_period_point(self, half_pi(), two_pi()) {
            hi = 1.0;
        }
        if contains_period_point(self, half_pi().neg(), two_pi()) {
            lo = -1.0;
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }

    /// Enclosure of the cosine. Exact at the point zero.
    pub fn cos(self) -> Interval {
        if self.lo == 0.0 && self.hi == 0.0 {
            return Interval::point(1.0);
        }
        if !self.is_trig_reducible() || self.width() >= two_pi().lo {
            return Interval::new(-1.0, 1.0);
        }
        let (clo_d, clo_u) = cos_point(self.lo);
        let (chi_d, chi_u) = cos_point(self.hi);
        let mut lo = clo_d.min(chi_d);
        let mut hi = clo_u.max(chi_u);
        // Maxima of cosine at 2k*pi, minima at pi + 2k*pi.
        if contains_period_point(self, Interval::point(0.0), two_pi()) {
            hi = 1.0;
        }
        if contains_period_point(self, pi(), two_pi()) {
            lo = -1.0;
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }

    /// Enclosure of the tangent. Exact at the point zero; the whole line as
    /// soon as a pole cannot be excluded.
    pub fn tan(self) -> Interval {
        if self.lo == 0.0 && self.hi == 0.0 {
            return Interval::point(0.0);
        }
        if !self.is_trig_reducible() || self.width() >= pi().lo {
            return Interval::entire();
        }
        // Poles at pi/2 + k*pi.
        if contains_period_point(self, half_pi(), pi()) {
            return Interval::entire();
        }
        let lo = if self.lo == 0.0 {
            0.0
        } else {
            wide_down(self.lo.tan())
        };
        let hi = if self.hi == 0.0 {
            0.0
        } else {
            wide_up(self.hi.tan())
        };
        Interval::new(lo, hi)
    }

    fn is_trig_reducible(&self) -> bool {
        self.lo.is_finite()
            && self.hi.is_finite()
            && self.lo.abs() <= TRIG_ARG_LIMIT
            && self.hi.abs() <= TRIG_ARG_LIMIT
    }
}

/// Tight enclosure of pi: the f64 nearest to pi is below the true value, so
/// one float up bounds it.
pub fn pi() -> Interval {
    Interval {
        lo: std::f64::consts::PI,
        hi: next_up(std::f64::consts::PI),
    }
}

/// Tight enclosure of pi/2 (exact halving of the pi enclosure).
pub fn half_pi() -> Interval {
    let p = pi();
    Interval {
        lo: 0.5 * p.lo,
        hi: 0.5 * p.hi,
    }
}

/// Tight enclosure of 2*pi (exact doubling of the pi enclosure).
pub fn two_pi() -> Interval {
    let p = pi();
    Interval {
        lo: 2.0 * p.lo,
        hi: 2.0 * p.hi,
    }
}

/// Two-ulp bracket of the library sine at a finite point.
fn sin_point(v: f64) -> (f64, f64) {
    if v == 0.0 {
        return (0.0, 0.0);
    }
    let s = v.sin();
    (wide_down(s).max(-1.0), wide_up(s).min(1.0))
}

/// Two-ulp bracket of the library cosine at a finite point.
fn cos_point(v: f64) -> (f64, f64) {
    if v == 0.0 {
        return (1.0, 1.0);
    }
    let c = v.cos();
    (wide_down(c).max(-1.0), wide_up(c).min(1.0))
}

/// Conservative test for whether `x` may contain a point `offset + k*period`
/// for some integer `k`. Only called with `x` finite, `|x| <= TRIG_ARG_LIMIT`
/// and `width(x) < period`, so at most one such point can lie inside and a
/// float estimate of `k` is off by well under one; five candidates around it
/// cover every case. Each candidate is verified with interval arithmetic, so
/// a `true` answer may be spurious (harmless: the enclosure only widens) but
/// a `false` answer is certain.
fn contains_period_point(x: Interval, offset: Interval, period: Interval) -> bool {
    let mid = 0.5 * (x.lo + x.hi);
    let kg = ((mid - offset.lo) / period.lo).round();
    for dk in -2i32..=2 {
        let k = kg + f64::from(dk);
        let candidate = offset.add(period.mul(Interval::point(k)));
        if candidate.lo <= x.hi && candidate.hi >= x.lo {
            return true;
        }
    }
    false
}
