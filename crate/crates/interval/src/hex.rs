//! C99 hexadecimal float literals as the lossless f64 wire format.
//!
//! Writing always produces the canonical form `±0x1.<13 hex digits>p±e` for
//! normal numbers, `±0x0.<13 hex digits>p-1022` for subnormals, and
//! `inf`/`-inf` for infinities. Parsing accepts general C99 literals and
//! fails unless the value is exactly representable as an f64, so a
//! certificate can never silently shift an endpoint.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HexFloatError {
    #[error("malformed hexadecimal float literal {0:?}")]
    Syntax(String),
    #[error("literal has too many significant digits: {0:?}")]
    TooManyDigits(String),
    #[error("exponent out of range in {0:?}")]
    ExponentOutOfRange(String),
    #[error("value {0:?} is not exactly representable as a binary64 float")]
    NotRepresentable(String),
}

/// Renders a non-NaN f64 losslessly.
pub fn f64_to_hex(v: f64) -> String {
    assert!(!v.is_nan(), "NaN has no certificate encoding");
    if v == f64::INFINITY {
        return "inf".to_string();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        if mant == 0 {
            format!("{sign}0x0.0000000000000p+0")
        } else {
            format!("{sign}0x0.{mant:013x}p-1022")
        }
    } else {
        format!("{sign}0x1.{mant:013x}p{:+}", biased - 1023)
    }
}

/// Parses a C99 hexadecimal float literal (or `inf`/`-inf`) into the f64 it
/// denotes exactly, rejecting values that are not representable.
pub fn f64_from_hex(s: &str) -> Result<f64, HexFloatError> {
    let syntax = || HexFloatError::Syntax(s.to_string());
    match s {
        "inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let mut rest = s;
    let negative = if let Some(r) = rest.strip_prefix('-') {
        rest = r;
        true
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
        false
    } else {
        false
    };
    rest = rest
        .strip_prefix("0x")
        .or_else(|| rest.strip_prefix("0X"))
        .ok_or_else(syntax)?;
    let p_pos = rest.find(['p', 'P']).ok_or_else(syntax)?;
    let (mant_str, exp_str) = (&rest[..p_pos], &rest[p_pos + 1..]);
    let exp: i64 = {
        let body = exp_str.strip_prefix('+').unwrap_or(exp_str);
        if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '-') {
            return Err(syntax());
        }
        body.parse().map_err(|_| syntax())?
    };
    if exp.abs() > 1_000_000 {
        return Err(HexFloatError::ExponentOutOfRange(s.to_string()));
    }
    let (int_str, frac_str) = match mant_str.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant_str, ""),
    };
    if int_str.is_empty() && frac_str.is_empty() {
        return Err(syntax());
    }
    if !int_str.chars().all(|c| c.is_ascii_hexdigit())
        || !frac_str.chars().all(|c| c.is_ascii_hexdigit())
    {
        return Err(syntax());
    }
    // Accumulate the significand as an integer; 28 hex digits fit in u128
    // with room to spare and far exceed the 14 digits an f64 needs.
    let digits: String = format!("{int_str}{frac_str}");
    let trimmed = digits.trim_start_matches('0');
    if trimmed.len() > 28 {
        return Err(HexFloatError::TooManyDigits(s.to_string()));
    }
    let m: u128 = if trimmed.is_empty() {
        0
    } else {
        u128::from_str_radix(trimmed, 16).map_err(|_| syntax())?
    };
    let k = exp - 4 * frac_str.len() as i64;
    let v = assemble(m, k).ok_or_else(|| HexFloatError::NotRepresentable(s.to_string()))?;
    Ok(if negative { -v } else { v })
}

/// Builds `m * 2^k` exactly, or None when that value is not an f64.
fn assemble(m: u128, k: i64) -> Option<f64> {
    if m == 0 {
        return Some(0.0);
    }
    // Normalize to an odd significand.
    let tz = m.trailing_zeros();
    let m = m >> tz;
    let k = k + i64::from(tz);
    if m >> 53 != 0 {
        return None;
    }
    // Representable iff the odd significand fits the f64 grid at this scale:
    // normal numbers allow 53 bits, subnormals fewer. Cheapest exact check:
    // scale in power-of-two steps (each exact when the result is
    // representable) and verify by decomposing the result back.
    let mut x = m as f64; // m < 2^53: exact
    let mut k = k;
    while k > 0 {
        let c = k.min(512);
        x *= f64::powi(2.0, c as i32);
        if x.is_infinite() {
            return None;
        }
        k -= c;
    }
    while k < 0 {
        let c = (-k).min(512);
        x /= f64::powi(2.0, c as i32);
        k += c;
    }
    let (rm, _) = decompose_odd(x)?;
    if u128::from(rm) == m {
        Some(x)
    } else {
        None
    }
}

/// Odd-significand decomposition `x = m * 2^k`, for positive finite `x`.
fn decompose_odd(x: f64) -> Option<(u64, i64)> {
    if x == 0.0 || !x.is_finite() {
        return None;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1023 - 52)
    };
    let tz = mant.trailing_zeros();
    Some((mant >> tz, exp + i64::from(tz)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(f64_to_hex(1.0), "0x1.0000000000000p+0");
        assert_eq!(f64_to_hex(-1.5), "-0x1.8000000000000p+0");
        assert_eq!(f64_to_hex(0.0), "0x0.0000000000000p+0");
        assert_eq!(f64_to_hex(-0.0), "-0x0.0000000000000p+0");
        assert_eq!(f64_to_hex(f64::INFINITY), "inf");
        assert_eq!(f64_to_hex(f64::NEG_INFINITY), "-inf");
        assert_eq!(f64_from_hex("0x1.921fb54442d18p+1"), Ok(std::f64::consts::PI));
        assert_eq!(f64_to_hex(std::f64::consts::PI), "0x1.921fb54442d18p+1");
    }

    #[test]
    fn round_trip_specials() {
        for v in [
            0.0,
            -0.0,
            1.0,
            -1.0,
            0.5,
            f64::MAX,
            f64::MIN_POSITIVE,
            f64::from_bits(1),           // smallest subnormal
            f64::from_bits(0xfffffffff), // a subnormal with structure
            std::f64::consts::PI,
            -2.2250738585072014e-308,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ] {
            let s = f64_to_hex(v);
            let back = f64_from_hex(&s).unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn c99_variants_parse() {
        assert_eq!(f64_from_hex("0x1p+1"), Ok(2.0));
        assert_eq!(f64_from_hex("0x1p1"), Ok(2.0));
        assert_eq!(f64_from_hex("0X1.8P0"), Ok(1.5));
        assert_eq!(f64_from_hex("0x.8p1"), Ok(1.0));
        assert_eq!(f64_from_hex("0x10p-4"), Ok(1.0));
        assert_eq!(f64_from_hex("+0x1p0"), Ok(1.0));
        assert_eq!(f64_from_hex("-0x0.0p+0"), Ok(-0.0));
        assert_eq!(f64_from_hex("-0x0.0p+0").map(f64::to_bits), Ok((-0.0f64).to_bits()));
    }

    #[test]
    fn inexact_literals_are_rejected()
    {
        // 53 significant bits plus one more.
        assert_eq!(
            f64_from_hex("0x1.00000000000008p+0"),
            Err(HexFloatError::NotRepresentable(
                "0x1.00000000000008p+0".to_string()
            ))
        );
        // Subnormal with too much precision: 2^-1074 + 2^-1075 not representable.
        assert!(f64_from_hex("0x1.8p-1074").is_err());
        // Overflow.
        assert!(f64_from_hex("0x1p+1024").is_err());
        // Underflow to zero.
        assert!(f64_from_hex("0x1p-1075").is_err());
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "1.5", "0x", "0xp3", "0x1.2", "0x1.2pz", "0x1.2p", "nan", "0xg.0p0"] {
            assert!(matches!(f64_from_hex(bad), Err(HexFloatError::Syntax(_))), "{bad}");
        }
    }

    #[test]
    fn exponent_bounds() {
        assert_eq!(
            f64_from_hex("0x1p+2000000"),
            Err(HexFloatError::ExponentOutOfRange("0x1p+2000000".to_string()))
        );
    }
}
