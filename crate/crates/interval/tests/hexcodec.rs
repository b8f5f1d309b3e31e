//! Round-trip property of the hexadecimal f64 codec.

use ntacert_interval::{f64_from_hex, f64_to_hex};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn every_non_nan_bit_pattern_round_trips(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(!v.is_nan());
        let s = f64_to_hex(v);
        let back = f64_from_hex(&s).unwrap();
        // Bitwise identity, including the sign of zero.
        prop_assert_eq!(back.to_bits(), v.to_bits(), "{}", s);
    }

    #[test]
    fn parsing_never_accepts_a_shifted_value(
        mant in 0u64..(1u64 << 53),
        extra_bit in 54u32..70,
        exp in -900i32..900,
    ) {
        // A mantissa with a set bit beyond the 53-bit grid at this scale is
        // not representable and must be rejected, never rounded.
        let wide = u128::from(mant) | (1u128 << extra_bit);
        let s = format!("0x{wide:x}p{exp}");
        match f64_from_hex(&s) {
            Ok(v) => {
                // Accepted: must denote the exact value (possible when the
                // low bits were zero so the odd part still fits 53 bits).
                let odd = wide >> wide.trailing_zeros();
                prop_assert!(odd < (1u128 << 53));
                prop_assert!(v.is_finite());
            }
            Err(_) => {}
        }
    }
}
