//! Deterministic fixed-point evaluation of `log2` and rational powers.
//!
//! The multiplier computations need logarithms, but the algorithm itself only
//! needs *some* frozen rational value; it never needs exact transcendentals.
//! Everything here is integer arithmetic with truncation toward zero, so the
//! results are bit-identical on every platform. Outputs carry 20 fractional
//! bits (denominator 2^20); internally 48 guard bits keep the accumulated
//! truncation error below 2^-27, well inside the documented 2^-18 envelope.

use crate::rat::{self, Rat};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Fractional bits of all public results.
pub const FRAC_BITS: u32 = 20;
/// Denominator of all public results.
pub const SCALE: i64 = 1 << FRAC_BITS;

const GUARD_BITS: u32 = 48;
const GUARD_ONE: u128 = 1 << GUARD_BITS;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixpointError {
    #[error("log2 argument must be >= 2, got {0}")]
    LogArgTooSmall(u128),
    #[error("log2 argument must be >= 1")]
    LogArgBelowOne,
    #[error("power exponent must be >= 0")]
    NegativeExponent,
}

/// A `log2` value as an integer numerator over `2^20`.
///
/// `value / 2^20` is within `2^-18` of the true logarithm (the actual bound
/// is tighter; see the module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointLog {
    pub value: i64,
}

impl FixedPointLog {
    pub fn to_rational(self) -> Rat {
        rat::frac(self.value, SCALE)
    }
}

/// Square-and-compare bit extraction on a mantissa in `[2^G, 2^(G+1))`.
///
/// Returns the 20 fractional bits of `log2(m / 2^G)`.
fn frac_bits_of_mantissa(mut m: u128) -> u64 {
    debug_assert!((GUARD_ONE..2 * GUARD_ONE).contains(&m));
    let mut frac = 0u64;
    for _ in 0..FRAC_BITS {
        m = (m * m) >> GUARD_BITS;
        frac <<= 1;
        if m >= 2 * GUARD_ONE {
            m >>= 1;
            frac |= 1;
        }
    }
    frac
}

/// `log2` of an integer `x >= 2`, truncated to 20 fractional bits.
///
/// Exact for powers of two.
pub fn fixlog2(x: u128) -> Result<FixedPointLog, FixpointError> {
    if x < 2 {
        return Err(FixpointError::LogArgTooSmall(x));
    }
    let e = 127 - x.leading_zeros();
    // Normalize x / 2^e into [1, 2) with GUARD_BITS fractional bits.
    let m = if e >= GUARD_BITS {
        x >> (e - GUARD_BITS)
    } else {
        x << (GUARD_BITS - e)
    };
    let frac = frac_bits_of_mantissa(m);
    Ok(FixedPointLog {
        value: ((e as i64) << FRAC_BITS) | frac as i64,
    })
}

/// `log2` of a rational `r >= 1`, truncated to 20 fractional bits.
pub fn fixlog2_rat(r: &Rat) -> Result<FixedPointLog, FixpointError> {
    if *r < rat::int(1) {
        return Err(FixpointError::LogArgBelowOne);
    }
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    // e = floor(log2(num/den)): num/den >= 2^e  iff  num >= den << e.
    let mut e = (num.bits() as i64 - den.bits() as i64).max(0) as u32;
    if e > 0 && num < (den.clone() << e) {
        e -= 1;
    }
    let mantissa: BigUint = (num << GUARD_BITS) / (den << e);
    let m = mantissa.to_u128().expect("mantissa fits 128 bits");
    let frac = frac_bits_of_mantissa(m);
    Ok(FixedPointLog {
        value: ((e as i64) << FRAC_BITS) | frac as i64,
    })
}

/// Floor integer square root.
fn isqrt(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = 1u128 << (v.ilog2() / 2 + 1);
    loop {
        let next = (x + v / x) / 2;
        if next >= x {
            return x;
        }
        x = next;
    }
}

/// `chain[i] = 2^(2^-i)` scaled by `2^GUARD_BITS`, for `i` in `1..=FRAC_BITS`.
fn sqrt_chain() -> &'static [u128; FRAC_BITS as usize + 1] {
    static CHAIN: OnceLock<[u128; FRAC_BITS as usize + 1]> = OnceLock::new();
    CHAIN.get_or_init(|| {
        let mut chain = [0u128; FRAC_BITS as usize + 1];
        chain[0] = 2 * GUARD_ONE;
        for i in 1..=FRAC_BITS as usize {
            chain[i] = isqrt(chain[i - 1] << GUARD_BITS);
        }
        chain
    })
}

/// `2^(u / 2^20)` for `u` in `[0, 2^20)`, scaled by `2^GUARD_BITS`.
fn exp2_frac(u: u64) -> u128 {
    debug_assert!(u < 1 << FRAC_BITS);
    let chain = sqrt_chain();
    let mut r = GUARD_ONE;
    for i in 1..=FRAC_BITS {
        if u >> (FRAC_BITS - i) & 1 == 1 {
            r = (r * chain[i as usize]) >> GUARD_BITS;
        }
    }
    r
}

/// `x^exponent` for rational `x >= 1` and rational `exponent >= 0`,
/// via fixed-point `2^(exponent * log2 x)`, truncated to 20 fractional bits.
pub fn pow_fixed(x: &Rat, exponent: &Rat) -> Result<Rat, FixpointError> {
    if exponent.is_negative() {
        return Err(FixpointError::NegativeExponent);
    }
    if exponent.is_zero() || *x == rat::int(1) {
        return Ok(rat::int(1));
    }
    let t = exponent * fixlog2_rat(x)?.to_rational();
    let whole: BigInt = t.floor().to_integer();
    let fr = &t - Rat::from_integer(whole.clone());
    let u = (&fr * rat::int(1i64 << FRAC_BITS)).floor().to_integer();
    let r = exp2_frac(u.to_u64().expect("fraction fits"));
    // floor(r * 2^whole * 2^FRAC_BITS / 2^GUARD_BITS), then re-scale.
    let k = whole.to_u32().expect("exponent magnitude in range");
    let numer: BigUint = (BigUint::from(r) << (k + FRAC_BITS)) >> GUARD_BITS;
    Ok(Rat::new(
        BigInt::from(numer),
        BigInt::one() << FRAC_BITS as usize,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use proptest::prelude::*;

    fn as_f64(l: FixedPointLog) -> f64 {
        l.value as f64 / SCALE as f64
    }

    #[test]
    fn powers_of_two_are_exact() {
        assert_eq!(fixlog2(2).unwrap().to_rational(), rat::int(1));
        assert_eq!(fixlog2(4).unwrap().to_rational(), rat::int(2));
        assert_eq!(fixlog2(1 << 16).unwrap().to_rational(), rat::int(16));
        assert_eq!(
            fixlog2(1u128 << 64).unwrap().to_rational(),
            rat::int(64)
        );
    }

    #[test]
    fn log2_of_three_brackets_oracle() {
        // Independent oracle: f64 log2(3) = 1.5849625007...
        let v = as_f64(fixlog2(3).unwrap());
        assert!(v >= 1.584 && v <= 1.586, "log2(3) approx {v}");
    }

    #[test]
    fn rejects_small_arguments() {
        assert!(fixlog2(0).is_err());
        assert!(fixlog2(1).is_err());
        assert!(fixlog2_rat(&rat::frac(1, 2)).is_err());
    }

    #[test]
    fn rational_log_matches_integer_log() {
        for x in [2u128, 3, 7, 100, 65536] {
            assert_eq!(
                fixlog2(x).unwrap(),
                fixlog2_rat(&rat::int(x as i64)).unwrap()
            );
        }
        // log2(3/2) = 0.5849625...
        let v = as_f64(fixlog2_rat(&rat::frac(3, 2)).unwrap());
        assert!((v - 0.5849625f64).abs() < 1e-5);
    }

    #[test]
    fn pow_exact_cases() {
        // 4^(1/2) = 2 exactly along the fixed-point path.
        assert_eq!(
            pow_fixed(&rat::int(4), &rat::frac(1, 2)).unwrap(),
            rat::int(2)
        );
        assert_eq!(pow_fixed(&rat::int(9), &rat::zero()).unwrap(), rat::int(1));
        assert_eq!(pow_fixed(&rat::int(1), &rat::frac(7, 3)).unwrap(), rat::int(1));
        assert_eq!(
            pow_fixed(&rat::int(256), &rat::frac(1, 4)).unwrap(),
            rat::int(4)
        );
    }

    #[test]
    fn pow_against_f64_oracle() {
        // sqrt(32/3) = 3.2659863...
        let v = pow_fixed(&rat::frac(32, 3), &rat::frac(1, 2)).unwrap();
        let f = rat::to_f64(&v);
        assert!((f - (32f64 / 3.0).sqrt()).abs() < 1e-4, "got {f}");
        // (10)^(2/3) = 4.6415888...
        let v = pow_fixed(&rat::int(10), &rat::frac(2, 3)).unwrap();
        let f = rat::to_f64(&v);
        assert!((f - 10f64.powf(2.0 / 3.0)).abs() < 1e-4, "got {f}");
    }

    proptest! {
        // The documented envelope: |value/2^20 - log2 x| < 2^-18 for x >= 2.
        #[test]
        fn fixlog_accuracy(x in 2u128..=(1 << 40)) {
            let approx = as_f64(fixlog2(x).unwrap());
            let truth = (x as f64).log2();
            prop_assert!((approx - truth).abs() < 2f64.powi(-18));
            // Truncation never overshoots.
            prop_assert!(approx <= truth + 2f64.powi(-30));
        }

        #[test]
        fn fixpow_accuracy(p in 2u64..5000, q in 1u64..50, num in 1u32..20, den in 1u32..20) {
            // x >= 1, exponent in (0, 2).
            prop_assume!(p as f64 / q as f64 >= 1.0);
            let x = rat::frac(p as i64, q as i64);
            let exp = rat::frac(num.min(2 * den) as i64, den as i64);
            let v = rat::to_f64(&pow_fixed(&x, &exp).unwrap());
            let truth = (p as f64 / q as f64).powf(num.min(2 * den) as f64 / den as f64);
            prop_assert!((v - truth).abs() <= truth * 2f64.powi(-17) + 2f64.powi(-19),
                "x={x} exp={exp} got {v} want {truth}");
        }
    }
}
