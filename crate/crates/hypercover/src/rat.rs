//! Exact rational arithmetic helpers.
//!
//! All algorithm state (deals, dual variables, thresholds) is kept as
//! arbitrary-precision rationals so that every `<=`/`>=` claim of the
//! analysis can be asserted with zero tolerance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Rational from an integer.
pub fn int(v: impl Into<BigInt>) -> Rat {
    Rat::from_integer(v.into())
}

/// Rational `p/q`. Panics if `q == 0`.
pub fn frac(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Rat {
    Rat::new(p.into(), q.into())
}

pub fn zero() -> Rat {
    Rat::zero()
}

/// Canonical `p/q` rendering, denominator always present and positive.
pub fn fmt_frac(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest `f64`, for human-facing decimal fields only.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"p"`, with optional sign on the numerator.
pub fn parse(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| ParseRatError(s.to_string()))?;
    let q: BigInt = match den {
        Some(d) => d.parse().map_err(|_| ParseRatError(s.to_string()))?,
        None => BigInt::from(1),
    };
    if q.is_zero() || q.is_negative() {
        return Err(ParseRatError(s.to_string()));
    }
    Ok(Rat::new(p, q))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}` (expected `p/q` or `p`)")]
pub struct ParseRatError(pub String);

/// Smallest integer `k >= 0` with `base^k >= x`, for rational `base > 1`.
///
/// This is an exact ceil-log: no floating point, just repeated rational
/// multiplication.
pub fn ceil_log(base: &Rat, x: u128) -> u32 {
    assert!(*base > int(1), "ceil_log requires base > 1");
    let target = int(BigInt::from(x));
    let mut power = int(1);
    let mut k = 0u32;
    while power < target {
        power *= base;
        k += 1;
    }
    k
}

/// `ceil(r)` as a `BigInt`.
pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/3", "2/4", "-7/2", "5", "0/9"] {
            let r = parse(s).unwrap();
            let back = parse(&fmt_frac(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(fmt_frac(&parse("2/4").unwrap()), "1/2");
        assert_eq!(fmt_frac(&parse("5").unwrap()), "5/1");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("1/-2").is_err());
        assert!(parse("a/b").is_err());
    }

    #[test]
    fn ceil_log_exact() {
        assert_eq!(ceil_log(&int(2), 1), 0);
        assert_eq!(ceil_log(&int(2), 2), 1);
        assert_eq!(ceil_log(&int(2), 3), 2);
        assert_eq!(ceil_log(&int(2), 1024), 10);
        assert_eq!(ceil_log(&int(2), 1025), 11);
        // base 3/2: (3/2)^k >= 8 first at k = 6 (since 1.5^5 = 7.59..).
        assert_eq!(ceil_log(&frac(3, 2), 8), 6);
    }
}
