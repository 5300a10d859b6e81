//! Exact rational scalars used throughout the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The scalar type for every exact computation in this crate.
pub type Rat = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rint(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}

/// Parses a rational from the `p/q` (or plain `p`) form used in all file formats.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(Rat::from(p))
        }
    }
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact factorial.
pub fn factorial(k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Converts to `f64`, for tolerance-based comparisons only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    // Scaled division keeps precision for large numerators/denominators.
    let digits = 30u32;
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r.numer() * &scale / r.denom();
    let approx: f64 = scaled.to_string().parse().unwrap_or(f64::NAN);
    approx / 10f64.powi(digits as i32)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(parse_rat("6/4").map(|r| format_rat(&r)).unwrap(), "3/2");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn binomial_matches_factorials() {
        for n in 0..12usize {
            for k in 0..=n {
                let lhs = binomial(n, k) * factorial(k) * factorial(n - k);
                assert_eq!(lhs, factorial(n));
            }
        }
    }

    #[test]
    fn f64_conversion() {
        assert!((rat_to_f64(&rat(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((rat_to_f64(&rat(-691, 2730)) + 691.0 / 2730.0).abs() < 1e-15);
    }
}
