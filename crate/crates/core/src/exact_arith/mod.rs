//! Exact rational arithmetic and the combinatorial numbers used throughout.
//!
//! Bernoulli numbers follow the convention `B_1 = -1/2`, the one in which
//! Faulhaber's formula reads `sum_{w<r} w^p = sum_k C(p+1,k) B_k r^{p+1-k} / (p+1)`.

mod interp;
mod linalg;
mod series;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{bail, Result};

pub use interp::{
    constant_term_of_samples, lagrange_interpolate, tensor_interpolate, InterpError, Interpolant,
    SURPLUS_SAMPLES,
};
pub use linalg::solve_columns;
pub use series::{series_coefficient, DegreeCap, Exponents, NamedSeries, TruncatedSeries};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

pub fn factorial_big(m: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=m {
        acc *= i;
    }
    acc
}

pub fn factorial(m: i64) -> Result<Rational> {
    if m < 0 {
        bail!(InvalidArgument, "factorial of negative integer {}", m);
    }
    Ok(big(&factorial_big(m as u32)))
}

/// `m!!` for `m >= -1`, with `(-1)!! = 0!! = 1`.
pub fn double_factorial(m: i64) -> Result<Rational> {
    if m < -1 {
        bail!(InvalidArgument, "double factorial of {}", m);
    }
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(big(&acc))
}

/// Binomial coefficient, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    big(&acc)
}

pub fn multinomial(top: i64, parts: &[i64]) -> Result<Rational> {
    if parts.iter().any(|&p| p < 0) {
        bail!(InvalidArgument, "negative multinomial part in {:?}", parts);
    }
    if parts.iter().sum::<i64>() != top {
        bail!(
            InvalidArgument,
            "multinomial parts {:?} do not sum to {}",
            parts,
            top
        );
    }
    let mut acc = factorial(top)?;
    for &p in parts {
        acc /= factorial(p)?;
    }
    Ok(acc)
}

/// `B_0 .. B_upto` from `sum_{k=0}^{m} C(m+1,k) B_k = 0`.
pub fn bernoulli_table(upto: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(upto + 1);
    b.push(Rational::one());
    for m in 1..=upto {
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += binomial(m as i64 + 1, k as i64) * bk;
        }
        b.push(-s / int(m as i64 + 1));
    }
    b
}

pub fn bernoulli(m: usize) -> Rational {
    bernoulli_table(m).pop().unwrap()
}

/// Renders as `p/q`, always with an explicit denominator.
pub fn format_rational(x: &Rational) -> String {
    let mut s = x.numer().to_string();
    s.push('/');
    s.push_str(&x.denom().to_string());
    s
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = match p.parse() {
        Ok(v) => v,
        Err(_) => bail!(InvalidArgument, "malformed rational {:?}", s),
    };
    let q: BigInt = match q.parse() {
        Ok(v) => v,
        Err(_) => bail!(InvalidArgument, "malformed rational {:?}", s),
    };
    if q.is_zero() || q.is_negative() {
        bail!(InvalidArgument, "non-positive denominator in {:?}", s);
    }
    Ok(Rational::new(p, q))
}

/// Integer power of a rational with a possibly-zero base.
pub fn pow(x: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Whether `x` is a reduced fraction with positive denominator.
pub fn is_normalized(x: &Rational) -> bool {
    x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(double_factorial(-1).unwrap(), int(1));
        assert_eq!(double_factorial(0).unwrap(), int(1));
        assert_eq!(double_factorial(5).unwrap(), int(15));
        assert!(double_factorial(-2).is_err());
        assert_eq!(factorial(0).unwrap(), int(1));
        assert!(factorial(-1).is_err());
        assert_eq!(multinomial(4, &[0, 4]).unwrap(), int(1));
        assert_eq!(multinomial(3, &[1, 1, 1]).unwrap(), int(6));
        assert_eq!(multinomial(0, &[]).unwrap(), int(1));
        assert!(multinomial(3, &[1, 1]).is_err());
        assert!(multinomial(0, &[1, -1]).is_err());
    }

    #[test]
    fn bernoulli_convention() {
        let b = bernoulli_table(6);
        assert_eq!(b[0], int(1));
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], int(0));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
    }

    #[test]
    fn rational_text() {
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(parse_rational("6/-3").is_err(), true);
        assert_eq!(parse_rational(" 10/4 ").unwrap(), rat(5, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
