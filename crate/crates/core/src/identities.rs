//! Finite checks of the combinatorial and series identities the recursion
//! relies on. Each function evaluates both sides exactly.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{bail, Result};
use crate::exact_arith::{
    bernoulli, binomial, double_factorial, factorial, int, lagrange_interpolate, pow,
    series_coefficient, NamedSeries, Rational, SURPLUS_SAMPLES,
};
use crate::strata::f_monomial;

/// Constant term in `r` of `(1/r) sum_{k<r} (k(r-k))^p`, by interpolation.
pub fn kp_constant_term(p: u32) -> Result<Rational> {
    if p == 0 {
        bail!(InvalidArgument, "exponent must be positive");
    }
    let bound = 2 * p as usize;
    let samples: Vec<(i64, Rational)> = (1..=(bound + 1 + SURPLUS_SAMPLES) as i64)
        .map(|r| {
            let s = (0..r)
                .map(|k| pow(&int(k * (r - k)), p))
                .fold(Rational::zero(), |a, b| a + b);
            (r, s / int(r))
        })
        .collect();
    Ok(lagrange_interpolate(&samples, bound)?.coeffs[0].clone())
}

/// `(-1)^p B_{2p}`.
pub fn kp_expected(p: u32) -> Rational {
    let b = bernoulli(2 * p as usize);
    if p % 2 == 1 {
        -b
    } else {
        b
    }
}

pub fn pascal_rule(max_n: i64) -> bool {
    (1..=max_n).all(|n| (1..=n).all(|k| binomial(n, k - 1) + binomial(n, k) == binomial(n + 1, k)))
}

/// `(2g-D-2e)! [cosh(a+x)]_{x^{2g-D-2e}} = (2g+2-D)! [cosh(a+x)]_{x^{2g+2-D}}`
/// coefficientwise in `a` up to `a^{a_max}`.
pub fn cosh_shift_independence(g: u32, d: u32, e: u32, a_max: u32) -> Result<bool> {
    if 2 * g < d + 2 * e {
        bail!(InvalidArgument, "2g - D - 2e is negative");
    }
    let lo = 2 * g - d - 2 * e;
    let hi = 2 * g + 2 - d;
    let one = [int(1), int(1)];
    for i in 0..=a_max {
        let l = factorial(lo as i64)? * series_coefficient(NamedSeries::Cosh, &one, &[i, lo])?;
        let r = factorial(hi as i64)? * series_coefficient(NamedSeries::Cosh, &one, &[i, hi])?;
        if l != r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Left side of the `m + m* = 2g+1-D` summation identity. Both sides agree
/// for `e <= 2g + 2 - D`; beyond that the sum is empty.
pub fn sum_mm_lhs(g: u32, n: u32, d: u32, e: u32) -> Result<Rational> {
    let (g, n, d, e) = (g as i64, n as i64, d as i64, e as i64);
    if 2 * g - 3 + n < 0 || d > 2 * g + 1 {
        bail!(InvalidArgument, "needs 2g-3+n >= 0 and D <= 2g+1");
    }
    let free = 2 * g + 1 - d;
    let mut acc = Rational::zero();
    for mstar in 0..=free {
        let m = free - mstar;
        acc += factorial(mstar + 1)? * factorial(free)? * factorial(2 * g - 3 + n + m)?
            / factorial(2 * g - 3 + n)?
            * binomial(2 * g + 2 - d - e, mstar + 1 - e);
    }
    Ok(acc)
}

/// Right side of the summation identity.
pub fn sum_mm_rhs(g: u32, n: u32, d: u32, e: u32) -> Result<Rational> {
    let (g, n, d, e) = (g as i64, n as i64, d as i64, e as i64);
    if e == 0 {
        Ok(factorial(2 * g + 2 - d)? * factorial(4 * g - 1 + n - d)? / factorial(2 * g - 2 + n)?)
    } else {
        Ok(
            factorial(2 * g + 1 - d)? * factorial(4 * g + n - d)? * factorial(e)?
                / factorial(2 * g - 2 + n + e)?,
        )
    }
}

/// Coefficient of `x^{2d}` after applying `F` to the loop edge series
/// `sum (2d1+1)!!(2d2+1)!! x^{2d1+2d2+4} psi^{d1} psi'^{d2} / (2d1+2d2+4)!`.
pub fn loop_edge_f_coefficient(d: u32) -> Result<Rational> {
    let mut acc = Rational::zero();
    if d < 2 {
        return Ok(acc);
    }
    for d1 in 0..=d - 2 {
        let d2 = d - 2 - d1;
        let c = double_factorial(2 * d1 as i64 + 1)? * double_factorial(2 * d2 as i64 + 1)?
            / factorial(2 * d as i64)?;
        acc += c * f_monomial(&[d1, d2]);
    }
    Ok(acc)
}

pub fn loop_edge_f_expected(d: u32) -> Result<Rational> {
    Ok(int(d as i64 - 1) / factorial(2 * d as i64)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kp_values() {
        for p in 1..=5 {
            assert_eq!(kp_constant_term(p).unwrap(), kp_expected(p), "p = {p}");
        }
        assert_eq!(kp_expected(1), crate::exact_arith::rat(-1, 6));
    }

    #[test]
    fn sum_mm_anchor() {
        assert_eq!(sum_mm_lhs(1, 1, 0, 0).unwrap(), int(576));
        assert_eq!(sum_mm_rhs(1, 1, 0, 0).unwrap(), int(576));
    }

    #[test]
    fn loop_edge_series() {
        for d in 1..8 {
            assert_eq!(
                loop_edge_f_coefficient(d).unwrap(),
                loop_edge_f_expected(d).unwrap()
            );
        }
    }
}
