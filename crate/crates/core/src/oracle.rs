//! Classical ground truth for psi-class intersection numbers.
//!
//! Values come from the DVV form of the Virasoro constraints, seeded by
//! `<tau_0^3>_0 = 1` and `<tau_1>_1 = 1/24`. Nothing here depends on the
//! graph machinery.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{double_factorial, factorial, rat, Rational};
use crate::strata::IntersectionProvider;

fn dfact(m: i64) -> Rational {
    double_factorial(m).expect("argument >= -1")
}

#[derive(Debug, Clone, Default)]
pub struct OracleTable {
    memo: BTreeMap<(u32, Vec<u32>), Rational>,
}

impl OracleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, Vec<u32>), &Rational)> {
        self.memo.iter()
    }

    /// `<tau_{k_1} ... tau_{k_n}>_g`, rejecting unstable or mis-dimensioned input.
    pub fn value(&mut self, g: u32, k: &[u32]) -> Result<Rational> {
        let n = k.len();
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::Unstable { g, n });
        }
        let dim = 3 * g as i64 - 3 + n as i64;
        let got: i64 = k.iter().map(|&x| x as i64).sum();
        if got != dim {
            return Err(Error::DimensionMismatch { expected: dim, got });
        }
        Ok(self.eval(g, k))
    }

    /// Same as [`value`](Self::value) but zero for unstable or mis-dimensioned input.
    pub fn eval(&mut self, g: u32, k: &[u32]) -> Rational {
        let n = k.len() as i64;
        if 2 * g as i64 - 2 + n <= 0 {
            return Rational::zero();
        }
        if k.iter().map(|&x| x as i64).sum::<i64>() != 3 * g as i64 - 3 + n {
            return Rational::zero();
        }
        let mut key: Vec<u32> = k.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(v) = self.memo.get(&(g, key.clone())) {
            return v.clone();
        }
        let v = self.dvv(g, &key);
        self.memo.insert((g, key), v.clone());
        v
    }

    fn dvv(&mut self, g: u32, k: &[u32]) -> Rational {
        if g == 0 && k.len() == 3 {
            return Rational::one();
        }
        if g == 1 && k.len() == 1 {
            return rat(1, 24);
        }
        // k is sorted descending and k[0] >= 1 outside the base cases.
        let big = k[0] as i64 - 1;
        let rest = &k[1..];
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            let dj = rest[j] as i64;
            let mut t: Vec<u32> = rest.to_vec();
            t[j] = (dj + big) as u32;
            let w = dfact(2 * big + 2 * dj + 1) / dfact(2 * dj - 1);
            acc += w * self.eval(g, &t);
        }
        let half = rat(1, 2);
        for r in 0..big {
            let s = big - 1 - r;
            let w = dfact(2 * r + 1) * dfact(2 * s + 1) * &half;
            if g >= 1 {
                let mut t: Vec<u32> = rest.to_vec();
                t.push(r as u32);
                t.push(s as u32);
                acc += &w * self.eval(g - 1, &t);
            }
            let m = rest.len();
            for mask in 0u32..(1u32 << m) {
                let mut left: Vec<u32> = alloc::vec![r as u32];
                let mut right: Vec<u32> = alloc::vec![s as u32];
                for (i, &d) in rest.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        left.push(d);
                    } else {
                        right.push(d);
                    }
                }
                for g1 in 0..=g {
                    let a = self.eval(g1, &left);
                    if a.is_zero() {
                        continue;
                    }
                    let b = self.eval(g - g1, &right);
                    if !b.is_zero() {
                        acc += &w * a * b;
                    }
                }
            }
        }
        acc / dfact(2 * big + 3)
    }
}

impl IntersectionProvider for OracleTable {
    fn intersection(&mut self, g: u32, k: &[u32]) -> Result<Rational> {
        Ok(self.eval(g, k))
    }
}

pub fn oracle_value(g: u32, k: &[u32]) -> Result<Rational> {
    OracleTable::new().value(g, k)
}

/// `(n-3)! / prod k_i!` for genus zero.
pub fn genus_zero_closed_form(k: &[u32]) -> Result<Rational> {
    let n = k.len() as i64;
    if n < 3 {
        return Err(Error::Unstable { g: 0, n: k.len() });
    }
    let got: i64 = k.iter().map(|&x| x as i64).sum();
    if got != n - 3 {
        return Err(Error::DimensionMismatch {
            expected: n - 3,
            got,
        });
    }
    let mut v = factorial(n - 3)?;
    for &x in k {
        v /= factorial(x as i64)?;
    }
    Ok(v)
}

/// String equation at `(g, k)`, where `k` contains a zero entry:
/// `<tau_0 X>_g = sum_j <X with k_j lowered>_g`. Vacuously true otherwise.
pub fn string_check<P: IntersectionProvider + ?Sized>(
    p: &mut P,
    g: u32,
    k: &[u32],
) -> Result<bool> {
    let Some(pos) = k.iter().position(|&x| x == 0) else {
        return Ok(true);
    };
    let mut rest: Vec<u32> = k.to_vec();
    rest.remove(pos);
    if 2 * g as i64 - 2 + rest.len() as i64 <= 0 {
        return Ok(true);
    }
    let lhs = p.intersection(g, k)?;
    let mut rhs = Rational::zero();
    for j in 0..rest.len() {
        if rest[j] == 0 {
            continue;
        }
        let mut t = rest.clone();
        t[j] -= 1;
        rhs += p.intersection(g, &t)?;
    }
    Ok(lhs == rhs)
}

/// Dilaton equation at `(g, k)`, where `k` contains an entry equal to one:
/// `<tau_1 X>_g = (2g - 2 + |X|) <X>_g`. Vacuously true otherwise.
pub fn dilaton_check<P: IntersectionProvider + ?Sized>(
    p: &mut P,
    g: u32,
    k: &[u32],
) -> Result<bool> {
    let Some(pos) = k.iter().position(|&x| x == 1) else {
        return Ok(true);
    };
    let mut rest: Vec<u32> = k.to_vec();
    rest.remove(pos);
    let chi = 2 * g as i64 - 2 + rest.len() as i64;
    if chi <= 0 {
        return Ok(true);
    }
    let lhs = p.intersection(g, k)?;
    let rhs = rat(chi, 1) * p.intersection(g, &rest)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert_eq!(oracle_value(1, &[1]).unwrap(), rat(1, 24));
        assert_eq!(oracle_value(1, &[2, 0]).unwrap(), rat(1, 24));
        assert_eq!(oracle_value(1, &[1, 1]).unwrap(), rat(1, 24));
        assert_eq!(oracle_value(2, &[4]).unwrap(), rat(1, 1152));
        assert_eq!(oracle_value(2, &[3, 2]).unwrap(), rat(29, 5760));
        assert_eq!(oracle_value(0, &[1, 0, 0, 0]).unwrap(), rat(1, 1));
        assert!(oracle_value(0, &[5]).is_err());
        assert!(oracle_value(1, &[2]).is_err());
    }

    #[test]
    fn string_and_dilaton_examples() {
        let mut t = OracleTable::new();
        assert!(string_check(&mut t, 0, &[0, 0, 0, 1]).unwrap());
        assert!(string_check(&mut t, 1, &[0, 2]).unwrap());
        assert!(dilaton_check(&mut t, 1, &[1, 1]).unwrap());
        assert_eq!(t.eval(1, &[0, 2]), rat(1, 24));
    }
}
