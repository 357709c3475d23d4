use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{factorial, Rational};
use crate::error::{bail, Result};

pub type Exponents = Vec<u32>;

/// Bound on a weighted total degree `sum_i weights[i] * e_i <= max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCap {
    pub weights: Vec<u32>,
    pub max: u32,
}

/// Sparse multivariate power series truncated per variable and by optional
/// weighted degree caps. Monomials outside the truncation are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    orders: Vec<u32>,
    caps: Vec<DegreeCap>,
    terms: BTreeMap<Exponents, Rational>,
}

impl TruncatedSeries {
    pub fn new(orders: Vec<u32>) -> Self {
        TruncatedSeries {
            orders,
            caps: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn unbounded(nvars: usize) -> Self {
        Self::new(vec![u32::MAX; nvars])
    }

    pub fn with_cap(mut self, weights: Vec<u32>, max: u32) -> Self {
        assert_eq!(weights.len(), self.orders.len());
        self.caps.push(DegreeCap { weights, max });
        self.terms
            .retain(|e, _| admits(&self.orders, &self.caps, e));
        self
    }

    pub fn zero_like(&self) -> Self {
        TruncatedSeries {
            orders: self.orders.clone(),
            caps: self.caps.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant_like(&self, c: Rational) -> Self {
        let mut s = self.zero_like();
        s.add_term(vec![0; self.nvars()], c);
        s
    }

    pub fn one_like(&self) -> Self {
        self.constant_like(Rational::one())
    }

    /// `c0 + sum_i coeffs[i] * y_i` with the truncation of `self`.
    pub fn linear_like(&self, coeffs: &[Rational], c0: Rational) -> Self {
        let mut s = self.constant_like(c0);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; self.nvars()];
            e[i] = 1;
            s.add_term(e, c.clone());
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn admits(&self, e: &[u32]) -> bool {
        admits(&self.orders, &self.caps, e)
    }

    /// Adds `c * y^e`; silently drops monomials outside the truncation.
    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() || !self.admits(&e) {
            return;
        }
        add_into(&mut self.terms, e, c);
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Like [`coefficient`](Self::coefficient) but rejects monomials the
    /// truncation cannot represent.
    pub fn coefficient_checked(&self, e: &[u32]) -> Result<Rational> {
        if e.len() != self.nvars() || !self.admits(e) {
            bail!(
                InvalidArgument,
                "exponent {:?} beyond truncation {:?}",
                e,
                self.orders
            );
        }
        Ok(self.coefficient(e))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Exponents, Rational> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn retain(&mut self, mut f: impl FnMut(&Exponents, &Rational) -> bool) {
        self.terms.retain(|e, c| f(e, c));
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.zero_like();
        let n = self.nvars();
        let mut e = vec![0u32; n];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut ok = true;
                for i in 0..n {
                    let s = ea[i].saturating_add(eb[i]);
                    if s > self.orders[i] {
                        ok = false;
                        break;
                    }
                    e[i] = s;
                }
                if !ok || !caps_ok(&self.caps, &e) {
                    continue;
                }
                add_into(&mut out.terms, e.clone(), ca * cb);
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &TruncatedSeries) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &TruncatedSeries) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn pow(&self, k: u32) -> TruncatedSeries {
        let mut acc = self.one_like();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `sum_k coeffs[k] * arg^k`, truncated like `self`. `arg` is re-truncated
    /// to `self`'s truncation first.
    pub fn compose(&self, coeffs: &[Rational], arg: &TruncatedSeries) -> TruncatedSeries {
        let mut a = self.zero_like();
        a.add_assign(arg);
        let mut out = self.zero_like();
        let mut power = self.one_like();
        for (k, c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = power.mul(&a);
            }
            if power.is_zero() {
                break;
            }
            if !c.is_zero() {
                let mut t = power.clone();
                t.scale(c);
                out.add_assign(&t);
            }
        }
        out
    }
}

fn admits(orders: &[u32], caps: &[DegreeCap], e: &[u32]) -> bool {
    e.iter().zip(orders).all(|(x, o)| x <= o) && caps_ok(caps, e)
}

fn caps_ok(caps: &[DegreeCap], e: &[u32]) -> bool {
    caps.iter().all(|c| {
        let mut s: u64 = 0;
        for (w, x) in c.weights.iter().zip(e) {
            s += (*w as u64) * (*x as u64);
        }
        s <= c.max as u64
    })
}

fn add_into(terms: &mut BTreeMap<Exponents, Rational>, e: Exponents, c: Rational) {
    use alloc::collections::btree_map::Entry;
    match terms.entry(e) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Univariate series with known closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedSeries {
    Exp,
    Cosh,
    /// `sinh(x)/x`
    SinhOverX,
    /// `t^2 e^t / (e^t - 1)^2`
    ToddSquared,
}

impl NamedSeries {
    /// Coefficients of `x^0 .. x^upto`.
    pub fn coefficients(self, upto: usize) -> Vec<Rational> {
        let inv_fact = |k: usize| Rational::one() / factorial(k as i64).unwrap();
        match self {
            NamedSeries::Exp => (0..=upto).map(inv_fact).collect(),
            NamedSeries::Cosh => (0..=upto)
                .map(|k| {
                    if k % 2 == 0 {
                        inv_fact(k)
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
            NamedSeries::SinhOverX => (0..=upto)
                .map(|k| {
                    if k % 2 == 0 {
                        inv_fact(k + 1)
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
            NamedSeries::ToddSquared => {
                // (e^t - 1)/t = sum t^k/(k+1)!; square, invert, multiply by e^t.
                let q: Vec<Rational> = (0..=upto).map(|k| inv_fact(k + 1)).collect();
                let q2 = mul_univariate(&q, &q, upto);
                let inv = invert_univariate(&q2, upto);
                let e: Vec<Rational> = (0..=upto).map(inv_fact).collect();
                mul_univariate(&inv, &e, upto)
            }
        }
    }
}

fn mul_univariate(a: &[Rational], b: &[Rational], upto: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); upto + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= upto {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn invert_univariate(a: &[Rational], upto: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); upto + 1];
    out[0] = Rational::one() / &a[0];
    for k in 1..=upto {
        let mut s = Rational::zero();
        for j in 1..=k.min(a.len() - 1) {
            s += &a[j] * &out[k - j];
        }
        out[k] = -s * &out[0];
    }
    out
}

/// Coefficient of `y^exponents` in `f(sum_i arg[i] * y_i)`.
pub fn series_coefficient(f: NamedSeries, arg: &[Rational], exponents: &[u32]) -> Result<Rational> {
    if arg.len() != exponents.len() {
        bail!(
            InvalidArgument,
            "{} substitution coefficients for {} variables",
            arg.len(),
            exponents.len()
        );
    }
    let total: u32 = exponents.iter().sum();
    let base = TruncatedSeries::new(exponents.to_vec());
    let lin = base.linear_like(arg, Rational::zero());
    let s = base.compose(&f.coefficients(total as usize), &lin);
    s.coefficient_checked(exponents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{int, rat};

    #[test]
    fn todd_squared() {
        let c = NamedSeries::ToddSquared.coefficients(6);
        assert_eq!(c[0], int(1));
        assert_eq!(c[1], int(0));
        assert_eq!(c[2], rat(-1, 12));
        assert_eq!(c[4], rat(1, 240));
        assert_eq!(
            series_coefficient(NamedSeries::ToddSquared, &[int(1)], &[2]).unwrap(),
            rat(-1, 12)
        );
    }

    #[test]
    fn cosh_shift() {
        let one = int(1);
        assert_eq!(
            series_coefficient(NamedSeries::Cosh, &[one.clone(), one.clone()], &[0, 0]).unwrap(),
            int(1)
        );
        // [cosh(a+x)]_{a^1 x^1} = 2 / 2! = 1
        assert_eq!(
            series_coefficient(NamedSeries::Cosh, &[one.clone(), one.clone()], &[1, 1]).unwrap(),
            int(1)
        );
        assert_eq!(
            series_coefficient(NamedSeries::SinhOverX, &[one], &[2]).unwrap(),
            rat(1, 6)
        );
    }

    #[test]
    fn truncation_is_respected() {
        let s = TruncatedSeries::new(vec![2, 2]).with_cap(vec![1, 1], 3);
        let x = s.linear_like(&[int(1), int(1)], int(0));
        let p = x.pow(5);
        assert!(p
            .terms()
            .all(|(e, _)| e[0] <= 2 && e[1] <= 2 && e[0] + e[1] <= 3));
        assert_eq!(x.pow(3).coefficient(&[2, 1]), int(3));
        assert!(s.coefficient_checked(&[3, 0]).is_err());
    }
}
