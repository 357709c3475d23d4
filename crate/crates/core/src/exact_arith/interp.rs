use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{int, Rational, TruncatedSeries};

/// Extra samples taken beyond the degree bound and checked against the interpolant.
pub const SURPLUS_SAMPLES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("duplicate interpolation node {0}")]
    DuplicateNode(i64),
    #[error("need {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("surplus sample at node {node} is off the degree-{degree_bound} interpolant (degree bound or r threshold too low)")]
    SurplusMismatch { node: i64, degree_bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpolant {
    /// Coefficients in increasing degree, length `degree_bound + 1`.
    pub coeffs: Vec<Rational>,
    /// Number of surplus samples that were verified.
    pub surplus_checked: usize,
}

impl Interpolant {
    pub fn eval(&self, x: i64) -> Rational {
        let x = int(x);
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }
}

pub fn lagrange_interpolate(
    samples: &[(i64, Rational)],
    degree_bound: usize,
) -> Result<Interpolant, InterpError> {
    let need = degree_bound + 1;
    if samples.len() < need {
        return Err(InterpError::TooFewSamples {
            needed: need,
            got: samples.len(),
        });
    }
    let mut seen: Vec<i64> = samples.iter().map(|s| s.0).collect();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(InterpError::DuplicateNode(w[0]));
        }
    }
    let xs: Vec<i64> = samples[..need].iter().map(|s| s.0).collect();
    // Newton divided differences, in place.
    let mut dd: Vec<Rational> = samples[..need].iter().map(|s| s.1.clone()).collect();
    for j in 1..need {
        for i in (j..need).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / int(xs[i] - xs[i - j]);
        }
    }
    // Expand the Newton form into monomial coefficients (Horner from the top).
    let mut coeffs: Vec<Rational> = vec![Rational::zero(); need];
    for i in (0..need).rev() {
        // coeffs <- coeffs * (y - xs[i]) + dd[i]
        let mut next = vec![Rational::zero(); need];
        for k in 0..need {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < need {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * int(xs[i]);
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    let poly = Interpolant {
        coeffs,
        surplus_checked: 0,
    };
    let mut checked = 0;
    for (x, y) in &samples[need..] {
        if &poly.eval(*x) != y {
            return Err(InterpError::SurplusMismatch {
                node: *x,
                degree_bound,
            });
        }
        checked += 1;
    }
    Ok(Interpolant {
        surplus_checked: checked,
        ..poly
    })
}

/// Constant term of a family of polynomials sampled at common nodes.
///
/// Each sample maps keys to values (absent keys are zero). Every key is
/// interpolated separately and its surplus samples verified.
pub fn constant_term_of_samples<K: Ord + Clone>(
    nodes: &[i64],
    samples: &[BTreeMap<K, Rational>],
    degree_bound: usize,
) -> Result<BTreeMap<K, Rational>, InterpError> {
    let mut keys: Vec<&K> = Vec::new();
    for s in samples {
        keys.extend(s.keys());
    }
    keys.sort();
    keys.dedup();
    let mut out = BTreeMap::new();
    for k in keys {
        let pts: Vec<(i64, Rational)> = nodes
            .iter()
            .zip(samples)
            .map(|(&x, s)| (x, s.get(k).cloned().unwrap_or_else(Rational::zero)))
            .collect();
        let p = lagrange_interpolate(&pts, degree_bound)?;
        if !p.coeffs[0].is_zero() {
            out.insert(k.clone(), p.coeffs[0].clone());
        }
    }
    Ok(out)
}

/// Rows `k` of the inverse Vandermonde matrix: `coeff_k = sum_j inv[k][j] * f(nodes[j])`.
fn vandermonde_inverse(nodes: &[i64]) -> Vec<Vec<Rational>> {
    let n = nodes.len();
    let mut inv = vec![vec![Rational::zero(); n]; n];
    for j in 0..n {
        let mut basis = vec![Rational::one()];
        let mut denom = Rational::one();
        for (m, &xm) in nodes.iter().enumerate() {
            if m == j {
                continue;
            }
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * int(xm);
            }
            basis = next;
            denom *= int(nodes[j] - xm);
        }
        for k in 0..n {
            inv[k][j] = &basis[k] / &denom;
        }
    }
    inv
}

/// Multivariate interpolation on the tensor grid `nodes^dims`.
///
/// `values` is indexed lexicographically with the first variable most
/// significant. The result has per-variable degree below `nodes.len()`.
pub fn tensor_interpolate(
    nodes: &[i64],
    dims: usize,
    values: &[Rational],
) -> Result<TruncatedSeries, InterpError> {
    let n = nodes.len();
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(InterpError::DuplicateNode(w[0]));
        }
    }
    let total = n.pow(dims as u32);
    if values.len() != total {
        return Err(InterpError::TooFewSamples {
            needed: total,
            got: values.len(),
        });
    }
    let inv = vandermonde_inverse(nodes);
    let mut data = values.to_vec();
    let mut stride = 1usize;
    for _axis in 0..dims {
        // Axes are processed from the last (stride 1) to the first.
        let block = stride * n;
        let mut next = data.clone();
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for k in 0..n {
                    let mut acc = Rational::zero();
                    for j in 0..n {
                        let v = &data[base + off + j * stride];
                        if !v.is_zero() && !inv[k][j].is_zero() {
                            acc += &inv[k][j] * v;
                        }
                    }
                    next[base + off + k * stride] = acc;
                }
            }
        }
        data = next;
        stride = block;
    }
    let mut out = TruncatedSeries::new(vec![(n - 1) as u32; dims]);
    for (idx, c) in data.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut e = vec![0u32; dims];
        let mut rest = idx;
        for d in (0..dims).rev() {
            e[d] = (rest % n) as u32;
            rest /= n;
        }
        out.add_term(e, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn basic_interpolation() {
        let p = lagrange_interpolate(&[(0, int(1)), (1, int(1)), (2, int(1))], 2).unwrap();
        assert_eq!(p.coeffs, vec![int(1), int(0), int(0)]);
        let p = lagrange_interpolate(&[(1, int(1)), (2, int(4)), (3, int(9))], 2).unwrap();
        assert_eq!(p.coeffs, vec![int(0), int(0), int(1)]);
        assert_eq!(
            lagrange_interpolate(&[(1, int(1)), (1, int(1))], 0),
            Err(InterpError::DuplicateNode(1))
        );
        let bad = [(0, int(0)), (1, int(1)), (2, int(4))];
        assert!(matches!(
            lagrange_interpolate(&bad, 1),
            Err(InterpError::SurplusMismatch { .. })
        ));
    }

    #[test]
    fn quadratic_residue_sum() {
        // (1/r) sum_{w<r} w(r-w) = (r^2-1)/6
        let pts: Vec<(i64, Rational)> = (5..14)
            .map(|r| {
                let s: i64 = (0..r).map(|w| w * (r - w)).sum();
                (r, rat(s, r))
            })
            .collect();
        let p = lagrange_interpolate(&pts, 2).unwrap();
        assert_eq!(p.coeffs[0], rat(-1, 6));
        assert_eq!(p.surplus_checked, 6);
    }

    #[test]
    fn grid_two_variables() {
        let nodes = [0, 1, 2];
        let mut vals = Vec::new();
        for x in 0..3i64 {
            for y in 0..3i64 {
                vals.push(int(3 * x * x * y - y + 2));
            }
        }
        let s = tensor_interpolate(&nodes, 2, &vals).unwrap();
        assert_eq!(s.coefficient(&[2, 1]), int(3));
        assert_eq!(s.coefficient(&[0, 1]), int(-1));
        assert_eq!(s.coefficient(&[0, 0]), int(2));
        assert_eq!(s.len(), 3);
    }
}
