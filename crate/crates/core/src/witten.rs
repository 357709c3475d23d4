//! ψ-intersection numbers from the vanishing of the top-degree relation.
//!
//! For `2g - 3 + n > 0` and `M = prod_{i>=1} a_i^{2 k_i}` the degree
//! `3g-3+n` relation integrates to zero. Its smooth-graph part is a
//! triangular combination of `int prod psi_i^{l_i}` with `l_i <= k_i` for
//! `i >= 1`; every other graph contributes a number computed from strictly
//! smaller moduli spaces.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::engine::{dilaton_factor, Engine};
use crate::error::{bail, Error, Result};
use crate::exact_arith::{factorial, int, multinomial, rat, Rational};
use crate::pixton::{KernelTarget, WeightingSpec};
use crate::stable_graphs::StableGraph;
use crate::strata::IntersectionProvider;

pub const TABLE_VERSION: u32 = 1;

fn dim(g: u32, n: usize) -> i64 {
    3 * g as i64 - 3 + n as i64
}

fn table_key(k: &[u32]) -> Vec<u32> {
    let mut s = k.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

fn validate(g: u32, k: &[u32]) -> Result<()> {
    let n = k.len();
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Unstable { g, n });
    }
    let s: u32 = k.iter().sum();
    if s as i64 != dim(g, n) {
        return Err(Error::DimensionMismatch {
            expected: dim(g, n),
            got: s as i64,
        });
    }
    Ok(())
}

/// Memo of `<tau_k1 ... tau_kn>_g`, keyed by genus and exponents sorted
/// in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTable {
    entries: BTreeMap<(u32, Vec<u32>), Rational>,
    dirty: bool,
}

impl Default for IntersectionTable {
    fn default() -> Self {
        Self::new()
    }
}

impl IntersectionTable {
    /// Only the two base values.
    pub fn new() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((0, vec![0, 0, 0]), Rational::one());
        entries.insert((1, vec![1]), rat(1, 24));
        IntersectionTable {
            entries,
            dirty: false,
        }
    }

    /// Base values plus the given entries, each checked for the dimension
    /// constraint and for agreement with the base values.
    pub fn from_entries(
        items: impl IntoIterator<Item = (u32, Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut t = Self::new();
        for (g, k, v) in items {
            t.insert(g, &k, v)?;
        }
        t.dirty = false;
        Ok(t)
    }

    pub fn version(&self) -> u32 {
        TABLE_VERSION
    }

    pub fn get(&self, g: u32, k: &[u32]) -> Option<&Rational> {
        self.entries.get(&(g, table_key(k)))
    }

    pub fn insert(&mut self, g: u32, k: &[u32], value: Rational) -> Result<()> {
        validate(g, k)?;
        let key = (g, table_key(k));
        if let Some(old) = self.entries.get(&key) {
            if *old != value {
                bail!(
                    InvalidArgument,
                    "conflicting values for genus {} exponents {:?}",
                    g,
                    key.1
                );
            }
            return Ok(());
        }
        self.entries.insert(key, value);
        self.dirty = true;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &[u32], &Rational)> {
        self.entries.iter().map(|((g, k), v)| (*g, k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether entries were added since creation or the last [`mark_clean`](Self::mark_clean).
    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn mark_clean(&mut self) {
        self.dirty = false;
    }
}

/// The vanishing relation for one exponent vector, split by graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub g: u32,
    /// Exponents with the distinguished marking first.
    pub k: Vec<u32>,
    /// Smooth-graph coefficients of `int prod psi_i^{l_i}`, keyed by `l`.
    pub row: BTreeMap<Vec<u32>, Rational>,
    /// Evaluated contribution of every graph with at least one edge.
    pub contributions: Vec<(StableGraph, Rational)>,
    /// Minus the sum of the contributions.
    pub boundary: Rational,
}

/// Intersection numbers computed by the recursion, sharing the engine's caches.
pub struct Recursion<'a> {
    pub engine: &'a mut Engine,
    pub table: &'a mut IntersectionTable,
}

impl<'a> Recursion<'a> {
    pub fn new(engine: &'a mut Engine, table: &'a mut IntersectionTable) -> Self {
        Recursion { engine, table }
    }

    /// `int_{M_{g,n}} prod psi_i^{k_i}` for `sum k_i = 3g - 3 + n`.
    pub fn intersection_number(&mut self, g: u32, k: &[u32]) -> Result<Rational> {
        validate(g, k)?;
        if let Some(v) = self.table.get(g, k) {
            return Ok(v.clone());
        }
        let key = table_key(k);
        let n = key.len();
        if 2 * g as i64 - 3 + n as i64 <= 0 {
            return Err(Error::Internal(alloc::format!(
                "no base value for genus {} exponents {:?}",
                g,
                key
            )));
        }
        let eq = self.assemble_equation(g, n, &key[1..])?;
        let mut rhs = eq.boundary.clone();
        let mut lead = Rational::zero();
        let top_measure = dim(g, n) - key[0] as i64;
        for (l, c) in &eq.row {
            if *l == key {
                lead = c.clone();
                continue;
            }
            let lk = table_key(l);
            if dim(g, n) - lk[0] as i64 >= top_measure {
                return Err(Error::Internal("recursion measure did not decrease".into()));
            }
            rhs -= c * self.intersection_number(g, l)?;
        }
        if lead.is_zero() {
            return Err(Error::Internal("vanishing diagonal entry".into()));
        }
        let v = rhs / lead;
        self.table.insert(g, &key, v.clone())?;
        Ok(v)
    }

    /// Assembles the relation for `k_1 = 3g-3+n - sum(rest)` and `rest`.
    pub fn assemble_equation(&mut self, g: u32, n: usize, rest: &[u32]) -> Result<Equation> {
        if 2 * g as i64 - 3 + n as i64 <= 0 {
            bail!(
                InvalidArgument,
                "need 2g - 3 + n > 0, got (g, n) = ({}, {}); use the base values",
                g,
                n
            );
        }
        if rest.len() + 1 != n {
            bail!(
                InvalidArgument,
                "{} exponents given for {} markings",
                rest.len(),
                n
            );
        }
        let d = dim(g, n) as u32;
        let sr: u32 = rest.iter().sum();
        if sr > d {
            bail!(
                InvalidArgument,
                "exponents {:?} exceed dimension {}",
                rest,
                d
            );
        }
        let mut k = vec![d - sr];
        k.extend_from_slice(rest);
        let deg_m = 2 * sr;
        let free = 2 * d - deg_m;

        let w = factorial(free as i64)? * dilaton_factor(g, n, free);
        let mut row = BTreeMap::new();
        let mut l = vec![0u32; n];
        smooth_row(&k, 1, d, &mut l, &w, free, &mut row)?;

        let m_exps: Vec<u32> = rest.iter().map(|x| 2 * x).collect();
        let mut contributions = Vec::new();
        let mut boundary = Rational::zero();
        let graphs = self.engine.graphs.enumerate(g, n, usize::MAX)?;
        for gr in graphs.into_iter().filter(|gr| gr.num_edges() > 0) {
            let c = self.graph_contribution(&gr, &m_exps, d, free)?;
            boundary -= &c;
            contributions.push((gr, c));
        }
        Ok(Equation {
            g,
            k,
            row,
            contributions,
            boundary,
        })
    }

    fn graph_contribution(
        &mut self,
        gr: &StableGraph,
        m_exps: &[u32],
        d: u32,
        free: u32,
    ) -> Result<Rational> {
        let aut = self.engine.graphs.automorphism_order(gr);
        let (spec, lay) = WeightingSpec::symbolic(gr.clone(), None, true)?;
        let mut target = KernelTarget::any(lay.nvars);
        for (i, v) in lay.a_var.iter().enumerate().skip(1) {
            if let Some(j) = *v {
                target.exact[j] = Some(m_exps[i - 1]);
            }
        }
        target.total = Some(2 * d);
        let poly = self.engine.kernel.class_poly(&spec, d, &target)?;
        let ny = spec.nvars;
        let base = factorial(free as i64)? / int(aut as i64);
        let mut acc = Rational::zero();
        for (e, c) in poly.terms() {
            let psi = &e[ny..];
            let mut val = c * &base;
            for v in 0..gr.num_vertices() {
                let mv = e[lay.x_var[v].unwrap()];
                val *= dilaton_factor(gr.vertex_genus(v), gr.valence(v), mv);
            }
            for v in 0..gr.num_vertices() {
                if gr.vertex_dim(v) >= d as i64 {
                    return Err(Error::Internal(
                        "vertex integral is not on a smaller space".into(),
                    ));
                }
                let ks: Vec<u32> = gr.half_edges_at(v).iter().map(|&h| psi[h]).collect();
                if ks.iter().sum::<u32>() as i64 != gr.vertex_dim(v) {
                    val = Rational::zero();
                    break;
                }
                val *= self.intersection_number(gr.vertex_genus(v), &ks)?;
                if val.is_zero() {
                    break;
                }
            }
            acc += val;
        }
        Ok(acc)
    }
}

/// Fills the smooth-graph coefficients over `l_i <= k_i` (`i >= 1`).
fn smooth_row(
    k: &[u32],
    i: usize,
    d: u32,
    l: &mut Vec<u32>,
    w: &Rational,
    free: u32,
    row: &mut BTreeMap<Vec<u32>, Rational>,
) -> Result<()> {
    if i == k.len() {
        let s: u32 = l[1..].iter().sum();
        if s > d {
            return Ok(());
        }
        l[0] = d - s;
        let mut c = w.clone();
        for &x in l.iter() {
            c /= int(1i64 << x) * factorial(x as i64)?;
        }
        let mut parts: Vec<i64> = (1..k.len()).map(|j| 2 * (k[j] - l[j]) as i64).collect();
        parts.push(free as i64);
        c *= multinomial(2 * l[0] as i64, &parts)?;
        if !c.is_zero() {
            row.insert(l.clone(), c);
        }
        return Ok(());
    }
    for x in 0..=k[i] {
        l[i] = x;
        smooth_row(k, i + 1, d, l, w, free, row)?;
    }
    l[i] = 0;
    Ok(())
}

impl IntersectionProvider for Recursion<'_> {
    fn intersection(&mut self, g: u32, k: &[u32]) -> Result<Rational> {
        if k.iter().sum::<u32>() as i64 != dim(g, k.len()) {
            return Ok(Rational::zero());
        }
        self.intersection_number(g, k)
    }
}

/// One-shot evaluation with fresh caches.
pub fn intersection_number(g: u32, k: &[u32]) -> Result<Rational> {
    let mut engine = Engine::new();
    let mut table = IntersectionTable::new();
    Recursion::new(&mut engine, &mut table).intersection_number(g, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m12_example() {
        let mut e = Engine::new();
        let mut t = IntersectionTable::new();
        let mut r = Recursion::new(&mut e, &mut t);
        let eq = r.assemble_equation(1, 2, &[0]).unwrap();
        assert_eq!(eq.row.len(), 1);
        assert_eq!(eq.row[&vec![2, 0]], int(360));
        let mut vals: Vec<Rational> = eq.contributions.iter().map(|(_, c)| c.clone()).collect();
        vals.sort();
        assert_eq!(vals, vec![int(-12), int(-3), int(0), int(0)]);
        assert_eq!(r.intersection_number(1, &[2, 0]).unwrap(), rat(1, 24));
    }

    #[test]
    fn small_values() {
        assert_eq!(intersection_number(0, &[1, 0, 0, 0]).unwrap(), int(1));
        assert_eq!(intersection_number(1, &[1, 1]).unwrap(), rat(1, 24));
        assert!(matches!(
            intersection_number(0, &[5]),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            intersection_number(1, &[0, 0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn table_rejects_bad_entries() {
        assert!(IntersectionTable::from_entries([(1, vec![2, 1], rat(1, 2))]).is_err());
        assert!(IntersectionTable::from_entries([(1, vec![1], rat(1, 2))]).is_err());
        let t = IntersectionTable::from_entries([(1, vec![0, 2], rat(1, 24))]).unwrap();
        assert_eq!(t.get(1, &[2, 0]), Some(&rat(1, 24)));
        assert!(!t.is_dirty());
    }
}
