//! Caches shared by the relation and intersection-number algorithms.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::exact_arith::{factorial, Rational};
use crate::pixton::Kernel;
use crate::stable_graphs::GraphCache;
use crate::strata::FormalSum;
use crate::trr::Relation;

/// Graph enumerations, block moments and memoized relations.
#[derive(Debug, Default)]
pub struct Engine {
    pub graphs: GraphCache,
    pub kernel: Kernel,
    pub(crate) pushforwards: BTreeMap<(u32, usize, Vec<u32>), FormalSum>,
    pub(crate) relations: BTreeMap<(u32, Vec<u32>), Relation>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of memoized normal-form relations.
    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }
}

/// `(2g - 3 + n + m)! / (2g - 3 + n)!`, the factor from `m` dilaton pushforwards.
pub(crate) fn dilaton_factor(g: u32, n: usize, m: u32) -> Rational {
    let base = 2 * g as i64 - 3 + n as i64;
    debug_assert!(base >= 0);
    factorial(base + m as i64).unwrap() / factorial(base).unwrap()
}

/// Exponent vectors over `nvars` variables with total degree at most `max`,
/// ordered by degree and then lexicographically.
pub fn monomials_up_to(nvars: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=max {
        out.extend(compositions(d, nvars));
    }
    out
}

/// Exponent vectors over `parts` variables with sum exactly `total`, in lexicographic order.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; parts];
    fill(total, 0, &mut cur, &mut out);
    out
}

fn fill(left: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for x in 0..=left {
        cur[i] = x;
        fill(left - x, i + 1, cur, out);
    }
}
