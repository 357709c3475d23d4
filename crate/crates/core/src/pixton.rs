//! Weighting sums on stable graphs and Pixton-style classes.
//!
//! Everything uses the factors `exp(a^2 psi / 2)` on legs and
//! `(1 - exp(-w w' (psi + psi') / 2)) / (psi + psi')` on edges. With this
//! convention `lambda_g = (-1)^g D^g_{g,n}(0, ..., 0)`.
//!
//! Two independent routes compute the r-constant term of a graph's
//! weighting sum:
//!
//! * [`sum_weightings`] and [`constant_term`] enumerate weightings for
//!   integer parameters and interpolate in `r`;
//! * [`Kernel::class_poly`] uses that the constant term factors over the
//!   2-edge-connected pieces of the graph: a self-loop contributes
//!   `(-1)^k B_{2k}`, a bridge with charge `S` on one side contributes
//!   `(-S^2)^k`, and every other block is a polynomial in its vertex
//!   charges, interpolated once on an integer grid and cached.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{bail, Result};
use crate::exact_arith::{
    bernoulli_table, binomial, constant_term_of_samples, factorial, int, lagrange_interpolate, rat,
    tensor_interpolate, Rational, TruncatedSeries, SURPLUS_SAMPLES,
};
use crate::stable_graphs::{GraphCache, StableGraph};
use crate::strata::{DecoratedClass, FormalSum};

/// Integer linear form `constant + sum_i coeffs[i] * y_i` in the formal variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinForm {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

impl LinForm {
    pub fn zero(nvars: usize) -> Self {
        LinForm {
            constant: 0,
            coeffs: vec![0; nvars],
        }
    }

    pub fn constant(nvars: usize, c: i64) -> Self {
        LinForm {
            constant: c,
            coeffs: vec![0; nvars],
        }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut f = Self::zero(nvars);
        f.coeffs[i] = 1;
        f
    }

    pub fn add(&self, o: &LinForm) -> LinForm {
        LinForm {
            constant: self.constant + o.constant,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> LinForm {
        LinForm {
            constant: -self.constant,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn abs_sum(&self) -> i64 {
        self.constant.abs() + self.coeffs.iter().map(|c| c.abs()).sum::<i64>()
    }

    /// The form as a series over `template`'s variables, `y` occupying the first slots.
    fn series(&self, template: &TruncatedSeries) -> TruncatedSeries {
        let mut s = template.constant_like(int(self.constant));
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; template.nvars()];
                e[i] = 1;
                s.add_term(e, int(c));
            }
        }
        s
    }
}

/// Factor attached to a leg with weight form `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LegFactor {
    /// `exp(s^2 psi / 2)`
    Standard,
    /// No factor; the leg only enters the congruences.
    Silent,
    /// `(1 - exp(s^2 psi / 2)) / psi`: the leg sits on a contracted genus-0
    /// tail together with a forgotten marking. Counts as one edge for degrees.
    Tail,
}

/// Graph with leg weights and vertex offsets for a weighting sum.
///
/// A weighting assigns residues mod `r` to half-edges with `w(leg i) = a_i`,
/// `w(h) + w(h') = 0` on edges and `sum_{h at v} w(h) = -x_v` at vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightingSpec {
    pub graph: StableGraph,
    pub nvars: usize,
    pub leg_weights: Vec<LinForm>,
    pub leg_factor: Vec<LegFactor>,
    pub offsets: Vec<LinForm>,
}

/// Which formal variable each leg and vertex uses in a symbolic spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarLayout {
    /// `a_var[i]` for legs `1..`; leg 0 is derived.
    pub a_var: Vec<Option<usize>>,
    pub x_var: Vec<Option<usize>>,
    pub nvars: usize,
}

impl WeightingSpec {
    /// Concrete weights: `a_rest` for legs `2..n`, offsets `x`, `a_1` derived.
    pub fn numeric(graph: StableGraph, a_rest: &[i64], x: &[i64]) -> Result<Self> {
        let n = graph.num_legs();
        if n == 0 || a_rest.len() != n - 1 {
            bail!(
                InvalidArgument,
                "expected {} leg weights, got {}",
                n.saturating_sub(1),
                a_rest.len()
            );
        }
        let nv = graph.num_vertices();
        let x: Vec<i64> = if x.is_empty() {
            vec![0; nv]
        } else {
            x.to_vec()
        };
        if x.len() != nv {
            bail!(InvalidArgument, "expected {} offsets, got {}", nv, x.len());
        }
        let a1 = -(a_rest.iter().sum::<i64>() + x.iter().sum::<i64>());
        let mut leg_weights = vec![LinForm::constant(0, a1)];
        leg_weights.extend(a_rest.iter().map(|&a| LinForm::constant(0, a)));
        let spec = WeightingSpec {
            leg_factor: vec![LegFactor::Standard; n],
            leg_weights,
            offsets: x.iter().map(|&c| LinForm::constant(0, c)).collect(),
            nvars: 0,
            graph,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Formal weights `a_2..a_n` (skipping `silent`, which gets weight 0 and
    /// no leg factor) and, when `offsets` is set, a formal `x_v` per vertex.
    pub fn symbolic(
        graph: StableGraph,
        silent: Option<usize>,
        offsets: bool,
    ) -> Result<(Self, VarLayout)> {
        let n = graph.num_legs();
        let nv = graph.num_vertices();
        if n == 0 || silent == Some(0) {
            bail!(InvalidArgument, "the first leg carries the derived weight");
        }
        let mut next = 0;
        let mut a_var = vec![None; n];
        for (i, slot) in a_var.iter_mut().enumerate().skip(1) {
            if Some(i) != silent {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut x_var = vec![None; nv];
        if offsets {
            for slot in x_var.iter_mut() {
                *slot = Some(next);
                next += 1;
            }
        }
        let nvars = next;
        let mut leg_weights = vec![LinForm::zero(nvars); n];
        let mut total = LinForm::zero(nvars);
        for i in 1..n {
            if let Some(j) = a_var[i] {
                leg_weights[i] = LinForm::var(nvars, j);
                total = total.add(&leg_weights[i]);
            }
        }
        let mut offs = vec![LinForm::zero(nvars); nv];
        for v in 0..nv {
            if let Some(j) = x_var[v] {
                offs[v] = LinForm::var(nvars, j);
                total = total.add(&offs[v]);
            }
        }
        leg_weights[0] = total.neg();
        let mut leg_factor = vec![LegFactor::Standard; n];
        if let Some(s) = silent {
            leg_factor[s] = LegFactor::Silent;
        }
        let spec = WeightingSpec {
            graph,
            nvars,
            leg_weights,
            leg_factor,
            offsets: offs,
        };
        spec.validate()?;
        Ok((
            spec,
            VarLayout {
                a_var,
                x_var,
                nvars,
            },
        ))
    }

    pub fn validate(&self) -> Result<()> {
        let gr = &self.graph;
        if self.leg_weights.len() != gr.num_legs()
            || self.leg_factor.len() != gr.num_legs()
            || self.offsets.len() != gr.num_vertices()
        {
            bail!(InvalidArgument, "weighting data does not match the graph");
        }
        let mut total = LinForm::zero(self.nvars);
        for f in self.leg_weights.iter().chain(&self.offsets) {
            if f.coeffs.len() != self.nvars {
                bail!(
                    InvalidArgument,
                    "linear form over the wrong number of variables"
                );
            }
            total = total.add(f);
        }
        if !total.is_zero() {
            bail!(
                InvalidArgument,
                "leg weights and offsets do not sum to zero; no weighting exists"
            );
        }
        Ok(())
    }

    /// `q_v = x_v + sum of leg weights at v`.
    pub fn charges(&self) -> Vec<LinForm> {
        let mut q = self.offsets.clone();
        for (i, &v) in self.graph.legs().iter().enumerate() {
            q[v] = q[v].add(&self.leg_weights[i]);
        }
        q
    }

    fn is_numeric(&self) -> bool {
        self.nvars == 0
    }

    /// Edges plus tail legs: the degree carried without any ψ.
    pub fn base_degree(&self) -> u32 {
        (self.graph.num_edges()
            + self
                .leg_factor
                .iter()
                .filter(|f| **f == LegFactor::Tail)
                .count()) as u32
    }

    /// Appends one formal variable `z`, shifting leg `i` by `z` and leg 0 by `-z`
    /// so that the weights still balance.
    pub fn with_leg_shift(&self, i: usize) -> Result<(WeightingSpec, usize)> {
        if i == 0 || i >= self.graph.num_legs() {
            bail!(InvalidArgument, "leg {} cannot be shifted", i);
        }
        let z = self.nvars;
        let widen = |f: &LinForm| {
            let mut c = f.coeffs.clone();
            c.push(0);
            LinForm {
                constant: f.constant,
                coeffs: c,
            }
        };
        let mut out = WeightingSpec {
            graph: self.graph.clone(),
            nvars: z + 1,
            leg_weights: self.leg_weights.iter().map(widen).collect(),
            leg_factor: self.leg_factor.clone(),
            offsets: self.offsets.iter().map(widen).collect(),
        };
        out.leg_weights[i].coeffs[z] += 1;
        out.leg_weights[0].coeffs[z] -= 1;
        out.validate()?;
        Ok((out, z))
    }
}

/// Labeled ψ-polynomial on one graph, as computed by the kernel routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelResult {
    pub graph: StableGraph,
    /// Degree of the ψ-free part: edges plus tail legs.
    pub base_degree: u32,
    pub max_deg: u32,
    /// ψ-exponent vector over half-edges -> coefficient.
    pub values: BTreeMap<Vec<u32>, Rational>,
}

impl KernelResult {
    /// Degree-`d` part, scaled, as canonical classes.
    pub fn to_formal_sum(
        &self,
        d: u32,
        scale: &Rational,
        cache: &mut GraphCache,
    ) -> Result<FormalSum> {
        let mut out = FormalSum::new(self.graph.genus(), self.graph.num_legs());
        let e = self.base_degree;
        for (psi, c) in &self.values {
            if e + psi.iter().sum::<u32>() == d {
                out.add(
                    &DecoratedClass::new(self.graph.clone(), psi.clone())?,
                    &(c * scale),
                    cache,
                )?;
            }
        }
        Ok(out)
    }
}

/// `c(k) = (-1)^{k+1} / (2^k k!)`, the coefficient of `X^k (psi+psi')^{k-1}`
/// in the edge factor with `X = w w'`.
pub fn edge_coefficient(k: u32) -> Rational {
    let sign = if k % 2 == 1 { 1 } else { -1 };
    int(sign) / (int(1 << k) * factorial(k as i64).unwrap())
}

// ---------------------------------------------------------------------------
// Direct enumeration of weightings.

/// Spanning-tree bookkeeping for residue enumeration on a connected multigraph.
struct TreeSolver {
    nv: usize,
    edges: Vec<(usize, usize)>,
    /// Non-tree edges carry free residues.
    free: Vec<usize>,
    /// Vertices other than the root, children before parents, with their parent edge.
    order: Vec<(usize, usize)>,
}

impl TreeSolver {
    fn new(nv: usize, edges: &[(usize, usize)]) -> Self {
        let mut in_tree = vec![false; edges.len()];
        let mut seen = vec![false; nv];
        let mut bfs = vec![0usize];
        seen[0] = true;
        let mut parent_edge = vec![usize::MAX; nv];
        let mut i = 0;
        while i < bfs.len() {
            let v = bfs[i];
            i += 1;
            for (e, &(a, b)) in edges.iter().enumerate() {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        in_tree[e] = true;
                        parent_edge[y] = e;
                        bfs.push(y);
                    }
                }
            }
        }
        let order = bfs[1..]
            .iter()
            .rev()
            .map(|&v| (v, parent_edge[v]))
            .collect();
        let free = (0..edges.len()).filter(|&e| !in_tree[e]).collect();
        TreeSolver {
            nv,
            edges: edges.to_vec(),
            free,
            order,
        }
    }

    /// Calls `f` with the residue of every edge on its first endpoint.
    fn for_each(&self, r: i64, charges: &[i64], mut f: impl FnMut(&[i64])) {
        let m = self.free.len();
        let mut free_vals = vec![0i64; m];
        let mut t = vec![0i64; self.edges.len()];
        let mut need = vec![0i64; self.nv];
        loop {
            for v in 0..self.nv {
                need[v] = (-charges[v]).rem_euclid(r);
            }
            for (j, &e) in self.free.iter().enumerate() {
                let (a, b) = self.edges[e];
                t[e] = free_vals[j];
                need[a] -= free_vals[j];
                need[b] += free_vals[j];
            }
            for &(v, e) in &self.order {
                let (a, b) = self.edges[e];
                let w = need[v].rem_euclid(r);
                let parent = if a == v { b } else { a };
                t[e] = if a == v { w } else { (r - w) % r };
                need[v] -= w;
                need[parent] += w;
            }
            f(&t);
            let mut j = 0;
            loop {
                if j == m {
                    return;
                }
                free_vals[j] += 1;
                if free_vals[j] < r {
                    break;
                }
                free_vals[j] = 0;
                j += 1;
            }
        }
    }
}

fn numeric_charges(spec: &WeightingSpec) -> Result<Vec<i64>> {
    if !spec.is_numeric() {
        bail!(
            InvalidArgument,
            "weighting enumeration needs concrete weights"
        );
    }
    Ok(spec.charges().iter().map(|f| f.constant).collect())
}

/// Ring of ψ-series on the half-edges of `gr`, truncated at ψ-degree `t`.
fn psi_ring(gr: &StableGraph, t: u32) -> TruncatedSeries {
    let nh = gr.num_half_edges();
    TruncatedSeries::new(vec![t; nh]).with_cap(vec![1; nh], t)
}

fn psi_monomial(
    ring: &TruncatedSeries,
    offset: usize,
    h: usize,
    k: u32,
    c: Rational,
) -> TruncatedSeries {
    let mut s = ring.zero_like();
    let mut e = vec![0; ring.nvars()];
    e[offset + h] = k;
    s.add_term(e, c);
    s
}

/// `(psi_h + psi_h')^j` in `ring`, with ψ-variables starting at `offset`.
fn psi_sum_power(
    ring: &TruncatedSeries,
    offset: usize,
    h: usize,
    hp: usize,
    j: u32,
) -> TruncatedSeries {
    let mut s = ring.zero_like();
    for i in 0..=j {
        let mut e = vec![0; ring.nvars()];
        e[offset + h] += i;
        e[offset + hp] += j - i;
        s.add_term(e, binomial(j as i64, i as i64));
    }
    s
}

/// Weighting sum at a single `r`, all class degrees up to `max_deg`.
pub fn sum_weightings(spec: &WeightingSpec, r: i64, max_deg: u32) -> Result<KernelResult> {
    if r < 2 {
        bail!(InvalidArgument, "r must be at least 2");
    }
    let q = numeric_charges(spec)?;
    let gr = &spec.graph;
    let ne = spec.base_degree();
    let mut values = BTreeMap::new();
    if ne > max_deg {
        return Ok(KernelResult {
            graph: gr.clone(),
            base_degree: ne,
            max_deg,
            values,
        });
    }
    let t = max_deg - ne;
    let ring = psi_ring(gr, t);
    let mut legs = ring.one_like();
    for (i, f) in spec.leg_weights.iter().enumerate() {
        let half_a2 = rat(f.constant * f.constant, 2);
        let mut s = ring.zero_like();
        match spec.leg_factor[i] {
            LegFactor::Silent => continue,
            LegFactor::Standard => {
                for k in 0..=t {
                    let c = crate::exact_arith::pow(&half_a2, k) / factorial(k as i64)?;
                    s.add_assign(&psi_monomial(&ring, 0, i, k, c));
                }
            }
            LegFactor::Tail => {
                for k in 1..=t + 1 {
                    let c = -crate::exact_arith::pow(&half_a2, k) / factorial(k as i64)?;
                    s.add_assign(&psi_monomial(&ring, 0, i, k - 1, c));
                }
            }
        }
        legs = legs.mul(&s);
    }
    // Tally the multiset of edge products X_e = t_e (r - t_e).
    let solver = TreeSolver::new(gr.num_vertices(), gr.edges());
    let mut tally: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    solver.for_each(r, &q, |ts| {
        let key: Vec<i64> = ts.iter().map(|&x| x * (r - x)).collect();
        *tally.entry(key).or_default() += 1;
    });
    let mut total = ring.zero_like();
    for (xs, count) in tally {
        let mut prod = ring.one_like();
        for (e, &x) in xs.iter().enumerate() {
            let (h, hp) = gr.edge_half_edges(e);
            let mut f = ring.zero_like();
            for k in 1..=t + 1 {
                let mut p = psi_sum_power(&ring, 0, h, hp, k - 1);
                p.scale(&(edge_coefficient(k) * crate::exact_arith::pow(&int(x), k)));
                f.add_assign(&p);
            }
            prod = prod.mul(&f);
            if prod.is_zero() {
                break;
            }
        }
        prod.scale(&int(count));
        total.add_assign(&prod);
    }
    let mut scale = Rational::one();
    for _ in 0..gr.h1() {
        scale /= int(r);
    }
    total.scale(&scale);
    let full = total.mul(&legs);
    for (e, c) in full.terms() {
        values.insert(e.clone(), c.clone());
    }
    Ok(KernelResult {
        graph: gr.clone(),
        base_degree: ne,
        max_deg,
        values,
    })
}

/// Smallest `r` sampled for the r-constant term.
pub fn r_min(spec: &WeightingSpec, max_deg: u32) -> i64 {
    let legs: i64 = spec.leg_weights.iter().map(|f| f.abs_sum()).sum();
    let offs: i64 = spec.offsets.iter().map(|f| f.abs_sum()).sum();
    legs + offs + 2 * max_deg as i64 + 2
}

/// r-constant term of [`sum_weightings`], from `2 max_deg + 1 + 3` samples.
pub fn constant_term(spec: &WeightingSpec, max_deg: u32) -> Result<KernelResult> {
    let r0 = r_min(spec, max_deg);
    let bound = 2 * max_deg as usize;
    let nodes: Vec<i64> = (0..(bound + 1 + SURPLUS_SAMPLES) as i64)
        .map(|i| r0 + i)
        .collect();
    let mut samples = Vec::with_capacity(nodes.len());
    for &r in &nodes {
        samples.push(sum_weightings(spec, r, max_deg)?.values);
    }
    let values = constant_term_of_samples(&nodes, &samples, bound)?;
    Ok(KernelResult {
        graph: spec.graph.clone(),
        base_degree: spec.base_degree(),
        max_deg,
        values,
    })
}

// ---------------------------------------------------------------------------
// Factorized kernel.

/// 2-edge-connected piece with at least two vertices, in local labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct BlockKey {
    nv: usize,
    /// `(u, v, kappa)` with `u <= v`, sorted.
    edges: Vec<(usize, usize, u32)>,
}

impl BlockKey {
    /// Canonical relabeling; returns the key and `perm[local] = canonical`.
    fn canonical(nv: usize, edges: &[(usize, usize, u32)]) -> (BlockKey, Vec<usize>) {
        let mut best: Option<(BlockKey, Vec<usize>)> = None;
        for p in crate::stable_graphs::permutations(nv) {
            let mut es: Vec<(usize, usize, u32)> = edges
                .iter()
                .map(|&(a, b, k)| {
                    let (x, y) = (p[a], p[b]);
                    (x.min(y), x.max(y), k)
                })
                .collect();
            es.sort_unstable();
            let key = BlockKey { nv, edges: es };
            if best.as_ref().map_or(true, |(b, _)| key < *b) {
                best = Some((key, p));
            }
        }
        best.unwrap()
    }
}

/// Memo of block moment polynomials.
#[derive(Debug, Clone, Default)]
pub struct MomentCache {
    polys: BTreeMap<BlockKey, TruncatedSeries>,
    /// Number of r-constant-term extractions performed (each one verified
    /// against its surplus samples).
    pub verified_interpolations: u64,
}

impl MomentCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `Coeff_{r^0} r^{-h1} sum_w prod_e (t_e (r - t_e))^{kappa_e}` at integer charges.
    fn moment_value(&mut self, key: &BlockKey, q: &[i64]) -> Result<Rational> {
        let kk: u32 = key.edges.iter().map(|e| e.2).sum();
        let es: Vec<(usize, usize)> = key.edges.iter().map(|e| (e.0, e.1)).collect();
        let solver = TreeSolver::new(key.nv, &es);
        let h1 = es.len() + 1 - key.nv;
        let r0 = q.iter().map(|x| x.abs()).sum::<i64>() + 2 * kk as i64 + 2;
        let bound = 2 * kk as usize;
        let mut pts = Vec::new();
        for i in 0..(bound + 1 + SURPLUS_SAMPLES) as i64 {
            let r = r0 + i;
            let mut acc: i128 = 0;
            solver.for_each(r, q, |ts| {
                let mut prod: i128 = 1;
                for (e, &t) in ts.iter().enumerate() {
                    let x = (t * (r - t)) as i128;
                    for _ in 0..key.edges[e].2 {
                        prod *= x;
                    }
                }
                acc += prod;
            });
            let mut v = Rational::from_integer(acc.into());
            for _ in 0..h1 {
                v /= int(r);
            }
            pts.push((r, v));
        }
        let p = lagrange_interpolate(&pts, bound)?;
        self.verified_interpolations += 1;
        Ok(p.coeffs[0].clone())
    }

    /// Moment polynomial in the charges of canonical vertices `0..nv-1`
    /// (the last charge is minus their sum).
    fn moment_poly(&mut self, key: &BlockKey) -> Result<TruncatedSeries> {
        if let Some(p) = self.polys.get(key) {
            return Ok(p.clone());
        }
        let kk: u32 = key.edges.iter().map(|e| e.2).sum();
        let dims = key.nv - 1;
        let nodes: Vec<i64> = (0..=2 * kk as i64).collect();
        let side = nodes.len();
        let mut values = Vec::with_capacity(side.pow(dims as u32));
        for flat in 0..side.pow(dims as u32) {
            let mut q = vec![0i64; dims + 1];
            let mut rest = flat;
            for j in (0..dims).rev() {
                q[j] = nodes[rest % side];
                rest /= side;
            }
            q[dims] = -q[..dims].iter().sum::<i64>();
            values.push(self.moment_value(key, &q)?);
        }
        let poly = tensor_interpolate(&nodes, dims, &values)?;
        self.polys.insert(key.clone(), poly.clone());
        Ok(poly)
    }
}

/// Which monomials in the formal variables to keep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelTarget {
    /// Required exponent per formal variable, or `None` for free.
    pub exact: Vec<Option<u32>>,
    /// Required total degree in the formal variables.
    pub total: Option<u32>,
    /// Half-edges whose ψ-exponent is forced to zero.
    pub zero_psi: Vec<usize>,
}

impl KernelTarget {
    pub fn any(nvars: usize) -> Self {
        KernelTarget {
            exact: vec![None; nvars],
            total: None,
            zero_psi: Vec::new(),
        }
    }

    pub fn monomial(e: &[u32]) -> Self {
        KernelTarget {
            exact: e.iter().map(|&x| Some(x)).collect(),
            total: Some(e.iter().sum()),
            zero_psi: Vec::new(),
        }
    }
}

/// Edge classification of a graph for the factorized kernel.
struct Pieces {
    loops: Vec<usize>,
    /// Bridge and the vertices on the side of its first endpoint.
    bridges: Vec<(usize, Vec<usize>)>,
    /// Block: its vertices (global ids) and edges.
    blocks: Vec<(Vec<usize>, Vec<usize>)>,
}

fn reachable(nv: usize, edges: &[(usize, usize)], skip: &[bool], start: usize) -> Vec<bool> {
    let mut seen = vec![false; nv];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for (e, &(a, b)) in edges.iter().enumerate() {
            if skip[e] {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen
}

fn pieces(gr: &StableGraph) -> Pieces {
    let nv = gr.num_vertices();
    let es = gr.edges();
    let mut loops = Vec::new();
    let mut bridges = Vec::new();
    let mut cyclic = Vec::new();
    for (e, &(a, b)) in es.iter().enumerate() {
        if a == b {
            loops.push(e);
            continue;
        }
        let mut skip = vec![false; es.len()];
        skip[e] = true;
        let seen = reachable(nv, es, &skip, a);
        if seen[b] {
            cyclic.push(e);
        } else {
            bridges.push((e, (0..nv).filter(|&v| seen[v]).collect()));
        }
    }
    // Blocks: components of the cyclic edges.
    let mut skip = vec![true; es.len()];
    for &e in &cyclic {
        skip[e] = false;
    }
    let mut assigned = vec![false; nv];
    let mut blocks = Vec::new();
    for &e in &cyclic {
        let a = es[e].0;
        if assigned[a] {
            continue;
        }
        let seen = reachable(nv, es, &skip, a);
        let verts: Vec<usize> = (0..nv).filter(|&v| seen[v]).collect();
        for &v in &verts {
            assigned[v] = true;
        }
        let bes: Vec<usize> = cyclic.iter().copied().filter(|&f| seen[es[f].0]).collect();
        blocks.push((verts, bes));
    }
    Pieces {
        loops,
        bridges,
        blocks,
    }
}

/// Factorized evaluation of weighting-sum constant terms.
#[derive(Debug, Default)]
pub struct Kernel {
    pub moments: MomentCache,
}

/// Vector of exponent sums over `range`.
fn deg(e: &[u32], range: core::ops::Range<usize>) -> u32 {
    e[range].iter().sum()
}

impl Kernel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Degree-`d` part of the r-constant term on `spec.graph`, as a series in
    /// the formal variables (first `spec.nvars` slots) and one ψ-variable per
    /// half-edge. Only monomials allowed by `target` are kept. When the target
    /// asks for formal degree `2d`, only top-degree parts of each factor are
    /// formed.
    pub fn class_poly(
        &mut self,
        spec: &WeightingSpec,
        d: u32,
        target: &KernelTarget,
    ) -> Result<TruncatedSeries> {
        let gr = &spec.graph;
        let ny = spec.nvars;
        let nh = gr.num_half_edges();
        let ne = spec.base_degree();
        if target.exact.len() != ny {
            bail!(
                InvalidArgument,
                "target over {} variables, spec has {}",
                target.exact.len(),
                ny
            );
        }
        let ymax = target.total.unwrap_or(2 * d);
        let mut orders: Vec<u32> = target
            .exact
            .iter()
            .map(|x| x.unwrap_or(ymax).min(ymax))
            .collect();
        let t = d.saturating_sub(ne);
        orders.extend(core::iter::repeat(t).take(nh));
        for &h in &target.zero_psi {
            orders[ny + h] = 0;
        }
        let mut ywt = vec![1u32; ny];
        ywt.extend(core::iter::repeat(0).take(nh));
        let mut pwt = vec![0u32; ny];
        pwt.extend(core::iter::repeat(1).take(nh));
        let ring = TruncatedSeries::new(orders)
            .with_cap(ywt, ymax)
            .with_cap(pwt, t);
        if ne > d || target.exact.iter().flatten().sum::<u32>() > ymax {
            return Ok(ring);
        }
        let top = target.total == Some(2 * d);
        // Keeps only terms whose formal degree is twice their class degree.
        let top_filter = |s: &mut TruncatedSeries, edges: u32| {
            if top {
                s.retain(|e, _| deg(e, 0..ny) == 2 * (deg(e, ny..ny + nh) + edges));
            }
        };
        let mut factors: Vec<TruncatedSeries> = Vec::new();
        let pcs = pieces(gr);
        // Self-loops: constant moments, never top degree.
        if top && !pcs.loops.is_empty() {
            return Ok(ring);
        }
        let bern = bernoulli_table(2 * (t as usize + 2));
        for &e in &pcs.loops {
            let (h, hp) = gr.edge_half_edges(e);
            let mut f = ring.zero_like();
            for k in 1..=t + 1 {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let mut p = psi_sum_power(&ring, ny, h, hp, k - 1);
                p.scale(&(edge_coefficient(k) * int(sign) * &bern[2 * k as usize]));
                f.add_assign(&p);
            }
            factors.push(f);
        }
        let q = spec.charges();
        for (e, side) in &pcs.bridges {
            let mut s = LinForm::zero(ny);
            for &v in side {
                s = s.add(&q[v]);
            }
            let ss = s.series(&ring);
            let mut neg_s2 = ss.mul(&ss);
            neg_s2.scale(&int(-1));
            let (h, hp) = gr.edge_half_edges(*e);
            let mut f = ring.zero_like();
            let mut pw = ring.one_like();
            for k in 1..=t + 1 {
                pw = pw.mul(&neg_s2);
                let mut p = psi_sum_power(&ring, ny, h, hp, k - 1).mul(&pw);
                p.scale(&edge_coefficient(k));
                f.add_assign(&p);
            }
            top_filter(&mut f, 1);
            factors.push(f);
        }
        for (verts, bes) in &pcs.blocks {
            let f = self.block_factor(gr, &q, verts, bes, t, &ring, ny, top)?;
            factors.push(f);
        }
        for (i, w) in spec.leg_weights.iter().enumerate() {
            let tail = match spec.leg_factor[i] {
                LegFactor::Silent => continue,
                LegFactor::Standard => false,
                LegFactor::Tail => true,
            };
            let s = w.series(&ring);
            let mut half_s2 = s.mul(&s);
            half_s2.scale(&rat(1, 2));
            let mut f = ring.zero_like();
            let mut pw = ring.one_like();
            for k in 0..=t + 1 {
                if k > 0 {
                    pw = pw.mul(&half_s2);
                }
                let (exp, sign) = if tail {
                    if k == 0 {
                        continue;
                    }
                    (k - 1, -1)
                } else {
                    if k > t {
                        break;
                    }
                    (k, 1)
                };
                let mut p = psi_monomial(&ring, ny, i, exp, Rational::one()).mul(&pw);
                p.scale(&(int(sign) / factorial(k as i64)?));
                f.add_assign(&p);
            }
            top_filter(&mut f, tail as u32);
            factors.push(f);
        }
        // Multiply the smallest factors first.
        factors.sort_by_key(|f| f.len());
        let mut acc = ring.one_like();
        for f in &factors {
            acc = acc.mul(f);
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        let total = target.total;
        acc.retain(|e, _| {
            deg(e, ny..ny + nh) == t
                && total.map_or(true, |tt| deg(e, 0..ny) == tt)
                && target
                    .exact
                    .iter()
                    .zip(e)
                    .all(|(x, y)| x.map_or(true, |x| x == *y))
        });
        Ok(acc)
    }

    #[allow(clippy::too_many_arguments)]
    fn block_factor(
        &mut self,
        gr: &StableGraph,
        q: &[LinForm],
        verts: &[usize],
        bes: &[usize],
        t: u32,
        ring: &TruncatedSeries,
        ny: usize,
        top: bool,
    ) -> Result<TruncatedSeries> {
        let nv = gr.num_vertices();
        let es = gr.edges();
        // Region charge of each block vertex: remove the block's edges and
        // sum the charges of its component.
        let mut skip = vec![false; es.len()];
        for &e in bes {
            skip[e] = true;
        }
        let local: BTreeMap<usize, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut region = Vec::with_capacity(verts.len());
        for &v in verts {
            let seen = reachable(nv, es, &skip, v);
            let mut s = LinForm::zero(ny);
            for u in 0..nv {
                if seen[u] {
                    s = s.add(&q[u]);
                }
            }
            region.push(s);
        }
        let mut out = ring.zero_like();
        let nb = bes.len();
        // All kappa vectors with kappa_e >= 1 and sum(kappa_e - 1) <= t.
        let mut kappa = vec![1u32; nb];
        loop {
            let extra: u32 = kappa.iter().map(|k| k - 1).sum();
            if extra <= t {
                let ledges: Vec<(usize, usize, u32)> = bes
                    .iter()
                    .zip(&kappa)
                    .map(|(&e, &k)| (local[&es[e].0], local[&es[e].1], k))
                    .collect();
                let (key, perm) = BlockKey::canonical(verts.len(), &ledges);
                let poly = self.moments.moment_poly(&key)?;
                let kk: u32 = kappa.iter().sum();
                // Charge form of each canonical vertex.
                let mut canon_q = vec![LinForm::zero(ny); verts.len()];
                for (i, f) in region.iter().enumerate() {
                    canon_q[perm[i]] = f.clone();
                }
                let qs: Vec<TruncatedSeries> = canon_q[..verts.len() - 1]
                    .iter()
                    .map(|f| f.series(ring))
                    .collect();
                let mut m = ring.zero_like();
                for (e, c) in poly.terms() {
                    if top && e.iter().sum::<u32>() != 2 * kk {
                        continue;
                    }
                    let mut term = ring.constant_like(c.clone());
                    for (j, &x) in e.iter().enumerate() {
                        if x > 0 {
                            term = term.mul(&qs[j].pow(x));
                        }
                    }
                    m.add_assign(&term);
                }
                let mut psi_part = ring.one_like();
                for (&e, &k) in bes.iter().zip(&kappa) {
                    let (h, hp) = gr.edge_half_edges(e);
                    let mut p = psi_sum_power(ring, ny, h, hp, k - 1);
                    p.scale(&edge_coefficient(k));
                    psi_part = psi_part.mul(&p);
                }
                out.add_assign(&psi_part.mul(&m));
            }
            // odometer
            let mut j = 0;
            loop {
                if j == nb {
                    return Ok(out);
                }
                kappa[j] += 1;
                if kappa[j] - 1 <= t {
                    break;
                }
                kappa[j] = 1;
                j += 1;
            }
        }
    }

    /// Degree-`d` r-constant term for concrete weights, on the labeled graph.
    pub fn numeric_class(&mut self, spec: &WeightingSpec, d: u32) -> Result<KernelResult> {
        if !spec.is_numeric() {
            bail!(InvalidArgument, "numeric_class needs concrete weights");
        }
        let s = self.class_poly(spec, d, &KernelTarget::any(0))?;
        Ok(KernelResult {
            graph: spec.graph.clone(),
            base_degree: spec.base_degree(),
            max_deg: d,
            values: s.into_terms(),
        })
    }
}

/// A monomial in the formal variables of a symbolic spec.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonomialKey {
    pub exponents: Vec<u32>,
}

/// Coefficient of `monomial` in the degree-`d` part, as labeled ψ-polynomial.
pub fn coefficient(
    kernel: &mut Kernel,
    spec: &WeightingSpec,
    monomial: &MonomialKey,
    d: u32,
) -> Result<KernelResult> {
    let s = kernel.class_poly(spec, d, &KernelTarget::monomial(&monomial.exponents))?;
    let ny = spec.nvars;
    let mut values = BTreeMap::new();
    for (e, c) in s.terms() {
        values.insert(e[ny..].to_vec(), c.clone());
    }
    Ok(KernelResult {
        graph: spec.graph.clone(),
        base_degree: spec.base_degree(),
        max_deg: d,
        values,
    })
}

/// `D^d_{g,n}(a_2, ..., a_n)` with `a_1` derived.
pub fn pixton_class(
    kernel: &mut Kernel,
    cache: &mut GraphCache,
    g: u32,
    n: usize,
    a: &[i64],
    d: u32,
) -> Result<FormalSum> {
    pixton_class_with(cache, g, n, a, d, |spec| kernel.numeric_class(spec, d))
}

/// Same class through direct weighting enumeration and r-interpolation.
pub fn pixton_class_sampled(
    cache: &mut GraphCache,
    g: u32,
    n: usize,
    a: &[i64],
    d: u32,
) -> Result<FormalSum> {
    pixton_class_with(cache, g, n, a, d, |spec| constant_term(spec, d))
}

fn pixton_class_with(
    cache: &mut GraphCache,
    g: u32,
    n: usize,
    a: &[i64],
    d: u32,
    mut eval: impl FnMut(&WeightingSpec) -> Result<KernelResult>,
) -> Result<FormalSum> {
    if n == 0 {
        bail!(InvalidArgument, "at least one marking is required");
    }
    let mut out = FormalSum::new(g, n);
    for gr in cache.enumerate(g, n, d as usize)? {
        let aut = cache.automorphism_order(&gr);
        let spec = WeightingSpec::numeric(gr, a, &[])?;
        let res = eval(&spec)?;
        let part = res.to_formal_sum(d, &rat(1, aut as i64), cache)?;
        out.add_sum(&part, &Rational::one())?;
    }
    Ok(out)
}

/// Closed form of the `m`-loop single-vertex part of `D^g_{g,n}(0, ..., 0)`:
/// `2^{-g} (-1)^m / (m! 2^m) sum_{k_1+..+k_m=g} prod B_{2k_i}/k_i! (psi_h+psi_h')^{k_i-1}`.
pub fn loop_contribution_closed_form(
    cache: &mut GraphCache,
    g: u32,
    m: usize,
    n: usize,
) -> Result<FormalSum> {
    if m == 0 || m as u32 > g {
        bail!(InvalidArgument, "need 1 <= m <= g");
    }
    let gr = crate::stable_graphs::bouquet_graph(g - m as u32, m, n)?;
    let nh = gr.num_half_edges();
    let t = g - m as u32;
    let ring = psi_ring(&gr, t);
    let bern = bernoulli_table(2 * g as usize);
    let mut total = ring.zero_like();
    let mut ks = vec![1u32; m];
    loop {
        if ks.iter().sum::<u32>() == g {
            let mut p = ring.one_like();
            for (i, &k) in ks.iter().enumerate() {
                let (h, hp) = gr.edge_half_edges(i);
                let mut f = psi_sum_power(&ring, 0, h, hp, k - 1);
                f.scale(&(&bern[2 * k as usize] / factorial(k as i64)?));
                p = p.mul(&f);
            }
            total.add_assign(&p);
        }
        let mut j = 0;
        loop {
            if j == m {
                let sign = if m % 2 == 0 { 1 } else { -1 };
                let scale = int(sign) / (factorial(m as i64)? * int(1 << m) * int(1 << g));
                let mut out = FormalSum::new(g, n);
                for (e, c) in total.terms() {
                    debug_assert_eq!(e.len(), nh);
                    out.add(
                        &DecoratedClass::new(gr.clone(), e.clone())?,
                        &(c * &scale),
                        cache,
                    )?;
                }
                return Ok(out);
            }
            ks[j] += 1;
            if ks[j] <= g {
                break;
            }
            ks[j] = 1;
            j += 1;
        }
    }
}

/// `sum_h 8^{-h} F(c_h)` applied to the single-vertex loop parts of
/// `D^g(0, ..., 0)`, times `(-1)^g`: the coefficient of the bouquet class
/// in `lambda_g` after every smooth-vertex ψ-monomial has been replaced by
/// its topological recursion relation.
pub fn lambda_bouquet_coefficient(parts: &FormalSum) -> Rational {
    let g = parts.genus();
    let mut acc = Rational::zero();
    for (h, poly) in parts.bouquet_coefficients() {
        let mut w = crate::strata::f_functional(&poly);
        for _ in 0..h {
            w /= int(8);
        }
        acc += w;
    }
    if g % 2 == 1 {
        -acc
    } else {
        acc
    }
}

/// `[(-1)^g 2^{-g} t^2 e^t / (e^t - 1)^2]_{t^{2g}}`.
pub fn lambda_generating_coefficient(g: u32) -> Rational {
    let c = crate::exact_arith::NamedSeries::ToddSquared.coefficients(2 * g as usize);
    let v = &c[2 * g as usize] / int(1 << g);
    if g % 2 == 1 {
        -v
    } else {
        v
    }
}
