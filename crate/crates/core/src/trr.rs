//! Topological recursion relations built from Pixton-style weighting sums.
//!
//! `omega(g, n, M)` is a degree-`(g+1)` relation on `M_{g,n+1}` indexed by a
//! monomial `M` in `a_2, ..., a_n`; its pushforward forgetting the last
//! marking is a degree-`g` relation on `M_{g,n}`. Monomial relations
//! `prod psi_i^{k_i} = boundary` are combined from these by exact linear
//! algebra and then reduced so that no genus-`h` vertex carries ψ-degree
//! `h` or more (at least `1` for `h = 0`).
//!
//! Legs are 0-based throughout: leg `0` plays the role of the first marking,
//! whose weight is determined by the others.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::engine::{compositions, dilaton_factor, monomials_up_to, Engine};
use crate::error::{bail, Error, Result};
use crate::exact_arith::{
    double_factorial, factorial, int, rat, solve_columns, Rational, TruncatedSeries,
};
use crate::pixton::{KernelTarget, LegFactor, WeightingSpec};
use crate::stable_graphs::{
    bouquet_graph, graft, permutations, rational_tail_graphs, GraphCache, StableGraph,
};
use crate::strata::{f_monomial, DecoratedClass, FormalSum, IntersectionProvider};

/// How far a relation has been processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Normalization {
    /// As produced by a linear combination.
    Raw,
    /// Leading coefficient divided out.
    Leading,
    /// Leading monomial alone on the smooth locus and every boundary vertex
    /// below the ψ-degree bound.
    NormalForm,
}

/// `leading_coefficient * prod psi_i^{leading_i} = boundary` on `M_{g,n}`.
///
/// `boundary` holds every other term, including lower ψ-monomials on the
/// trivial graph for raw relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub g: u32,
    pub n: usize,
    pub leading: Vec<u32>,
    pub leading_coefficient: Rational,
    pub boundary: FormalSum,
    pub normalization: Normalization,
}

impl Relation {
    /// Reads a relation `sum = 0` with the given leading monomial.
    pub fn from_sum(
        sum: &FormalSum,
        leading: Vec<u32>,
        cache: &mut GraphCache,
    ) -> Result<Relation> {
        let (g, n) = (sum.genus(), sum.num_markings());
        let lead = DecoratedClass::trivial(g, &leading)?;
        let c = sum.coefficient_of(&lead, cache);
        let mut boundary = FormalSum::new(g, n);
        boundary.add(&lead, &c, cache)?;
        boundary.add_sum(sum, &int(-1))?;
        Ok(Relation {
            g,
            n,
            leading,
            leading_coefficient: c,
            boundary,
            normalization: Normalization::Raw,
        })
    }

    pub fn leading_class(&self) -> DecoratedClass {
        DecoratedClass::trivial(self.g, &self.leading).expect("leading monomial matches the type")
    }

    /// The relation as a class that vanishes: `c * leading - boundary`.
    pub fn as_sum(&self, cache: &mut GraphCache) -> Result<FormalSum> {
        let mut s = FormalSum::new(self.g, self.n);
        s.add(&self.leading_class(), &self.leading_coefficient, cache)?;
        s.add_sum(&self.boundary, &int(-1))?;
        Ok(s)
    }

    /// Divides by the leading coefficient, which must be nonzero.
    pub fn normalized(&self) -> Result<Relation> {
        if self.leading_coefficient.is_zero() {
            return Err(Error::Infeasible("leading coefficient vanishes".into()));
        }
        let inv = Rational::one() / &self.leading_coefficient;
        Ok(Relation {
            boundary: self.boundary.scaled(&inv),
            leading_coefficient: Rational::one(),
            normalization: self.normalization.max(Normalization::Leading),
            ..self.clone()
        })
    }

    /// Relabels legs, leg `i` becoming `sigma[i]`.
    pub fn permute_legs(&self, sigma: &[usize], cache: &mut GraphCache) -> Relation {
        let mut leading = vec![0; self.n];
        for i in 0..self.n {
            leading[sigma[i]] = self.leading[i];
        }
        Relation {
            leading,
            boundary: self.boundary.permute_legs(sigma, cache),
            ..self.clone()
        }
    }

    /// Coefficient of a class on the boundary side.
    pub fn boundary_coefficient(&self, class: &DecoratedClass, cache: &mut GraphCache) -> Rational {
        self.boundary.coefficient_of(class, cache)
    }
}

fn check_monomial(g: u32, n: usize, m: &[u32]) -> Result<u32> {
    if n == 0 || m.len() != n - 1 {
        bail!(
            InvalidArgument,
            "a monomial on {} markings has {} exponents, got {}",
            n,
            n.saturating_sub(1),
            m.len()
        );
    }
    let d: u32 = m.iter().sum();
    if d > 2 * g + 1 {
        bail!(
            InvalidArgument,
            "monomial degree {} exceeds 2g+1 = {}",
            d,
            2 * g + 1
        );
    }
    Ok(d)
}

/// Target with exponent `a_exps[i-1]` on the variable of leg `i`.
fn a_target(a_var: &[Option<usize>], nvars: usize, a_exps: &[u32], total: u32) -> KernelTarget {
    let mut t = KernelTarget::any(nvars);
    for (i, v) in a_var.iter().enumerate().skip(1) {
        if let Some(j) = *v {
            t.exact[j] = Some(a_exps[i - 1]);
        }
    }
    t.total = Some(total);
    t
}

fn vertex_weight(gr: &StableGraph, ms: &[u32]) -> Rational {
    let mut w = Rational::one();
    for (v, &m) in ms.iter().enumerate() {
        w *= dilaton_factor(gr.vertex_genus(v), gr.valence(v), m);
    }
    w
}

/// `Omega_{g,M}` on `M_{g,n+1}`. `m` holds the exponents of `a_2, ..., a_n`.
pub fn omega(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<FormalSum> {
    let deg_m = check_monomial(g, n, m)?;
    let free = 2 * g + 1 - deg_m;
    let ff = factorial(free as i64)?;
    let mut out = FormalSum::new(g, n + 1);
    for gr in engine.graphs.enumerate(g, n + 1, g as usize + 1)? {
        let aut = engine.graphs.automorphism_order(&gr);
        let (spec, lay) = WeightingSpec::symbolic(gr.clone(), Some(n), true)?;
        let target = a_target(&lay.a_var, lay.nvars, m, 2 * g + 2);
        let poly = engine.kernel.class_poly(&spec, g + 1, &target)?;
        let vstar = gr.legs()[n];
        let ny = spec.nvars;
        for (e, c) in poly.terms() {
            let mut ms: Vec<u32> = lay.x_var.iter().map(|x| e[x.unwrap()]).collect();
            if ms[vstar] == 0 {
                continue;
            }
            ms[vstar] -= 1;
            debug_assert_eq!(ms.iter().sum::<u32>(), free);
            let w = int(ms[vstar] as i64 + 1) * &ff * vertex_weight(&gr, &ms) / int(aut as i64);
            out.add(
                &DecoratedClass::new(gr.clone(), e[ny..].to_vec())?,
                &(c * w),
                &mut engine.graphs,
            )?;
        }
    }
    Ok(out)
}

/// `Omega_{g,M}` straight from its definition: the coefficient of
/// `M a_{n+1} ... a_N` in the full class on `M_{g,N}`, times ψ on legs
/// `n+1 .. N-1`, pushed forward to `M_{g,n+1}`. Only for `N <= 6`.
pub fn omega_naive(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<FormalSum> {
    let deg_m = check_monomial(g, n, m)?;
    let big_n = n + (2 * g + 2 - deg_m) as usize;
    if big_n > 6 {
        bail!(
            Unsupported,
            "naive evaluation needs {} markings; at most 6 are supported",
            big_n
        );
    }
    let d = g + 1;
    let mut a_exps = m.to_vec();
    a_exps.resize(big_n - 1, 1);
    let mut cur = FormalSum::new(g, big_n);
    for gr in engine.graphs.enumerate(g, big_n, d as usize)? {
        let aut = engine.graphs.automorphism_order(&gr);
        let (spec, lay) = WeightingSpec::symbolic(gr.clone(), None, false)?;
        let poly =
            engine
                .kernel
                .class_poly(&spec, d, &a_target(&lay.a_var, lay.nvars, &a_exps, 2 * d))?;
        let ny = spec.nvars;
        for (e, c) in poly.terms() {
            let mut psi = e[ny..].to_vec();
            for p in psi.iter_mut().take(big_n).skip(n + 1) {
                *p += 1;
            }
            cur.add(
                &DecoratedClass::new(gr.clone(), psi)?,
                &(c / int(aut as i64)),
                &mut engine.graphs,
            )?;
        }
    }
    while cur.num_markings() > n + 1 {
        cur = cur.forget_last_leg(&mut engine.graphs)?;
    }
    Ok(cur)
}

fn check_pushforward(g: u32, n: usize, m: &[u32]) -> Result<u32> {
    let d = check_monomial(g, n, m)?;
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Unstable { g, n });
    }
    Ok(d)
}

/// `pi_* Omega_{g,M}` by forgetting the last marking of [`omega`].
pub fn pushforward_omega_via_forget(
    engine: &mut Engine,
    g: u32,
    n: usize,
    m: &[u32],
) -> Result<FormalSum> {
    check_pushforward(g, n, m)?;
    omega(engine, g, n, m)?.forget_last_leg(&mut engine.graphs)
}

/// Edge `f` of `gr` subdivided by a genus-0 vertex carrying a new last leg.
/// Returns the graph, the two half-edges at the new vertex, and the map from
/// the new half-edges back to those of `gr` (`None` at the new vertex).
fn split_edge(gr: &StableGraph, f: usize) -> Result<(StableGraph, [usize; 2], Vec<Option<usize>>)> {
    let n = gr.num_legs();
    let ne = gr.num_edges();
    let u = gr.num_vertices();
    let mut genera = gr.genera().to_vec();
    genera.push(0);
    let mut legs = gr.legs().to_vec();
    legs.push(u);
    let mut edges = gr.edges().to_vec();
    let (a, b) = edges[f];
    edges[f] = (a, u);
    edges.push((u, b));
    let out = StableGraph::new(genera, legs, edges)?;
    let mut back = vec![None; out.num_half_edges()];
    for (i, slot) in back.iter_mut().enumerate().take(n) {
        *slot = Some(i);
    }
    for e in 0..ne {
        for s in 0..2 {
            back[n + 1 + 2 * e + s] = Some(n + 2 * e + s);
        }
    }
    back[n + 1 + 2 * f + 1] = None;
    back[n + 1 + 2 * ne] = None;
    back[n + 1 + 2 * ne + 1] = Some(n + 2 * f + 1);
    Ok((out, [n + 1 + 2 * f + 1, n + 1 + 2 * ne], back))
}

/// `pi_* Omega_{g,M}` on `M_{g,n}`, assembled over `G_{g,n}` from the three
/// ways a graph with one more leg maps onto a graph `Gamma`:
/// the leg sits on a vertex of `Gamma` (string equation there), it sits on
/// a genus-0 tail replacing leg `i`, or it subdivides an edge.
pub fn pushforward_omega(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<FormalSum> {
    let deg_m = check_pushforward(g, n, m)?;
    let key = (g, n, m.to_vec());
    if let Some(s) = engine.pushforwards.get(&key) {
        return Ok(s.clone());
    }
    let free = 2 * g + 1 - deg_m;
    let ff = factorial(free as i64)?;
    let total = 2 * g + 2;
    let mut out = FormalSum::new(g, n);
    for gr in engine.graphs.enumerate(g, n, g as usize + 1)? {
        let aut = engine.graphs.automorphism_order(&gr);
        let base = ff.clone() / int(aut as i64);
        let nv = gr.num_vertices();

        let (spec, lay) = WeightingSpec::symbolic(gr.clone(), None, true)?;
        let ny = spec.nvars;
        let poly = engine
            .kernel
            .class_poly(&spec, g + 1, &a_target(&lay.a_var, ny, m, total))?;
        for vstar in 0..nv {
            let at = gr.half_edges_at(vstar);
            for (e, c) in poly.terms() {
                let mut ms: Vec<u32> = lay.x_var.iter().map(|x| e[x.unwrap()]).collect();
                if ms[vstar] == 0 {
                    continue;
                }
                ms[vstar] -= 1;
                let mut w = int(ms[vstar] as i64 + 1) * &base;
                for (v, &mv) in ms.iter().enumerate() {
                    let extra = usize::from(v == vstar);
                    w *= dilaton_factor(gr.vertex_genus(v), gr.valence(v) + extra, mv);
                }
                let cw = c * w;
                let psi = &e[ny..];
                for &h in &at {
                    if psi[h] > 0 {
                        let mut p = psi.to_vec();
                        p[h] -= 1;
                        out.add(
                            &DecoratedClass::new(gr.clone(), p)?,
                            &cw,
                            &mut engine.graphs,
                        )?;
                    }
                }
            }
        }

        for i in 1..n {
            let (mut s2, z) = spec.with_leg_shift(i)?;
            s2.leg_factor[i] = LegFactor::Tail;
            let poly =
                engine
                    .kernel
                    .class_poly(&s2, g + 1, &a_target(&lay.a_var, s2.nvars, m, total))?;
            for (e, c) in poly.terms() {
                if e[z] == 0 {
                    continue;
                }
                let mstar = e[z] - 1;
                let ms: Vec<u32> = lay.x_var.iter().map(|x| e[x.unwrap()]).collect();
                let w = factorial(mstar as i64 + 1)? * &base * vertex_weight(&gr, &ms);
                out.add(
                    &DecoratedClass::new(gr.clone(), e[s2.nvars..].to_vec())?,
                    &(c * w),
                    &mut engine.graphs,
                )?;
            }
        }

        for f in 0..gr.num_edges() {
            let (g3, at_u, back) = split_edge(&gr, f)?;
            let (s3, l3) = WeightingSpec::symbolic(g3.clone(), Some(n), true)?;
            let mut target = a_target(&l3.a_var, s3.nvars, m, total);
            target.zero_psi = at_u.to_vec();
            let poly = engine.kernel.class_poly(&s3, g + 1, &target)?;
            let xu = l3.x_var[nv].unwrap();
            for (e, c) in poly.terms() {
                if e[xu] == 0 {
                    continue;
                }
                let mstar = e[xu] - 1;
                let ms: Vec<u32> = (0..nv).map(|v| e[l3.x_var[v].unwrap()]).collect();
                let w = factorial(mstar as i64 + 1)? * &base * vertex_weight(&gr, &ms);
                let mut psi = vec![0u32; gr.num_half_edges()];
                for (h, b) in back.iter().enumerate() {
                    let x = e[s3.nvars + h];
                    match b {
                        Some(hh) => psi[*hh] = x,
                        None => debug_assert_eq!(x, 0),
                    }
                }
                out.add(
                    &DecoratedClass::new(gr.clone(), psi)?,
                    &(c * w),
                    &mut engine.graphs,
                )?;
            }
        }
    }
    engine.pushforwards.insert(key, out.clone());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Closed forms on the two bouquet-type graphs.

/// Polynomial ring for the closed forms: `a_2..a_n`, `x`, `x*`, then ψ's.
struct ClosedRing {
    base: TruncatedSeries,
    na: usize,
}

impl ClosedRing {
    fn new(n: usize, npsi: usize, formal: u32, psi_deg: u32) -> Self {
        let na = n - 1;
        let ny = na + 2;
        let mut orders = vec![formal; ny];
        orders.extend(core::iter::repeat(psi_deg).take(npsi));
        let mut yw = vec![1; ny];
        yw.extend(core::iter::repeat(0).take(npsi));
        let pw: Vec<u32> = yw.iter().map(|&w| 1 - w).collect();
        ClosedRing {
            base: TruncatedSeries::new(orders)
                .with_cap(yw, formal)
                .with_cap(pw, psi_deg),
            na,
        }
    }

    fn x(&self) -> usize {
        self.na
    }

    fn xstar(&self) -> usize {
        self.na + 1
    }

    fn psi(&self, i: usize) -> usize {
        self.na + 2 + i
    }

    /// `sum_j c_j y_j` over formal variables.
    fn linear(&self, coeffs: &[(usize, i64)]) -> TruncatedSeries {
        let mut s = self.base.zero_like();
        for &(j, c) in coeffs {
            let mut e = vec![0; self.base.nvars()];
            e[j] = 1;
            s.add_term(e, int(c));
        }
        s
    }

    /// Weight of leg `i`: `a_i` for `i >= 1`, plus optional `x*`.
    fn a(&self, i: usize) -> (usize, i64) {
        (i - 1, 1)
    }

    fn psi_power(&self, i: usize, k: u32, c: Rational) -> TruncatedSeries {
        let mut e = vec![0; self.base.nvars()];
        e[self.psi(i)] = k;
        let mut s = self.base.zero_like();
        s.add_term(e, c);
        s
    }

    /// `sum_{k >= k0} (s^2/2)^k psi^{k - k0} / k!`; `k0 = 0` gives the exponential.
    fn exp_half_square(&self, s: &TruncatedSeries, i: usize, k0: u32) -> TruncatedSeries {
        let mut half = s.mul(s);
        half.scale(&rat(1, 2));
        let mut out = self.base.zero_like();
        let mut pw = self.base.one_like();
        let top = self.base.orders()[self.psi(i)] + k0;
        for k in 0..=top {
            if k > 0 {
                pw = pw.mul(&half);
            }
            if k >= k0 {
                out.add_assign(
                    &self
                        .psi_power(i, k - k0, rat(1, 1) / factorial(k as i64).unwrap())
                        .mul(&pw),
                );
            }
        }
        out
    }
}

/// Contribution of the smooth graph to `pi_* Omega_{g,M}`, from the
/// explicit generating series.
pub fn cont_trivial_closed(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<FormalSum> {
    let deg_m = check_pushforward(g, n, m)?;
    let free = 2 * g + 1 - deg_m;
    let ff = factorial(free as i64)?;
    let r = ClosedRing::new(n, n, 2 * g + 2, g);
    let na = r.na;
    let gr = StableGraph::trivial(g, n)?;
    let mut out = FormalSum::new(g, n);
    let mut emit =
        |poly: &TruncatedSeries, weight: &dyn Fn(u32, u32) -> Option<Rational>| -> Result<()> {
            for (e, c) in poly.terms() {
                if e[..na] != *m || e[na + 2..].iter().sum::<u32>() != g {
                    continue;
                }
                if let Some(w) = weight(e[r.x()], e[r.xstar()]) {
                    out.add(
                        &DecoratedClass::new(gr.clone(), e[na + 2..].to_vec())?,
                        &(c * w),
                        &mut engine.graphs,
                    )?;
                }
            }
            Ok(())
        };

    // Leg on the vertex: string equation over every leg.
    let mut s1: Vec<(usize, i64)> = (1..n).map(|i| (i - 1, -1)).collect();
    s1.push((r.x(), -1));
    let weights: Vec<TruncatedSeries> = (0..n)
        .map(|i| {
            if i == 0 {
                r.linear(&s1)
            } else {
                r.linear(&[r.a(i)])
            }
        })
        .collect();
    let mut sum = r.base.zero_like();
    for i in 0..n {
        let mut p = r.exp_half_square(&weights[i], i, 1);
        for (j, w) in weights.iter().enumerate() {
            if j != i {
                p = p.mul(&r.exp_half_square(w, j, 0));
            }
        }
        sum.add_assign(&p);
    }
    let w1 = factorial(2 * g as i64 + 2 - deg_m as i64)?
        * factorial(4 * g as i64 - 1 + n as i64 - deg_m as i64)?
        / factorial(2 * g as i64 - 2 + n as i64)?;
    let target_x = 2 * g + 2 - deg_m;
    emit(&sum, &|ex, exs| {
        (ex == target_x && exs == 0).then(|| w1.clone())
    })?;

    // Leg on a genus-0 tail at leg i.
    for i in 1..n {
        let mut s0 = s1.clone();
        s0.push((r.xstar(), -1));
        let mut p = r.exp_half_square(&r.linear(&[r.a(i), (r.xstar(), 1)]), i, 1);
        p.scale(&int(-1));
        for j in 0..n {
            if j != i {
                let w = if j == 0 {
                    r.linear(&s0)
                } else {
                    r.linear(&[r.a(j)])
                };
                p = p.mul(&r.exp_half_square(&w, j, 0));
            }
        }
        let (gg, nn, ff) = (g, n, ff.clone());
        emit(&p, &|ex, exs| {
            if exs == 0 || ex + exs != free + 1 {
                return None;
            }
            let ms = exs - 1;
            Some(factorial(ms as i64 + 1).unwrap() * &ff * dilaton_factor(gg, nn, ex))
        })?;
    }
    Ok(out)
}

/// Contribution of the one-vertex, one-loop graph of genus `g-1` to
/// `pi_* Omega_{g,M}`, from the explicit generating series.
pub fn cont_oneloop_closed(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<FormalSum> {
    let deg_m = check_pushforward(g, n, m)?;
    if g == 0 {
        bail!(InvalidArgument, "genus 0 has no loop graph");
    }
    let free = 2 * g + 1 - deg_m;
    let ff = factorial(free as i64)?;
    let gr = bouquet_graph(g - 1, 1, n)?;
    let r = ClosedRing::new(n, n + 2, 2 * g + 2, g - 1);
    let na = r.na;
    let mut s1: Vec<(usize, i64)> = (1..n).map(|i| (i - 1, 1)).collect();
    s1.push((r.x(), 1));
    s1.push((r.xstar(), 1));
    let mut p = r.exp_half_square(&r.linear(&s1), 0, 0);
    for j in 1..n {
        p = p.mul(&r.exp_half_square(&r.linear(&[r.a(j)]), j, 0));
    }
    let mut edge = r.base.zero_like();
    for d1 in 0..g {
        for d2 in 0..g - d1 {
            let top = 2 * (d1 + d2) + 4;
            let c = double_factorial(2 * d1 as i64 + 1)? * double_factorial(2 * d2 as i64 + 1)?
                / factorial(top as i64)?;
            let mut e = vec![0; r.base.nvars()];
            e[r.xstar()] = top;
            e[r.psi(n)] = d1;
            e[r.psi(n + 1)] = d2;
            edge.add_term(e, c);
        }
    }
    let p = p.mul(&edge);
    let mut out = FormalSum::new(g, n);
    for (e, c) in p.terms() {
        let (ex, exs) = (e[r.x()], e[r.xstar()]);
        if e[..na] != *m
            || exs == 0
            || ex + exs != free + 1
            || e[na + 2..].iter().sum::<u32>() != g - 1
        {
            continue;
        }
        let w = -factorial(exs as i64)? * &ff * dilaton_factor(g, n, ex) / int(2);
        out.add(
            &DecoratedClass::new(gr.clone(), e[na + 2..].to_vec())?,
            &(c * w),
            &mut engine.graphs,
        )?;
    }
    Ok(out)
}

/// `sum coeff * F(psi)` over the classes of a sum.
pub fn f_of_classes(sum: &FormalSum) -> Rational {
    sum.terms()
        .map(|(c, x)| x * f_monomial(c.psi()))
        .fold(Rational::zero(), |a, b| a + b)
}

/// `F` of the smooth part plus `8 F` of the one-loop part of `pi_* Omega_{g,M}`.
pub fn one_loop_identity(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<Rational> {
    let p = pushforward_omega(engine, g, n, m)?;
    let t = p.restrict_to_graph(&StableGraph::trivial(g, n)?, &mut engine.graphs);
    let mut acc = f_of_classes(&t);
    if g >= 1 {
        let l = p.restrict_to_graph(&bouquet_graph(g - 1, 1, n)?, &mut engine.graphs);
        acc += int(8) * f_of_classes(&l);
    }
    Ok(acc)
}

/// `sum_h 8^{-h} F(c_h)`, where `c_h` is the ψ-polynomial on the graph with a
/// single genus-`h` vertex (and `g - h` loops).
pub fn bouquet_identity_check(sum: &FormalSum) -> Rational {
    let mut acc = Rational::zero();
    for (h, poly) in sum.bouquet_coefficients() {
        let mut w = crate::strata::f_functional(&poly);
        for _ in 0..h {
            w /= int(8);
        }
        acc += w;
    }
    acc
}

// ---------------------------------------------------------------------------
// Monomial relations.

/// The combination with leading monomial `psi_1^{g - sum l} prod psi_j^{l_j}`.
pub fn cancellation_combination(engine: &mut Engine, g: u32, l: &[u32]) -> Result<Relation> {
    if l.iter().any(|&x| x == 0) {
        bail!(
            Unsupported,
            "cancellation needs every exponent l_j >= 1, got {:?}",
            l
        );
    }
    let sl: u32 = l.iter().sum();
    if sl > g {
        bail!(InvalidArgument, "exponents {:?} exceed genus {}", l, g);
    }
    let n = l.len() + 1;
    let mut total = FormalSum::new(g, n);
    for mask in 0u32..(1 << l.len()) {
        let mut coeff = Rational::one();
        let mut m = Vec::with_capacity(l.len());
        for (j, &lj) in l.iter().enumerate() {
            let d = (mask >> j) & 1;
            if d == 0 {
                coeff *= int(-2 * lj as i64);
            }
            m.push(2 * lj - d);
        }
        let deg: u32 = m.iter().sum();
        coeff /= factorial(2 * g as i64 + 1 - deg as i64)?;
        let p = pushforward_omega(engine, g, n, &m)?;
        total.add_sum(&p, &coeff)?;
    }
    let mut leading = vec![g - sl];
    leading.extend_from_slice(l);
    Relation::from_sum(&total, leading, &mut engine.graphs)
}

/// First vertex carrying ψ-degree at least `h` (at least 1 in genus 0).
pub fn offending_vertex(class: &DecoratedClass) -> Option<usize> {
    let gr = class.graph();
    (0..gr.num_vertices()).find(|&v| {
        let h = gr.vertex_genus(v);
        class.vertex_degree(v) >= h + u32::from(h == 0)
    })
}

/// Whether every boundary class satisfies the vertex ψ-degree bound and
/// no class lives on the smooth graph.
pub fn is_normal_form(rel: &Relation) -> bool {
    rel.boundary
        .terms()
        .all(|(c, _)| c.graph().num_edges() > 0 && offending_vertex(c).is_none())
}

fn relation_degree(g: u32) -> u32 {
    g.max(1)
}

fn check_monomial_relation(g: u32, k: &[u32]) -> Result<()> {
    let n = k.len();
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Unstable { g, n });
    }
    let s: u32 = k.iter().sum();
    if s != relation_degree(g) {
        bail!(
            InvalidArgument,
            "ψ-monomial {:?} has degree {}, expected {}",
            k,
            s,
            relation_degree(g)
        );
    }
    Ok(())
}

/// `prod psi_i^{k_i} = boundary` in normal form, for `sum k_i = g`
/// (or `1` in genus 0).
pub fn trr_for_monomial(engine: &mut Engine, g: u32, k: &[u32]) -> Result<Relation> {
    check_monomial_relation(g, k)?;
    let n = k.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| k[b].cmp(&k[a]).then(a.cmp(&b)));
    let sorted: Vec<u32> = order.iter().map(|&i| k[i]).collect();
    let key = (g, sorted.clone());
    let rel = match engine.relations.get(&key) {
        Some(r) => r.clone(),
        None => {
            let r = solve_monomial(engine, g, &sorted)?;
            let r = reduce(engine, r)?;
            if !is_normal_form(&r) {
                return Err(Error::Internal("reduction left an offending vertex".into()));
            }
            engine.relations.insert(key, r.clone());
            r
        }
    };
    Ok(rel.permute_legs(&order, &mut engine.graphs))
}

/// Candidate relations whose smooth parts span the degree-`g` monomials.
fn candidate(engine: &mut Engine, g: u32, n: usize, m: &[u32]) -> Result<FormalSum> {
    if g == 0 {
        omega(engine, 0, n - 1, m)
    } else {
        pushforward_omega(engine, g, n, m)
    }
}

/// A relation whose smooth part is exactly `psi^k`, by linear algebra over
/// leg permutations of the basic relations.
fn solve_monomial(engine: &mut Engine, g: u32, k: &[u32]) -> Result<Relation> {
    let n = k.len();
    let deg = relation_degree(g);
    let lead = DecoratedClass::trivial(g, k)?;
    if !lead.fits() {
        return Ok(Relation {
            g,
            n,
            leading: k.to_vec(),
            leading_coefficient: Rational::one(),
            boundary: FormalSum::new(g, n),
            normalization: Normalization::NormalForm,
        });
    }
    let monos = compositions(deg, n);
    let row_of: BTreeMap<Vec<u32>, usize> = monos
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let mut rhs = vec![Rational::zero(); monos.len()];
    rhs[row_of[k]] = Rational::one();
    let (cn, ms) = if g == 0 {
        if n < 4 {
            return Err(Error::Internal(
                "degree-1 relation requested on a point".into(),
            ));
        }
        (n - 1, monomials_up_to(n - 2, 1))
    } else {
        (n, monomials_up_to(n - 1, 2 * g + 1))
    };
    let _ = cn;
    let perms = permutations(n);
    let mut cands: Vec<FormalSum> = Vec::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    for m in &ms {
        let base = candidate(engine, g, n, m)?;
        for sigma in &perms {
            let rel = base.permute_legs(sigma, &mut engine.graphs);
            let mut col = vec![Rational::zero(); monos.len()];
            for (c, x) in rel.terms() {
                if c.graph().num_edges() == 0 {
                    col[row_of[c.psi()]] = x.clone();
                }
            }
            if col.iter().all(|x| x.is_zero()) || columns.contains(&col) {
                continue;
            }
            columns.push(col);
            cands.push(rel);
        }
        if let Some(c) = solve_columns(&columns, &rhs) {
            let mut total = FormalSum::new(g, n);
            for (ci, r) in c.iter().zip(&cands) {
                total.add_sum(r, ci)?;
            }
            let rel = Relation::from_sum(&total, k.to_vec(), &mut engine.graphs)?;
            if rel.leading_coefficient != Rational::one()
                || rel
                    .boundary
                    .terms()
                    .any(|(c, _)| c.graph().num_edges() == 0)
            {
                return Err(Error::Internal(
                    "linear solve did not isolate the monomial".into(),
                ));
            }
            return Ok(Relation {
                normalization: Normalization::Leading,
                ..rel
            });
        }
    }
    Err(Error::Infeasible(alloc::format!(
        "no combination isolates ψ-monomial {:?} in genus {}",
        k,
        g
    )))
}

/// Replaces offending vertices by lower-genus monomial relations until
/// the vertex ψ-degree bound holds everywhere.
fn reduce(engine: &mut Engine, rel: Relation) -> Result<Relation> {
    let (g, n) = (rel.g, rel.n);
    let mut work = rel.boundary.clone();
    let mut done = FormalSum::new(g, n);
    while let Some((cls, coef)) = work.pop_first() {
        let Some(v) = offending_vertex(&cls) else {
            done.add(&cls, &coef, &mut engine.graphs)?;
            continue;
        };
        let gr = cls.graph().clone();
        if gr.num_edges() == 0 {
            return Err(Error::Internal("smooth class among boundary terms".into()));
        }
        let h = gr.vertex_genus(v);
        let exps = cls.vertex_exponents(v);
        let mut left = relation_degree(h);
        let mut nu = vec![0u32; exps.len()];
        for (j, &x) in exps.iter().enumerate() {
            let t = x.min(left);
            nu[j] = t;
            left -= t;
        }
        let sub = trr_for_monomial(engine, h, &nu)?;
        let mut patch = sub.boundary.clone();
        for (j, (&x, &y)) in exps.iter().zip(&nu).enumerate() {
            if x > y {
                patch = patch.times_leg_psi(j, x - y, &mut engine.graphs);
            }
        }
        let matching = gr.half_edges_at(v);
        for (pc, px) in patch.terms() {
            let gft = graft(&gr, v, pc.graph(), &matching)?;
            if gft.graph.num_edges() <= gr.num_edges() {
                return Err(Error::Internal("graft did not add an edge".into()));
            }
            let mut psi = vec![0u32; gft.graph.num_half_edges()];
            psi[..gr.num_half_edges()].copy_from_slice(cls.psi());
            for (ph, &x) in pc.psi().iter().enumerate() {
                psi[gft.patch_map[ph]] = x;
            }
            work.add(
                &DecoratedClass::new(gft.graph, psi)?,
                &(&coef * px),
                &mut engine.graphs,
            )?;
        }
    }
    Ok(Relation {
        boundary: done,
        normalization: Normalization::NormalForm,
        ..rel
    })
}

/// Checks `int relation * psi^alpha = 0` for every complementary leg monomial.
pub fn verify_relation<P: IntersectionProvider + ?Sized>(
    engine: &mut Engine,
    rel: &Relation,
    provider: &mut P,
) -> Result<bool> {
    let dim = 3 * rel.g as i64 - 3 + rel.n as i64;
    let deg = rel.leading.iter().sum::<u32>() as i64;
    if deg > dim {
        return Ok(true);
    }
    let sum = rel.as_sum(&mut engine.graphs)?;
    for alpha in compositions((dim - deg) as u32, rel.n) {
        let mut s = sum.clone();
        for (i, &a) in alpha.iter().enumerate() {
            if a > 0 {
                s = s.times_leg_psi(i, a, &mut engine.graphs);
            }
        }
        if !s.integrate(provider)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficients of the two kinds of rational-tails strata on the boundary side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTails {
    /// Genus-`g` vertex with `psi^{g-1}` joined to one genus-0 vertex with every leg.
    pub a0: Option<Rational>,
    /// Chains carrying legs `i < j` on the far genus-0 vertex, `psi^{g-2}`.
    pub aij: BTreeMap<(usize, usize), Rational>,
}

impl RationalTails {
    pub fn sum(&self) -> Rational {
        self.a0.clone().unwrap_or_else(Rational::zero)
            + self.aij.values().fold(Rational::zero(), |a, b| a + b)
    }
}

pub fn rational_tail_coefficients(engine: &mut Engine, rel: &Relation) -> Result<RationalTails> {
    if rel.normalization != Normalization::NormalForm {
        bail!(
            InvalidArgument,
            "rational-tail coefficients need a relation in normal form"
        );
    }
    let (g, n) = (rel.g, rel.n);
    let graphs = rational_tail_graphs(g, n)?;
    let a0 = match graphs.xi {
        Some(gr) => {
            let mut psi = vec![0; gr.num_half_edges()];
            psi[n] = g - 1;
            Some(rel.boundary_coefficient(&DecoratedClass::new(gr, psi)?, &mut engine.graphs))
        }
        None => None,
    };
    let mut aij = BTreeMap::new();
    if g >= 2 {
        for ((i, j), gr) in graphs.xi_ij {
            let mut psi = vec![0; gr.num_half_edges()];
            psi[n] = g - 2;
            aij.insert(
                (i, j),
                rel.boundary_coefficient(&DecoratedClass::new(gr, psi)?, &mut engine.graphs),
            );
        }
    }
    Ok(RationalTails { a0, aij })
}

/// Coefficient of the genus-0 bouquet class on the boundary side.
pub fn bouquet_coefficient(engine: &mut Engine, rel: &Relation) -> Result<Rational> {
    let gr = bouquet_graph(0, rel.g as usize, rel.n)?;
    Ok(rel.boundary_coefficient(&DecoratedClass::undecorated(gr), &mut engine.graphs))
}

/// `1 / (8^g prod (2k_i + 1)!!)`.
pub fn expected_bouquet_coefficient(k: &[u32]) -> Rational {
    let mut v = f_monomial(k);
    for _ in 0..k.iter().sum::<u32>() {
        v /= int(8);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleTable;

    #[test]
    fn omega_routes_genus_one() {
        let mut e = Engine::new();
        let a = omega(&mut e, 1, 1, &[]).unwrap();
        let b = omega_naive(&mut e, 1, 1, &[]).unwrap();
        assert!(!a.is_zero());
        assert_eq!(a, b);
        let p = pushforward_omega(&mut e, 1, 1, &[]).unwrap();
        let q = pushforward_omega_via_forget(&mut e, 1, 1, &[]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn psi_one_on_m11() {
        let mut e = Engine::new();
        let r = trr_for_monomial(&mut e, 1, &[1]).unwrap();
        assert_eq!(bouquet_coefficient(&mut e, &r).unwrap(), rat(1, 24));
        assert!(verify_relation(&mut e, &r, &mut OracleTable::new()).unwrap());
    }

    #[test]
    fn omega_matches_naive() {
        let mut e = Engine::new();
        for (g, n, m) in [
            (1, 2, vec![0]),
            (1, 2, vec![1]),
            (1, 2, vec![2]),
            (0, 2, vec![1]),
            (1, 3, vec![1, 1]),
            (2, 2, vec![4]),
            (2, 2, vec![3]),
        ] {
            let a = omega(&mut e, g, n, &m).unwrap();
            let b = omega_naive(&mut e, g, n, &m).unwrap();
            assert_eq!(a, b, "({g},{n},{m:?})");
        }
    }

    #[test]
    fn pushforward_routes_and_closed_forms() {
        let mut e = Engine::new();
        for (g, n, m) in [
            (1, 1, vec![]),
            (1, 2, vec![0]),
            (1, 2, vec![2]),
            (2, 1, vec![]),
            (2, 2, vec![1]),
            (2, 2, vec![4]),
        ] {
            let p = pushforward_omega(&mut e, g, n, &m).unwrap();
            let q = pushforward_omega_via_forget(&mut e, g, n, &m).unwrap();
            assert_eq!(p, q, "({g},{n},{m:?})");
            let t = p.restrict_to_graph(&StableGraph::trivial(g, n).unwrap(), &mut e.graphs);
            assert_eq!(t, cont_trivial_closed(&mut e, g, n, &m).unwrap());
            let l = p.restrict_to_graph(&bouquet_graph(g - 1, 1, n).unwrap(), &mut e.graphs);
            assert_eq!(l, cont_oneloop_closed(&mut e, g, n, &m).unwrap());
            assert_eq!(
                one_loop_identity(&mut e, g, n, &m).unwrap(),
                Rational::zero()
            );
        }
    }

    #[test]
    fn genus_two_monomials() {
        let mut e = Engine::new();
        let mut oracle = OracleTable::new();
        let r = trr_for_monomial(&mut e, 2, &[1, 1]).unwrap();
        assert!(verify_relation(&mut e, &r, &mut oracle).unwrap());
        assert_eq!(bouquet_coefficient(&mut e, &r).unwrap(), rat(1, 576));
        let t = rational_tail_coefficients(&mut e, &r).unwrap();
        assert_eq!(t.a0, Some(int(3)));
        let s = r.as_sum(&mut e.graphs).unwrap();
        assert_eq!(bouquet_identity_check(&s), Rational::zero());
    }
}
