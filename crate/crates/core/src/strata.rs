//! Decorated strata classes `[Gamma, gamma]` and their formal linear combinations.
//!
//! A decoration is a ψ-exponent per half-edge; κ classes never occur. The
//! class `[Gamma, gamma]` stands for the gluing pushforward of `gamma`
//! without any automorphism factor, so `1/|Aut|` weights live in coefficients.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{bail, Result};
use crate::exact_arith::{double_factorial, int, Rational};
use crate::stable_graphs::{GraphCache, StableGraph};

/// Source of ψ-intersection numbers `<tau_k1 ... tau_kn>_g`.
pub trait IntersectionProvider {
    /// Zero unless the exponents sum to `3g - 3 + n`.
    fn intersection(&mut self, g: u32, k: &[u32]) -> Result<Rational>;
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedClass {
    graph: StableGraph,
    psi: Vec<u32>,
}

impl DecoratedClass {
    pub fn new(graph: StableGraph, psi: Vec<u32>) -> Result<Self> {
        if psi.len() != graph.num_half_edges() {
            bail!(
                InvalidArgument,
                "{} exponents for {} half-edges",
                psi.len(),
                graph.num_half_edges()
            );
        }
        Ok(DecoratedClass { graph, psi })
    }

    pub fn undecorated(graph: StableGraph) -> Self {
        let psi = vec![0; graph.num_half_edges()];
        DecoratedClass { graph, psi }
    }

    /// `prod psi_i^{k_i}` on the smooth locus.
    pub fn trivial(g: u32, k: &[u32]) -> Result<Self> {
        DecoratedClass::new(StableGraph::trivial(g, k.len())?, k.to_vec())
    }

    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    pub fn psi(&self) -> &[u32] {
        &self.psi
    }

    /// `|E| + sum of exponents`.
    pub fn degree(&self) -> u32 {
        self.graph.num_edges() as u32 + self.psi.iter().sum::<u32>()
    }

    pub fn vertex_exponents(&self, v: usize) -> Vec<u32> {
        self.graph
            .half_edges_at(v)
            .into_iter()
            .map(|h| self.psi[h])
            .collect()
    }

    pub fn vertex_degree(&self, v: usize) -> u32 {
        self.vertex_exponents(v).iter().sum()
    }

    /// False when some vertex carries more ψ-degree than its dimension,
    /// which makes the class zero.
    pub fn fits(&self) -> bool {
        (0..self.graph.num_vertices())
            .all(|v| self.vertex_degree(v) as i64 <= self.graph.vertex_dim(v))
    }

    pub fn canonical(&self, cache: &mut GraphCache) -> DecoratedClass {
        let (graph, psi) = cache.canonical_decorated(&self.graph, &self.psi);
        DecoratedClass { graph, psi }
    }

    /// Multiplies by `psi_leg^power` (leg classes pull back to the vertex carrying the leg).
    pub fn times_leg_psi(&self, leg: usize, power: u32) -> DecoratedClass {
        let mut c = self.clone();
        c.psi[leg] += power;
        c
    }

    pub fn permute_legs(&self, sigma: &[usize]) -> DecoratedClass {
        let n = self.graph.num_legs();
        let mut psi = self.psi.clone();
        for i in 0..n {
            psi[sigma[i]] = self.psi[i];
        }
        DecoratedClass {
            graph: self.graph.permute_legs(sigma),
            psi,
        }
    }

    /// Pushforward along the map forgetting the last marking, as a list of
    /// labeled classes. Uses the string equation when the last leg has no ψ,
    /// the dilaton equation when it has ψ^1, and contracts an unstable
    /// genus-0 trivalent vertex.
    pub fn forget_last_leg(&self) -> Result<Vec<(DecoratedClass, Rational)>> {
        let gr = &self.graph;
        let n = gr.num_legs();
        if n == 0 {
            bail!(InvalidArgument, "no leg to forget");
        }
        let p = n - 1;
        let v = gr.legs()[p];
        let k = self.psi[p];
        let val = gr.valence(v);
        let gv = gr.vertex_genus(v);
        if !self.fits() {
            return Ok(Vec::new());
        }
        if 2 * gv as i64 - 3 + val as i64 > 0 {
            let mut legs = gr.legs().to_vec();
            legs.pop();
            let base = StableGraph::from_parts(gr.genera().to_vec(), legs, gr.edges().to_vec());
            let mut psi = self.psi.clone();
            psi.remove(p);
            let shift = |h: usize| if h < p { h } else { h - 1 };
            match k {
                0 => {
                    let mut out = Vec::new();
                    for h in gr.half_edges_at(v) {
                        if h != p && self.psi[h] > 0 {
                            let mut q = psi.clone();
                            q[shift(h)] -= 1;
                            out.push((
                                DecoratedClass {
                                    graph: base.clone(),
                                    psi: q,
                                },
                                Rational::one(),
                            ));
                        }
                    }
                    Ok(out)
                }
                1 => {
                    let factor = int(2 * gv as i64 - 3 + val as i64);
                    Ok(vec![(DecoratedClass { graph: base, psi }, factor)])
                }
                _ => bail!(
                    Unsupported,
                    "forgetting a leg with psi^{} produces a kappa class",
                    k
                ),
            }
        } else {
            // Genus 0 with three half-edges: contract it away.
            let others: Vec<usize> = gr
                .half_edges_at(v)
                .into_iter()
                .filter(|&h| h != p)
                .collect();
            let (h1, h2) = (others[0], others[1]);
            let mut b = Rebuild::new(self);
            b.drop_vertex(v);
            b.drop_leg(p);
            match (gr.partner(h1), gr.partner(h2)) {
                (None, Some(q)) | (Some(q), None) => {
                    let leg = if h1 < n { h1 } else { h2 };
                    let e = (q - n) / 2;
                    b.drop_edge(e);
                    b.move_leg(leg, gr.vertex_of(q), self.psi[q]);
                }
                (Some(q1), Some(q2)) => {
                    b.drop_edge((q1 - n) / 2);
                    b.drop_edge((q2 - n) / 2);
                    b.add_edge(
                        gr.vertex_of(q1),
                        self.psi[q1],
                        gr.vertex_of(q2),
                        self.psi[q2],
                    );
                }
                (None, None) => return Err(crate::error::Error::Unstable { g: 0, n: 2 }),
            }
            Ok(vec![(b.finish()?, Rational::one())])
        }
    }
}

/// Rebuilds a decorated class after removing and adding pieces.
struct Rebuild<'a> {
    src: &'a DecoratedClass,
    vertex_alive: Vec<bool>,
    legs: Vec<Option<(usize, u32)>>,
    edges: Vec<Option<(usize, u32, usize, u32)>>,
}

impl<'a> Rebuild<'a> {
    fn new(src: &'a DecoratedClass) -> Self {
        let gr = &src.graph;
        let n = gr.num_legs();
        Rebuild {
            src,
            vertex_alive: vec![true; gr.num_vertices()],
            legs: (0..n).map(|i| Some((gr.legs()[i], src.psi[i]))).collect(),
            edges: gr
                .edges()
                .iter()
                .enumerate()
                .map(|(e, &(a, b))| Some((a, src.psi[n + 2 * e], b, src.psi[n + 2 * e + 1])))
                .collect(),
        }
    }
    fn drop_vertex(&mut self, v: usize) {
        self.vertex_alive[v] = false;
    }
    fn drop_leg(&mut self, i: usize) {
        self.legs[i] = None;
    }
    fn drop_edge(&mut self, e: usize) {
        self.edges[e] = None;
    }
    fn move_leg(&mut self, i: usize, v: usize, psi: u32) {
        self.legs[i] = Some((v, psi));
    }
    fn add_edge(&mut self, a: usize, pa: u32, b: usize, pb: u32) {
        self.edges.push(Some((a, pa, b, pb)));
    }
    fn finish(self) -> Result<DecoratedClass> {
        let gr = &self.src.graph;
        let mut new_id = vec![usize::MAX; gr.num_vertices()];
        let mut genera = Vec::new();
        for v in 0..gr.num_vertices() {
            if self.vertex_alive[v] {
                new_id[v] = genera.len();
                genera.push(gr.vertex_genus(v));
            }
        }
        let mut legs = Vec::new();
        let mut psi = Vec::new();
        for &(v, k) in self.legs.iter().flatten() {
            legs.push(new_id[v]);
            psi.push(k);
        }
        let mut edges = Vec::new();
        for &(a, pa, b, pb) in self.edges.iter().flatten() {
            edges.push((new_id[a], new_id[b]));
            psi.push(pa);
            psi.push(pb);
        }
        DecoratedClass::new(StableGraph::new(genera, legs, edges)?, psi)
    }
}

/// Finite rational combination of canonical decorated classes of type `(g, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSum {
    g: u32,
    n: usize,
    terms: BTreeMap<DecoratedClass, Rational>,
}

impl FormalSum {
    pub fn new(g: u32, n: usize) -> Self {
        FormalSum {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn num_markings(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedClass, &Rational)> {
        self.terms.iter()
    }

    fn check_type(&self, c: &DecoratedClass) -> Result<()> {
        if c.graph.genus() != self.g || c.graph.num_legs() != self.n {
            bail!(
                InvalidArgument,
                "class of type ({}, {}) added to a sum of type ({}, {})",
                c.graph.genus(),
                c.graph.num_legs(),
                self.g,
                self.n
            );
        }
        Ok(())
    }

    /// Adds `coeff * class`; the class is canonicalized and dropped if it vanishes
    /// for dimension reasons.
    pub fn add(
        &mut self,
        class: &DecoratedClass,
        coeff: &Rational,
        cache: &mut GraphCache,
    ) -> Result<()> {
        self.check_type(class)?;
        if coeff.is_zero() || !class.fits() {
            return Ok(());
        }
        let c = class.canonical(cache);
        self.add_canonical(c, coeff.clone());
        Ok(())
    }

    pub(crate) fn add_canonical(&mut self, c: DecoratedClass, coeff: Rational) {
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(c) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_sum(&mut self, other: &FormalSum, scale: &Rational) -> Result<()> {
        if other.g != self.g || other.n != self.n {
            bail!(InvalidArgument, "adding sums of different types");
        }
        if scale.is_zero() {
            return Ok(());
        }
        for (c, x) in &other.terms {
            self.add_canonical(c.clone(), x * scale);
        }
        Ok(())
    }

    /// Removes and returns the smallest term.
    pub fn pop_first(&mut self) -> Option<(DecoratedClass, Rational)> {
        self.terms.pop_first()
    }

    pub fn scaled(&self, c: &Rational) -> FormalSum {
        let mut out = FormalSum::new(self.g, self.n);
        out.add_sum(self, c).unwrap();
        out
    }

    pub fn coefficient_of(&self, class: &DecoratedClass, cache: &mut GraphCache) -> Rational {
        if class.graph.genus() != self.g || class.graph.num_legs() != self.n {
            return Rational::zero();
        }
        let c = class.canonical(cache);
        self.terms.get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    /// Distinct degrees occurring in the sum.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|c| c.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn filter(&self, mut keep: impl FnMut(&DecoratedClass) -> bool) -> FormalSum {
        FormalSum {
            g: self.g,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, x)| (c.clone(), x.clone()))
                .collect(),
        }
    }

    /// Terms supported on the graph isomorphic to `graph`.
    pub fn restrict_to_graph(&self, graph: &StableGraph, cache: &mut GraphCache) -> FormalSum {
        let (c, _) = cache.canonical(graph);
        self.filter(|d| d.graph == c)
    }

    /// `sum coeff * prod_v provider(g(v), exponents at v)` over classes of top degree.
    pub fn integrate<P: IntersectionProvider + ?Sized>(
        &self,
        provider: &mut P,
    ) -> Result<Rational> {
        let top = 3 * self.g as i64 - 3 + self.n as i64;
        let mut total = Rational::zero();
        for (c, x) in &self.terms {
            if c.degree() as i64 != top {
                continue;
            }
            let mut val = x.clone();
            for v in 0..c.graph.num_vertices() {
                let k = c.vertex_exponents(v);
                val *= provider.intersection(c.graph.vertex_genus(v), &k)?;
                if val.is_zero() {
                    break;
                }
            }
            total += val;
        }
        Ok(total)
    }

    /// For each genus `h`, the ψ-polynomial on the single vertex of the graph
    /// with one genus-`h` vertex and `g - h` loops.
    pub fn bouquet_coefficients(&self) -> BTreeMap<u32, Vec<(Vec<u32>, Rational)>> {
        let mut out: BTreeMap<u32, Vec<(Vec<u32>, Rational)>> = BTreeMap::new();
        for (c, x) in &self.terms {
            if c.graph.num_vertices() == 1 {
                out.entry(c.graph.vertex_genus(0))
                    .or_default()
                    .push((c.psi.clone(), x.clone()));
            }
        }
        out
    }

    pub fn permute_legs(&self, sigma: &[usize], cache: &mut GraphCache) -> FormalSum {
        let mut out = FormalSum::new(self.g, self.n);
        for (c, x) in &self.terms {
            out.add(&c.permute_legs(sigma), x, cache).unwrap();
        }
        out
    }

    pub fn times_leg_psi(&self, leg: usize, power: u32, cache: &mut GraphCache) -> FormalSum {
        let mut out = FormalSum::new(self.g, self.n);
        for (c, x) in &self.terms {
            out.add(&c.times_leg_psi(leg, power), x, cache).unwrap();
        }
        out
    }

    /// Pushforward forgetting the last marking.
    pub fn forget_last_leg(&self, cache: &mut GraphCache) -> Result<FormalSum> {
        if self.n == 0 {
            bail!(InvalidArgument, "no leg to forget");
        }
        let mut out = FormalSum::new(self.g, self.n - 1);
        for (c, x) in &self.terms {
            for (d, y) in c.forget_last_leg()? {
                out.add(&d, &(x * y), cache)?;
            }
        }
        Ok(out)
    }
}

/// `F(prod psi_i^{k_i}) = prod 1/(2k_i+1)!!`.
pub fn f_monomial(k: &[u32]) -> Rational {
    let mut v = Rational::one();
    for &x in k {
        v /= double_factorial(2 * x as i64 + 1).unwrap();
    }
    v
}

/// Linear extension of [`f_monomial`] to a ψ-polynomial on one vertex.
pub fn f_functional(poly: &[(Vec<u32>, Rational)]) -> Rational {
    poly.iter()
        .map(|(k, c)| c * f_monomial(k))
        .fold(Rational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn degrees() {
        assert_eq!(DecoratedClass::trivial(1, &[2, 0]).unwrap().degree(), 2);
        let loop1 = crate::stable_graphs::bouquet_graph(0, 1, 2).unwrap();
        assert_eq!(DecoratedClass::undecorated(loop1).degree(), 1);
        let b = crate::stable_graphs::bouquet_graph(0, 3, 1).unwrap();
        assert_eq!(DecoratedClass::undecorated(b).degree(), 3);
    }

    #[test]
    fn f_values() {
        assert_eq!(f_monomial(&[]), int(1));
        assert_eq!(f_monomial(&[2]), rat(1, 15));
        assert_eq!(f_monomial(&[1, 1]), rat(1, 9));
    }

    #[test]
    fn string_and_dilaton_pushforward() {
        let mut cache = GraphCache::new();
        // psi_1^2 on M_{1,2}-bar, forget marking 2: string gives psi_1.
        let c = DecoratedClass::trivial(1, &[2, 0]).unwrap();
        let out = c.forget_last_leg().unwrap();
        assert_eq!(
            out,
            vec![(DecoratedClass::trivial(1, &[1]).unwrap(), int(1))]
        );
        // psi_1 psi_2: dilaton factor 2g - 2 + n = 1.
        let c = DecoratedClass::trivial(1, &[1, 1]).unwrap();
        let mut s = FormalSum::new(1, 2);
        s.add(&c, &int(1), &mut cache).unwrap();
        let f = s.forget_last_leg(&mut cache).unwrap();
        assert_eq!(
            f.coefficient_of(&DecoratedClass::trivial(1, &[1]).unwrap(), &mut cache),
            int(1)
        );
    }

    #[test]
    fn contraction_of_unstable_vertex() {
        // genus-1 vertex with leg 1, joined to a genus-0 vertex carrying legs 2, 3.
        let gr = StableGraph::new(vec![1, 0], vec![0, 1, 1], vec![(0, 1)]).unwrap();
        let c = DecoratedClass::new(gr, vec![0, 0, 0, 1, 0]).unwrap();
        let out = c.forget_last_leg().unwrap();
        assert_eq!(out.len(), 1);
        let d = &out[0].0;
        assert_eq!(d.graph().num_vertices(), 1);
        assert_eq!(d.psi(), &[0, 1]);
    }
}
