//! Stable graphs: enumeration, canonical forms and automorphisms.
//!
//! Half-edges are numbered `0..n` for the legs (leg `i` carries marking
//! `i + 1`) followed by `n + 2e` and `n + 2e + 1` for the two sides of edge
//! `e`. The two sides of a loop are distinct half-edges.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// An isomorphism between two labelings of the same graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphIso {
    pub source: StableGraph,
    pub target: StableGraph,
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
}

impl StableGraph {
    pub fn new(genera: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let gr = StableGraph {
            genera,
            legs,
            edges,
        };
        gr.check()?;
        Ok(gr)
    }

    pub(crate) fn from_parts(
        genera: Vec<u32>,
        legs: Vec<usize>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        StableGraph {
            genera,
            legs,
            edges,
        }
    }

    pub fn trivial(g: u32, n: usize) -> Result<Self> {
        Self::new(vec![g], vec![0; n], Vec::new())
    }

    pub fn check(&self) -> Result<()> {
        let nv = self.genera.len();
        if nv == 0 {
            bail!(InvalidArgument, "graph without vertices");
        }
        if self.legs.iter().any(|&v| v >= nv) || self.edges.iter().any(|&(a, b)| a >= nv || b >= nv)
        {
            bail!(InvalidArgument, "vertex index out of range");
        }
        if !self.is_connected() {
            bail!(InvalidArgument, "graph is not connected");
        }
        for v in 0..nv {
            if !self.is_stable_vertex(v) {
                return Err(Error::Unstable {
                    g: self.genera[v],
                    n: self.valence(v),
                });
            }
        }
        Ok(())
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.legs.len() + 2 * self.edges.len()
    }

    pub fn h1(&self) -> usize {
        self.edges.len() + 1 - self.genera.len()
    }

    pub fn genus(&self) -> u32 {
        self.h1() as u32 + self.genera.iter().sum::<u32>()
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        let mut n = self.legs.iter().filter(|&&x| x == v).count();
        for &(a, b) in &self.edges {
            n += (a == v) as usize + (b == v) as usize;
        }
        n
    }

    /// `3g(v) - 3 + n(v)`.
    pub fn vertex_dim(&self, v: usize) -> i64 {
        3 * self.genera[v] as i64 - 3 + self.valence(v) as i64
    }

    pub fn is_stable_vertex(&self, v: usize) -> bool {
        2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 > 0
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        let n = self.legs.len();
        if h < n {
            self.legs[h]
        } else {
            let (a, b) = self.edges[(h - n) / 2];
            if (h - n) % 2 == 0 {
                a
            } else {
                b
            }
        }
    }

    /// The other half of the edge containing `h`; `None` for legs.
    pub fn partner(&self, h: usize) -> Option<usize> {
        let n = self.legs.len();
        if h < n {
            None
        } else {
            Some(n + ((h - n) ^ 1))
        }
    }

    pub fn edge_half_edges(&self, e: usize) -> (usize, usize) {
        let n = self.legs.len();
        (n + 2 * e, n + 2 * e + 1)
    }

    /// Half-edges at `v` in increasing order (legs first).
    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_half_edges())
            .filter(|&h| self.vertex_of(h) == v)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Relabels the markings: marking `i` becomes marking `sigma[i]`.
    pub fn permute_legs(&self, sigma: &[usize]) -> StableGraph {
        let mut legs = vec![0; self.legs.len()];
        for (i, &v) in self.legs.iter().enumerate() {
            legs[sigma[i]] = v;
        }
        StableGraph {
            genera: self.genera.clone(),
            legs,
            edges: self.edges.clone(),
        }
    }

    /// Versioned text form, e.g. `SG1|g=1,0|l=1,1|e=0-1`.
    pub fn to_text(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(",");
        format!(
            "SG1|g={}|l={}|e={}",
            join(&mut self.genera.iter().map(|x| format!("{}", x))),
            join(&mut self.legs.iter().map(|x| format!("{}", x))),
            join(&mut self.edges.iter().map(|(a, b)| format!("{}-{}", a, b)))
        )
    }

    pub fn from_text(s: &str) -> Result<StableGraph> {
        let parts: Vec<&str> = s.trim().split('|').collect();
        if parts.len() != 4 || parts[0] != "SG1" {
            bail!(InvalidArgument, "unrecognized graph encoding {:?}", s);
        }
        let field = |p: &str, key: &str| -> Result<Vec<String>> {
            let Some(body) = p.strip_prefix(key) else {
                bail!(InvalidArgument, "expected {:?} in {:?}", key, p);
            };
            Ok(if body.is_empty() {
                Vec::new()
            } else {
                body.split(',').map(String::from).collect()
            })
        };
        let num = |x: &str| -> Result<usize> {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad number {:?}", x)))
        };
        let genera = field(parts[1], "g=")?
            .iter()
            .map(|x| num(x).map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        let legs = field(parts[2], "l=")?
            .iter()
            .map(|x| num(x))
            .collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for e in field(parts[3], "e=")? {
            let Some((a, b)) = e.split_once('-') else {
                bail!(InvalidArgument, "bad edge {:?}", e);
            };
            edges.push((num(a)?, num(b)?));
        }
        StableGraph::new(genera, legs, edges)
    }

    // ---- canonical form ----

    fn refined_colors(&self) -> Vec<usize> {
        let nv = self.genera.len();
        let mut keys: Vec<Vec<u32>> = (0..nv)
            .map(|v| {
                let loops = self
                    .edges
                    .iter()
                    .filter(|&&(a, b)| a == v && b == v)
                    .count();
                let mut k = vec![self.genera[v], self.valence(v) as u32, loops as u32];
                for (i, &x) in self.legs.iter().enumerate() {
                    if x == v {
                        k.push(i as u32);
                    }
                }
                k
            })
            .collect();
        let mut colors = rank(&keys);
        let mut count = distinct(&colors);
        loop {
            keys = (0..nv)
                .map(|v| {
                    let mut nb: Vec<u32> = Vec::new();
                    for &(a, b) in &self.edges {
                        if a == b {
                            continue;
                        }
                        if a == v {
                            nb.push(colors[b] as u32);
                        }
                        if b == v {
                            nb.push(colors[a] as u32);
                        }
                    }
                    nb.sort_unstable();
                    let mut k = vec![colors[v] as u32];
                    k.extend(nb);
                    k
                })
                .collect();
            let next = rank(&keys);
            let c = distinct(&next);
            colors = next;
            if c == count {
                break;
            }
            count = c;
        }
        colors
    }

    fn encode(&self, p: &[usize]) -> Vec<u32> {
        let nv = self.genera.len();
        let mut gen = vec![0u32; nv];
        for v in 0..nv {
            gen[p[v]] = self.genera[v];
        }
        let mut out = Vec::with_capacity(3 + nv + self.legs.len() + 2 * self.edges.len());
        out.push(nv as u32);
        out.extend(gen);
        out.extend(self.legs.iter().map(|&v| p[v] as u32));
        let mut es: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (p[a] as u32, p[b] as u32);
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        es.sort_unstable();
        out.push(es.len() as u32);
        for (x, y) in es {
            out.push(x);
            out.push(y);
        }
        out
    }

    /// All colour-respecting vertex relabelings that minimize the encoding.
    fn minimizing_perms(&self) -> (Vec<u32>, Vec<Vec<usize>>) {
        let nv = self.genera.len();
        let colors = self.refined_colors();
        let ncol = distinct(&colors);
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); ncol];
        for v in 0..nv {
            classes[colors[v]].push(v);
        }
        let mut starts = Vec::with_capacity(ncol);
        let mut s = 0;
        for c in &classes {
            starts.push(s);
            s += c.len();
        }
        let mut best: Option<Vec<u32>> = None;
        let mut winners: Vec<Vec<usize>> = Vec::new();
        let mut p = vec![usize::MAX; nv];
        let mut used: Vec<Vec<bool>> = classes.iter().map(|c| vec![false; c.len()]).collect();
        search(
            self,
            &classes,
            &starts,
            0,
            0,
            &mut p,
            &mut used,
            &mut best,
            &mut winners,
        );
        (best.unwrap(), winners)
    }

    /// Canonical representative and the isomorphism onto it.
    pub fn canonicalize(&self) -> (StableGraph, GraphIso) {
        let (_, perms) = self.minimizing_perms();
        let p = &perms[0];
        let n = self.legs.len();
        let nv = self.genera.len();
        let mut genera = vec![0; nv];
        for v in 0..nv {
            genera[p[v]] = self.genera[v];
        }
        let legs: Vec<usize> = self.legs.iter().map(|&v| p[v]).collect();
        let mut es: Vec<(usize, usize, bool, usize)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let (x, y) = (p[a], p[b]);
                if x <= y {
                    (x, y, false, i)
                } else {
                    (y, x, true, i)
                }
            })
            .collect();
        es.sort_unstable();
        let mut half_edge_map = vec![0; self.num_half_edges()];
        for i in 0..n {
            half_edge_map[i] = i;
        }
        let mut edges = Vec::with_capacity(es.len());
        for (new_e, &(x, y, swapped, old_e)) in es.iter().enumerate() {
            edges.push((x, y));
            let (s0, s1) = if swapped { (1, 0) } else { (0, 1) };
            half_edge_map[n + 2 * old_e] = n + 2 * new_e + s0;
            half_edge_map[n + 2 * old_e + 1] = n + 2 * new_e + s1;
        }
        let target = StableGraph {
            genera,
            legs,
            edges,
        };
        let iso = GraphIso {
            source: self.clone(),
            target: target.clone(),
            vertex_map: p.clone(),
            half_edge_map,
        };
        (target, iso)
    }

    pub fn canonical(&self) -> StableGraph {
        self.canonicalize().0
    }

    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical() == other.canonical()
    }

    /// |Aut|, counting half-edge permutations (loop flips and parallel edge swaps included).
    pub fn automorphism_order(&self) -> u64 {
        let (_, perms) = self.minimizing_perms();
        let mut order = perms.len() as u64;
        let mut groups: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &(a, b) in &self.edges {
            *groups.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        for ((a, b), c) in groups {
            order *= (1..=c).product::<u64>();
            if a == b {
                order *= 1 << c;
            }
        }
        order
    }

    /// Every automorphism as a half-edge permutation `h -> sigma[h]`.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let (_, minimizers) = self.minimizing_perms();
        // Vertex automorphisms are p0^{-1} p over the canonical labellings p.
        let mut inv0 = vec![0; self.genera.len()];
        for (v, &w) in minimizers[0].iter().enumerate() {
            inv0[w] = v;
        }
        let perms: Vec<Vec<usize>> = minimizers
            .iter()
            .map(|p| p.iter().map(|&w| inv0[w]).collect())
            .collect();
        let n = self.legs.len();
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            by_pair.entry((a.min(b), a.max(b))).or_default().push(e);
        }
        let mut out = Vec::new();
        for p in &perms {
            // For each edge: the target group and the image of its first endpoint.
            let mut groups: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                let (x, y) = (p[a], p[b]);
                let key = (x.min(y), x.max(y));
                groups.entry(key).or_default().push((e, x));
            }
            let mut partial: Vec<Vec<usize>> = vec![(0..self.num_half_edges()).collect()];
            for (key, sources) in &groups {
                let targets = &by_pair[key];
                let is_loop = key.0 == key.1;
                let mut next = Vec::new();
                for sigma in &partial {
                    for perm in permutations(targets.len()) {
                        for flips in 0u32..(if is_loop { 1 << sources.len() } else { 1 }) {
                            let mut s = sigma.clone();
                            for (j, &(e, x)) in sources.iter().enumerate() {
                                let t = targets[perm[j]];
                                let rev = self.edges[t].0 != x;
                                let flip = rev ^ (flips & (1 << j) != 0);
                                let (s0, s1) = if flip { (1, 0) } else { (0, 1) };
                                s[n + 2 * e] = n + 2 * t + s0;
                                s[n + 2 * e + 1] = n + 2 * t + s1;
                            }
                            next.push(s);
                        }
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    g: &StableGraph,
    classes: &[Vec<usize>],
    starts: &[usize],
    ci: usize,
    slot: usize,
    p: &mut Vec<usize>,
    used: &mut Vec<Vec<bool>>,
    best: &mut Option<Vec<u32>>,
    winners: &mut Vec<Vec<usize>>,
) {
    if ci == classes.len() {
        let enc = g.encode(p);
        match best {
            Some(b) if enc > *b => {}
            Some(b) if enc == *b => winners.push(p.clone()),
            _ => {
                *best = Some(enc);
                winners.clear();
                winners.push(p.clone());
            }
        }
        return;
    }
    if slot == classes[ci].len() {
        search(g, classes, starts, ci + 1, 0, p, used, best, winners);
        return;
    }
    for j in 0..classes[ci].len() {
        if used[ci][j] {
            continue;
        }
        used[ci][j] = true;
        p[classes[ci][j]] = starts[ci] + slot;
        search(g, classes, starts, ci, slot + 1, p, used, best, winners);
        used[ci][j] = false;
    }
}

fn rank(keys: &[Vec<u32>]) -> Vec<usize> {
    let mut sorted: Vec<&Vec<u32>> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(&k).unwrap())
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(k, &mut cur, &mut used, &mut out);
    out
}

/// Graphs obtained from `gr` by one degeneration (a new loop or a vertex split).
fn degenerations(gr: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let n = gr.num_legs();
    for v in 0..gr.num_vertices() {
        if gr.genera[v] >= 1 {
            let mut h = gr.clone();
            h.genera[v] -= 1;
            h.edges.push((v, v));
            out.push(h);
        }
        let hs = gr.half_edges_at(v);
        let k = hs.len();
        let gv = gr.genera[v];
        let nv = gr.num_vertices();
        for mask in 0u64..(1u64 << k) {
            let a = mask.count_ones() as i64;
            for h in 0..=gv {
                if 2 * h as i64 - 1 + a <= 0 || 2 * (gv - h) as i64 - 1 + (k as i64 - a) <= 0 {
                    continue;
                }
                let mut t = gr.clone();
                t.genera[v] = gv - h;
                t.genera.push(h);
                for (j, &he) in hs.iter().enumerate() {
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    if he < n {
                        t.legs[he] = nv;
                    } else {
                        let e = (he - n) / 2;
                        if (he - n) % 2 == 0 {
                            t.edges[e].0 = nv;
                        } else {
                            t.edges[e].1 = nv;
                        }
                    }
                }
                t.edges.push((v, nv));
                out.push(t);
            }
        }
    }
    out
}

/// Stable graphs of type `(g, n)` grouped by edge count, up to `max_edges` edges.
pub fn enumerate_by_edges(g: u32, n: usize, max_edges: usize) -> Result<Vec<Vec<StableGraph>>> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Unstable { g, n });
    }
    let top = (3 * g as i64 - 3 + n as i64).max(0) as usize;
    let mut levels = vec![vec![StableGraph::trivial(g, n)?]];
    for _ in 0..max_edges.min(top) {
        let mut next: BTreeSet<StableGraph> = BTreeSet::new();
        for gr in levels.last().unwrap() {
            for d in degenerations(gr) {
                next.insert(d.canonical());
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next.into_iter().collect());
    }
    Ok(levels)
}

/// One canonical representative per isomorphism class of `G_{g,n}`, ordered
/// by edge count and then by canonical form.
pub fn enumerate(g: u32, n: usize) -> Result<Vec<StableGraph>> {
    Ok(enumerate_by_edges(g, n, usize::MAX)?
        .into_iter()
        .flatten()
        .collect())
}

pub fn automorphism_order(gr: &StableGraph) -> u64 {
    gr.automorphism_order()
}

pub fn canonicalize(gr: &StableGraph) -> (StableGraph, GraphIso) {
    gr.canonicalize()
}

/// One vertex of genus `h` with `m` loops and all `n` legs.
pub fn bouquet_graph(h: u32, m: usize, n: usize) -> Result<StableGraph> {
    StableGraph::new(vec![h], vec![0; n], vec![(0, 0); m])
}

/// The rational-tails graphs of type `(g, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTailGraphs {
    /// Genus-`g` vertex `0` joined to a genus-0 vertex carrying every leg.
    /// The attaching half-edge on vertex `0` is half-edge `n`.
    pub xi: Option<StableGraph>,
    /// Chains genus `g` - genus 0 (other legs) - genus 0 (legs `i`, `j`),
    /// keyed by 0-based `(i, j)`; the genus-`g` attaching half-edge is `n`.
    pub xi_ij: Vec<((usize, usize), StableGraph)>,
}

pub fn rational_tail_graphs(g: u32, n: usize) -> Result<RationalTailGraphs> {
    if g == 0 {
        bail!(InvalidArgument, "rational tails need positive genus");
    }
    let xi = StableGraph::new(vec![g, 0], vec![1; n], vec![(0, 1)]).ok();
    let mut xi_ij = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let legs: Vec<usize> = (0..n)
                .map(|l| if l == i || l == j { 2 } else { 1 })
                .collect();
            if let Ok(gr) = StableGraph::new(vec![g, 0, 0], legs, vec![(0, 1), (1, 2)]) {
                xi_ij.push(((i, j), gr));
            }
        }
    }
    Ok(RationalTailGraphs { xi, xi_ij })
}

/// Result of replacing a vertex by a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graft {
    pub graph: StableGraph,
    /// Host half-edges keep their numbers; patch half-edge `h` becomes `patch_map[h]`.
    pub patch_map: Vec<usize>,
}

/// Replaces vertex `v` of `host` by `patch`. Patch leg `j` is glued to the
/// host half-edge `matching[j]`, which must sit at `v`.
pub fn graft(
    host: &StableGraph,
    v: usize,
    patch: &StableGraph,
    matching: &[usize],
) -> Result<Graft> {
    if patch.genus() != host.genera[v]
        || patch.num_legs() != host.valence(v)
        || matching.len() != patch.num_legs()
    {
        bail!(
            InvalidArgument,
            "patch of type ({}, {}) does not fit a vertex of type ({}, {})",
            patch.genus(),
            patch.num_legs(),
            host.genera[v],
            host.valence(v)
        );
    }
    let mut at_v = host.half_edges_at(v);
    let mut m = matching.to_vec();
    m.sort_unstable();
    at_v.sort_unstable();
    if m != at_v {
        bail!(
            InvalidArgument,
            "matching {:?} is not a bijection onto the half-edges at vertex {}",
            matching,
            v
        );
    }
    let nh = host.num_vertices();
    let pv = |w: usize| if w == 0 { v } else { nh + w - 1 };
    let mut t = host.clone();
    t.genera[v] = patch.genera[0];
    t.genera.extend_from_slice(&patch.genera[1..]);
    let n = host.num_legs();
    for (j, &h) in matching.iter().enumerate() {
        let target = pv(patch.legs[j]);
        if h < n {
            t.legs[h] = target;
        } else {
            let e = (h - n) / 2;
            if (h - n) % 2 == 0 {
                t.edges[e].0 = target;
            } else {
                t.edges[e].1 = target;
            }
        }
    }
    let base = host.num_edges();
    for &(a, b) in &patch.edges {
        t.edges.push((pv(a), pv(b)));
    }
    let pn = patch.num_legs();
    let mut patch_map = Vec::with_capacity(patch.num_half_edges());
    patch_map.extend_from_slice(matching);
    for f in 0..patch.num_edges() {
        patch_map.push(n + 2 * (base + f));
        patch_map.push(n + 2 * (base + f) + 1);
    }
    debug_assert_eq!(patch_map.len(), pn + 2 * patch.num_edges());
    t.check()?;
    Ok(Graft {
        graph: t,
        patch_map,
    })
}

/// Memoized canonical forms, automorphism groups and enumerations.
#[derive(Debug, Clone, Default)]
pub struct GraphCache {
    canon: BTreeMap<StableGraph, (StableGraph, Vec<usize>)>,
    auts: BTreeMap<StableGraph, Vec<Vec<usize>>>,
    enumerations: BTreeMap<(u32, usize), Vec<Vec<StableGraph>>>,
}

impl GraphCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical graph and the half-edge map onto it.
    pub fn canonical(&mut self, gr: &StableGraph) -> (StableGraph, Vec<usize>) {
        if let Some(c) = self.canon.get(gr) {
            return c.clone();
        }
        let (c, iso) = gr.canonicalize();
        let entry = (c, iso.half_edge_map);
        self.canon.insert(gr.clone(), entry.clone());
        entry
    }

    pub fn automorphisms(&mut self, canonical: &StableGraph) -> &[Vec<usize>] {
        if !self.auts.contains_key(canonical) {
            let a = canonical.automorphisms();
            self.auts.insert(canonical.clone(), a);
        }
        &self.auts[canonical]
    }

    pub fn automorphism_order(&mut self, gr: &StableGraph) -> u64 {
        let (c, _) = self.canonical(gr);
        self.automorphisms(&c).len() as u64
    }

    /// Canonical decorated form: canonical graph, then the smallest image of
    /// the transported decoration under the automorphism group.
    pub fn canonical_decorated(
        &mut self,
        gr: &StableGraph,
        psi: &[u32],
    ) -> (StableGraph, Vec<u32>) {
        let (c, map) = self.canonical(gr);
        let mut moved = vec![0u32; psi.len()];
        for (h, &x) in psi.iter().enumerate() {
            moved[map[h]] = x;
        }
        if moved.iter().all(|&x| x == 0) {
            return (c, moved);
        }
        let mut best = moved.clone();
        let mut cand = vec![0u32; psi.len()];
        for sigma in self.automorphisms(&c) {
            for (h, &x) in moved.iter().enumerate() {
                cand[sigma[h]] = x;
            }
            if cand < best {
                best.clone_from(&cand);
            }
        }
        (c, best)
    }

    /// Graphs of `G_{g,n}` with at most `max_edges` edges.
    pub fn enumerate(&mut self, g: u32, n: usize, max_edges: usize) -> Result<Vec<StableGraph>> {
        let top = (3 * g as i64 - 3 + n as i64).max(0) as usize;
        let want = max_edges.min(top);
        let have = self.enumerations.get(&(g, n)).map(|l| l.len()).unwrap_or(0);
        if have < want + 1 {
            let levels = enumerate_by_edges(g, n, want)?;
            self.enumerations.insert((g, n), levels);
        }
        let levels = &self.enumerations[&(g, n)];
        Ok(levels.iter().take(want + 1).flatten().cloned().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate(0, 3).unwrap().len(), 1);
        assert_eq!(enumerate(1, 1).unwrap().len(), 2);
        assert_eq!(enumerate(1, 2).unwrap().len(), 5);
        assert_eq!(enumerate(0, 4).unwrap().len(), 4);
        assert_eq!(enumerate(0, 5).unwrap().len(), 26);
        assert_eq!(enumerate(2, 0).unwrap().len(), 7);
        assert!(enumerate(1, 0).is_err());
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(StableGraph::trivial(2, 3).unwrap().automorphism_order(), 1);
        assert_eq!(bouquet_graph(0, 1, 2).unwrap().automorphism_order(), 2);
        assert_eq!(bouquet_graph(0, 2, 1).unwrap().automorphism_order(), 8);
        let theta = StableGraph::new(vec![0, 0], vec![], vec![(0, 1); 3]).unwrap();
        assert_eq!(theta.automorphism_order(), 12);
        assert_eq!(theta.automorphisms().len(), 12);
    }

    #[test]
    fn text_round_trip() {
        let gr = StableGraph::new(vec![1, 0], vec![1, 1], vec![(0, 1)]).unwrap();
        let s = gr.to_text();
        assert_eq!(s, "SG1|g=1,0|l=1,1|e=0-1");
        assert_eq!(StableGraph::from_text(&s).unwrap(), gr);
        assert!(StableGraph::from_text("SG2|g=0|l=|e=").is_err());
    }

    #[test]
    fn rational_tails_presence() {
        let r = rational_tail_graphs(2, 2).unwrap();
        assert!(r.xi.is_some() && r.xi_ij.is_empty());
        assert_eq!(rational_tail_graphs(2, 3).unwrap().xi_ij.len(), 3);
        assert!(rational_tail_graphs(1, 1).unwrap().xi.is_none());
    }
}
