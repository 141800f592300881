//! Simple undirected graphs on at most 64 vertices, stored as bitset rows.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub const MAX_VERTICES: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i)
        }
    })
}

pub(crate) fn set_of(vs: &[usize]) -> u64 {
    vs.iter().fold(0u64, |acc, &v| acc | (1u64 << v))
}

pub(crate) fn list_of(s: u64) -> Vec<usize> {
    bits(s).collect()
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices (K̄_n).
    ///
    /// # Panics
    /// If `n` exceeds [`MAX_VERTICES`].
    pub fn empty(n: usize) -> Graph {
        assert!(n <= MAX_VERTICES, "graph with {n} vertices exceeds the {MAX_VERTICES}-vertex limit");
        Graph { n, adj: vec![0; n] }
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        let all = full_mask(n);
        for v in 0..n {
            g.adj[v] = all & !(1u64 << v);
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        if n >= 3 {
            for v in 0..n {
                g.add_edge(v, (v + 1) % n);
            }
        } else if n == 2 {
            g.add_edge(0, 1);
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Builds a graph from a 0/1 adjacency matrix, rejecting loops and asymmetry.
    pub fn from_adjacency(m: &[Vec<u8>]) -> Result<Graph> {
        let n = m.len();
        if n > MAX_VERTICES {
            return Err(Error::SizeLimit(format!("{n} vertices")));
        }
        let mut g = Graph::empty(n);
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed("adjacency matrix is not square".into()));
            }
            for (j, &e) in row.iter().enumerate() {
                if e > 1 {
                    return Err(Error::Malformed("adjacency entries must be 0 or 1".into()));
                }
                if e != m[j][i] {
                    return Err(Error::Malformed("adjacency matrix is not symmetric".into()));
                }
                if e == 1 {
                    if i == j {
                        return Err(Error::Malformed("self-loop in adjacency matrix".into()));
                    }
                    g.adj[i] |= 1u64 << j;
                }
            }
        }
        Ok(g)
    }

    /// Graph from symmetric bitset rows without self-loops.
    pub(crate) fn from_masks(n: usize, adj: Vec<u64>) -> Graph {
        debug_assert!(adj.len() == n && (0..n).all(|v| adj[v] & (1u64 << v) == 0));
        Graph { n, adj }
    }

    pub fn to_adjacency(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.has_edge(i, j) as u8).collect()).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && (self.adj[u] >> v) & 1 == 1
    }

    /// Adjacent or equal.
    pub fn confusable(&self, u: usize, v: usize) -> bool {
        u == v || (self.adj[u] >> v) & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop");
        self.adj[u] |= 1u64 << v;
        self.adj[v] |= 1u64 << u;
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in bits(self.adj[u]) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_edgeless(&self) -> bool {
        self.adj.iter().all(|&r| r == 0)
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let s = set_of(set);
        set.iter().all(|&v| self.adj[v] & s == 0)
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        let s = set_of(set);
        set.iter().all(|&v| (self.adj[v] | (1u64 << v)) & s == s)
    }

    pub(crate) fn is_independent_mask(&self, s: u64) -> bool {
        bits(s).all(|v| self.adj[v] & s == 0)
    }

    pub fn complement(&self) -> Graph {
        let all = full_mask(self.n);
        Graph { n: self.n, adj: (0..self.n).map(|v| all & !self.adj[v] & !(1u64 << v)).collect() }
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!("union of graphs on {} and {} vertices", self.n, other.n)));
        }
        Ok(Graph { n: self.n, adj: self.adj.iter().zip(&other.adj).map(|(a, b)| a | b).collect() })
    }

    /// Vertices of `self` first, then those of `other` shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        let n = self.n + other.n;
        if n > MAX_VERTICES {
            return Err(Error::SizeLimit(format!("{n} vertices")));
        }
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|&r| r << self.n));
        Ok(Graph { n, adj })
    }

    /// Strong product with row-major vertex order `u * other.n() + u'`.
    pub fn strong_product(&self, other: &Graph) -> Result<Graph> {
        let n = self.n * other.n;
        if n > MAX_VERTICES {
            return Err(Error::SizeLimit(format!("strong product with {n} vertices")));
        }
        let mut g = Graph::empty(n);
        for u in 0..self.n {
            for v in 0..self.n {
                if !self.confusable(u, v) {
                    continue;
                }
                for u2 in 0..other.n {
                    for v2 in 0..other.n {
                        if (u, u2) != (v, v2) && other.confusable(u2, v2) {
                            g.adj[u * other.n + u2] |= 1u64 << (v * other.n + v2);
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn strong_power(&self, k: usize) -> Result<Graph> {
        if k == 0 {
            return Err(Error::Precondition("strong power needs k >= 1".into()));
        }
        let mut g = self.clone();
        for _ in 1..k {
            g = g.strong_product(self)?;
        }
        Ok(g)
    }

    /// Subgraph induced on `verts`, relabelled `0..verts.len()` in the given order.
    pub fn induced(&self, verts: &[usize]) -> Graph {
        let mut g = Graph::empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if self.has_edge(u, v) {
                    g.adj[i] |= 1u64 << j;
                }
            }
        }
        g
    }
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_adjacency().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Vec::<Vec<u8>>::deserialize(d)?;
        Graph::from_adjacency(&m).map_err(serde::de::Error::custom)
    }
}

fn color_sort(adj: &[u64], p: u64) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(p.count_ones() as usize);
    let mut rest = p;
    let mut color = 0;
    while rest != 0 {
        color += 1;
        let mut q = rest;
        while q != 0 {
            let v = q.trailing_zeros() as usize;
            q &= !(1u64 << v);
            rest &= !(1u64 << v);
            q &= !adj[v];
            order.push((v, color));
        }
    }
    order
}

fn expand(adj: &[u64], r: &mut Vec<usize>, mut p: u64, best: &mut Vec<usize>) {
    let order = color_sort(adj, p);
    for &(v, color) in order.iter().rev() {
        if r.len() + color <= best.len() {
            return;
        }
        r.push(v);
        let np = p & adj[v];
        if np == 0 {
            if r.len() > best.len() {
                *best = r.clone();
            }
        } else {
            expand(adj, r, np, best);
        }
        r.pop();
        p &= !(1u64 << v);
    }
}

/// Maximum clique by branch and bound with a greedy-colouring bound.
pub fn max_clique(g: &Graph) -> Vec<usize> {
    let mut best = Vec::new();
    if g.n == 0 {
        return best;
    }
    let mut r = Vec::new();
    expand(&g.adj, &mut r, full_mask(g.n), &mut best);
    best.sort_unstable();
    best
}

/// Exact independence number with a sorted witness set.
pub fn independence_number(g: &Graph) -> Result<(usize, Vec<usize>)> {
    if g.n > MAX_VERTICES {
        return Err(Error::SizeLimit(format!("{} vertices", g.n)));
    }
    let w = max_clique(&g.complement());
    Ok((w.len(), w))
}

/// Independence number of the subgraph induced by the vertex mask `sub`.
pub(crate) fn independence_in(g: &Graph, sub: u64) -> (usize, u64) {
    if sub == 0 {
        return (0, 0);
    }
    let all = full_mask(g.n);
    let cadj: Vec<u64> = (0..g.n).map(|v| all & !g.adj[v] & !(1u64 << v) & sub).collect();
    let mut best = Vec::new();
    let mut r = Vec::new();
    expand(&cadj, &mut r, sub, &mut best);
    (best.len(), set_of(&best))
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pivot = bits(p | x).max_by_key(|&u| (adj[u] & p).count_ones()).unwrap();
    for v in bits(p & !adj[pivot]) {
        bron_kerbosch(adj, r | (1u64 << v), p & adj[v], x & adj[v], out);
        p &= !(1u64 << v);
        x |= 1u64 << v;
    }
}

pub(crate) fn maximal_clique_masks(g: &Graph) -> Vec<u64> {
    let mut out = Vec::new();
    if g.n == 0 {
        return out;
    }
    bron_kerbosch(&g.adj, 0, full_mask(g.n), 0, &mut out);
    out.sort_unstable_by_key(|&m| list_of(m));
    out
}

/// Cliques of `g` as sorted vertex lists, in lexicographic order. With
/// `maximal_only` only inclusion-maximal cliques are returned; otherwise every
/// clique including the empty set.
pub fn enumerate_cliques(g: &Graph, maximal_only: bool) -> Vec<Vec<usize>> {
    let maxi = maximal_clique_masks(g);
    if maximal_only {
        return maxi.into_iter().map(list_of).collect();
    }
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    all.insert(Vec::new());
    for m in maxi {
        // every subset of a clique is a clique
        let mut sub = m;
        loop {
            all.insert(list_of(sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & m;
        }
    }
    all.into_iter().collect()
}
