//! One-shot quantities: dual clique and independent pairs, the independence
//! product `π`, and the non-convex program `ρ` bounding it.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::ConfusionFamily;
use crate::graph::{independence_in, list_of, maximal_clique_masks, set_of, Graph};
use crate::numerics::{min_eigenvalue, solve_sdp, SdpOptions, SdpProblem, SparseSym};
use crate::{Error, Result};

pub const ONESHOT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Clique,
    Independent,
}

/// `s ⊆ X1`, `t ⊆ X2`, both sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualPair {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub kind: PairKind,
}

impl DualPair {
    /// Re-checks the defining property against `fam`.
    pub fn holds_in(&self, fam: &ConfusionFamily) -> bool {
        if self.s.iter().any(|&a| a >= fam.x1_size()) || self.t.iter().any(|&b| b >= fam.x2_size()) {
            return false;
        }
        match self.kind {
            PairKind::Clique => self.s.iter().all(|&a| fam.g[a].is_clique(&self.t)) && self.t.iter().all(|&b| fam.h[b].is_clique(&self.s)),
            PairKind::Independent => {
                self.s.iter().all(|&a| fam.g[a].is_independent(&self.t)) && self.t.iter().all(|&b| fam.h[b].is_independent(&self.s))
            }
        }
    }
}

fn check_size(fam: &ConfusionFamily) -> Result<()> {
    if fam.x1_size() > ONESHOT_LIMIT || fam.x2_size() > ONESHOT_LIMIT {
        return Err(Error::SizeLimit(format!("alphabets above {ONESHOT_LIMIT}")));
    }
    Ok(())
}

fn intersection(gs: impl Iterator<Item = Graph>, n: usize) -> Graph {
    gs.fold(Graph::complete(n), |acc, g| {
        let pairs: Vec<(usize, usize)> = acc.edges().into_iter().filter(|&(u, v)| g.has_edge(u, v)).collect();
        Graph::from_edges(n, &pairs)
    })
}

/// All maximal dual clique pairs with non-empty sides, sorted by `(s, t)`.
pub fn enumerate_dual_clique_pairs(fam: &ConfusionFamily) -> Result<Vec<DualPair>> {
    check_size(fam)?;
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let mut out = Vec::new();
    for smask in 1u64..(1u64 << m1) {
        let s = list_of(smask);
        let allowed: Vec<usize> = (0..m2).filter(|&b| fam.h[b].is_clique(&s)).collect();
        if allowed.is_empty() {
            continue;
        }
        let common = intersection(s.iter().map(|&a| fam.g[a].induced(&allowed)), allowed.len());
        for tm in maximal_clique_masks(&common) {
            let t: Vec<usize> = list_of(tm).into_iter().map(|i| allowed[i]).collect();
            let extendable = (0..m1).filter(|a| smask & (1u64 << a) == 0).any(|a| {
                fam.g[a].is_clique(&t) && t.iter().all(|&b| fam.h[b].is_clique(&list_of(smask | (1u64 << a))))
            });
            if !extendable {
                out.push(DualPair { s: s.clone(), t, kind: PairKind::Clique });
            }
        }
    }
    out.sort_by(|x, y| (&x.s, &x.t).cmp(&(&y.s, &y.t)));
    Ok(out)
}

/// Lexicographically least maximum independent set of `g` inside `sub`.
fn least_max_independent(g: &Graph, sub: u64, k: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut avail = sub;
    for v in list_of(sub) {
        if chosen.len() == k {
            break;
        }
        if avail & (1u64 << v) == 0 {
            continue;
        }
        let rest = avail & !g.neighbors(v) & !((1u64 << (v + 1)) - 1);
        if chosen.len() + 1 + independence_in(g, rest).0 >= k {
            chosen.push(v);
            avail = rest;
        } else {
            avail &= !(1u64 << v);
        }
    }
    chosen
}

/// The independence product `π` with the lexicographically least witness.
pub fn independence_product(fam: &ConfusionFamily) -> Result<(usize, DualPair)> {
    check_size(fam)?;
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let alpha_g: Vec<usize> = fam.g.iter().map(|g| independence_in(g, (1u64 << m2) - 1).0).collect();
    let mut best = 0usize;
    let mut witness: Option<(Vec<usize>, Vec<usize>)> = None;
    for smask in 1u64..(1u64 << m1) {
        let s = list_of(smask);
        let cap = s.iter().map(|&a| alpha_g[a]).min().unwrap_or(0);
        if s.len() * cap < best {
            continue;
        }
        let allowed = set_of(&(0..m2).filter(|&b| fam.h[b].is_independent_mask(smask)).collect::<Vec<_>>());
        let mut union = Graph::empty(m2);
        for &a in &s {
            for (u, v) in fam.g[a].edges() {
                union.add_edge(u, v);
            }
        }
        let (k, _) = independence_in(&union, allowed);
        let val = s.len() * k;
        if val == 0 || val < best {
            continue;
        }
        let t = least_max_independent(&union, allowed, k);
        let better = match &witness {
            None => true,
            Some((ws, wt)) => val > best || (&s, &t) < (ws, wt),
        };
        if better {
            best = val;
            witness = Some((s, t));
        }
    }
    let (s, t) = witness.ok_or_else(|| Error::Internal("no dual independent pair".into()))?;
    Ok((best, DualPair { s, t, kind: PairKind::Independent }))
}

#[derive(Debug, Clone)]
pub struct RhoCertificate {
    pub gamma: DMatrix<f64>,
    pub value: f64,
}

fn objective(m1: usize, m2: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(m1 + m2, m1 + m2);
    for i in 0..m1 {
        for j in 0..m2 {
            b[(i, m1 + j)] = 1.0;
            b[(m1 + j, i)] = 1.0;
        }
    }
    b
}

/// Largest violation of the equality and complementarity constraints.
pub fn rho_violation(fam: &ConfusionFamily, gamma: &DMatrix<f64>) -> f64 {
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let t1: f64 = (0..m1).map(|i| gamma[(i, i)]).sum();
    let t2: f64 = (m1..m1 + m2).map(|i| gamma[(i, i)]).sum();
    let mut worst = (t1 - 1.0).abs().max((t2 - 1.0).abs());
    for i in 0..m1 {
        for (j, k) in fam.g[i].edges() {
            worst = worst.max((gamma[(i, m1 + j)] * gamma[(i, m1 + k)]).abs());
        }
    }
    for j in 0..m2 {
        for (a, b) in fam.h[j].edges() {
            worst = worst.max((gamma[(a, m1 + j)] * gamma[(b, m1 + j)]).abs());
        }
    }
    worst
}

/// The rank-one feasible point `Γ = v vᵀ` built from a dual independent pair.
pub fn rho_lower_certificate(fam: &ConfusionFamily, pair: &DualPair) -> Result<RhoCertificate> {
    let checked = DualPair { kind: PairKind::Independent, ..pair.clone() };
    if pair.s.is_empty() || pair.t.is_empty() || !checked.holds_in(fam) {
        return Err(Error::Precondition("not a dual independent pair".into()));
    }
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let mut v = vec![0.0; m1 + m2];
    for &a in &pair.s {
        v[a] = 1.0 / (pair.s.len() as f64).sqrt();
    }
    for &b in &pair.t {
        v[m1 + b] = 1.0 / (pair.t.len() as f64).sqrt();
    }
    let gamma = DMatrix::from_fn(m1 + m2, m1 + m2, |i, j| v[i] * v[j]);
    let value = objective(m1, m2).component_mul(&gamma).sum();
    if min_eigenvalue(&gamma) < -1e-9 || rho_violation(fam, &gamma) > 1e-9 {
        return Err(Error::Internal("constructed certificate is infeasible".into()));
    }
    Ok(RhoCertificate { gamma, value })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhoUpper {
    pub value: f64,
    pub branches: usize,
    pub complete: bool,
    /// Largest primal-dual gap left by a branch; the value stays a valid bound.
    pub max_gap: f64,
}

/// Maximal admissible supports of the off-diagonal block, as cell masks over
/// `i * m2 + j`.
fn admissible_supports(fam: &ConfusionFamily) -> Vec<u64> {
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let mut conflict = Graph::empty(m1 * m2);
    for i in 0..m1 {
        for (j, k) in fam.g[i].edges() {
            conflict.add_edge(i * m2 + j, i * m2 + k);
        }
    }
    for j in 0..m2 {
        for (a, b) in fam.h[j].edges() {
            conflict.add_edge(a * m2 + j, b * m2 + j);
        }
    }
    maximal_clique_masks(&conflict.complement())
}

/// Evaluates `ρ` by splitting the disjunctive constraints into maximal
/// admissible supports and solving one SDP per support. Each branch reports a
/// dual-certified value, so unconverged branches still give a valid bound;
/// `complete` is false if `branch_limit` cut the search.
pub fn rho_upper_estimate(fam: &ConfusionFamily, branch_limit: usize) -> Result<RhoUpper> {
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    if m1 + m2 > 32 || m1 * m2 > 64 {
        return Err(Error::SizeLimit("ρ needs m1 + m2 ≤ 32 and m1·m2 ≤ 64".into()));
    }
    let supports = admissible_supports(fam);
    let c = -objective(m1, m2);
    let mut best = f64::NEG_INFINITY;
    let mut done = 0;
    let mut max_gap: f64 = 0.0;
    for &r in supports.iter().take(branch_limit) {
        let mut a = vec![SparseSym::diag_range(0, m1), SparseSym::diag_range(m1, m1 + m2)];
        let mut b = vec![1.0, 1.0];
        for i in 0..m1 {
            for j in 0..m2 {
                if r & (1u64 << (i * m2 + j)) == 0 {
                    a.push(SparseSym::entry(i, m1 + j, 1.0));
                    b.push(0.0);
                }
            }
        }
        let mut shift = vec![0.0; a.len()];
        shift[0] = 1.0;
        shift[1] = 1.0;
        let prob = SdpProblem { n: m1 + m2, c: c.clone(), a, b };
        let sol = solve_sdp(&prob, SdpOptions::default());
        max_gap = max_gap.max(sol.gap);
        best = best.max(-prob.certified_dual(&sol.y, &shift));
        done += 1;
    }
    Ok(RhoUpper { value: best, branches: done, complete: done == supports.len(), max_gap })
}
