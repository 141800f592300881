//! Achievable rate pairs: the random-coding formula, the linear-code rate
//! function `L(λ)`, and its best restriction to sub-alphabets.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::ConfusionFamily;
use crate::code::prime_power;
use crate::numerics::Piece;
use crate::outer::{multistart, OuterOptions, ProductDistribution};
use crate::{h2, Error, Result};

pub const SUB_ALPHABET_LIMIT: usize = 10;
/// Ties beyond this many sub-alphabet pairs are counted but not listed.
pub const TIE_LIST_LIMIT: usize = 64;

/// `d1`: Alice's symbols whose `G` graph is edgeless; `d2`: Bob's symbols whose `H` graph is edgeless.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectingSets {
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
}

pub fn detecting_sets(fam: &ConfusionFamily) -> DetectingSets {
    DetectingSets {
        d1: (0..fam.x1_size()).filter(|&a| fam.g[a].is_edgeless()).collect(),
        d2: (0..fam.x2_size()).filter(|&b| fam.h[b].is_edgeless()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerMethod {
    RandomCoding,
    LinearCodes,
    /// A single-letter dual independent pair.
    OneShot,
}

impl InnerMethod {
    pub fn name(self) -> &'static str {
        match self {
            InnerMethod::RandomCoding => "random-coding",
            InnerMethod::LinearCodes => "linear-codes",
            InnerMethod::OneShot => "one-shot",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub q1: usize,
    pub q2: usize,
    pub tau1: usize,
    pub tau2: usize,
    pub alpha: f64,
    pub beta: f64,
    pub x1_sub: Vec<usize>,
    pub x2_sub: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InnerParams {
    Distribution(ProductDistribution),
    Linear(LinearParams),
    Pair { s: Vec<usize>, t: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerPoint {
    pub r1: f64,
    pub r2: f64,
    pub method: InnerMethod,
    pub parameters: InnerParams,
}

impl InnerPoint {
    pub fn weighted(&self, lambda: f64) -> f64 {
        lambda * self.r1 + (1.0 - lambda) * self.r2
    }

    pub fn sum_rate(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Pair-collision masses `Σ_{x2} p2 Σ_{x1 ≃ x1'} p1 p1'` and the mirror sum.
fn collision(fam: &ConfusionFamily, p1: &[f64], p2: &[f64]) -> (f64, f64) {
    let quad = |g: &crate::graph::Graph, p: &[f64]| -> f64 {
        let mut s = 0.0;
        for u in 0..p.len() {
            for v in 0..p.len() {
                if u == v || g.has_edge(u, v) {
                    s += p[u] * p[v];
                }
            }
        }
        s
    };
    let s1 = (0..fam.x2_size()).map(|b| p2[b] * quad(&fam.h[b], p1)).sum();
    let s2 = (0..fam.x1_size()).map(|a| p1[a] * quad(&fam.g[a], p2)).sum();
    (s1, s2)
}

/// Random-coding rates `r1 = −½ log Σ_{x2} p2(x2) Σ_{x1 ≃ x1'} p1(x1) p1(x1')`, `r2` symmetric.
pub fn random_coding_point(fam: &ConfusionFamily, d: &ProductDistribution) -> Result<InnerPoint> {
    if d.p1.len() != fam.x1_size() || d.p2.len() != fam.x2_size() {
        return Err(Error::SizeMismatch("distribution does not match the alphabets".into()));
    }
    let (s1, s2) = collision(fam, &d.p1, &d.p2);
    Ok(InnerPoint {
        r1: (-0.5 * s1.log2()).max(0.0),
        r2: (-0.5 * s2.log2()).max(0.0),
        method: InnerMethod::RandomCoding,
        parameters: InnerParams::Distribution(d.clone()),
    })
}

/// Maximises `λ r1 + (1−λ) r2` of the random-coding point; `λ = ½` gives the
/// best sum rate.
pub fn max_random_coding_weighted(fam: &ConfusionFamily, lambda: f64, opts: &OuterOptions) -> Result<InnerPoint> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Precondition(format!("λ = {lambda} is outside [0, 1]")));
    }
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let eval = |x: &[f64]| -> Vec<Piece> {
        let (p1, p2) = x.split_at(m1);
        let (s1, s2) = collision(fam, p1, p2);
        let mut grad = vec![0.0; m1 + m2];
        // d/dp of −½ log S is −S'/(2 S ln 2)
        let (c1, c2) = (-lambda / (2.0 * s1 * LN_2), -(1.0 - lambda) / (2.0 * s2 * LN_2));
        for b in 0..m2 {
            let h = &fam.h[b];
            let mut quad = 0.0;
            for u in 0..m1 {
                let au: f64 = (0..m1).filter(|&v| v == u || h.has_edge(u, v)).map(|v| p1[v]).sum();
                grad[u] += c1 * 2.0 * p2[b] * au;
                quad += p1[u] * au;
            }
            grad[m1 + b] += c1 * quad;
        }
        for a in 0..m1 {
            let g = &fam.g[a];
            let mut quad = 0.0;
            for u in 0..m2 {
                let au: f64 = (0..m2).filter(|&v| v == u || g.has_edge(u, v)).map(|v| p2[v]).sum();
                grad[m1 + u] += c2 * 2.0 * p1[a] * au;
                quad += p2[u] * au;
            }
            grad[a] += c2 * quad;
        }
        vec![Piece { value: -0.5 * (lambda * s1.log2() + (1.0 - lambda) * s2.log2()), grad }]
    };
    let best = multistart(&[m1, m2], eval, opts.starts, opts);
    random_coding_point(fam, &best.argmax)
}

pub fn max_random_coding(fam: &ConfusionFamily, opts: &OuterOptions) -> Result<InnerPoint> {
    max_random_coding_weighted(fam, 0.5, opts)
}

/// `max_x w h(x) + x (w log τ + c) + (1−x) w log(q−τ)` and its maximiser.
fn best_share(w: f64, tau: usize, q: usize, c: f64) -> (f64, f64) {
    if tau == 0 {
        return (w * (q as f64).log2(), 0.0);
    }
    if tau == q {
        return (w * (q as f64).log2() + c, 1.0);
    }
    if w == 0.0 {
        return if c > 0.0 { (c, 1.0) } else { (0.0, 0.0) };
    }
    let a = (tau as f64).log2() + c / w;
    let b = ((q - tau) as f64).log2();
    let m = a.max(b);
    let lse = m + (2f64.powf(a - m) + 2f64.powf(b - m)).log2();
    (w * lse, 2f64.powf(a - lse))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRate {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Rates of the coset construction with code rates `α = k1/n` (over `GF(q1)`)
/// and `β = k2/n` (over `GF(q2)`); `−∞` when a share sits on an empty symbol class.
pub fn linear_rates(q1: usize, q2: usize, tau1: usize, tau2: usize, alpha: f64, beta: f64) -> (f64, f64) {
    let lg = |x: f64| if x > 0.0 { x.log2() } else { 0.0 };
    // a positive share on an empty symbol class is infeasible
    let xlog = |w: f64, v: usize| if w == 0.0 { 0.0 } else if v == 0 { f64::NEG_INFINITY } else { w * lg(v as f64) };
    let r1 = h2(beta) + xlog(beta, tau1) + xlog(1.0 - beta, q1 - tau1) - (1.0 - alpha) * lg(q1 as f64);
    let r2 = h2(alpha) + xlog(alpha, tau2) + xlog(1.0 - alpha, q2 - tau2) - (1.0 - beta) * lg(q2 as f64);
    (r1, r2)
}

fn check_alphabet(q: usize, tau: usize) -> Result<()> {
    if q != 1 && prime_power(q).is_none() {
        return Err(Error::Precondition(format!("{q} is not a prime power")));
    }
    if tau > q {
        return Err(Error::Precondition(format!("τ = {tau} exceeds q = {q}")));
    }
    Ok(())
}

/// `L(λ) = max_{α,β} λ R1 + (1−λ) R2`, which separates into closed-form
/// one-dimensional maximisations.
pub fn linear_code_l(lambda: f64, q1: usize, q2: usize, tau1: usize, tau2: usize) -> Result<LinearRate> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Precondition(format!("λ = {lambda} is outside [0, 1]")));
    }
    check_alphabet(q1, tau1)?;
    check_alphabet(q2, tau2)?;
    let (l1, l2) = ((q1 as f64).log2(), (q2 as f64).log2());
    let (vb, beta) = best_share(lambda, tau1, q1, (1.0 - lambda) * l2);
    let (va, alpha) = best_share(1.0 - lambda, tau2, q2, lambda * l1);
    let value = vb + va - lambda * l1 - (1.0 - lambda) * l2;
    let (r1, r2) = linear_rates(q1, q2, tau1, tau2, alpha, beta);
    Ok(LinearRate { value, alpha, beta, r1, r2 })
}

/// The best sub-alphabet pair at one `λ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubAlphabetChoice {
    pub lambda: f64,
    pub value: f64,
    pub point: InnerPoint,
    /// Every `(X1′, X2′)` attaining the value, lexicographically, up to the listing cap.
    pub maximizers: Vec<(Vec<usize>, Vec<usize>)>,
    pub ties: usize,
}

fn bits(m: u64) -> Vec<usize> {
    (0..64).filter(|&i| m & (1u64 << i) != 0).collect()
}

/// Enumerates all prime-power (or singleton) sub-alphabets, recomputes the
/// detecting symbols of the restriction, and keeps the best `L(λ)` per `λ`.
pub fn best_sub_alphabet(fam: &ConfusionFamily, lambdas: &[f64]) -> Result<Vec<SubAlphabetChoice>> {
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    if m1 > SUB_ALPHABET_LIMIT || m2 > SUB_ALPHABET_LIMIT {
        return Err(Error::SizeLimit(format!("alphabets above {SUB_ALPHABET_LIMIT}")));
    }
    let ok = |k: usize| k == 1 || prime_power(k).is_some();
    let subs1: Vec<u64> = (1u64..1 << m1).filter(|s| ok(s.count_ones() as usize)).collect();
    let subs2: Vec<u64> = (1u64..1 << m2).filter(|s| ok(s.count_ones() as usize)).collect();
    // (q1, τ1, q2, τ2) for every pair
    let mut shapes: Vec<((usize, usize, usize, usize), u64, u64)> = Vec::with_capacity(subs1.len() * subs2.len());
    for &s1 in &subs1 {
        for &s2 in &subs2 {
            let tau1 = bits(s1).into_iter().filter(|&a| fam.g[a].is_independent(&bits(s2))).count();
            let tau2 = bits(s2).into_iter().filter(|&b| fam.h[b].is_independent(&bits(s1))).count();
            shapes.push(((s1.count_ones() as usize, tau1, s2.count_ones() as usize, tau2), s1, s2));
        }
    }
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut cache: HashMap<(usize, usize, usize, usize), LinearRate> = HashMap::new();
        let mut best = f64::NEG_INFINITY;
        for (shape, _, _) in &shapes {
            if !cache.contains_key(shape) {
                cache.insert(*shape, linear_code_l(lambda, shape.0, shape.2, shape.1, shape.3)?);
            }
            best = best.max(cache[shape].value);
        }
        let mut winners: Vec<(Vec<usize>, Vec<usize>, (usize, usize, usize, usize))> = shapes
            .iter()
            .filter(|(sh, _, _)| cache[sh].value >= best - 1e-12)
            .map(|&(sh, s1, s2)| (bits(s1), bits(s2), sh))
            .collect();
        winners.sort();
        let ties = winners.len();
        let (x1_sub, x2_sub, sh) = winners[0].clone();
        let rate = cache[&sh];
        let point = InnerPoint {
            r1: rate.r1.max(0.0),
            r2: rate.r2.max(0.0),
            method: InnerMethod::LinearCodes,
            parameters: InnerParams::Linear(LinearParams {
                q1: sh.0,
                q2: sh.2,
                tau1: sh.1,
                tau2: sh.3,
                alpha: rate.alpha,
                beta: rate.beta,
                x1_sub,
                x2_sub,
            }),
        };
        let maximizers = winners.into_iter().take(TIE_LIST_LIMIT).map(|(a, b, _)| (a, b)).collect();
        out.push(SubAlphabetChoice { lambda, value: best, point, maximizers, ties });
    }
    Ok(out)
}

/// Convex hull of the points together with the origin and the axis
/// projections (time sharing and rate reduction), counter-clockwise.
pub fn hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for &(a, b) in points {
        pts.extend([(a.max(0.0), b.max(0.0)), (a.max(0.0), 0.0), (0.0, b.max(0.0))]);
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    pts.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-15 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-15 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn binary_one_detector_each() {
        let r = linear_code_l(0.5, 2, 2, 1, 1).unwrap();
        assert!((r.value - (3f64.log2() - 1.0)).abs() < 1e-12);
        assert!((r.alpha - 2.0 / 3.0).abs() < 1e-12 && (r.beta - 2.0 / 3.0).abs() < 1e-12);
        assert!((0.5 * r.r1 + 0.5 * r.r2 - r.value).abs() < 1e-12);
    }

    #[test]
    fn everything_detecting() {
        let r = linear_code_l(0.5, 4, 2, 4, 2).unwrap();
        assert_eq!((r.alpha, r.beta), (1.0, 1.0));
        assert!((r.r1 + r.r2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_random_coding() {
        let fam = ConfusionFamily::new(vec![Graph::empty(2); 3], vec![Graph::empty(3); 2]).unwrap();
        let p = random_coding_point(&fam, &ProductDistribution::uniform(3, 2)).unwrap();
        assert!((p.r1 - 0.5 * 3f64.log2()).abs() < 1e-12 && (p.r2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hull_of_corner_points() {
        let h = hull(&[(1.0, 0.0), (0.0, 1.0), (0.6, 0.6)]);
        assert!(h.contains(&(0.6, 0.6)) && h.len() == 4);
    }
}
