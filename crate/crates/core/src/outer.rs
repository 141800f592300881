//! λ-weighted outer bounds: the Shannon-type bound `max ε(λ)`, the clique-pair
//! bound `max −log l(λ)`, their min-max combination `t(λ)` and the max-min
//! bound `θ(λ)`, optionally minimised over channels with the same support.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, CondTable, ConfusionFamily, SUPPORT_EPS};
use crate::info::Marginals;
use crate::numerics::minimax::minimax_residual;
use crate::numerics::{exchange_polish, maximize_min, snap_polish, MinimaxOptions, Piece};
use crate::oneshot::enumerate_dual_clique_pairs;
use crate::{Error, Result};

const POLISH_ROUNDS: usize = 30;
const SNAP: f64 = 1e-3;
/// Blocks up to this size also get starts on every face.
const FACE_LIMIT: usize = 6;

/// Largest alphabet whose supports are enumerated at `λ ∈ {0, 1}`.
pub const SUPPORT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDistribution {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

impl ProductDistribution {
    pub fn new(p1: Vec<f64>, p2: Vec<f64>) -> Result<ProductDistribution> {
        for p in [&p1, &p2] {
            if p.is_empty() || p.iter().any(|&v| !v.is_finite() || v < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::Precondition("not a probability vector".into()));
            }
        }
        Ok(ProductDistribution { p1, p2 })
    }

    pub fn uniform(m1: usize, m2: usize) -> ProductDistribution {
        ProductDistribution { p1: vec![1.0 / m1 as f64; m1], p2: vec![1.0 / m2 as f64; m2] }
    }

    fn split(x: &[f64], m1: usize) -> ProductDistribution {
        let clean = |v: &[f64]| {
            let s: f64 = v.iter().map(|&t| t.max(0.0)).sum();
            v.iter().map(|&t| t.max(0.0) / s).collect()
        };
        ProductDistribution { p1: clean(&x[..m1]), p2: clean(&x[m1..]) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ShannonEps,
    LpL,
    MinmaxT,
    MaxminTheta,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::ShannonEps, Method::LpL, Method::MinmaxT, Method::MaxminTheta];

    pub fn name(self) -> &'static str {
        match self {
            Method::ShannonEps => "shannon-eps",
            Method::LpL => "lp-l",
            Method::MinmaxT => "minmax-t",
            Method::MaxminTheta => "maxmin-theta",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OuterOptions {
    /// Low-discrepancy starts in addition to the uniform point.
    pub starts: usize,
    /// Screened starts that get a full run.
    pub polish: usize,
    pub screen_iter: usize,
    pub max_iter: usize,
    /// Starts used for the inner maximisation while searching over channels.
    pub q_starts: usize,
    pub q_passes: usize,
    pub q_tol: f64,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions { starts: 64, polish: 4, screen_iter: 25, max_iter: 400, q_starts: 16, q_passes: 4, q_tol: 1e-7 }
    }
}

/// Best point found by the multistart maximisation.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub value: f64,
    pub argmax: ProductDistribution,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct LambdaBound {
    pub lambda: f64,
    pub value: f64,
    pub method: Method,
    pub argmax: ProductDistribution,
    pub q_used: Channel,
    pub residual: f64,
    pub converged: bool,
}

/// `ε(λ)` at a product distribution.
pub fn epsilon_lambda(q: &Channel, d: &ProductDistribution, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_dist(d, q.x1_size(), q.x2_size())?;
    Ok(Marginals::of(q).epsilon(&d.p1, &d.p2, lambda))
}

/// `l(λ) = max (Σ_S p1)^λ (Σ_T p2)^{1−λ}` over maximal dual clique pairs.
/// A pair with zero mass on either side contributes 0, also at `λ ∈ {0, 1}`,
/// which makes the endpoint values the limits of the interior ones.
pub fn l_lambda(fam: &ConfusionFamily, d: &ProductDistribution, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_dist(d, fam.x1_size(), fam.x2_size())?;
    let pairs = clique_pairs(fam)?;
    let pw = |x: f64, e: f64| if x <= 0.0 { 0.0 } else { x.powf(e) };
    Ok(pairs
        .iter()
        .map(|(s, t)| {
            let a: f64 = s.iter().map(|&i| d.p1[i]).sum();
            let b: f64 = t.iter().map(|&j| d.p2[j]).sum();
            pw(a, lambda) * pw(b, 1.0 - lambda)
        })
        .fold(0.0, f64::max))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Precondition(format!("λ = {lambda} is outside [0, 1]")));
    }
    Ok(())
}

fn check_dist(d: &ProductDistribution, m1: usize, m2: usize) -> Result<()> {
    if d.p1.len() != m1 || d.p2.len() != m2 {
        return Err(Error::SizeMismatch("distribution does not match the alphabets".into()));
    }
    Ok(())
}

type Pairs = Vec<(Vec<usize>, Vec<usize>)>;

fn clique_pairs(fam: &ConfusionFamily) -> Result<Pairs> {
    Ok(enumerate_dual_clique_pairs(fam)?.into_iter().map(|p| (p.s, p.t)).collect())
}

/// The pieces `−λ log P1(S) − (1−λ) log P2(T)` of `−log l(λ)`.
fn neglog_pieces(pairs: &Pairs, x: &[f64], m1: usize, lambda: f64, out: &mut Vec<Piece>) {
    for (s, t) in pairs {
        let a: f64 = s.iter().map(|&i| x[i]).sum();
        let b: f64 = t.iter().map(|&j| x[m1 + j]).sum();
        let mut grad = vec![0.0; x.len()];
        let mut value = 0.0;
        if lambda > 0.0 {
            value -= lambda * a.log2();
            for &i in s {
                grad[i] = -lambda / (a * LN_2);
            }
        }
        if lambda < 1.0 {
            value -= (1.0 - lambda) * b.log2();
            for &j in t {
                grad[m1 + j] = -(1.0 - lambda) / (b * LN_2);
            }
        }
        out.push(Piece { value, grad });
    }
}

fn eps_piece(marg: &Marginals, x: &[f64], m1: usize, lambda: f64, cap: f64) -> Piece {
    let (v, g1, g2) = marg.epsilon_grad(&x[..m1], &x[m1..], lambda);
    let grad = g1.into_iter().chain(g2).map(|g| if g.is_nan() || g > cap { cap } else { g.max(-cap) }).collect();
    Piece { value: v, grad }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective {
    Eps,
    NegLogL,
    Theta,
}

struct Problem<'a> {
    marg: &'a Marginals,
    pairs: &'a Pairs,
    m1: usize,
    m2: usize,
    lambda: f64,
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 32] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131];

/// Uniform point followed by Halton points pushed onto each simplex block.
fn start_points(blocks: &[usize], count: usize) -> Vec<Vec<f64>> {
    let mut out = vec![blocks.iter().flat_map(|&b| vec![1.0 / b as f64; b]).collect::<Vec<f64>>()];
    for idx in 1..=count {
        let mut x = Vec::new();
        let mut dim = 0;
        for &b in blocks {
            let e: Vec<f64> = (0..b)
                .map(|_| {
                    let u = radical_inverse(idx, PRIMES[dim % PRIMES.len()]).max(1e-12);
                    dim += 1;
                    -u.ln()
                })
                .collect();
            let s: f64 = e.iter().sum();
            x.extend(e.iter().map(|v| v / s));
        }
        out.push(x);
    }
    // Faces: uniform on each proper support of one block, the others uniform.
    // Optima with tiny masses are reached from here rather than from inside.
    let mut off = 0;
    for (k, &b) in blocks.iter().enumerate() {
        if b <= FACE_LIMIT {
            for mask in 1u32..(1 << b) - 1 {
                let mut x = out[0].clone();
                let w = 1.0 / mask.count_ones() as f64;
                for i in 0..b {
                    x[off + i] = if mask & (1 << i) != 0 { w } else { 0.0 };
                }
                out.push(x);
            }
        }
        off += blocks[k];
    }
    out
}

impl Problem<'_> {
    fn eval(&self, obj: Objective, x: &[f64], cap: f64) -> Vec<Piece> {
        let mut out = Vec::new();
        if obj != Objective::NegLogL {
            out.push(eps_piece(self.marg, x, self.m1, self.lambda, cap));
        }
        if obj != Objective::Eps {
            neglog_pieces(self.pairs, x, self.m1, self.lambda, &mut out);
        }
        out
    }

    fn maximize(&self, obj: Objective, starts: usize, opts: &OuterOptions) -> Optimum {
        let cap = MinimaxOptions::default().grad_cap;
        multistart(&[self.m1, self.m2], |x: &[f64]| self.eval(obj, x, cap), starts, opts)
    }
}

/// Screens `starts` low-discrepancy points with short runs of the max-min
/// ascent, then runs the best few to convergence.
pub(crate) fn multistart<F>(blocks: &[usize], eval: F, starts: usize, opts: &OuterOptions) -> Optimum
where
    F: Fn(&[f64]) -> Vec<Piece>,
{
    let mo = MinimaxOptions::default();
    let mut screened: Vec<(f64, Vec<f64>)> = start_points(blocks, starts)
        .into_iter()
        .map(|s| {
            let r = maximize_min(blocks, &eval, &s, MinimaxOptions { max_iter: opts.screen_iter, ..mo });
            (r.value, r.x)
        })
        .collect();
    screened.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, x0) in screened.into_iter().take(opts.polish.max(1)) {
        let r = maximize_min(blocks, &eval, &x0, MinimaxOptions { max_iter: opts.max_iter, ..mo });
        if best.as_ref().is_none_or(|b| r.value > b.0) {
            best = Some((r.value, r.x));
        }
    }
    let (_, x) = best.expect("at least one start");
    let (x, _) = exchange_polish(blocks, &eval, &x, POLISH_ROUNDS);
    let r = maximize_min(blocks, &eval, &x, MinimaxOptions { max_iter: opts.max_iter, ..mo });
    let (x, _) = exchange_polish(blocks, &eval, &r.x, POLISH_ROUNDS);
    let (x, value) = snap_polish(blocks, &eval, &x, SNAP, POLISH_ROUNDS);
    let residual = minimax_residual(blocks, &eval, &x, mo.grad_cap);
    Optimum { value, argmax: ProductDistribution::split(&x, blocks[0]), residual, converged: residual <= 1e-6 * (1.0 + value.abs()) }
}

fn family_matches(q: &Channel, fam: &ConfusionFamily) -> Result<()> {
    if q.derive_confusion() != *fam {
        return Err(Error::Precondition("family does not match the channel's adjacency".into()));
    }
    Ok(())
}

/// At `λ = 0` the masses of `p1` only enter `l` through which pairs they
/// touch, so the optimum is taken over every support of `p1` separately, by
/// restriction; symmetrically for `p2` at `λ = 1`. Elsewhere runs `f` once.
fn over_supports<F>(q: &Channel, fam: &ConfusionFamily, lambda: f64, f: F) -> Result<Optimum>
where
    F: Fn(&Channel, &ConfusionFamily) -> Result<Optimum>,
{
    let (m1, m2) = (q.x1_size(), q.x2_size());
    let first = lambda == 0.0;
    if !(first || lambda == 1.0) {
        return f(q, fam);
    }
    let m = if first { m1 } else { m2 };
    if m > SUPPORT_LIMIT {
        return Err(Error::SizeLimit(format!("endpoint λ needs alphabets ≤ {SUPPORT_LIMIT}")));
    }
    let all1: Vec<usize> = (0..m1).collect();
    let all2: Vec<usize> = (0..m2).collect();
    let mut best: Option<Optimum> = None;
    for mask in 1u32..(1 << m) {
        let sub: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let (s1, s2) = if first { (&sub, &all2) } else { (&all1, &sub) };
        let o = f(&q.restrict(s1, s2)?, &fam.restrict(s1, s2)?)?;
        if best.as_ref().is_none_or(|b| o.value > b.value) {
            let lift = |p: &[f64], idx: &[usize], n: usize| {
                let mut v = vec![0.0; n];
                for (k, &i) in idx.iter().enumerate() {
                    v[i] = p[k];
                }
                v
            };
            let argmax = ProductDistribution { p1: lift(&o.argmax.p1, s1, m1), p2: lift(&o.argmax.p2, s2, m2) };
            best = Some(Optimum { argmax, ..o });
        }
    }
    Ok(best.expect("nonempty alphabet"))
}

/// `max ε(λ)` over product distributions.
pub fn max_epsilon(q: &Channel, lambda: f64, opts: &OuterOptions) -> Result<Optimum> {
    check_lambda(lambda)?;
    let marg = Marginals::of(q);
    let pairs = Vec::new();
    let pb = Problem { marg: &marg, pairs: &pairs, m1: q.x1_size(), m2: q.x2_size(), lambda };
    Ok(pb.maximize(Objective::Eps, opts.starts, opts))
}

/// `max −log l(λ)` over product distributions; depends on the family only.
pub fn max_neglog_l(fam: &ConfusionFamily, lambda: f64, opts: &OuterOptions) -> Result<Optimum> {
    check_lambda(lambda)?;
    over_supports(&crate::channel::canonical_channel(fam), fam, lambda, |q, fam| {
        let pairs = clique_pairs(fam)?;
        let marg = Marginals::of(q);
        let pb = Problem { marg: &marg, pairs: &pairs, m1: fam.x1_size(), m2: fam.x2_size(), lambda };
        Ok(pb.maximize(Objective::NegLogL, opts.starts, opts))
    })
}

fn lambda_bound(q: &Channel, lambda: f64, method: Method, o: Optimum) -> LambdaBound {
    LambdaBound { lambda, value: o.value.max(0.0), method, argmax: o.argmax, q_used: q.clone(), residual: o.residual, converged: o.converged }
}

/// `t(λ) = min{max ε(λ), max −log l(λ)}`.
pub fn minmax_bound(q: &Channel, fam: &ConfusionFamily, lambda: f64, opts: &OuterOptions) -> Result<LambdaBound> {
    family_matches(q, fam)?;
    let e = max_epsilon(q, lambda, opts)?;
    let l = max_neglog_l(fam, lambda, opts)?;
    Ok(lambda_bound(q, lambda, Method::MinmaxT, if e.value <= l.value { e } else { l }))
}

/// `θ(λ) = max min{ε(λ), −log l(λ)}`.
pub fn maxmin_bound(q: &Channel, fam: &ConfusionFamily, lambda: f64, opts: &OuterOptions) -> Result<LambdaBound> {
    family_matches(q, fam)?;
    check_lambda(lambda)?;
    let o = over_supports(q, fam, lambda, |q, fam| {
        let marg = Marginals::of(q);
        let pairs = clique_pairs(fam)?;
        let pb = Problem { marg: &marg, pairs: &pairs, m1: q.x1_size(), m2: q.x2_size(), lambda };
        Ok(pb.maximize(Objective::Theta, opts.starts, opts))
    })?;
    Ok(lambda_bound(q, lambda, Method::MaxminTheta, o))
}

/// Any of the four bounds at the given channel, without searching over channels.
pub fn bound_at(q: &Channel, fam: &ConfusionFamily, method: Method, lambda: f64, opts: &OuterOptions) -> Result<LambdaBound> {
    match method {
        Method::ShannonEps => Ok(lambda_bound(q, lambda, method, max_epsilon(q, lambda, opts)?)),
        Method::LpL => {
            family_matches(q, fam)?;
            Ok(lambda_bound(q, lambda, method, max_neglog_l(fam, lambda, opts)?))
        }
        Method::MinmaxT => minmax_bound(q, fam, lambda, opts),
        Method::MaxminTheta => maxmin_bound(q, fam, lambda, opts),
    }
}

/// A conditional-table row whose support has at least two outputs.
#[derive(Debug, Clone)]
struct FreeRow {
    second: bool,
    a: usize,
    b: usize,
    support: Vec<usize>,
}

fn free_rows(m: &Marginals) -> Vec<FreeRow> {
    let mut out = Vec::new();
    for (second, t) in [(false, &m.w1), (true, &m.w2)] {
        for a in 0..t.x1 {
            for b in 0..t.x2 {
                let support: Vec<usize> = (0..t.y).filter(|&y| t.get(a, b, y) > SUPPORT_EPS).collect();
                if support.len() >= 2 {
                    out.push(FreeRow { second, a, b, support });
                }
            }
        }
    }
    out
}

fn set_row(m: &mut Marginals, r: &FreeRow, w: &[f64]) {
    let t: &mut CondTable = if r.second { &mut m.w2 } else { &mut m.w1 };
    let row = t.row_mut(r.a, r.b);
    for v in row.iter_mut() {
        *v = 0.0;
    }
    for (&y, &p) in r.support.iter().zip(w) {
        row[y] = p;
    }
}

fn get_row(m: &Marginals, r: &FreeRow) -> Vec<f64> {
    let t = if r.second { &m.w2 } else { &m.w1 };
    r.support.iter().map(|&y| t.get(r.a, r.b, y)).collect()
}

const EDGE: f64 = 1e-6;

/// Golden-section search for the minimum of `f` on `[lo, hi]` after a coarse scan.
fn scan_then_golden(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let grid = 8;
    let pts: Vec<f64> = (0..=grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
    let k = (0..=grid).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let (mut a, mut b) = (pts[k.saturating_sub(1)], pts[(k + 1).min(grid)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (t, v) = if fc <= fd { (c, fc) } else { (d, fd) };
    if vals[k] < v {
        (pts[k], vals[k])
    } else {
        (t, v)
    }
}

/// Minimises a bound over channels sharing the support of `q`, by coordinate
/// search over the free rows of its two conditional marginals. The returned
/// bound is re-evaluated at the minimising channel with the full start set.
pub fn minimize_over_q(q: &Channel, fam: &ConfusionFamily, method: Method, lambda: f64, opts: &OuterOptions) -> Result<LambdaBound> {
    family_matches(q, fam)?;
    check_lambda(lambda)?;
    let mut marg = Marginals::of(q);
    let rows = free_rows(&marg);
    let pairs = clique_pairs(fam)?;
    if rows.is_empty() || method == Method::LpL {
        return bound_at(q, fam, method, lambda, opts);
    }
    let (m1, m2) = (q.x1_size(), q.x2_size());
    let obj = match method {
        Method::ShannonEps | Method::MinmaxT => Objective::Eps,
        _ => Objective::Theta,
    };
    let value_at = |m: &Marginals| Problem { marg: m, pairs: &pairs, m1, m2, lambda }.maximize(obj, opts.q_starts, opts).value;
    let mut current = value_at(&marg);
    for _ in 0..opts.q_passes {
        let before = current;
        for r in &rows {
            let base = get_row(&marg, r);
            for j in 0..r.support.len() {
                if r.support.len() == 2 && j == 1 {
                    break;
                }
                // move mass onto entry j, keeping the others in proportion
                let rest: f64 = 1.0 - base[j];
                let shape: Vec<f64> = base.iter().enumerate().map(|(i, &v)| if i == j { 0.0 } else { v / rest.max(1e-300) }).collect();
                let row_at = |t: f64| -> Vec<f64> { shape.iter().enumerate().map(|(i, &s)| if i == j { t } else { (1.0 - t) * s }).collect() };
                let mut trial = marg.clone();
                let mut f = |t: f64| {
                    set_row(&mut trial, r, &row_at(t));
                    value_at(&trial)
                };
                let (t, v) = scan_then_golden(&mut f, EDGE, 1.0 - EDGE, 1e-4);
                if v < current {
                    current = v;
                    set_row(&mut marg, r, &row_at(t));
                }
            }
        }
        if before - current < opts.q_tol {
            break;
        }
    }
    let best_q = Channel::from_marginals(&marg.w1, &marg.w2)?;
    let at_start = bound_at(q, fam, method, lambda, opts)?;
    let at_best = bound_at(&best_q, &best_q.derive_confusion(), method, lambda, opts)?;
    Ok(if at_best.value <= at_start.value { at_best } else { at_start })
}

/// Shannon's LP-type bound for a one-way channel wrapped with `|X2| = 1`:
/// `min_Q max_P min{I(X;Y), −log max_C P(C)}`.
pub fn oneway_lp_bound(q: &Channel, opts: &OuterOptions) -> Result<f64> {
    if q.x2_size() != 1 {
        return Err(Error::Precondition("one-way channels have a single X2 symbol".into()));
    }
    let fam = q.derive_confusion();
    Ok(minimize_over_q(q, &fam, Method::MaxminTheta, 1.0, opts)?.value)
}

/// `λ R1 + (1−λ) R2 ≤ value`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HalfPlane {
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OuterRegion {
    pub halfplanes: Vec<HalfPlane>,
    /// Polygon vertices `(R1, R2)` in counter-clockwise order.
    pub vertices: Vec<(f64, f64)>,
}

impl OuterRegion {
    pub fn contains(&self, r1: f64, r2: f64, tol: f64) -> bool {
        r1 >= -tol && r2 >= -tol && self.halfplanes.iter().all(|h| h.lambda * r1 + (1.0 - h.lambda) * r2 <= h.value + tol)
    }

    /// Largest `R1 + R2` over the polygon.
    pub fn max_sum_rate(&self) -> f64 {
        self.vertices.iter().map(|&(a, b)| a + b).fold(0.0, f64::max)
    }
}

/// Intersects the half-planes with the box `[0, log|X1|] × [0, log|X2|]`.
pub fn assemble_outer_region(halfplanes: &[HalfPlane], x1_size: usize, x2_size: usize) -> OuterRegion {
    let (w, h) = ((x1_size as f64).log2(), (x2_size as f64).log2());
    let mut poly = vec![(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)];
    for hp in halfplanes {
        let side = |p: (f64, f64)| hp.value - hp.lambda * p.0 - (1.0 - hp.lambda) * p.1;
        let mut next = Vec::new();
        for i in 0..poly.len() {
            let (p, r) = (poly[i], poly[(i + 1) % poly.len()]);
            let (sp, sr) = (side(p), side(r));
            if sp >= 0.0 {
                next.push(p);
            }
            if (sp >= 0.0) != (sr >= 0.0) {
                let t = sp / (sp - sr);
                next.push((p.0 + t * (r.0 - p.0), p.1 + t * (r.1 - p.1)));
            }
        }
        poly = next;
        if poly.is_empty() {
            break;
        }
    }
    // drop repeated corners
    let mut vertices: Vec<(f64, f64)> = Vec::new();
    for p in poly {
        if vertices.last().is_none_or(|q: &(f64, f64)| (q.0 - p.0).abs() + (q.1 - p.1).abs() > 1e-12) {
            vertices.push(p);
        }
    }
    if vertices.len() > 1 {
        let (f, l) = (vertices[0], vertices[vertices.len() - 1]);
        if (f.0 - l.0).abs() + (f.1 - l.1).abs() <= 1e-12 {
            vertices.pop();
        }
    }
    OuterRegion { halfplanes: halfplanes.to_vec(), vertices }
}

/// One bound per `(λ, method)`, and the region they cut out.
pub fn outer_region(
    q: &Channel,
    fam: &ConfusionFamily,
    lambdas: &[f64],
    methods: &[Method],
    minimize_q: bool,
    opts: &OuterOptions,
) -> Result<(Vec<LambdaBound>, OuterRegion)> {
    let mut bounds = Vec::new();
    for &lambda in lambdas {
        for &m in methods {
            bounds.push(if minimize_q { minimize_over_q(q, fam, m, lambda, opts)? } else { bound_at(q, fam, m, lambda, opts)? });
        }
    }
    let hp: Vec<HalfPlane> = bounds.iter().map(|b| HalfPlane { lambda: b.lambda, value: b.value }).collect();
    let region = assemble_outer_region(&hp, q.x1_size(), q.x2_size());
    Ok((bounds, region))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn noiseless(m: usize) -> Channel {
        let mut p = vec![0.0; m * m * m * m];
        for a in 0..m {
            for b in 0..m {
                p[((a * m + b) * m + b) * m + a] = 1.0;
            }
        }
        Channel::new(m, m, m, m, p).unwrap()
    }

    #[test]
    fn noiseless_binary_sum_rate() {
        let q = noiseless(2);
        let fam = q.derive_confusion();
        let d = ProductDistribution::uniform(2, 2);
        assert!((epsilon_lambda(&q, &d, 0.5).unwrap() - 1.0).abs() < 1e-12);
        let t = minmax_bound(&q, &fam, 0.5, &OuterOptions::default()).unwrap();
        assert!((t.value - 1.0).abs() < 1e-6, "{}", t.value);
    }

    #[test]
    fn bmc_l_value() {
        let k = Graph::complete(2);
        let e = Graph::empty(2);
        let fam = ConfusionFamily::new(vec![k.clone(), e.clone()], vec![k, e]).unwrap();
        let l = l_lambda(&fam, &ProductDistribution::uniform(2, 2), 0.5).unwrap();
        assert!((l - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn box_from_extreme_lambdas() {
        let r = assemble_outer_region(&[HalfPlane { lambda: 0.0, value: 1.0 }, HalfPlane { lambda: 1.0, value: 1.0 }], 2, 2);
        assert_eq!(r.vertices.len(), 4);
        assert!((r.max_sum_rate() - 2.0).abs() < 1e-12);
    }
}
