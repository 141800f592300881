//! Trust-region sequential linear programming for `max_x min_i f_i(x)` where `x`
//! ranges over a product of probability simplices and each `f_i` is smooth.

use super::lp::{solve_lp, LpProblem, Relation};

/// One smooth function at a point: its value and gradient. Infinite values are
/// treated as inactive.
#[derive(Debug, Clone)]
pub struct Piece {
    pub value: f64,
    pub grad: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct MinimaxOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub grad_cap: f64,
    pub init_radius: f64,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        MinimaxOptions { max_iter: 400, tol: 1e-10, grad_cap: 1e3, init_radius: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct MinimaxResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best linear-model improvement within unit radius over the near-active pieces.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

const KEEP: f64 = 1e-3;
fn min_value(pieces: &[Piece]) -> f64 {
    pieces.iter().map(|p| p.value).filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min)
}

/// Maximises the linear model `min_i f_i + g_i·(x' - x)` over the trust region.
/// A coordinate may shrink by at most the factor `keep` in one step, so iterates
/// started inside the simplex stay there.
fn model_step(blocks: &[usize], x: &[f64], pieces: &[Piece], radius: f64, cap: f64, only_active: Option<f64>, keep: f64) -> Option<(Vec<f64>, f64)> {
    let nv = x.len();
    let f = min_value(pieces);
    let lo: Vec<f64> = x.iter().map(|&v| (v - radius).max(v * keep)).collect();
    let hi: Vec<f64> = x.iter().map(|&v| (v + radius).min(1.0)).collect();
    let floor = f - 1.0;
    let mut c = vec![0.0; nv + 1];
    c[nv] = -1.0;
    let mut lp = LpProblem::new(c);
    for p in pieces {
        if !p.value.is_finite() {
            continue;
        }
        if let Some(band) = only_active {
            if p.value > f + band {
                continue;
            }
        }
        let g: Vec<f64> = p.grad.iter().map(|&v| if v.is_nan() { cap } else { v.clamp(-cap, cap) }).collect();
        let mut row: Vec<f64> = g.iter().map(|v| -v).collect();
        row.push(1.0);
        let shift: f64 = g.iter().zip(lo.iter().zip(x)).map(|(gi, (l, xi))| gi * (l - xi)).sum();
        lp.push(row, Relation::Le, p.value + shift - floor);
    }
    for j in 0..nv {
        let mut row = vec![0.0; nv + 1];
        row[j] = 1.0;
        lp.push(row, Relation::Le, hi[j] - lo[j]);
    }
    let mut off = 0;
    for &bsz in blocks {
        let mut row = vec![0.0; nv + 1];
        for v in row.iter_mut().skip(off).take(bsz) {
            *v = 1.0;
        }
        let s: f64 = lo[off..off + bsz].iter().sum();
        lp.push(row, Relation::Eq, 1.0 - s);
        off += bsz;
    }
    let sol = solve_lp(&lp).ok()?;
    let mut xn: Vec<f64> = (0..nv).map(|j| (lo[j] + sol.primal[j]).max(0.0)).collect();
    let mut off = 0;
    for &bsz in blocks {
        let s: f64 = xn[off..off + bsz].iter().sum();
        for v in &mut xn[off..off + bsz] {
            *v /= s;
        }
        off += bsz;
    }
    Some((xn, floor + sol.primal[nv]))
}

/// First-order stationarity measure of `min_i f_i` at `x`.
pub fn minimax_residual<F>(blocks: &[usize], eval: &F, x: &[f64], cap: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<Piece>,
{
    let pieces = eval(x);
    let f = min_value(&pieces);
    let band = 1e-7 * (1.0 + f.abs());
    match model_step(blocks, x, &pieces, 1.0, cap, Some(band), 0.0) {
        Some((_, z)) => (z - f).max(0.0),
        None => f64::INFINITY,
    }
}

/// Maximises `min_i f_i(x)` from `start` over the product of simplices with sizes `blocks`.
pub fn maximize_min<F>(blocks: &[usize], eval: F, start: &[f64], opts: MinimaxOptions) -> MinimaxResult
where
    F: Fn(&[f64]) -> Vec<Piece>,
{
    let mut x = start.to_vec();
    let mut pieces = eval(&x);
    let mut f = min_value(&pieces);
    let mut radius = opts.init_radius;
    let mut it = 0;
    while it < opts.max_iter && radius > 1e-13 {
        it += 1;
        let Some((xn, z)) = model_step(blocks, &x, &pieces, radius, opts.grad_cap, None, KEEP) else { break };
        let pred = z - f;
        if pred <= opts.tol * (1.0 + f.abs()) {
            // the piecewise-linear model is concave, so no local gain means no gain at any radius
            break;
        }
        let pn = eval(&xn);
        let fnew = min_value(&pn);
        let ratio = (fnew - f) / pred;
        if ratio > 0.1 && fnew > f {
            x = xn;
            pieces = pn;
            f = fnew;
            if ratio > 0.75 {
                radius = (radius * 2.0).min(1.0);
            }
        } else {
            radius *= 0.25;
        }
    }
    let residual = minimax_residual(blocks, &eval, &x, opts.grad_cap);
    MinimaxResult { converged: residual <= 1e-6 * (1.0 + f.abs()), x, value: f, residual, iterations: it }
}

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - R * (hi - lo);
    let mut b = lo + R * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + R * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - R * (hi - lo);
            fa = f(a);
        }
    }
    if fa >= fb { (a, fa) } else { (b, fb) }
}

/// Exact line searches along the exchange directions `e_i − e_j` inside each
/// block. Each search is unimodal when `min_i f_i` is concave in every block
/// separately, which holds for the objectives used here; the value never drops.
pub fn exchange_polish<F>(blocks: &[usize], eval: &F, x: &[f64], rounds: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Vec<Piece>,
{
    let value = |y: &[f64]| min_value(&eval(y));
    let mut x = x.to_vec();
    let mut f = value(&x);
    for _ in 0..rounds {
        let before = f;
        let mut off = 0;
        for &bsz in blocks {
            for i in off..off + bsz {
                for j in i + 1..off + bsz {
                    let (xi, xj) = (x[i], x[j]);
                    let at = |s: f64| {
                        let mut y = x.clone();
                        y[i] = (xi + s).max(0.0);
                        y[j] = (xj - s).max(0.0);
                        value(&y)
                    };
                    let (s, v) = golden_max(&at, -xi, xj, 1e-13);
                    if v > f {
                        x[i] = (xi + s).max(0.0);
                        x[j] = (xj - s).max(0.0);
                        f = v;
                    }
                }
            }
            off += bsz;
        }
        if f - before <= 1e-14 * (1.0 + f.abs()) {
            break;
        }
    }
    (x, f)
}

/// Tries moving the coordinates below `threshold` exactly onto their faces,
/// all together and one at a time, polishing after each; keeps the best.
pub fn snap_polish<F>(blocks: &[usize], eval: &F, x: &[f64], threshold: f64, rounds: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Vec<Piece>,
{
    let mut best = (x.to_vec(), min_value(&eval(x)));
    let small: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 0.0 && x[j] < threshold).collect();
    if small.is_empty() {
        return best;
    }
    let mut trials = vec![small.clone()];
    if small.len() > 1 {
        trials.extend(small.iter().map(|&j| vec![j]));
    }
    for zero in trials {
        let mut y = x.to_vec();
        for &j in &zero {
            y[j] = 0.0;
        }
        let mut off = 0;
        for &bsz in blocks {
            let s: f64 = y[off..off + bsz].iter().sum();
            if s <= 0.0 {
                y[off..off + bsz].copy_from_slice(&x[off..off + bsz]);
            } else {
                for v in &mut y[off..off + bsz] {
                    *v /= s;
                }
            }
            off += bsz;
        }
        let (y, f) = exchange_polish(blocks, eval, &y, rounds);
        if f > best.1 {
            best = (y, f);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_of_min_of_two_linear() {
        // max over p in simplex(2) of min(p0, p1) = 1/2
        let eval = |x: &[f64]| {
            vec![Piece { value: x[0], grad: vec![1.0, 0.0] }, Piece { value: x[1], grad: vec![0.0, 1.0] }]
        };
        let r = maximize_min(&[2], eval, &[0.9, 0.1], MinimaxOptions::default());
        assert!((r.value - 0.5).abs() < 1e-9, "{r:?}");
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn smooth_concave_single_piece() {
        // entropy of a 3-point distribution
        let eval = |x: &[f64]| {
            let v: f64 = x.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
            let g = x.iter().map(|&p| if p > 0.0 { -p.log2() - std::f64::consts::LOG2_E } else { f64::INFINITY }).collect();
            vec![Piece { value: v, grad: g }]
        };
        let r = maximize_min(&[3], eval, &[0.7, 0.2, 0.1], MinimaxOptions::default());
        assert!((r.value - 3f64.log2()).abs() < 1e-9, "{r:?}");
    }
}
