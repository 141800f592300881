use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Precondition("empty probability vector".into()));
        }
        if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::Precondition("probability entries must be finite and nonnegative".into()));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("probabilities sum to {s}")));
        }
        Ok(SimplexPoint(p))
    }

    pub fn uniform(d: usize) -> Self {
        SimplexPoint(vec![1.0 / d as f64; d])
    }

    pub fn vertex(d: usize, i: usize) -> Self {
        let mut p = vec![0.0; d];
        p[i] = 1.0;
        SimplexPoint(p)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> SimplexPoint {
    let d = v.len();
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let mut p: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // remove rounding drift so the result is a distribution to machine precision
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        for x in &mut p {
            *x /= s;
        }
    } else {
        p = vec![1.0 / d as f64; d];
    }
    SimplexPoint(p)
}

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Gradient entries above this (including +inf) are clipped.
    pub grad_cap: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { tol: 1e-9, max_iter: 20_000, grad_cap: 1e6 }
    }
}

#[derive(Debug, Clone)]
pub struct Ascent {
    pub point: SimplexPoint,
    pub value: f64,
    /// Frank-Wolfe gap `max_j g_j - <p, g>` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn fw_gap(p: &[f64], g: &[f64]) -> f64 {
    let best = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let avg: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
    (best - avg).max(0.0)
}

/// Projected-gradient ascent with Armijo backtracking for a concave `f` on the simplex.
pub fn maximize_concave_on_simplex<F, G>(f: F, grad: G, start: &SimplexPoint, opts: AscentOptions) -> Ascent
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let clip = |mut g: Vec<f64>| {
        for x in &mut g {
            if x.is_nan() || *x > opts.grad_cap {
                *x = opts.grad_cap;
            } else if *x < -opts.grad_cap {
                *x = -opts.grad_cap;
            }
        }
        g
    };
    let mut p = start.as_slice().to_vec();
    let mut fp = f(&p);
    let mut g = clip(grad(&p));
    let mut step = 1.0;
    let mut residual = fw_gap(&p, &g);
    let mut it = 0;
    while it < opts.max_iter && residual > opts.tol {
        it += 1;
        let mut moved = false;
        let centre: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        while step > 1e-18 {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let y = project_simplex(&trial).into_vec();
            // centred gradient: the constant part cancels on the simplex and only adds rounding
            let dir: f64 = y.iter().zip(&p).zip(&g).map(|((a, b), c)| (a - b) * (c - centre)).sum();
            let fy = f(&y);
            if fy.is_finite() && fy >= fp + 1e-4 * dir && dir >= 0.0 {
                moved = fy > fp || y != p;
                p = y;
                fp = fy;
                step *= 2.0;
                break;
            }
            // value changes below rounding: fall back to the stationarity measure
            if fy.is_finite() && dir >= 0.0 && (fy - fp).abs() <= 8.0 * f64::EPSILON * fp.abs().max(1.0) {
                let gy = clip(grad(&y));
                if fw_gap(&y, &gy) < residual {
                    p = y;
                    fp = fy;
                    g = gy;
                    residual = fw_gap(&p, &g);
                    moved = true;
                    step *= 2.0;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
        g = clip(grad(&p));
        residual = fw_gap(&p, &g);
    }
    Ascent { converged: residual <= opts.tol, point: SimplexPoint(p), value: fp, residual, iterations: it }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        assert_eq!(project_simplex(&[0.25, 0.75]).as_slice(), &[0.25, 0.75]);
        assert_eq!(project_simplex(&[2.0, 0.0]).as_slice(), &[1.0, 0.0]);
        let p = project_simplex(&[0.6, 0.6]);
        assert!((p.as_slice()[0] - 0.5).abs() < 1e-15 && (p.as_slice()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn linear_goes_to_vertex() {
        let c = [0.3, 1.2, -0.5];
        let r = maximize_concave_on_simplex(
            |p| p.iter().zip(&c).map(|(a, b)| a * b).sum(),
            |_| c.to_vec(),
            &SimplexPoint::uniform(3),
            AscentOptions::default(),
        );
        assert!((r.value - 1.2).abs() < 1e-12);
        assert!(r.converged);
    }
}
