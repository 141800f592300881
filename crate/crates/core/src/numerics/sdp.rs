//! Primal-dual interior point method (HKM direction, predictor-corrector centring)
//! for `min <C,X>  s.t. <A_k,X> = b_k, X ⪰ 0` and its dual
//! `max b·y  s.t. C - Σ y_k A_k = Z ⪰ 0`.

use nalgebra::{DMatrix, DVector};

use super::linalg::{frob_inner, max_psd_step, min_eigenvalue, symmetrize};

/// Symmetric matrix given by upper-triangular entries `(i, j, v)` with `i <= j`;
/// an off-diagonal entry contributes `v` at both `(i,j)` and `(j,i)`.
#[derive(Debug, Clone, Default)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        SparseSym { entries: Vec::new() }
    }

    pub fn entry(i: usize, j: usize, v: f64) -> Self {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        SparseSym { entries: vec![(a, b, v)] }
    }

    pub fn diag_range(lo: usize, hi: usize) -> Self {
        SparseSym { entries: (lo..hi).map(|i| (i, i, 1.0)).collect() }
    }

    pub fn inner(&self, x: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * x[(i, j)] } else { 2.0 * v * x[(i, j)] })
            .sum()
    }

    fn add_to(&self, m: &mut DMatrix<f64>, s: f64) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += s * v;
            if i != j {
                m[(j, i)] += s * v;
            }
        }
    }

    fn full(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.entries.len());
        for &(i, j, v) in &self.entries {
            out.push((i, j, v));
            if i != j {
                out.push((j, i, v));
            }
        }
        out
    }

    fn norm(&self) -> f64 {
        self.entries.iter().map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub n: usize,
    pub c: DMatrix<f64>,
    pub a: Vec<SparseSym>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol: 1e-9, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub z: DMatrix<f64>,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SdpProblem {
    fn a_op(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.inner(x)))
    }

    fn at_op(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (a, &yk) in self.a.iter().zip(y) {
            a.add_to(&mut m, yk);
        }
        m
    }

    /// Dual objective after shifting `y` along `shift` (with `Σ shift_k A_k = I`)
    /// by the most negative eigenvalue of the slack, so that the slack is PSD.
    pub fn certified_dual(&self, y: &[f64], shift: &[f64]) -> f64 {
        let z = &self.c - self.at_op(y);
        let lmin = min_eigenvalue(&z).min(0.0);
        y.iter().zip(shift).zip(&self.b).map(|((yk, sk), bk)| (yk + lmin * sk) * bk).sum()
    }
}

fn schur(full: &[Vec<(usize, usize, f64)>], x: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let m = full.len();
    let mut s = DMatrix::zeros(m, m);
    for k in 0..m {
        for l in k..m {
            let mut acc = 0.0;
            for &(a, b, v) in &full[k] {
                for &(c, d, u) in &full[l] {
                    acc += v * u * x[(b, c)] * w[(d, a)];
                }
            }
            s[(k, l)] = acc;
            s[(l, k)] = acc;
        }
    }
    s
}

fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    m.clone().cholesky().map(|c| c.inverse())
}

/// Solves the SDP from an infeasible interior starting point.
pub fn solve_sdp(p: &SdpProblem, opts: SdpOptions) -> SdpSolution {
    let n = p.n;
    let m = p.a.len();
    let full: Vec<_> = p.a.iter().map(|a| a.full()).collect();
    let b = DVector::from_column_slice(&p.b);
    let bnorm = b.norm();
    let cnorm = p.c.norm();
    let anorm_max = p.a.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let nf = n as f64;
    let xi = p
        .a
        .iter()
        .zip(&p.b)
        .map(|(a, bk)| nf * (1.0 + bk.abs()) / (1.0 + a.norm()))
        .fold(10f64.max(nf.sqrt()), f64::max);
    let zeta = 10f64.max(nf.sqrt()).max(cnorm).max(anorm_max);
    // Gram matrix of the constraints, used to pull primal steps back onto A(X) = b
    let mut gram = DMatrix::zeros(m, m);
    for k in 0..m {
        for l in k..m {
            let mut acc = 0.0;
            for &(i, j, v) in &full[k] {
                for &(a, b2, u) in &full[l] {
                    if i == a && j == b2 {
                        acc += v * u;
                    }
                }
            }
            gram[(k, l)] = acc;
            gram[(l, k)] = acc;
        }
    }
    let gram_chol = {
        let reg = 1e-12 * (1.0 + gram.diagonal().amax());
        let mut g = gram.clone();
        for k in 0..m {
            g[(k, k)] += reg;
        }
        g.cholesky()
    };
    let mut x = DMatrix::identity(n, n) * xi;
    let mut z = DMatrix::identity(n, n) * zeta;
    let mut y = vec![0.0; m];

    let mut it = 0;
    let mut converged = false;
    let (mut pinf, mut dinf, mut gap);
    let mut stall = 0;
    let mut best: Option<(f64, DMatrix<f64>, Vec<f64>, DMatrix<f64>, f64, f64, f64)> = None;
    loop {
        let rp = &b - p.a_op(&x);
        let rd = &p.c - &z - p.at_op(&y);
        let pobj = frob_inner(&p.c, &x);
        let dobj = b.dot(&DVector::from_column_slice(&y));
        pinf = rp.norm() / (1.0 + bnorm);
        dinf = rd.norm() / (1.0 + cnorm);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let merit = pinf.max(dinf).max(gap);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, x.clone(), y.clone(), z.clone(), pinf, dinf, gap));
            stall = 0;
        } else {
            stall += 1;
        }
        if merit < opts.tol {
            converged = true;
            break;
        }
        if it >= opts.max_iter || stall > 50 {
            break;
        }
        it += 1;
        let mu = frob_inner(&x, &z) / nf;
        let Some(w) = spd_inverse(&z) else { break };
        let w = symmetrize(&w);
        let mut sm = schur(&full, &x, &w);
        let chol = match sm.clone().cholesky() {
            Some(c) => c,
            None => {
                let reg = 1e-14 * (1.0 + sm.diagonal().amax());
                for k in 0..m {
                    sm[(k, k)] += reg;
                }
                match sm.cholesky() {
                    Some(c) => c,
                    None => break,
                }
            }
        };
        let xrdw = &x * &rd * &w;
        let direction = |rc: &DMatrix<f64>| {
            let g = rc * &w - &xrdw;
            let rhs = &rp - p.a_op(&g);
            let dy = chol.solve(&rhs);
            let dyv: Vec<f64> = dy.iter().cloned().collect();
            let dz = &rd - p.at_op(&dyv);
            let mut dx = symmetrize(&((rc - &x * &dz) * &w));
            if let Some(gc) = &gram_chol {
                let miss = &rp - p.a_op(&dx);
                let corr = gc.solve(&miss);
                let cv: Vec<f64> = corr.iter().cloned().collect();
                dx += p.at_op(&cv);
            }
            (dx, dyv, dz)
        };
        let xz = &x * &z;
        let (dxa, _, dza) = direction(&(-&xz));
        let ap = max_psd_step(&x, &dxa).min(1.0);
        let ad = max_psd_step(&z, &dza).min(1.0);
        let mu_aff = frob_inner(&(&x + &dxa * ap), &(&z + &dza * ad)) / nf;
        let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).powi(3).min(1.0) } else { 0.0 };
        let rc = DMatrix::identity(n, n) * (sigma * mu) - &xz;
        let (dx, dy, dz) = direction(&rc);
        let ap = (0.98 * max_psd_step(&x, &dx)).min(1.0);
        let ad = (0.98 * max_psd_step(&z, &dz)).min(1.0);
        if ap < 1e-14 && ad < 1e-14 {
            break;
        }
        x += &dx * ap;
        x = symmetrize(&x);
        for (yk, dk) in y.iter_mut().zip(&dy) {
            *yk += ad * dk;
        }
        z += &dz * ad;
        z = symmetrize(&z);
    }
    if let Some((merit, bx, by, bz, bp, bd, bg)) = best {
        if merit < pinf.max(dinf).max(gap) {
            (x, y, z, pinf, dinf, gap) = (bx, by, bz, bp, bd, bg);
        }
        converged = converged || merit < opts.tol;
    }
    let pobj = frob_inner(&p.c, &x);
    let dobj: f64 = y.iter().zip(&p.b).map(|(a, b)| a * b).sum();
    SdpSolution {
        primal_value: pobj,
        dual_value: dobj,
        x,
        y,
        z,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        gap,
        iterations: it,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_objective() {
        let p = SdpProblem { n: 2, c: DMatrix::zeros(2, 2), a: vec![SparseSym::diag_range(0, 2)], b: vec![1.0] };
        let s = solve_sdp(&p, SdpOptions::default());
        assert!(s.converged);
        assert!(s.primal_value.abs() < 1e-8);
    }

    #[test]
    fn theta_of_three_isolated_vertices() {
        let p = SdpProblem {
            n: 3,
            c: -DMatrix::from_element(3, 3, 1.0),
            a: vec![SparseSym::diag_range(0, 3)],
            b: vec![1.0],
        };
        let s = solve_sdp(&p, SdpOptions::default());
        assert!(s.converged);
        assert!((s.primal_value + 3.0).abs() < 1e-8);
    }
}
