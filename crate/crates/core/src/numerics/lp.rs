//! Dense two-phase tableau simplex, generic over floating point and exact rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Scalar field used by the simplex method.
pub trait Scalar: Clone + Debug + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Strictly positive beyond the pivoting tolerance.
    fn pos(&self) -> bool;
    /// Strictly negative beyond the pivoting tolerance.
    fn neg_sig(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pos(&self) -> bool {
        *self > 1e-11
    }
    fn neg_sig(&self) -> bool {
        *self < -1e-11
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn pos(&self) -> bool {
        self.is_positive()
    }
    fn neg_sig(&self) -> bool {
        self.is_negative()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `minimize c·x` subject to `row·x (rel) rhs` and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LpProblem<T> {
    pub c: Vec<T>,
    pub rows: Vec<(Vec<T>, Relation, T)>,
}

/// Optimal primal/dual pair. Duals follow the convention `c - Aᵀy ≥ 0`,
/// with `y ≤ 0` on `Le` rows and `y ≥ 0` on `Ge` rows.
#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub value: T,
    pub primal: Vec<T>,
    pub dual: Vec<T>,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(c: Vec<T>) -> Self {
        LpProblem { c, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<T>, rel: Relation, rhs: T) {
        self.rows.push((row, rel, rhs));
    }
}

struct Tableau<T> {
    t: Vec<Vec<T>>, // m rows, each of width ncol + 1 (last = rhs)
    basis: Vec<usize>,
    ncol: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = v.div(&pv);
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            if f.pos() || f.neg_sig() {
                for (v, pvv) in row.iter_mut().zip(prow.iter()) {
                    *v = v.sub(&f.mul(pvv));
                }
            } else {
                row[c] = T::zero();
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut rc: Vec<T> = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.pos() || cb.neg_sig() {
                for (j, v) in rc.iter_mut().enumerate() {
                    *v = v.sub(&cb.mul(&self.t[r][j]));
                }
            }
        }
        rc
    }

    /// Runs the simplex method on `cost` restricted to `allowed` entering columns.
    fn optimize(&mut self, cost: &[T], allowed: &[bool]) -> Result<()> {
        let m = self.t.len();
        let mut iter = 0usize;
        let bland_after = 50 * (m + self.ncol) + 100;
        let cap = 5000 * (m + self.ncol) + 10_000;
        loop {
            iter += 1;
            if iter > cap {
                return Err(Error::NoConvergence("simplex iteration cap".into()));
            }
            let rc = self.reduced_costs(cost);
            let mut enter = None;
            if iter < bland_after {
                let mut best = T::zero();
                for j in 0..self.ncol {
                    if allowed[j] && rc[j].neg_sig() && (enter.is_none() || rc[j] < best) {
                        best = rc[j].clone();
                        enter = Some(j);
                    }
                }
            } else {
                enter = (0..self.ncol).find(|&j| allowed[j] && rc[j].neg_sig());
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..m {
                let a = &self.t[r][c];
                if a.pos() {
                    let ratio = self.t[r][self.ncol].div(a);
                    let better = match &leave {
                        None => true,
                        Some((lr, lv)) => ratio < *lv || (!(lv < &ratio) && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return Err(Error::Unbounded) };
            self.pivot(r, c);
        }
    }
}

/// Solves a linear program with the two-phase simplex method.
pub fn solve_lp<T: Scalar>(p: &LpProblem<T>) -> Result<LpSolution<T>> {
    let n = p.c.len();
    let m = p.rows.len();
    for (row, _, _) in &p.rows {
        if row.len() != n {
            return Err(Error::SizeMismatch("LP row length".into()));
        }
    }
    // normalise to nonnegative right-hand sides
    let mut sign = vec![T::one(); m];
    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::with_capacity(m);
    for (i, (row, rel, rhs)) in p.rows.iter().enumerate() {
        if rhs.neg_sig() {
            sign[i] = T::one().neg();
            let flipped = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            rows.push((row.iter().map(|v| v.neg()).collect(), flipped, rhs.neg()));
        } else {
            rows.push((row.clone(), *rel, rhs.clone()));
        }
    }
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncol = n + n_slack + n_art;
    let mut t = vec![vec![T::zero(); ncol + 1]; m];
    let mut basis = vec![0usize; m];
    let mut ident_col = vec![0usize; m];
    let mut is_art = vec![false; ncol];
    let (mut si, mut ai) = (n, n + n_slack);
    for (i, (row, rel, rhs)) in rows.iter().enumerate() {
        t[i][..n].clone_from_slice(row);
        t[i][ncol] = rhs.clone();
        match rel {
            Relation::Le => {
                t[i][si] = T::one();
                basis[i] = si;
                ident_col[i] = si;
                si += 1;
            }
            Relation::Ge => {
                t[i][si] = T::one().neg();
                si += 1;
                t[i][ai] = T::one();
                is_art[ai] = true;
                basis[i] = ai;
                ident_col[i] = ai;
                ai += 1;
            }
            Relation::Eq => {
                t[i][ai] = T::one();
                is_art[ai] = true;
                basis[i] = ai;
                ident_col[i] = ai;
                ai += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, ncol };
    if n_art > 0 {
        let cost1: Vec<T> = (0..ncol).map(|j| if is_art[j] { T::one() } else { T::zero() }).collect();
        let allowed = vec![true; ncol];
        tab.optimize(&cost1, &allowed)?;
        let infeas = tab.basis.iter().enumerate().fold(T::zero(), |acc, (r, &b)| {
            if is_art[b] {
                acc.add(&tab.t[r][ncol])
            } else {
                acc
            }
        });
        if infeas.pos() && infeas.to_f64() > 1e-9 {
            return Err(Error::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if is_art[tab.basis[r]] {
                if let Some(c) = (0..ncol).find(|&j| !is_art[j] && (tab.t[r][j].pos() || tab.t[r][j].neg_sig())) {
                    tab.pivot(r, c);
                }
            }
        }
    }
    let mut cost2 = vec![T::zero(); ncol];
    cost2[..n].clone_from_slice(&p.c);
    let allowed: Vec<bool> = (0..ncol).map(|j| !is_art[j]).collect();
    tab.optimize(&cost2, &allowed)?;

    let mut x = vec![T::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[r][ncol].clone();
        }
    }
    let value = x.iter().zip(&p.c).fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
    // y = c_B B^{-1}; B^{-1} e_i is the current column of the initial identity column of row i
    let mut dual = vec![T::zero(); m];
    for i in 0..m {
        let col = ident_col[i];
        let mut y = T::zero();
        for (r, &b) in tab.basis.iter().enumerate() {
            y = y.add(&cost2[b].mul(&tab.t[r][col]));
        }
        dual[i] = y.mul(&sign[i]);
    }
    Ok(LpSolution { value, primal: x, dual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let mut p = LpProblem::new(vec![1.0]);
        p.push(vec![2.0], Relation::Ge, 3.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.value, 1.5);
        assert_eq!(s.dual, vec![0.5]);
    }

    #[test]
    fn infeasible_detected() {
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.push(vec![1.0, 1.0], Relation::Le, 1.0);
        p.push(vec![1.0, 1.0], Relation::Ge, 2.0);
        assert!(matches!(solve_lp(&p), Err(Error::Infeasible)));
    }

    #[test]
    fn unbounded_detected() {
        let mut p = LpProblem::new(vec![-1.0, 0.0]);
        p.push(vec![1.0, -1.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::Unbounded)));
    }

    #[test]
    fn strong_duality_mixed_rows() {
        // min -x - 2y  s.t. x + y <= 4, x - y >= -2, x = 1
        let mut p = LpProblem::new(vec![-1.0, -2.0]);
        p.push(vec![1.0, 1.0], Relation::Le, 4.0);
        p.push(vec![1.0, -1.0], Relation::Ge, -2.0);
        p.push(vec![1.0, 0.0], Relation::Eq, 1.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.value + 7.0).abs() < 1e-12);
        let by: f64 = [4.0, -2.0, 1.0].iter().zip(&s.dual).map(|(a, b)| a * b).sum();
        assert!((by - s.value).abs() < 1e-10);
        assert!(s.dual[0] <= 1e-12 && s.dual[1] >= -1e-12);
    }

    #[test]
    fn exact_rational_mode() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let mut p = LpProblem::new(vec![q(1, 1), q(1, 1)]);
        p.push(vec![q(3, 1), q(1, 1)], Relation::Ge, q(1, 1));
        p.push(vec![q(1, 1), q(3, 1)], Relation::Ge, q(1, 1));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.value, q(1, 2));
    }
}
