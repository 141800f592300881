//! Small finite fields in polynomial basis, with dense linear algebra over them.

use crate::{Error, Result};

/// `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power. `1` is rejected.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Lower coefficients of the monic modulus for each supported extension field.
fn modulus(p: usize, m: usize) -> Option<Vec<usize>> {
    Some(match (p, m) {
        (_, 1) => vec![0],
        (2, 2) => vec![1, 1],
        (2, 3) => vec![1, 1, 0],
        (2, 4) => vec![1, 1, 0, 0],
        (3, 2) => vec![1, 0],
        (3, 3) => vec![1, 2, 0],
        (5, 2) => vec![2, 0],
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct GaloisField {
    q: usize,
    p: usize,
    m: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    neg: Vec<usize>,
}

impl GaloisField {
    pub fn new(q: usize) -> Result<GaloisField> {
        let unsupported = || Error::Unsupported(format!("GF({q})"));
        let (p, m) = prime_power(q).ok_or_else(unsupported)?;
        if q > 32 || (m == 1 && p > 13) {
            return Err(unsupported());
        }
        let low = modulus(p, m).ok_or_else(unsupported)?;
        let digits = |x: usize| -> Vec<usize> { (0..m).map(|i| x / p.pow(i as u32) % p).collect() };
        let value = |d: &[usize]| -> usize { d.iter().enumerate().map(|(i, &c)| c * p.pow(i as u32)).sum() };
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for x in 0..q {
            let dx = digits(x);
            for y in 0..q {
                let dy = digits(y);
                let s: Vec<usize> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * q + y] = value(&s);
                // schoolbook product, then reduce x^m = -low(x)
                let mut prod = vec![0usize; 2 * m];
                for i in 0..m {
                    for j in 0..m {
                        prod[i + j] = (prod[i + j] + dx[i] * dy[j]) % p;
                    }
                }
                for deg in (m..2 * m).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    for (i, &l) in low.iter().enumerate() {
                        prod[deg - m + i] = (prod[deg - m + i] + (p - l % p) % p * c) % p;
                    }
                }
                mul[x * q + y] = value(&prod[..m]);
            }
        }
        let mut inv = vec![0; q];
        let mut neg = vec![0; q];
        for x in 0..q {
            neg[x] = (0..q).find(|&y| add[x * q + y] == 0).ok_or_else(|| Error::Internal("no negative".into()))?;
            if x != 0 {
                inv[x] = (1..q).find(|&y| mul[x * q + y] == 1).ok_or_else(|| Error::Internal(format!("GF({q}) modulus is reducible")))?;
            }
        }
        Ok(GaloisField { q, p, m, add, mul, inv, neg })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.q + y]
    }

    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg[y])
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.q + y]
    }

    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: usize) -> Option<usize> {
        (x != 0).then(|| self.inv[x])
    }

    pub fn pow(&self, x: usize, e: usize) -> usize {
        (0..e).fold(1, |acc, _| self.mul(acc, x))
    }

    /// Elements of the subfield of order `s`, sorted, if it exists.
    pub fn subfield(&self, s: usize) -> Option<Vec<usize>> {
        let (ps, d) = prime_power(s)?;
        if ps != self.p || self.m % d != 0 {
            return None;
        }
        Some((0..self.q).filter(|&x| self.pow(x, s) == x).collect())
    }

    /// Relative trace `x + x^s + … + x^{s^{r-1}}` onto the subfield of order `s`.
    pub fn trace(&self, s: usize, x: usize) -> Result<usize> {
        self.subfield(s).ok_or_else(|| Error::Unsupported(format!("GF({s}) is not a subfield of GF({})", self.q)))?;
        let r = (self.q as f64).log(s as f64).round() as u32;
        let mut acc = 0;
        let mut term = x;
        for _ in 0..r {
            acc = self.add(acc, term);
            term = self.pow(term, s);
        }
        Ok(acc)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&self, rows: &mut [Vec<usize>]) -> Vec<usize> {
        let ncol = rows.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncol {
            if r == rows.len() {
                break;
            }
            let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, sel);
            let iv = self.inv(rows[r][c]).expect("nonzero pivot");
            for v in rows[r].iter_mut() {
                *v = self.mul(*v, iv);
            }
            for i in 0..rows.len() {
                if i != r && rows[i][c] != 0 {
                    let f = rows[i][c];
                    for j in 0..ncol {
                        let t = self.mul(f, rows[r][j]);
                        rows[i][j] = self.sub(rows[i][j], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, rows: &[Vec<usize>]) -> usize {
        let mut m = rows.to_vec();
        self.rref(&mut m).len()
    }

    /// Whether the columns `cols` of `rows` are linearly independent.
    pub fn columns_independent(&self, rows: &[Vec<usize>], cols: &[usize]) -> bool {
        let mut t: Vec<Vec<usize>> = cols.iter().map(|&c| rows.iter().map(|r| r[c]).collect()).collect();
        self.rref(&mut t).len() == cols.len()
    }

    /// `u · rows` for a message `u`.
    pub fn encode(&self, u: &[usize], rows: &[Vec<usize>]) -> Vec<usize> {
        let n = rows.first().map_or(0, Vec::len);
        let mut out = vec![0; n];
        for (&c, row) in u.iter().zip(rows) {
            if c == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o = self.add(*o, self.mul(c, g));
            }
        }
        out
    }

    /// Canonical representative of `w + rowspace`, given rows already in RREF
    /// with the matching pivot list: the unique coset member vanishing on pivots.
    pub fn coset_leader(&self, w: &[usize], rref_rows: &[Vec<usize>], pivots: &[usize]) -> Vec<usize> {
        let mut v = w.to_vec();
        for (row, &pc) in rref_rows.iter().zip(pivots) {
            let f = v[pc];
            if f != 0 {
                for (x, &g) in v.iter_mut().zip(row) {
                    *x = self.sub(*x, self.mul(f, g));
                }
            }
        }
        v
    }
}

/// All words of length `n` over `0..q` in lexicographic order.
pub fn all_words(q: usize, n: usize) -> Vec<Vec<usize>> {
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut w = vec![0; n];
            for i in (0..n).rev() {
                w[i] = idx % q;
                idx /= q;
            }
            w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27] {
            let f = GaloisField::new(q).unwrap();
            for x in 0..q {
                assert_eq!(f.add(x, 0), x);
                assert_eq!(f.mul(x, 1), x);
                assert_eq!(f.add(x, f.neg(x)), 0);
                if x != 0 {
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
                }
                for y in 0..q {
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    for z in 0..q {
                        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                        assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn gf4_trace() {
        let f = GaloisField::new(4).unwrap();
        assert_eq!(f.subfield(2).unwrap(), vec![0, 1]);
        let img: Vec<usize> = (0..4).map(|x| f.trace(2, x).unwrap()).collect();
        assert_eq!(img.iter().filter(|&&v| v == 0).count(), 2);
        for x in 0..4 {
            assert_eq!(img[x], f.add(x, f.mul(x, x)));
        }
    }

    #[test]
    fn gf9_has_generator() {
        let f = GaloisField::new(9).unwrap();
        let gen = (1..9).find(|&g| (1..8).all(|e| f.pow(g, e) != 1));
        assert!(gen.is_some());
        assert!(GaloisField::new(6).is_err());
        assert!(GaloisField::new(32).is_err());
    }
}
