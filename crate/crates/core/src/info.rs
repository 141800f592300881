//! Entropies and conditional mutual informations of a two-way channel under
//! product inputs, with gradients.

use std::f64::consts::LOG2_E;

use crate::channel::{Channel, CondTable};

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `D(w || q)` in bits; `+inf` when `w` puts mass where `q` has none.
pub fn kl(w: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &b) in w.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            s += a * (a / b).log2();
        }
    }
    s
}

/// The two conditional marginals of a channel, which is all the mutual
/// informations depend on.
#[derive(Debug, Clone)]
pub struct Marginals {
    pub w1: CondTable,
    pub w2: CondTable,
}

impl Marginals {
    pub fn of(ch: &Channel) -> Marginals {
        Marginals { w1: ch.marginal_y1(), w2: ch.marginal_y2() }
    }

    fn mix2(&self, p1: &[f64], b: usize) -> Vec<f64> {
        let mut q = vec![0.0; self.w2.y];
        for (a, &pa) in p1.iter().enumerate() {
            if pa > 0.0 {
                for (y, v) in q.iter_mut().enumerate() {
                    *v += pa * self.w2.get(a, b, y);
                }
            }
        }
        q
    }

    fn mix1(&self, p2: &[f64], a: usize) -> Vec<f64> {
        let mut r = vec![0.0; self.w1.y];
        for (b, &pb) in p2.iter().enumerate() {
            if pb > 0.0 {
                for (y, v) in r.iter_mut().enumerate() {
                    *v += pb * self.w1.get(a, b, y);
                }
            }
        }
        r
    }

    /// `I(X1; Y2 | X2)`.
    pub fn forward(&self, p1: &[f64], p2: &[f64]) -> f64 {
        let mut s = 0.0;
        for (b, &pb) in p2.iter().enumerate() {
            if pb <= 0.0 {
                continue;
            }
            let q = self.mix2(p1, b);
            let inner: f64 = p1.iter().enumerate().filter(|(_, &pa)| pa > 0.0).map(|(a, &pa)| pa * kl(self.w2.row(a, b), &q)).sum();
            s += pb * inner;
        }
        s
    }

    /// `I(X2; Y1 | X1)`.
    pub fn backward(&self, p1: &[f64], p2: &[f64]) -> f64 {
        let mut s = 0.0;
        for (a, &pa) in p1.iter().enumerate() {
            if pa <= 0.0 {
                continue;
            }
            let r = self.mix1(p2, a);
            let inner: f64 = p2.iter().enumerate().filter(|(_, &pb)| pb > 0.0).map(|(b, &pb)| pb * kl(self.w1.row(a, b), &r)).sum();
            s += pa * inner;
        }
        s
    }

    /// `λ I(X1;Y2|X2) + (1-λ) I(X2;Y1|X1)`.
    pub fn epsilon(&self, p1: &[f64], p2: &[f64], lambda: f64) -> f64 {
        let f = if lambda > 0.0 { lambda * self.forward(p1, p2) } else { 0.0 };
        let b = if lambda < 1.0 { (1.0 - lambda) * self.backward(p1, p2) } else { 0.0 };
        f + b
    }

    /// The same quantity through `H(Y|X_other) - H(Y|X1,X2)` expansions.
    pub fn epsilon_by_entropies(&self, p1: &[f64], p2: &[f64], lambda: f64) -> f64 {
        let mut fwd = 0.0;
        for (b, &pb) in p2.iter().enumerate() {
            let q = self.mix2(p1, b);
            let cond: f64 = p1.iter().enumerate().map(|(a, &pa)| pa * entropy(self.w2.row(a, b))).sum();
            fwd += pb * (entropy(&q) - cond);
        }
        let mut bwd = 0.0;
        for (a, &pa) in p1.iter().enumerate() {
            let r = self.mix1(p2, a);
            let cond: f64 = p2.iter().enumerate().map(|(b, &pb)| pb * entropy(self.w1.row(a, b))).sum();
            bwd += pa * (entropy(&r) - cond);
        }
        lambda * fwd + (1.0 - lambda) * bwd
    }

    /// Value and partial derivatives of `epsilon` with respect to every entry of `p1` and `p2`.
    pub fn epsilon_grad(&self, p1: &[f64], p2: &[f64], lambda: f64) -> (f64, Vec<f64>, Vec<f64>) {
        let (m1, m2) = (p1.len(), p2.len());
        let mut g1 = vec![0.0; m1];
        let mut g2 = vec![0.0; m2];
        let mut fwd = 0.0;
        let mut bwd = 0.0;
        if lambda > 0.0 {
            for b in 0..m2 {
                let q = self.mix2(p1, b);
                let mut ib = 0.0;
                for a in 0..m1 {
                    let d = kl(self.w2.row(a, b), &q);
                    if p1[a] > 0.0 {
                        ib += p1[a] * d;
                    }
                    if p2[b] > 0.0 {
                        g1[a] += lambda * p2[b] * (d - LOG2_E);
                    }
                }
                g2[b] += lambda * ib;
                fwd += p2[b] * ib;
            }
        }
        if lambda < 1.0 {
            let w = 1.0 - lambda;
            for a in 0..m1 {
                let r = self.mix1(p2, a);
                let mut ja = 0.0;
                for b in 0..m2 {
                    let d = kl(self.w1.row(a, b), &r);
                    if p2[b] > 0.0 {
                        ja += p2[b] * d;
                    }
                    if p1[a] > 0.0 {
                        g2[b] += w * p1[a] * (d - LOG2_E);
                    }
                }
                g1[a] += w * ja;
                bwd += p1[a] * ja;
            }
        }
        let val = lambda * fwd + (1.0 - lambda) * bwd;
        (val, g1, g2)
    }
}
