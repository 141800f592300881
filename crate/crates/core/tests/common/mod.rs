#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twzec::channel::{canonical_channel, Channel, ConfusionFamily};
use twzec::graph::Graph;

/// Rows `y1y2 = 00, 01, 10, 11`, columns `x1x2 = 00, 01, 10, 11, 20, 21`.
pub fn example1(delta: f64) -> Channel {
    let cols = [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, delta, 1.0 - delta],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    Channel::new(3, 2, 2, 2, cols.concat()).unwrap()
}

pub fn pentagon() -> ConfusionFamily {
    ConfusionFamily::new(vec![Graph::empty(5), Graph::cycle(5)], vec![Graph::empty(2); 5]).unwrap()
}

pub fn bmc() -> ConfusionFamily {
    let k = Graph::complete(2);
    let e = Graph::empty(2);
    ConfusionFamily::new(vec![k.clone(), e.clone()], vec![k, e]).unwrap()
}

/// `Y1 = X2`, `Y2 = X1`.
pub fn noiseless(m1: usize, m2: usize) -> Channel {
    let mut p = Vec::new();
    for a in 0..m1 {
        for b in 0..m2 {
            for c in 0..m2 {
                for d in 0..m1 {
                    p.push(if c == b && d == a { 1.0 } else { 0.0 });
                }
            }
        }
    }
    Channel::new(m1, m2, m2, m1, p).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

pub fn random_family(rng: &mut impl Rng, m1: usize, m2: usize) -> ConfusionFamily {
    let p = rng.random_range(0.2..0.8);
    let g = (0..m1).map(|_| random_graph(rng, m2, p)).collect();
    let h = (0..m2).map(|_| random_graph(rng, m1, p)).collect();
    ConfusionFamily::new(g, h).unwrap()
}

/// A channel with sparse random support; every alphabet has size in `2..=max`.
pub fn random_channel(rng: &mut impl Rng, max: usize) -> Channel {
    let (x1, x2) = (rng.random_range(2..=max), rng.random_range(2..=max));
    let (y1, y2) = (rng.random_range(2..=max), rng.random_range(2..=max));
    let mut p = Vec::with_capacity(x1 * x2 * y1 * y2);
    for _ in 0..x1 * x2 {
        let mut row: Vec<f64> = (0..y1 * y2).map(|_| if rng.random_bool(0.3) { rng.random_range(0.05..1.0) } else { 0.0 }).collect();
        if row.iter().all(|&v| v == 0.0) {
            let k = rng.random_range(0..y1 * y2);
            row[k] = 1.0;
        }
        let s: f64 = row.iter().sum();
        p.extend(row.into_iter().map(|v| v / s));
    }
    Channel::new(x1, x2, y1, y2, p).unwrap()
}

pub fn canonical(fam: &ConfusionFamily) -> Channel {
    canonical_channel(fam)
}

pub fn assert_close(got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "got {got}, want {want} ± {tol}");
}
