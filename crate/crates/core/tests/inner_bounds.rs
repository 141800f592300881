mod common;

use common::*;
use rand::Rng;
use twzec::channel::ConfusionFamily;
use twzec::graph::Graph;
use twzec::inner::*;
use twzec::outer::{maxmin_bound, minmax_bound, OuterOptions, ProductDistribution};

fn opts() -> OuterOptions {
    OuterOptions::default()
}

fn simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// The random-coding sums written out as a literal triple loop.
fn literal_rates(fam: &ConfusionFamily, p1: &[f64], p2: &[f64]) -> (f64, f64) {
    let mut s1 = 0.0;
    for b in 0..p2.len() {
        for u in 0..p1.len() {
            for v in 0..p1.len() {
                if u == v || fam.h[b].confusable(u, v) {
                    s1 += p1[u] * p1[v] * p2[b];
                }
            }
        }
    }
    let mut s2 = 0.0;
    for a in 0..p1.len() {
        for u in 0..p2.len() {
            for v in 0..p2.len() {
                if u == v || fam.g[a].confusable(u, v) {
                    s2 += p2[u] * p2[v] * p1[a];
                }
            }
        }
    }
    (-0.5 * s1.log2(), -0.5 * s2.log2())
}

#[test]
fn detecting_sets_of_example1() {
    let fam = example1(0.5).derive_confusion();
    let d = detecting_sets(&fam);
    assert_eq!(d.d1, vec![2]);
    assert!(d.d2.is_empty());
    let sub = fam.restrict(&[1, 2], &[0, 1]).unwrap();
    let d = detecting_sets(&sub);
    assert_eq!(d.d1, vec![1]);
    assert_eq!(d.d2, vec![1]);
}

#[test]
fn noiseless_family_detects_everything() {
    let fam = noiseless(3, 4).derive_confusion();
    let d = detecting_sets(&fam);
    assert_eq!(d.d1, vec![0, 1, 2]);
    assert_eq!(d.d2, vec![0, 1, 2, 3]);
}

#[test]
fn random_coding_matches_literal_sums() {
    let mut r = rng(21);
    for _ in 0..40 {
        let (m1, m2) = (r.random_range(1..=5), r.random_range(1..=5));
        let fam = random_family(&mut r, m1, m2);
        let d = ProductDistribution { p1: simplex(&mut r, m1), p2: simplex(&mut r, m2) };
        let pt = random_coding_point(&fam, &d).unwrap();
        let (a, b) = literal_rates(&fam, &d.p1, &d.p2);
        assert_close(pt.r1, a.max(0.0), 1e-12);
        assert_close(pt.r2, b.max(0.0), 1e-12);
    }
    let complete = ConfusionFamily::new(vec![Graph::complete(2); 2], vec![Graph::complete(2); 2]).unwrap();
    let pt = random_coding_point(&complete, &ProductDistribution::uniform(2, 2)).unwrap();
    assert_eq!((pt.r1, pt.r2), (0.0, 0.0));
}

#[test]
fn edgeless_family_gives_half_logs() {
    let fam = ConfusionFamily::new(vec![Graph::empty(4); 3], vec![Graph::empty(3); 4]).unwrap();
    let pt = random_coding_point(&fam, &ProductDistribution::uniform(3, 4)).unwrap();
    assert_close(pt.r1, 0.5 * 3f64.log2(), 1e-12);
    assert_close(pt.r2, 1.0, 1e-12);
    let best = max_random_coding(&fam, &opts()).unwrap();
    assert_close(best.r1, 0.5 * 3f64.log2(), 1e-6);
    assert_close(best.r2, 1.0, 1e-6);
}

#[test]
fn example1_random_coding_by_the_formula() {
    let fam = example1(0.5).derive_confusion();
    let best = max_random_coding(&fam, &opts()).unwrap();
    assert_close(best.sum_rate(), 0.50696, 1e-3);
    let InnerParams::Distribution(d) = &best.parameters else { panic!("{:?}", best.parameters) };
    assert_close(d.p1[0], 0.0, 1e-3);
    assert_close(d.p1[2], 2.0 / 3.0, 1e-2);
}

#[test]
fn multiplying_random_coding_matches_grid() {
    let fam = bmc();
    let best = max_random_coding(&fam, &opts()).unwrap();
    let mut grid = f64::NEG_INFINITY;
    for i in 0..=400 {
        for j in 0..=400 {
            let (a, b) = (i as f64 / 400.0, j as f64 / 400.0);
            let d = ProductDistribution { p1: vec![a, 1.0 - a], p2: vec![b, 1.0 - b] };
            grid = grid.max(random_coding_point(&fam, &d).unwrap().sum_rate());
        }
    }
    assert!(best.sum_rate() >= grid - 1e-9);
    assert_close(best.sum_rate(), grid, 1e-3);
}

#[test]
fn random_coding_optimum_dominates_samples() {
    let mut r = rng(22);
    let fam = random_family(&mut r, 3, 3);
    let best = max_random_coding(&fam, &opts()).unwrap().sum_rate();
    let base = ProductDistribution { p1: simplex(&mut r, 3), p2: simplex(&mut r, 3) };
    let v0 = random_coding_point(&fam, &base).unwrap().sum_rate();
    for _ in 0..50 {
        let d = ProductDistribution { p1: simplex(&mut r, 3), p2: simplex(&mut r, 3) };
        assert!(random_coding_point(&fam, &d).unwrap().sum_rate() <= best + 1e-9);
    }
    // small moves of the distribution give small moves of the rates
    let mut near = base.clone();
    near.p1[0] += 1e-7;
    near.p1[1] -= 1e-7;
    assert!((random_coding_point(&fam, &near).unwrap().sum_rate() - v0).abs() < 1e-5);
}

#[test]
fn binary_detecting_codes_give_log3_minus_1() {
    let l = linear_code_l(0.5, 2, 2, 1, 1).unwrap();
    assert_close(l.value, 3f64.log2() - 1.0, 1e-12);
    assert_close(l.alpha, 2.0 / 3.0, 1e-12);
    assert_close(l.beta, 2.0 / 3.0, 1e-12);
    assert_close(2.0 * l.value, 1.17, 5e-3);
}

#[test]
fn all_detecting_gives_full_rates() {
    for (q1, q2) in [(2, 2), (3, 4), (5, 2)] {
        let l = linear_code_l(0.5, q1, q2, q1, q2).unwrap();
        assert_eq!((l.alpha, l.beta), (1.0, 1.0));
        assert_close(l.r1 + l.r2, (q1 as f64).log2() + (q2 as f64).log2(), 1e-12);
    }
}

#[test]
fn lambda_one_keeps_only_the_first_rate() {
    let (q1, q2, t1, t2) = (4, 3, 1, 2);
    let l = linear_code_l(1.0, q1, q2, t1, t2).unwrap();
    let mut grid = f64::NEG_INFINITY;
    for i in 0..=2000 {
        let b = i as f64 / 2000.0;
        grid = grid.max(linear_rates(q1, q2, t1, t2, 1.0, b).0);
    }
    assert_close(l.value, l.r1, 1e-12);
    assert_close(l.value, grid, 1e-5);
    // h(β) + (1−β) log 3 peaks at β = 1/4 with value log 4
    assert_close(l.value, 2.0, 1e-9);
    assert_close(l.beta, 0.25, 1e-9);
}

#[test]
fn linear_l_matches_dense_grid() {
    let mut r = rng(23);
    let qs = [1, 2, 3, 4, 5, 7, 8];
    for _ in 0..20 {
        let q1 = qs[r.random_range(0..qs.len())];
        let q2 = qs[r.random_range(0..qs.len())];
        let (t1, t2) = (r.random_range(0..=q1), r.random_range(0..=q2));
        let lambda = r.random_range(0.0..1.0);
        let l = linear_code_l(lambda, q1, q2, t1, t2).unwrap();
        let mut grid = f64::NEG_INFINITY;
        for i in 0..=200 {
            for j in 0..=200 {
                let (a, b) = (i as f64 / 200.0, j as f64 / 200.0);
                let (r1, r2) = linear_rates(q1, q2, t1, t2, a, b);
                grid = grid.max(lambda * r1 + (1.0 - lambda) * r2);
            }
        }
        assert!(l.value >= grid - 1e-12, "{q1} {q2} {t1} {t2} {lambda}: {} < {grid}", l.value);
        assert!(l.value <= grid + 1e-3, "{} vs {grid}", l.value);
    }
}

#[test]
fn more_detecting_symbols_never_hurt() {
    for q1 in [2, 3, 4, 5] {
        for q2 in [2, 3, 4, 5] {
            for lambda in [0.1, 0.5, 0.9] {
                for t2 in 0..=q2 {
                    let mut prev = f64::NEG_INFINITY;
                    for t1 in 0..=q1 {
                        let v = linear_code_l(lambda, q1, q2, t1, t2).unwrap().value;
                        assert!(v >= prev - 1e-12);
                        prev = v;
                    }
                }
            }
        }
    }
}

#[test]
fn bad_alphabets_are_rejected() {
    assert!(linear_code_l(0.5, 6, 2, 1, 1).is_err());
    assert!(linear_code_l(0.5, 2, 2, 3, 1).is_err());
    assert!(linear_code_l(1.5, 2, 2, 1, 1).is_err());
}

#[test]
fn example1_best_sub_alphabet() {
    let fam = example1(0.5).derive_confusion();
    let c = &best_sub_alphabet(&fam, &[0.5]).unwrap()[0];
    assert_close(2.0 * c.value, 1.17, 5e-3);
    assert!(c.maximizers.contains(&(vec![1, 2], vec![0, 1])));
    assert!(c.maximizers.contains(&(vec![0, 2], vec![0, 1])));
    assert_eq!(c.ties, c.maximizers.len());
}

#[test]
fn singleton_alphabets_carry_nothing() {
    for lambda in [0.0, 0.5, 1.0] {
        for (t1, t2) in [(0, 0), (1, 1), (0, 1)] {
            assert_close(linear_code_l(lambda, 1, 1, t1, t2).unwrap().value, 0.0, 1e-12);
        }
    }
}

#[test]
fn noiseless_binary_sub_alphabet_is_full() {
    let fam = noiseless(2, 2).derive_confusion();
    let c = &best_sub_alphabet(&fam, &[0.5]).unwrap()[0];
    assert_close(c.point.r1, 1.0, 1e-12);
    assert_close(c.point.r2, 1.0, 1e-12);
}

#[test]
fn inner_points_sit_below_outer_bounds() {
    let mut r = rng(24);
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    for _ in 0..5 {
        let q = random_channel(&mut r, 3);
        let fam = q.derive_confusion();
        let subs = best_sub_alphabet(&fam, &lambdas).unwrap();
        let rc = max_random_coding(&fam, &opts()).unwrap();
        for (k, &lambda) in lambdas.iter().enumerate() {
            let th = maxmin_bound(&q, &fam, lambda, &opts()).unwrap().value;
            let t = minmax_bound(&q, &fam, lambda, &opts()).unwrap().value;
            for p in [&subs[k].point, &rc] {
                assert!(p.weighted(lambda) <= th + 1e-6, "λ={lambda} {p:?} θ={th}");
                assert!(p.weighted(lambda) <= t + 1e-6);
            }
            let w = max_random_coding_weighted(&fam, lambda, &opts()).unwrap();
            assert!(w.weighted(lambda) <= th + 1e-6);
        }
    }
}

#[test]
fn hull_adds_time_sharing_corners() {
    let h = hull(&[(1.0, 0.2), (0.3, 0.9)]);
    for p in [(0.0, 0.0), (1.0, 0.0), (1.0, 0.2), (0.3, 0.9), (0.0, 0.9)] {
        assert!(h.iter().any(|q| (q.0 - p.0).abs() < 1e-12 && (q.1 - p.1).abs() < 1e-12), "{p:?} missing from {h:?}");
    }
    assert_eq!(h.len(), 5);
    assert!(hull(&[(0.1, 0.1), (1.0, 1.0)]).len() == 4);
}
