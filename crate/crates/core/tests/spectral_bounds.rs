mod common;

use common::*;
use twzec::channel::ConfusionFamily;
use twzec::graph::{independence_number, Graph};
use twzec::spectral::{
    capacity_sandwich, fractional_clique_cover, fractional_clique_cover_exact, kg_kk_bound, lovasz_theta, noiseless_direction_bound, ratio_string,
    SpectralPoint,
};

#[test]
fn theta_closed_forms() {
    for n in 1..=8 {
        assert_close(lovasz_theta(&Graph::empty(n)).unwrap(), n as f64, 1e-6);
        assert_close(lovasz_theta(&Graph::complete(n)).unwrap(), 1.0, 1e-6);
    }
    assert_close(lovasz_theta(&Graph::cycle(5)).unwrap(), 5f64.sqrt(), 1e-6);
    // odd cycle formula n cos(π/n) / (1 + cos(π/n))
    let c = (std::f64::consts::PI / 7.0).cos();
    assert_close(lovasz_theta(&Graph::cycle(7)).unwrap(), 7.0 * c / (1.0 + c), 1e-6);
}

#[test]
fn fcc_closed_forms() {
    for n in 1..=8 {
        assert_close(fractional_clique_cover(&Graph::empty(n)).unwrap(), n as f64, 1e-9);
        assert_close(fractional_clique_cover(&Graph::complete(n)).unwrap(), 1.0, 1e-9);
    }
    assert_close(fractional_clique_cover(&Graph::cycle(5)).unwrap(), 2.5, 1e-9);
    assert_eq!(ratio_string(&fractional_clique_cover_exact(&Graph::cycle(5)).unwrap()), "5/2");
}

#[test]
fn sandwich_cases() {
    for n in 1..=5 {
        let s = capacity_sandwich(&Graph::empty(n), 2).unwrap();
        assert_close(s.lower, (n as f64).log2(), 1e-9);
        assert_close(s.upper, (n as f64).log2(), 1e-6);
    }
    let s = capacity_sandwich(&Graph::cycle(5), 2).unwrap();
    assert_close(s.lower, 0.5 * 5f64.log2(), 1e-12);
    assert_close(s.upper, 5f64.sqrt().log2(), 1e-6);
    assert_eq!(s.witness_power, 2);
    let mut g = Graph::complete(3);
    for _ in 1..4 {
        g = g.disjoint_union(&Graph::complete(3)).unwrap();
    }
    let s = capacity_sandwich(&g, 1).unwrap();
    assert_close(s.lower, 2.0, 1e-12);
    assert_close(s.upper, 2.0, 1e-6);
}

#[test]
fn alpha_theta_fcc_order() {
    let mut r = rng(31);
    for _ in 0..30 {
        let g = random_graph(&mut r, 8, 0.45);
        let a = independence_number(&g).unwrap().0 as f64;
        let t = lovasz_theta(&g).unwrap();
        let f = fractional_clique_cover(&g).unwrap();
        assert!(a <= t + 1e-6 && t <= f + 1e-6, "{a} {t} {f}");
        let s = capacity_sandwich(&g, 1).unwrap();
        assert!(s.lower <= s.upper + 1e-9);
    }
}

#[test]
fn spectrum_axioms_on_small_pairs() {
    let mut r = rng(32);
    for _ in 0..8 {
        let g = random_graph(&mut r, 4, 0.5);
        let h = random_graph(&mut r, 5, 0.5);
        for p in SpectralPoint::ALL {
            let (eg, eh) = (p.evaluate(&g).unwrap(), p.evaluate(&h).unwrap());
            assert_close(p.evaluate(&g.disjoint_union(&h).unwrap()).unwrap(), eg + eh, 1e-4);
            assert_close(p.evaluate(&g.strong_product(&h).unwrap()).unwrap(), eg * eh, 1e-4);
            assert_close(p.evaluate(&Graph::empty(1)).unwrap(), 1.0, 1e-6);
        }
    }
}

/// A map V(g) → V(h) sending non-edges of g (distinct, non-adjacent) to non-edges of h.
fn complement_hom(g: &Graph, h: &Graph) -> bool {
    let (n, m) = (g.n(), h.n());
    let mut f = vec![0usize; n];
    loop {
        let ok = (0..n).all(|u| (u + 1..n).all(|v| g.has_edge(u, v) || (f[u] != f[v] && !h.has_edge(f[u], f[v]))));
        if ok {
            return true;
        }
        let mut i = 0;
        while i < n {
            f[i] += 1;
            if f[i] < m {
                break;
            }
            f[i] = 0;
            i += 1;
        }
        if i == n {
            return false;
        }
    }
}

#[test]
fn spectral_points_are_monotone() {
    let mut r = rng(33);
    let mut seen = 0;
    for _ in 0..60 {
        let g = random_graph(&mut r, 4, 0.5);
        let h = random_graph(&mut r, 5, 0.5);
        if complement_hom(&g, &h) {
            seen += 1;
            for p in SpectralPoint::ALL {
                assert!(p.evaluate(&g).unwrap() <= p.evaluate(&h).unwrap() + 1e-6);
            }
        }
    }
    assert!(seen >= 5);
}

#[test]
fn noiseless_direction_cases() {
    let (m, s) = (2, 2);
    let mut g = Graph::complete(m);
    for _ in 1..s {
        g = g.disjoint_union(&Graph::complete(m)).unwrap();
    }
    let q = m * s;
    let fam = ConfusionFamily::new(vec![Graph::empty(q), g], vec![Graph::empty(2); q]).unwrap();
    assert_close(noiseless_direction_bound(&fam).unwrap(), ((q + s) as f64).log2(), 1e-6);
    assert_close(noiseless_direction_bound(&pentagon()).unwrap(), (5.0 + 5f64.sqrt()).log2(), 1e-6);
    let single = ConfusionFamily::new(vec![Graph::empty(4)], vec![Graph::empty(1); 4]).unwrap();
    assert_close(noiseless_direction_bound(&single).unwrap(), 2.0, 1e-6);
    assert!(noiseless_direction_bound(&bmc()).is_err());
    let same = ConfusionFamily::new(vec![Graph::cycle(5); 3], vec![Graph::empty(3); 5]).unwrap();
    assert_close(noiseless_direction_bound(&same).unwrap(), 3f64.log2() + 5f64.sqrt().log2(), 1e-6);
}

#[test]
fn kg_kk_cases() {
    assert_close(kg_kk_bound(5, &Graph::cycle(5)).unwrap(), 2.8552, 1e-4);
    for n in 1..6 {
        assert_close(kg_kk_bound(n, &Graph::empty(n)).unwrap(), (2.0 * n as f64).log2(), 1e-6);
        assert_close(kg_kk_bound(n, &Graph::complete(n)).unwrap(), (n as f64 + 1.0).log2(), 1e-6);
    }
}
