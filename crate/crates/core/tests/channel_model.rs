mod common;

use common::*;
use twzec::channel::{canonical_channel, parse_input, same_adjacency, Channel, ConfusionFamily, Format, Input};
use twzec::graph::Graph;
use twzec::Error;

#[test]
fn parses_example1_table() {
    let doc = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/example1.json")).unwrap();
    let Input::Channel(ch) = parse_input(&doc, None).unwrap() else { panic!("expected a channel") };
    assert_eq!((ch.x1_size(), ch.x2_size(), ch.y1_size(), ch.y2_size()), (3, 2, 2, 2));
    assert_eq!(ch, example1(0.5));
}

#[test]
fn rejects_row_summing_to_point_nine() {
    let doc = br#"{"x1":1,"x2":1,"y1":1,"y2":2,"p":[[[[0.5,0.4]]]]}"#;
    assert!(matches!(parse_input(doc, Some(Format::ProbabilityTable)), Err(Error::InvalidChannel(_))));
}

#[test]
fn rejects_negative_entry_and_ragged_table() {
    let neg = br#"{"x1":1,"x2":1,"y1":1,"y2":2,"p":[[[[1.5,-0.5]]]]}"#;
    assert!(parse_input(neg, None).is_err());
    let ragged = br#"{"x1":1,"x2":2,"y1":1,"y2":2,"p":[[[[1.0,0.0]],[[1.0]]]]}"#;
    assert!(parse_input(ragged, None).is_err());
    assert!(matches!(parse_input(b"{not json", None), Err(Error::Malformed(_))));
}

#[test]
fn parses_pentagon_family() {
    let doc = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pentagon.json")).unwrap();
    let Input::Family(fam) = parse_input(&doc, Some(Format::GraphFamily)).unwrap() else { panic!("expected a family") };
    assert_eq!(fam, pentagon());
}

#[test]
fn rejects_family_with_self_loop() {
    let doc = br#"{"x1":1,"x2":2,"G":[[[1,0],[0,0]]],"H":[[[0]],[[0]]]}"#;
    assert!(parse_input(doc, None).is_err());
}

#[test]
fn example1_marginals() {
    let ch = example1(0.5);
    assert_close(ch.marginal_y1().get(1, 0, 1), 1.0, 1e-15);
    let ch = example1(0.3);
    assert_close(ch.marginal_y2().get(1, 0, 0), 0.3, 1e-15);
    for m in [ch.marginal_y1(), ch.marginal_y2()] {
        for a in 0..3 {
            for b in 0..2 {
                assert_close(m.row(a, b).iter().sum(), 1.0, 1e-12);
            }
        }
    }
}

#[test]
fn noiseless_marginal_is_indicator() {
    let ch = noiseless(3, 2);
    let m = ch.marginal_y1();
    for a in 0..3 {
        for b in 0..2 {
            for y in 0..2 {
                assert_eq!(m.get(a, b, y), if y == b { 1.0 } else { 0.0 });
            }
        }
    }
    let fam = ch.derive_confusion();
    assert!(fam.g.iter().all(Graph::is_edgeless) && fam.h.iter().all(Graph::is_edgeless));
}

#[test]
fn example1_confusion_graphs() {
    let fam = example1(0.5).derive_confusion();
    assert_eq!(fam.g, vec![Graph::complete(2), Graph::complete(2), Graph::empty(2)]);
    assert_eq!(fam.h[0], Graph::path(3));
    assert_eq!(fam.h[1], Graph::from_edges(3, &[(0, 2)]));
}

#[test]
fn confusion_matches_brute_force() {
    let mut r = rng(11);
    for _ in 0..30 {
        let ch = random_channel(&mut r, 4);
        let fam = ch.derive_confusion();
        let (m1, m2) = (ch.marginal_y1(), ch.marginal_y2());
        for a in 0..ch.x1_size() {
            for b in 0..ch.x2_size() {
                for b2 in b + 1..ch.x2_size() {
                    let hit = (0..ch.y1_size()).any(|y| m1.get(a, b, y) * m1.get(a, b2, y) > 0.0);
                    assert_eq!(fam.g[a].has_edge(b, b2), hit);
                }
            }
        }
        for b in 0..ch.x2_size() {
            for a in 0..ch.x1_size() {
                for a2 in a + 1..ch.x1_size() {
                    let hit = (0..ch.y2_size()).any(|y| m2.get(a, b, y) * m2.get(a2, b, y) > 0.0);
                    assert_eq!(fam.h[b].has_edge(a, a2), hit);
                }
            }
        }
    }
}

#[test]
fn pentagon_round_trip() {
    assert_eq!(canonical_channel(&pentagon()).derive_confusion(), pentagon());
}

#[test]
fn same_adjacency_cases() {
    assert!(same_adjacency(&example1(0.2), &example1(0.8)).unwrap());
    assert!(!same_adjacency(&example1(0.5), &example1(0.0)).unwrap());
    assert!(same_adjacency(&example1(0.5), &example1(0.5)).unwrap());
    assert!(matches!(same_adjacency(&example1(0.5), &noiseless(2, 2)), Err(Error::SizeMismatch(_))));
}

#[test]
fn canonical_channel_cases() {
    let empty = ConfusionFamily::new(vec![Graph::empty(2); 3], vec![Graph::empty(3); 2]).unwrap();
    let ch = canonical_channel(&empty);
    for a in 0..3 {
        for b in 0..2 {
            let nz: Vec<f64> = ch.to_nested()[a][b].iter().flatten().copied().filter(|&v| v > 0.0).collect();
            assert_eq!(nz, vec![1.0], "noiseless rows are deterministic");
        }
    }
    assert!(same_adjacency(&canonical_channel(&example1(0.5).derive_confusion()), &example1(0.5)).unwrap());
    let full = ConfusionFamily::new(vec![Graph::complete(2); 2], vec![Graph::complete(2); 2]).unwrap();
    let ch = canonical_channel(&full);
    assert_eq!((ch.y1_size(), ch.y2_size()), (1, 1));
}

#[test]
fn round_trip_on_random_families() {
    let mut r = rng(5);
    for _ in 0..40 {
        let (m1, m2) = (1 + (r.next_u64() % 5) as usize, 1 + (r.next_u64() % 5) as usize);
        let fam = random_family(&mut r, m1, m2);
        assert_eq!(canonical_channel(&fam).derive_confusion(), fam);
    }
}

#[test]
fn confusion_depends_on_support_only() {
    let mut r = rng(8);
    for _ in 0..20 {
        let ch = random_channel(&mut r, 4);
        let mut nested = ch.to_nested();
        for row in nested.iter_mut().flatten() {
            let mut s = 0.0;
            for v in row.iter_mut().flatten() {
                if *v > 0.0 {
                    *v *= 1.0 + (r.next_u64() % 7) as f64;
                }
                s += *v;
            }
            for v in row.iter_mut().flatten() {
                *v /= s;
            }
        }
        let perturbed = Channel::from_nested(&nested).unwrap();
        assert_eq!(perturbed.derive_confusion(), ch.derive_confusion());
    }
}

use rand::RngCore;
