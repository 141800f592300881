mod common;

use common::*;
use proptest::prelude::*;
use twzec::inner::InnerMethod;
use twzec::outer::{Method, OuterOptions};
use twzec::report::*;

fn opts(lambdas: Vec<f64>) -> ReportOptions {
    ReportOptions {
        lambdas,
        methods: Method::ALL.to_vec(),
        minimize_q: false,
        seed: 0,
        with_inner: true,
        with_oneshot: true,
        rho_branch_limit: Some(16),
        outer: OuterOptions::default(),
    }
}

fn bmc_report() -> BoundReport {
    let fam = bmc();
    build_report(&canonical(&fam), &fam, "digest", &opts(ReportOptions::grid(3))).unwrap()
}

#[test]
fn clean_report_has_no_violations() {
    let r = bmc_report();
    assert_eq!(r.schema, "twzec/1");
    assert_eq!(r.status, "OK");
    assert!(report_consistency(&r).is_empty());
    assert_eq!(r.rows.len(), 3);
    assert!(r.rows.iter().all(|row| row.outer.len() == 4));
    assert!(r.oneshot.as_ref().is_some_and(|o| o.pi == 2));
}

#[test]
fn lowered_outer_value_gives_one_violation() {
    let mut r = bmc_report();
    let row = &mut r.rows[1];
    let k = row.outer.iter().position(|o| o.method == Method::ShannonEps).unwrap();
    row.outer[k].value = -1.0;
    let v = report_consistency(&r);
    let hits: Vec<_> = v.iter().filter(|v| v.rule.starts_with("shannon-eps")).collect();
    assert!(!hits.is_empty());
    assert!(hits.iter().all(|h| h.lambda == 0.5 && h.upper == -1.0));
}

#[test]
fn inner_point_above_outer_is_flagged() {
    let mut r = bmc_report();
    r.rows[0].inner.push(InnerEntry { method: InnerMethod::LinearCodes, value: 10.0, r1: 10.0, r2: 10.0 });
    let v = report_consistency(&r);
    assert_eq!(v.len(), 4);
    assert!(v.iter().all(|x| x.lambda == 0.0 && x.lower == 10.0));
}

#[test]
fn maxmin_above_minmax_is_flagged() {
    let mut r = bmc_report();
    let row = &mut r.rows[2];
    let t = row.outer.iter().find(|o| o.method == Method::MinmaxT).unwrap().value;
    row.outer.iter_mut().find(|o| o.method == Method::MaxminTheta).unwrap().value = t + 0.1;
    assert!(report_consistency(&r).iter().any(|v| v.rule == "max-min below min-max"));
}

#[test]
fn report_round_trips_through_json() {
    let r = bmc_report();
    let text = serde_json::to_string(&r).unwrap();
    let back: BoundReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn grid_spacing() {
    assert!(ReportOptions::grid(0).is_empty());
    assert_eq!(ReportOptions::grid(1), vec![0.5]);
    assert_eq!(ReportOptions::grid(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_reports_are_consistent(seed in any::<u64>(), m1 in 1usize..4, m2 in 1usize..4) {
        let fam = random_family(&mut rng(seed), m1, m2);
        let r = build_report(&canonical(&fam), &fam, "d", &opts(vec![0.0, 0.5, 1.0])).unwrap();
        prop_assert!(r.violations.is_empty(), "{:?}", r.violations);
        prop_assert_eq!(r.status.as_str(), "OK");
    }
}
