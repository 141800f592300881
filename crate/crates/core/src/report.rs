//! Aggregated reports over a λ grid and their cross-checks.

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ConfusionFamily};
use crate::inner::{best_sub_alphabet, hull, max_random_coding, InnerMethod, InnerParams, InnerPoint};
use crate::oneshot::{independence_product, rho_lower_certificate, rho_upper_estimate, DualPair, RhoUpper};
use crate::outer::{outer_region, Method, OuterOptions, ProductDistribution};
use crate::Result;

pub const SCHEMA: &str = "twzec/1";
const TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OuterEntry {
    pub method: Method,
    pub value: f64,
    pub residual: f64,
    pub converged: bool,
    pub argmax: ProductDistribution,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerEntry {
    pub method: InnerMethod,
    pub value: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub outer: Vec<OuterEntry>,
    pub inner: Vec<InnerEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneShotBlock {
    pub pi: usize,
    pub witness: DualPair,
    pub log_pi: f64,
    pub rho_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_upper: Option<RhoUpper>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyViolation {
    pub lambda: f64,
    pub rule: String,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema: String,
    pub tool_version: String,
    pub channel_digest: String,
    pub seed: u64,
    pub minimize_q: bool,
    pub rows: Vec<LambdaRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oneshot: Option<OneShotBlock>,
    pub inner_points: Vec<InnerPoint>,
    pub outer_polygon: Vec<(f64, f64)>,
    pub inner_hull: Vec<(f64, f64)>,
    pub status: String,
    pub violations: Vec<ConsistencyViolation>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub lambdas: Vec<f64>,
    pub methods: Vec<Method>,
    pub minimize_q: bool,
    pub seed: u64,
    pub with_inner: bool,
    pub with_oneshot: bool,
    /// `None` skips the branching estimate of ρ.
    pub rho_branch_limit: Option<usize>,
    pub outer: OuterOptions,
}

impl ReportOptions {
    pub fn grid(n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5],
            _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Inner points worth reporting: the best random-coding sum rate, the best
/// sub-alphabet linear-code point per λ, and the one-shot pair.
pub fn inner_points(fam: &ConfusionFamily, lambdas: &[f64], opts: &OuterOptions) -> Result<Vec<InnerPoint>> {
    let mut pts = vec![max_random_coding(fam, opts)?];
    if fam.x1_size() <= crate::inner::SUB_ALPHABET_LIMIT && fam.x2_size() <= crate::inner::SUB_ALPHABET_LIMIT {
        for c in best_sub_alphabet(fam, lambdas)? {
            if !pts.contains(&c.point) {
                pts.push(c.point);
            }
        }
    }
    let (_, w) = independence_product(fam)?;
    pts.push(InnerPoint {
        r1: (w.s.len() as f64).log2(),
        r2: (w.t.len() as f64).log2(),
        method: InnerMethod::OneShot,
        parameters: InnerParams::Pair { s: w.s, t: w.t },
    });
    Ok(pts)
}

fn oneshot_block(fam: &ConfusionFamily, branch_limit: Option<usize>) -> Result<OneShotBlock> {
    let (pi, witness) = independence_product(fam)?;
    let cert = rho_lower_certificate(fam, &witness)?;
    let rho_upper = match branch_limit {
        Some(limit) if fam.x1_size() + fam.x2_size() <= 32 && fam.x1_size() * fam.x2_size() <= 64 => Some(rho_upper_estimate(fam, limit)?),
        _ => None,
    };
    Ok(OneShotBlock { pi, witness, log_pi: (pi as f64).log2(), rho_lower: cert.value, rho_upper })
}

pub fn build_report(q: &Channel, fam: &ConfusionFamily, digest: &str, opts: &ReportOptions) -> Result<BoundReport> {
    let (bounds, region) = outer_region(q, fam, &opts.lambdas, &opts.methods, opts.minimize_q, &opts.outer)?;
    let points = if opts.with_inner { inner_points(fam, &opts.lambdas, &opts.outer)? } else { Vec::new() };
    let rows = opts
        .lambdas
        .iter()
        .map(|&lambda| {
            let outer = bounds
                .iter()
                .filter(|b| b.lambda == lambda)
                .map(|b| OuterEntry { method: b.method, value: b.value, residual: b.residual, converged: b.converged, argmax: b.argmax.clone() })
                .collect();
            let mut inner: Vec<InnerEntry> = Vec::new();
            for p in &points {
                let v = p.weighted(lambda);
                match inner.iter_mut().find(|e| e.method == p.method) {
                    Some(e) if e.value >= v => {}
                    Some(e) => *e = InnerEntry { method: p.method, value: v, r1: p.r1, r2: p.r2 },
                    None => inner.push(InnerEntry { method: p.method, value: v, r1: p.r1, r2: p.r2 }),
                }
            }
            LambdaRow { lambda, outer, inner }
        })
        .collect();
    let oneshot = if opts.with_oneshot { Some(oneshot_block(fam, opts.rho_branch_limit)?) } else { None };
    let inner_hull = if points.is_empty() { Vec::new() } else { hull(&points.iter().map(|p| (p.r1, p.r2)).collect::<Vec<_>>()) };
    let mut report = BoundReport {
        schema: SCHEMA.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        channel_digest: digest.into(),
        seed: opts.seed,
        minimize_q: opts.minimize_q,
        rows,
        oneshot,
        inner_points: points,
        outer_polygon: region.vertices,
        inner_hull,
        status: String::new(),
        violations: Vec::new(),
    };
    report.violations = report_consistency(&report);
    report.status = if report.violations.is_empty() { "OK".into() } else { "CONSISTENCY-FAIL".into() };
    Ok(report)
}

/// Re-checks the dominance relations recorded in a report: every outer value
/// is at least every inner value at the same λ, and the max-min bound never
/// exceeds the min-max bound.
pub fn report_consistency(report: &BoundReport) -> Vec<ConsistencyViolation> {
    let mut out = Vec::new();
    for row in &report.rows {
        for o in &row.outer {
            for i in &row.inner {
                if i.value > o.value + TOL {
                    out.push(ConsistencyViolation {
                        lambda: row.lambda,
                        rule: format!("{} dominates {:?}", o.method.name(), i.method),
                        upper: o.value,
                        lower: i.value,
                    });
                }
            }
            if let Some(os) = &report.oneshot {
                let one = row.lambda * (os.witness.s.len() as f64).log2() + (1.0 - row.lambda) * (os.witness.t.len() as f64).log2();
                if one > o.value + TOL {
                    out.push(ConsistencyViolation { lambda: row.lambda, rule: format!("{} dominates one-shot", o.method.name()), upper: o.value, lower: one });
                }
            }
        }
        let get = |m: Method| row.outer.iter().find(|e| e.method == m).map(|e| e.value);
        if let (Some(t), Some(th)) = (get(Method::MinmaxT), get(Method::MaxminTheta)) {
            if th > t + TOL {
                out.push(ConsistencyViolation { lambda: row.lambda, rule: "max-min below min-max".into(), upper: t, lower: th });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn lowered_outer_value_is_flagged() {
        let k = Graph::complete(2);
        let e = Graph::empty(2);
        let fam = ConfusionFamily::new(vec![k.clone(), e.clone()], vec![k, e]).unwrap();
        let q = crate::channel::canonical_channel(&fam);
        let opts = ReportOptions {
            lambdas: vec![0.5],
            methods: vec![Method::MinmaxT, Method::MaxminTheta],
            minimize_q: false,
            seed: 0,
            with_inner: true,
            with_oneshot: true,
            rho_branch_limit: Some(16),
            outer: OuterOptions::default(),
        };
        let mut r = build_report(&q, &fam, "x", &opts).unwrap();
        assert!(report_consistency(&r).is_empty(), "{:?}", r.violations);
        r.rows[0].outer[0].value = 0.0;
        assert!(!report_consistency(&r).is_empty());
    }
}
