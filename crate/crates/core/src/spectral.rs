//! Computable points of the asymptotic spectrum of graphs and the outer bounds
//! they give for channels that are noiseless in one direction.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::ConfusionFamily;
use crate::graph::{enumerate_cliques, independence_number, Graph};
use crate::numerics::{solve_lp, solve_sdp, LpProblem, Relation, SdpOptions, SdpProblem, SparseSym};
use crate::{Error, Result};

pub const THETA_LIMIT: usize = 64;
pub const EXACT_FCC_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralPoint {
    LovaszTheta,
    FractionalCliqueCover,
}

impl SpectralPoint {
    pub const ALL: [SpectralPoint; 2] = [SpectralPoint::LovaszTheta, SpectralPoint::FractionalCliqueCover];

    pub fn name(self) -> &'static str {
        match self {
            SpectralPoint::LovaszTheta => "lovasz-theta",
            SpectralPoint::FractionalCliqueCover => "fractional-clique-cover",
        }
    }

    pub fn evaluate(self, g: &Graph) -> Result<f64> {
        match self {
            SpectralPoint::LovaszTheta => lovasz_theta(g),
            SpectralPoint::FractionalCliqueCover => fractional_clique_cover(g),
        }
    }
}

/// Lovász theta number, `max <J,X>` over `tr X = 1`, `X_uv = 0` on edges, `X ⪰ 0`.
/// The returned number is the dual objective after repairing the dual slack to
/// be PSD, so it is an upper bound up to rounding.
pub fn lovasz_theta(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n > THETA_LIMIT {
        return Err(Error::SizeLimit(format!("theta on {n} vertices")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if g.is_edgeless() {
        return Ok(n as f64);
    }
    if g.is_complete() {
        return Ok(1.0);
    }
    let mut a = vec![SparseSym::diag_range(0, n)];
    let mut b = vec![1.0];
    for (u, v) in g.edges() {
        a.push(SparseSym::entry(u, v, 1.0));
        b.push(0.0);
    }
    let mut shift = vec![0.0; a.len()];
    shift[0] = 1.0;
    let prob = SdpProblem { n, c: -DMatrix::from_element(n, n, 1.0), a, b };
    let sol = solve_sdp(&prob, SdpOptions { tol: 1e-8, ..SdpOptions::default() });
    if !sol.converged {
        return Err(Error::NoConvergence(format!(
            "theta: gap {:.2e}, primal {:.2e}, dual {:.2e}",
            sol.gap, sol.primal_infeasibility, sol.dual_infeasibility
        )));
    }
    Ok(-prob.certified_dual(&sol.y, &shift))
}

fn cover_lp<T: crate::numerics::lp::Scalar>(g: &Graph) -> LpProblem<T> {
    let cliques = enumerate_cliques(g, true);
    let mut lp = LpProblem::new(vec![T::one(); cliques.len()]);
    for v in 0..g.n() {
        let row = cliques.iter().map(|c| if c.contains(&v) { T::one() } else { T::zero() }).collect();
        lp.push(row, Relation::Ge, T::one());
    }
    lp
}

/// Exact fractional clique cover number for graphs with at most 12 vertices.
pub fn fractional_clique_cover_exact(g: &Graph) -> Result<BigRational> {
    if g.n() > EXACT_FCC_LIMIT {
        return Err(Error::SizeLimit(format!("exact clique cover on {} vertices", g.n())));
    }
    if g.n() == 0 {
        return Ok(BigRational::zero());
    }
    Ok(solve_lp(&cover_lp::<BigRational>(g))?.value)
}

/// Fractional clique cover number: the covering LP over maximal cliques.
pub fn fractional_clique_cover(g: &Graph) -> Result<f64> {
    if g.n() <= EXACT_FCC_LIMIT {
        let v = fractional_clique_cover_exact(g)?;
        return v.to_f64().ok_or_else(|| Error::Internal("rational overflow".into()));
    }
    Ok(solve_lp(&cover_lp::<f64>(g))?.value)
}

/// Smallest available spectral point of `g` and which one attained it.
pub fn min_spectral_value(g: &Graph) -> Result<(f64, SpectralPoint)> {
    let mut best = (f64::INFINITY, SpectralPoint::LovaszTheta);
    for p in SpectralPoint::ALL {
        let v = p.evaluate(g)?;
        if v < best.0 {
            best = (v, p);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CapacitySandwich {
    pub lower: f64,
    pub upper: f64,
    pub witness_power: usize,
}

/// Brackets the Shannon capacity between `max_k (1/k) log α(g^k)` and the log of
/// the smallest spectral point.
pub fn capacity_sandwich(g: &Graph, max_power: usize) -> Result<CapacitySandwich> {
    if g.n() == 0 {
        return Err(Error::Precondition("empty graph".into()));
    }
    let mut lower = f64::NEG_INFINITY;
    let mut witness_power = 1;
    for k in 1..=max_power.max(1) {
        let gk = g.strong_power(k)?;
        let (a, _) = independence_number(&gk)?;
        let v = (a as f64).log2() / k as f64;
        if v > lower + 1e-12 {
            lower = v;
            witness_power = k;
        }
    }
    let (u, _) = min_spectral_value(g)?;
    Ok(CapacitySandwich { lower, upper: u.log2(), witness_power })
}

/// `log Σ_{x1} η(G_{x1})`, minimised over the available spectral points, for
/// families whose `H` graphs are all edgeless.
pub fn noiseless_direction_bound(fam: &ConfusionFamily) -> Result<f64> {
    if fam.h.iter().any(|h| !h.is_edgeless()) {
        return Err(Error::Precondition("every H graph must be edgeless".into()));
    }
    let mut best = f64::INFINITY;
    for p in SpectralPoint::ALL {
        let mut s = 0.0;
        for g in &fam.g {
            s += p.evaluate(g)?;
        }
        best = best.min(s.log2());
    }
    Ok(best)
}

/// `log(|X2| + U)` where `U` is the smallest spectral point of `g`.
pub fn kg_kk_bound(x2_size: usize, g: &Graph) -> Result<f64> {
    if g.n() != x2_size {
        return Err(Error::SizeMismatch(format!("graph has {} vertices, expected {x2_size}", g.n())));
    }
    let (u, _) = min_spectral_value(g)?;
    Ok((x2_size as f64 + u).log2())
}

/// Rational as `p/q` text, or an integer when the denominator is one.
pub fn ratio_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert!((lovasz_theta(&Graph::cycle(5)).unwrap() - 5f64.sqrt()).abs() < 1e-6);
        assert!((lovasz_theta(&Graph::path(3)).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn fcc_pentagon_is_five_halves() {
        let r = fractional_clique_cover_exact(&Graph::cycle(5)).unwrap();
        assert_eq!(ratio_string(&r), "5/2");
    }

    #[test]
    fn sandwich_pentagon() {
        let s = capacity_sandwich(&Graph::cycle(5), 2).unwrap();
        assert!((s.lower - 0.5 * 5f64.log2()).abs() < 1e-12);
        assert!((s.upper - s.lower).abs() < 1e-6);
        assert_eq!(s.witness_power, 2);
    }

    #[test]
    fn pentagon_corollary() {
        assert!((kg_kk_bound(5, &Graph::cycle(5)).unwrap() - 2.8552).abs() < 1e-4);
    }
}
