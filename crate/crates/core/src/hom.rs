//! Dual graph homomorphisms between confusion families.

use serde::{Deserialize, Serialize};

use crate::channel::ConfusionFamily;
use crate::code::{is_uniquely_decodable, CodebookPair};
use crate::{Error, Result};

/// `phi` maps `X1` (the vertices of every `H`) and `psi` maps `X2` (the vertices of every `G`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualHomomorphism {
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
}

impl DualHomomorphism {
    pub fn identity(fam: &ConfusionFamily) -> Self {
        DualHomomorphism { phi: (0..fam.x1_size()).collect(), psi: (0..fam.x2_size()).collect() }
    }
}

fn check_domains(d: &DualHomomorphism, src: &ConfusionFamily, dst: &ConfusionFamily) -> Result<()> {
    if d.phi.len() != src.x1_size() || d.psi.len() != src.x2_size() {
        return Err(Error::SizeMismatch("map domains do not match the source alphabets".into()));
    }
    if d.phi.iter().any(|&v| v >= dst.x1_size()) || d.psi.iter().any(|&v| v >= dst.x2_size()) {
        return Err(Error::SizeMismatch("map images fall outside the target alphabets".into()));
    }
    Ok(())
}

/// Both adjacency-preservation conditions: `v1 ~ v2` in `G_i` implies
/// `psi(v1) ~ psi(v2)` in `G'_{phi(i)}`, and `u1 ~ u2` in `H_j` implies
/// `phi(u1) ~ phi(u2)` in `H'_{psi(j)}`.
pub fn verify_dual_homomorphism(d: &DualHomomorphism, src: &ConfusionFamily, dst: &ConfusionFamily) -> Result<bool> {
    check_domains(d, src, dst)?;
    for (i, g) in src.g.iter().enumerate() {
        let target = &dst.g[d.phi[i]];
        if g.edges().iter().any(|&(v1, v2)| !target.has_edge(d.psi[v1], d.psi[v2])) {
            return Ok(false);
        }
    }
    for (j, h) in src.h.iter().enumerate() {
        let target = &dst.h[d.psi[j]];
        if h.edges().iter().any(|&(u1, u2)| !target.has_edge(d.phi[u1], d.phi[u2])) {
            return Ok(false);
        }
    }
    Ok(true)
}

const FIND_LIMIT: usize = 6;

struct Search<'a> {
    src: &'a ConfusionFamily,
    dst: &'a ConfusionFamily,
    phi: Vec<Option<usize>>,
    psi: Vec<Option<usize>>,
}

impl Search<'_> {
    /// Checks every constraint whose three variables are all assigned.
    fn consistent(&self) -> bool {
        for (i, g) in self.src.g.iter().enumerate() {
            let Some(pi) = self.phi[i] else { continue };
            for (v1, v2) in g.edges() {
                if let (Some(a), Some(b)) = (self.psi[v1], self.psi[v2]) {
                    if !self.dst.g[pi].has_edge(a, b) {
                        return false;
                    }
                }
            }
        }
        for (j, h) in self.src.h.iter().enumerate() {
            let Some(pj) = self.psi[j] else { continue };
            for (u1, u2) in h.edges() {
                if let (Some(a), Some(b)) = (self.phi[u1], self.phi[u2]) {
                    if !self.dst.h[pj].has_edge(a, b) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Assigns the next variable, alternating between the alphabets so that
    /// constraints bite early.
    fn run(&mut self) -> bool {
        let Some((is_phi, idx)) = self.next_slot() else { return true };
        let range = if is_phi { self.dst.x1_size() } else { self.dst.x2_size() };
        for v in 0..range {
            if is_phi {
                self.phi[idx] = Some(v);
            } else {
                self.psi[idx] = Some(v);
            }
            if self.consistent() && self.run() {
                return true;
            }
        }
        if is_phi {
            self.phi[idx] = None;
        } else {
            self.psi[idx] = None;
        }
        false
    }

    fn next_slot(&self) -> Option<(bool, usize)> {
        let a = self.phi.iter().position(Option::is_none);
        let b = self.psi.iter().position(Option::is_none);
        let na = self.phi.iter().filter(|v| v.is_some()).count();
        let nb = self.psi.iter().filter(|v| v.is_some()).count();
        match (a, b) {
            (Some(i), Some(j)) => Some(if na <= nb { (true, i) } else { (false, j) }),
            (Some(i), None) => Some((true, i)),
            (None, Some(j)) => Some((false, j)),
            (None, None) => None,
        }
    }
}

/// Searches for a dual homomorphism between the complemented families, which
/// witnesses `src ⪯ dst`.
pub fn find_dual_homomorphism(src: &ConfusionFamily, dst: &ConfusionFamily) -> Result<Option<DualHomomorphism>> {
    let sizes = [src.x1_size(), src.x2_size(), dst.x1_size(), dst.x2_size()];
    if sizes.iter().any(|&s| s > FIND_LIMIT) {
        return Err(Error::SizeLimit(format!("alphabets above {FIND_LIMIT}")));
    }
    let (cs, cd) = (src.complement(), dst.complement());
    let mut s = Search { src: &cs, dst: &cd, phi: vec![None; src.x1_size()], psi: vec![None; src.x2_size()] };
    if s.run() {
        Ok(Some(DualHomomorphism {
            phi: s.phi.into_iter().map(|v| v.expect("assigned")).collect(),
            psi: s.psi.into_iter().map(|v| v.expect("assigned")).collect(),
        }))
    } else {
        Ok(None)
    }
}

/// Symbol-wise image of a codebook pair under a dual homomorphism of the complements.
pub fn transport_codebook(d: &DualHomomorphism, pair: &CodebookPair, src: &ConfusionFamily, dst: &ConfusionFamily) -> Result<CodebookPair> {
    if !verify_dual_homomorphism(d, &src.complement(), &dst.complement())? {
        return Err(Error::Precondition("maps are not a dual homomorphism of the complemented families".into()));
    }
    if !is_uniquely_decodable(pair, src)?.ok {
        return Err(Error::Precondition("codebook pair is not uniquely decodable for the source family".into()));
    }
    let a: Vec<Vec<usize>> = pair.a.iter().map(|w| w.iter().map(|&s| d.phi[s]).collect()).collect();
    let b: Vec<Vec<usize>> = pair.b.iter().map(|w| w.iter().map(|&s| d.psi[s]).collect()).collect();
    let out = CodebookPair::new(pair.n, a, b).map_err(|_| Error::Internal("image codebook has repeated words".into()))?;
    Ok(out)
}
