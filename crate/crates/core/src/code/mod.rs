//! Codebook pairs: verification of unique decodability, exhaustive search at
//! short blocklength, and algebraic constructions over finite fields.

pub mod gf;
pub mod linear;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::channel::ConfusionFamily;
use crate::graph::{independence_in, list_of, Graph};
use crate::{Error, Result};

pub use gf::{prime_power, GaloisField};
pub use linear::{lemma8_search, theorem6_combine, theorem8_construct, LinearCodePair, Theorem8Output};

/// Codebooks `a ⊆ X1^n` and `b ⊆ X2^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookPair {
    pub n: usize,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

impl CodebookPair {
    pub fn new(n: usize, a: Vec<Vec<usize>>, b: Vec<Vec<usize>>) -> Result<CodebookPair> {
        if n == 0 {
            return Err(Error::Precondition("blocklength must be positive".into()));
        }
        for (name, book) in [("a", &a), ("b", &b)] {
            if book.is_empty() {
                return Err(Error::Precondition(format!("codebook {name} is empty")));
            }
            if book.iter().any(|w| w.len() != n) {
                return Err(Error::SizeMismatch(format!("codebook {name} has a word of the wrong length")));
            }
            let distinct: HashSet<&Vec<usize>> = book.iter().collect();
            if distinct.len() != book.len() {
                return Err(Error::Precondition(format!("codebook {name} repeats a word")));
            }
        }
        Ok(CodebookPair { n, a, b })
    }

    /// `(log|a|/n, log|b|/n)` in bits.
    pub fn rates(&self) -> (f64, f64) {
        ((self.a.len() as f64).log2() / self.n as f64, (self.b.len() as f64).log2() / self.n as f64)
    }

    pub fn product(&self) -> usize {
        self.a.len() * self.b.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Two words of `b` that some word of `a` cannot tell apart.
    Alice,
    /// Two words of `a` that some word of `b` cannot tell apart.
    Bob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub side: Side,
    pub fixed: Vec<usize>,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decodability {
    pub ok: bool,
    pub witness: Option<Violation>,
}

/// Whether `u` and `v` are adjacent or equal in every coordinate graph.
fn confusable_words(graphs: &[Graph], fixed: &[usize], u: &[usize], v: &[usize]) -> bool {
    fixed.iter().zip(u.iter().zip(v)).all(|(&f, (&x, &y))| x == y || graphs[f].has_edge(x, y))
}

/// Checks that every word of one book separates every two words of the other.
pub fn is_uniquely_decodable(pair: &CodebookPair, fam: &ConfusionFamily) -> Result<Decodability> {
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    if pair.a.iter().flatten().any(|&s| s >= m1) || pair.b.iter().flatten().any(|&s| s >= m2) {
        return Err(Error::SizeMismatch("codeword symbol outside its alphabet".into()));
    }
    for (side, fixed_book, other, graphs) in [(Side::Alice, &pair.a, &pair.b, &fam.g), (Side::Bob, &pair.b, &pair.a, &fam.h)] {
        for f in fixed_book {
            for i in 0..other.len() {
                for j in i + 1..other.len() {
                    if confusable_words(graphs, f, &other[i], &other[j]) {
                        let witness = Violation { side, fixed: f.clone(), first: other[i].clone(), second: other[j].clone() };
                        return Ok(Decodability { ok: false, witness: Some(witness) });
                    }
                }
            }
        }
    }
    Ok(Decodability { ok: true, witness: None })
}

/// True iff projecting `code` onto the coordinates where `x` carries a symbol
/// of `d_set` is injective.
pub fn detecting_vector_check(x: &[usize], code: &[Vec<usize>], d_set: &[usize]) -> Result<bool> {
    if code.iter().any(|w| w.len() != x.len()) {
        return Err(Error::SizeMismatch("word lengths differ".into()));
    }
    let idx: Vec<usize> = (0..x.len()).filter(|&i| d_set.contains(&x[i])).collect();
    let proj: HashSet<Vec<usize>> = code.iter().map(|w| idx.iter().map(|&i| w[i]).collect()).collect();
    Ok(proj.len() == code.len())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub pair: CodebookPair,
    /// False if the node budget stopped the search; the pair is then best found.
    pub complete: bool,
    pub nodes: usize,
}

pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

struct Exhaustive {
    /// `other_conf[i][v]`: other-side words confusable with `v` under searched word `i`.
    other_conf: Vec<Vec<u64>>,
    /// `fixed_conf[j][w]`: searched-side words confusable with `w` under other-side word `j`.
    fixed_conf: Vec<Vec<u64>>,
    n_side: usize,
    n_other: usize,
    budget: usize,
    nodes: usize,
    best: (usize, u64, u64),
    exhausted: bool,
}

impl Exhaustive {
    /// Words of the other side that tolerate the current chosen set.
    fn evaluate(&self, chosen: u64, adm: u64) -> (usize, u64) {
        // union of the confusion graphs of the chosen words, on the other side
        let mut adj = vec![0u64; self.n_other];
        for i in list_of(chosen) {
            for (v, row) in adj.iter_mut().enumerate() {
                *row |= self.other_conf[i][v];
            }
        }
        let g = Graph::from_masks(self.n_other, adj);
        independence_in(&g, adm)
    }

    fn dfs(&mut self, chosen: u64, count: usize, next: usize, adm: u64) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let (alpha, set) = self.evaluate(chosen, adm);
        if count * alpha > self.best.0 {
            self.best = (count * alpha, chosen, set);
        }
        let cands: Vec<usize> = (next..self.n_side)
            .filter(|&w| {
                // some admissible word must still separate w from every chosen word
                list_of(adm).into_iter().any(|j| self.fixed_conf[j][w] & chosen == 0)
            })
            .collect();
        if (count + cands.len()) * alpha <= self.best.0 {
            return;
        }
        for (pos, &w) in cands.iter().enumerate() {
            if (count + cands.len() - pos) * alpha <= self.best.0 || self.exhausted {
                return;
            }
            let nadm = list_of(adm).into_iter().filter(|&j| self.fixed_conf[j][w] & chosen == 0).fold(0u64, |m, j| m | (1u64 << j));
            self.dfs(chosen | (1u64 << w), count + 1, w + 1, nadm);
        }
    }
}

/// Strong-product confusion masks: `conf[f][u]` holds the words confusable with
/// `words[u]` when the other side sends `fixed_words[f]`.
fn product_confusion(graphs: &[Graph], fixed_words: &[Vec<usize>], words: &[Vec<usize>]) -> Vec<Vec<u64>> {
    fixed_words
        .iter()
        .map(|f| {
            words
                .iter()
                .enumerate()
                .map(|(ui, u)| {
                    words.iter().enumerate().filter(|&(vi, v)| vi != ui && confusable_words(graphs, f, u, v)).fold(0u64, |m, (vi, _)| m | (1u64 << vi))
                })
                .collect()
        })
        .collect()
}

/// Maximises `|a|·|b|` over uniquely decodable pairs of blocklength `n` by
/// branch and bound. Both word sets must have at most 64 elements.
pub fn exhaustive_best_pair(fam: &ConfusionFamily, n: usize, node_budget: usize) -> Result<SearchResult> {
    let (m1, m2) = (fam.x1_size(), fam.x2_size());
    let w1 = (m1 as u64).checked_pow(n as u32).filter(|&v| v <= 64);
    let w2 = (m2 as u64).checked_pow(n as u32).filter(|&v| v <= 64);
    let (Some(w1), Some(w2)) = (w1, w2) else {
        return Err(Error::SizeLimit("exhaustive search needs at most 64 words per side".into()));
    };
    if n == 0 {
        return Err(Error::Precondition("blocklength must be positive".into()));
    }
    let words1 = gf::all_words(m1, n);
    let words2 = gf::all_words(m2, n);
    // search over the side with fewer words
    let swap = w2 < w1;
    let (side_words, other_words, side_graphs, other_graphs) =
        if swap { (&words2, &words1, &fam.h, &fam.g) } else { (&words1, &words2, &fam.g, &fam.h) };
    let mut ex = Exhaustive {
        other_conf: product_confusion(side_graphs, side_words, other_words),
        fixed_conf: product_confusion(other_graphs, other_words, side_words),
        n_side: side_words.len(),
        n_other: other_words.len(),
        budget: node_budget,
        nodes: 0,
        best: (0, 0, 0),
        exhausted: false,
    };
    let all_other = if ex.n_other == 64 { u64::MAX } else { (1u64 << ex.n_other) - 1 };
    ex.dfs(0, 0, 0, all_other);
    let (_, chosen, set) = ex.best;
    let side: Vec<Vec<usize>> = list_of(chosen).into_iter().map(|i| side_words[i].clone()).collect();
    let other: Vec<Vec<usize>> = list_of(set).into_iter().map(|i| other_words[i].clone()).collect();
    let (a, b) = if swap { (other, side) } else { (side, other) };
    Ok(SearchResult { pair: CodebookPair::new(n, a, b)?, complete: !ex.exhausted, nodes: ex.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bmc() -> ConfusionFamily {
        let k = Graph::complete(2);
        let e = Graph::empty(2);
        ConfusionFamily::new(vec![k.clone(), e.clone()], vec![k, e]).unwrap()
    }

    #[test]
    fn singletons_always_decode() {
        let p = CodebookPair::new(2, vec![vec![0, 1]], vec![vec![1, 1]]).unwrap();
        assert!(is_uniquely_decodable(&p, &bmc()).unwrap().ok);
    }

    #[test]
    fn confusable_pair_reports_witness() {
        let p = CodebookPair::new(1, vec![vec![0]], vec![vec![0], vec![1]]).unwrap();
        let d = is_uniquely_decodable(&p, &bmc()).unwrap();
        assert!(!d.ok);
        assert_eq!(d.witness.unwrap().side, Side::Alice);
    }

    #[test]
    fn bmc_search() {
        let r1 = exhaustive_best_pair(&bmc(), 1, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r1.pair.product(), 2);
        let r2 = exhaustive_best_pair(&bmc(), 2, DEFAULT_NODE_BUDGET).unwrap();
        assert!(r2.complete && r2.pair.product() >= 4);
        assert!(is_uniquely_decodable(&r2.pair, &bmc()).unwrap().ok);
    }

    #[test]
    fn detecting_vectors() {
        let code = vec![vec![0, 0], vec![1, 1]];
        assert!(detecting_vector_check(&[0, 1], &code, &[0]).unwrap());
        assert!(!detecting_vector_check(&[1, 1], &code, &[0]).unwrap());
    }
}
