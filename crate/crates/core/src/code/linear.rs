//! Linear codes with detecting-vector sets, and the coset constructions built on them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gf::{all_words, GaloisField};
use super::{is_uniquely_decodable, CodebookPair};
use crate::channel::ConfusionFamily;
use crate::graph::Graph;
use crate::{h2, Error, Result};

/// Largest detector set that is materialised as a word list.
pub const MATERIALIZE_LIMIT: usize = 1 << 20;
/// Rank tests allowed for the exhaustive generator search.
const EXHAUSTIVE_LIMIT: f64 = (1u64 << 24) as f64;
const RESTARTS: usize = 10_000;

/// A `k×n` generator over `GF(q)` together with the words over a `q′`-ary
/// alphabet whose `d_set`-positions form an information set of the code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearCodePair {
    pub q: usize,
    pub qprime: usize,
    pub n: usize,
    pub k: usize,
    pub generator: Vec<Vec<usize>>,
    pub d_set: Vec<usize>,
    /// Sorted `k`-subsets of columns on which the generator is invertible.
    pub info_sets: Vec<Vec<usize>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn info_sets(field: &GaloisField, gen: &[Vec<usize>], subsets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    subsets.iter().filter(|c| field.columns_independent(gen, c)).cloned().collect()
}

impl LinearCodePair {
    pub fn tau(&self) -> usize {
        self.d_set.len()
    }

    /// `|Υ(𝒞)|`: each information set admits `τ^k (q′−τ)^{n−k}` words.
    pub fn detector_count(&self) -> f64 {
        let tau = self.tau() as f64;
        self.info_sets.len() as f64 * tau.powi(self.k as i32) * (self.qprime as f64 - tau).powi((self.n - self.k) as i32)
    }

    /// Exact double-counting average of `|Υ|` over all full-rank generators:
    /// `C(n,k) τ^k (q′−τ)^{n−k} Π_{i=1..k}(1 − q^{−i})`.
    pub fn guarantee(&self) -> f64 {
        size_guarantee(self.q, self.qprime, self.n, self.k, self.tau())
    }

    pub fn is_detector(&self, x: &[usize]) -> bool {
        if x.len() != self.n || x.iter().any(|&s| s >= self.qprime) {
            return false;
        }
        let idx: Vec<usize> = (0..self.n).filter(|&i| self.d_set.contains(&x[i])).collect();
        self.info_sets.binary_search(&idx).is_ok()
    }

    /// `Υ(𝒞)` in lexicographic order.
    pub fn detectors(&self) -> Result<Vec<Vec<usize>>> {
        if self.detector_count() > MATERIALIZE_LIMIT as f64 {
            return Err(Error::SizeLimit(format!("{} detector words", self.detector_count())));
        }
        let others: Vec<usize> = (0..self.qprime).filter(|s| !self.d_set.contains(s)).collect();
        let mut out = Vec::new();
        for set in &self.info_sets {
            let rest: Vec<usize> = (0..self.n).filter(|i| !set.contains(i)).collect();
            for inside in all_words(self.d_set.len(), self.k) {
                for outside in all_words(others.len(), self.n - self.k) {
                    let mut w = vec![0; self.n];
                    for (&pos, &d) in set.iter().zip(&inside) {
                        w[pos] = self.d_set[d];
                    }
                    for (&pos, &o) in rest.iter().zip(&outside) {
                        w[pos] = others[o];
                    }
                    out.push(w);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// All `q^k` codewords in message order.
    pub fn codewords(&self) -> Result<Vec<Vec<usize>>> {
        let f = GaloisField::new(self.q)?;
        Ok(all_words(self.q, self.k).iter().map(|u| f.encode(u, &self.generator)).collect())
    }

    /// Rank and information-set invariants.
    pub fn validate(&self) -> Result<()> {
        let f = GaloisField::new(self.q)?;
        if self.generator.len() != self.k || self.generator.iter().any(|r| r.len() != self.n) {
            return Err(Error::SizeMismatch("generator shape".into()));
        }
        if f.rank(&self.generator) != self.k {
            return Err(Error::Precondition("generator is rank deficient".into()));
        }
        let expect = info_sets(&f, &self.generator, &k_subsets(self.n, self.k));
        if expect != self.info_sets {
            return Err(Error::Internal("stale information sets".into()));
        }
        Ok(())
    }
}

/// See [`LinearCodePair::guarantee`].
pub fn size_guarantee(q: usize, qprime: usize, n: usize, k: usize, tau: usize) -> f64 {
    let frac: f64 = (1..=k).map(|i| 1.0 - (q as f64).powi(-(i as i32))).product();
    binomial(n, k) * (tau as f64).powi(k as i32) * (qprime as f64 - tau as f64).powi((n - k) as i32) * frac
}

/// The size bound in its printed form, with the product over the detector alphabet.
pub fn printed_guarantee(qprime: usize, n: usize, k: usize, tau: usize) -> f64 {
    let frac: f64 = (1..=64).map(|i| 1.0 - (qprime as f64).powi(-i)).product();
    binomial(n, k) * (tau as f64).powi(k as i32) * (qprime as f64 - tau as f64).powi((n - k) as i32) * frac
}

/// Generator (entries from `alphabet`, which must be closed under the field
/// operations) with the most information sets. Row operations do not change
/// the information sets, so the exhaustive mode walks reduced row echelon forms.
fn search_generator(field: &GaloisField, alphabet: &[usize], n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let subsets = k_subsets(n, k);
    let full = subsets.len();
    let a = alphabet.len() as f64;
    let free = |piv: &[usize]| -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for (i, &p) in piv.iter().enumerate() {
            for c in p + 1..n {
                if !piv.contains(&c) {
                    cells.push((i, c));
                }
            }
        }
        cells
    };
    let total: f64 = subsets.iter().map(|p| a.powi(free(p).len() as i32)).sum();
    let mut best: (usize, Vec<Vec<usize>>) = (0, Vec::new());
    let consider = |g: Vec<Vec<usize>>, best: &mut (usize, Vec<Vec<usize>>)| -> bool {
        let c = subsets.iter().filter(|s| field.columns_independent(&g, s)).count();
        if c > best.0 {
            *best = (c, g);
        }
        best.0 == full
    };
    if total * full as f64 <= EXHAUSTIVE_LIMIT {
        'outer: for piv in &subsets {
            let cells = free(piv);
            for fill in all_words(alphabet.len(), cells.len()) {
                let mut g = vec![vec![0; n]; k];
                for (i, &p) in piv.iter().enumerate() {
                    g[i][p] = 1;
                }
                for (&(i, c), &v) in cells.iter().zip(&fill) {
                    g[i][c] = alphabet[v];
                }
                if consider(g, &mut best) {
                    break 'outer;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RESTARTS {
            let g: Vec<Vec<usize>> = (0..k).map(|_| (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()).collect();
            if field.rank(&g) == k && consider(g, &mut best) {
                break;
            }
        }
    }
    best.1
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    Ok(())
}

/// Finds a linear code over `GF(q)` whose detector set over the `q′`-ary
/// alphabet with detecting symbols `d_set` meets the double-counting guarantee.
pub fn lemma8_search(q: usize, qprime: usize, n: usize, k: usize, d_set: &[usize], seed: u64) -> Result<LinearCodePair> {
    check_dims(n, k)?;
    let field = GaloisField::new(q)?;
    let mut d: Vec<usize> = d_set.to_vec();
    d.sort_unstable();
    d.dedup();
    if qprime == 0 || d.iter().any(|&s| s >= qprime) {
        return Err(Error::Precondition("detecting symbols outside the alphabet".into()));
    }
    let alphabet: Vec<usize> = (0..q).collect();
    let generator = search_generator(&field, &alphabet, n, k, seed);
    if generator.is_empty() {
        return Err(Error::Budget("no full-rank generator found".into()));
    }
    let sets = info_sets(&field, &generator, &k_subsets(n, k));
    let pair = LinearCodePair { q, qprime, n, k, generator, d_set: d, info_sets: sets };
    if pair.detector_count() + 1e-9 < pair.guarantee() {
        return Err(Error::Budget(format!("best detector set {} below guarantee {}", pair.detector_count(), pair.guarantee())));
    }
    Ok(pair)
}

/// Groups `words` by their coset of the row space of `gen` and keeps the
/// largest group (ties: least canonical leader).
fn best_coset(field: &GaloisField, gen: &[Vec<usize>], words: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut rows = gen.to_vec();
    let piv = field.rref(&mut rows);
    let mut groups: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    for w in words {
        groups.entry(field.coset_leader(&w, &rows, &piv)).or_default().push(w);
    }
    let mut best: Vec<Vec<usize>> = Vec::new();
    for (_, g) in groups {
        if g.len() > best.len() {
            best = g;
        }
    }
    best.sort();
    best
}

/// Codebook pair from two linear codes: `pair1` is a code over `X1 = GF(q1)`
/// with detectors over `X2`, `pair2` the other way round. Alice's book is the
/// largest intersection of `Υ(𝒞2)` with a coset of `𝒞1`, and symmetrically.
pub fn theorem6_combine(pair1: &LinearCodePair, pair2: &LinearCodePair) -> Result<CodebookPair> {
    if pair1.n != pair2.n || pair1.q != pair2.qprime || pair1.qprime != pair2.q {
        return Err(Error::Precondition("code pairs do not have mirrored alphabets and a common length".into()));
    }
    let f1 = GaloisField::new(pair1.q)?;
    let f2 = GaloisField::new(pair2.q)?;
    let a = best_coset(&f1, &pair1.generator, pair2.detectors()?);
    let b = best_coset(&f2, &pair2.generator, pair1.detectors()?);
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("a detector set is empty".into()));
    }
    CodebookPair::new(pair1.n, a, b)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem8Output {
    pub pair: CodebookPair,
    #[serde(skip)]
    pub family: ConfusionFamily,
    pub generator: Vec<Vec<usize>>,
    pub phi: Vec<usize>,
    pub target_rate: f64,
    pub sum_rate: f64,
}

/// The family `[K̄_q, G; K̄_2, …, K̄_2]` where the cliques of `G` are the fibres of `phi`.
pub fn fibre_family(phi: &[usize]) -> ConfusionFamily {
    let q = phi.len();
    let mut g = Graph::empty(q);
    for x in 0..q {
        for y in x + 1..q {
            if phi[x] == phi[y] {
                g.add_edge(x, y);
            }
        }
    }
    ConfusionFamily::new(vec![Graph::empty(q), g], vec![Graph::empty(2); q]).expect("consistent sizes")
}

/// Coset construction for channels that are noiseless from Alice to Bob and
/// let Alice see Bob's symbol only through `phi = Tr_{q/s}` when she sends 1.
pub fn theorem8_construct(q: usize, s: usize, n: usize, k: usize, seed: u64) -> Result<Theorem8Output> {
    check_dims(n, k)?;
    let field = GaloisField::new(q)?;
    let (sub, phi): (Vec<usize>, Vec<usize>) = if s == 1 {
        let p = field.characteristic();
        (field.subfield(p).expect("prime subfield"), vec![0; q])
    } else {
        let sub = field.subfield(s).ok_or_else(|| Error::Precondition(format!("GF({s}) is not a subfield of GF({q})")))?;
        let phi = (0..q).map(|x| field.trace(s, x)).collect::<Result<Vec<_>>>()?;
        (sub, phi)
    };
    let generator = search_generator(&field, &sub, n, k, seed);
    let sets = info_sets(&field, &generator, &k_subsets(n, k));
    // Alice: zeros exactly on an information set
    let mut a: Vec<Vec<usize>> = sets.iter().map(|set| (0..n).map(|i| usize::from(!set.contains(&i))).collect()).collect();
    a.sort();
    // Bob: lifts of the quotient GF(s)^n / Ψ(𝒞), each shifted over all of 𝒞
    let mut rows = generator.clone();
    let piv = field.rref(&mut rows);
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    let reps: Vec<Vec<usize>> = if s == 1 {
        vec![vec![0; n]]
    } else {
        let omega = (0..q).find(|&w| phi[w] == 1).ok_or_else(|| Error::Internal("trace is not onto".into()))?;
        all_words(sub.len(), free.len())
            .into_iter()
            .map(|fill| {
                let mut v = vec![0; n];
                for (&c, &y) in free.iter().zip(&fill) {
                    v[c] = field.mul(sub[y], omega);
                }
                v
            })
            .collect()
    };
    let code: Vec<Vec<usize>> = all_words(q, k).iter().map(|u| field.encode(u, &generator)).collect();
    let mut b = Vec::with_capacity(reps.len() * code.len());
    for r in &reps {
        for c in &code {
            b.push(r.iter().zip(c).map(|(&x, &y)| field.add(x, y)).collect::<Vec<usize>>());
        }
    }
    b.sort();
    let pair = CodebookPair::new(n, a, b)?;
    let family = fibre_family(&phi);
    if !is_uniquely_decodable(&pair, &family)?.ok {
        return Err(Error::Internal("constructed pair is not uniquely decodable".into()));
    }
    let r = k as f64 / n as f64;
    let target_rate = r * (q as f64).log2() + (1.0 - r) * (s as f64).log2() + h2(r);
    let (r1, r2) = pair.rates();
    Ok(Theorem8Output { pair, family, generator, phi, target_rate, sum_rate: r1 + r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_length_code_detects_all_d_words() {
        let p = lemma8_search(2, 2, 3, 3, &[1], 0).unwrap();
        assert_eq!(p.detectors().unwrap(), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn small_binary_search_meets_guarantee() {
        let p = lemma8_search(2, 2, 3, 2, &[0], 0).unwrap();
        assert!(p.detector_count() >= p.guarantee());
        p.validate().unwrap();
        for x in p.detectors().unwrap() {
            assert!(p.is_detector(&x));
            assert!(super::super::detecting_vector_check(&x, &p.codewords().unwrap(), &p.d_set).unwrap());
        }
    }

    #[test]
    fn theorem8_degenerate_cases() {
        let one = theorem8_construct(4, 1, 3, 2, 0).unwrap();
        assert_eq!(one.pair.b.len(), 16);
        let full = theorem8_construct(4, 4, 3, 2, 0).unwrap();
        assert_eq!(full.pair.b.len(), 64);
    }
}
