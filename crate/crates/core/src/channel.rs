//! Two-way channels, their conditional marginals and confusion-graph families.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::graph::{enumerate_cliques, Graph};
use crate::{Error, Result};

/// Entries above this count as positive.
pub const SUPPORT_EPS: f64 = 1e-12;
const ROW_TOL: f64 = 1e-12;

/// `P(y1, y2 | x1, x2)` stored flat in `(x1, x2, y1, y2)` row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    x1: usize,
    x2: usize,
    y1: usize,
    y2: usize,
    prob: Vec<f64>,
}

/// A conditional table `P(y | x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondTable {
    pub x1: usize,
    pub x2: usize,
    pub y: usize,
    data: Vec<f64>,
}

impl CondTable {
    pub fn new(x1: usize, x2: usize, y: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != x1 * x2 * y {
            return Err(Error::SizeMismatch("conditional table length".into()));
        }
        Ok(CondTable { x1, x2, y, data })
    }

    pub fn get(&self, a: usize, b: usize, y: usize) -> f64 {
        self.data[(a * self.x2 + b) * self.y + y]
    }

    pub fn row(&self, a: usize, b: usize) -> &[f64] {
        let o = (a * self.x2 + b) * self.y;
        &self.data[o..o + self.y]
    }

    pub fn row_mut(&mut self, a: usize, b: usize) -> &mut [f64] {
        let o = (a * self.x2 + b) * self.y;
        &mut self.data[o..o + self.y]
    }
}

impl Channel {
    pub fn new(x1: usize, x2: usize, y1: usize, y2: usize, prob: Vec<f64>) -> Result<Channel> {
        if x1 == 0 || x2 == 0 || y1 == 0 || y2 == 0 {
            return Err(Error::InvalidChannel("alphabet sizes must be positive".into()));
        }
        if prob.len() != x1 * x2 * y1 * y2 {
            return Err(Error::InvalidChannel("inconsistent dimensions".into()));
        }
        if let Some(v) = prob.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidChannel(format!("negative or non-finite entry {v}")));
        }
        let ch = Channel { x1, x2, y1, y2, prob };
        for a in 0..x1 {
            for b in 0..x2 {
                let s: f64 = ch.row(a, b).iter().sum();
                if (s - 1.0).abs() > ROW_TOL {
                    return Err(Error::InvalidChannel(format!("row ({a},{b}) sums to {s}")));
                }
            }
        }
        Ok(ch)
    }

    /// Builds the channel from nested `p[x1][x2][y1][y2]` arrays.
    pub fn from_nested(p: &[Vec<Vec<Vec<f64>>>]) -> Result<Channel> {
        let x1 = p.len();
        let x2 = p.first().map_or(0, |v| v.len());
        let y1 = p.first().and_then(|v| v.first()).map_or(0, |v| v.len());
        let y2 = p.first().and_then(|v| v.first()).and_then(|v| v.first()).map_or(0, |v| v.len());
        let mut flat = Vec::with_capacity(x1 * x2 * y1 * y2);
        for a in p {
            if a.len() != x2 {
                return Err(Error::InvalidChannel("inconsistent dimensions".into()));
            }
            for b in a {
                if b.len() != y1 {
                    return Err(Error::InvalidChannel("inconsistent dimensions".into()));
                }
                for c in b {
                    if c.len() != y2 {
                        return Err(Error::InvalidChannel("inconsistent dimensions".into()));
                    }
                    flat.extend_from_slice(c);
                }
            }
        }
        Channel::new(x1, x2, y1, y2, flat)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.x1)
            .map(|a| (0..self.x2).map(|b| (0..self.y1).map(|c| (0..self.y2).map(|d| self.p(a, b, c, d)).collect()).collect()).collect())
            .collect()
    }

    /// Joint table whose output pair is the product of the two given marginals.
    pub fn from_marginals(m1: &CondTable, m2: &CondTable) -> Result<Channel> {
        if (m1.x1, m1.x2) != (m2.x1, m2.x2) {
            return Err(Error::SizeMismatch("marginal tables over different inputs".into()));
        }
        let (x1, x2, y1, y2) = (m1.x1, m1.x2, m1.y, m2.y);
        let mut prob = Vec::with_capacity(x1 * x2 * y1 * y2);
        for a in 0..x1 {
            for b in 0..x2 {
                for c in 0..y1 {
                    for d in 0..y2 {
                        prob.push(m1.get(a, b, c) * m2.get(a, b, d));
                    }
                }
            }
        }
        // tolerate rounding in the products
        let mut ch = Channel { x1, x2, y1, y2, prob };
        for a in 0..x1 {
            for b in 0..x2 {
                let s: f64 = ch.row(a, b).iter().sum();
                let o = (a * x2 + b) * y1 * y2;
                for v in &mut ch.prob[o..o + y1 * y2] {
                    *v /= s;
                }
            }
        }
        Ok(ch)
    }

    /// Restriction to input sub-alphabets, relabelled in the given order.
    pub fn restrict(&self, s1: &[usize], s2: &[usize]) -> Result<Channel> {
        if s1.is_empty() || s2.is_empty() || s1.iter().any(|&v| v >= self.x1) || s2.iter().any(|&v| v >= self.x2) {
            return Err(Error::Precondition("sub-alphabet out of range".into()));
        }
        let mut prob = Vec::with_capacity(s1.len() * s2.len() * self.y1 * self.y2);
        for &a in s1 {
            for &b in s2 {
                prob.extend_from_slice(self.row(a, b));
            }
        }
        Ok(Channel { x1: s1.len(), x2: s2.len(), y1: self.y1, y2: self.y2, prob })
    }

    pub fn x1_size(&self) -> usize {
        self.x1
    }
    pub fn x2_size(&self) -> usize {
        self.x2
    }
    pub fn y1_size(&self) -> usize {
        self.y1
    }
    pub fn y2_size(&self) -> usize {
        self.y2
    }

    pub fn p(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.prob[((a * self.x2 + b) * self.y1 + c) * self.y2 + d]
    }

    fn row(&self, a: usize, b: usize) -> &[f64] {
        let w = self.y1 * self.y2;
        let o = (a * self.x2 + b) * w;
        &self.prob[o..o + w]
    }

    /// `P(y1 | x1, x2)`.
    pub fn marginal_y1(&self) -> CondTable {
        let mut data = Vec::with_capacity(self.x1 * self.x2 * self.y1);
        for a in 0..self.x1 {
            for b in 0..self.x2 {
                for c in 0..self.y1 {
                    data.push((0..self.y2).map(|d| self.p(a, b, c, d)).sum());
                }
            }
        }
        CondTable { x1: self.x1, x2: self.x2, y: self.y1, data }
    }

    /// `P(y2 | x1, x2)`.
    pub fn marginal_y2(&self) -> CondTable {
        let mut data = Vec::with_capacity(self.x1 * self.x2 * self.y2);
        for a in 0..self.x1 {
            for b in 0..self.x2 {
                for d in 0..self.y2 {
                    data.push((0..self.y1).map(|c| self.p(a, b, c, d)).sum());
                }
            }
        }
        CondTable { x1: self.x1, x2: self.x2, y: self.y2, data }
    }

    pub fn derive_confusion(&self) -> ConfusionFamily {
        let m1 = self.marginal_y1();
        let m2 = self.marginal_y2();
        let g = (0..self.x1)
            .map(|a| {
                let mut gr = Graph::empty(self.x2);
                for b in 0..self.x2 {
                    for b2 in b + 1..self.x2 {
                        if (0..self.y1).any(|c| m1.get(a, b, c) > SUPPORT_EPS && m1.get(a, b2, c) > SUPPORT_EPS) {
                            gr.add_edge(b, b2);
                        }
                    }
                }
                gr
            })
            .collect();
        let h = (0..self.x2)
            .map(|b| {
                let mut gr = Graph::empty(self.x1);
                for a in 0..self.x1 {
                    for a2 in a + 1..self.x1 {
                        if (0..self.y2).any(|d| m2.get(a, b, d) > SUPPORT_EPS && m2.get(a2, b, d) > SUPPORT_EPS) {
                            gr.add_edge(a, a2);
                        }
                    }
                }
                gr
            })
            .collect();
        ConfusionFamily { g, h }
    }
}

/// Whether two channels on the same input alphabets have identical confusion families.
pub fn same_adjacency(a: &Channel, b: &Channel) -> Result<bool> {
    if (a.x1, a.x2) != (b.x1, b.x2) {
        return Err(Error::SizeMismatch(format!("input alphabets ({},{}) vs ({},{})", a.x1, a.x2, b.x1, b.x2)));
    }
    Ok(a.derive_confusion() == b.derive_confusion())
}

/// Graph family `[G_0..G_{|X1|-1}; H_0..H_{|X2|-1}]`: `g[x1]` lives on `X2`, `h[x2]` on `X1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionFamily {
    pub g: Vec<Graph>,
    pub h: Vec<Graph>,
}

impl ConfusionFamily {
    pub fn new(g: Vec<Graph>, h: Vec<Graph>) -> Result<ConfusionFamily> {
        if g.is_empty() || h.is_empty() {
            return Err(Error::InvalidFamily("alphabets must be non-empty".into()));
        }
        if g.iter().any(|x| x.n() != h.len()) {
            return Err(Error::InvalidFamily(format!("every G graph must have {} vertices", h.len())));
        }
        if h.iter().any(|x| x.n() != g.len()) {
            return Err(Error::InvalidFamily(format!("every H graph must have {} vertices", g.len())));
        }
        Ok(ConfusionFamily { g, h })
    }

    pub fn x1_size(&self) -> usize {
        self.g.len()
    }

    pub fn x2_size(&self) -> usize {
        self.h.len()
    }

    pub fn complement(&self) -> ConfusionFamily {
        ConfusionFamily { g: self.g.iter().map(Graph::complement).collect(), h: self.h.iter().map(Graph::complement).collect() }
    }

    /// The same channel seen with the users swapped.
    pub fn transposed(&self) -> ConfusionFamily {
        ConfusionFamily { g: self.h.clone(), h: self.g.clone() }
    }

    /// Restriction to input sub-alphabets, relabelled in the given order.
    pub fn restrict(&self, s1: &[usize], s2: &[usize]) -> Result<ConfusionFamily> {
        if s1.is_empty() || s2.is_empty() || s1.iter().any(|&v| v >= self.x1_size()) || s2.iter().any(|&v| v >= self.x2_size()) {
            return Err(Error::Precondition("sub-alphabet out of range".into()));
        }
        let g = s1.iter().map(|&a| self.g[a].induced(s2)).collect();
        let h = s2.iter().map(|&b| self.h[b].induced(s1)).collect();
        ConfusionFamily::new(g, h)
    }
}

/// A channel realising `fam`: output `j` of each direction is the `j`-th maximal
/// clique of the relevant graph, and each input spreads its mass uniformly over
/// the cliques that contain it.
pub fn canonical_channel(fam: &ConfusionFamily) -> Channel {
    let (x1, x2) = (fam.x1_size(), fam.x2_size());
    let cl_g: Vec<Vec<Vec<usize>>> = fam.g.iter().map(|g| enumerate_cliques(g, true)).collect();
    let cl_h: Vec<Vec<Vec<usize>>> = fam.h.iter().map(|h| enumerate_cliques(h, true)).collect();
    let y1 = cl_g.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let y2 = cl_h.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let spread = |cliques: &[Vec<usize>], v: usize, ysz: usize| {
        let mut row = vec![0.0; ysz];
        let cover: Vec<usize> = (0..cliques.len()).filter(|&j| cliques[j].contains(&v)).collect();
        for &j in &cover {
            row[j] = 1.0 / cover.len() as f64;
        }
        row
    };
    let mut d1 = Vec::with_capacity(x1 * x2 * y1);
    let mut d2 = Vec::with_capacity(x1 * x2 * y2);
    for a in 0..x1 {
        for b in 0..x2 {
            d1.extend(spread(&cl_g[a], b, y1));
            d2.extend(spread(&cl_h[b], a, y2));
        }
    }
    let m1 = CondTable { x1, x2, y: y1, data: d1 };
    let m2 = CondTable { x1, x2, y: y2, data: d2 };
    Channel::from_marginals(&m1, &m2).expect("marginals share inputs")
}

#[derive(Serialize, Deserialize)]
struct ChannelDoc {
    x1: usize,
    x2: usize,
    y1: usize,
    y2: usize,
    p: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Serialize, Deserialize)]
struct FamilyDoc {
    x1: usize,
    x2: usize,
    #[serde(rename = "G")]
    g: Vec<Graph>,
    #[serde(rename = "H")]
    h: Vec<Graph>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    ProbabilityTable,
    GraphFamily,
}

/// A parsed input document.
#[derive(Debug, Clone)]
pub enum Input {
    Channel(Channel),
    Family(ConfusionFamily),
}

impl Input {
    pub fn family(&self) -> ConfusionFamily {
        match self {
            Input::Channel(c) => c.derive_confusion(),
            Input::Family(f) => f.clone(),
        }
    }

    /// The channel itself, or the canonical representative of the family.
    pub fn channel(&self) -> Channel {
        match self {
            Input::Channel(c) => c.clone(),
            Input::Family(f) => canonical_channel(f),
        }
    }
}

/// Parses a channel or graph-family JSON document; `format = None` detects it.
pub fn parse_input(source: &[u8], format: Option<Format>) -> Result<Input> {
    let v: Value = serde_json::from_slice(source).map_err(|e| Error::Malformed(e.to_string()))?;
    let fmt = match format {
        Some(f) => f,
        None if v.get("p").is_some() => Format::ProbabilityTable,
        None if v.get("G").is_some() => Format::GraphFamily,
        None => return Err(Error::Malformed("document has neither \"p\" nor \"G\"".into())),
    };
    match fmt {
        Format::ProbabilityTable => {
            let doc: ChannelDoc = serde_json::from_value(v).map_err(|e| Error::Malformed(e.to_string()))?;
            let ch = Channel::from_nested(&doc.p)?;
            if (ch.x1, ch.x2, ch.y1, ch.y2) != (doc.x1, doc.x2, doc.y1, doc.y2) {
                return Err(Error::InvalidChannel("declared sizes disagree with the table".into()));
            }
            Ok(Input::Channel(ch))
        }
        Format::GraphFamily => {
            let doc: FamilyDoc = serde_json::from_value(v).map_err(|e| Error::Malformed(e.to_string()))?;
            if doc.g.len() != doc.x1 || doc.h.len() != doc.x2 {
                return Err(Error::InvalidFamily("declared sizes disagree with the graph lists".into()));
            }
            Ok(Input::Family(ConfusionFamily::new(doc.g, doc.h)?))
        }
    }
}

pub fn channel_to_json(ch: &Channel) -> Value {
    serde_json::to_value(ChannelDoc { x1: ch.x1, x2: ch.x2, y1: ch.y1, y2: ch.y2, p: ch.to_nested() }).expect("plain data")
}

pub fn family_to_json(fam: &ConfusionFamily) -> Value {
    serde_json::to_value(FamilyDoc { x1: fam.x1_size(), x2: fam.x2_size(), g: fam.g.clone(), h: fam.h.clone() }).expect("plain data")
}
