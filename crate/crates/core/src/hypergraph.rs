//! r-uniform hypergraphs: construction, sampling, and the edge-list
//! interchange format.
//!
//! Vertices are `0..n`. Edges are sorted r-sets, stored in lexicographic
//! order; all downstream code identifies an edge by its index into that
//! order, so edge identity is stable across rebuilds.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Counter-based seedable generator used by every stochastic operation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A set of edge indices of a fixed [`Hypergraph`], kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeSet(Vec<usize>);

impl EdgeSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        EdgeSet(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    /// True if `other` is a subset of `self`.
    pub fn contains_set(&self, other: &EdgeSet) -> bool {
        other.0.iter().all(|i| self.contains(*i))
    }

    /// All nonempty subsets of this set, as sorted index lists.
    pub fn nonempty_subsets(&self) -> Vec<EdgeSet> {
        let k = self.0.len();
        let mut out = Vec::with_capacity((1usize << k) - 1);
        for mask in 1u64..(1u64 << k) {
            let sub: Vec<usize> = (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.0[i])
                .collect();
            out.push(EdgeSet(sub));
        }
        out
    }
}

/// An n-vertex r-uniform hypergraph with an indexed edge list.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<Vec<usize>>,
    #[serde(skip)]
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Normalizes (sorts, dedups) the edge list and validates every edge.
    /// Returns the graph together with the number of duplicate edges dropped.
    pub fn build(n: usize, r: usize, edges: Vec<Vec<usize>>) -> Result<(Self, usize)> {
        if r < 2 {
            return Err(Error::UniformityTooSmall(r));
        }
        if n < r {
            return Err(Error::TooFewVertices { n, r });
        }
        let mut norm = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            if e.len() != r || e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedEdge { edge: e, r });
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { v, n });
            }
            norm.push(e);
        }
        let before = norm.len();
        norm.sort_unstable();
        norm.dedup();
        let dropped = before - norm.len();
        Ok((Self::from_normalized(n, r, norm), dropped))
    }

    fn from_normalized(n: usize, r: usize, edges: Vec<Vec<usize>>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v].push(i);
            }
        }
        Hypergraph { n, r, edges, incidence }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &[usize] {
        &self.edges[idx]
    }

    /// Edge indices incident to vertex `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// The complete graph K_n (r = 2).
    pub fn complete_graph(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push(vec![u, v]);
            }
        }
        Ok(Self::build(n, 2, edges)?.0)
    }

    /// The complete bipartite graph K_{a,b} with parts {0..a} and {a..a+b}.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in 0..b {
                edges.push(vec![u, a + v]);
            }
        }
        Self::build(a + b, 2, edges).map(|(g, _)| g)
    }

    /// The cycle C_m on vertices 0..m in canonical order.
    pub fn cycle(m: usize) -> Result<Self> {
        let edges: Vec<Vec<usize>> = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
        Self::build(m, 2, edges).map(|(g, _)| g)
    }

    /// The path with m edges on m+1 vertices.
    pub fn path(m: usize) -> Result<Self> {
        let edges: Vec<Vec<usize>> = (0..m).map(|i| vec![i, i + 1]).collect();
        Self::build(m + 1, 2, edges).map(|(g, _)| g)
    }

    /// The 3-cube graph Q_3 (vertices are the 3-bit strings).
    pub fn cube() -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..8usize {
            for bit in 0..3 {
                let v = u ^ (1 << bit);
                if u < v {
                    edges.push(vec![u, v]);
                }
            }
        }
        Self::build(8, 2, edges).map(|(g, _)| g)
    }

    /// G(n, p) sample: each of the C(n, r) candidate r-sets is included
    /// independently with probability p. Deterministic given `seed`.
    pub fn gnp_sample(n: usize, p: f64, r: usize, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::BadProbability(p));
        }
        if r < 2 {
            return Err(Error::UniformityTooSmall(r));
        }
        if n < r {
            return Err(Error::TooFewVertices { n, r });
        }
        let mut rng = seeded_rng(seed);
        let mut edges = Vec::new();
        let mut current: Vec<usize> = (0..r).collect();
        loop {
            if rng.random::<f64>() < p {
                edges.push(current.clone());
            }
            // advance to the next r-subset of 0..n in lexicographic order
            let mut i = r;
            loop {
                if i == 0 {
                    return Ok(Self::from_normalized(n, r, edges));
                }
                i -= 1;
                if current[i] < n - (r - i) {
                    current[i] += 1;
                    for j in i + 1..r {
                        current[j] = current[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// A uniformly random w-subset of the vertex set, sorted. Deterministic
    /// given `seed`.
    pub fn uniform_vertex_subset(&self, w: usize, seed: u64) -> Result<Vec<usize>> {
        if w > self.n {
            return Err(Error::SubsetTooLarge { w, n: self.n });
        }
        let mut rng = seeded_rng(seed);
        let mut picked: Vec<usize> = sample(&mut rng, self.n, w).into_iter().collect();
        picked.sort_unstable();
        Ok(picked)
    }

    /// The subgraph induced by `vertices`, relabeled to 0..|vertices| in the
    /// order given (which must be sorted and duplicate-free).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { v, n: self.n });
            }
            map[v] = i;
        }
        let edges: Vec<Vec<usize>> = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| map[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| map[v]).collect())
            .collect();
        let n = vertices.len().max(self.r);
        Ok(Self::build(n, self.r, edges)?.0)
    }

    /// Applies a vertex permutation (`perm[v]` is the new id of `v`) and
    /// renormalizes.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let edges: Vec<Vec<usize>> = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| perm[v]).collect())
            .collect();
        Self::build(self.n, self.r, edges).map(|(g, _)| g)
    }

    /// Serializes to the edge-list text format: `n m r`, then one line per
    /// edge of r space-separated vertex ids.
    pub fn serialize_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n, self.edges.len(), self.r);
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses the edge-list text format. Lines starting with `#` are
    /// comments.
    pub fn parse_text(input: &str) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lineno, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `n m r` header, got `{header}`"),
            });
        }
        let parse = |s: &str, line: usize| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer `{s}`"),
            })
        };
        let n = parse(parts[0], lineno)?;
        let m = parse(parts[1], lineno)?;
        let r = parse(parts[2], lineno)?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (lineno, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {m} edge lines"),
            })?;
            let edge: Vec<usize> = line
                .split_whitespace()
                .map(|s| parse(s, lineno))
                .collect::<Result<_>>()?;
            edges.push(edge);
        }
        Self::build(n, r, edges).map(|(g, _)| g)
    }

    /// Rebuilds the incidence lists from the edge list (used after
    /// deserialization, where they are skipped).
    pub fn rebuild_incidence(&mut self) {
        *self = Self::from_normalized(self.n, self.r, self.edges.clone());
    }
}

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut result = BigInt::one();
    for i in 0..k.min(n - k) {
        result = result * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    result
}

/// The ratio C(n-h, w-h)/C(n, w) with its upper bound (w/n)^h and, when
/// w >= h^2, the lower bound (1/2)(w/n)^h. All values are exact rationals;
/// the flags record whether each inequality holds (they must).
#[derive(Debug, Clone)]
pub struct BinomRatio {
    pub ratio: BigRational,
    pub upper: BigRational,
    pub lower: Option<BigRational>,
    pub upper_holds: bool,
    pub lower_holds: Option<bool>,
}

pub fn binom_ratio_bounds(n: usize, w: usize, h: usize) -> Result<BinomRatio> {
    if !(h <= w && w <= n) || n == 0 {
        return Err(Error::BadBinomArgs { n, w, h });
    }
    let ratio = BigRational::new(binomial(n - h, w - h), binomial(n, w));
    let wn = BigRational::new(BigInt::from(w), BigInt::from(n));
    let mut upper = BigRational::one();
    for _ in 0..h {
        upper *= &wn;
    }
    let lower = if h > 0 && w >= h * h {
        Some(&upper / BigRational::from(BigInt::from(2)))
    } else {
        None
    };
    let upper_holds = ratio <= upper;
    let lower_holds = lower.as_ref().map(|lo| &ratio >= lo);
    Ok(BinomRatio { ratio, upper, lower, upper_holds, lower_holds })
}
