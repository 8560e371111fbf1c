//! Copy enumeration: finding subgraphs of a host isomorphic to a pattern.
//!
//! Copies are identified with their edge sets (two embeddings that use the
//! same host edges are the same copy). The search backtracks over an
//! ordered edge-extension of the pattern, keeping the partial image
//! connected whenever the pattern is, with forbidden-set pruning applied as
//! soon as a partial edge set contains a forbidden set.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use itertools::Itertools;

use crate::hypergraph::{EdgeSet, Hypergraph};
use crate::pattern::Pattern;
use crate::{Error, Result};

/// A copy of the pattern in a host: the host edge indices used and the host
/// vertices spanned.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PatternCopy {
    pub edge_set: EdgeSet,
    pub vertex_image: Vec<usize>,
}

/// Hash-backed registry of forbidden edge sets, queried by subset
/// containment during the search.
#[derive(Debug, Default, Clone)]
pub struct ForbiddenSets {
    sets: HashSet<Vec<usize>>,
    max_size: usize,
}

impl ForbiddenSets {
    pub fn new(sets: &[EdgeSet]) -> Self {
        let mut f = ForbiddenSets::default();
        for s in sets {
            f.insert(s);
        }
        f
    }

    pub fn insert(&mut self, set: &EdgeSet) {
        self.max_size = self.max_size.max(set.len());
        self.sets.insert(set.indices().to_vec());
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    /// True if some forbidden set is a subset of `edges` (sorted indices).
    pub fn hits(&self, edges: &[usize]) -> bool {
        if self.sets.is_empty() {
            return false;
        }
        let k = edges.len();
        let mut buf = Vec::with_capacity(k);
        for mask in 1u64..(1u64 << k) {
            if (mask.count_ones() as usize) > self.max_size {
                continue;
            }
            buf.clear();
            for (i, &e) in edges.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    buf.push(e);
                }
            }
            if self.sets.contains(&buf) {
                return true;
            }
        }
        false
    }

    /// True if some forbidden set containing `newest` is a subset of
    /// `edges` (sorted, must include `newest`). Cheaper incremental form of
    /// [`hits`] for use while the partial edge set grows.
    pub fn hits_with(&self, edges: &[usize], newest: usize) -> bool {
        if self.sets.is_empty() {
            return false;
        }
        let rest: Vec<usize> = edges.iter().copied().filter(|&e| e != newest).collect();
        let k = rest.len();
        let mut buf = Vec::with_capacity(k + 1);
        for mask in 0u64..(1u64 << k) {
            if (mask.count_ones() as usize) + 1 > self.max_size {
                continue;
            }
            buf.clear();
            for (i, &e) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    buf.push(e);
                }
            }
            buf.push(newest);
            buf.sort_unstable();
            if self.sets.contains(&buf) {
                return true;
            }
        }
        false
    }
}

/// Order the pattern edges so that each edge after the first shares a
/// vertex with the union of its predecessors whenever possible (components
/// are traversed in sequence).
fn pattern_edge_order(pattern: &Hypergraph) -> Vec<usize> {
    let ell = pattern.edge_count();
    let mut order = Vec::with_capacity(ell);
    let mut used = vec![false; ell];
    let mut touched = vec![false; pattern.n()];
    for _ in 0..ell {
        let mut best: Option<(usize, usize)> = None; // (shared vertices, edge)
        for (ei, &is_used) in used.iter().enumerate() {
            if is_used {
                continue;
            }
            let shared = pattern.edge(ei).iter().filter(|&&v| touched[v]).count();
            let better = match best {
                None => true,
                Some((s, _)) => shared > s,
            };
            if better {
                best = Some((shared, ei));
            }
        }
        let (_, ei) = best.unwrap();
        used[ei] = true;
        for &v in pattern.edge(ei) {
            touched[v] = true;
        }
        order.push(ei);
    }
    order
}

struct EmbedSearch<'a> {
    host: &'a Hypergraph,
    pattern: &'a Hypergraph,
    order: Vec<usize>,
    vmap: Vec<usize>,       // pattern vertex -> host vertex (usize::MAX = unset)
    vused: Vec<bool>,       // host vertex used
    chosen: Vec<usize>,     // host edge per pattern edge, in `order` sequence
    partial: Vec<usize>,    // sorted copy of `chosen`
    forbidden: &'a ForbiddenSets,
}

impl<'a> EmbedSearch<'a> {
    /// Visits every injective homomorphism pattern -> host whose partial
    /// edge set never contains a forbidden set. The visitor receives the
    /// vertex map and the host edge per pattern edge (indexed by pattern
    /// edge id); returning `false` stops the whole search.
    fn run(&mut self, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) -> bool {
        self.step(0, visit)
    }

    fn step(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            let mut by_pattern_edge = vec![0usize; self.order.len()];
            for (d, &pe) in self.order.iter().enumerate() {
                by_pattern_edge[pe] = self.chosen[d];
            }
            return visit(&self.vmap, &by_pattern_edge);
        }
        let pe = self.order[depth];
        let pat_edge = self.pattern.edge(pe).to_vec();
        let mapped: Vec<usize> = pat_edge
            .iter()
            .filter(|&&v| self.vmap[v] != usize::MAX)
            .map(|&v| self.vmap[v])
            .collect();
        let unmapped: Vec<usize> = pat_edge
            .iter()
            .copied()
            .filter(|&v| self.vmap[v] == usize::MAX)
            .collect();

        let candidates: Vec<usize> = match mapped.first() {
            Some(&hv) => self.host.incident(hv).to_vec(),
            None => (0..self.host.edge_count()).collect(),
        };
        'cand: for he in candidates {
            let host_edge = self.host.edge(he);
            for &hv in &mapped {
                if !host_edge.contains(&hv) {
                    continue 'cand;
                }
            }
            if self.partial.binary_search(&he).is_ok() {
                continue; // same host edge cannot serve two pattern edges
            }
            let free: Vec<usize> = host_edge
                .iter()
                .copied()
                .filter(|hv| !mapped.contains(hv))
                .collect();
            if free.len() != unmapped.len() {
                continue;
            }
            // try every bijection unmapped pattern vertices -> free host vertices
            for perm in free.iter().copied().permutations(free.len()) {
                if perm.iter().any(|&hv| self.vused[hv]) {
                    continue;
                }
                for (&pv, &hv) in unmapped.iter().zip(&perm) {
                    self.vmap[pv] = hv;
                    self.vused[hv] = true;
                }
                let pos = self.partial.binary_search(&he).unwrap_err();
                self.partial.insert(pos, he);
                self.chosen.push(he);

                let pruned = self.forbidden.hits_with(&self.partial, he);
                let keep_going = pruned || self.step(depth + 1, visit);

                self.chosen.pop();
                self.partial.remove(pos);
                for (&pv, &hv) in unmapped.iter().zip(&perm) {
                    self.vmap[pv] = usize::MAX;
                    self.vused[hv] = false;
                }
                if !keep_going {
                    return false;
                }
            }
        }
        true
    }
}

fn check_uniformity(host: &Hypergraph, pattern: &Pattern) -> Result<()> {
    if host.r() != pattern.r() {
        return Err(Error::UniformityMismatch { host: host.r(), pattern: pattern.r() });
    }
    Ok(())
}

fn for_each_embedding(
    host: &Hypergraph,
    pattern: &Hypergraph,
    forbidden: &ForbiddenSets,
    visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
) {
    if pattern.edge_count() == 0 {
        return;
    }
    let mut search = EmbedSearch {
        host,
        pattern,
        order: pattern_edge_order(pattern),
        vmap: vec![usize::MAX; pattern.n()],
        vused: vec![false; host.n()],
        chosen: Vec::with_capacity(pattern.edge_count()),
        partial: Vec::with_capacity(pattern.edge_count()),
        forbidden,
    };
    search.run(visit);
}

/// All copies of the pattern in the host, in lexicographic order on sorted
/// edge-index sets. Copies whose edge set contains a forbidden set as a
/// subset are skipped; at most `limit` copies are returned if given.
pub fn enumerate_copies(
    host: &Hypergraph,
    pattern: &Pattern,
    limit: Option<usize>,
    forbidden: &[EdgeSet],
) -> Result<Vec<PatternCopy>> {
    check_uniformity(host, pattern)?;
    let registry = ForbiddenSets::new(forbidden);
    let mut found: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for_each_embedding(host, pattern.graph(), &registry, &mut |vmap, edges| {
        let mut key = edges.to_vec();
        key.sort_unstable();
        found.entry(key).or_insert_with(|| {
            let mut image: Vec<usize> = vmap.to_vec();
            image.sort_unstable();
            image
        });
        true
    });
    let mut out: Vec<PatternCopy> = found
        .into_iter()
        .map(|(edges, image)| PatternCopy {
            edge_set: EdgeSet::new(edges),
            vertex_image: image,
        })
        .collect();
    if let Some(limit) = limit {
        out.truncate(limit);
    }
    Ok(out)
}

/// Exact number of copies of the pattern in the host.
pub fn count_copies(host: &Hypergraph, pattern: &Pattern) -> Result<usize> {
    check_uniformity(host, pattern)?;
    let none = ForbiddenSets::default();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for_each_embedding(host, pattern.graph(), &none, &mut |_, edges| {
        let mut key = edges.to_vec();
        key.sort_unstable();
        seen.insert(key);
        true
    });
    Ok(seen.len())
}

/// True if the host contains at least one copy of the pattern.
pub fn has_copy(host: &Hypergraph, pattern: &Pattern) -> Result<bool> {
    check_uniformity(host, pattern)?;
    let none = ForbiddenSets::default();
    let mut found = false;
    for_each_embedding(host, pattern.graph(), &none, &mut |_, _| {
        found = true;
        false
    });
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingCount {
    /// Injective homomorphisms pattern -> host.
    pub embeddings: usize,
    /// |Aut(pattern)|, computed as the embedding count of the pattern in
    /// itself.
    pub automorphisms: usize,
}

/// Counts embeddings and the pattern's automorphism group order. The
/// identity `copies * automorphisms = embeddings` cross-checks the
/// edge-set deduplication.
pub fn embedding_count(host: &Hypergraph, pattern: &Pattern) -> Result<EmbeddingCount> {
    check_uniformity(host, pattern)?;
    let none = ForbiddenSets::default();
    let mut embeddings = 0usize;
    for_each_embedding(host, pattern.graph(), &none, &mut |_, _| {
        embeddings += 1;
        true
    });
    let mut automorphisms = 0usize;
    for_each_embedding(pattern.graph(), pattern.graph(), &none, &mut |_, _| {
        automorphisms += 1;
        true
    });
    Ok(EmbeddingCount { embeddings, automorphisms })
}
