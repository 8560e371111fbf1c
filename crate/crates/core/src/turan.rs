//! Exact and experimental Turán machinery: small-n extremal numbers,
//! maximum pattern-free subgraphs via minimum hitting sets, supersaturation
//! checks, and the random Turán sweep.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::enumerate::{count_copies, enumerate_copies, has_copy};
use crate::hypergraph::{binomial, seeded_rng, EdgeSet, Hypergraph};
use crate::pattern::{
    bound_formula_random_turan, compute_densities, rational_to_f64, BoundBranch, BoundVariant,
    Pattern,
};
use crate::{Error, Result};
use num_rational::BigRational;
use rand::Rng;

/// Derives an independent per-cell seed from a master seed (splitmix64).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    Exhaustive,
    BranchAndBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalRecord {
    pub n: usize,
    pub ex_value: usize,
    /// Edge list of a pattern-free witness attaining the maximum.
    pub witness: Vec<Vec<usize>>,
    pub method: ExactMethod,
}

const EXHAUSTIVE_EDGE_LIMIT: usize = 15;
const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Exact extremal number ex(n, H) with a witness. Exhausts all edge
/// subsets when C(n, r) is small; otherwise branches over edge inclusion
/// with copy pruning, refusing (never guessing) if the node budget runs
/// out.
pub fn ex_exact(n: usize, pattern: &Pattern, node_budget: Option<u64>) -> Result<ExtremalRecord> {
    let r = pattern.r();
    if n < r {
        return Ok(ExtremalRecord { n, ex_value: 0, witness: vec![], method: ExactMethod::Exhaustive });
    }
    let all_edges = all_r_sets(n, r);
    let m = all_edges.len();

    // hosts too small to fit any copy are trivially pattern-free in full
    let full = Hypergraph::build(n, r, all_edges.clone())?.0;
    if !has_copy(&full, pattern)? {
        return Ok(ExtremalRecord {
            n,
            ex_value: m,
            witness: all_edges,
            method: ExactMethod::Exhaustive,
        });
    }

    if m <= EXHAUSTIVE_EDGE_LIMIT {
        let mut best = 0usize;
        let mut witness = Vec::new();
        for mask in 0u64..(1u64 << m) {
            let count = mask.count_ones() as usize;
            if count <= best {
                continue;
            }
            let edges: Vec<Vec<usize>> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| all_edges[i].clone())
                .collect();
            let g = Hypergraph::build(n, r, edges.clone())?.0;
            if !has_copy(&g, pattern)? {
                best = count;
                witness = edges;
            }
        }
        return Ok(ExtremalRecord { n, ex_value: best, witness, method: ExactMethod::Exhaustive });
    }

    // branch and bound over edge inclusion
    struct Search<'a> {
        n: usize,
        r: usize,
        all_edges: &'a [Vec<usize>],
        pattern: &'a Pattern,
        best: usize,
        witness: Vec<Vec<usize>>,
        nodes: u64,
        budget: u64,
    }
    impl Search<'_> {
        fn go(&mut self, idx: usize, chosen: &mut Vec<Vec<usize>>) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded(format!(
                    "ex_exact: more than {} search nodes; refusing to report an inexact value",
                    self.budget
                )));
            }
            if chosen.len() > self.best {
                self.best = chosen.len();
                self.witness = chosen.clone();
            }
            if idx == self.all_edges.len()
                || chosen.len() + (self.all_edges.len() - idx) <= self.best
            {
                return Ok(());
            }
            // include edge idx if it keeps the graph pattern-free
            chosen.push(self.all_edges[idx].clone());
            let g = Hypergraph::build(self.n, self.r, chosen.clone())?.0;
            if !has_copy(&g, self.pattern)? {
                self.go(idx + 1, chosen)?;
            }
            chosen.pop();
            self.go(idx + 1, chosen)
        }
    }
    let mut search = Search {
        n,
        r,
        all_edges: &all_edges,
        pattern,
        best: 0,
        witness: Vec::new(),
        nodes: 0,
        budget: node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
    };
    search.go(0, &mut Vec::new())?;
    Ok(ExtremalRecord {
        n,
        ex_value: search.best,
        witness: search.witness,
        method: ExactMethod::BranchAndBound,
    })
}

fn all_r_sets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..r).collect();
    loop {
        out.push(current.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
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

/// Exact minimum hitting set of a family of edge-index sets, by branch and
/// bound with a greedy incumbent and a disjoint-set packing lower bound.
pub fn min_hitting_set(sets: &[EdgeSet]) -> Vec<usize> {
    if sets.is_empty() {
        return vec![];
    }
    let greedy = greedy_hitting_set(sets);
    let mut best = greedy.clone();

    fn packing_lower_bound(sets: &[EdgeSet], alive: &[bool]) -> usize {
        let mut used: Vec<usize> = Vec::new();
        let mut count = 0;
        for (i, s) in sets.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            if s.indices().iter().all(|e| !used.contains(e)) {
                used.extend_from_slice(s.indices());
                count += 1;
            }
        }
        count
    }

    fn branch(
        sets: &[EdgeSet],
        alive: &mut Vec<bool>,
        hs: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        let uncovered = alive.iter().position(|&a| a);
        let Some(first) = uncovered else {
            if hs.len() < best.len() {
                *best = hs.clone();
            }
            return;
        };
        if hs.len() + packing_lower_bound(sets, alive) >= best.len() {
            return;
        }
        let candidates: Vec<usize> = sets[first].indices().to_vec();
        for e in candidates {
            let covered: Vec<usize> = (0..sets.len())
                .filter(|&i| alive[i] && sets[i].contains(e))
                .collect();
            for &i in &covered {
                alive[i] = false;
            }
            hs.push(e);
            branch(sets, alive, hs, best);
            hs.pop();
            for &i in &covered {
                alive[i] = true;
            }
        }
    }

    let mut alive = vec![true; sets.len()];
    branch(sets, &mut alive, &mut Vec::new(), &mut best);
    best
}

fn greedy_hitting_set(sets: &[EdgeSet]) -> Vec<usize> {
    let mut alive: Vec<bool> = vec![true; sets.len()];
    let mut hs = Vec::new();
    loop {
        let mut degree: std::collections::BTreeMap<usize, usize> = Default::default();
        for (i, s) in sets.iter().enumerate() {
            if alive[i] {
                for &e in s.indices() {
                    *degree.entry(e).or_insert(0) += 1;
                }
            }
        }
        let Some((&e, _)) = degree.iter().max_by_key(|(&e, &d)| (d, std::cmp::Reverse(e)))
        else {
            return hs;
        };
        hs.push(e);
        for (i, s) in sets.iter().enumerate() {
            if alive[i] && s.contains(e) {
                alive[i] = false;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasuredKind {
    Exact,
    GreedyLowerBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomSubgraphResult {
    pub value: usize,
    pub kind: MeasuredKind,
    pub copies: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    Exact,
    Greedy,
}

const DEFAULT_COPY_BUDGET: usize = 20_000;

/// Maximum number of edges in a pattern-free subgraph of the host. Exact
/// mode solves e(G) minus a minimum hitting set of the copy hypergraph;
/// greedy mode repeatedly deletes an edge of maximum copy degree and
/// reports a lower bound.
pub fn ex_random_subgraph(
    host: &Hypergraph,
    pattern: &Pattern,
    mode: MeasureMode,
    copy_budget: Option<usize>,
) -> Result<RandomSubgraphResult> {
    let copies = enumerate_copies(host, pattern, None, &[])?;
    let copy_sets: Vec<EdgeSet> = copies.into_iter().map(|c| c.edge_set).collect();
    let n_copies = copy_sets.len();
    match mode {
        MeasureMode::Exact => {
            let budget = copy_budget.unwrap_or(DEFAULT_COPY_BUDGET);
            if n_copies > budget {
                return Err(Error::BudgetExceeded(format!(
                    "{n_copies} copies exceed the exact hitting-set budget {budget}"
                )));
            }
            let hs = min_hitting_set(&copy_sets);
            Ok(RandomSubgraphResult {
                value: host.edge_count() - hs.len(),
                kind: MeasuredKind::Exact,
                copies: n_copies,
            })
        }
        MeasureMode::Greedy => {
            let deleted = greedy_hitting_set(&copy_sets);
            Ok(RandomSubgraphResult {
                value: host.edge_count() - deleted.len(),
                kind: MeasuredKind::GreedyLowerBound,
                copies: n_copies,
            })
        }
    }
}

/// The deletion lower bound max(0, e(G) - ex(n, H)) on the number of
/// copies.
pub fn deletion_lower_bound(host: &Hypergraph, ex_value: usize) -> usize {
    host.edge_count().saturating_sub(ex_value)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetExperimentReport {
    pub n: usize,
    pub w: usize,
    pub p: f64,
    pub trials: usize,
    pub mean_induced_edges: f64,
    pub std_error_induced_edges: f64,
    /// e(G) C(n-r, w-r)/C(n, w), the exact expectation of e(G[W]).
    pub hypergeometric_expectation: f64,
    /// (1/2) e(G) p^r, the lower bound the sampling argument uses.
    pub expectation_lower_bound: f64,
    /// Fraction of samples with e(G[W]) >= (1/4) e(G) p^r.
    pub good_fraction: f64,
    pub mean_copies: f64,
    /// k^{(h-alpha)/(r-alpha)} n^alpha, the copy-count scale.
    pub implied_bound_scale: f64,
    /// mean_copies / implied_bound_scale, the empirical constant; reported,
    /// never asserted.
    pub empirical_c: f64,
    /// Admissibility warnings (the interesting desk-scale regime violates
    /// the asymptotic constants).
    pub warnings: Vec<String>,
}

pub struct SubsetExperimentParams {
    pub alpha: BigRational,
    pub a_const: f64,
    pub trials: usize,
    pub seed: u64,
    /// Overrides the derived subset size w = np when set.
    pub w_override: Option<usize>,
    /// Skip per-trial copy counting when false.
    pub count_copies: bool,
}

/// Uniform random-subset experiment: sample W of size w repeatedly, measure
/// induced edge counts (and copy counts) against the hypergeometric
/// expectation and the good-sample classification.
pub fn random_subset_experiment(
    host: &Hypergraph,
    pattern: &Pattern,
    params: &SubsetExperimentParams,
) -> Result<SubsetExperimentReport> {
    let (n, r) = (host.n(), host.r());
    let e_g = host.edge_count();
    let alpha_f = rational_to_f64(&params.alpha);
    let k = e_g as f64 / (n as f64).powf(alpha_f);
    let mut warnings = Vec::new();
    if params.a_const < (r as f64).powi(2 * r as i32) {
        warnings.push(format!("A = {} < r^(2r) = {}", params.a_const, (r as f64).powi(2 * r as i32)));
    }
    if k < 2f64.powi(3 * r as i32) * params.a_const {
        warnings.push(format!(
            "k = {k:.4} < 2^(3r) A = {}",
            2f64.powi(3 * r as i32) * params.a_const
        ));
    }

    let w = match params.w_override {
        Some(w) => w,
        None => {
            let q = (8.0 * params.a_const / k).powf(1.0 / (r as f64 - alpha_f));
            let w = (n as f64 * q).ceil() as usize;
            let p = w as f64 / n as f64;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Inadmissible(format!(
                    "derived p = {p} outside (0,1); k = {k:.4} too small for (8A/k)^(1/(r-alpha)) < 1"
                )));
            }
            if p > 2.0 * q {
                return Err(Error::Inadmissible(format!(
                    "no integer w with q <= w/n <= 2q (q = {q:.6})"
                )));
            }
            w
        }
    };
    if w > n {
        return Err(Error::SubsetTooLarge { w, n });
    }
    let p = w as f64 / n as f64;

    let mut edge_counts: Vec<f64> = Vec::with_capacity(params.trials);
    let mut copy_counts: Vec<f64> = Vec::with_capacity(params.trials);
    let good_threshold = 0.25 * e_g as f64 * p.powi(r as i32);
    let mut good = 0usize;
    for t in 0..params.trials {
        let subset = host.uniform_vertex_subset(w, derive_seed(params.seed, t as u64))?;
        let induced = host.induced_subgraph(&subset)?;
        let e_i = induced.edge_count() as f64;
        if e_i >= good_threshold {
            good += 1;
        }
        edge_counts.push(e_i);
        if params.count_copies {
            copy_counts.push(count_copies(&induced, pattern)? as f64);
        }
    }
    let trials = params.trials;
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    let mean_induced = mean(&edge_counts);
    let variance = if trials > 1 {
        edge_counts.iter().map(|x| (x - mean_induced).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    let std_error = (variance / trials.max(1) as f64).sqrt();
    let hyper = if w >= r {
        let ratio = BigRational::new(binomial(n - r, w - r), binomial(n, w));
        e_g as f64 * ratio.to_f64().unwrap_or(f64::NAN)
    } else {
        0.0
    };
    let scale = k.powf((pattern.h() as f64 - alpha_f) / (r as f64 - alpha_f))
        * (n as f64).powf(alpha_f);
    let mean_copies = mean(&copy_counts);
    Ok(SubsetExperimentReport {
        n,
        w,
        p,
        trials,
        mean_induced_edges: mean_induced,
        std_error_induced_edges: std_error,
        hypergeometric_expectation: hyper,
        expectation_lower_bound: 0.5 * e_g as f64 * p.powi(r as i32),
        good_fraction: if trials > 0 { good as f64 / trials as f64 } else { 0.0 },
        mean_copies,
        implied_bound_scale: scale,
        empirical_c: if scale > 0.0 { mean_copies / scale } else { 0.0 },
        warnings,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EsGoodReport {
    pub copies: usize,
    /// e(G)^l / n^{2l-h}.
    pub expected_scale: f64,
    /// copies / expected_scale, the empirical constant; reported, never
    /// asserted.
    pub ratio: f64,
}

/// Empirical check of the random-like copy-count lower bound
/// c e(G)^l / n^{2l-h}: reports the observed constant.
pub fn es_good_check(host: &Hypergraph, pattern: &Pattern) -> Result<EsGoodReport> {
    if host.r() != 2 {
        return Err(Error::UniformityMismatch { host: host.r(), pattern: 2 });
    }
    let copies = count_copies(host, pattern)?;
    let (ell, h) = (pattern.ell(), pattern.h());
    let e_g = host.edge_count() as f64;
    let scale = e_g.powi(ell as i32) / (host.n() as f64).powi(2 * ell as i32 - h as i32);
    Ok(EsGoodReport {
        copies,
        expected_scale: scale,
        ratio: if scale > 0.0 { copies as f64 / scale } else { 0.0 },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub trial: usize,
    pub measured: usize,
    pub measured_kind: MeasuredKind,
    pub bound_value: f64,
    pub branch: BoundBranch,
    pub runtime_ms: u128,
    /// Inline refusal note, e.g. when the exact cell fell back to greedy.
    pub note: Option<String>,
}

pub struct SweepParams {
    pub alpha: BigRational,
    pub n_list: Vec<usize>,
    pub p_list: Vec<f64>,
    pub trials: usize,
    pub mode: MeasureMode,
    pub seed: u64,
    pub variant: BoundVariant,
    pub bound_c: f64,
    pub copy_budget: Option<usize>,
}

/// Random Turán sweep: for each (n, p, trial) cell, sample G(n, p), measure
/// the maximum pattern-free subgraph, and evaluate the bound formula.
/// Per-cell seeds derive from the master seed, so records are reproducible
/// cell by cell.
pub fn random_turan_sweep(
    pattern: &Pattern,
    params: &SweepParams,
) -> Result<Vec<ExperimentRecord>> {
    let report = compute_densities(pattern)?;
    let mut records = Vec::new();
    let mut cell_index = 0u64;
    for &n in &params.n_list {
        for &p in &params.p_list {
            for trial in 0..params.trials {
                let cell_seed = derive_seed(params.seed, cell_index);
                cell_index += 1;
                let start = std::time::Instant::now();
                let host = Hypergraph::gnp_sample(n, p, pattern.r(), cell_seed)?;
                let (result, note) =
                    match ex_random_subgraph(&host, pattern, params.mode, params.copy_budget) {
                        Ok(res) => (res, None),
                        Err(Error::BudgetExceeded(msg)) => {
                            let fallback = ex_random_subgraph(
                                &host,
                                pattern,
                                MeasureMode::Greedy,
                                None,
                            )?;
                            (fallback, Some(format!("exact refused: {msg}")))
                        }
                        Err(e) => return Err(e),
                    };
                let bound = bound_formula_random_turan(
                    pattern,
                    &report,
                    &params.alpha,
                    n,
                    p,
                    params.variant,
                    params.bound_c,
                )?;
                records.push(ExperimentRecord {
                    n,
                    p,
                    seed: cell_seed,
                    trial,
                    measured: result.value,
                    measured_kind: result.kind,
                    bound_value: bound.value,
                    branch: bound.branch,
                    runtime_ms: start.elapsed().as_millis(),
                    note,
                });
            }
        }
    }
    Ok(records)
}

/// Drains `count` random values from a seeded stream; exposed so callers
/// can sanity-check stream independence in tests.
#[doc(hidden)]
pub fn sample_stream(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| rng.random::<f64>()).collect()
}
