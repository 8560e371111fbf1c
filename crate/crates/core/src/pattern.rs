//! Forbidden patterns and the exponents derived from them: r-densities,
//! lambda, lambda*, phi, and the codegree ratio beta.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;
use crate::{Error, Result};

/// The forbidden r-partite r-graph H, with cached counts and (when it
/// exists) a witness r-partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    graph: Hypergraph,
    h: usize,
    ell: usize,
    r_partite: Option<Vec<usize>>,
}

impl Pattern {
    /// Wraps a hypergraph as a pattern. Patterns with a single edge are
    /// allowed for enumeration; the density and exponent operations require
    /// at least two edges and reject smaller patterns themselves.
    pub fn new(graph: Hypergraph) -> Result<Self> {
        if graph.edge_count() == 0 {
            return Err(Error::TooFewPatternEdges(0));
        }
        let partition = r_partite_witness(&graph);
        Ok(Pattern {
            h: graph.n(),
            ell: graph.edge_count(),
            r_partite: partition,
            graph,
        })
    }

    /// Restores the incidence lists after deserialization.
    pub fn rebuild_incidence(&mut self) {
        self.graph.rebuild_incidence();
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    /// Vertex count h.
    pub fn h(&self) -> usize {
        self.h
    }

    /// Edge count l.
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn r(&self) -> usize {
        self.graph.r()
    }

    pub fn is_r_partite(&self) -> bool {
        self.r_partite.is_some()
    }

    /// Part assignment per vertex, when the pattern is r-partite.
    pub fn partition(&self) -> Option<&[usize]> {
        self.r_partite.as_deref()
    }
}

/// Exact decision of r-partiteness by backtracking over part assignments;
/// returns the witness part assignment when one exists. Exponential time,
/// fine for the small patterns this crate targets.
pub fn r_partite_witness(g: &Hypergraph) -> Option<Vec<usize>> {
    let r = g.r();
    let mut parts = vec![usize::MAX; g.n()];
    fn assign(g: &Hypergraph, parts: &mut Vec<usize>, v: usize, r: usize) -> bool {
        if v == g.n() {
            return true;
        }
        for part in 0..r {
            parts[v] = part;
            let ok = g.incident(v).iter().all(|&ei| {
                let mut seen = 0u64;
                g.edge(ei).iter().all(|&u| {
                    if parts[u] == usize::MAX {
                        true
                    } else {
                        let bit = 1u64 << parts[u];
                        let fresh = seen & bit == 0;
                        seen |= bit;
                        fresh
                    }
                })
            });
            if ok && assign(g, parts, v + 1, r) {
                return true;
            }
        }
        parts[v] = usize::MAX;
        false
    }
    if assign(g, &mut parts, 0, r) {
        Some(parts)
    } else {
        None
    }
}

/// A subgraph achieving a density maximum: the vertex set together with the
/// number of edges used on it (all induced edges for m_r witnesses; one
/// fewer for the drop-an-edge case of m*_r).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityWitness {
    pub vertices: Vec<usize>,
    pub edge_count: usize,
}

impl DensityWitness {
    /// The ratio (e(F) - 1)/(v(F) - r) this witness claims.
    pub fn ratio(&self, r: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.edge_count as i64 - 1),
            BigInt::from(self.vertices.len() as i64 - r as i64),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(with = "rational_string")]
    pub m_r: BigRational,
    #[serde(with = "rational_string")]
    pub m_star_r: BigRational,
    pub strictly_balanced: bool,
    pub witness_mr: DensityWitness,
    pub witness_mstar: DensityWitness,
}

/// Exact r-density m_r(H) and proper r-density m*_r(H), maximizing
/// (e(F)-1)/(v(F)-r) over subgraphs F with v(F) > r.
///
/// For a fixed vertex set, taking every available edge maximizes the ratio,
/// so the maximization runs over vertex subsets with the full induced edge
/// set; the only proper subgraph on the full vertex set that can matter for
/// m*_r drops a single edge. The reduction is cross-checked against an
/// all-subgraphs oracle in the acceptance suite.
pub fn compute_densities(pattern: &Pattern) -> Result<DensityReport> {
    let g = pattern.graph();
    let (h, r, ell) = (pattern.h(), pattern.r(), pattern.ell());
    if h <= r {
        return Err(Error::PatternTooSmall { h, r });
    }
    if ell < 2 {
        return Err(Error::TooFewPatternEdges(ell));
    }
    let mut m_r: Option<(BigRational, DensityWitness)> = None;
    let mut m_star: Option<(BigRational, DensityWitness)> = None;
    let full: Vec<usize> = (0..h).collect();

    let consider = |best: &mut Option<(BigRational, DensityWitness)>, w: DensityWitness| {
        let ratio = w.ratio(r);
        match best {
            Some((b, _)) if *b >= ratio => {}
            _ => *best = Some((ratio, w)),
        }
    };

    for mask in 0u64..(1u64 << h) {
        let count = mask.count_ones() as usize;
        if count <= r {
            continue;
        }
        let vertices: Vec<usize> = (0..h).filter(|i| mask & (1 << i) != 0).collect();
        let edge_count = g
            .edges()
            .iter()
            .filter(|e| e.iter().all(|&v| mask & (1 << v) != 0))
            .count();
        let w = DensityWitness { vertices, edge_count };
        consider(&mut m_r, w.clone());
        if count < h {
            consider(&mut m_star, w);
        }
    }
    // proper subgraph on the full vertex set: drop one edge
    consider(
        &mut m_star,
        DensityWitness { vertices: full, edge_count: ell - 1 },
    );

    let (m_r, witness_mr) = m_r.expect("v(H) > r, so at least one subset qualifies");
    let (m_star_r, witness_mstar) = m_star.expect("drop-one-edge candidate always present");
    Ok(DensityReport {
        strictly_balanced: m_r > m_star_r,
        m_r,
        m_star_r,
        witness_mr,
        witness_mstar,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentSet {
    #[serde(with = "rational_string")]
    pub alpha: BigRational,
    #[serde(with = "rational_string")]
    pub lambda: BigRational,
    #[serde(with = "rational_string")]
    pub lambda_star: BigRational,
    /// Only defined for graphs (r = 2).
    #[serde(with = "rational_string_opt")]
    pub phi: Option<BigRational>,
    pub beta_thm1: f64,
    /// max{(1/k) n^{-phi}, k^{-lambda*}}; only for r = 2.
    pub beta_thm2: Option<f64>,
    pub k: f64,
    pub n: usize,
    /// Whether the theorems' hypothesis alpha > r - 1/m_r(H) holds.
    pub alpha_hypothesis_ok: bool,
    /// lambda > 1, the exponent shape the supersaturation conjecture needs.
    pub lambda_gt_one: bool,
}

/// All exponents determined by (H, alpha) plus both beta values at
/// the given (k, n).
pub fn compute_exponents(
    report: &DensityReport,
    pattern: &Pattern,
    alpha: &BigRational,
    k: f64,
    n: usize,
) -> Result<ExponentSet> {
    let r = pattern.r();
    let r_rat = BigRational::from(BigInt::from(r));
    if alpha >= &r_rat || !alpha.is_positive() {
        return Err(Error::BadAlpha { alpha: alpha.to_string(), r });
    }
    let (h, ell) = (pattern.h(), pattern.ell());
    if ell < 2 {
        return Err(Error::TooFewPatternEdges(ell));
    }
    let r_minus_alpha = &r_rat - alpha;
    let lambda = (&report.m_r * &r_minus_alpha).recip();
    let lambda_star = (&report.m_star_r * &r_minus_alpha).recip();
    let phi = (r == 2).then(|| {
        let ell_rat = BigRational::from(BigInt::from(ell));
        let h_rat = BigRational::from(BigInt::from(h));
        (alpha * &ell_rat - alpha + h_rat - BigRational::from(BigInt::from(2 * ell)))
            / (ell_rat - BigRational::one())
    });
    let beta_thm1 = k.powf(-rational_to_f64(&lambda));
    let beta_thm2 = phi.as_ref().map(|phi| {
        let low = (1.0 / k) * (n as f64).powf(-rational_to_f64(phi));
        let high = k.powf(-rational_to_f64(&lambda_star));
        low.max(high)
    });
    let alpha_hypothesis_ok = alpha > &(&r_rat - report.m_r.recip());
    let lambda_gt_one = lambda > BigRational::one();
    Ok(ExponentSet {
        alpha: alpha.clone(),
        lambda,
        lambda_star,
        phi,
        beta_thm1,
        beta_thm2,
        k,
        n,
        alpha_hypothesis_ok,
        lambda_gt_one,
    })
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// The general bound: C n^{2-1/m_2} below the threshold p = n^{-1/m_2},
    /// C p^{1-1/lambda} n^alpha above it.
    General,
    /// The bound for patterns with the random-like copy-count lower bound:
    /// C n^{alpha-phi} (log n)^2 below the threshold, C p^{1-1/lambda*}
    /// n^alpha above it.
    EsGood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundBranch {
    Low,
    High,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub value: f64,
    pub branch: BoundBranch,
    /// The p-threshold separating the two branches.
    pub threshold: f64,
}

/// Evaluates the piecewise random-Turán bound shape at (n, p) with the
/// multiplicative constant supplied by the caller (the theorems' constants
/// are existential; default 1 evaluates the shape alone).
pub fn bound_formula_random_turan(
    pattern: &Pattern,
    report: &DensityReport,
    alpha: &BigRational,
    n: usize,
    p: f64,
    variant: BoundVariant,
    c: f64,
) -> Result<BoundEvaluation> {
    if pattern.r() != 2 {
        return Err(Error::UniformityMismatch { host: 2, pattern: pattern.r() });
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::BadProbability(p));
    }
    let exps = compute_exponents(report, pattern, alpha, 1.0, n)?;
    let nf = n as f64;
    let alpha_f = rational_to_f64(alpha);
    match variant {
        BoundVariant::General => {
            let inv_m2 = rational_to_f64(&report.m_r.recip());
            let threshold = nf.powf(-inv_m2);
            if p <= threshold {
                Ok(BoundEvaluation {
                    value: c * nf.powf(2.0 - inv_m2),
                    branch: BoundBranch::Low,
                    threshold,
                })
            } else {
                let lambda = rational_to_f64(&exps.lambda);
                Ok(BoundEvaluation {
                    value: c * p.powf(1.0 - 1.0 / lambda) * nf.powf(alpha_f),
                    branch: BoundBranch::High,
                    threshold,
                })
            }
        }
        BoundVariant::EsGood => {
            let lambda_star = rational_to_f64(&exps.lambda_star);
            let phi = rational_to_f64(exps.phi.as_ref().expect("r = 2"));
            let logn = nf.ln();
            let threshold = nf.powf(-phi * lambda_star / (lambda_star - 1.0))
                * logn.powf(2.0 * lambda_star / (lambda_star - 1.0));
            if p <= threshold {
                Ok(BoundEvaluation {
                    value: c * nf.powf(alpha_f - phi) * logn * logn,
                    branch: BoundBranch::Low,
                    threshold,
                })
            } else {
                Ok(BoundEvaluation {
                    value: c * p.powf(1.0 - 1.0 / lambda_star) * nf.powf(alpha_f),
                    branch: BoundBranch::High,
                    threshold,
                })
            }
        }
    }
}

/// Serialize BigRational as "p/q" so JSON output stays exact.
mod rational_string {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(|e| D::Error::custom(e.to_string()))
    }
}

mod rational_string_opt {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&q.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<BigRational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| super::parse_rational(&s).map_err(|e| D::Error::custom(e.to_string())))
            .transpose()
    }
}

/// Parses an exact rational from `p/q`, an integer, or a finite decimal
/// (e.g. `1.5` becomes 3/2).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse { line: 0, msg: format!("bad rational `{s}`") };
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Ok(BigRational::new(num, den))
    } else if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let combined: BigInt = format!("{int}{frac}").parse().map_err(|_| err())?;
        Ok(BigRational::new(combined, BigInt::from(10u32).pow(digits)))
    } else {
        let num: BigInt = s.parse().map_err(|_| err())?;
        Ok(BigRational::from(num))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cycle_pattern(m: usize) -> Pattern {
        Pattern::new(Hypergraph::cycle(m).unwrap()).unwrap()
    }

    #[test]
    fn c4_densities() {
        let report = compute_densities(&cycle_pattern(4)).unwrap();
        assert_eq!(report.m_r, rat(3, 2));
        assert_eq!(report.m_star_r, rat(1, 1));
        assert!(report.strictly_balanced);
    }

    #[test]
    fn c6_densities() {
        let report = compute_densities(&cycle_pattern(6)).unwrap();
        assert_eq!(report.m_r, rat(5, 4));
        assert_eq!(report.m_star_r, rat(1, 1));
    }

    #[test]
    fn k33_density() {
        let p = Pattern::new(Hypergraph::complete_bipartite(3, 3).unwrap()).unwrap();
        let report = compute_densities(&p).unwrap();
        assert_eq!(report.m_r, rat(2, 1));
    }

    #[test]
    fn partiteness() {
        assert!(cycle_pattern(4).is_r_partite());
        let c5 = Pattern::new(Hypergraph::cycle(5).unwrap()).unwrap();
        assert!(!c5.is_r_partite());
        let (single, _) = Hypergraph::build(4, 3, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert!(r_partite_witness(&single).is_some());
    }

    #[test]
    fn partition_witness_valid() {
        let p = cycle_pattern(6);
        let parts = p.partition().unwrap();
        for e in p.graph().edges() {
            assert_ne!(parts[e[0]], parts[e[1]]);
        }
    }

    #[test]
    fn c4_exponents() {
        let p = cycle_pattern(4);
        let report = compute_densities(&p).unwrap();
        let alpha = rat(3, 2);
        let exps = compute_exponents(&report, &p, &alpha, 2.0, 100).unwrap();
        assert_eq!(exps.lambda, rat(4, 3));
        assert_eq!(exps.lambda_star, rat(2, 1));
        assert_eq!(exps.phi, Some(rat(1, 6)));
        assert!(exps.lambda_gt_one);
        assert!(exps.alpha_hypothesis_ok);
    }

    #[test]
    fn c6_exponents() {
        let p = cycle_pattern(6);
        let report = compute_densities(&p).unwrap();
        let alpha = rat(4, 3);
        let exps = compute_exponents(&report, &p, &alpha, 2.0, 100).unwrap();
        assert_eq!(exps.lambda_star, rat(3, 2));
        assert_eq!(exps.phi, Some(rat(2, 15)));
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        let p = cycle_pattern(4);
        let report = compute_densities(&p).unwrap();
        assert!(compute_exponents(&report, &p, &rat(2, 1), 2.0, 100).is_err());
        assert!(compute_exponents(&report, &p, &rat(-1, 2), 2.0, 100).is_err());
    }

    #[test]
    fn es_good_branch_values_c4() {
        let p = cycle_pattern(4);
        let report = compute_densities(&p).unwrap();
        let alpha = rat(3, 2);
        let n = 1000;
        let eval =
            bound_formula_random_turan(&p, &report, &alpha, n, 0.5, BoundVariant::EsGood, 1.0)
                .unwrap();
        // threshold n^{-1/3} (log n)^4 exceeds 1 at this n, so any p lands
        // in the low branch n^{3/2 - 1/6} (log n)^2
        let t = (n as f64).powf(-1.0 / 3.0) * (n as f64).ln().powf(4.0);
        assert!((eval.threshold - t).abs() / t < 1e-12);
        assert!(t > 1.0);
        assert_eq!(eval.branch, BoundBranch::Low);
        let expect = (n as f64).powf(4.0 / 3.0) * (n as f64).ln().powi(2);
        assert!((eval.value - expect).abs() / expect < 1e-12);
        // the general variant's threshold n^{-2/3} is tiny, so p = 0.5
        // exercises the high branch p^{1 - 1/lambda} n^alpha with lambda = 4/3
        let gen =
            bound_formula_random_turan(&p, &report, &alpha, n, 0.5, BoundVariant::General, 1.0)
                .unwrap();
        assert_eq!(gen.branch, BoundBranch::High);
        let expect = 0.5f64.powf(0.25) * (n as f64).powf(1.5);
        assert!((gen.value - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
