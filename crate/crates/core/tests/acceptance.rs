//! Acceptance gate: one test per criterion, each checked against an
//! independent oracle implemented here (subset brute force, permutation
//! counting, exhaustive hitting sets, direct big-rational arithmetic).
//! Every criterion prints a single PASS/FAIL line.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use supersat::enumerate::{count_copies, embedding_count, enumerate_copies};
use supersat::family::{
    build_balanced_family, codegree_function, replay_audit, verify_certificate, BetaMode,
    BuildOptions, Cutoff,
};
use supersat::hypergraph::{binomial, seeded_rng, EdgeSet, Hypergraph};
use supersat::pattern::{
    bound_formula_random_turan, compute_densities, compute_exponents, rational_to_f64,
    BoundBranch, BoundVariant, Pattern,
};
use supersat::turan::{
    ex_exact, ex_random_subgraph, random_subset_experiment, MeasureMode,
    SubsetExperimentParams,
};

fn criterion<F: FnOnce() + UnwindSafe>(number: u32, name: &str, f: F) {
    let outcome = catch_unwind(f);
    match &outcome {
        Ok(()) => println!("criterion {number:2} ({name}): PASS"),
        Err(_) => println!("criterion {number:2} ({name}): FAIL"),
    }
    if let Err(panic) = outcome {
        resume_unwind(panic);
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pat(g: Hypergraph) -> Pattern {
    Pattern::new(g).unwrap()
}

fn c4() -> Pattern {
    pat(Hypergraph::cycle(4).unwrap())
}

/// Brute-force r-density pair: max of (e(F)-1)/(v(F)-r) over every
/// nonempty edge subset (all subsets for m_r, proper ones for m*_r),
/// taking v(F) as the support, padded with an isolated vertex when the
/// support does not exceed r.
fn oracle_densities(g: &Hypergraph) -> (BigRational, BigRational) {
    let ell = g.edge_count();
    let r = g.r();
    let full: u64 = (1 << ell) - 1;
    let mut m: Option<BigRational> = None;
    let mut m_star: Option<BigRational> = None;
    for mask in 1u64..=full {
        let mut support: BTreeSet<usize> = BTreeSet::new();
        let mut e = 0i64;
        for i in 0..ell {
            if mask & (1 << i) != 0 {
                e += 1;
                support.extend(g.edge(i).iter().copied());
            }
        }
        let s = support.len();
        let ratio = if s > r {
            rat(e - 1, (s - r) as i64)
        } else {
            BigRational::zero()
        };
        let update = |slot: &mut Option<BigRational>| {
            if slot.as_ref().is_none_or(|cur| &ratio > cur) {
                *slot = Some(ratio.clone());
            }
        };
        update(&mut m);
        if mask != full {
            update(&mut m_star);
        }
    }
    (m.unwrap(), m_star.unwrap())
}

#[test]
fn criterion_1_density_oracle_equivalence() {
    criterion(1, "density oracle equivalence", || {
        let start = Instant::now();
        let mut corpus: Vec<Hypergraph> = vec![
            Hypergraph::cycle(4).unwrap(),
            Hypergraph::cycle(6).unwrap(),
            Hypergraph::cycle(8).unwrap(),
            Hypergraph::complete_bipartite(2, 2).unwrap(),
            Hypergraph::complete_bipartite(2, 3).unwrap(),
            Hypergraph::complete_bipartite(3, 3).unwrap(),
            Hypergraph::cube().unwrap(),
        ];
        for m in 2..=7 {
            corpus.push(Hypergraph::path(m).unwrap()); // h = m + 1 <= 8
        }
        for g in corpus {
            let (m_oracle, m_star_oracle) = oracle_densities(&g);
            let report = compute_densities(&pat(g)).unwrap();
            assert_eq!(report.m_r, m_oracle);
            assert_eq!(report.m_star_r, m_star_oracle);
        }
        assert!(start.elapsed().as_secs() < 10);
    });
}

#[test]
fn criterion_2_even_cycle_specializations() {
    criterion(2, "even-cycle specialization identities", || {
        for lc in 2i64..=6 {
            let pattern = pat(Hypergraph::cycle(2 * lc as usize).unwrap());
            let report = compute_densities(&pattern).unwrap();
            assert_eq!(report.m_r, rat(2 * lc - 1, 2 * lc - 2));
            assert_eq!(report.m_star_r, BigRational::one());
            assert!(report.strictly_balanced);

            let alpha = rat(lc + 1, lc); // 1 + 1/l
            let exps = compute_exponents(&report, &pattern, &alpha, 1.0, 100).unwrap();
            assert_eq!(exps.lambda_star, rat(lc, lc - 1));
            assert_eq!(exps.phi, Some(rat(lc - 1, lc * (2 * lc - 1))));

            // numeric instantiation at 20 sample points, against the
            // closed forms written directly in terms of l
            let lf = lc as f64;
            let alpha_f = rational_to_f64(&alpha);
            for &n in &[50usize, 120, 300, 700, 1500] {
                for &p in &[1e-6f64, 1e-3, 0.05, 0.9] {
                    let eval = bound_formula_random_turan(
                        &pattern,
                        &report,
                        &alpha,
                        n,
                        p,
                        BoundVariant::EsGood,
                        1.0,
                    )
                    .unwrap();
                    let nf = n as f64;
                    let threshold = nf.powf(-(lf - 1.0) / (2.0 * lf - 1.0))
                        * nf.ln().powf(2.0 * lf);
                    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
                    assert!(rel(eval.threshold, threshold) <= 1e-12);
                    if p <= threshold {
                        assert_eq!(eval.branch, BoundBranch::Low);
                        let low = nf.powf(1.0 + 1.0 / (2.0 * lf - 1.0)) * nf.ln().powi(2);
                        assert!(rel(eval.value, low) <= 1e-12);
                    } else {
                        assert_eq!(eval.branch, BoundBranch::High);
                        let high = p.powf(1.0 / lf) * nf.powf(1.0 + 1.0 / lf);
                        assert!(rel(eval.value, high) <= 1e-12);
                    }
                    // the high-branch identity p^{1-1/lambda*} n^alpha =
                    // p^{1/l} n^{1+1/l}, checked off the exact exponents
                    let lam_star = rational_to_f64(&exps.lambda_star);
                    let via_exponents = p.powf(1.0 - 1.0 / lam_star) * nf.powf(alpha_f);
                    let closed = p.powf(1.0 / lf) * nf.powf(1.0 + 1.0 / lf);
                    assert!(rel(via_exponents, closed) <= 1e-12);
                }
            }
        }
    });
}

/// Permutation-based oracle: embeddings of the pattern graph in the host,
/// plus the set of distinct copies (as sorted lists of host edges).
fn oracle_embeddings(host: &Hypergraph, pattern_graph: &Hypergraph) -> (usize, BTreeSet<Vec<Vec<usize>>>) {
    let host_edges: HashSet<Vec<usize>> = host.edges().iter().cloned().collect();
    let h = pattern_graph.n();
    let mut embeddings = 0usize;
    let mut copies = BTreeSet::new();
    for image in (0..host.n()).permutations(h) {
        let mut mapped: Vec<Vec<usize>> = Vec::with_capacity(pattern_graph.edge_count());
        let mut ok = true;
        for e in pattern_graph.edges() {
            let mut img: Vec<usize> = e.iter().map(|&v| image[v]).collect();
            img.sort_unstable();
            if !host_edges.contains(&img) {
                ok = false;
                break;
            }
            mapped.push(img);
        }
        if ok {
            embeddings += 1;
            mapped.sort();
            copies.insert(mapped);
        }
    }
    (embeddings, copies)
}

#[test]
fn criterion_3_copy_counting_oracle() {
    criterion(3, "copy-counting oracle equivalence", || {
        let start = Instant::now();
        let pool: Vec<Hypergraph> = vec![
            Hypergraph::cycle(4).unwrap(),
            Hypergraph::cycle(6).unwrap(),
            Hypergraph::complete_graph(3).unwrap(),
            Hypergraph::complete_graph(4).unwrap(),
            Hypergraph::complete_bipartite(2, 2).unwrap(),
            Hypergraph::complete_bipartite(2, 3).unwrap(),
            Hypergraph::path(3).unwrap(),
            Hypergraph::path(5).unwrap(),
        ];
        for seed in 0u64..200 {
            let n = 4 + (seed as usize % 5); // 4..=8
            let p = [0.3, 0.5, 0.8][seed as usize % 3];
            let host = Hypergraph::gnp_sample(n, p, 2, seed).unwrap();
            let pattern_graph = &pool[seed as usize % pool.len()];
            let pattern = pat(pattern_graph.clone());

            let (emb_oracle, copies_oracle) = oracle_embeddings(&host, pattern_graph);
            let counted = count_copies(&host, &pattern).unwrap();
            let enumerated = enumerate_copies(&host, &pattern, None, &[]).unwrap();
            let ec = embedding_count(&host, &pattern).unwrap();

            assert_eq!(counted, copies_oracle.len());
            assert_eq!(enumerated.len(), counted);
            assert_eq!(ec.embeddings, emb_oracle);
            let (aut_oracle, _) = oracle_embeddings(pattern_graph, pattern_graph);
            assert_eq!(ec.automorphisms, aut_oracle);
            assert_eq!(counted * aut_oracle, emb_oracle);

            // the enumerated copies are exactly the oracle's
            let as_edge_lists: BTreeSet<Vec<Vec<usize>>> = enumerated
                .iter()
                .map(|c| {
                    c.edge_set
                        .indices()
                        .iter()
                        .map(|&i| host.edge(i).to_vec())
                        .collect()
                })
                .collect();
            assert_eq!(as_edge_lists, copies_oracle);
        }
        assert!(start.elapsed().as_secs() < 60);
    });
}

#[test]
fn criterion_4_binomial_inequalities_exhaustive() {
    criterion(4, "binomial ratio inequalities, n <= 30", || {
        for h in 1usize..=30 {
            for w in h..=30 {
                for n in w..=30 {
                    // independent arithmetic straight from the binomials
                    let ratio = BigRational::new(binomial(n - h, w - h), binomial(n, w));
                    let wn = rat(w as i64, n as i64);
                    let mut upper = BigRational::one();
                    for _ in 0..h {
                        upper *= &wn;
                    }
                    assert!(ratio <= upper, "upper fails at n={n} w={w} h={h}");
                    if w >= h * h {
                        let two = BigRational::from(BigInt::from(2));
                        assert!(
                            &ratio * &two >= upper,
                            "lower fails at n={n} w={w} h={h}"
                        );
                    }
                    // and the library agrees with itself
                    let b = supersat::hypergraph::binom_ratio_bounds(n, w, h).unwrap();
                    assert_eq!(b.ratio, ratio);
                    assert!(b.upper_holds);
                    assert_eq!(b.lower_holds, (w >= h * h).then_some(true));
                }
            }
        }
    });
}

/// Exhaustive maximum pattern-free edge count over all 2^m subsets.
fn oracle_ex_exhaustive(n: usize, pattern: &Pattern) -> usize {
    let all: Vec<Vec<usize>> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| vec![u, v]))
        .collect();
    let m = all.len();
    let mut best = 0usize;
    for mask in 0u64..(1 << m) {
        let count = mask.count_ones() as usize;
        if count <= best {
            continue;
        }
        let edges: Vec<Vec<usize>> =
            (0..m).filter(|i| mask & (1 << i) != 0).map(|i| all[i].clone()).collect();
        let g = Hypergraph::build(n, 2, edges).unwrap().0;
        if count_copies(&g, pattern).unwrap() == 0 {
            best = count;
        }
    }
    best
}

#[test]
fn criterion_5_deletion_bound_property() {
    criterion(5, "copy count vs deletion lower bound", || {
        let pattern = c4();
        // pinned regression values, re-certified exhaustively
        assert_eq!(oracle_ex_exhaustive(4, &pattern), 4);
        assert_eq!(oracle_ex_exhaustive(5, &pattern), 6);
        let ex_by_n: Vec<usize> = (4..=7)
            .map(|n| ex_exact(n, &pattern, None).unwrap().ex_value)
            .collect();
        assert_eq!(ex_by_n[0], 4);
        assert_eq!(ex_by_n[1], 6);

        for seed in 0u64..100 {
            let n = 4 + (seed as usize % 4); // 4..=7
            let g = Hypergraph::gnp_sample(n, 0.5, 2, seed).unwrap();
            let copies = count_copies(&g, &pattern).unwrap();
            let ex_n = ex_by_n[n - 4];
            assert!(copies >= g.edge_count().saturating_sub(ex_n));
        }
    });
}

#[test]
fn criterion_6_balanced_family_certificate() {
    criterion(6, "balanced family certificate on G(60, 1/2)", || {
        let start = Instant::now();
        let host = Hypergraph::gnp_sample(60, 0.5, 2, 6).unwrap();
        let options = BuildOptions {
            k_override: None,
            n_target: Some(500),
            c: 100.0,
            delta_prime: 1.0,
            beta_mode: BetaMode::Thm2,
            cutoff: Cutoff::EllMinusOne,
        };
        let (family, report) =
            build_balanced_family(&host, &c4(), &rat(3, 2), &options).unwrap();
        assert!(report.reached_target, "shortfall: {:?}", report.shortfall);
        assert_eq!(family.members.len(), 500);

        let cert = verify_certificate(&family);
        assert!(cert.satisfied, "worst ratio {}", cert.worst_ratio);
        assert!(cert.worst_ratio <= 1.0);
        assert!(cert.degree_index_consistent);

        let audit = replay_audit(&family);
        assert!(audit.sound, "first violation at {:?}", audit.first_violation);

        assert!(start.elapsed().as_secs() < 120);
    });
}

/// Direct evaluation of the codegree function from its definition: for
/// each vertex of the family (a host edge index) and each size j, take the
/// maximum family degree over j-sets through it, counting degrees by
/// scanning the member list.
fn oracle_codegree(members: &[EdgeSet], ell: usize, tau: f64) -> f64 {
    let vertices: BTreeSet<usize> = members
        .iter()
        .flat_map(|m| m.indices().iter().copied())
        .collect();
    let degree_of = |set: &[usize]| -> u64 {
        members
            .iter()
            .filter(|m| set.iter().all(|&v| m.contains(v)))
            .count() as u64
    };
    let mut per_size = vec![0u64; ell + 1];
    #[allow(clippy::needless_range_loop)] // j is a subset size, not a position
    for &v in &vertices {
        for j in 2..=ell {
            let mut best = 0u64;
            for member in members.iter().filter(|m| m.contains(v)) {
                let rest: Vec<usize> =
                    member.indices().iter().copied().filter(|&u| u != v).collect();
                for sub in rest.iter().copied().combinations(j - 1) {
                    let mut set = sub;
                    set.push(v);
                    best = best.max(degree_of(&set));
                }
            }
            per_size[j] += best;
        }
    }
    let mut total = 0.0f64;
    for (j, &sum) in per_size.iter().enumerate().skip(2) {
        total += tau.powi(1 - j as i32) * sum as f64;
    }
    total / members.len() as f64
}

#[test]
fn criterion_7_codegree_oracle() {
    criterion(7, "codegree function oracle equivalence", || {
        use rand::seq::index::sample;
        let mut rng = seeded_rng(7);
        for fam in 0usize..50 {
            let ell = 2 + fam % 5; // 2..=6
            let size = 1 + (fam * 7) % 50;
            let members: Vec<EdgeSet> = (0..size)
                .map(|_| EdgeSet::new(sample(&mut rng, 30, ell).into_vec()))
                .collect();
            for &tau in &[1.0f64, 0.5] {
                let got = codegree_function(&members, ell, tau).unwrap();
                let want = oracle_codegree(&members, ell, tau);
                assert_eq!(got, want, "family {fam}, tau {tau}");
            }
        }
        // single-member analytic value: sum_{j=2..l} l tau^{1-j}
        for ell in 2usize..=6 {
            let member = EdgeSet::new((0..ell).collect());
            for &tau in &[1.0f64, 0.5, 2.0] {
                let got = codegree_function(std::slice::from_ref(&member), ell, tau).unwrap();
                let want: f64 =
                    (2..=ell).map(|j| ell as f64 * tau.powi(1 - j as i32)).sum();
                assert!((got - want).abs() <= 1e-12 * want.abs());
            }
        }
    });
}

/// Exhaustive minimum hitting set by increasing size over the union of the
/// copies' edges.
fn oracle_min_hitting_set_size(copies: &[EdgeSet]) -> usize {
    if copies.is_empty() {
        return 0;
    }
    let universe: Vec<usize> = copies
        .iter()
        .flat_map(|c| c.indices().iter().copied())
        .collect::<BTreeSet<usize>>()
        .into_iter()
        .collect();
    for size in 1..=universe.len() {
        for candidate in universe.iter().copied().combinations(size) {
            if copies
                .iter()
                .all(|c| candidate.iter().any(|&e| c.contains(e)))
            {
                return size;
            }
        }
    }
    unreachable!("the full universe hits everything");
}

#[test]
fn criterion_8_exact_random_turan_cell() {
    criterion(8, "exact cell vs exhaustive hitting set", || {
        let pattern = c4();
        let mut tested = 0usize;
        for seed in 0u64..60 {
            let n = 6 + (seed as usize % 2);
            let g = Hypergraph::gnp_sample(n, 0.4, 2, seed).unwrap();
            let copies: Vec<EdgeSet> = enumerate_copies(&g, &pattern, None, &[])
                .unwrap()
                .into_iter()
                .map(|c| c.edge_set)
                .collect();
            if copies.len() > 20 {
                continue;
            }
            let hs = oracle_min_hitting_set_size(&copies);
            let exact = ex_random_subgraph(&g, &pattern, MeasureMode::Exact, None).unwrap();
            assert_eq!(exact.value, g.edge_count() - hs);
            let greedy = ex_random_subgraph(&g, &pattern, MeasureMode::Greedy, None).unwrap();
            assert!(greedy.value <= exact.value);
            tested += 1;
        }
        assert!(tested >= 20, "only {tested} instances had <= 20 copies");

        // p = 1: the cell is K_n and the exact measurement is ex(n, H)
        for n in 4..=6 {
            let kn = Hypergraph::complete_graph(n).unwrap();
            let exact = ex_random_subgraph(&kn, &pattern, MeasureMode::Exact, None).unwrap();
            assert_eq!(exact.value, ex_exact(n, &pattern, None).unwrap().ex_value);
        }
    });
}

#[test]
fn criterion_9_hypergeometric_sampling() {
    criterion(9, "hypergeometric sampling mean", || {
        let host = Hypergraph::complete_graph(40).unwrap();
        let params = SubsetExperimentParams {
            alpha: rat(3, 2),
            a_const: 1.0,
            trials: 500,
            seed: 9,
            w_override: Some(10),
            count_copies: false,
        };
        let report = random_subset_experiment(&host, &c4(), &params).unwrap();
        // e(G) C(38, 8)/C(40, 10) computed independently: 780 * 90/1560 = 45
        let expect = BigRational::new(
            BigInt::from(780) * binomial(38, 8),
            binomial(40, 10),
        );
        assert_eq!(expect, rat(45, 1));
        assert!((report.hypergeometric_expectation - 45.0).abs() < 1e-9);
        // K40 is edge-transitive enough that every 10-subset induces
        // exactly C(10,2) = 45 edges, so the mean is exact and the
        // standard error degenerates to zero
        let se = report.std_error_induced_edges;
        assert!(
            (report.mean_induced_edges - 45.0).abs() <= 4.0 * se,
            "mean {} vs 45 with se {}",
            report.mean_induced_edges,
            se
        );

        // non-degenerate companion: same check on a sparse seeded host,
        // where the variance is positive
        let sparse = Hypergraph::gnp_sample(40, 0.5, 2, 90).unwrap();
        let report = random_subset_experiment(&sparse, &c4(), &params).unwrap();
        let expect = sparse.edge_count() as f64
            * rational_to_f64(&BigRational::new(binomial(38, 8), binomial(40, 10)));
        assert!((report.hypergeometric_expectation - expect).abs() < 1e-9);
        let se = report.std_error_induced_edges;
        assert!(se > 0.0);
        assert!(
            (report.mean_induced_edges - expect).abs() <= 4.0 * se,
            "mean {} vs {} with se {}",
            report.mean_induced_edges,
            expect,
            se
        );
    });
}

#[test]
fn criterion_10_cli_determinism() {
    criterion(10, "seeded CLI runs are byte-identical", || {
        use std::process::Command;
        let bin = env!("CARGO_BIN_EXE_supersat");
        let dir = tempfile::tempdir().unwrap();
        let path = |name: &str| dir.path().join(name);
        let run = |args: &[&str]| {
            let status = Command::new(bin).args(args).status().unwrap();
            assert!(status.success(), "supersat {args:?} failed");
        };

        // sample
        for out in ["s1.txt", "s2.txt"] {
            run(&[
                "sample", "--n", "30", "--p", "0.5", "--seed", "11", "--out",
                path(out).to_str().unwrap(),
            ]);
        }
        let s1 = std::fs::read(path("s1.txt")).unwrap();
        let s2 = std::fs::read(path("s2.txt")).unwrap();
        assert_eq!(s1, s2);

        // build-family bundle (no timing fields)
        for out in ["b1.json", "b2.json"] {
            run(&[
                "build-family",
                "--host",
                path("s1.txt").to_str().unwrap(),
                "--pattern",
                "builtin:cycle:4",
                "--alpha",
                "3/2",
                "--beta-mode",
                "thm2",
                "--n-target",
                "30",
                "--c",
                "60",
                "--out",
                path(out).to_str().unwrap(),
            ]);
        }
        let b1 = std::fs::read(path("b1.json")).unwrap();
        let b2 = std::fs::read(path("b2.json")).unwrap();
        assert_eq!(b1, b2);

        // random-turan CSV, compared with the runtime_ms column stripped
        for out in ["r1.csv", "r2.csv"] {
            run(&[
                "random-turan",
                "--pattern",
                "builtin:cycle:4",
                "--alpha",
                "3/2",
                "--n-list",
                "6,7",
                "--p-list",
                "0.3,1",
                "--trials",
                "2",
                "--mode",
                "exact",
                "--seed",
                "4",
                "--out",
                path(out).to_str().unwrap(),
            ]);
        }
        let strip = |name: &str| -> String {
            std::fs::read_to_string(path(name))
                .unwrap()
                .lines()
                .map(|line| {
                    if line.starts_with('#') {
                        line.to_string()
                    } else {
                        line.rsplit_once(',').map(|(rest, _)| rest.to_string()).unwrap()
                    }
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip("r1.csv"), strip("r2.csv"));
    });
}
