//! Property tests across the library: format round trips, sampling
//! statistics, relabeling invariance, and the forbidden-set filter checked
//! by inclusion-exclusion.

use std::collections::BTreeSet;

use proptest::prelude::*;

use supersat::enumerate::{count_copies, enumerate_copies};
use supersat::hypergraph::{EdgeSet, Hypergraph};
use supersat::pattern::Pattern;

fn c4() -> Pattern {
    Pattern::new(Hypergraph::cycle(4).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn edge_list_round_trip(
        n in 2usize..12,
        raw in prop::collection::vec((0usize..12, 0usize..12), 0..25),
    ) {
        let edges: Vec<Vec<usize>> = raw
            .into_iter()
            .filter(|(u, v)| u != v && *u < n && *v < n)
            .map(|(u, v)| vec![u, v])
            .collect();
        let (g, _) = Hypergraph::build(n, 2, edges).unwrap();
        let text = g.serialize_text();
        let back = Hypergraph::parse_text(&text).unwrap();
        prop_assert_eq!(g, back);
    }

    #[test]
    fn relabeling_preserves_copy_count(seed in 0u64..200) {
        let g = Hypergraph::gnp_sample(7, 0.5, 2, seed).unwrap();
        // rotate the vertex labels by the seed
        let shift = (seed as usize) % 7;
        let perm: Vec<usize> = (0..7).map(|v| (v + shift) % 7).collect();
        let relabeled = g.relabel(&perm).unwrap();
        prop_assert_eq!(
            count_copies(&g, &c4()).unwrap(),
            count_copies(&relabeled, &c4()).unwrap()
        );
    }
}

#[test]
fn gnp_edge_count_unbiased() {
    // 1000 seeded draws of G(10, 0.3): the mean edge count should sit
    // within 5 standard errors of 45 * 0.3
    let trials = 1000u64;
    let mut total = 0usize;
    for seed in 0..trials {
        total += Hypergraph::gnp_sample(10, 0.3, 2, seed).unwrap().edge_count();
    }
    let mean = total as f64 / trials as f64;
    let expect = 45.0 * 0.3;
    let se = (45.0 * 0.3 * 0.7 / trials as f64).sqrt();
    assert!(
        (mean - expect).abs() <= 5.0 * se,
        "mean {mean} vs {expect} (se {se})"
    );
}

#[test]
fn uniform_subsets_hit_pairs_uniformly() {
    // w = 2 subsets of 4 vertices: each of the 6 pairs should appear with
    // frequency close to trials/6
    let g = Hypergraph::complete_graph(4).unwrap();
    let trials = 6000u64;
    let mut counts = std::collections::HashMap::new();
    for seed in 0..trials {
        let s = g.uniform_vertex_subset(2, seed).unwrap();
        *counts.entry((s[0], s[1])).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 6);
    let expect = trials as f64 / 6.0;
    let sd = (expect * (5.0 / 6.0)).sqrt();
    for (&pair, &count) in &counts {
        assert!(
            (count as f64 - expect).abs() <= 5.0 * sd,
            "pair {pair:?} seen {count} times, expected about {expect}"
        );
    }
}

/// The filter drops exactly the copies containing a forbidden set: checked
/// directly and via inclusion-exclusion over up to three forbidden sets.
#[test]
fn forbidden_filter_matches_inclusion_exclusion() {
    let pattern = c4();
    for seed in 0u64..30 {
        let g = Hypergraph::gnp_sample(7, 0.6, 2, seed).unwrap();
        let all: Vec<EdgeSet> = enumerate_copies(&g, &pattern, None, &[])
            .unwrap()
            .into_iter()
            .map(|c| c.edge_set)
            .collect();
        if all.len() < 2 {
            continue;
        }
        // forbidden sets: one edge of the first copy, a pair from the
        // second, and (when present) a pair from the last copy
        let mut forbidden = vec![
            EdgeSet::new(vec![all[0].indices()[0]]),
            EdgeSet::new(all[1].indices()[..2].to_vec()),
        ];
        if all.len() > 2 {
            forbidden.push(EdgeSet::new(all[all.len() - 1].indices()[2..].to_vec()));
        }

        let filtered: BTreeSet<EdgeSet> =
            enumerate_copies(&g, &pattern, None, &forbidden)
                .unwrap()
                .into_iter()
                .map(|c| c.edge_set)
                .collect();

        // direct check: survivors are exactly the copies avoiding every
        // forbidden set
        let expected: BTreeSet<EdgeSet> = all
            .iter()
            .filter(|c| !forbidden.iter().any(|f| c.contains_set(f)))
            .cloned()
            .collect();
        assert_eq!(filtered, expected, "seed {seed}");

        // inclusion-exclusion over the forbidden sets reproduces the count
        let containing = |sets: &[&EdgeSet]| -> usize {
            all.iter()
                .filter(|c| sets.iter().all(|f| c.contains_set(f)))
                .count()
        };
        let k = forbidden.len();
        let mut dropped: i64 = 0;
        for mask in 1u32..(1 << k) {
            let chosen: Vec<&EdgeSet> = (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &forbidden[i])
                .collect();
            let sign = if chosen.len() % 2 == 1 { 1 } else { -1 };
            dropped += sign * containing(&chosen) as i64;
        }
        assert_eq!(filtered.len() as i64, all.len() as i64 - dropped, "seed {seed}");
    }
}
