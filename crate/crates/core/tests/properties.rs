mod common;

use orbnet::planarity::Witness;
use orbnet::survey::{enumerate_space, verify_lemmas, LemmaSet, LemmaStatus};
use orbnet::{
    branch_cover_number, build_orbital_graph, certify_planarity, clique_counts, cycle_rank, euler_characteristic,
    inductive_dimension, inductive_dimension_in, ExportFormat, FunctionalDigraph, OrbitalGraph,
};
use proptest::prelude::*;

use common::{brute_force_cliques, brute_force_cover, family, graph_from_mask, MinorOracle};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn random_graphs_agree_with_clique_oracle(n in 1usize..=9, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        prop_assert_eq!(clique_counts(&g).as_slice().to_vec(), brute_force_cliques(&g));
    }

    #[test]
    fn planarity_verdicts_carry_valid_witnesses(n in 5usize..=8, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        let verdict = certify_planarity(&g);
        prop_assert_eq!(verdict.planar, MinorOracle::new().is_planar(&g));
        prop_assert!(verdict.witness.is_some());
        prop_assert!(verdict.witness_holds(&g));
    }

    #[test]
    fn orbital_graphs_of_composite_moduli(n in 2u64..=12, raw in prop::collection::vec(0u64..12, 1..=3)) {
        let mut coeffs: Vec<u64> = raw.into_iter().map(|a| a % n).collect();
        coeffs.sort_unstable();
        coeffs.dedup();
        let f = family(n, &coeffs);
        let g = build_orbital_graph(&f);
        prop_assert_eq!(clique_counts(&g).as_slice().to_vec(), brute_force_cliques(&g));
        let dg = FunctionalDigraph::new(f);
        prop_assert_eq!(branch_cover_number(&dg), brute_force_cover(&dg));
    }
}

#[test]
fn non_planar_orbital_graphs_have_kuratowski_witnesses() {
    let mut kinds = std::collections::BTreeMap::new();
    for f in enumerate_space(29, 2).unwrap().step_by(7) {
        let g = build_orbital_graph(&f);
        let verdict = certify_planarity(&g);
        assert!(!verdict.planar, "{f}");
        match &verdict.witness {
            Some(Witness::Kuratowski(k)) => {
                assert!(k.is_witness_in(&g), "{f}");
                *kinds.entry(format!("{:?}", k.kind)).or_insert(0) += 1;
            }
            other => panic!("{f}: {other:?}"),
        }
    }
    assert!(!kinds.is_empty());
}

#[test]
fn float_dimension_tracks_exact_dimension() {
    for f in enumerate_space(13, 2).unwrap() {
        let g = build_orbital_graph(&f);
        let exact = orbnet::invariants::rational_to_f64(&inductive_dimension(&g));
        let approx: f64 = inductive_dimension_in(&g);
        assert!((exact - approx).abs() < 1e-9, "{f}: {exact} vs {approx}");
    }
}

#[test]
fn json_export_round_trips_through_analysis() {
    for (n, coeffs) in [(53, vec![1, 17]), (7, vec![2, 3]), (1001, vec![5]), (23, vec![4, 20])] {
        let g = build_orbital_graph(&family(n, &coeffs));
        let text = String::from_utf8(g.export(ExportFormat::Json)).unwrap();
        let back = OrbitalGraph::from_json(&text).unwrap();
        assert_eq!(back.graph(), g.graph());
        assert_eq!(euler_characteristic(&back), euler_characteristic(&g));
        assert_eq!(cycle_rank(&back), cycle_rank(&g));
    }
}

#[test]
fn proven_lemmas_hold_on_small_ranges() {
    let primes = orbnet::ring::primes_in(2, 23);
    let reports = verify_lemmas(&primes, &LemmaSet::all(), 0).unwrap();
    for r in &reports {
        assert_ne!(r.status, LemmaStatus::Counterexample, "{} d={} at {:?}", r.lemma, r.d, r.counterexample);
        if r.counterexample.is_some() {
            assert_eq!(r.recheck(), Some(false), "{}", r.lemma);
        }
    }
}
