use std::sync::OnceLock;

use halfgap_core::gap::{solve_gap, Separation};
use halfgap_core::model::NodeId;
use halfgap_core::polytope::{decompose_half_point, is_extreme_circuit, subtour_feasible};
use halfgap_core::{certificate, combine_covers, enumerate_candidates, CoverPairEncoding, HalfPoint, SupportDigraph};
use proptest::prelude::*;

fn candidates(n: usize) -> &'static [CoverPairEncoding] {
    static CACHE: [OnceLock<Vec<CoverPairEncoding>>; 8] = [const { OnceLock::new() }; 8];
    CACHE[n].get_or_init(|| enumerate_candidates(n).unwrap().collect())
}

fn point(p: &CoverPairEncoding) -> HalfPoint {
    let (a, b) = p.covers();
    combine_covers(&a, &b)
}

/// A node count, a candidate index and a relabeling of the nodes.
fn relabeled_candidate() -> impl Strategy<Value = (usize, usize, Vec<NodeId>)> {
    (4usize..=7).prop_flat_map(|n| {
        let sigma = Just((0..n as NodeId).collect::<Vec<_>>()).prop_shuffle();
        (Just(n), 0..candidates(n).len(), sigma)
    })
}

#[test]
fn every_candidate_is_a_standard_disjoint_pair() {
    for n in 4..=7 {
        for p in candidates(n) {
            assert!(p.is_standard(), "{p}");
            let (a, b) = p.covers();
            assert!(a.is_arc_disjoint(&b), "{p}");
            assert!(point(p).is_pure());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificate_ignores_labels((n, i, sigma) in relabeled_candidate()) {
        let x = point(&candidates(n)[i]);
        let y = x.relabeled(&sigma);
        prop_assert_eq!(
            certificate(&SupportDigraph::from_half_point(&x)),
            certificate(&SupportDigraph::from_half_point(&y))
        );
    }

    #[test]
    fn permuted_encoding_has_an_isomorphic_support((n, i, sigma) in relabeled_candidate()) {
        let p = &candidates(n)[i];
        let q = p.apply_permutation(&sigma).unwrap();
        let cert = |p: &CoverPairEncoding| certificate(&SupportDigraph::from_half_point(&point(p)));
        prop_assert_eq!(cert(p), cert(&q));
        for s in q.standardize_pair() {
            prop_assert!(s.is_standard());
            prop_assert_eq!(cert(&s), cert(p));
        }
    }

    #[test]
    fn classification_ignores_labels((n, i, sigma) in relabeled_candidate()) {
        let x = point(&candidates(n)[i]);
        let y = x.relabeled(&sigma);
        prop_assert_eq!(subtour_feasible(&x), subtour_feasible(&y));
        if subtour_feasible(&x) {
            prop_assert_eq!(is_extreme_circuit(&x).unwrap(), is_extreme_circuit(&y).unwrap());
        }
    }

    #[test]
    fn decomposition_recombines((n, i, sigma) in relabeled_candidate()) {
        let x = point(&candidates(n)[i]).relabeled(&sigma);
        let (a, b) = decompose_half_point(&x).unwrap();
        prop_assert!(a.is_arc_disjoint(&b));
        prop_assert_eq!(combine_covers(&a, &b), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gap_ignores_labels(i in 0usize..candidates(6).len(), sigma in Just((0..6).collect::<Vec<NodeId>>()).prop_shuffle()) {
        let x = point(&candidates(6)[i]);
        prop_assume!(subtour_feasible(&x) && is_extreme_circuit(&x).unwrap());
        let a = solve_gap(&x, Separation::Delayed).unwrap();
        let b = solve_gap(&x.relabeled(&sigma), Separation::Delayed).unwrap();
        prop_assert_eq!(a.objective, b.objective);
    }
}
