// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

mod common;

use std::collections::BTreeMap;

use common::*;
use pathfinder_core::graph::{best_first_search, build_vamana};
use pathfinder_core::predicate::{Bound, Interval};
use pathfinder_core::topk::merge_topk;
use pathfinder_core::{
    brute_force_topk, to_dnf, BuildParams, DnfPredicate, Error, Neighbor, Pk, SearchParams,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn bound() -> impl Strategy<Value = Option<Bound>> {
    prop_oneof![
        Just(None),
        (-5i32..5).prop_map(|v| Some(Bound::inclusive(v as f64))),
        (-5i32..5).prop_map(|v| Some(Bound::exclusive(v as f64))),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (bound(), bound()).prop_map(|(l, u)| Interval::new(l, u))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn interval_algebra_matches_points(x in interval(), y in interval()) {
        let meet = x.intersect(&y);
        let points: Vec<f64> = (-12..=12).map(|i| i as f64 * 0.5).collect();
        for &v in &points {
            prop_assert_eq!(meet.contains_value(v), x.contains_value(v) && y.contains_value(v));
        }
        if x.contains(&y) {
            for &v in &points {
                prop_assert!(!y.contains_value(v) || x.contains_value(v));
            }
        }
        if !x.overlaps(&y) {
            prop_assert!(points.iter().all(|&v| !meet.contains_value(v)));
        }
        prop_assert_eq!(meet.is_empty(), !x.overlaps(&y));
    }

    #[test]
    fn dnf_preserves_truth(seed in any::<u64>()) {
        let r = relation(200, 2, 1);
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_expr(&mut rng, 3);
        match to_dnf(&e) {
            Ok(d) => {
                for pk in r.pks() {
                    prop_assert_eq!(d.eval(r.tuple(pk)), e.eval(r.tuple(pk)));
                }
                let again = to_dnf(&d.to_expr().unwrap_or(e.clone())).unwrap();
                if !d.is_never() {
                    prop_assert_eq!(again, d);
                }
            }
            Err(Error::TooManyClauses(_)) | Err(Error::Unsatisfiable) => {}
            Err(other) => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn merge_is_sorted_dedup(lists in prop::collection::vec(
        prop::collection::vec((0u32..40, 0u32..1000), 0..20), 0..4), k in 1usize..30) {
        // One distance per key, as in a real relation.
        let dist = |pk: Pk| ((pk * 7919) % 1000) as f32;
        let lists: Vec<Vec<Neighbor>> = lists
            .into_iter()
            .map(|l| l.into_iter().map(|(pk, _)| Neighbor::new(pk, dist(pk))).collect())
            .collect();
        let merged = merge_topk(&lists, k);
        let mut oracle: BTreeMap<Pk, f32> = BTreeMap::new();
        for n in lists.iter().flatten() {
            oracle.insert(n.pk, n.distance);
        }
        let mut expected: Vec<(f32, Pk)> = oracle.into_iter().map(|(p, d)| (d, p)).collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        expected.truncate(k);
        prop_assert_eq!(merged.iter().map(|n| (n.distance, n.pk)).collect::<Vec<_>>(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn full_queue_search_is_exact(seed in any::<u64>(), n in 2usize..120) {
        let r = relation(n, 4, seed);
        let members: Vec<Pk> = r.pks().collect();
        let bp = BuildParams { max_degree: 6, build_queue: 12, prune_alpha: 1.2 };
        let g = build_vamana(&r, &members, bp, seed).unwrap();
        prop_assert_eq!(g.reachable_count(), g.card());
        let q = r.vector(0).to_vec();
        let k = n.min(5);
        let got = best_first_search(&g, &r, &q, SearchParams::new(n, k).unwrap());
        let truth = brute_force_topk(&r, &q, k, &DnfPredicate::always());
        prop_assert_eq!(got, truth);
    }
}
