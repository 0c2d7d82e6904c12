// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

#![allow(dead_code)]

use std::sync::Arc;

use pathfinder_core::predicate::{AtomicPredicate, BoolExpr, Interval};
use pathfinder_core::{
    BuildParams, CatalogBuilder, Column, IndexCatalog, IndexSpec, Relation, Schema,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const T: usize = 3;
pub const CATEGORIES: usize = 8;

/// `n` tuples in `dim` dimensions. `a` uniform on [0, 100), `b = a` plus
/// small noise (not indexed), `c` integer on [0, 30), `t` one of eight
/// categories.
pub fn relation(n: usize, dim: usize, seed: u64) -> Arc<Relation> {
    let mut rng = StdRng::seed_from_u64(seed);
    let flat: Vec<f32> = (0..n * dim).map(|_| rng.random::<f32>()).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
    let b: Vec<f64> = a.iter().map(|x| x + rng.random_range(-2.0..2.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(0..30) as f64).collect();
    let t: Vec<String> = (0..n)
        .map(|_| format!("t{}", rng.random_range(0..CATEGORIES)))
        .collect();
    let schema = Schema::new([
        ("a", pathfinder_core::AttributeKind::Numeric),
        ("b", pathfinder_core::AttributeKind::Numeric),
        ("c", pathfinder_core::AttributeKind::Numeric),
        ("t", pathfinder_core::AttributeKind::Categorical),
    ])
    .unwrap();
    Arc::new(
        Relation::from_columns(
            schema,
            dim,
            flat,
            vec![
                Column::Numeric(a),
                Column::Numeric(b),
                Column::Numeric(c),
                Column::categorical(t),
            ],
        )
        .unwrap(),
    )
}

pub fn small_params() -> BuildParams {
    BuildParams {
        max_degree: 12,
        build_queue: 32,
        prune_alpha: 1.2,
    }
}

/// Trees on `a` (binary, four layers) and `c` (three-way, three layers),
/// a hash index on `t`; `b` is left unindexed.
pub fn catalog(r: Arc<Relation>, seed: u64) -> IndexCatalog {
    CatalogBuilder::new(r)
        .index(IndexSpec::Tree {
            attr: "a".into(),
            fanout: 2,
            height: 4,
        })
        .index(IndexSpec::Tree {
            attr: "c".into(),
            fanout: 3,
            height: 3,
        })
        .index(IndexSpec::Hash { attr: "t".into() })
        .params(small_params())
        .seed(seed)
        .build()
        .unwrap()
}

pub fn random_atom(rng: &mut impl Rng) -> AtomicPredicate {
    match rng.random_range(0..4) {
        attr @ (A | B) => {
            let lo = rng.random_range(-5.0..100.0f64);
            let hi = lo + rng.random_range(0.0..40.0);
            let iv = match rng.random_range(0..4) {
                0 => Interval::at_most(hi),
                1 => Interval::greater_than(lo),
                2 => Interval::left_open(lo, hi),
                _ => Interval::closed(lo, hi),
            };
            AtomicPredicate::range(attr, iv)
        }
        C => {
            let lo = rng.random_range(0..30) as f64;
            AtomicPredicate::range(C, Interval::closed(lo, lo + rng.random_range(0..8) as f64))
        }
        _ => {
            let k = rng.random_range(1..=3);
            AtomicPredicate::in_set(
                T,
                (0..k).map(|_| format!("t{}", rng.random_range(0..CATEGORIES))),
            )
        }
    }
}

/// A random AND/OR tree of depth at most `depth`.
pub fn random_expr(rng: &mut impl Rng, depth: usize) -> BoolExpr {
    if depth == 0 || rng.random_bool(0.3) {
        return BoolExpr::Atom(random_atom(rng));
    }
    let n = rng.random_range(2..=3);
    let parts = (0..n).map(|_| random_expr(rng, depth - 1)).collect();
    if rng.random_bool(0.5) {
        BoolExpr::And(parts)
    } else {
        BoolExpr::Or(parts)
    }
}
