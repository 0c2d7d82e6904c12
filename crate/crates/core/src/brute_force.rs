// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Exact filtered search (pre-filtering scan) and recall.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::predicate::{DnfPredicate, Matcher};
use crate::relation::Relation;
use crate::topk::{Neighbor, TopK};
use crate::Pk;

/// The `min(k, matches)` nearest tuples satisfying `p`, ascending by
/// `(distance, pk)`.
pub fn brute_force_topk(r: &Relation, q: &[f32], k: usize, p: &DnfPredicate) -> Vec<Neighbor> {
    let m = Matcher::new(p, r);
    let mut top = TopK::new(k);
    for pk in r.pks() {
        if m.matches(pk) {
            top.push(Neighbor::new(pk, r.distance_to(q, pk)));
        }
    }
    top.into_vec()
}

/// `|result ∩ truth| / k`.
pub fn recall_at_k(result: &[Pk], truth: &[Pk], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let truth: BTreeSet<Pk> = truth.iter().copied().collect();
    let hit = result
        .iter()
        .copied()
        .collect::<BTreeSet<Pk>>()
        .intersection(&truth)
        .count();
    Ok(hit as f64 / k as f64)
}
