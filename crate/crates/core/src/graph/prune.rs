// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::vec;
use alloc::vec::Vec;

use crate::relation::Relation;
use crate::topk::Neighbor;
use crate::Pk;

/// Robust prune over ids of any kind.
///
/// `candidates` holds `(distance to v, id)`. Repeatedly keeps the closest
/// surviving candidate `p` and drops every `c` with
/// `alpha * dist(p, c) <= d(v, c)`, until `max_degree` are kept.
pub(crate) fn prune_with<D>(
    v: u32,
    candidates: &mut Vec<(f32, u32)>,
    alpha: f32,
    max_degree: usize,
    dist: D,
) -> Vec<u32>
where
    D: Fn(u32, u32) -> f32,
{
    candidates.retain(|&(_, c)| c != v);
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates.dedup_by_key(|c| c.1);

    let mut kept = Vec::with_capacity(max_degree);
    let mut alive = vec![true; candidates.len()];
    for i in 0..candidates.len() {
        if !alive[i] {
            continue;
        }
        let p = candidates[i].1;
        kept.push(p);
        if kept.len() >= max_degree {
            break;
        }
        for j in i + 1..candidates.len() {
            if alive[j] {
                let (dvc, c) = candidates[j];
                if alpha * dist(p, c) <= dvc {
                    alive[j] = false;
                }
            }
        }
    }
    kept
}

/// Robust prune on primary keys; candidate distances are to `v`.
pub fn robust_prune(
    r: &Relation,
    v: Pk,
    candidates: &[Neighbor],
    alpha: f32,
    max_degree: usize,
) -> Vec<Pk> {
    let mut c: Vec<(f32, u32)> = candidates.iter().map(|n| (n.distance, n.pk)).collect();
    prune_with(v, &mut c, alpha, max_degree, |a, b| {
        r.distance_between(a, b)
    })
}
