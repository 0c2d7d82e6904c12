// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Two-pass Vamana construction.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::prune::prune_with;
use super::search::Pool;
use super::{BuildParams, VamanaGraph};
use crate::distance::DistanceMetric;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::Pk;

const MEDOID_SAMPLE: usize = 1000;

struct Local {
    dim: usize,
    data: Vec<f32>,
    metric: DistanceMetric,
}

impl Local {
    #[inline]
    fn vec(&self, i: u32) -> &[f32] {
        let s = i as usize * self.dim;
        &self.data[s..s + self.dim]
    }

    #[inline]
    fn dist(&self, a: u32, b: u32) -> f32 {
        self.metric.eval(self.vec(a), self.vec(b))
    }
}

/// Builds a graph over `members` (any order, duplicates removed).
///
/// Sets with at most `R + 1` members get the complete graph.
pub fn build_vamana(
    r: &Relation,
    members: &[Pk],
    bp: BuildParams,
    seed: u64,
) -> Result<VamanaGraph> {
    bp.validate()?;
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::EmptyMembers);
    }
    if let Some(&pk) = members.iter().find(|&&pk| pk as usize >= r.len()) {
        return Err(Error::InvalidParams(alloc::format!(
            "member {pk} out of range for {} tuples",
            r.len()
        )));
    }
    let n = members.len();
    let dim = r.dim();
    let mut data = Vec::with_capacity(n * dim);
    for &pk in &members {
        data.extend_from_slice(r.vector(pk));
    }
    let local = Local {
        dim,
        data,
        metric: r.metric(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entry = medoid(&local, n, &mut rng);
    let rdeg = bp.max_degree;

    if n <= rdeg + 1 {
        let adjacency = (0..n as u32)
            .map(|i| (0..n as u32).filter(|&j| j != i).collect())
            .collect();
        return Ok(VamanaGraph::from_local(members, adjacency, entry, rdeg));
    }

    let mut adjacency: Vec<Vec<u32>> = (0..n as u32)
        .map(|i| {
            sample(&mut rng, n - 1, rdeg)
                .into_iter()
                .map(|j| {
                    let j = j as u32;
                    if j >= i {
                        j + 1
                    } else {
                        j
                    }
                })
                .collect()
        })
        .collect();

    let mut stamps = vec![0u32; n];
    let mut generation = 0u32;
    let mut order: Vec<u32> = (0..n as u32).collect();
    for alpha in [1.0f32, bp.prune_alpha] {
        order.shuffle(&mut rng);
        for &v in &order {
            generation += 1;
            let mut cands = greedy_visit(
                &local,
                &adjacency,
                entry,
                v,
                bp.build_queue,
                &mut stamps,
                generation,
            );
            for &u in &adjacency[v as usize] {
                cands.push((local.dist(v, u), u));
            }
            let out = prune_with(v, &mut cands, alpha, rdeg, |a, b| local.dist(a, b));
            adjacency[v as usize] = out;
            for k in 0..adjacency[v as usize].len() {
                let u = adjacency[v as usize][k];
                let list = &mut adjacency[u as usize];
                if list.contains(&v) {
                    continue;
                }
                if list.len() < rdeg {
                    list.push(v);
                } else {
                    let mut cands: Vec<(f32, u32)> =
                        list.iter().map(|&w| (local.dist(u, w), w)).collect();
                    cands.push((local.dist(u, v), v));
                    *list = prune_with(u, &mut cands, alpha, rdeg, |a, b| local.dist(a, b));
                }
            }
        }
    }
    Ok(VamanaGraph::from_local(members, adjacency, entry, rdeg))
}

/// Member minimizing total distance to a sample (all members when small).
fn medoid(local: &Local, n: usize, rng: &mut ChaCha8Rng) -> u32 {
    let probe: Vec<u32> = if n <= MEDOID_SAMPLE {
        (0..n as u32).collect()
    } else {
        let mut s: Vec<u32> = sample(rng, n, MEDOID_SAMPLE)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        s.sort_unstable();
        s
    };
    let mut best = (f64::INFINITY, 0u32);
    for i in 0..n as u32 {
        let total: f64 = probe.iter().map(|&j| local.dist(i, j) as f64).sum();
        if total < best.0 {
            best = (total, i);
        }
    }
    best.1
}

/// Greedy search toward `target`, returning every visited vertex with its
/// distance to `target`.
fn greedy_visit(
    local: &Local,
    adjacency: &[Vec<u32>],
    entry: u32,
    target: u32,
    queue: usize,
    stamps: &mut [u32],
    generation: u32,
) -> Vec<(f32, u32)> {
    let q = local.vec(target);
    let mut pool = Pool::new(queue);
    let mut visited = Vec::with_capacity(queue * 2);
    let d = local.metric.eval(q, local.vec(entry));
    stamps[entry as usize] = generation;
    visited.push((d, entry));
    pool.offer(d, entry);
    while let Some((_, v)) = pool.next_unexpanded() {
        for &u in &adjacency[v as usize] {
            if stamps[u as usize] != generation {
                stamps[u as usize] = generation;
                let d = local.metric.eval(q, local.vec(u));
                visited.push((d, u));
                pool.offer(d, u);
            }
        }
    }
    visited
}
