// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Best-first search with a bounded queue, and its out-of-range variant.
//!
//! The queue keeps the `L` closest vertices seen so far (ties broken by
//! key, the larger key is evicted first). The closest unexpanded vertex is
//! expanded next; the search stops when every queued vertex has been
//! expanded, i.e. no newly reached neighbor is closer than the farthest
//! queued vertex.

use alloc::vec;
use alloc::vec::Vec;

use super::{SearchParams, VamanaGraph};
use crate::predicate::{DnfPredicate, Matcher};
use crate::relation::Relation;
use crate::topk::{Neighbor, TopK};
use crate::Pk;

#[derive(Debug, Clone, Copy)]
struct Cand {
    dist: f32,
    id: u32,
    expanded: bool,
}

impl Cand {
    #[inline]
    fn before(&self, dist: f32, id: u32) -> bool {
        match self.dist.total_cmp(&dist) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Equal => self.id < id,
            core::cmp::Ordering::Greater => false,
        }
    }
}

pub(crate) enum Offer {
    Inserted { evicted: Option<u32> },
    Rejected,
}

/// Sorted candidate queue with an expansion cursor.
pub(crate) struct Pool {
    cap: usize,
    items: Vec<Cand>,
    cursor: usize,
}

impl Pool {
    pub(crate) fn new(cap: usize) -> Self {
        Self {
            cap,
            items: Vec::with_capacity(cap + 1),
            cursor: 0,
        }
    }

    pub(crate) fn offer(&mut self, dist: f32, id: u32) -> Offer {
        if self.items.len() == self.cap {
            let worst = self.items[self.cap - 1];
            if worst.before(dist, id) {
                return Offer::Rejected;
            }
        }
        let at = self.items.partition_point(|c| c.before(dist, id));
        self.items.insert(
            at,
            Cand {
                dist,
                id,
                expanded: false,
            },
        );
        if at < self.cursor {
            self.cursor = at;
        }
        let evicted = if self.items.len() > self.cap {
            self.items.pop().map(|c| c.id)
        } else {
            None
        };
        Offer::Inserted { evicted }
    }

    /// Marks the closest unexpanded candidate expanded and returns it.
    pub(crate) fn next_unexpanded(&mut self) -> Option<(f32, u32)> {
        while self.cursor < self.items.len() && self.items[self.cursor].expanded {
            self.cursor += 1;
        }
        let c = self.items.get_mut(self.cursor)?;
        c.expanded = true;
        let out = (c.dist, c.id);
        self.cursor += 1;
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Vertices whose distance to the query was computed.
    pub visited: usize,
    /// Vertices whose adjacency was expanded.
    pub expanded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutput {
    pub hits: Vec<Neighbor>,
    pub stats: SearchStats,
}

/// Queue events, in order, for inspecting a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Expand(Pk),
    Insert(Pk),
    Evict(Pk),
    Reject(Pk),
}

fn run<F>(
    g: &VamanaGraph,
    r: &Relation,
    q: &[f32],
    sp: SearchParams,
    mut accept: F,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> SearchOutput
where
    F: FnMut(Pk) -> bool,
{
    let members = g.members();
    let mut visited = vec![false; members.len()];
    let mut pool = Pool::new(sp.queue_len.max(1));
    let mut results = TopK::new(sp.k);
    let mut stats = SearchStats::default();

    let mut reach =
        |id: u32, pool: &mut Pool, results: &mut TopK, trace: &mut Option<&mut Vec<TraceEvent>>| {
            let pk = members[id as usize];
            let d = r.distance_to(q, pk);
            stats.visited += 1;
            if accept(pk) {
                results.push(Neighbor::new(pk, d));
            }
            let outcome = pool.offer(d, id);
            if let Some(t) = trace.as_deref_mut() {
                match outcome {
                    Offer::Inserted { evicted } => {
                        t.push(TraceEvent::Insert(pk));
                        if let Some(e) = evicted {
                            t.push(TraceEvent::Evict(members[e as usize]));
                        }
                    }
                    Offer::Rejected => t.push(TraceEvent::Reject(pk)),
                }
            }
        };

    let entry = g.local_entry();
    visited[entry as usize] = true;
    reach(entry, &mut pool, &mut results, &mut trace);

    let mut expanded = 0;
    while let Some((_, v)) = pool.next_unexpanded() {
        expanded += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent::Expand(members[v as usize]));
        }
        for &u in g.local_neighbors(v) {
            if !visited[u as usize] {
                visited[u as usize] = true;
                reach(u, &mut pool, &mut results, &mut trace);
            }
        }
    }
    stats.expanded = expanded;
    SearchOutput {
        hits: results.into_vec(),
        stats,
    }
}

/// Plain best-first search: the top-K of the visited set.
pub fn best_first_search(
    g: &VamanaGraph,
    r: &Relation,
    q: &[f32],
    sp: SearchParams,
) -> Vec<Neighbor> {
    run(g, r, q, sp, |_| true, None).hits
}

/// Best-first search that also records queue events.
pub fn best_first_search_traced(
    g: &VamanaGraph,
    r: &Relation,
    q: &[f32],
    sp: SearchParams,
) -> (Vec<Neighbor>, Vec<TraceEvent>) {
    let mut trace = Vec::new();
    let out = run(g, r, q, sp, |_| true, Some(&mut trace));
    (out.hits, trace)
}

/// Out-of-range search: navigation ignores the filter; a separate queue of
/// size K keeps the closest visited members that pass it.
pub fn oor_search(
    g: &VamanaGraph,
    r: &Relation,
    q: &[f32],
    sp: SearchParams,
    p: &DnfPredicate,
) -> Vec<Neighbor> {
    let m = Matcher::new(p, r);
    run(g, r, q, sp, |pk| m.matches(pk), None).hits
}

/// Out-of-range search with an arbitrary acceptance test, returning stats.
pub fn search_with_filter<F>(
    g: &VamanaGraph,
    r: &Relation,
    q: &[f32],
    sp: SearchParams,
    accept: F,
) -> SearchOutput
where
    F: FnMut(Pk) -> bool,
{
    run(g, r, q, sp, accept, None)
}
