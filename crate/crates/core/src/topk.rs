// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Result ordering shared by every search path.
//!
//! Hits are ordered by `(distance, pk)`: equal distances are broken in favor
//! of the smaller primary key, so exact and approximate answers can be
//! compared element by element.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::Pk;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub pk: Pk,
    pub distance: f32,
}

impl Neighbor {
    pub fn new(pk: Pk, distance: f32) -> Self {
        Self { pk, distance }
    }

    /// Total order: ascending distance, then ascending pk.
    #[inline]
    pub fn cmp_rank(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.pk.cmp(&other.pk))
    }
}

/// A bounded list of the `capacity` best neighbors, kept sorted.
#[derive(Debug, Clone)]
pub struct TopK {
    capacity: usize,
    items: Vec<Neighbor>,
}

impl TopK {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            items: Vec::with_capacity(capacity.min(1024) + 1),
        }
    }

    /// Offers a candidate; returns true if it was kept.
    pub fn push(&mut self, n: Neighbor) -> bool {
        if self.capacity == 0 {
            return false;
        }
        if self.items.len() == self.capacity {
            let worst = self.items[self.items.len() - 1];
            if n.cmp_rank(&worst) != Ordering::Less {
                return false;
            }
            self.items.pop();
        }
        let at = self
            .items
            .partition_point(|x| x.cmp_rank(&n) == Ordering::Less);
        self.items.insert(at, n);
        true
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[Neighbor] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<Neighbor> {
        self.items
    }
}

/// Merges hit lists from several searches: deduplicates by pk and keeps
/// the global best `k`.
pub fn merge_topk<I>(lists: I, k: usize) -> Vec<Neighbor>
where
    I: IntoIterator,
    I::Item: AsRef<[Neighbor]>,
{
    let mut all: Vec<Neighbor> = Vec::new();
    for l in lists {
        all.extend_from_slice(l.as_ref());
    }
    all.sort_by(|a, b| a.pk.cmp(&b.pk).then(a.distance.total_cmp(&b.distance)));
    all.dedup_by_key(|n| n.pk);
    all.sort_by(Neighbor::cmp_rank);
    all.truncate(k);
    all
}
