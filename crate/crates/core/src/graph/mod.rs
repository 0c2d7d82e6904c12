// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Vamana proximity graphs over subsets of a relation.
//!
//! Vertices are primary keys. Internally adjacency is stored as positions
//! into the sorted member list.

mod build;
mod prune;
mod search;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Pk;

pub use build::build_vamana;
pub use prune::robust_prune;
pub use search::{
    best_first_search, best_first_search_traced, oor_search, search_with_filter, SearchOutput,
    SearchStats, TraceEvent,
};

/// Construction knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildParams {
    /// Maximum out-degree `R`.
    pub max_degree: usize,
    /// Queue length used by the insertion searches.
    pub build_queue: usize,
    /// Robust-prune factor for the second pass (the first pass uses 1).
    pub prune_alpha: f32,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            max_degree: 32,
            build_queue: 128,
            prune_alpha: 1.2,
        }
    }
}

impl BuildParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_degree < 2 {
            return Err(Error::InvalidParams(format!(
                "max degree {} < 2",
                self.max_degree
            )));
        }
        if self.build_queue < self.max_degree {
            return Err(Error::InvalidParams(format!(
                "build queue {} < max degree {}",
                self.build_queue, self.max_degree
            )));
        }
        if !self.prune_alpha.is_finite() || self.prune_alpha < 1.0 {
            return Err(Error::InvalidParams(format!(
                "prune alpha {} < 1",
                self.prune_alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    /// Search queue length `L`.
    pub queue_len: usize,
    /// Number of results `K`.
    pub k: usize,
}

impl SearchParams {
    pub fn new(queue_len: usize, k: usize) -> Result<Self> {
        let sp = Self { queue_len, k };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.queue_len < self.k {
            return Err(Error::InvalidParams(format!(
                "need L >= K >= 1, got L={} K={}",
                self.queue_len, self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VamanaGraph {
    members: Vec<Pk>,
    adjacency: Vec<Vec<u32>>,
    entry: u32,
    max_degree: usize,
}

impl VamanaGraph {
    /// Assembles a graph from pk-level parts, checking every invariant.
    pub fn from_parts(
        members: Vec<Pk>,
        adjacency: Vec<Vec<Pk>>,
        entry: Pk,
        max_degree: usize,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyMembers);
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedGraph("members not strictly sorted".into()));
        }
        if adjacency.len() != members.len() {
            return Err(Error::MalformedGraph(format!(
                "{} adjacency lists for {} members",
                adjacency.len(),
                members.len()
            )));
        }
        let local = |pk: Pk| members.binary_search(&pk).ok().map(|i| i as u32);
        let entry = local(entry)
            .ok_or_else(|| Error::MalformedGraph(format!("entry {entry} is not a member")))?;
        let mut adj = Vec::with_capacity(adjacency.len());
        for (i, list) in adjacency.iter().enumerate() {
            if list.len() > max_degree {
                return Err(Error::MalformedGraph(format!(
                    "vertex {} has degree {} > {max_degree}",
                    members[i],
                    list.len()
                )));
            }
            let mut out = Vec::with_capacity(list.len());
            for &pk in list {
                let j = local(pk).ok_or_else(|| {
                    Error::MalformedGraph(format!("neighbor {pk} is not a member"))
                })?;
                if j as usize == i || out.contains(&j) {
                    return Err(Error::MalformedGraph(format!(
                        "bad edge {} -> {pk}",
                        members[i]
                    )));
                }
                out.push(j);
            }
            adj.push(out);
        }
        Ok(Self {
            members,
            adjacency: adj,
            entry,
            max_degree,
        })
    }

    pub(crate) fn from_local(
        members: Vec<Pk>,
        adjacency: Vec<Vec<u32>>,
        entry: u32,
        max_degree: usize,
    ) -> Self {
        debug_assert_eq!(members.len(), adjacency.len());
        Self {
            members,
            adjacency,
            entry,
            max_degree,
        }
    }

    pub fn card(&self) -> usize {
        self.members.len()
    }

    /// Sorted member keys.
    pub fn members(&self) -> &[Pk] {
        &self.members
    }

    pub fn entry(&self) -> Pk {
        self.members[self.entry as usize]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn contains(&self, pk: Pk) -> bool {
        self.members.binary_search(&pk).is_ok()
    }

    pub fn neighbors(&self, pk: Pk) -> Option<impl Iterator<Item = Pk> + '_> {
        let i = self.members.binary_search(&pk).ok()?;
        Some(self.adjacency[i].iter().map(|&j| self.members[j as usize]))
    }

    /// Adjacency lists in member order, as keys.
    pub fn adjacency(&self) -> impl Iterator<Item = Vec<Pk>> + '_ {
        self.adjacency
            .iter()
            .map(|l| l.iter().map(|&j| self.members[j as usize]).collect())
    }

    pub(crate) fn local_entry(&self) -> u32 {
        self.entry
    }

    pub(crate) fn local_neighbors(&self, i: u32) -> &[u32] {
        &self.adjacency[i as usize]
    }

    /// Members reachable from the entry point by following edges.
    pub fn reachable_count(&self) -> usize {
        let mut seen = alloc::vec![false; self.card()];
        let mut stack = alloc::vec![self.entry];
        seen[self.entry as usize] = true;
        let mut n = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v as usize] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    n += 1;
                    stack.push(u);
                }
            }
        }
        n
    }
}
