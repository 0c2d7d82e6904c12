// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Cost-based planning: choose, per conjunctive clause, the cheapest set of
//! index graphs that covers it, then merge the per-clause choices per index.
//!
//! Plans are ranked by `Σ card(g) × |G|^α`; smaller is better.

mod borrow;
mod conjunction;
mod disjunction;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::VamanaGraph;
use crate::index::{IndexCatalog, IndexId, NodeId};
use crate::predicate::DnfPredicate;

pub use borrow::{borrow_rewrite, synthesize_hash, synthesize_tree, Borrow};
pub use conjunction::{
    find_second_plan, find_single_graph, plan_conjunction, Candidate, ClausePlan,
};
pub use disjunction::optimize_group;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Penalty exponent on the number of graphs.
    pub alpha: f64,
    pub borrowing: bool,
    /// Minimum correlation score for borrowing another attribute's index.
    pub correlation_threshold: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            alpha: 0.4,
            borrowing: true,
            correlation_threshold: 0.3,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidParams(alloc::format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if !self.correlation_threshold.is_finite() {
            return Err(Error::InvalidParams(
                "correlation threshold must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// A graph in the catalog. Node 0 of every index is the shared root and is
/// always named `Root`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphRef {
    Root,
    Node { index: IndexId, node: NodeId },
}

impl GraphRef {
    pub fn node(index: IndexId, node: NodeId) -> Self {
        if node == NodeId::ROOT {
            Self::Root
        } else {
            Self::Node { index, node }
        }
    }

    pub fn index(&self) -> Option<IndexId> {
        match self {
            Self::Root => None,
            Self::Node { index, .. } => Some(*index),
        }
    }
}

impl IndexCatalog {
    pub fn graph(&self, g: GraphRef) -> &Arc<VamanaGraph> {
        match g {
            GraphRef::Root => self.root_graph(),
            GraphRef::Node { index, node } => &self.index(index).node(node).graph,
        }
    }

    pub fn card(&self, g: GraphRef) -> usize {
        self.graph(g).card()
    }
}

/// Ranking key of a graph set; see [`RankKey::cmp_rank`].
#[derive(Debug, Clone, PartialEq)]
pub struct RankKey {
    /// `Σ card × |G|^α`.
    pub value: f64,
    pub covering: bool,
    pub graphs: usize,
    pub total_card: usize,
    /// Sorted graph set.
    pub refs: Vec<GraphRef>,
}

impl RankKey {
    /// Total order, best first: covering sets, then smaller value, fewer
    /// graphs, smaller total cardinality, then the graph ids.
    pub fn cmp_rank(&self, other: &Self) -> Ordering {
        other
            .covering
            .cmp(&self.covering)
            .then_with(|| self.cmp_ignoring_cover(other))
    }

    /// As [`cmp_rank`](Self::cmp_rank) without the covering flag.
    pub fn cmp_ignoring_cover(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.graphs.cmp(&other.graphs))
            .then(self.total_card.cmp(&other.total_card))
            .then_with(|| self.refs.cmp(&other.refs))
    }
}

/// Rank of a graph set given each member's cardinality.
pub fn rank_cards(
    refs: &[(GraphRef, usize)],
    covering: bool,
    cfg: &PlannerConfig,
) -> Result<RankKey> {
    if refs.is_empty() {
        return Err(Error::EmptyGraphSet);
    }
    let mut sorted: Vec<(GraphRef, usize)> = refs.to_vec();
    sorted.sort();
    sorted.dedup_by_key(|e| e.0);
    let total_card: usize = sorted.iter().map(|e| e.1).sum();
    let graphs = sorted.len();
    let value = total_card as f64 * libm::pow(graphs as f64, cfg.alpha);
    Ok(RankKey {
        value,
        covering,
        graphs,
        total_card,
        refs: sorted.into_iter().map(|e| e.0).collect(),
    })
}

/// Rank of a set of catalog graphs.
pub fn rank(
    cat: &IndexCatalog,
    graphs: &[GraphRef],
    covering: bool,
    cfg: &PlannerConfig,
) -> Result<RankKey> {
    let refs: Vec<(GraphRef, usize)> = graphs.iter().map(|&g| (g, cat.card(g))).collect();
    rank_cards(&refs, covering, cfg)
}

/// One graph of the final plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub graph: GraphRef,
    pub card: usize,
    /// Clauses whose per-clause plans led to this graph.
    pub clauses: Vec<usize>,
}

/// Per-index merge step, before and after.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTrace {
    pub index: IndexId,
    pub before: Vec<GraphRef>,
    pub after: Vec<GraphRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSearchPlan {
    /// The filter as given; execution always applies this.
    pub filter: DnfPredicate,
    pub clauses: Vec<ClausePlan>,
    pub groups: Vec<GroupTrace>,
    /// Sorted by graph; empty when no tuple can match.
    pub entries: Vec<PlanEntry>,
}

impl GraphSearchPlan {
    pub fn graphs(&self) -> impl Iterator<Item = GraphRef> + '_ {
        self.entries.iter().map(|e| e.graph)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Per-clause choices, deduplicated, before merging.
    pub fn pre_merge(&self) -> Vec<GraphRef> {
        let set: BTreeSet<GraphRef> = self
            .clauses
            .iter()
            .flat_map(|c| c.chosen.iter().copied())
            .collect();
        set.into_iter().collect()
    }
}

/// Plans a DNF filter: one plan per clause, deduplicated, then merged per
/// index.
pub fn plan_query(
    p: &DnfPredicate,
    cat: &IndexCatalog,
    cfg: &PlannerConfig,
) -> Result<GraphSearchPlan> {
    cfg.validate()?;
    let clauses: Vec<ClausePlan> = p
        .clauses()
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| plan_conjunction(c, cat, cfg))
        .collect::<Result<_>>()?;

    let mut provenance: BTreeMap<GraphRef, BTreeSet<usize>> = BTreeMap::new();
    for (i, c) in clauses.iter().enumerate() {
        for &g in &c.chosen {
            provenance.entry(g).or_default().insert(i);
        }
    }
    let has_root = provenance.contains_key(&GraphRef::Root);
    let mut by_index: BTreeMap<IndexId, Vec<NodeId>> = BTreeMap::new();
    for g in provenance.keys() {
        if let GraphRef::Node { index, node } = *g {
            by_index.entry(index).or_default().push(node);
        }
    }

    let mut groups = Vec::new();
    let mut final_set: BTreeMap<GraphRef, BTreeSet<usize>> = BTreeMap::new();
    if has_root {
        final_set.insert(GraphRef::Root, provenance[&GraphRef::Root].clone());
    }
    for (index, mut nodes) in by_index {
        if has_root {
            nodes.push(NodeId::ROOT);
        }
        let before: Vec<GraphRef> = sorted_refs(index, &nodes);
        let merged = optimize_group(cat, index, &nodes, cfg)?;
        let after: Vec<GraphRef> = merged.iter().map(|m| GraphRef::node(index, m.0)).collect();
        for (node, origins) in merged {
            let entry = final_set.entry(GraphRef::node(index, node)).or_default();
            for o in origins {
                if let Some(cl) = provenance.get(&GraphRef::node(index, o)) {
                    entry.extend(cl.iter().copied());
                }
            }
        }
        groups.push(GroupTrace {
            index,
            before,
            after,
        });
    }

    let entries = final_set
        .into_iter()
        .map(|(graph, cl)| PlanEntry {
            graph,
            card: cat.card(graph),
            clauses: cl.into_iter().collect(),
        })
        .collect();
    Ok(GraphSearchPlan {
        filter: p.clone(),
        clauses,
        groups,
        entries,
    })
}

fn sorted_refs(index: IndexId, nodes: &[NodeId]) -> Vec<GraphRef> {
    let set: BTreeSet<GraphRef> = nodes.iter().map(|&n| GraphRef::node(index, n)).collect();
    set.into_iter().collect()
}
