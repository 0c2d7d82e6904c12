// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Filtered approximate nearest neighbor search over attribute-specific
//! proximity-graph indexes.
//!
//! A [`Relation`] holds primary-keyed tuples of attributes and vectors.
//! Tree indexes (numeric attributes) and hash indexes (categorical
//! attributes) partition the relation and keep one Vamana graph per
//! partition. For a query filter the [`optimizer`] picks a set of graphs
//! whose union covers every matching tuple, and the [`executor`] runs an
//! out-of-range best-first search on each of them and merges the hits.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel builds live in the `pathfinder` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod brute_force;
pub mod distance;
mod error;
pub mod executor;
pub mod graph;
pub mod index;
pub mod optimizer;
pub mod predicate;
pub mod relation;
mod seed;
pub mod topk;

pub use brute_force::{brute_force_topk, recall_at_k};
pub use distance::{distance, DistanceMetric};
pub use error::{Error, Result};
pub use executor::{
    answer, execute, Clock, GraphVisit, NoClock, QueryRequest, QueryResult, QueryStats,
};
pub use graph::{BuildParams, SearchParams, VamanaGraph};
pub use index::{AttributeIndex, CatalogBuilder, IndexCatalog, IndexId, IndexSpec, NodeId};
pub use optimizer::{plan_query, GraphRef, GraphSearchPlan, PlannerConfig, RankKey};
pub use predicate::{
    parse_filter, to_dnf, AtomicPredicate, BoolExpr, ConjunctiveClause, DnfPredicate, Interval,
};
pub use relation::{AttributeKind, AttributeValue, Column, Relation, Schema, TupleRef};
pub use seed::derive_seed;
pub use topk::Neighbor;

/// Primary key of a tuple. Keys are dense: `0..relation.len()`.
pub type Pk = u32;
