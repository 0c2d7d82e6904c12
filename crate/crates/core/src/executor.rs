// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Plan execution: an out-of-range search per planned graph under the
//! original filter, merged into one top-K.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{search_with_filter, SearchParams};
use crate::index::IndexCatalog;
use crate::optimizer::{plan_query, GraphRef, GraphSearchPlan, PlannerConfig};
use crate::predicate::{DnfPredicate, Matcher};
use crate::topk::{merge_topk, Neighbor};

#[derive(Debug, Clone, PartialEq)]
pub struct QueryRequest {
    pub q: Vec<f32>,
    pub k: usize,
    /// Queue length used on every graph of the plan.
    pub l: usize,
    pub filter: DnfPredicate,
}

impl QueryRequest {
    pub fn new(q: Vec<f32>, k: usize, l: usize, filter: DnfPredicate) -> Self {
        Self { q, k, l, filter }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphVisit {
    pub graph: GraphRef,
    pub visited: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub per_graph: Vec<GraphVisit>,
    pub plan_nanos: u64,
    pub search_nanos: u64,
}

impl QueryStats {
    /// Distance computations over all graphs.
    pub fn visited(&self) -> usize {
        self.per_graph.iter().map(|g| g.visited).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    /// Ordered by `(distance, pk)`; every hit satisfies the filter.
    pub hits: Vec<Neighbor>,
    pub found: usize,
    pub stats: QueryStats,
}

/// Monotonic time source for the plan/search split.
pub trait Clock {
    fn now_nanos(&self) -> u64;
}

/// A clock that never advances.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_nanos(&self) -> u64 {
        0
    }
}

fn check(req: &QueryRequest, cat: &IndexCatalog) -> Result<SearchParams> {
    let dim = cat.relation().dim();
    if req.q.len() != dim {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: dim,
            found: req.q.len(),
        });
    }
    if req.q.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteComponent { row: 0 });
    }
    if req.k == 0 {
        return Err(Error::ZeroK);
    }
    SearchParams::new(req.l, req.k)
}

/// Searches every graph of `plan` and merges the results.
pub fn execute(
    plan: &GraphSearchPlan,
    req: &QueryRequest,
    cat: &IndexCatalog,
    clock: &dyn Clock,
) -> Result<QueryResult> {
    let sp = check(req, cat)?;
    let start = clock.now_nanos();
    let r = cat.relation();
    let matcher = Matcher::new(&req.filter, r);
    let mut lists = Vec::with_capacity(plan.entries.len());
    let mut per_graph = Vec::with_capacity(plan.entries.len());
    for e in &plan.entries {
        let out = search_with_filter(cat.graph(e.graph), r, &req.q, sp, |pk| matcher.matches(pk));
        per_graph.push(GraphVisit {
            graph: e.graph,
            visited: out.stats.visited,
        });
        lists.push(out.hits);
    }
    let hits = merge_topk(lists, req.k);
    Ok(QueryResult {
        found: hits.len(),
        hits,
        stats: QueryStats {
            per_graph,
            plan_nanos: 0,
            search_nanos: clock.now_nanos().saturating_sub(start),
        },
    })
}

/// Plans and executes one request.
pub fn answer(
    cat: &IndexCatalog,
    req: &QueryRequest,
    cfg: &PlannerConfig,
    clock: &dyn Clock,
) -> Result<(GraphSearchPlan, QueryResult)> {
    check(req, cat)?;
    let start = clock.now_nanos();
    let plan = plan_query(&req.filter, cat, cfg)?;
    let plan_nanos = clock.now_nanos().saturating_sub(start);
    let mut result = execute(&plan, req, cat, clock)?;
    result.stats.plan_nanos = plan_nanos;
    Ok((plan, result))
}
