// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::vec;
use alloc::vec::Vec;

use super::{borrow_rewrite, rank, Borrow, GraphRef, PlannerConfig, RankKey};
use crate::error::Result;
use crate::index::{AttributeIndex, IndexCatalog, IndexId, NodeId};
use crate::predicate::{conjoin_node, covers, overlaps, ConjunctiveClause};

/// Deepest node on the chain of covering children below `from`.
pub fn find_single_graph(idx: &AttributeIndex, from: NodeId, p: &ConjunctiveClause) -> NodeId {
    let mut at = from;
    'descend: loop {
        for child in idx.children(at) {
            if covers(&child.predicate, p) {
                at = child.id;
                continue 'descend;
            }
        }
        return at;
    }
}

/// For each child of `gs` overlapping `p`, the deepest graph covering
/// `p` restricted to that child.
pub fn find_second_plan(idx: &AttributeIndex, gs: NodeId, p: &ConjunctiveClause) -> Vec<NodeId> {
    idx.children(gs)
        .filter(|c| overlaps(&c.predicate, p))
        .map(|c| find_single_graph(idx, c.id, &conjoin_node(p, &c.predicate)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Index the candidate came from; `None` for the fallback root plan.
    pub index: Option<IndexId>,
    pub graphs: Vec<GraphRef>,
    pub rank: RankKey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClausePlan {
    pub original: ConjunctiveClause,
    /// Clause after borrowing rewrites; `None` if a rewrite proved that no
    /// tuple can match.
    pub planned: Option<ConjunctiveClause>,
    pub borrows: Vec<Borrow>,
    pub candidates: Vec<Candidate>,
    /// The winning candidate's graphs, sorted; empty iff `planned` is `None`.
    pub chosen: Vec<GraphRef>,
}

/// Plans one conjunctive clause.
pub fn plan_conjunction(
    c: &ConjunctiveClause,
    cat: &IndexCatalog,
    cfg: &PlannerConfig,
) -> Result<ClausePlan> {
    let (planned, borrows) = if cfg.borrowing {
        borrow_rewrite(c, cat, cfg)
    } else {
        (Some(c.clone()), Vec::new())
    };
    let Some(planned) = planned else {
        return Ok(ClausePlan {
            original: c.clone(),
            planned: None,
            borrows,
            candidates: Vec::new(),
            chosen: Vec::new(),
        });
    };

    let mut sets: Vec<(Option<IndexId>, Vec<GraphRef>)> = Vec::new();
    fn add(
        sets: &mut Vec<(Option<IndexId>, Vec<GraphRef>)>,
        index: Option<IndexId>,
        mut graphs: Vec<GraphRef>,
    ) {
        graphs.sort();
        graphs.dedup();
        if !graphs.is_empty() && !sets.iter().any(|(_, g)| *g == graphs) {
            sets.push((index, graphs));
        }
    }
    for (i, idx) in cat.indexes().iter().enumerate() {
        if !planned.constrains(idx.attr()) {
            continue;
        }
        let id = IndexId(i);
        let gs = find_single_graph(idx, NodeId::ROOT, &planned);
        add(&mut sets, Some(id), vec![GraphRef::node(id, gs)]);
        if !idx.node(gs).is_leaf() {
            let second = find_second_plan(idx, gs, &planned);
            debug_assert!(!second.is_empty() || planned.is_empty());
            add(
                &mut sets,
                Some(id),
                second.into_iter().map(|n| GraphRef::node(id, n)).collect(),
            );
        }
    }
    if sets.is_empty() {
        add(&mut sets, None, vec![GraphRef::Root]);
    }

    let candidates: Vec<Candidate> = sets
        .into_iter()
        .map(|(index, graphs)| {
            let rank = rank(cat, &graphs, true, cfg)?;
            Ok(Candidate {
                index,
                graphs,
                rank,
            })
        })
        .collect::<Result<_>>()?;
    let chosen = candidates
        .iter()
        .min_by(|a, b| a.rank.cmp_rank(&b.rank))
        .map(|c| c.graphs.clone())
        .unwrap_or_default();
    Ok(ClausePlan {
        original: c.clone(),
        planned: Some(planned),
        borrows,
        candidates,
        chosen,
    })
}
