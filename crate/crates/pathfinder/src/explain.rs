// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Human-readable plan reports.

use std::fmt::Write;

use pathfinder_core::index::IndexKind;
use pathfinder_core::{GraphRef, GraphSearchPlan, IndexCatalog};

/// One row of the final plan: index (`None` for the root), node, card.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanRow {
    pub index: Option<usize>,
    pub node: usize,
    pub card: usize,
}

pub fn plan_rows(plan: &GraphSearchPlan) -> Vec<PlanRow> {
    plan.entries
        .iter()
        .map(|e| match e.graph {
            GraphRef::Root => PlanRow {
                index: None,
                node: 0,
                card: e.card,
            },
            GraphRef::Node { index, node } => PlanRow {
                index: Some(index.0),
                node: node.0,
                card: e.card,
            },
        })
        .collect()
}

pub fn index_label(cat: &IndexCatalog, i: usize) -> String {
    let idx = &cat.indexes()[i];
    let name = cat.relation().schema().name(idx.attr());
    match idx.kind() {
        IndexKind::Tree { fanout, height } => format!("tree:{name}:{fanout}:{height}"),
        IndexKind::Hash => format!("hash:{name}"),
    }
}

pub fn graph_label(g: GraphRef) -> String {
    match g {
        GraphRef::Root => "root".into(),
        GraphRef::Node { index, node } => format!("i{}/n{}", index.0, node.0),
    }
}

fn graph_list(gs: &[GraphRef]) -> String {
    let parts: Vec<String> = gs.iter().map(|&g| graph_label(g)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// The DNF, per-clause candidates with rank values, borrowing rewrites,
/// per-index merges and the final `(index, node, card)` rows.
pub fn render(plan: &GraphSearchPlan, cat: &IndexCatalog) -> String {
    let schema = cat.relation().schema();
    let mut s = String::new();
    let _ = writeln!(s, "dnf: {}", plan.filter.display(schema));
    for (i, c) in plan.clauses.iter().enumerate() {
        let _ = writeln!(s, "clause {i}: {}", c.original.display(schema));
        for b in &c.borrows {
            let to = match &b.synthesized {
                Some(a) => a.display(schema).to_string(),
                None => "<no tuples>".into(),
            };
            let _ = writeln!(
                s,
                "  borrow [{}]: {} -> {to}",
                index_label(cat, b.index.0),
                b.original.display(schema)
            );
        }
        match &c.planned {
            None => {
                let _ = writeln!(s, "  planned: <empty>");
            }
            Some(p) => {
                if !c.borrows.is_empty() {
                    let _ = writeln!(s, "  planned: {}", p.display(schema));
                }
            }
        }
        for cand in &c.candidates {
            let src = match cand.index {
                Some(ix) => index_label(cat, ix.0),
                None => "root".into(),
            };
            let _ = writeln!(
                s,
                "  candidate [{src}] {} value={:.4} graphs={} card={}",
                graph_list(&cand.graphs),
                cand.rank.value,
                cand.rank.graphs,
                cand.rank.total_card
            );
        }
        let _ = writeln!(s, "  chosen: {}", graph_list(&c.chosen));
    }
    for g in &plan.groups {
        if g.before != g.after {
            let _ = writeln!(
                s,
                "merge [{}]: {} -> {}",
                index_label(cat, g.index.0),
                graph_list(&g.before),
                graph_list(&g.after)
            );
        }
    }
    let _ = writeln!(s, "plan:");
    let _ = writeln!(s, "  index\tnode\tcard");
    for r in plan_rows(plan) {
        let index = r.index.map_or("root".to_string(), |i| index_label(cat, i));
        let _ = writeln!(s, "  {index}\t{}\t{}", r.node, r.card);
    }
    s
}
