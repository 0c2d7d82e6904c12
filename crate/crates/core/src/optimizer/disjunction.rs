// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{rank_cards, GraphRef, PlannerConfig};
use crate::error::Result;
use crate::index::{IndexCatalog, IndexId, NodeId};

/// Merges the graphs chosen from one index (the root counts as part of
/// every index).
///
/// Walks non-leaf nodes bottom-up. Each node carries a plan: a set of
/// disjoint chosen graphs in its subtree. A node replaces the union `S` of
/// its children's plans when `{node}` ranks strictly better than `S`.
///
/// Returns the surviving graphs in id order, each with the originally
/// chosen graphs it stands for.
pub fn optimize_group(
    cat: &IndexCatalog,
    index: IndexId,
    chosen: &[NodeId],
    cfg: &PlannerConfig,
) -> Result<Vec<(NodeId, Vec<NodeId>)>> {
    let idx = cat.index(index);
    let mut g: BTreeSet<NodeId> = chosen.iter().copied().collect();
    let mut origins: BTreeMap<NodeId, BTreeSet<NodeId>> = g
        .iter()
        .map(|&n| (n, core::iter::once(n).collect()))
        .collect();
    let mut plan: Vec<Vec<NodeId>> = vec![Vec::new(); idx.nodes().len()];
    let entry = |n: NodeId| (GraphRef::node(index, n), idx.node(n).card);

    for node in idx.nodes().iter().rev() {
        let id = node.id;
        if node.is_leaf() {
            if g.contains(&id) {
                plan[id.0] = vec![id];
            }
            continue;
        }
        let s: Vec<NodeId> = node
            .children
            .iter()
            .flat_map(|c| plan[c.0].iter().copied())
            .collect();
        let replace = !s.is_empty() && {
            let rs = rank_cards(&s.iter().map(|&n| entry(n)).collect::<Vec<_>>(), true, cfg)?;
            let rp = rank_cards(&[entry(id)], true, cfg)?;
            rp.cmp_ignoring_cover(&rs) == Ordering::Less
        };
        if replace {
            let mut merged = origins.remove(&id).unwrap_or_default();
            for n in &s {
                g.remove(n);
                if let Some(o) = origins.remove(n) {
                    merged.extend(o);
                }
            }
            g.insert(id);
            origins.insert(id, merged);
            plan[id.0] = vec![id];
        } else if !g.contains(&id) {
            plan[id.0] = s;
        } else {
            plan[id.0] = vec![id];
        }
    }
    Ok(g.into_iter()
        .map(|n| {
            (
                n,
                origins.remove(&n).unwrap_or_default().into_iter().collect(),
            )
        })
        .collect())
}
