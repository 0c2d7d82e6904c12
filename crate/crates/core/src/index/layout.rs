// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Node shapes of tree and hash indexes, computed from data alone.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};

use super::NodeId;
use crate::error::{Error, Result};
use crate::predicate::{AtomicPredicate, Bound, Interval, NodePredicate};
use crate::relation::{Column, Relation};
use crate::Pk;

/// One node before its graph is built.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    pub predicate: NodePredicate,
    /// Sorted member keys.
    pub members: Vec<Pk>,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub depth: usize,
}

fn root_layout(r: &Relation) -> NodeLayout {
    NodeLayout {
        predicate: NodePredicate::Full,
        members: r.pks().collect(),
        children: Vec::new(),
        parent: None,
        depth: 0,
    }
}

/// Layout of a tree index with `height` layers (root included), nodes in
/// breadth-first order. Splits are equal-cardinality over values sorted by
/// `(value, pk)`. A run of equal values at a split point goes to the left
/// child, or to the right one when going left would starve a later child.
pub fn tree_layout(
    r: &Relation,
    attr: usize,
    fanout: usize,
    height: usize,
) -> Result<Vec<NodeLayout>> {
    let name = r.schema().name(attr).to_string();
    let values = match r.column(attr) {
        Column::Numeric(v) => v,
        Column::Categorical { .. } => return Err(Error::NotNumeric(name)),
    };
    if fanout < 2 {
        return Err(Error::InvalidParams(format!("fanout {fanout} < 2")));
    }
    if height < 2 {
        return Err(Error::InvalidParams(format!("height {height} < 2")));
    }
    let too_many = Error::TooManyLayers {
        layers: height,
        fanout,
        card: r.len(),
    };
    let mut leaves = 1usize;
    for _ in 1..height {
        leaves = leaves.checked_mul(fanout).ok_or(too_many.clone())?;
    }
    if leaves > r.len() {
        return Err(too_many);
    }

    let mut order: Vec<Pk> = r.pks().collect();
    order.sort_by(|&x, &y| {
        values[x as usize]
            .total_cmp(&values[y as usize])
            .then(x.cmp(&y))
    });

    // (slice of `order`, interval) per node
    let mut spans = vec![(0usize, order.len(), Interval::FULL)];
    let mut nodes = vec![root_layout(r)];
    let mut frontier = vec![0usize];
    for depth in 1..height {
        let mut next = Vec::with_capacity(frontier.len() * fanout);
        for &p in &frontier {
            let (lo, hi, iv) = spans[p];
            let len = hi - lo;
            let mut cuts = Vec::with_capacity(fanout + 1);
            cuts.push(lo);
            for i in 1..fanout {
                let prev = cuts[i - 1];
                let limit = hi - (fanout - i);
                let target = (lo + i * len / fanout).clamp(prev + 1, limit.max(prev + 1));
                let same = |b: usize| values[order[b] as usize] == values[order[b - 1] as usize];
                let mut right = target;
                while right < hi && same(right) {
                    right += 1;
                }
                let mut left = target;
                while left > prev && same(left) {
                    left -= 1;
                }
                let b = if right <= limit {
                    right
                } else if left > prev {
                    left
                } else {
                    return Err(Error::UnsplittableNode { attr: name });
                };
                cuts.push(b);
            }
            cuts.push(hi);
            let mut lower = iv.lower;
            for i in 0..fanout {
                let (a, b) = (cuts[i], cuts[i + 1]);
                let upper = if i + 1 == fanout {
                    iv.upper
                } else {
                    Some(Bound::inclusive(values[order[b - 1] as usize]))
                };
                let civ = Interval::new(lower, upper);
                lower = upper.map(|u| Bound::exclusive(u.value));
                let mut members = order[a..b].to_vec();
                members.sort_unstable();
                let id = nodes.len();
                nodes[p].children.push(NodeId(id));
                nodes.push(NodeLayout {
                    predicate: NodePredicate::Atom(AtomicPredicate::range(attr, civ)),
                    members,
                    children: Vec::new(),
                    parent: Some(NodeId(p)),
                    depth,
                });
                spans.push((a, b, civ));
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(nodes)
}

/// Layout of a hash index: the root plus one leaf per distinct value, in
/// value order.
pub fn hash_layout(r: &Relation, attr: usize) -> Result<Vec<NodeLayout>> {
    let (dictionary, codes) = match r.column(attr) {
        Column::Categorical { dictionary, codes } => (dictionary, codes),
        Column::Numeric(_) => return Err(Error::NotCategorical(r.schema().name(attr).to_string())),
    };
    let mut groups: BTreeMap<&str, Vec<Pk>> = BTreeMap::new();
    for (pk, &c) in codes.iter().enumerate() {
        groups
            .entry(dictionary[c as usize].as_str())
            .or_default()
            .push(pk as Pk);
    }
    let mut nodes = vec![root_layout(r)];
    for (value, members) in groups {
        let id = nodes.len();
        nodes[0].children.push(NodeId(id));
        nodes.push(NodeLayout {
            predicate: NodePredicate::Atom(AtomicPredicate::in_set(attr, [value])),
            members,
            children: Vec::new(),
            parent: Some(NodeId(0)),
            depth: 1,
        });
    }
    Ok(nodes)
}
