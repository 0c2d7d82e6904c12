// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Index borrowing: an atom on an attribute without an index is replaced,
//! for planning only, by a looser atom on a correlated indexed attribute,
//! derived from per-leaf value ranges.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::PlannerConfig;
use crate::index::{AttributeIndex, IndexCatalog, IndexId, IndexKind};
use crate::predicate::{AtomicPredicate, ConjunctiveClause, Interval, NodePredicate};

#[derive(Debug, Clone, PartialEq)]
pub struct Borrow {
    pub original: AtomicPredicate,
    pub index: IndexId,
    /// `None` when no leaf can hold a matching tuple.
    pub synthesized: Option<AtomicPredicate>,
}

fn overlapping_leaves<'a>(
    idx: &'a AttributeIndex,
    p_b: &'a AtomicPredicate,
) -> impl Iterator<Item = &'a crate::index::IndexNode> + 'a {
    let c = p_b.constraint();
    idx.leaves()
        .filter(move |leaf| leaf.attr_ranges[p_b.attr()].overlaps(&c))
}

/// `a IN C`, with `C` the categories whose tuples' `b` values can satisfy
/// `p_b`.
pub fn synthesize_hash(idx: &AttributeIndex, p_b: &AtomicPredicate) -> Option<AtomicPredicate> {
    let mut values: BTreeSet<String> = BTreeSet::new();
    for leaf in overlapping_leaves(idx, p_b) {
        if let NodePredicate::Atom(AtomicPredicate::InSet { values: v, .. }) = &leaf.predicate {
            values.extend(v.iter().cloned());
        }
    }
    if values.is_empty() {
        None
    } else {
        Some(AtomicPredicate::InSet {
            attr: idx.attr(),
            values,
        })
    }
}

/// A range on the tree's attribute from the lower bound of the leftmost
/// leaf whose `b` range overlaps `p_b` to the upper bound of the rightmost.
pub fn synthesize_tree(idx: &AttributeIndex, p_b: &AtomicPredicate) -> Option<AtomicPredicate> {
    let mut first: Option<Interval> = None;
    let mut last: Option<Interval> = None;
    for leaf in overlapping_leaves(idx, p_b) {
        if let NodePredicate::Atom(AtomicPredicate::Range { interval, .. }) = &leaf.predicate {
            first.get_or_insert(*interval);
            last = Some(*interval);
        }
    }
    Some(AtomicPredicate::range(
        idx.attr(),
        Interval::new(first?.lower, last?.upper),
    ))
}

/// Rewrites every atom on an unindexed attribute using the most correlated
/// index whose attribute the clause does not yet constrain. Returns `None`
/// for the clause if a synthesis finds no candidate tuples.
pub fn borrow_rewrite(
    c: &ConjunctiveClause,
    cat: &IndexCatalog,
    cfg: &PlannerConfig,
) -> (Option<ConjunctiveClause>, Vec<Borrow>) {
    let mut out = c.clone();
    let mut borrows = Vec::new();
    for atom in c.atoms() {
        let b = atom.attr();
        if cat.index_on(b).is_some() {
            continue;
        }
        let mut best: Option<(f64, IndexId)> = None;
        for (i, idx) in cat.indexes().iter().enumerate() {
            if out.constrains(idx.attr()) {
                continue;
            }
            let score = cat.correlations().get(idx.attr(), b);
            if score >= cfg.correlation_threshold && best.is_none_or(|(s, _)| score > s) {
                best = Some((score, IndexId(i)));
            }
        }
        let Some((_, id)) = best else { continue };
        let idx = cat.index(id);
        let synthesized = match idx.kind() {
            IndexKind::Tree { .. } => synthesize_tree(idx, &atom),
            IndexKind::Hash => synthesize_hash(idx, &atom),
        };
        borrows.push(Borrow {
            original: atom,
            index: id,
            synthesized: synthesized.clone(),
        });
        match synthesized {
            Some(p_a) => {
                out.remove(b);
                out.and_atom(&p_a);
            }
            None => return (None, borrows),
        }
    }
    (Some(out), borrows)
}
