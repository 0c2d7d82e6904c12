// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::predicate::{Constraint, Interval};
use crate::relation::{Column, Relation};
use crate::Pk;

/// Value range of one attribute over a node's tuples.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrRange {
    Numeric { min: f64, max: f64 },
    Categorical(BTreeSet<String>),
}

impl AttrRange {
    /// True iff `self` contains `other`.
    pub fn contains(&self, other: &AttrRange) -> bool {
        match (self, other) {
            (Self::Numeric { min, max }, Self::Numeric { min: a, max: b }) => min <= a && b <= max,
            (Self::Categorical(s), Self::Categorical(t)) => t.is_subset(s),
            _ => false,
        }
    }

    /// True iff some value in the range satisfies `c`.
    pub fn overlaps(&self, c: &Constraint) -> bool {
        match (self, c) {
            (Self::Numeric { min, max }, Constraint::Range(iv)) => {
                iv.overlaps(&Interval::closed(*min, *max))
            }
            (Self::Categorical(s), Constraint::Set(t)) => s.iter().any(|v| t.contains(v)),
            _ => false,
        }
    }
}

/// Per-attribute ranges of `members` (non-empty), in schema order.
pub fn attr_ranges(r: &Relation, members: &[Pk]) -> Vec<AttrRange> {
    r.columns()
        .iter()
        .map(|col| match col {
            Column::Numeric(v) => {
                let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
                for &pk in members {
                    let x = v[pk as usize];
                    min = min.min(x);
                    max = max.max(x);
                }
                AttrRange::Numeric { min, max }
            }
            Column::Categorical { dictionary, codes } => {
                let mut seen = alloc::vec![false; dictionary.len()];
                for &pk in members {
                    seen[codes[pk as usize] as usize] = true;
                }
                AttrRange::Categorical(
                    dictionary
                        .iter()
                        .zip(seen)
                        .filter(|(_, s)| *s)
                        .map(|(d, _)| d.clone())
                        .collect(),
                )
            }
        })
        .collect()
}
