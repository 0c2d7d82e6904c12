// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::vec::Vec;

use super::{Constraint, DnfPredicate, Interval};
use crate::relation::{Column, Relation};
use crate::Pk;

enum Check<'r> {
    Range {
        values: &'r [f64],
        interval: Interval,
    },
    Codes {
        codes: &'r [u32],
        allowed: Vec<bool>,
    },
    Never,
}

/// A DNF predicate compiled against one relation's columns. Categorical
/// sets become per-code lookup tables.
pub struct Matcher<'r> {
    clauses: Vec<Vec<Check<'r>>>,
}

impl<'r> Matcher<'r> {
    pub fn new(p: &DnfPredicate, r: &'r Relation) -> Self {
        let clauses = p
            .clauses()
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| {
                c.constraints()
                    .map(|(attr, con)| match (r.column(attr), con) {
                        (Column::Numeric(values), Constraint::Range(iv)) => Check::Range {
                            values,
                            interval: *iv,
                        },
                        (Column::Categorical { dictionary, codes }, Constraint::Set(s)) => {
                            Check::Codes {
                                codes,
                                allowed: dictionary.iter().map(|d| s.contains(d)).collect(),
                            }
                        }
                        _ => Check::Never,
                    })
                    .collect()
            })
            .collect();
        Self { clauses }
    }

    #[inline]
    pub fn matches(&self, pk: Pk) -> bool {
        let i = pk as usize;
        self.clauses.iter().any(|checks| {
            checks.iter().all(|c| match c {
                Check::Range { values, interval } => interval.contains_value(values[i]),
                Check::Codes { codes, allowed } => allowed[codes[i] as usize],
                Check::Never => false,
            })
        })
    }

    /// Number of matching tuples, by full scan.
    pub fn count(&self, r: &Relation) -> usize {
        r.pks().filter(|&pk| self.matches(pk)).count()
    }
}
