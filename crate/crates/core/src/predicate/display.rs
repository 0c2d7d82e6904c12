// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Rendering predicates back into the filter grammar. The output re-parses
//! to an equivalent predicate.

use core::fmt;

use super::{AtomicPredicate, BoolExpr, ConjunctiveClause, DnfPredicate, Interval};
use crate::relation::Schema;

pub struct DisplayAtom<'a>(pub &'a AtomicPredicate, pub &'a Schema);
pub struct DisplayClause<'a>(pub &'a ConjunctiveClause, pub &'a Schema);
pub struct DisplayDnf<'a>(pub &'a DnfPredicate, pub &'a Schema);
pub struct DisplayExpr<'a>(pub &'a BoolExpr, pub &'a Schema);

fn write_str_lit(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        if c == '"' || c == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("\"")
}

fn write_interval(f: &mut fmt::Formatter<'_>, name: &str, iv: &Interval) -> fmt::Result {
    match (iv.lower, iv.upper) {
        (None, None) => write!(f, "{name} >= {}", f64::MIN),
        (Some(l), Some(u)) if l.inclusive && u.inclusive => {
            if l.value == u.value {
                write!(f, "{name} = {}", l.value)
            } else {
                write!(f, "{} <= {name} <= {}", l.value, u.value)
            }
        }
        (l, u) => {
            if let Some(l) = l {
                let op = if l.inclusive { ">=" } else { ">" };
                write!(f, "{name} {op} {}", l.value)?;
                if u.is_some() {
                    f.write_str(" AND ")?;
                }
            }
            if let Some(u) = u {
                let op = if u.inclusive { "<=" } else { "<" };
                write!(f, "{name} {op} {}", u.value)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for DisplayAtom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.1.name(self.0.attr());
        match self.0 {
            AtomicPredicate::Range { interval, .. } => write_interval(f, name, interval),
            AtomicPredicate::InSet { values, .. } => {
                write!(f, "{name} IN (")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_str_lit(f, v)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for DisplayClause<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("FALSE");
        }
        let atoms = self.0.atoms();
        if atoms.is_empty() {
            return f.write_str("TRUE");
        }
        for (i, a) in atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{}", DisplayAtom(a, self.1))?;
        }
        Ok(())
    }
}

impl fmt::Display for DisplayDnf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clauses = self.0.clauses();
        if clauses.is_empty() {
            return f.write_str("FALSE");
        }
        if clauses.len() == 1 {
            return write!(f, "{}", DisplayClause(&clauses[0], self.1));
        }
        for (i, c) in clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" OR ")?;
            }
            write!(f, "({})", DisplayClause(c, self.1))?;
        }
        Ok(())
    }
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            BoolExpr::Atom(a) => write!(f, "{}", DisplayAtom(a, self.1)),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => {
                let sep = if matches!(self.0, BoolExpr::And(_)) {
                    " AND "
                } else {
                    " OR "
                };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    match x {
                        BoolExpr::Atom(_) => write!(f, "{}", DisplayExpr(x, self.1))?,
                        _ => write!(f, "({})", DisplayExpr(x, self.1))?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl DnfPredicate {
    pub fn display<'a>(&'a self, schema: &'a Schema) -> DisplayDnf<'a> {
        DisplayDnf(self, schema)
    }
}

impl ConjunctiveClause {
    pub fn display<'a>(&'a self, schema: &'a Schema) -> DisplayClause<'a> {
        DisplayClause(self, schema)
    }
}

impl AtomicPredicate {
    pub fn display<'a>(&'a self, schema: &'a Schema) -> DisplayAtom<'a> {
        DisplayAtom(self, schema)
    }
}

impl BoolExpr {
    pub fn display<'a>(&'a self, schema: &'a Schema) -> DisplayExpr<'a> {
        DisplayExpr(self, schema)
    }
}
