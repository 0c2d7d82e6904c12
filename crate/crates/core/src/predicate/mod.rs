// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Filter predicates: atoms, boolean expressions, DNF normalization and the
//! symbolic region tests (`covers`, `overlaps`, `conjoin_simplify`) used by
//! the planner.
//!
//! Coverage is decided on predicate regions alone, never on data. A clause
//! that does not constrain an index's attribute is covered only by the
//! full-relation predicate.

mod display;
mod interval;
mod matcher;
mod parse;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::relation::{AttrRef, TupleRef};

pub use display::{DisplayAtom, DisplayClause, DisplayDnf, DisplayExpr};
pub use interval::{Bound, Interval};
pub use matcher::Matcher;
pub use parse::parse_filter;

/// Upper bound on the number of clauses `to_dnf` will produce.
pub const MAX_DNF_CLAUSES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum AtomicPredicate {
    /// Numeric range. Attribute is a schema column index.
    Range { attr: usize, interval: Interval },
    /// Categorical membership.
    InSet {
        attr: usize,
        values: BTreeSet<String>,
    },
}

impl AtomicPredicate {
    pub fn range(attr: usize, interval: Interval) -> Self {
        Self::Range { attr, interval }
    }

    pub fn in_set<I, S>(attr: usize, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::InSet {
            attr,
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn attr(&self) -> usize {
        match self {
            Self::Range { attr, .. } | Self::InSet { attr, .. } => *attr,
        }
    }

    pub fn constraint(&self) -> Constraint {
        match self {
            Self::Range { interval, .. } => Constraint::Range(*interval),
            Self::InSet { values, .. } => Constraint::Set(values.clone()),
        }
    }

    pub fn eval(&self, t: TupleRef<'_>) -> bool {
        self.constraint_ref_eval(t.attr(self.attr()))
    }

    fn constraint_ref_eval(&self, v: AttrRef<'_>) -> bool {
        match (self, v) {
            (Self::Range { interval, .. }, AttrRef::Numeric(x)) => interval.contains_value(x),
            (Self::InSet { values, .. }, AttrRef::Categorical(s)) => values.contains(s),
            _ => false,
        }
    }
}

/// The restriction a clause places on one attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Range(Interval),
    Set(BTreeSet<String>),
}

impl Constraint {
    pub fn is_empty(&self) -> bool {
        match self {
            Self::Range(iv) => iv.is_empty(),
            Self::Set(s) => s.is_empty(),
        }
    }

    pub fn eval(&self, v: AttrRef<'_>) -> bool {
        match (self, v) {
            (Self::Range(iv), AttrRef::Numeric(x)) => iv.contains_value(x),
            (Self::Set(s), AttrRef::Categorical(c)) => s.contains(c),
            _ => false,
        }
    }

    fn intersect(&self, other: &Constraint) -> Constraint {
        match (self, other) {
            (Self::Range(a), Self::Range(b)) => Self::Range(a.intersect(b)),
            (Self::Set(a), Self::Set(b)) => Self::Set(a.intersection(b).cloned().collect()),
            // Kinds are checked against the schema before clauses are built.
            _ => Self::Set(BTreeSet::new()),
        }
    }
}

/// AND of constraints, at most one per attribute.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConjunctiveClause {
    constraints: BTreeMap<usize, Constraint>,
    empty: bool,
}

impl ConjunctiveClause {
    /// The clause with no constraints (matches every tuple).
    pub fn all() -> Self {
        Self::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = AtomicPredicate>>(atoms: I) -> Self {
        let mut c = Self::all();
        for a in atoms {
            c.and_atom(&a);
        }
        c
    }

    pub fn and_atom(&mut self, atom: &AtomicPredicate) {
        self.and_constraint(atom.attr(), atom.constraint());
    }

    pub fn and_constraint(&mut self, attr: usize, c: Constraint) {
        let merged = match self.constraints.get(&attr) {
            Some(old) => old.intersect(&c),
            None => c,
        };
        if merged.is_empty() {
            self.empty = true;
        }
        self.constraints.insert(attr, merged);
    }

    pub fn intersect(&self, other: &ConjunctiveClause) -> ConjunctiveClause {
        let mut out = self.clone();
        for (&attr, c) in &other.constraints {
            out.and_constraint(attr, c.clone());
        }
        out.empty |= other.empty;
        out
    }

    /// True if the clause's region is known to be empty.
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// True if the clause has no constraints at all.
    pub fn is_unconstrained(&self) -> bool {
        self.constraints.is_empty() && !self.empty
    }

    pub fn constraint(&self, attr: usize) -> Option<&Constraint> {
        self.constraints.get(&attr)
    }

    pub fn constraints(&self) -> impl Iterator<Item = (usize, &Constraint)> {
        self.constraints.iter().map(|(&a, c)| (a, c))
    }

    pub fn attrs(&self) -> impl Iterator<Item = usize> + '_ {
        self.constraints.keys().copied()
    }

    pub fn constrains(&self, attr: usize) -> bool {
        self.constraints.contains_key(&attr)
    }

    /// Removes the constraint on `attr`, returning it.
    pub fn remove(&mut self, attr: usize) -> Option<Constraint> {
        self.constraints.remove(&attr)
    }

    pub fn atoms(&self) -> Vec<AtomicPredicate> {
        self.constraints
            .iter()
            .map(|(&attr, c)| match c {
                Constraint::Range(iv) => AtomicPredicate::Range {
                    attr,
                    interval: *iv,
                },
                Constraint::Set(s) => AtomicPredicate::InSet {
                    attr,
                    values: s.clone(),
                },
            })
            .collect()
    }

    pub fn eval(&self, t: TupleRef<'_>) -> bool {
        !self.empty && self.constraints.iter().all(|(&a, c)| c.eval(t.attr(a)))
    }
}

/// Disjunction of conjunctive clauses.
///
/// Values produced by [`to_dnf`] hold at least one satisfiable clause.
/// [`DnfPredicate::never`] is the explicit empty disjunction.
#[derive(Debug, Clone, PartialEq)]
pub struct DnfPredicate {
    clauses: Vec<ConjunctiveClause>,
}

impl DnfPredicate {
    pub fn always() -> Self {
        Self {
            clauses: vec![ConjunctiveClause::all()],
        }
    }

    pub fn never() -> Self {
        Self {
            clauses: Vec::new(),
        }
    }

    /// Wraps clauses, dropping the empty ones.
    pub fn from_clauses<I: IntoIterator<Item = ConjunctiveClause>>(clauses: I) -> Self {
        Self {
            clauses: clauses.into_iter().filter(|c| !c.is_empty()).collect(),
        }
    }

    pub fn clauses(&self) -> &[ConjunctiveClause] {
        &self.clauses
    }

    pub fn is_never(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_always(&self) -> bool {
        self.clauses.iter().any(ConjunctiveClause::is_unconstrained)
    }

    pub fn eval(&self, t: TupleRef<'_>) -> bool {
        self.clauses.iter().any(|c| c.eval(t))
    }

    /// The same predicate as an OR-of-ANDs expression tree.
    pub fn to_expr(&self) -> Option<BoolExpr> {
        let mut terms: Vec<BoolExpr> = self
            .clauses
            .iter()
            .filter_map(|c| {
                let mut atoms: Vec<BoolExpr> = c.atoms().into_iter().map(BoolExpr::Atom).collect();
                match atoms.len() {
                    0 => None,
                    1 => atoms.pop(),
                    _ => Some(BoolExpr::And(atoms)),
                }
            })
            .collect();
        match terms.len() {
            0 => None,
            1 => terms.pop(),
            _ => Some(BoolExpr::Or(terms)),
        }
    }
}

/// Filter expression tree. There is no negation.
#[derive(Debug, Clone, PartialEq)]
pub enum BoolExpr {
    Atom(AtomicPredicate),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    /// Direct tree evaluation.
    pub fn eval(&self, t: TupleRef<'_>) -> bool {
        match self {
            Self::Atom(a) => a.eval(t),
            Self::And(xs) => xs.iter().all(|x| x.eval(t)),
            Self::Or(xs) => xs.iter().any(|x| x.eval(t)),
        }
    }
}

/// Converts an expression to DNF: distributes AND over OR, normalizes each
/// clause per attribute and drops unsatisfiable clauses.
pub fn to_dnf(e: &BoolExpr) -> Result<DnfPredicate> {
    let clauses = dnf_clauses(e)?;
    if clauses.is_empty() {
        return Err(Error::Unsatisfiable);
    }
    Ok(DnfPredicate { clauses })
}

fn dnf_clauses(e: &BoolExpr) -> Result<Vec<ConjunctiveClause>> {
    let out = match e {
        BoolExpr::Atom(a) => {
            let c = ConjunctiveClause::from_atoms([a.clone()]);
            if c.is_empty() {
                Vec::new()
            } else {
                vec![c]
            }
        }
        BoolExpr::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(dnf_clauses(x)?);
                if out.len() > MAX_DNF_CLAUSES {
                    return Err(Error::TooManyClauses(MAX_DNF_CLAUSES));
                }
            }
            out
        }
        BoolExpr::And(xs) => {
            let mut acc = vec![ConjunctiveClause::all()];
            for x in xs {
                let rhs = dnf_clauses(x)?;
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for l in &acc {
                    for r in &rhs {
                        let c = l.intersect(r);
                        if !c.is_empty() {
                            next.push(c);
                        }
                    }
                    if next.len() > MAX_DNF_CLAUSES {
                        return Err(Error::TooManyClauses(MAX_DNF_CLAUSES));
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
    };
    Ok(out)
}

/// The region owned by an index node.
#[derive(Debug, Clone, PartialEq)]
pub enum NodePredicate {
    /// The whole relation (the shared root graph).
    Full,
    Atom(AtomicPredicate),
}

impl NodePredicate {
    pub fn attr(&self) -> Option<usize> {
        match self {
            Self::Full => None,
            Self::Atom(a) => Some(a.attr()),
        }
    }

    pub fn eval(&self, t: TupleRef<'_>) -> bool {
        match self {
            Self::Full => true,
            Self::Atom(a) => a.eval(t),
        }
    }
}

/// `region(c) ∩ region(a)`, normalized per attribute.
pub fn conjoin_simplify(c: &ConjunctiveClause, a: &AtomicPredicate) -> ConjunctiveClause {
    let mut out = c.clone();
    out.and_atom(a);
    out
}

/// `conjoin_simplify` against a node region; the full region is the identity.
pub fn conjoin_node(c: &ConjunctiveClause, node: &NodePredicate) -> ConjunctiveClause {
    match node {
        NodePredicate::Full => c.clone(),
        NodePredicate::Atom(a) => conjoin_simplify(c, a),
    }
}

/// True iff `region(c) ⊆ region(node)`, decided symbolically.
pub fn covers(node: &NodePredicate, c: &ConjunctiveClause) -> bool {
    if c.is_empty() {
        return true;
    }
    match node {
        NodePredicate::Full => true,
        NodePredicate::Atom(AtomicPredicate::Range { attr, interval }) => {
            matches!(c.constraint(*attr), Some(Constraint::Range(civ)) if interval.contains(civ))
        }
        NodePredicate::Atom(AtomicPredicate::InSet { attr, values }) => {
            matches!(c.constraint(*attr), Some(Constraint::Set(s)) if s.is_subset(values))
        }
    }
}

/// True iff `region(c) ∩ region(node)` is symbolically non-empty.
pub fn overlaps(node: &NodePredicate, c: &ConjunctiveClause) -> bool {
    if c.is_empty() {
        return false;
    }
    match node {
        NodePredicate::Full => true,
        NodePredicate::Atom(AtomicPredicate::Range { attr, interval }) => {
            match c.constraint(*attr) {
                None => !interval.is_empty(),
                Some(Constraint::Range(civ)) => interval.overlaps(civ),
                Some(Constraint::Set(_)) => false,
            }
        }
        NodePredicate::Atom(AtomicPredicate::InSet { attr, values }) => match c.constraint(*attr) {
            None => !values.is_empty(),
            Some(Constraint::Set(s)) => s.iter().any(|v| values.contains(v)),
            Some(Constraint::Range(_)) => false,
        },
    }
}
