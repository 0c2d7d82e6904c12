// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty relation")]
    EmptyRelation,
    #[error("schema must have at least one attribute")]
    EmptySchema,
    #[error("duplicate attribute name {0:?}")]
    DuplicateAttribute(String),
    #[error("vector count {vectors} does not match attribute row count {rows}")]
    RowCountMismatch { vectors: usize, rows: usize },
    #[error("row {row}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: vector has a non-finite component")]
    NonFiniteComponent { row: usize },
    #[error("row {row}: attribute {attr:?} has the wrong kind")]
    KindMismatch { row: usize, attr: String },
    #[error("row {row}: expected {expected} attributes, found {found}")]
    ArityMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("attribute {attr:?} is {kind}; predicate does not apply")]
    PredicateKind { attr: String, kind: &'static str },
    #[error("empty range on attribute {0:?}")]
    EmptyRange(String),
    #[error("filter expands to more than {0} conjunctive clauses")]
    TooManyClauses(usize),
    #[error("filter is unsatisfiable")]
    Unsatisfiable,

    #[error("graph needs at least one member")]
    EmptyMembers,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("attribute {0:?} is not numeric")]
    NotNumeric(String),
    #[error("attribute {0:?} is not categorical")]
    NotCategorical(String),
    #[error("{layers} layers of fanout {fanout} need more than {card} tuples")]
    TooManyLayers {
        layers: usize,
        fanout: usize,
        card: usize,
    },
    #[error("cannot split node on {attr:?}: too many duplicate values")]
    UnsplittableNode { attr: String },
    #[error("attribute {0:?} already has an index")]
    DuplicateIndex(String),
    #[error("correlations need at least two attributes")]
    TooFewAttributes,

    #[error("cannot rank an empty graph set")]
    EmptyGraphSet,
    #[error("recall@K needs K >= 1")]
    ZeroK,
}
