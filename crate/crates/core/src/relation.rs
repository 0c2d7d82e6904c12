// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! The relation of primary-keyed tuples every graph refers to.
//!
//! Attributes are stored column-wise and vectors in one contiguous buffer.
//! Primary keys are dense: `0..n` in ingestion order.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::distance::DistanceMetric;
use crate::error::{Error, Result};
use crate::Pk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeKind {
    Numeric,
    Categorical,
}

impl AttributeKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Numeric => "numeric",
            Self::Categorical => "categorical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Numeric(f64),
    Categorical(String),
}

impl AttributeValue {
    pub fn kind(&self) -> AttributeKind {
        match self {
            Self::Numeric(_) => AttributeKind::Numeric,
            Self::Categorical(_) => AttributeKind::Categorical,
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Numeric(v) => write!(f, "{v}"),
            Self::Categorical(s) => f.write_str(s),
        }
    }
}

/// Borrowed attribute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttrRef<'a> {
    Numeric(f64),
    Categorical(&'a str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub kind: AttributeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    fields: Vec<Field>,
}

impl Schema {
    pub fn new<I, S>(fields: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, AttributeKind)>,
        S: Into<String>,
    {
        let fields: Vec<Field> = fields
            .into_iter()
            .map(|(name, kind)| Field {
                name: name.into(),
                kind,
            })
            .collect();
        if fields.is_empty() {
            return Err(Error::EmptySchema);
        }
        for (i, f) in fields.iter().enumerate() {
            if fields[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::DuplicateAttribute(f.name.clone()));
            }
        }
        Ok(Self { fields })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn name(&self, attr: usize) -> &str {
        &self.fields[attr].name
    }

    pub fn kind(&self, attr: usize) -> AttributeKind {
        self.fields[attr].kind
    }
}

/// One attribute column. Categorical values are dictionary encoded; codes
/// are assigned in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical {
        dictionary: Vec<String>,
        codes: Vec<u32>,
    },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Self::Numeric(v) => v.len(),
            Self::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> AttributeKind {
        match self {
            Self::Numeric(_) => AttributeKind::Numeric,
            Self::Categorical { .. } => AttributeKind::Categorical,
        }
    }

    /// Builds a categorical column from raw strings.
    pub fn categorical<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lookup: BTreeMap<String, u32> = BTreeMap::new();
        let mut dictionary = Vec::new();
        let mut codes = Vec::new();
        for v in values {
            let v = v.as_ref();
            let code = match lookup.get(v) {
                Some(&c) => c,
                None => {
                    let c = dictionary.len() as u32;
                    dictionary.push(v.to_string());
                    lookup.insert(v.to_string(), c);
                    c
                }
            };
            codes.push(code);
        }
        Self::Categorical { dictionary, codes }
    }

    pub fn get(&self, pk: Pk) -> AttrRef<'_> {
        match self {
            Self::Numeric(v) => AttrRef::Numeric(v[pk as usize]),
            Self::Categorical { dictionary, codes } => {
                AttrRef::Categorical(&dictionary[codes[pk as usize] as usize])
            }
        }
    }
}

/// Immutable collection of tuples `(pk, attributes, vector)`.
#[derive(Debug, Clone)]
pub struct Relation {
    schema: Schema,
    dim: usize,
    vectors: Vec<f32>,
    columns: Vec<Column>,
    metric: DistanceMetric,
}

impl Relation {
    /// Ingests row-oriented sources. Keys are assigned `0..n` in source order.
    pub fn ingest<V, A>(schema: Schema, vectors: V, rows: A) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: AsRef<[f32]>,
        A: IntoIterator<Item = Vec<AttributeValue>>,
    {
        let mut flat: Vec<f32> = Vec::new();
        let mut dim = 0usize;
        let mut n_vec = 0usize;
        for (row, v) in vectors.into_iter().enumerate() {
            let v = v.as_ref();
            if row == 0 {
                dim = v.len();
                if dim == 0 {
                    return Err(Error::DimensionMismatch {
                        row,
                        expected: 1,
                        found: 0,
                    });
                }
            } else if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    row,
                    expected: dim,
                    found: v.len(),
                });
            }
            flat.extend_from_slice(v);
            n_vec += 1;
        }

        let mut numeric: Vec<Vec<f64>> = Vec::new();
        let mut categorical: Vec<Vec<String>> = Vec::new();
        let slots: Vec<usize> = schema
            .fields()
            .iter()
            .map(|f| match f.kind {
                AttributeKind::Numeric => {
                    numeric.push(Vec::new());
                    numeric.len() - 1
                }
                AttributeKind::Categorical => {
                    categorical.push(Vec::new());
                    categorical.len() - 1
                }
            })
            .collect();
        let mut n_rows = 0usize;
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != schema.len() {
                return Err(Error::ArityMismatch {
                    row,
                    expected: schema.len(),
                    found: values.len(),
                });
            }
            for (attr, value) in values.into_iter().enumerate() {
                match (schema.kind(attr), value) {
                    (AttributeKind::Numeric, AttributeValue::Numeric(x)) => {
                        numeric[slots[attr]].push(x)
                    }
                    (AttributeKind::Categorical, AttributeValue::Categorical(s)) => {
                        categorical[slots[attr]].push(s)
                    }
                    _ => {
                        return Err(Error::KindMismatch {
                            row,
                            attr: schema.name(attr).to_string(),
                        })
                    }
                }
            }
            n_rows += 1;
        }
        if n_vec != n_rows {
            return Err(Error::RowCountMismatch {
                vectors: n_vec,
                rows: n_rows,
            });
        }

        let mut numeric = numeric.into_iter();
        let mut categorical = categorical.into_iter();
        let columns = schema
            .fields()
            .iter()
            .map(|f| match f.kind {
                AttributeKind::Numeric => Column::Numeric(numeric.next().unwrap_or_default()),
                AttributeKind::Categorical => {
                    Column::categorical(categorical.next().unwrap_or_default())
                }
            })
            .collect();
        Self::from_columns(schema, dim, flat, columns)
    }

    /// Builds a relation from a flat row-major vector buffer and columns.
    pub fn from_columns(
        schema: Schema,
        dim: usize,
        vectors: Vec<f32>,
        columns: Vec<Column>,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyRelation);
        }
        if dim == 0 || !vectors.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                row: vectors.len() / dim.max(1),
                expected: dim,
                found: vectors.len() % dim.max(1),
            });
        }
        let n = vectors.len() / dim;
        if n > Pk::MAX as usize {
            return Err(Error::InvalidParams("relation exceeds u32 keys".into()));
        }
        if let Some(pos) = vectors.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteComponent { row: pos / dim });
        }
        if columns.len() != schema.len() {
            return Err(Error::ArityMismatch {
                row: 0,
                expected: schema.len(),
                found: columns.len(),
            });
        }
        for (attr, c) in columns.iter().enumerate() {
            if c.kind() != schema.kind(attr) {
                return Err(Error::KindMismatch {
                    row: 0,
                    attr: schema.name(attr).to_string(),
                });
            }
            if c.len() != n {
                return Err(Error::RowCountMismatch {
                    vectors: n,
                    rows: c.len(),
                });
            }
            if let Column::Numeric(v) = c {
                if let Some(row) = v.iter().position(|x| x.is_nan()) {
                    return Err(Error::KindMismatch {
                        row,
                        attr: schema.name(attr).to_string(),
                    });
                }
            }
        }
        Ok(Self {
            schema,
            dim,
            vectors,
            columns,
            metric: DistanceMetric::default(),
        })
    }

    pub fn with_metric(mut self, metric: DistanceMetric) -> Self {
        self.metric = metric;
        self
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn metric(&self) -> DistanceMetric {
        self.metric
    }

    pub fn pks(&self) -> core::ops::Range<Pk> {
        0..self.len() as Pk
    }

    #[inline]
    pub fn vector(&self, pk: Pk) -> &[f32] {
        let at = pk as usize * self.dim;
        &self.vectors[at..at + self.dim]
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, attr: usize) -> &Column {
        &self.columns[attr]
    }

    #[inline]
    pub fn value(&self, attr: usize, pk: Pk) -> AttrRef<'_> {
        self.columns[attr].get(pk)
    }

    /// Distance from a query vector to the tuple `pk`.
    #[inline]
    pub fn distance_to(&self, q: &[f32], pk: Pk) -> f32 {
        self.metric.eval(q, self.vector(pk))
    }

    #[inline]
    pub fn distance_between(&self, a: Pk, b: Pk) -> f32 {
        self.metric.eval(self.vector(a), self.vector(b))
    }

    pub fn tuple(&self, pk: Pk) -> TupleRef<'_> {
        TupleRef { relation: self, pk }
    }

    /// Returns a copy holding only the listed attributes (same keys and
    /// vectors).
    pub fn project(&self, attrs: &[usize]) -> Result<Self> {
        let schema = Schema::new(
            attrs
                .iter()
                .map(|&a| (self.schema.name(a).to_string(), self.schema.kind(a))),
        )?;
        let columns = attrs.iter().map(|&a| self.columns[a].clone()).collect();
        Self::from_columns(schema, self.dim, self.vectors.clone(), columns)
            .map(|r| r.with_metric(self.metric))
    }
}

/// A view of one tuple.
#[derive(Clone, Copy)]
pub struct TupleRef<'a> {
    relation: &'a Relation,
    pub pk: Pk,
}

impl<'a> TupleRef<'a> {
    pub fn attr(&self, attr: usize) -> AttrRef<'a> {
        self.relation.value(attr, self.pk)
    }

    pub fn vector(&self) -> &'a [f32] {
        self.relation.vector(self.pk)
    }

    pub fn relation(&self) -> &'a Relation {
        self.relation
    }
}

impl fmt::Debug for TupleRef<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TupleRef").field("pk", &self.pk).finish()
    }
}
