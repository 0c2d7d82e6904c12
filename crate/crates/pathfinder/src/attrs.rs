// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Attribute CSV: a header of attribute names, then one row per vector. A
//! column is numeric when every cell parses as a finite decimal.

use std::path::Path;

use anyhow::{bail, Context, Result};
use pathfinder_core::{Column, Relation, Schema};

use crate::fvecs::{self, Vectors};

#[derive(Debug, Clone, PartialEq)]
pub struct Attributes {
    pub schema: Schema,
    pub columns: Vec<Column>,
}

pub fn parse<R: std::io::Read>(reader: R) -> Result<Attributes> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if names.is_empty() || names.iter().all(|n| n.is_empty()) {
        bail!("attribute file has no header");
    }
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); names.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("attribute row {i}"))?;
        if rec.len() != names.len() {
            bail!(
                "attribute row {i} has {} fields, expected {}",
                rec.len(),
                names.len()
            );
        }
        for (col, v) in cells.iter_mut().zip(rec.iter()) {
            col.push(v.to_string());
        }
    }
    let mut kinds = Vec::with_capacity(names.len());
    let mut columns = Vec::with_capacity(names.len());
    for col in cells {
        let parsed: Option<Vec<f64>> = col
            .iter()
            .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect();
        match parsed {
            Some(v) if !v.is_empty() => {
                kinds.push(pathfinder_core::AttributeKind::Numeric);
                columns.push(Column::Numeric(v));
            }
            _ => {
                kinds.push(pathfinder_core::AttributeKind::Categorical);
                columns.push(Column::categorical(col));
            }
        }
    }
    let schema = Schema::new(names.iter().map(String::as_str).zip(kinds))?;
    Ok(Attributes { schema, columns })
}

pub fn read(path: &Path) -> Result<Attributes> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse(f).with_context(|| format!("reading {}", path.display()))
}

/// Writes the relation's attributes; numbers use the shortest round-trip
/// representation.
pub fn write(path: &Path, schema: &Schema, columns: &[Column]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(schema.fields().iter().map(|f| f.name.as_str()))?;
    let n = columns.first().map_or(0, Column::len);
    for pk in 0..n {
        w.write_record(columns.iter().map(|c| match c.get(pk as u32) {
            pathfinder_core::relation::AttrRef::Numeric(x) => format!("{x:?}"),
            pathfinder_core::relation::AttrRef::Categorical(s) => s.to_string(),
        }))?;
    }
    w.flush()?;
    Ok(())
}

/// Ingests a vector file and an attribute file as one relation.
pub fn load_relation(vectors: &Path, attrs: &Path) -> Result<Relation> {
    let v = fvecs::read(vectors)?;
    let a = read(attrs)?;
    relation_from(v, a)
}

pub fn relation_from(v: Vectors, a: Attributes) -> Result<Relation> {
    let rows = a.columns.first().map_or(0, Column::len);
    if v.len() != rows {
        bail!("{} vectors but {rows} attribute rows", v.len());
    }
    Ok(Relation::from_columns(a.schema, v.dim, v.data, a.columns)?)
}
