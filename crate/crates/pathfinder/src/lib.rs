// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! File formats, catalog persistence, parallel index builds, synthetic
//! data and workloads, ground truth and benchmarks for `pathfinder-core`.

pub mod attrs;
pub mod bench;
pub mod catalog;
pub mod datagen;
pub mod explain;
pub mod fvecs;
pub mod graph_io;
pub mod runner;
pub mod truth;
pub mod workload;

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use pathfinder_core::{BuildParams, CatalogBuilder, IndexCatalog, IndexSpec, Relation};

/// Parses `tree:<attr>:<fanout>:<height>` or `hash:<attr>`.
pub fn parse_index_spec(s: &str) -> Result<IndexSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["tree", attr, fanout, height] => Ok(IndexSpec::Tree {
            attr: (*attr).to_string(),
            fanout: fanout
                .parse()
                .with_context(|| format!("bad fanout in {s:?}"))?,
            height: height
                .parse()
                .with_context(|| format!("bad height in {s:?}"))?,
        }),
        ["hash", attr] => Ok(IndexSpec::Hash {
            attr: (*attr).to_string(),
        }),
        _ => bail!("index spec {s:?} is neither tree:<attr>:<fanout>:<height> nor hash:<attr>"),
    }
}

/// Builds a catalog with graphs constructed on `threads` workers
/// (0 = all cores).
pub fn build_catalog(
    r: Arc<Relation>,
    specs: &[IndexSpec],
    params: BuildParams,
    seed: u64,
    threads: usize,
) -> Result<IndexCatalog> {
    let runner = runner::RayonRunner::new(threads)?;
    let mut b = CatalogBuilder::new(r).params(params).seed(seed);
    for s in specs {
        b = b.index(s.clone());
    }
    Ok(b.build_with(&runner)?)
}
