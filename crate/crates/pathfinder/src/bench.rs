// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Recall/throughput sweeps over the search queue length.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Result};
use pathfinder_core::{answer, recall_at_k, IndexCatalog, PlannerConfig, QueryRequest};
use rayon::prelude::*;

use crate::runner::StdClock;
use crate::truth::TruthLine;
use crate::workload::ResolvedQuery;

pub const CSV_HEADER: &str = "workload,shape,band,L,recall@10,qps,plan_frac";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub workload: String,
    pub shape: String,
    pub band: String,
    pub l: usize,
    pub queries: usize,
    pub recall: f64,
    pub qps: f64,
    pub plan_frac: f64,
    /// Mean distance computations per query.
    pub visited: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
}

impl BenchResult {
    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> Result<()> {
        if header {
            writeln!(w, "{CSV_HEADER}")?;
        }
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{:.4},{:.1},{:.4}",
                r.workload, r.shape, r.band, r.l, r.recall, r.qps, r.plan_frac
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub name: String,
    pub ls: Vec<usize>,
    pub k: usize,
    pub planner: PlannerConfig,
    pub warmup: bool,
}

impl BenchConfig {
    pub fn new(name: impl Into<String>, ls: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            ls,
            k: 10,
            planner: PlannerConfig::default(),
            warmup: true,
        }
    }
}

#[derive(Default)]
struct Acc {
    recall: f64,
    plan: u64,
    total: u64,
    visited: u64,
    n: usize,
}

/// Runs every query at every L on `pool`; one row per (L, shape, band).
pub fn run_bench(
    cat: &IndexCatalog,
    queries: &[ResolvedQuery],
    truth: &[TruthLine],
    cfg: &BenchConfig,
    pool: &rayon::ThreadPool,
) -> Result<BenchResult> {
    let by_qid: BTreeMap<u64, &TruthLine> = truth.iter().map(|t| (t.qid, t)).collect();
    let truths: Vec<&TruthLine> = queries
        .iter()
        .map(|q| {
            by_qid
                .get(&q.qid)
                .copied()
                .ok_or_else(|| anyhow::anyhow!("no ground truth for query {}", q.qid))
        })
        .collect::<Result<_>>()?;
    if cfg.ls.is_empty() {
        bail!("empty L sweep");
    }
    let mut groups: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, q) in queries.iter().enumerate() {
        groups
            .entry((q.shape.clone(), q.band.clone()))
            .or_default()
            .push(i);
    }
    let run_one = |i: usize, l: usize| -> Result<(f64, u64, u64, u64)> {
        let q = &queries[i];
        let req = QueryRequest::new(q.q.clone(), cfg.k, l.max(cfg.k), q.filter.clone());
        let (_, res) = answer(cat, &req, &cfg.planner, &StdClock::new())?;
        let hits: Vec<_> = res.hits.iter().map(|h| h.pk).collect();
        let recall = recall_at_k(&hits, &truths[i].pks(), cfg.k)?;
        Ok((
            recall,
            res.stats.plan_nanos,
            res.stats.plan_nanos + res.stats.search_nanos,
            res.stats.visited() as u64,
        ))
    };
    if cfg.warmup {
        let l = cfg.ls[0];
        pool.install(|| {
            (0..queries.len())
                .into_par_iter()
                .try_for_each(|i| run_one(i, l).map(drop))
        })?;
    }
    let mut rows = Vec::new();
    for &l in &cfg.ls {
        for ((shape, band), members) in &groups {
            let start = Instant::now();
            let per: Vec<(f64, u64, u64, u64)> = pool.install(|| {
                members
                    .par_iter()
                    .map(|&i| run_one(i, l))
                    .collect::<Result<_>>()
            })?;
            let secs = start.elapsed().as_secs_f64().max(1e-9);
            let mut acc = Acc::default();
            for (rec, p, t, v) in per {
                acc.recall += rec;
                acc.plan += p;
                acc.total += t;
                acc.visited += v;
                acc.n += 1;
            }
            let n = acc.n.max(1) as f64;
            rows.push(BenchRow {
                workload: cfg.name.clone(),
                shape: shape.clone(),
                band: band.clone(),
                l,
                queries: acc.n,
                recall: acc.recall / n,
                qps: acc.n as f64 / secs,
                plan_frac: if acc.total == 0 {
                    0.0
                } else {
                    acc.plan as f64 / acc.total as f64
                },
                visited: acc.visited as f64 / n,
            });
        }
    }
    Ok(BenchResult { rows })
}
