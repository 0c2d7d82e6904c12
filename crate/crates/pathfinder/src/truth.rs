// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Exact filtered top-K answers for a workload, with an on-disk cache
//! keyed by a content hash of the relation, the workload and K.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pathfinder_core::relation::AttrRef;
use pathfinder_core::{brute_force_topk, Neighbor, Pk, Relation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::workload::ResolvedQuery;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLine {
    pub qid: u64,
    pub topk: Vec<(Pk, f32)>,
}

impl TruthLine {
    pub fn pks(&self) -> Vec<Pk> {
        self.topk.iter().map(|e| e.0).collect()
    }
}

/// Brute-force answers, in workload order.
pub fn compute(r: &Relation, queries: &[ResolvedQuery], k: usize) -> Vec<TruthLine> {
    queries
        .par_iter()
        .map(|q| TruthLine {
            qid: q.qid,
            topk: brute_force_topk(r, &q.q, k, &q.filter)
                .into_iter()
                .map(|n: Neighbor| (n.pk, n.distance))
                .collect(),
        })
        .collect()
}

pub fn cache_key(r: &Relation, queries: &[ResolvedQuery], k: usize) -> String {
    let mut h = Sha256::new();
    h.update(b"pathfinder-truth-v1");
    h.update((r.len() as u64).to_le_bytes());
    h.update((r.dim() as u64).to_le_bytes());
    for x in r.vectors() {
        h.update(x.to_le_bytes());
    }
    for (attr, col) in r.columns().iter().enumerate() {
        h.update(r.schema().name(attr).as_bytes());
        for pk in r.pks() {
            match col.get(pk) {
                AttrRef::Numeric(x) => h.update(x.to_le_bytes()),
                AttrRef::Categorical(v) => {
                    h.update(v.as_bytes());
                    h.update([0]);
                }
            }
        }
    }
    h.update((k as u64).to_le_bytes());
    for q in queries {
        h.update(q.qid.to_le_bytes());
        h.update(q.filter.display(r.schema()).to_string().as_bytes());
        for x in &q.q {
            h.update(x.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

const MAGIC: &[u8; 4] = b"PFGT";

pub fn encode(lines: &[TruthLine]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(lines.len() as u64).to_le_bytes());
    for l in lines {
        out.extend_from_slice(&l.qid.to_le_bytes());
        out.extend_from_slice(&(l.topk.len() as u32).to_le_bytes());
        for &(pk, d) in &l.topk {
            out.extend_from_slice(&pk.to_le_bytes());
            out.extend_from_slice(&d.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Vec<TruthLine>> {
    let mut at = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = bytes
            .get(at..at + n)
            .context("truncated ground-truth cache")?;
        at += n;
        Ok(s)
    };
    if take(4)? != MAGIC {
        bail!("not a ground-truth cache");
    }
    let count = u64::from_le_bytes(take(8)?.try_into()?) as usize;
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let qid = u64::from_le_bytes(take(8)?.try_into()?);
        let n = u32::from_le_bytes(take(4)?.try_into()?) as usize;
        let mut topk = Vec::with_capacity(n.min(1 << 16));
        for _ in 0..n {
            let pk = u32::from_le_bytes(take(4)?.try_into()?);
            let d = f32::from_le_bytes(take(4)?.try_into()?);
            topk.push((pk, d));
        }
        out.push(TruthLine { qid, topk });
    }
    if at != bytes.len() {
        bail!("trailing bytes in ground-truth cache");
    }
    Ok(out)
}

pub fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("truth-{key}.bin"))
}

/// Cached answers when present in `cache_dir`, computed and stored otherwise.
pub fn compute_cached(
    r: &Relation,
    queries: &[ResolvedQuery],
    k: usize,
    cache_dir: Option<&Path>,
) -> Result<Vec<TruthLine>> {
    let Some(dir) = cache_dir else {
        return Ok(compute(r, queries, k));
    };
    let path = cache_path(dir, &cache_key(r, queries, k));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Ok(lines) = decode(&bytes) {
            return Ok(lines);
        }
    }
    let lines = compute(r, queries, k);
    std::fs::create_dir_all(dir)?;
    std::fs::write(&path, encode(&lines)).with_context(|| format!("writing {}", path.display()))?;
    Ok(lines)
}

pub fn write_jsonl<W: Write>(mut w: W, lines: &[TruthLine]) -> Result<()> {
    for l in lines {
        serde_json::to_writer(&mut w, l)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<TruthLine>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("truth line {}", i + 1))?);
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<Vec<TruthLine>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_jsonl(std::io::BufReader::new(f))
}

pub fn write(path: &Path, lines: &[TruthLine]) -> Result<()> {
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_jsonl(std::io::BufWriter::new(f), lines)
}
