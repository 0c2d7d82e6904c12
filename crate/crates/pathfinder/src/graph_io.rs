// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Binary graph files, little-endian throughout:
//!
//! ```text
//! magic "PFVG" | version u32 | R u32 | card u32 | entry pk u32
//! members: card × u32 (sorted)
//! adjacency: per member, degree u32 then that many pk u32
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use pathfinder_core::VamanaGraph;

pub const MAGIC: &[u8; 4] = b"PFVG";
pub const VERSION: u32 = 1;

pub fn encode(g: &VamanaGraph) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 4 * g.card() * (2 + g.max_degree()));
    let mut put = |x: u32| out.extend_from_slice(&x.to_le_bytes());
    put(u32::from_le_bytes(*MAGIC));
    put(VERSION);
    put(g.max_degree() as u32);
    put(g.card() as u32);
    put(g.entry());
    for &pk in g.members() {
        put(pk);
    }
    for list in g.adjacency() {
        put(list.len() as u32);
        for pk in list {
            put(pk);
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<VamanaGraph> {
    let mut words = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()));
    if !bytes.len().is_multiple_of(4) {
        bail!("graph file length {} is not a multiple of 4", bytes.len());
    }
    let mut next = |what: &str| {
        words
            .next()
            .with_context(|| format!("truncated graph file at {what}"))
    };
    if next("magic")?.to_le_bytes() != *MAGIC {
        bail!("not a graph file");
    }
    let version = next("version")?;
    if version != VERSION {
        bail!("unsupported graph version {version}");
    }
    let r = next("degree")? as usize;
    let card = next("card")? as usize;
    let entry = next("entry")?;
    let members = (0..card)
        .map(|_| next("members"))
        .collect::<Result<Vec<_>>>()?;
    let mut adjacency = Vec::with_capacity(card);
    for _ in 0..card {
        let d = next("degree")? as usize;
        if d > r {
            bail!("degree {d} exceeds bound {r}");
        }
        adjacency.push(
            (0..d)
                .map(|_| next("adjacency"))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if next("end").is_ok() {
        bail!("trailing bytes in graph file");
    }
    Ok(VamanaGraph::from_parts(members, adjacency, entry, r)?)
}

pub fn write(path: &Path, g: &VamanaGraph) -> Result<()> {
    std::fs::write(path, encode(g)).with_context(|| format!("writing {}", path.display()))
}

pub fn read(path: &Path) -> Result<VamanaGraph> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}
