// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! The `.fvecs` vector format: per vector, a little-endian `i32` dimension
//! followed by that many little-endian `f32`s.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Vectors as one row-major buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Vectors {
    pub dim: usize,
    pub data: Vec<f32>,
}

impl Vectors {
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn decode(bytes: &[u8]) -> Result<Vectors> {
    if bytes.is_empty() {
        bail!("empty fvecs input");
    }
    if bytes.len() < 4 {
        bail!("truncated fvecs header");
    }
    let d = i32::from_le_bytes(bytes[..4].try_into().unwrap());
    if d <= 0 {
        bail!("invalid dimension {d}");
    }
    let dim = d as usize;
    let stride = 4 + 4 * dim;
    if !bytes.len().is_multiple_of(stride) {
        bail!(
            "fvecs length {} is not a multiple of {stride} (dimension {dim})",
            bytes.len()
        );
    }
    let n = bytes.len() / stride;
    let mut data = Vec::with_capacity(n * dim);
    for (i, rec) in bytes.chunks_exact(stride).enumerate() {
        let di = i32::from_le_bytes(rec[..4].try_into().unwrap());
        if di != d {
            bail!("vector {i} has dimension {di}, expected {d}");
        }
        data.extend(
            rec[4..]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap())),
        );
    }
    Ok(Vectors { dim, data })
}

pub fn encode(v: &Vectors) -> Vec<u8> {
    let mut out = Vec::with_capacity(v.len() * (4 + 4 * v.dim));
    for i in 0..v.len() {
        out.extend_from_slice(&(v.dim as i32).to_le_bytes());
        for x in v.row(i) {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn read(path: &Path) -> Result<Vectors> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?)
        .read_to_end(&mut bytes)?;
    decode(&bytes).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, v: &Vectors) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    w.write_all(&encode(v))?;
    w.flush()?;
    Ok(())
}
