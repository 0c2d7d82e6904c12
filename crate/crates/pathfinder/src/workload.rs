// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Filtered query workloads: predicate shapes, selectivity bands, and the
//! JSON-lines file format.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use pathfinder_core::predicate::Matcher;
use pathfinder_core::relation::Column;
use pathfinder_core::{parse_filter, to_dnf, DnfPredicate, Relation};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fvecs::{self, Vectors};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    SingleAttr,
    Conjunctive2,
    Conjunctive3,
    DisjunctiveMixed,
}

impl Shape {
    pub const ALL: [Shape; 4] = [
        Shape::SingleAttr,
        Shape::Conjunctive2,
        Shape::Conjunctive3,
        Shape::DisjunctiveMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::SingleAttr => "single-attr",
            Shape::Conjunctive2 => "conjunctive-2",
            Shape::Conjunctive3 => "conjunctive-3",
            Shape::DisjunctiveMixed => "disjunctive-mixed",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .with_context(|| format!("unknown shape {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    Low,
    Medium,
    High,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Low, Band::Medium, Band::High];

    pub fn name(self) -> &'static str {
        match self {
            Band::Low => "low",
            Band::Medium => "medium",
            Band::High => "high",
        }
    }

    /// Low is `[0.001, 0.01]`, medium `(0.01, 0.1]`, high `(0.1, 1]`.
    pub fn contains(self, s: f64) -> bool {
        match self {
            Band::Low => (0.001..=0.01).contains(&s),
            Band::Medium => s > 0.01 && s <= 0.1,
            Band::High => s > 0.1 && s <= 1.0,
        }
    }

    fn bounds(self) -> (f64, f64) {
        match self {
            Band::Low => (0.001, 0.01),
            Band::Medium => (0.01, 0.1),
            Band::High => (0.1, 1.0),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Band {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Band::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .with_context(|| format!("unknown band {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub n_queries: usize,
    pub shape: Shape,
    pub band: Band,
    pub seed: u64,
    /// Attributes predicates may use; empty means all.
    pub attrs: Vec<String>,
    /// Rejection attempts per query before giving up on it.
    pub max_attempts: usize,
}

impl WorkloadSpec {
    pub fn new(n_queries: usize, shape: Shape, band: Band, seed: u64) -> Self {
        Self {
            n_queries,
            shape,
            band,
            seed,
            attrs: Vec::new(),
            max_attempts: 5_000,
        }
    }
}

/// Where a query vector comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryVector {
    Inline(Vec<f32>),
    File { file: PathBuf, idx: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadQuery {
    pub qid: u64,
    pub filter: String,
    pub qvec: QueryVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selectivity: Option<f64>,
}

/// Result of generation, including queries that could not be placed in
/// the band.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub queries: Vec<WorkloadQuery>,
    pub failed: Vec<u64>,
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

struct AtomGen<'r> {
    r: &'r Relation,
    sorted: Vec<Option<Vec<f64>>>,
}

impl<'r> AtomGen<'r> {
    fn new(r: &'r Relation) -> Self {
        let sorted = r
            .columns()
            .iter()
            .map(|c| match c {
                Column::Numeric(v) => {
                    let mut s = v.clone();
                    s.sort_by(f64::total_cmp);
                    Some(s)
                }
                Column::Categorical { .. } => None,
            })
            .collect();
        Self { r, sorted }
    }

    /// An atom on `attr` matching roughly a fraction `s` of tuples.
    fn atom(&self, rng: &mut impl Rng, attr: usize, s: f64) -> String {
        let name = self.r.schema().name(attr);
        match (&self.sorted[attr], self.r.column(attr)) {
            (Some(vals), _) => {
                let n = vals.len();
                let width = ((s * n as f64).round() as usize).clamp(1, n);
                let start = rng.random_range(0..=n - width);
                format!(
                    "{} <= {name} <= {}",
                    fmt_num(vals[start]),
                    fmt_num(vals[start + width - 1])
                )
            }
            (None, Column::Categorical { dictionary, .. }) => {
                let m = dictionary.len();
                let want = ((s * m as f64).round() as usize).clamp(1, m);
                let mut picked: Vec<&str> = sample(rng, m, want)
                    .into_iter()
                    .map(|i| dictionary[i].as_str())
                    .collect();
                picked.sort_unstable();
                let list: Vec<String> = picked.iter().map(|v| format!("{v:?}")).collect();
                format!("{name} IN ({})", list.join(", "))
            }
            _ => unreachable!("column kinds agree with the sorted cache"),
        }
    }

    fn conjunction(&self, rng: &mut impl Rng, pool: &[usize], parts: usize, s: f64) -> String {
        let parts = parts.min(pool.len());
        let per = s.powf(1.0 / parts as f64);
        let atoms: Vec<String> = sample(rng, pool.len(), parts)
            .into_iter()
            .map(|i| self.atom(rng, pool[i], per))
            .collect();
        atoms.join(" AND ")
    }
}

/// Exact fraction of tuples satisfying `p`.
pub fn selectivity(r: &Relation, p: &DnfPredicate) -> f64 {
    Matcher::new(p, r).count(r) as f64 / r.len() as f64
}

/// Rejection-samples filters of the given shape until their exact
/// selectivity lies in the band.
pub fn gen_filters(r: &Relation, spec: &WorkloadSpec) -> Result<Vec<Option<(String, f64)>>> {
    let pool: Vec<usize> = if spec.attrs.is_empty() {
        (0..r.schema().len()).collect()
    } else {
        spec.attrs
            .iter()
            .map(|a| {
                r.schema()
                    .index_of(a)
                    .with_context(|| format!("unknown attribute {a:?}"))
            })
            .collect::<Result<_>>()?
    };
    let needed = match spec.shape {
        Shape::SingleAttr => 1,
        Shape::Conjunctive2 => 2,
        Shape::Conjunctive3 => 3,
        Shape::DisjunctiveMixed => 1,
    };
    if pool.len() < needed {
        bail!("shape {} needs {needed} attributes", spec.shape);
    }
    let gen = AtomGen::new(r);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.band.bounds();
    let mut out = Vec::with_capacity(spec.n_queries);
    for _ in 0..spec.n_queries {
        let mut found = None;
        for _ in 0..spec.max_attempts {
            let target = (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp();
            let text = match spec.shape {
                Shape::SingleAttr => gen.conjunction(&mut rng, &pool, 1, target),
                Shape::Conjunctive2 => gen.conjunction(&mut rng, &pool, 2, target),
                Shape::Conjunctive3 => gen.conjunction(&mut rng, &pool, 3, target),
                Shape::DisjunctiveMixed => {
                    let half = target / 2.0;
                    let part = |rng: &mut ChaCha8Rng| {
                        let k = if pool.len() >= 2 {
                            rng.random_range(1..=2)
                        } else {
                            1
                        };
                        let c = gen.conjunction(rng, &pool, k, half);
                        if k > 1 {
                            format!("({c})")
                        } else {
                            c
                        }
                    };
                    let (x, y) = (part(&mut rng), part(&mut rng));
                    format!("{x} OR {y}")
                }
            };
            let p = to_dnf(&parse_filter(&text, r.schema())?)?;
            let s = selectivity(r, &p);
            if spec.band.contains(s) {
                found = Some((text, s));
                break;
            }
        }
        out.push(found);
    }
    Ok(out)
}

/// A full workload; query vectors cycle through `queries`, stored by
/// reference when `queries_path` is given and inline otherwise.
pub fn gen_workload(
    r: &Relation,
    spec: &WorkloadSpec,
    queries: &Vectors,
    queries_path: Option<&Path>,
) -> Result<Generated> {
    if queries.is_empty() || queries.dim != r.dim() {
        bail!("query vectors must be non-empty with dimension {}", r.dim());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37);
    let filters = gen_filters(r, spec)?;
    let mut out = Generated {
        queries: Vec::new(),
        failed: Vec::new(),
    };
    for (qid, f) in filters.into_iter().enumerate() {
        let qid = qid as u64;
        let Some((filter, sel)) = f else {
            out.failed.push(qid);
            continue;
        };
        let idx = rng.random_range(0..queries.len());
        let qvec = match queries_path {
            Some(p) => QueryVector::File {
                file: p.to_path_buf(),
                idx,
            },
            None => QueryVector::Inline(queries.row(idx).to_vec()),
        };
        out.queries.push(WorkloadQuery {
            qid,
            filter,
            qvec,
            shape: Some(spec.shape.name().into()),
            band: Some(spec.band.name().into()),
            selectivity: Some(sel),
        });
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(mut w: W, queries: &[WorkloadQuery]) -> Result<()> {
    for q in queries {
        serde_json::to_writer(&mut w, q)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<WorkloadQuery>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("workload line {}", i + 1))?);
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<Vec<WorkloadQuery>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_jsonl(std::io::BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, queries: &[WorkloadQuery]) -> Result<()> {
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_jsonl(std::io::BufWriter::new(f), queries)
}

/// A workload query ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedQuery {
    pub qid: u64,
    pub filter: DnfPredicate,
    pub q: Vec<f32>,
    pub shape: String,
    pub band: String,
}

/// Parses filters and loads referenced vectors. Relative vector paths are
/// resolved against `base`.
pub fn resolve(r: &Relation, queries: &[WorkloadQuery], base: &Path) -> Result<Vec<ResolvedQuery>> {
    let mut files: std::collections::BTreeMap<PathBuf, Vectors> = Default::default();
    queries
        .iter()
        .map(|wq| {
            let filter = to_dnf(&parse_filter(&wq.filter, r.schema())?)
                .with_context(|| format!("query {}", wq.qid))?;
            let q = match &wq.qvec {
                QueryVector::Inline(v) => v.clone(),
                QueryVector::File { file, idx } => {
                    let path = if file.is_absolute() {
                        file.clone()
                    } else {
                        base.join(file)
                    };
                    if !files.contains_key(&path) {
                        files.insert(path.clone(), fvecs::read(&path)?);
                    }
                    let v = &files[&path];
                    if *idx >= v.len() {
                        bail!("query {}: vector index {idx} out of range", wq.qid);
                    }
                    v.row(*idx).to_vec()
                }
            };
            if q.len() != r.dim() {
                bail!("query {}: dimension {} != {}", wq.qid, q.len(), r.dim());
            }
            Ok(ResolvedQuery {
                qid: wq.qid,
                filter,
                q,
                shape: wq.shape.clone().unwrap_or_default(),
                band: wq.band.clone().unwrap_or_default(),
            })
        })
        .collect()
}
