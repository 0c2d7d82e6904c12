// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Catalog directories.
//!
//! A catalog directory holds `manifest.json`, copies of the vector and
//! attribute files it was built from, and one graph file per distinct
//! graph (`root.graph`, `i<index>_n<node>.graph`).

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use pathfinder_core::index::{
    AttrRange, AttributeIndex, CorrelationTable, IndexKind, IndexNode, NodeId,
};
use pathfinder_core::predicate::{AtomicPredicate, Bound, Interval, NodePredicate};
use pathfinder_core::{BuildParams, DistanceMetric, IndexCatalog, Relation};
use serde::{Deserialize, Serialize};

use crate::{attrs, fvecs, graph_io};

pub const MANIFEST: &str = "manifest.json";
pub const FORMAT: &str = "pathfinder-catalog";
pub const VERSION: u32 = 1;
pub const VECTORS: &str = "vectors.fvecs";
pub const ATTRS: &str = "attrs.csv";
pub const ROOT_GRAPH: &str = "root.graph";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub vectors: String,
    pub attrs: String,
    pub metric: String,
    pub seed: u64,
    pub build: BuildDoc,
    pub card: usize,
    pub root_graph: String,
    pub correlations: CorrelationDoc,
    pub indexes: Vec<IndexDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildDoc {
    pub max_degree: usize,
    pub build_queue: usize,
    pub prune_alpha: f32,
}

impl From<BuildParams> for BuildDoc {
    fn from(b: BuildParams) -> Self {
        Self {
            max_degree: b.max_degree,
            build_queue: b.build_queue,
            prune_alpha: b.prune_alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDoc {
    pub attrs: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDoc {
    pub attr: String,
    #[serde(flatten)]
    pub kind: KindDoc,
    pub nodes: Vec<NodeDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindDoc {
    Tree { fanout: usize, height: usize },
    Hash,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
    pub predicate: PredicateDoc,
    pub card: usize,
    pub graph: String,
    /// Per attribute, in schema order.
    pub attr_ranges: Vec<RangeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PredicateDoc {
    Full,
    Range {
        lower: Option<BoundDoc>,
        upper: Option<BoundDoc>,
    },
    In {
        values: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundDoc {
    pub value: f64,
    pub inclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeDoc {
    Numeric { min: f64, max: f64 },
    Categorical(Vec<String>),
}

fn bound_doc(b: Option<Bound>) -> Option<BoundDoc> {
    b.map(|b| BoundDoc {
        value: b.value,
        inclusive: b.inclusive,
    })
}

fn bound(b: Option<BoundDoc>) -> Option<Bound> {
    b.map(|b| Bound {
        value: b.value,
        inclusive: b.inclusive,
    })
}

fn predicate_doc(p: &NodePredicate) -> PredicateDoc {
    match p {
        NodePredicate::Full => PredicateDoc::Full,
        NodePredicate::Atom(AtomicPredicate::Range { interval, .. }) => PredicateDoc::Range {
            lower: bound_doc(interval.lower),
            upper: bound_doc(interval.upper),
        },
        NodePredicate::Atom(AtomicPredicate::InSet { values, .. }) => PredicateDoc::In {
            values: values.iter().cloned().collect(),
        },
    }
}

fn predicate(p: &PredicateDoc, attr: usize) -> NodePredicate {
    match p {
        PredicateDoc::Full => NodePredicate::Full,
        PredicateDoc::Range { lower, upper } => NodePredicate::Atom(AtomicPredicate::range(
            attr,
            Interval::new(bound(*lower), bound(*upper)),
        )),
        PredicateDoc::In { values } => {
            NodePredicate::Atom(AtomicPredicate::in_set(attr, values.iter().cloned()))
        }
    }
}

fn range_doc(r: &AttrRange) -> RangeDoc {
    match r {
        AttrRange::Numeric { min, max } => RangeDoc::Numeric {
            min: *min,
            max: *max,
        },
        AttrRange::Categorical(s) => RangeDoc::Categorical(s.iter().cloned().collect()),
    }
}

fn range(r: &RangeDoc) -> AttrRange {
    match r {
        RangeDoc::Numeric { min, max } => AttrRange::Numeric {
            min: *min,
            max: *max,
        },
        RangeDoc::Categorical(v) => AttrRange::Categorical(v.iter().cloned().collect()),
    }
}

fn graph_file(index: usize, node: usize) -> String {
    if node == 0 {
        ROOT_GRAPH.to_string()
    } else {
        format!("i{index}_n{node}.graph")
    }
}

/// Builds the manifest describing `cat`.
pub fn manifest(cat: &IndexCatalog, params: BuildParams, seed: u64) -> Manifest {
    let r = cat.relation();
    let schema = r.schema();
    let n = schema.len();
    let corr = cat.correlations();
    Manifest {
        format: FORMAT.into(),
        version: VERSION,
        vectors: VECTORS.into(),
        attrs: ATTRS.into(),
        metric: r.metric().name().into(),
        seed,
        build: params.into(),
        card: r.len(),
        root_graph: ROOT_GRAPH.into(),
        correlations: CorrelationDoc {
            attrs: (0..n).map(|i| schema.name(i).to_string()).collect(),
            matrix: (0..n)
                .map(|i| (0..n).map(|j| corr.get(i, j)).collect())
                .collect(),
        },
        indexes: cat
            .indexes()
            .iter()
            .enumerate()
            .map(|(i, idx)| IndexDoc {
                attr: schema.name(idx.attr()).to_string(),
                kind: match idx.kind() {
                    IndexKind::Tree { fanout, height } => KindDoc::Tree { fanout, height },
                    IndexKind::Hash => KindDoc::Hash,
                },
                nodes: idx
                    .nodes()
                    .iter()
                    .map(|node| NodeDoc {
                        id: node.id.0,
                        parent: node.parent.map(|p| p.0),
                        depth: node.depth,
                        children: node.children.iter().map(|c| c.0).collect(),
                        predicate: predicate_doc(&node.predicate),
                        card: node.card,
                        graph: graph_file(i, node.id.0),
                        attr_ranges: node.attr_ranges.iter().map(range_doc).collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Writes `cat` to `dir`, creating it if needed.
pub fn save(cat: &IndexCatalog, dir: &Path, params: BuildParams, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let r = cat.relation();
    fvecs::write(
        &dir.join(VECTORS),
        &fvecs::Vectors {
            dim: r.dim(),
            data: r.vectors().to_vec(),
        },
    )?;
    attrs::write(&dir.join(ATTRS), r.schema(), r.columns())?;
    graph_io::write(&dir.join(ROOT_GRAPH), cat.root_graph())?;
    for (i, idx) in cat.indexes().iter().enumerate() {
        for node in &idx.nodes()[1..] {
            graph_io::write(&dir.join(graph_file(i, node.id.0)), &node.graph)?;
        }
    }
    let m = manifest(cat, params, seed);
    let text = serde_json::to_string_pretty(&m)? + "\n";
    std::fs::write(dir.join(MANIFEST), text)?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let m: Manifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if m.format != FORMAT {
        bail!("{} is not a catalog manifest", path.display());
    }
    if m.version != VERSION {
        bail!("unsupported catalog version {}", m.version);
    }
    Ok(m)
}

/// Loads a catalog directory written by [`save`].
pub fn load(dir: &Path) -> Result<(IndexCatalog, Manifest)> {
    let m = read_manifest(dir)?;
    let metric = DistanceMetric::from_name(&m.metric)
        .with_context(|| format!("unknown metric {:?}", m.metric))?;
    let r: Relation =
        attrs::load_relation(&dir.join(&m.vectors), &dir.join(&m.attrs))?.with_metric(metric);
    if r.len() != m.card {
        bail!("manifest says {} tuples, data has {}", m.card, r.len());
    }
    let schema = r.schema().clone();
    let root = Arc::new(graph_io::read(&dir.join(&m.root_graph))?);

    let names: Vec<&str> = m.correlations.attrs.iter().map(String::as_str).collect();
    let expected: Vec<&str> = (0..schema.len()).map(|i| schema.name(i)).collect();
    if names != expected {
        bail!("correlation table attributes do not match the schema");
    }
    let corr = CorrelationTable::from_matrix(
        schema.len(),
        m.correlations.matrix.iter().flatten().copied().collect(),
    )?;

    let mut indexes = Vec::with_capacity(m.indexes.len());
    for doc in &m.indexes {
        let attr = schema
            .index_of(&doc.attr)
            .with_context(|| format!("unknown index attribute {:?}", doc.attr))?;
        let kind = match doc.kind {
            KindDoc::Tree { fanout, height } => IndexKind::Tree { fanout, height },
            KindDoc::Hash => IndexKind::Hash,
        };
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for nd in &doc.nodes {
            let graph = if nd.id == 0 {
                root.clone()
            } else {
                Arc::new(graph_io::read(&dir.join(&nd.graph))?)
            };
            if graph.card() != nd.card {
                bail!("node {} of index on {:?}: card mismatch", nd.id, doc.attr);
            }
            if nd.attr_ranges.len() != schema.len() {
                bail!(
                    "node {} of index on {:?}: attr_ranges size",
                    nd.id,
                    doc.attr
                );
            }
            nodes.push(IndexNode {
                id: NodeId(nd.id),
                predicate: predicate(&nd.predicate, attr),
                graph,
                card: nd.card,
                children: nd.children.iter().map(|&c| NodeId(c)).collect(),
                parent: nd.parent.map(NodeId),
                depth: nd.depth,
                attr_ranges: nd.attr_ranges.iter().map(range).collect(),
            });
        }
        indexes.push(AttributeIndex::from_nodes(attr, kind, nodes)?);
    }
    let cat = IndexCatalog::from_parts(Arc::new(r), root, indexes, corr)?;
    Ok((cat, m))
}

impl Manifest {
    pub fn build_params(&self) -> BuildParams {
        BuildParams {
            max_degree: self.build.max_degree,
            build_queue: self.build.build_queue,
            prune_alpha: self.build.prune_alpha,
        }
    }
}
