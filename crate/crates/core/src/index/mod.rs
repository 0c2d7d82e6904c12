// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Attribute indexes: trees over numeric attributes, hash tables over
//! categorical ones, each node owning a proximity graph over its tuples.
//!
//! Every index's node 0 is the shared root graph over the whole relation.

mod correlation;
mod layout;
mod ranges;

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::graph::{build_vamana, BuildParams, VamanaGraph};
use crate::predicate::NodePredicate;
use crate::relation::Relation;
use crate::seed::derive_seed;
use crate::Pk;

pub use correlation::{compute_correlations, CorrelationTable};
pub use layout::{hash_layout, tree_layout, NodeLayout};
pub use ranges::{attr_ranges, AttrRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexNode {
    pub id: NodeId,
    pub predicate: NodePredicate,
    pub graph: Arc<VamanaGraph>,
    pub card: usize,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub depth: usize,
    /// Value range of every attribute over this node's tuples.
    pub attr_ranges: Vec<AttrRange>,
}

impl IndexNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    Tree { fanout: usize, height: usize },
    Hash,
}

/// What to build, by attribute name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSpec {
    Tree {
        attr: String,
        fanout: usize,
        height: usize,
    },
    Hash {
        attr: String,
    },
}

impl IndexSpec {
    pub fn attr(&self) -> &str {
        match self {
            Self::Tree { attr, .. } | Self::Hash { attr } => attr,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeIndex {
    attr: usize,
    kind: IndexKind,
    nodes: Vec<IndexNode>,
}

impl AttributeIndex {
    /// Assembles an index from its node table, checking structure.
    pub fn from_nodes(attr: usize, kind: IndexKind, nodes: Vec<IndexNode>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if nodes.is_empty() || nodes[0].predicate != NodePredicate::Full {
            return bad("index needs a full-relation root".into());
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id != NodeId(i) {
                return bad(format!("node {i} has id {}", n.id.0));
            }
            if n.card != n.graph.card() {
                return bad(format!("node {i}: card {} != graph card", n.card));
            }
            if (i == 0) != n.parent.is_none() {
                return bad(format!("node {i}: bad parent"));
            }
            if i > 0 && n.predicate.attr() != Some(attr) {
                return bad(format!("node {i}: predicate on another attribute"));
            }
            for c in &n.children {
                match nodes.get(c.0) {
                    Some(child) if child.parent == Some(n.id) && c.0 > i => {}
                    _ => return bad(format!("node {i}: bad child {}", c.0)),
                }
            }
        }
        Ok(Self { attr, kind, nodes })
    }

    pub fn attr(&self) -> usize {
        self.attr
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn root(&self) -> &IndexNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &IndexNode {
        &self.nodes[id.0]
    }

    /// All nodes, parents before children.
    pub fn nodes(&self) -> &[IndexNode] {
        &self.nodes
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = &IndexNode> + '_ {
        self.nodes[id.0].children.iter().map(|c| &self.nodes[c.0])
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> impl Iterator<Item = &IndexNode> + '_ {
        let mut out = Vec::new();
        let mut stack = vec![NodeId::ROOT];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id.0];
            if n.is_leaf() {
                out.push(n);
            }
            stack.extend(n.children.iter().rev());
        }
        out.into_iter()
    }
}

/// One graph to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphJob {
    pub members: Vec<Pk>,
    pub seed: u64,
}

/// Runs independent graph builds; results are in job order.
pub trait GraphBuildRunner {
    fn run(&self, r: &Relation, bp: BuildParams, jobs: &[GraphJob]) -> Result<Vec<VamanaGraph>>;
}

/// Builds one job after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialRunner;

impl GraphBuildRunner for SequentialRunner {
    fn run(&self, r: &Relation, bp: BuildParams, jobs: &[GraphJob]) -> Result<Vec<VamanaGraph>> {
        jobs.iter()
            .map(|j| build_vamana(r, &j.members, bp, j.seed))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct IndexCatalog {
    relation: Arc<Relation>,
    root: Arc<VamanaGraph>,
    indexes: Vec<AttributeIndex>,
    correlations: CorrelationTable,
}

impl IndexCatalog {
    pub fn from_parts(
        relation: Arc<Relation>,
        root: Arc<VamanaGraph>,
        indexes: Vec<AttributeIndex>,
        correlations: CorrelationTable,
    ) -> Result<Self> {
        if root.card() != relation.len() {
            return Err(Error::InvalidParams(format!(
                "root graph has {} members, relation has {}",
                root.card(),
                relation.len()
            )));
        }
        if correlations.len() != relation.columns().len() {
            return Err(Error::InvalidParams("correlation table size".into()));
        }
        for (i, idx) in indexes.iter().enumerate() {
            if idx.attr >= relation.columns().len() {
                return Err(Error::InvalidParams(format!(
                    "index on column {}",
                    idx.attr
                )));
            }
            if indexes[..i].iter().any(|o| o.attr == idx.attr) {
                return Err(Error::DuplicateIndex(
                    relation.schema().name(idx.attr).to_string(),
                ));
            }
            if !Arc::ptr_eq(&idx.root().graph, &root) && *idx.root().graph != *root {
                return Err(Error::InvalidParams(
                    "index root is not the shared root".into(),
                ));
            }
        }
        Ok(Self {
            relation,
            root,
            indexes,
            correlations,
        })
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn relation_arc(&self) -> &Arc<Relation> {
        &self.relation
    }

    pub fn root_graph(&self) -> &Arc<VamanaGraph> {
        &self.root
    }

    pub fn indexes(&self) -> &[AttributeIndex] {
        &self.indexes
    }

    #[allow(clippy::should_implement_trait)]
    pub fn index(&self, id: IndexId) -> &AttributeIndex {
        &self.indexes[id.0]
    }

    /// The index on schema column `attr`, if any.
    pub fn index_on(&self, attr: usize) -> Option<IndexId> {
        self.indexes
            .iter()
            .position(|i| i.attr == attr)
            .map(IndexId)
    }

    pub fn correlations(&self) -> &CorrelationTable {
        &self.correlations
    }
}

/// Builds a catalog: the root graph, then every index node's graph.
#[derive(Debug, Clone)]
pub struct CatalogBuilder {
    relation: Arc<Relation>,
    specs: Vec<IndexSpec>,
    params: BuildParams,
    seed: u64,
    root: Option<Arc<VamanaGraph>>,
}

impl CatalogBuilder {
    pub fn new(relation: Arc<Relation>) -> Self {
        Self {
            relation,
            specs: Vec::new(),
            params: BuildParams::default(),
            seed: 0,
            root: None,
        }
    }

    pub fn index(mut self, spec: IndexSpec) -> Self {
        self.specs.push(spec);
        self
    }

    pub fn params(mut self, params: BuildParams) -> Self {
        self.params = params;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Reuses an already built root graph over the same relation.
    pub fn root_graph(mut self, root: Arc<VamanaGraph>) -> Self {
        self.root = Some(root);
        self
    }

    pub fn build(self) -> Result<IndexCatalog> {
        self.build_with(&SequentialRunner)
    }

    pub fn build_with(self, runner: &dyn GraphBuildRunner) -> Result<IndexCatalog> {
        let r = &*self.relation;
        if r.is_empty() {
            return Err(Error::EmptyRelation);
        }
        self.params.validate()?;

        let mut layouts = Vec::with_capacity(self.specs.len());
        for spec in &self.specs {
            let attr = r
                .schema()
                .index_of(spec.attr())
                .ok_or_else(|| Error::UnknownAttribute(spec.attr().to_string()))?;
            if layouts.iter().any(|(a, _, _)| *a == attr) {
                return Err(Error::DuplicateIndex(spec.attr().to_string()));
            }
            let (kind, nodes) = match *spec {
                IndexSpec::Tree { fanout, height, .. } => (
                    IndexKind::Tree { fanout, height },
                    tree_layout(r, attr, fanout, height)?,
                ),
                IndexSpec::Hash { .. } => (IndexKind::Hash, hash_layout(r, attr)?),
            };
            layouts.push((attr, kind, nodes));
        }

        // Node 0 of each index is the root; everything else gets a job,
        // deepest layers first.
        let mut jobs = Vec::new();
        let mut slots = Vec::new();
        let root = match &self.root {
            Some(g) => {
                if g.card() != r.len() || g.members().iter().copied().ne(r.pks()) {
                    return Err(Error::InvalidParams(
                        "root graph does not span the relation".into(),
                    ));
                }
                None
            }
            None => {
                jobs.push(GraphJob {
                    members: r.pks().collect(),
                    seed: derive_seed(self.seed, 0),
                });
                slots.push((usize::MAX, 0));
                Some(0)
            }
        };
        for (i, (_, _, nodes)) in layouts.iter().enumerate() {
            for (j, n) in nodes.iter().enumerate().skip(1).rev() {
                jobs.push(GraphJob {
                    members: n.members.clone(),
                    seed: derive_seed(self.seed, ((i as u64 + 1) << 32) | j as u64),
                });
                slots.push((i, j));
            }
        }
        let mut graphs = runner.run(r, self.params, &jobs)?;
        if graphs.len() != jobs.len() {
            return Err(Error::InvalidParams(
                "runner returned wrong graph count".into(),
            ));
        }
        let root = match root {
            Some(k) => Arc::new(core::mem::replace(
                &mut graphs[k],
                VamanaGraph::from_local(vec![0], vec![vec![]], 0, 1),
            )),
            None => self.root.clone().unwrap(),
        };
        let mut built: Vec<Vec<Option<Arc<VamanaGraph>>>> = layouts
            .iter()
            .map(|(_, _, nodes)| vec![None; nodes.len()])
            .collect();
        for ((i, j), g) in slots.into_iter().zip(graphs) {
            if i != usize::MAX {
                built[i][j] = Some(Arc::new(g));
            }
        }

        let root_ranges = attr_ranges(r, root.members());
        let mut indexes = Vec::with_capacity(layouts.len());
        for ((attr, kind, nodes), graphs) in layouts.into_iter().zip(built) {
            let nodes = nodes
                .into_iter()
                .zip(graphs)
                .enumerate()
                .map(|(j, (n, g))| {
                    let (graph, ranges) = match g {
                        Some(g) => (g, attr_ranges(r, &n.members)),
                        None => (root.clone(), root_ranges.clone()),
                    };
                    IndexNode {
                        id: NodeId(j),
                        predicate: n.predicate,
                        card: graph.card(),
                        graph,
                        children: n.children,
                        parent: n.parent,
                        depth: n.depth,
                        attr_ranges: ranges,
                    }
                })
                .collect();
            indexes.push(AttributeIndex::from_nodes(attr, kind, nodes)?);
        }
        let correlations = if r.columns().len() < 2 {
            CorrelationTable::identity(r.columns().len())
        } else {
            compute_correlations(r)?
        };
        IndexCatalog::from_parts(self.relation.clone(), root, indexes, correlations)
    }
}
