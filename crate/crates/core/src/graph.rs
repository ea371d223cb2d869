//! Directed weighted follower graph.
//!
//! An edge `src -> dst` means "`src` follows (trusts) `dst`". Node ids are
//! arbitrary strings; internally every node gets a dense index assigned in
//! sorted-id order, so two graphs built from the same input always index
//! their nodes identically.
//!
//! Both adjacency directions are stored in CSR form: `out_edges(v)` and
//! `in_edges(u)` are contiguous slices into edge arrays sorted by source and
//! by destination respectively.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: String, dst: String },
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("edge {src} -> {dst} has non-positive or non-finite weight {weight}")]
    BadWeight {
        src: String,
        dst: String,
        weight: f64,
    },
    #[error("node {0} listed twice in node attributes")]
    DuplicateNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
}

/// Dense index of a node inside one [`TrustGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIdx(pub usize);

impl NodeIdx {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Input edge as read from a file or built in code. `weight: None` means 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub src: String,
    pub dst: String,
    pub weight: Option<f64>,
}

impl EdgeSpec {
    pub fn new(src: impl Into<String>, dst: impl Into<String>) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
            weight: None,
        }
    }

    pub fn weighted(src: impl Into<String>, dst: impl Into<String>, weight: f64) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
            weight: Some(weight),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeAttrs {
    pub id: String,
    pub follower_count: Option<u64>,
    pub is_news_org: bool,
}

impl NodeAttrs {
    pub fn news_org(id: impl Into<String>, follower_count: u64) -> Self {
        Self {
            id: id.into(),
            follower_count: Some(follower_count),
            is_news_org: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: NodeIdx,
    pub dst: NodeIdx,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct TrustGraph {
    ids: Arc<[String]>,
    index: HashMap<String, usize>,
    follower_count: Vec<Option<u64>>,
    is_news_org: Vec<bool>,
    // sorted by (src, dst)
    out: Vec<Edge>,
    out_offsets: Vec<usize>,
    // sorted by (dst, src)
    inc: Vec<Edge>,
    in_offsets: Vec<usize>,
}

impl TrustGraph {
    /// Builds a graph from an edge list and optional per-node attributes.
    ///
    /// Nodes that appear only in `edges` get no follower count and are not
    /// news organizations. Nodes that appear only in `nodes` are isolated.
    pub fn build(edges: &[EdgeSpec], nodes: &[NodeAttrs]) -> Result<Self, GraphError> {
        let mut attrs: BTreeMap<&str, &NodeAttrs> = BTreeMap::new();
        for a in nodes {
            if attrs.insert(a.id.as_str(), a).is_some() {
                return Err(GraphError::DuplicateNode(a.id.clone()));
            }
        }

        let mut seen = BTreeSet::new();
        let mut id_set: BTreeSet<&str> = attrs.keys().copied().collect();
        for e in edges {
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src.clone()));
            }
            let w = e.weight.unwrap_or(1.0);
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::BadWeight {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                    weight: w,
                });
            }
            if !seen.insert((e.src.as_str(), e.dst.as_str())) {
                return Err(GraphError::DuplicateEdge {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                });
            }
            id_set.insert(&e.src);
            id_set.insert(&e.dst);
        }

        let ids: Vec<String> = id_set.into_iter().map(str::to_owned).collect();
        let index: HashMap<String, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let n = ids.len();

        let mut follower_count = vec![None; n];
        let mut is_news_org = vec![false; n];
        for (id, a) in &attrs {
            let i = index[*id];
            follower_count[i] = a.follower_count;
            is_news_org[i] = a.is_news_org;
        }

        let mut out: Vec<Edge> = edges
            .iter()
            .map(|e| Edge {
                src: NodeIdx(index[&e.src]),
                dst: NodeIdx(index[&e.dst]),
                weight: e.weight.unwrap_or(1.0),
            })
            .collect();
        out.sort_by_key(|e| (e.src, e.dst));
        let mut inc = out.clone();
        inc.sort_by_key(|e| (e.dst, e.src));

        let out_offsets = offsets(n, out.iter().map(|e| e.src.0));
        let in_offsets = offsets(n, inc.iter().map(|e| e.dst.0));

        Ok(Self {
            ids: ids.into(),
            index,
            follower_count,
            is_news_org,
            out,
            out_offsets,
            inc,
            in_offsets,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.len()
    }

    /// Node ids in index order (sorted).
    pub fn ids(&self) -> &Arc<[String]> {
        &self.ids
    }

    pub fn id(&self, v: NodeIdx) -> &str {
        &self.ids[v.0]
    }

    pub fn index_of(&self, id: &str) -> Option<NodeIdx> {
        self.index.get(id).copied().map(NodeIdx)
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeIdx> {
        (0..self.node_count()).map(NodeIdx)
    }

    pub fn follower_count(&self, v: NodeIdx) -> Option<u64> {
        self.follower_count[v.0]
    }

    pub fn is_news_org(&self, v: NodeIdx) -> bool {
        self.is_news_org[v.0]
    }

    pub fn out_edges(&self, v: NodeIdx) -> &[Edge] {
        &self.out[self.out_offsets[v.0]..self.out_offsets[v.0 + 1]]
    }

    pub fn in_edges(&self, u: NodeIdx) -> &[Edge] {
        &self.inc[self.in_offsets[u.0]..self.in_offsets[u.0 + 1]]
    }

    /// Outgoing and incoming edges of the node with id `id`.
    pub fn degree_views(&self, id: &str) -> Result<(&[Edge], &[Edge]), GraphError> {
        let v = self
            .index_of(id)
            .ok_or_else(|| GraphError::UnknownNode(id.to_owned()))?;
        Ok((self.out_edges(v), self.in_edges(v)))
    }

    /// All edges ordered by (src, dst) index.
    pub fn edges(&self) -> &[Edge] {
        &self.out
    }

    /// Edges converted back to their string-keyed form.
    pub fn edge_specs(&self) -> Vec<EdgeSpec> {
        self.out
            .iter()
            .map(|e| EdgeSpec::weighted(self.id(e.src), self.id(e.dst), e.weight))
            .collect()
    }

    pub fn node_attrs(&self) -> Vec<NodeAttrs> {
        self.nodes()
            .map(|v| NodeAttrs {
                id: self.id(v).to_owned(),
                follower_count: self.follower_count(v),
                is_news_org: self.is_news_org(v),
            })
            .collect()
    }
}

fn offsets(n: usize, keys: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut off = vec![0usize; n + 1];
    for k in keys {
        off[k + 1] += 1;
    }
    for i in 0..n {
        off[i + 1] += off[i];
    }
    off
}
