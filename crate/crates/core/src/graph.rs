//! Balanced rooted trees, paths, and the boxslash product `T ⊠̸ P`.
//!
//! Tree nodes are addressed by integer arrays: the root is `[]` and the
//! children of `A` are `A+1, A+2, ..., A+d_{|A|}`. A product vertex is a
//! node address paired with a 1-based path position and is rendered as
//! `1.2.2@3` (root: `r@3`).
//!
//! Every product edge is stored with its endpoints in the canonical
//! orientation `(a, b)` where `a` has the larger depth or the smaller path
//! position (or both).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of product vertices we are willing to build.
pub const MAX_VERTICES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a tree needs at least one level of degrees")]
    NoLevels,
    #[error("degree at level {level} must be at least 1")]
    ZeroDegree { level: usize },
    #[error("path length must be at least 1")]
    EmptyPath,
    #[error("graph exceeds the {MAX_VERTICES} vertex limit")]
    TooLarge,
    #[error("node address of length {len} exceeds tree height {height}")]
    DepthOverflow { len: usize, height: usize },
    #[error("node {0} is not part of the tree")]
    UnknownNode(String),
    #[error("restriction is not uniform: {0}")]
    Shape(String),
    #[error("cannot parse vertex id {0:?}")]
    BadVertexId(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(String),
    #[error("duplicate edge {0}--{1}")]
    DuplicateEdge(String, String),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("graph file: {0}")]
    Format(String),
}

/// Degree sequence `(d_0, ..., d_{n-1})` of a balanced rooted tree of height `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct TreeSpec {
    degrees: Vec<u32>,
}

impl TreeSpec {
    pub fn new(degrees: Vec<u32>) -> Result<Self, GraphError> {
        if degrees.is_empty() {
            return Err(GraphError::NoLevels);
        }
        if let Some(level) = degrees.iter().position(|&d| d == 0) {
            return Err(GraphError::ZeroDegree { level });
        }
        let spec = TreeSpec { degrees };
        spec.checked_node_count().ok_or(GraphError::TooLarge)?;
        Ok(spec)
    }

    pub fn height(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Number of children of every node at `depth`; 0 for leaves.
    pub fn degree(&self, depth: usize) -> u32 {
        self.degrees.get(depth).copied().unwrap_or(0)
    }

    /// Number of nodes at `depth`.
    pub fn level_size(&self, depth: usize) -> usize {
        self.degrees[..depth].iter().map(|&d| d as usize).product()
    }

    /// `1 + d_0 + d_0 d_1 + ...`, or `None` past [`MAX_VERTICES`].
    fn checked_node_count(&self) -> Option<usize> {
        let mut total = 1usize;
        let mut level = 1usize;
        for &d in &self.degrees {
            level = level.checked_mul(d as usize)?;
            total = total.checked_add(level)?;
            if total > MAX_VERTICES {
                return None;
            }
        }
        Some(total)
    }

    pub fn node_count(&self) -> usize {
        self.checked_node_count().expect("validated at construction")
    }
}

impl TryFrom<Vec<u32>> for TreeSpec {
    type Error = GraphError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        TreeSpec::new(v)
    }
}

impl From<TreeSpec> for Vec<u32> {
    fn from(spec: TreeSpec) -> Self {
        spec.degrees
    }
}

/// Address of a tree node: 1-indexed child choices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeIndex(Vec<u32>);

impl NodeIndex {
    pub fn root() -> Self {
        NodeIndex(Vec::new())
    }

    pub fn new(path: Vec<u32>) -> Self {
        NodeIndex(path)
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `A + v`.
    pub fn child(&self, v: u32) -> NodeIndex {
        let mut p = self.0.clone();
        p.push(v);
        NodeIndex(p)
    }

    /// `A + B`.
    pub fn concat(&self, tail: &NodeIndex) -> NodeIndex {
        let mut p = self.0.clone();
        p.extend_from_slice(&tail.0);
        NodeIndex(p)
    }

    pub fn parent(&self) -> Option<NodeIndex> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeIndex(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn starts_with(&self, prefix: &NodeIndex) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// The suffix after `prefix`, if `prefix` is one.
    pub fn strip_prefix(&self, prefix: &NodeIndex) -> Option<NodeIndex> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| NodeIndex(s.to_vec()))
    }
}

impl From<Vec<u32>> for NodeIndex {
    fn from(v: Vec<u32>) -> Self {
        NodeIndex(v)
    }
}

impl From<u32> for NodeIndex {
    fn from(v: u32) -> Self {
        NodeIndex(vec![v])
    }
}

impl fmt::Display for NodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("r");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for NodeIndex {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "r" {
            return Ok(NodeIndex::root());
        }
        s.split('.')
            .map(|t| match t.parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(GraphError::BadVertexId(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(NodeIndex)
    }
}

/// A product vertex `(A, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PVertex {
    pub node: NodeIndex,
    pub pos: u32,
}

impl PVertex {
    pub fn new(node: impl Into<NodeIndex>, pos: u32) -> Self {
        PVertex { node: node.into(), pos }
    }
}

impl fmt::Display for PVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.node, self.pos)
    }
}

impl FromStr for PVertex {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (node, pos) = s
            .split_once('@')
            .ok_or_else(|| GraphError::BadVertexId(s.to_string()))?;
        let pos: u32 = pos.parse().map_err(|_| GraphError::BadVertexId(s.to_string()))?;
        if pos == 0 {
            return Err(GraphError::BadVertexId(s.to_string()));
        }
        Ok(PVertex {
            node: node.parse()?,
            pos,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Vertical,
    Horizontal,
    Diagonal,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 3] = [EdgeKind::Vertical, EdgeKind::Horizontal, EdgeKind::Diagonal];

    /// Queue index used by the three-queue layout.
    pub fn index(self) -> usize {
        match self {
            EdgeKind::Vertical => 0,
            EdgeKind::Horizontal => 1,
            EdgeKind::Diagonal => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Vertical => "vertical",
            EdgeKind::Horizontal => "horizontal",
            EdgeKind::Diagonal => "diagonal",
        }
    }

    fn dot_color(self) -> &'static str {
        match self {
            EdgeKind::Vertical => "black",
            EdgeKind::Horizontal => "orange",
            EdgeKind::Diagonal => "blue",
        }
    }
}

/// An enumerated balanced tree. Nodes are numbered level by level, in
/// lexicographic order within a level.
#[derive(Debug, Clone)]
pub struct Tree {
    spec: TreeSpec,
    nodes: Vec<NodeIndex>,
    ids: HashMap<NodeIndex, usize>,
    level_start: Vec<usize>,
}

/// Enumerate every node of the tree described by `spec`.
pub fn build_tree(spec: &TreeSpec) -> Tree {
    let mut nodes = vec![NodeIndex::root()];
    let mut level_start = vec![0, 1];
    for depth in 0..spec.height() {
        let (lo, hi) = (level_start[depth], level_start[depth + 1]);
        for i in lo..hi {
            for v in 1..=spec.degree(depth) {
                let child = nodes[i].child(v);
                nodes.push(child);
            }
        }
        level_start.push(nodes.len());
    }
    let ids = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    Tree {
        spec: spec.clone(),
        nodes,
        ids,
        level_start,
    }
}

impl Tree {
    pub fn spec(&self) -> &TreeSpec {
        &self.spec
    }

    pub fn height(&self) -> usize {
        self.spec.height()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeIndex] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NodeIndex {
        &self.nodes[id]
    }

    pub fn id(&self, node: &NodeIndex) -> Option<usize> {
        self.ids.get(node).copied()
    }

    pub fn contains(&self, node: &NodeIndex) -> bool {
        self.ids.contains_key(node)
    }

    /// Nodes of depth `depth`, in lexicographic order.
    pub fn level(&self, depth: usize) -> &[NodeIndex] {
        &self.nodes[self.level_start[depth]..self.level_start[depth + 1]]
    }

    pub fn parent(&self, node: &NodeIndex) -> Option<NodeIndex> {
        node.parent()
    }

    pub fn children(&self, node: &NodeIndex) -> Vec<NodeIndex> {
        (1..=self.spec.degree(node.depth())).map(|v| node.child(v)).collect()
    }

    /// Nodes in the subtree rooted at `root`, as suffixes relative to it,
    /// level by level (the empty suffix first).
    pub fn relative_subtree(&self, root: &NodeIndex) -> Vec<NodeIndex> {
        let mut out = vec![NodeIndex::root()];
        let mut frontier = vec![NodeIndex::root()];
        for depth in root.depth()..self.height() {
            let mut next = Vec::new();
            for rel in &frontier {
                for v in 1..=self.spec.degree(depth) {
                    next.push(rel.child(v));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Checked `A + B`: the result must be a node of this tree.
    pub fn concat(&self, a: &NodeIndex, b: &NodeIndex) -> Result<NodeIndex, GraphError> {
        let joined = a.concat(b);
        if joined.depth() > self.height() {
            return Err(GraphError::DepthOverflow {
                len: joined.depth(),
                height: self.height(),
            });
        }
        if !self.contains(&joined) {
            return Err(GraphError::UnknownNode(joined.to_string()));
        }
        Ok(joined)
    }
}

/// Simple undirected graph with string vertex labels. Edges keep the
/// endpoint orientation they were added with.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    labels: Vec<String>,
    label_ids: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
}

impl Graph {
    /// `n` isolated vertices labelled `0..n`.
    pub fn new(n: usize) -> Self {
        Graph::with_labels((0..n).map(|i| i.to_string()).collect()).expect("numeric labels are distinct")
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self, GraphError> {
        let mut label_ids = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if label_ids.insert(l.clone(), i).is_some() {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Graph {
            labels,
            label_ids,
            edges: Vec::new(),
            lookup: HashMap::new(),
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<usize, GraphError> {
        for w in [u, v] {
            if w >= self.labels.len() {
                return Err(GraphError::UnknownVertex(w.to_string()));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(self.labels[u].clone()));
        }
        let key = (u.min(v), u.max(v));
        if self.lookup.contains_key(&key) {
            return Err(GraphError::DuplicateEdge(
                self.labels[u].clone(),
                self.labels[v].clone(),
            ));
        }
        let id = self.edges.len();
        self.edges.push((u, v));
        self.lookup.insert(key, id);
        Ok(id)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 1..n {
            g.add_edge(u - 1, u).unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0).unwrap();
        }
        g
    }

    /// `K_{1,leaves}` with centre 0.
    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::new(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v).unwrap();
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.lookup.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.label_ids.get(label).copied()
    }

    /// `"u--v"` with `u` the stored first endpoint.
    pub fn edge_key(&self, id: usize) -> String {
        let (u, v) = self.edges[id];
        format!("{}--{}", self.labels[u], self.labels[v])
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.vertex_count());
        for &(u, v) in &self.edges {
            g.add_edge(perm[u], perm[v]).unwrap();
        }
        g
    }
}

/// A product edge with resolved endpoints, in canonical orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEdge {
    pub a: PVertex,
    pub b: PVertex,
    pub kind: EdgeKind,
}

/// `T ⊠̸ P_m`, with the tree directed to the root and the path directed
/// away from position 1.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    tree: Tree,
    path_len: u32,
    graph: Graph,
    kinds: Vec<EdgeKind>,
}

/// Build `T ⊠̸ P_m` for the tree described by `spec`.
pub fn boxslash_product(spec: &TreeSpec, path_len: u32) -> Result<ProductGraph, GraphError> {
    if path_len == 0 {
        return Err(GraphError::EmptyPath);
    }
    let vertices = spec
        .node_count()
        .checked_mul(path_len as usize)
        .filter(|&n| n <= MAX_VERTICES)
        .ok_or(GraphError::TooLarge)?;
    let tree = build_tree(spec);
    let m = path_len as usize;
    let labels = (0..vertices)
        .map(|id| {
            PVertex {
                node: tree.node(id / m).clone(),
                pos: (id % m) as u32 + 1,
            }
            .to_string()
        })
        .collect();
    let mut graph = Graph::with_labels(labels)?;
    let mut kinds = Vec::new();
    let vid = |node: usize, pos: u32| node * m + (pos as usize - 1);
    for (child, node) in tree.nodes().iter().enumerate() {
        let Some(parent) = node.parent() else { continue };
        let parent = tree.id(&parent).expect("parent of a tree node");
        for i in 1..=path_len {
            graph.add_edge(vid(child, i), vid(parent, i))?;
            kinds.push(EdgeKind::Vertical);
        }
    }
    for node in 0..tree.len() {
        for i in 1..path_len {
            graph.add_edge(vid(node, i), vid(node, i + 1))?;
            kinds.push(EdgeKind::Horizontal);
        }
    }
    for (child, node) in tree.nodes().iter().enumerate() {
        let Some(parent) = node.parent() else { continue };
        let parent = tree.id(&parent).expect("parent of a tree node");
        for i in 1..path_len {
            graph.add_edge(vid(child, i), vid(parent, i + 1))?;
            kinds.push(EdgeKind::Diagonal);
        }
    }
    Ok(ProductGraph {
        tree,
        path_len,
        graph,
        kinds,
    })
}

impl ProductGraph {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn spec(&self) -> &TreeSpec {
        self.tree.spec()
    }

    pub fn path_len(&self) -> u32 {
        self.path_len
    }

    /// The underlying plain graph; vertex labels are product vertex ids.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn vertex(&self, id: usize) -> PVertex {
        let m = self.path_len as usize;
        PVertex {
            node: self.tree.node(id / m).clone(),
            pos: (id % m) as u32 + 1,
        }
    }

    pub fn vertex_id(&self, v: &PVertex) -> Option<usize> {
        if v.pos == 0 || v.pos > self.path_len {
            return None;
        }
        let node = self.tree.id(&v.node)?;
        Some(node * self.path_len as usize + v.pos as usize - 1)
    }

    /// Id of `(node, pos)`; panics if it is not a vertex.
    pub fn id_of(&self, node: &NodeIndex, pos: u32) -> usize {
        let m = self.path_len as usize;
        let n = self.tree.id(node).unwrap_or_else(|| panic!("no node {node}"));
        assert!(pos >= 1 && pos <= self.path_len, "position {pos} out of range");
        n * m + pos as usize - 1
    }

    pub fn kind(&self, edge: usize) -> EdgeKind {
        self.kinds[edge]
    }

    pub fn kinds(&self) -> &[EdgeKind] {
        &self.kinds
    }

    pub fn edges(&self) -> impl Iterator<Item = ProductEdge> + '_ {
        self.graph
            .edges()
            .iter()
            .zip(&self.kinds)
            .map(|(&(a, b), &kind)| ProductEdge {
                a: self.vertex(a),
                b: self.vertex(b),
                kind,
            })
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn descriptor(&self) -> GraphFile {
        GraphFile {
            tree_degrees: Some(self.spec().degrees().to_vec()),
            path_len: Some(self.path_len),
            ..GraphFile::default()
        }
    }
}

/// Child subsets to keep, keyed by node. Nodes without an entry keep all
/// of their children.
pub type KeepMap = BTreeMap<NodeIndex, BTreeSet<u32>>;

/// Result of restricting a tree to a uniform subtree.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub spec: TreeSpec,
    /// Old address of every surviving node mapped to its new address.
    pub relabel: BTreeMap<NodeIndex, NodeIndex>,
}

/// Restrict `tree` to the children selected by `keep`, renumbering kept
/// children `1..d'` in increasing order of their old index.
pub fn restrict_tree(tree: &Tree, keep: &KeepMap) -> Result<Restriction, GraphError> {
    for node in keep.keys() {
        if !tree.contains(node) {
            return Err(GraphError::UnknownNode(node.to_string()));
        }
        if node.depth() == tree.height() {
            return Err(GraphError::Shape(format!("leaf {node} has no children to select")));
        }
    }
    let mut relabel = BTreeMap::new();
    relabel.insert(NodeIndex::root(), NodeIndex::root());
    let mut frontier = vec![(NodeIndex::root(), NodeIndex::root())];
    let mut degrees = Vec::with_capacity(tree.height());
    for depth in 0..tree.height() {
        let full = tree.spec().degree(depth);
        let mut level_degree = None;
        let mut next = Vec::new();
        for (old, new) in &frontier {
            let kept: Vec<u32> = match keep.get(old) {
                Some(set) => set.iter().copied().collect(),
                None => (1..=full).collect(),
            };
            if kept.is_empty() {
                return Err(GraphError::Shape(format!("node {old} keeps no children")));
            }
            if let Some(&bad) = kept.iter().find(|&&c| c == 0 || c > full) {
                return Err(GraphError::Shape(format!(
                    "node {old} has no child {bad} (degree {full})"
                )));
            }
            match level_degree {
                None => level_degree = Some(kept.len()),
                Some(d) if d != kept.len() => {
                    return Err(GraphError::Shape(format!(
                        "level {depth} keeps {d} children at one node but {} at {old}",
                        kept.len()
                    )))
                }
                _ => {}
            }
            for (i, &c) in kept.iter().enumerate() {
                let (o, n) = (old.child(c), new.child(i as u32 + 1));
                relabel.insert(o.clone(), n.clone());
                next.push((o, n));
            }
        }
        degrees.push(level_degree.expect("frontier is never empty") as u32);
        frontier = next;
    }
    Ok(Restriction {
        spec: TreeSpec::new(degrees)?,
        relabel,
    })
}

/// The product over the restricted tree, plus the old-to-new node relabeling.
pub fn restrict_subtree(
    graph: &ProductGraph,
    keep: &KeepMap,
) -> Result<(ProductGraph, BTreeMap<NodeIndex, NodeIndex>), GraphError> {
    let r = restrict_tree(graph.tree(), keep)?;
    let product = boxslash_product(&r.spec, graph.path_len())?;
    Ok((product, r.relabel))
}

/// Graphviz rendering with edge attribute `kind` and the conventional
/// colours (vertical black, horizontal orange, diagonal blue).
pub fn to_dot(graph: &ProductGraph) -> String {
    let mut out = String::from("graph boxslash {\n");
    for label in graph.graph().labels() {
        out.push_str(&format!("  \"{label}\";\n"));
    }
    let g = graph.graph();
    for (id, &(a, b)) in g.edges().iter().enumerate() {
        let kind = graph.kind(id);
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [kind={}, color={}];\n",
            g.label(a),
            g.label(b),
            kind.name(),
            kind.dot_color()
        ));
    }
    out.push_str("}\n");
    out
}

/// Plain-graph rendering used for non-product inputs.
pub fn graph_to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for label in g.labels() {
        out.push_str(&format!("  \"{label}\";\n"));
    }
    for &(a, b) in g.edges() {
        out.push_str(&format!("  \"{}\" -- \"{}\";\n", g.label(a), g.label(b)));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeEntry {
    Kinded { u: String, v: String, kind: EdgeKind },
    Pair([Endpoint; 2]),
}

/// JSON graph file. A product is described by `tree_degrees` + `path_len`
/// (optionally with its explicit `vertices`/`edges`, which are then checked);
/// any other graph by `vertices` or `n` plus an edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_degrees: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_len: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeEntry>>,
}

#[derive(Debug, Clone)]
pub enum LoadedGraph {
    Product(ProductGraph),
    Plain(Graph),
}

impl LoadedGraph {
    pub fn graph(&self) -> &Graph {
        match self {
            LoadedGraph::Product(p) => p.graph(),
            LoadedGraph::Plain(g) => g,
        }
    }

    pub fn as_product(&self) -> Option<&ProductGraph> {
        match self {
            LoadedGraph::Product(p) => Some(p),
            LoadedGraph::Plain(_) => None,
        }
    }
}

impl GraphFile {
    /// Full explicit form of a product: descriptor plus vertex and edge lists.
    pub fn explicit(product: &ProductGraph) -> GraphFile {
        let g = product.graph();
        GraphFile {
            vertices: Some(g.labels().to_vec()),
            edges: Some(
                g.edges()
                    .iter()
                    .enumerate()
                    .map(|(id, &(a, b))| EdgeEntry::Kinded {
                        u: g.label(a).to_string(),
                        v: g.label(b).to_string(),
                        kind: product.kind(id),
                    })
                    .collect(),
            ),
            ..product.descriptor()
        }
    }

    pub fn from_graph(g: &Graph) -> GraphFile {
        GraphFile {
            vertices: Some(g.labels().to_vec()),
            edges: Some(
                g.edges()
                    .iter()
                    .map(|&(a, b)| {
                        EdgeEntry::Pair([
                            Endpoint::Label(g.label(a).to_string()),
                            Endpoint::Label(g.label(b).to_string()),
                        ])
                    })
                    .collect(),
            ),
            ..GraphFile::default()
        }
    }

    pub fn load(&self) -> Result<LoadedGraph, GraphError> {
        match (&self.tree_degrees, self.path_len) {
            (Some(degrees), Some(m)) => {
                let product = boxslash_product(&TreeSpec::new(degrees.clone())?, m)?;
                self.check_explicit(&product)?;
                Ok(LoadedGraph::Product(product))
            }
            (Some(_), None) | (None, Some(_)) => Err(GraphError::Format(
                "tree_degrees and path_len must be given together".into(),
            )),
            (None, None) => self.load_plain().map(LoadedGraph::Plain),
        }
    }

    fn check_explicit(&self, product: &ProductGraph) -> Result<(), GraphError> {
        let g = product.graph();
        if let Some(vertices) = &self.vertices {
            let ours: BTreeSet<&str> = g.labels().iter().map(String::as_str).collect();
            let theirs: BTreeSet<&str> = vertices.iter().map(String::as_str).collect();
            if ours != theirs || vertices.len() != g.vertex_count() {
                return Err(GraphError::Format("vertex list does not match the descriptor".into()));
            }
        }
        if let Some(edges) = &self.edges {
            if edges.len() != g.edge_count() {
                return Err(GraphError::Format("edge list does not match the descriptor".into()));
            }
            for e in edges {
                let (u, v, kind) = match e {
                    EdgeEntry::Kinded { u, v, kind } => (u.clone(), v.clone(), Some(*kind)),
                    EdgeEntry::Pair([a, b]) => (endpoint_label(a), endpoint_label(b), None),
                };
                let lookup = |l: &str| {
                    g.vertex_by_label(l)
                        .ok_or_else(|| GraphError::UnknownVertex(l.to_string()))
                };
                let id = g
                    .edge_between(lookup(&u)?, lookup(&v)?)
                    .ok_or_else(|| GraphError::Format(format!("edge {u}--{v} is not in the product")))?;
                if kind.is_some_and(|k| k != product.kind(id)) {
                    return Err(GraphError::Format(format!("edge {u}--{v} has the wrong kind")));
                }
            }
        }
        Ok(())
    }

    fn load_plain(&self) -> Result<Graph, GraphError> {
        let mut g = match (&self.vertices, self.n) {
            (Some(v), _) => Graph::with_labels(v.clone())?,
            (None, Some(n)) => Graph::new(n),
            (None, None) => return Err(GraphError::Format("need tree_degrees/path_len, vertices, or n".into())),
        };
        for e in self.edges.iter().flatten() {
            let resolve = |ep: &Endpoint, g: &Graph| match ep {
                Endpoint::Index(i) if *i < g.vertex_count() => Ok(*i),
                Endpoint::Index(i) => Err(GraphError::UnknownVertex(i.to_string())),
                Endpoint::Label(l) => g.vertex_by_label(l).ok_or_else(|| GraphError::UnknownVertex(l.clone())),
            };
            let (u, v) = match e {
                EdgeEntry::Pair([a, b]) => (resolve(a, &g)?, resolve(b, &g)?),
                EdgeEntry::Kinded { u, v, .. } => (
                    resolve(&Endpoint::Label(u.clone()), &g)?,
                    resolve(&Endpoint::Label(v.clone()), &g)?,
                ),
            };
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

fn endpoint_label(e: &Endpoint) -> String {
    match e {
        Endpoint::Index(i) => i.to_string(),
        Endpoint::Label(l) => l.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: &[u32]) -> TreeSpec {
        TreeSpec::new(d.to_vec()).unwrap()
    }

    fn idx(v: &[u32]) -> NodeIndex {
        NodeIndex::new(v.to_vec())
    }

    #[test]
    fn binary_tree_of_height_two() {
        let t = build_tree(&spec(&[2, 2]));
        let got: Vec<String> = t.nodes().iter().map(|n| n.to_string()).collect();
        assert_eq!(got, ["r", "1", "2", "1.1", "1.2", "2.1", "2.2"]);
        assert_eq!(t.len(), spec(&[2, 2]).node_count());
    }

    #[test]
    fn single_child_tree() {
        let t = build_tree(&spec(&[1]));
        assert_eq!(t.nodes(), &[NodeIndex::root(), idx(&[1])]);
    }

    #[test]
    fn children_of_root() {
        let t = build_tree(&spec(&[3]));
        assert_eq!(t.children(&NodeIndex::root()), vec![idx(&[1]), idx(&[2]), idx(&[3])]);
        assert!(t.children(&idx(&[2])).is_empty());
    }

    #[test]
    fn spec_validation() {
        assert_eq!(TreeSpec::new(vec![]), Err(GraphError::NoLevels));
        assert_eq!(TreeSpec::new(vec![2, 0]), Err(GraphError::ZeroDegree { level: 1 }));
        assert_eq!(TreeSpec::new(vec![1000, 1000, 1000]), Err(GraphError::TooLarge));
        assert_eq!(
            TreeSpec::new(vec![u32::MAX, u32::MAX, u32::MAX]),
            Err(GraphError::TooLarge)
        );
    }

    #[test]
    fn product_size_guard() {
        let s = spec(&[1000]);
        assert_eq!(boxslash_product(&s, 1000).unwrap_err(), GraphError::TooLarge);
        assert_eq!(boxslash_product(&s, 0).unwrap_err(), GraphError::EmptyPath);
    }

    #[test]
    fn concat_examples() {
        assert_eq!(idx(&[1, 2]).child(3), idx(&[1, 2, 3]));
        assert_eq!(NodeIndex::root().concat(&NodeIndex::root()), NodeIndex::root());
        assert_eq!(idx(&[1]).concat(&idx(&[2, 2])), idx(&[1, 2, 2]));
        let t = build_tree(&spec(&[2, 2]));
        assert!(matches!(
            t.concat(&idx(&[1, 1]), &idx(&[1])),
            Err(GraphError::DepthOverflow { len: 3, height: 2 })
        ));
        assert_eq!(t.concat(&idx(&[2]), &idx(&[1])).unwrap(), idx(&[2, 1]));
    }

    #[test]
    fn vertex_ids_round_trip() {
        for s in ["r@3", "1.2.2@3", "4@1"] {
            assert_eq!(s.parse::<PVertex>().unwrap().to_string(), s);
        }
        for bad in ["r", "1.0@2", "x@1", "1@0", "1.@2"] {
            assert!(bad.parse::<PVertex>().is_err(), "{bad}");
        }
    }

    #[test]
    fn figure_instance_counts() {
        let p = boxslash_product(&spec(&[2, 2]), 3).unwrap();
        assert_eq!(p.vertex_count(), 21);
        assert_eq!(p.count_kind(EdgeKind::Vertical), 18);
        assert_eq!(p.count_kind(EdgeKind::Horizontal), 14);
        assert_eq!(p.count_kind(EdgeKind::Diagonal), 12);
        assert_eq!(p.edge_count(), 44);
    }

    #[test]
    fn tiny_products() {
        let p = boxslash_product(&spec(&[1]), 1).unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (2, 1));
        assert_eq!(p.kind(0), EdgeKind::Vertical);

        let p = boxslash_product(&spec(&[2]), 2).unwrap();
        assert_eq!(p.vertex_count(), 6);
        let counts: Vec<usize> = EdgeKind::ALL.iter().map(|&k| p.count_kind(k)).collect();
        assert_eq!(counts, [4, 3, 2]);
    }

    #[test]
    fn stored_orientation_convention() {
        let p = boxslash_product(&spec(&[2, 3]), 3).unwrap();
        for e in p.edges() {
            match e.kind {
                EdgeKind::Vertical => {
                    assert_eq!(e.a.node.parent().as_ref(), Some(&e.b.node));
                    assert_eq!(e.a.pos, e.b.pos);
                }
                EdgeKind::Horizontal => {
                    assert_eq!(e.a.node, e.b.node);
                    assert_eq!(e.a.pos + 1, e.b.pos);
                }
                EdgeKind::Diagonal => {
                    assert_eq!(e.a.node.parent().as_ref(), Some(&e.b.node));
                    assert_eq!(e.a.pos + 1, e.b.pos);
                }
            }
        }
    }

    #[test]
    fn star_building_block_degrees() {
        let d0 = 4;
        let p = boxslash_product(&spec(&[d0]), 3).unwrap();
        for pos in 1..=3 {
            let root = p.id_of(&NodeIndex::root(), pos);
            let vertical = p
                .graph()
                .edges()
                .iter()
                .enumerate()
                .filter(|&(id, &(a, b))| p.kind(id) == EdgeKind::Vertical && (a == root || b == root))
                .count();
            assert_eq!(vertical, d0 as usize);
        }
    }

    #[test]
    fn restriction_renumbers_in_order() {
        let p = boxslash_product(&spec(&[3]), 2).unwrap();
        let keep = KeepMap::from([(NodeIndex::root(), BTreeSet::from([1, 3]))]);
        let (q, relabel) = restrict_subtree(&p, &keep).unwrap();
        assert_eq!(q.spec().degrees(), &[2]);
        assert_eq!(relabel[&idx(&[1])], idx(&[1]));
        assert_eq!(relabel[&idx(&[3])], idx(&[2]));
        assert!(!relabel.contains_key(&idx(&[2])));
    }

    #[test]
    fn restriction_identity() {
        let p = boxslash_product(&spec(&[2, 3]), 2).unwrap();
        let (q, relabel) = restrict_subtree(&p, &KeepMap::new()).unwrap();
        assert_eq!(q.spec(), p.spec());
        assert!(relabel.iter().all(|(a, b)| a == b));
        assert_eq!(relabel.len(), p.tree().len());
    }

    #[test]
    fn restriction_errors() {
        let p = boxslash_product(&spec(&[2, 3]), 2).unwrap();
        let empty = KeepMap::from([(NodeIndex::root(), BTreeSet::new())]);
        assert!(matches!(restrict_subtree(&p, &empty), Err(GraphError::Shape(_))));
        let uneven = KeepMap::from([(idx(&[1]), BTreeSet::from([1, 2]))]);
        assert!(matches!(restrict_subtree(&p, &uneven), Err(GraphError::Shape(_))));
        let out_of_range = KeepMap::from([(NodeIndex::root(), BTreeSet::from([3]))]);
        assert!(matches!(restrict_subtree(&p, &out_of_range), Err(GraphError::Shape(_))));
        let leaf = KeepMap::from([(idx(&[1, 1]), BTreeSet::from([1]))]);
        assert!(restrict_subtree(&p, &leaf).is_err());
    }

    #[test]
    fn dot_has_kind_attributes() {
        let p = boxslash_product(&spec(&[2, 2]), 3).unwrap();
        let dot = to_dot(&p);
        assert_eq!(dot.matches(" -- ").count(), 44);
        assert_eq!(dot.matches("kind=vertical, color=black").count(), 18);
        assert_eq!(dot.matches("kind=horizontal, color=orange").count(), 14);
        assert_eq!(dot.matches("kind=diagonal, color=blue").count(), 12);
    }

    #[test]
    fn plain_graph_errors() {
        let mut g = Graph::new(3);
        assert!(matches!(g.add_edge(1, 1), Err(GraphError::SelfLoop(_))));
        g.add_edge(0, 1).unwrap();
        assert!(matches!(g.add_edge(1, 0), Err(GraphError::DuplicateEdge(..))));
        assert!(matches!(g.add_edge(0, 7), Err(GraphError::UnknownVertex(_))));
    }
}
