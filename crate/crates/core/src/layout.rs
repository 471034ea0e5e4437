//! Linear orders, edge colourings, and stack/queue layout checks.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conflict::ConflictGraph;
use crate::graph::{Graph, PVertex, ProductGraph};

/// Conflict components up to this many edges are coloured exactly.
pub const DEFAULT_EXACT_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("order is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("order covers {order} vertices but the graph has {graph}")]
    OrderSize { order: usize, graph: usize },
    #[error("colouring covers {colored} edges but the graph has {edges}")]
    PartialColoring { colored: usize, edges: usize },
    #[error("colour {color} of edge {edge} is outside 0..{k}")]
    ColorRange { edge: usize, color: usize, k: usize },
    #[error("layout file: {0}")]
    Format(String),
}

/// A total order on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrder {
    rank: Vec<usize>,
    seq: Vec<usize>,
}

impl LinearOrder {
    /// `seq[r]` is the vertex at rank `r`.
    pub fn from_sequence(seq: Vec<usize>) -> Result<Self, LayoutError> {
        let n = seq.len();
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in seq.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(LayoutError::NotPermutation(n));
            }
            rank[v] = r;
        }
        Ok(LinearOrder { rank, seq })
    }

    /// `rank[v]` is the position of vertex `v`.
    pub fn from_ranks(rank: Vec<usize>) -> Result<Self, LayoutError> {
        let n = rank.len();
        let mut seq = vec![usize::MAX; n];
        for (v, &r) in rank.iter().enumerate() {
            if r >= n || seq[r] != usize::MAX {
                return Err(LayoutError::NotPermutation(n));
            }
            seq[r] = v;
        }
        Ok(LinearOrder { rank, seq })
    }

    pub fn identity(n: usize) -> Self {
        LinearOrder {
            rank: (0..n).collect(),
            seq: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn vertex_at(&self, r: usize) -> usize {
        self.seq[r]
    }

    pub fn sequence(&self) -> &[usize] {
        &self.seq
    }

    pub fn cmp(&self, u: usize, v: usize) -> Ordering {
        self.rank[u].cmp(&self.rank[v])
    }

    pub fn less(&self, u: usize, v: usize) -> bool {
        self.rank[u] < self.rank[v]
    }

    pub fn reversed(&self) -> LinearOrder {
        let mut seq = self.seq.clone();
        seq.reverse();
        LinearOrder::from_sequence(seq).expect("reversal of a permutation")
    }

    /// The edge as `(lo, hi)` ranks.
    pub fn span(&self, (u, v): (usize, usize)) -> (usize, usize) {
        let (a, b) = (self.rank[u], self.rank[v]);
        (a.min(b), a.max(b))
    }
}

/// Total colouring `edge id -> 0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    colors: Vec<usize>,
    k: usize,
}

impl EdgeColoring {
    pub fn new(colors: Vec<usize>, k: usize) -> Result<Self, LayoutError> {
        if let Some((edge, &color)) = colors.iter().enumerate().find(|&(_, &c)| c >= k) {
            return Err(LayoutError::ColorRange { edge, color, k });
        }
        Ok(EdgeColoring { colors, k })
    }

    pub fn uniform(edges: usize, color: usize, k: usize) -> Result<Self, LayoutError> {
        EdgeColoring::new(vec![color; edges], k)
    }

    pub fn color(&self, edge: usize) -> usize {
        self.colors[edge]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Number of distinct colours actually used.
    pub fn used(&self) -> usize {
        let mut seen = vec![false; self.k];
        for &c in &self.colors {
            seen[c] = true;
        }
        seen.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairRelation {
    Separated,
    Nest,
    Cross,
    SharesEndpoint,
}

/// Relation of two edges under `order`.
pub fn classify_pair(e1: (usize, usize), e2: (usize, usize), order: &LinearOrder) -> Result<PairRelation, LayoutError> {
    for (u, v) in [e1, e2] {
        if u == v {
            return Err(LayoutError::SelfLoop(u));
        }
    }
    if e1.0 == e2.0 || e1.0 == e2.1 || e1.1 == e2.0 || e1.1 == e2.1 {
        return Ok(PairRelation::SharesEndpoint);
    }
    Ok(relation_of_spans(order.span(e1), order.span(e2)))
}

/// Relation of two spans with four distinct endpoints.
pub fn relation_of_spans(s1: (usize, usize), s2: (usize, usize)) -> PairRelation {
    let ((a, b), (c, d)) = if s1.0 < s2.0 { (s1, s2) } else { (s2, s1) };
    if b < c {
        PairRelation::Separated
    } else if d < b {
        PairRelation::Nest
    } else {
        debug_assert!(a < c && c < b && b < d);
        PairRelation::Cross
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub e1: usize,
    pub e2: usize,
    pub relation: PairRelation,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayoutReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl LayoutReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        LayoutReport {
            valid: violations.is_empty(),
            violations,
        }
    }
}

fn check_inputs(graph: &Graph, order: &LinearOrder, coloring: &EdgeColoring) -> Result<(), LayoutError> {
    if order.len() != graph.vertex_count() {
        return Err(LayoutError::OrderSize {
            order: order.len(),
            graph: graph.vertex_count(),
        });
    }
    if coloring.len() != graph.edge_count() {
        return Err(LayoutError::PartialColoring {
            colored: coloring.len(),
            edges: graph.edge_count(),
        });
    }
    Ok(())
}

fn edges_by_color(graph: &Graph, coloring: &EdgeColoring) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); coloring.k()];
    for e in 0..graph.edge_count() {
        classes[coloring.color(e)].push(e);
    }
    classes
}

fn scan_class(
    graph: &Graph,
    order: &LinearOrder,
    class: &[usize],
    color: usize,
    bad: PairRelation,
    out: &mut Vec<Violation>,
) {
    for (i, &e1) in class.iter().enumerate() {
        for &e2 in &class[i + 1..] {
            let rel = classify_pair(graph.edge(e1), graph.edge(e2), order).expect("graphs have no self-loops");
            if rel == bad {
                out.push(Violation {
                    e1,
                    e2,
                    relation: rel,
                    color,
                });
            }
        }
    }
}

/// Every same-coloured crossing pair.
pub fn validate_stack_layout(
    graph: &Graph,
    order: &LinearOrder,
    coloring: &EdgeColoring,
) -> Result<LayoutReport, LayoutError> {
    check_inputs(graph, order, coloring)?;
    let mut violations = Vec::new();
    for (color, class) in edges_by_color(graph, coloring).iter().enumerate() {
        scan_class(graph, order, class, color, PairRelation::Cross, &mut violations);
    }
    Ok(LayoutReport::from_violations(violations))
}

/// Every same-coloured nesting pair.
pub fn validate_queue_layout(
    graph: &Graph,
    order: &LinearOrder,
    coloring: &EdgeColoring,
) -> Result<LayoutReport, LayoutError> {
    check_inputs(graph, order, coloring)?;
    let mut violations = Vec::new();
    for (color, class) in edges_by_color(graph, coloring).iter().enumerate() {
        if has_nest(graph, order, class) {
            scan_class(graph, order, class, color, PairRelation::Nest, &mut violations);
        }
    }
    Ok(LayoutReport::from_violations(violations))
}

/// Sweep by left endpoint: some edge is strictly nested iff its right end
/// falls below the furthest right end seen among strictly earlier starts.
fn has_nest(graph: &Graph, order: &LinearOrder, class: &[usize]) -> bool {
    let mut spans: Vec<(usize, usize)> = class.iter().map(|&e| order.span(graph.edge(e))).collect();
    spans.sort_unstable();
    let mut reach: Option<usize> = None;
    let mut i = 0;
    while i < spans.len() {
        let lo = spans[i].0;
        let mut j = i;
        let mut group_max = 0;
        while j < spans.len() && spans[j].0 == lo {
            if reach.is_some_and(|r| spans[j].1 < r) {
                return true;
            }
            group_max = group_max.max(spans[j].1);
            j += 1;
        }
        reach = Some(reach.map_or(group_max, |r| r.max(group_max)));
        i = j;
    }
    false
}

/// Position first, then depth, then lexicographic node address.
pub fn layered_cmp(u: &PVertex, v: &PVertex) -> Ordering {
    u.pos
        .cmp(&v.pos)
        .then(u.node.depth().cmp(&v.node.depth()))
        .then_with(|| u.node.path().cmp(v.node.path()))
}

pub fn layered_order(graph: &ProductGraph) -> LinearOrder {
    let mut seq: Vec<usize> = (0..graph.vertex_count()).collect();
    let verts: Vec<PVertex> = seq.iter().map(|&v| graph.vertex(v)).collect();
    seq.sort_by(|&a, &b| layered_cmp(&verts[a], &verts[b]));
    LinearOrder::from_sequence(seq).expect("sorting permutes")
}

/// Layered order with one queue per edge kind.
pub fn three_queue_layout(graph: &ProductGraph) -> (LinearOrder, EdgeColoring) {
    let colors = graph.kinds().iter().map(|k| k.index()).collect();
    (
        layered_order(graph),
        EdgeColoring::new(colors, 3).expect("kind indices are below 3"),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageAssignment {
    pub count: usize,
    pub coloring: EdgeColoring,
    pub exact: bool,
}

/// Crossing conflict graph of `graph` under `order`.
pub fn crossing_graph(graph: &Graph, order: &LinearOrder) -> ConflictGraph {
    let spans: Vec<(usize, usize)> = graph.edges().iter().map(|&e| order.span(e)).collect();
    let mut g = ConflictGraph::new(spans.len());
    for i in 0..spans.len() {
        let (a, b) = spans[i];
        for (j, &(c, d)) in spans.iter().enumerate().skip(i + 1) {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                g.add(i, j);
            }
        }
    }
    g
}

/// Fewest stack pages for a fixed order. Components of the crossing graph
/// with more than `exact_limit` edges fall back to greedy colouring.
pub fn stack_pages_for_order(graph: &Graph, order: &LinearOrder, exact_limit: usize) -> PageAssignment {
    let conflicts = crossing_graph(graph, order);
    let mut colors = vec![0; graph.edge_count()];
    let mut count = 0;
    let mut exact = true;
    for comp in conflicts.components() {
        let sub = conflicts.induced(&comp);
        let local = if comp.len() <= exact_limit {
            sub.chromatic().1
        } else {
            exact = false;
            sub.greedy()
        };
        for (i, &e) in comp.iter().enumerate() {
            colors[e] = local[i];
        }
        count = count.max(local.iter().max().map_or(0, |m| m + 1));
    }
    PageAssignment {
        count,
        coloring: EdgeColoring::new(colors, count.max(1)).expect("colours below count"),
        exact,
    }
}

/// Fewest queues for a fixed order: colour each edge by how deep a chain
/// of strictly nested edges ends at it. The count is the largest rainbow.
pub fn queues_for_order(graph: &Graph, order: &LinearOrder) -> PageAssignment {
    let spans: Vec<(usize, usize)> = graph.edges().iter().map(|&e| order.span(e)).collect();
    let mut by_width: Vec<usize> = (0..spans.len()).collect();
    by_width.sort_by_key(|&e| spans[e].1 - spans[e].0);
    let mut depth = vec![0usize; spans.len()];
    for (i, &e) in by_width.iter().enumerate() {
        let (a, b) = spans[e];
        let mut d = 0;
        for &f in &by_width[..i] {
            let (c, dd) = spans[f];
            if a < c && dd < b {
                d = d.max(depth[f]);
            }
        }
        depth[e] = d + 1;
    }
    let count = depth.iter().copied().max().unwrap_or(0);
    PageAssignment {
        count,
        coloring: EdgeColoring::new(depth.iter().map(|d| d - 1).collect(), count.max(1)).expect("depth within count"),
        exact: true,
    }
}

/// JSON layout: vertex labels in order, and a colour per `"u--v"` edge key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub order: Vec<String>,
    pub colors: BTreeMap<String, usize>,
    pub k: usize,
}

impl LayoutFile {
    pub fn new(graph: &Graph, order: &LinearOrder, coloring: &EdgeColoring) -> Self {
        LayoutFile {
            order: order.sequence().iter().map(|&v| graph.label(v).to_string()).collect(),
            colors: (0..graph.edge_count())
                .map(|e| (graph.edge_key(e), coloring.color(e)))
                .collect(),
            k: coloring.k(),
        }
    }

    /// Resolve against `graph`. Edge keys may name either endpoint first.
    pub fn resolve(&self, graph: &Graph) -> Result<(LinearOrder, EdgeColoring), LayoutError> {
        let seq = self
            .order
            .iter()
            .map(|l| {
                graph
                    .vertex_by_label(l)
                    .ok_or_else(|| LayoutError::Format(format!("unknown vertex {l:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if seq.len() != graph.vertex_count() {
            return Err(LayoutError::OrderSize {
                order: seq.len(),
                graph: graph.vertex_count(),
            });
        }
        let order = LinearOrder::from_sequence(seq)?;
        let mut colors = vec![None; graph.edge_count()];
        for (key, &c) in &self.colors {
            let (u, v) = key
                .split_once("--")
                .ok_or_else(|| LayoutError::Format(format!("bad edge key {key:?}")))?;
            let find = |l: &str| {
                graph
                    .vertex_by_label(l)
                    .ok_or_else(|| LayoutError::Format(format!("unknown vertex {l:?}")))
            };
            let e = graph
                .edge_between(find(u)?, find(v)?)
                .ok_or_else(|| LayoutError::Format(format!("{key} is not an edge")))?;
            colors[e] = Some(c);
        }
        let colored = colors.iter().filter(|c| c.is_some()).count();
        if colored != graph.edge_count() {
            return Err(LayoutError::PartialColoring {
                colored,
                edges: graph.edge_count(),
            });
        }
        let coloring = EdgeColoring::new(colors.into_iter().map(Option::unwrap).collect(), self.k)?;
        Ok((order, coloring))
    }

    /// Graph whose vertices are the ordered labels and whose edges are the
    /// colour keys, for validating a layout without its source graph.
    pub fn implied_graph(&self) -> Result<Graph, LayoutError> {
        let mut g = Graph::with_labels(self.order.clone()).map_err(|e| LayoutError::Format(e.to_string()))?;
        for key in self.colors.keys() {
            let (u, v) = key
                .split_once("--")
                .ok_or_else(|| LayoutError::Format(format!("bad edge key {key:?}")))?;
            let find = |l: &str| {
                g.vertex_by_label(l)
                    .ok_or_else(|| LayoutError::Format(format!("unknown vertex {l:?}")))
            };
            let (a, b) = (find(u)?, find(v)?);
            g.add_edge(a, b).map_err(|e| LayoutError::Format(e.to_string()))?;
        }
        Ok(g)
    }
}
