//! Subtree passes over a layout of `T ⊠̸ P`.
//!
//! Each pass walks the tree one level at a time from the bottom up, buckets
//! the children of every node by a key computed on their current subtrees,
//! and keeps one bucket. Afterwards edge colours depend only on
//! (depth, position, kind), the relative order of a child's subtree is the
//! same for all children, and every level/position array of ranks is
//! lex-monotone. The Z-table and its consistency checks are read off the
//! surviving subtree.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{build_tree, restrict_tree, EdgeKind, GraphError, KeepMap, NodeIndex, ProductGraph, Tree, TreeSpec};
use crate::layout::{EdgeColoring, LinearOrder};
use crate::seq::{is_related, Direction, LayoutView};

/// Search nodes allowed per lex-monotone extraction.
pub const DEFAULT_LEX_BUDGET: u64 = 5_000_000;
/// Above this many items, checks sample instead of enumerating.
pub const DEFAULT_CHECK_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PassError {
    #[error("targets: {0}")]
    Targets(String),
    #[error("{pass} pass starved at level {level}, node {node}: best bucket has {best} children, {needed} needed")]
    Starved {
        pass: &'static str,
        level: usize,
        node: String,
        needed: usize,
        best: usize,
    },
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
    #[error("no monotone structure of the requested size: {0}")]
    NotFound(String),
    #[error("value {0} occurs more than once")]
    DuplicateValue(i64),
    #[error("dimension {0} exceeds the supported maximum of 3")]
    Dimension(usize),
    #[error("level {0} has a single child, so directions are undefined")]
    DegreeOne(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A uniform subtree of the base product's tree, renumbered, with the map
/// back to original node addresses.
#[derive(Debug, Clone)]
pub struct Subtree {
    tree: Tree,
    to_original: HashMap<NodeIndex, NodeIndex>,
}

impl Subtree {
    pub fn full(graph: &ProductGraph) -> Self {
        let tree = graph.tree().clone();
        let to_original = tree.nodes().iter().map(|n| (n.clone(), n.clone())).collect();
        Subtree { tree, to_original }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn spec(&self) -> &TreeSpec {
        self.tree.spec()
    }

    pub fn original(&self, node: &NodeIndex) -> &NodeIndex {
        &self.to_original[node]
    }

    /// Base-graph vertex id of the subtree vertex `(node, pos)`.
    pub fn vertex(&self, graph: &ProductGraph, node: &NodeIndex, pos: u32) -> usize {
        graph.id_of(self.original(node), pos)
    }

    pub fn restrict(&self, keep: &KeepMap) -> Result<Subtree, PassError> {
        if keep.is_empty() {
            return Ok(self.clone());
        }
        let r = restrict_tree(&self.tree, keep)?;
        let to_original = r
            .relabel
            .iter()
            .map(|(old, new)| (new.clone(), self.to_original[old].clone()))
            .collect();
        Ok(Subtree {
            tree: build_tree(&r.spec),
            to_original,
        })
    }

    /// Keep the same child indices (1-based) at every node of each listed depth.
    pub fn restrict_uniform(&self, per_depth: &BTreeMap<usize, BTreeSet<u32>>) -> Result<Subtree, PassError> {
        let mut keep = KeepMap::new();
        for (&depth, set) in per_depth {
            if set.len() == self.spec().degree(depth) as usize {
                continue;
            }
            for node in self.tree.level(depth) {
                keep.insert(node.clone(), set.clone());
            }
        }
        self.restrict(&keep)
    }

    /// Surviving nodes as (new, original) address strings.
    pub fn mapping(&self) -> BTreeMap<String, String> {
        self.tree
            .nodes()
            .iter()
            .map(|n| (n.to_string(), self.original(n).to_string()))
            .collect()
    }
}

struct Ctx<'a> {
    graph: &'a ProductGraph,
    sub: &'a Subtree,
}

impl Ctx<'_> {
    fn vid(&self, node: &NodeIndex, pos: u32) -> usize {
        self.sub.vertex(self.graph, node, pos)
    }

    fn edge_color(&self, coloring: &EdgeColoring, u: (&NodeIndex, u32), v: (&NodeIndex, u32)) -> usize {
        let e = self
            .graph
            .graph()
            .edge_between(self.vid(u.0, u.1), self.vid(v.0, v.1))
            .unwrap_or_else(|| panic!("{}@{} and {}@{} are not adjacent", u.0, u.1, v.0, v.1));
        coloring.color(e)
    }
}

fn check_targets(spec: &TreeSpec, targets: &[u32]) -> Result<(), PassError> {
    if targets.len() != spec.height() {
        return Err(PassError::Targets(format!(
            "{} targets for a tree of height {}",
            targets.len(),
            spec.height()
        )));
    }
    if let Some(level) = targets.iter().position(|&t| t == 0) {
        return Err(PassError::Targets(format!("target at level {level} is 0")));
    }
    Ok(())
}

/// Children grouped by key; the largest group wins, ties going to the
/// lexicographically smallest child set, truncated to `target`.
fn select_children<K: Ord>(keyed: Vec<(u32, K)>, target: usize) -> Result<BTreeSet<u32>, usize> {
    let mut buckets: BTreeMap<K, Vec<u32>> = BTreeMap::new();
    for (c, k) in keyed {
        buckets.entry(k).or_default().push(c);
    }
    let best = buckets
        .into_values()
        .min_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)))
        .unwrap_or_default();
    if best.len() < target {
        return Err(best.len());
    }
    Ok(best.into_iter().take(target).collect())
}

fn run_levels<K: Ord>(
    pass: &'static str,
    mut sub: Subtree,
    targets: &[u32],
    key: impl Fn(&Subtree, &NodeIndex, u32) -> K,
) -> Result<Subtree, PassError> {
    check_targets(sub.spec(), targets)?;
    for depth in (0..sub.spec().height()).rev() {
        let degree = sub.spec().degree(depth);
        let target = targets[depth] as usize;
        let mut keep = KeepMap::new();
        for node in sub.tree().level(depth) {
            let keyed = (1..=degree).map(|c| (c, key(&sub, node, c))).collect();
            let chosen = select_children(keyed, target).map_err(|best| PassError::Starved {
                pass,
                level: depth,
                node: node.to_string(),
                needed: target,
                best,
            })?;
            if chosen.len() < degree as usize {
                keep.insert(node.clone(), chosen);
            }
        }
        sub = sub.restrict(&keep)?;
    }
    Ok(sub)
}

/// Colours of the edges hanging below child `c` of `a` (plus the two
/// parent edges), in a fixed enumeration relative to `a + c`.
fn colour_profile(ctx: &Ctx, coloring: &EdgeColoring, a: &NodeIndex, c: u32) -> Vec<usize> {
    let m = ctx.graph.path_len();
    let tree = ctx.sub.tree();
    let ac = a.child(c);
    let below: Vec<NodeIndex> = tree.relative_subtree(&ac).iter().map(|x| ac.concat(x)).collect();
    let mut out = Vec::new();
    let col = |u: (&NodeIndex, u32), v: (&NodeIndex, u32)| ctx.edge_color(coloring, u, v);
    for node in &below {
        for child in tree.children(node) {
            for i in 1..=m {
                out.push(col((&child, i), (node, i)));
            }
        }
    }
    for node in &below {
        for child in tree.children(node) {
            for i in 1..m {
                out.push(col((&child, i), (node, i + 1)));
            }
        }
    }
    for node in &below {
        for i in 1..m {
            out.push(col((node, i), (node, i + 1)));
        }
    }
    for i in 1..=m {
        out.push(col((&ac, i), (a, i)));
    }
    for i in 1..m {
        out.push(col((&ac, i), (a, i + 1)));
    }
    out
}

/// Edge colour as a function of (larger depth, smaller position, kind).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColorTable {
    entries: BTreeMap<(usize, u32, EdgeKind), usize>,
}

impl ColorTable {
    pub fn get(&self, depth: usize, pos: u32, kind: EdgeKind) -> Option<usize> {
        self.entries.get(&(depth, pos, kind)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u32, EdgeKind, usize)> + '_ {
        self.entries.iter().map(|(&(d, p, k), &c)| (d, p, k, c))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColorEntry {
    pub depth: usize,
    pub pos: u32,
    pub kind: EdgeKind,
    pub color: usize,
}

impl Serialize for ColorTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<ColorEntry> = self
            .entries()
            .map(|(depth, pos, kind, color)| ColorEntry {
                depth,
                pos,
                kind,
                color,
            })
            .collect();
        list.serialize(s)
    }
}

/// Read the colour table off a subtree, failing if some signature has two
/// colours.
pub fn color_table(graph: &ProductGraph, coloring: &EdgeColoring, sub: &Subtree) -> Result<ColorTable, PassError> {
    let ctx = Ctx { graph, sub };
    let m = graph.path_len();
    let mut entries = BTreeMap::new();
    let mut put = |key: (usize, u32, EdgeKind), c: usize| -> Result<(), PassError> {
        match entries.insert(key, c) {
            Some(prev) if prev != c => Err(PassError::Inconsistent(format!(
                "{:?} edges at depth {} position {} have colours {prev} and {c}",
                key.2, key.0, key.1
            ))),
            _ => Ok(()),
        }
    };
    for node in sub.tree().nodes() {
        let d = node.depth();
        if let Some(parent) = node.parent() {
            for i in 1..=m {
                put(
                    (d, i, EdgeKind::Vertical),
                    ctx.edge_color(coloring, (node, i), (&parent, i)),
                )?;
            }
            for i in 1..m {
                put(
                    (d, i, EdgeKind::Diagonal),
                    ctx.edge_color(coloring, (node, i), (&parent, i + 1)),
                )?;
            }
        }
        for i in 1..m {
            put(
                (d, i, EdgeKind::Horizontal),
                ctx.edge_color(coloring, (node, i), (node, i + 1)),
            )?;
        }
    }
    Ok(ColorTable { entries })
}

/// Keep children whose subtree edges are coloured identically.
pub fn pass_colour(
    graph: &ProductGraph,
    coloring: &EdgeColoring,
    sub: &Subtree,
    targets: &[u32],
) -> Result<(Subtree, ColorTable), PassError> {
    let out = run_levels("colour", sub.clone(), targets, |s, a, c| {
        colour_profile(&Ctx { graph, sub: s }, coloring, a, c)
    })?;
    let table = color_table(graph, coloring, &out)?;
    Ok((out, table))
}

/// Positions of the vertices below `root`, across all path positions,
/// sorted by rank: the induced permutation of the order on that block.
fn block_permutation(ctx: &Ctx, order: &LinearOrder, root: &NodeIndex) -> Vec<usize> {
    let m = ctx.graph.path_len();
    let mut ranks = Vec::new();
    for x in ctx.sub.tree().relative_subtree(root) {
        let node = root.concat(&x);
        for i in 1..=m {
            ranks.push(order.rank(ctx.vid(&node, i)));
        }
    }
    let mut idx: Vec<usize> = (0..ranks.len()).collect();
    idx.sort_by_key(|&j| ranks[j]);
    idx
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OrderReport {
    /// Nodes whose block permutation was compared with the first node of
    /// their level.
    pub blocks_compared: usize,
    pub tuples_sampled: usize,
    pub violations: Vec<String>,
}

impl OrderReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Keep children whose subtrees are ordered identically.
pub fn pass_order(
    graph: &ProductGraph,
    order: &LinearOrder,
    sub: &Subtree,
    targets: &[u32],
    seed: u64,
) -> Result<(Subtree, OrderReport), PassError> {
    let out = run_levels("order", sub.clone(), targets, |s, a, c| {
        block_permutation(&Ctx { graph, sub: s }, order, &a.child(c))
    })?;
    let report = check_order_transfer(graph, order, &out, DEFAULT_CHECK_CAP, seed);
    if !report.ok() {
        return Err(PassError::Inconsistent(report.violations.join("; ")));
    }
    Ok((out, report))
}

/// `(A+X, i) < (A+Y, j)` iff `(B+X, i) < (B+Y, j)` whenever `|A| = |B|`.
/// Checked exactly through block permutations, then by sampling literal
/// 6-tuples.
pub fn check_order_transfer(
    graph: &ProductGraph,
    order: &LinearOrder,
    sub: &Subtree,
    samples: usize,
    seed: u64,
) -> OrderReport {
    let ctx = Ctx { graph, sub };
    let tree = sub.tree();
    let mut report = OrderReport::default();
    for depth in 0..=tree.height() {
        let level = tree.level(depth);
        let reference = block_permutation(&ctx, order, &level[0]);
        for node in &level[1..] {
            report.blocks_compared += 1;
            if block_permutation(&ctx, order, node) != reference {
                report
                    .violations
                    .push(format!("subtree of {node} is ordered differently from {}", level[0]));
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let m = graph.path_len();
    for _ in 0..samples {
        let depth = rng.gen_range(0..=tree.height());
        let level = tree.level(depth);
        let a = &level[rng.gen_range(0..level.len())];
        let b = &level[rng.gen_range(0..level.len())];
        let rel = tree.relative_subtree(a);
        let x = &rel[rng.gen_range(0..rel.len())];
        let y = &rel[rng.gen_range(0..rel.len())];
        let (i, j) = (rng.gen_range(1..=m), rng.gen_range(1..=m));
        let lhs = order.less(ctx.vid(&a.concat(x), i), ctx.vid(&a.concat(y), j));
        let rhs = order.less(ctx.vid(&b.concat(x), i), ctx.vid(&b.concat(y), j));
        report.tuples_sampled += 1;
        if lhs != rhs {
            report
                .violations
                .push(format!("tuple ({a}, {b}, {x}, {y}, {i}, {j}) disagrees"));
        }
    }
    report
}

/// Row-major integer array of dimension 1 to 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexArray {
    dims: Vec<usize>,
    values: Vec<i64>,
}

impl LexArray {
    pub fn new(dims: Vec<usize>, values: Vec<i64>) -> Result<Self, PassError> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(PassError::Dimension(dims.len()));
        }
        if dims.iter().product::<usize>() != values.len() {
            return Err(PassError::Inconsistent(format!(
                "{} values for shape {dims:?}",
                values.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &v in &values {
            if !seen.insert(v) {
                return Err(PassError::DuplicateValue(v));
            }
        }
        Ok(LexArray { dims, values })
    }

    pub fn from_fn(dims: Vec<usize>, f: impl Fn(&[usize]) -> i64) -> Result<Self, PassError> {
        let values = all_cells(&dims).iter().map(|x| f(x)).collect();
        LexArray::new(dims, values)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn get(&self, x: &[usize]) -> i64 {
        let mut idx = 0;
        for (k, &xi) in x.iter().enumerate() {
            idx = idx * self.dims[k] + xi;
        }
        self.values[idx]
    }
}

fn all_cells(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Priority order of axes, a direction per priority step, and the kept
/// (0-based, sorted) indices on every axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexMonotoneWitness {
    pub sigma: Vec<usize>,
    pub signs: Vec<Direction>,
    pub index_sets: Vec<Vec<usize>>,
}

impl LexMonotoneWitness {
    /// Direction of the sequences that vary only along `axis`.
    pub fn axis_direction(&self, axis: usize) -> Direction {
        let step = self.sigma.iter().position(|&a| a == axis).expect("axis in sigma");
        self.signs[step]
    }
}

/// The comparison rule for one pair of cells.
fn lex_pair_ok(x: &[usize], y: &[usize], fx: i64, fy: i64, sigma: &[usize], signs: &[Direction]) -> bool {
    for (step, &axis) in sigma.iter().enumerate() {
        if x[axis] != y[axis] {
            let mut want = x[axis] < y[axis];
            if signs[step] == Direction::Dec {
                want = !want;
            }
            return (fx < fy) == want;
        }
    }
    true
}

/// Full pairwise check of the witness on its subarray.
pub fn verify_lex_monotone(array: &LexArray, w: &LexMonotoneWitness) -> Result<(), String> {
    let d = array.dims().len();
    let mut sorted_sigma = w.sigma.clone();
    sorted_sigma.sort_unstable();
    if sorted_sigma != (0..d).collect::<Vec<_>>() || w.signs.len() != d || w.index_sets.len() != d {
        return Err("witness shape does not match the array".into());
    }
    for (k, set) in w.index_sets.iter().enumerate() {
        if set.windows(2).any(|p| p[0] >= p[1]) || set.iter().any(|&i| i >= array.dims()[k]) {
            return Err(format!("index set of axis {k} is not increasing and in range"));
        }
    }
    let sizes: Vec<usize> = w.index_sets.iter().map(Vec::len).collect();
    let cells: Vec<Vec<usize>> = all_cells(&sizes)
        .into_iter()
        .map(|c| c.iter().enumerate().map(|(k, &i)| w.index_sets[k][i]).collect())
        .collect();
    for (i, x) in cells.iter().enumerate() {
        for y in &cells[i + 1..] {
            if !lex_pair_ok(x, y, array.get(x), array.get(y), &w.sigma, &w.signs) {
                return Err(format!("cells {x:?} and {y:?} break the rule"));
            }
        }
    }
    Ok(())
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, d: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for v in 0..d {
            if !prefix.contains(&v) {
                prefix.push(v);
                rec(prefix, d, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), d, &mut out);
    out
}

struct LexSearch<'a> {
    array: &'a LexArray,
    targets: &'a [usize],
    sigma: &'a [usize],
    signs: &'a [Direction],
    nodes: u64,
    budget: u64,
}

impl LexSearch<'_> {
    fn cells(&self, sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
        all_cells(&sizes)
            .into_iter()
            .map(|c| c.iter().enumerate().map(|(k, &i)| sets[k][i]).collect())
            .collect()
    }

    /// New cells created by the last index added on `axis` against all cells.
    fn consistent(&self, sets: &[Vec<usize>], axis: usize) -> bool {
        let cells = self.cells(sets);
        let last = *sets[axis].last().unwrap();
        for x in cells.iter().filter(|c| c[axis] == last) {
            let fx = self.array.get(x);
            for y in &cells {
                if x != y && !lex_pair_ok(x, y, fx, self.array.get(y), self.sigma, self.signs) {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(&mut self, sets: &mut Vec<Vec<usize>>) -> Result<bool, PassError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(PassError::Budget(self.budget));
        }
        // Round robin: extend the axis that is furthest from its target.
        let axis = (0..sets.len())
            .filter(|&k| sets[k].len() < self.targets[k])
            .min_by_key(|&k| (sets[k].len(), k));
        let Some(axis) = axis else { return Ok(true) };
        let need = self.targets[axis] - sets[axis].len();
        let start = sets[axis].last().map_or(0, |&l| l + 1);
        let dim = self.array.dims()[axis];
        if start + need > dim {
            return Ok(false);
        }
        for i in start..=dim - need {
            sets[axis].push(i);
            if self.consistent(sets, axis) && self.dfs(sets)? {
                return Ok(true);
            }
            sets[axis].pop();
        }
        Ok(false)
    }
}

/// Find a lex-monotone subarray with `targets[k]` indices on axis `k`.
/// Every permutation and sign vector is tried, identity and all-INC first;
/// the result is re-verified pairwise before it is returned.
pub fn lex_monotone_subarray(
    array: &LexArray,
    targets: &[usize],
    budget: u64,
) -> Result<LexMonotoneWitness, PassError> {
    let d = array.dims().len();
    if targets.len() != d {
        return Err(PassError::Targets(format!(
            "{} targets for dimension {d}",
            targets.len()
        )));
    }
    for (k, (&t, &n)) in targets.iter().zip(array.dims()).enumerate() {
        if t == 0 || t > n {
            return Err(PassError::Targets(format!("axis {k}: target {t} with side {n}")));
        }
    }
    let mut nodes = 0;
    for sigma in permutations(d) {
        for mask in 0..(1u32 << d) {
            let signs: Vec<Direction> = (0..d)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Direction::Dec
                    } else {
                        Direction::Inc
                    }
                })
                .collect();
            let mut search = LexSearch {
                array,
                targets,
                sigma: &sigma,
                signs: &signs,
                nodes,
                budget,
            };
            let mut sets = vec![Vec::new(); d];
            let found = search.dfs(&mut sets)?;
            nodes = search.nodes;
            if found {
                let w = LexMonotoneWitness {
                    sigma: sigma.clone(),
                    signs,
                    index_sets: sets,
                };
                verify_lex_monotone(array, &w).map_err(PassError::Inconsistent)?;
                return Ok(w);
            }
        }
    }
    Err(PassError::NotFound(format!(
        "no lex-monotone subarray of sides {targets:?}"
    )))
}

/// Longest monotone subsequence of distinct values, increasing on ties;
/// fails if it is shorter than `n`.
pub fn es_monotone_subsequence(values: &[i64], n: usize) -> Result<Vec<i64>, PassError> {
    let mut seen = BTreeSet::new();
    for &v in values {
        if !seen.insert(v) {
            return Err(PassError::DuplicateValue(v));
        }
    }
    let inc = longest_increasing(values);
    let negated: Vec<i64> = values.iter().map(|v| -v).collect();
    let dec: Vec<i64> = longest_increasing(&negated).into_iter().map(|v| -v).collect();
    let best = if inc.len() >= dec.len() { inc } else { dec };
    if best.len() < n {
        return Err(PassError::NotFound(format!(
            "longest monotone subsequence has length {}, {n} needed",
            best.len()
        )));
    }
    Ok(best)
}

/// Patience sorting with predecessor links.
fn longest_increasing(values: &[i64]) -> Vec<i64> {
    let mut tails: Vec<usize> = Vec::new();
    let mut prev = vec![usize::MAX; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let pos = tails.partition_point(|&t| values[t] < v);
        if pos > 0 {
            prev[i] = tails[pos - 1];
        }
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::new();
    let mut cur = tails.last().copied().unwrap_or(usize::MAX);
    while cur != usize::MAX {
        out.push(values[cur]);
        cur = prev[cur];
    }
    out.reverse();
    out
}

/// Lex-monotone witness for one (length, position) array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexLevel {
    pub len: usize,
    pub pos: u32,
    pub sigma: Vec<usize>,
    pub signs: Vec<Direction>,
}

/// Array of ranks of `(x_1 ... x_len, p)` over the subtree (0-based indices).
pub fn level_array(
    graph: &ProductGraph,
    order: &LinearOrder,
    sub: &Subtree,
    len: usize,
    pos: u32,
) -> Result<LexArray, PassError> {
    let dims: Vec<usize> = (0..len).map(|k| sub.spec().degree(k) as usize).collect();
    LexArray::from_fn(dims, |x| {
        let node = NodeIndex::new(x.iter().map(|&i| i as u32 + 1).collect());
        order.rank(sub.vertex(graph, &node, pos)) as i64
    })
}

/// Keep uniform child sets so that every level/position array becomes
/// lex-monotone, one array at a time.
pub fn pass_lex(
    graph: &ProductGraph,
    order: &LinearOrder,
    sub: &Subtree,
    targets: &[u32],
    budget: u64,
) -> Result<(Subtree, Vec<LexLevel>), PassError> {
    check_targets(sub.spec(), targets)?;
    let n = sub.spec().height();
    if n > 3 {
        return Err(PassError::Dimension(n));
    }
    let mut cur = sub.clone();
    let mut levels = Vec::new();
    for len in 1..=n {
        for pos in 1..=graph.path_len() {
            let array = level_array(graph, order, &cur, len, pos)?;
            for k in 0..len {
                if array.dims()[k] < targets[k] as usize {
                    return Err(PassError::Starved {
                        pass: "lex",
                        level: k,
                        node: format!("array ({len}, {pos})"),
                        needed: targets[k] as usize,
                        best: array.dims()[k],
                    });
                }
            }
            let want: Vec<usize> = targets[..len].iter().map(|&t| t as usize).collect();
            let w = lex_monotone_subarray(&array, &want, budget).map_err(|e| match e {
                PassError::NotFound(msg) => PassError::NotFound(format!("array ({len}, {pos}): {msg}")),
                other => other,
            })?;
            let per_depth = w
                .index_sets
                .iter()
                .enumerate()
                .map(|(k, set)| (k, set.iter().map(|&i| i as u32 + 1).collect()))
                .collect();
            cur = cur.restrict_uniform(&per_depth)?;
            levels.push(LexLevel {
                len,
                pos,
                sigma: w.sigma,
                signs: w.signs,
            });
        }
    }
    for l in &levels {
        let array = level_array(graph, order, &cur, l.len, l.pos)?;
        let w = LexMonotoneWitness {
            sigma: l.sigma.clone(),
            signs: l.signs.clone(),
            index_sets: array.dims().iter().map(|&d| (0..d).collect()).collect(),
        };
        verify_lex_monotone(&array, &w)
            .map_err(|e| PassError::Inconsistent(format!("array ({}, {}): {e}", l.len, l.pos)))?;
    }
    Ok((cur, levels))
}

/// `Z(i, j, p)`: direction of the sequences `(A + * + B, p)` with the star
/// at position `i` of an address of length `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZTable {
    n: usize,
    m: u32,
    values: BTreeMap<(usize, usize, u32), Direction>,
}

#[derive(Debug, Clone, Serialize)]
struct ZEntry {
    i: usize,
    j: usize,
    p: u32,
    dir: Direction,
}

impl Serialize for ZTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<ZEntry> = self
            .values
            .iter()
            .map(|(&(i, j, p), &dir)| ZEntry { i, j, p, dir })
            .collect();
        list.serialize(s)
    }
}

impl ZTable {
    /// Table over `1 <= i <= j <= n`, `1 <= p <= m` from a function.
    pub fn from_fn(n: usize, m: u32, f: impl Fn(usize, usize, u32) -> Direction) -> Self {
        let mut values = BTreeMap::new();
        for j in 1..=n {
            for i in 1..=j {
                for p in 1..=m {
                    values.insert((i, j, p), f(i, j, p));
                }
            }
        }
        ZTable { n, m, values }
    }

    pub fn constant(n: usize, m: u32, d: Direction) -> Self {
        ZTable::from_fn(n, m, |_, _, _| d)
    }

    pub fn height(&self) -> usize {
        self.n
    }

    pub fn path_len(&self) -> u32 {
        self.m
    }

    pub fn get(&self, i: usize, j: usize, p: u32) -> Direction {
        self.values[&(i, j, p)]
    }

    pub fn set(&mut self, i: usize, j: usize, p: u32, d: Direction) {
        assert!(
            self.values.contains_key(&(i, j, p)),
            "Z({i},{j},{p}) is outside the table"
        );
        self.values.insert((i, j, p), d);
    }

    pub fn all(&self, d: Direction) -> bool {
        self.values.values().all(|&v| v == d)
    }
}

/// Extract Z from every `(A, B)` choice, which must all agree.
pub fn extract_z(graph: &ProductGraph, order: &LinearOrder, sub: &Subtree) -> Result<ZTable, PassError> {
    let tree = sub.tree();
    let n = tree.height();
    let m = graph.path_len();
    let mut values = BTreeMap::new();
    for i in 1..=n {
        let degree = sub.spec().degree(i - 1);
        if degree < 2 {
            return Err(PassError::DegreeOne(i - 1));
        }
        let tails = tree.relative_subtree(&tree.level(i)[0]);
        for j in i..=n {
            for p in 1..=m {
                let mut dir = None;
                for a in tree.level(i - 1) {
                    for b in tails.iter().filter(|t| t.depth() == j - i) {
                        let ranks: Vec<usize> = (1..=degree)
                            .map(|c| order.rank(sub.vertex(graph, &a.child(c).concat(b), p)))
                            .collect();
                        let here = if ranks.windows(2).all(|w| w[0] < w[1]) {
                            Direction::Inc
                        } else if ranks.windows(2).all(|w| w[0] > w[1]) {
                            Direction::Dec
                        } else {
                            return Err(PassError::Inconsistent(format!("({a}+*+{b}, {p}) is not monotone")));
                        };
                        match dir {
                            None => dir = Some(here),
                            Some(d) if d != here => {
                                return Err(PassError::Inconsistent(format!(
                                    "Z({i},{j},{p}) differs at ({a}+*+{b}, {p})"
                                )))
                            }
                            _ => {}
                        }
                    }
                }
                values.insert((i, j, p), dir.expect("every level is nonempty"));
            }
        }
    }
    Ok(ZTable { n, m, values })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IdentityReport {
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Same-length addresses at one position compare at their first
/// differing coordinate, in the direction given by Z.
pub fn check_identity_permutation(
    graph: &ProductGraph,
    order: &LinearOrder,
    sub: &Subtree,
    z: &ZTable,
) -> IdentityReport {
    let tree = sub.tree();
    let mut report = IdentityReport::default();
    for len in 1..=tree.height() {
        let level = tree.level(len);
        for p in 1..=graph.path_len() {
            for (x, a) in level.iter().enumerate() {
                for b in &level[x + 1..] {
                    let i = a
                        .path()
                        .iter()
                        .zip(b.path())
                        .position(|(u, v)| u != v)
                        .expect("distinct addresses")
                        + 1;
                    let mut want = a.path()[i - 1] < b.path()[i - 1];
                    if z.get(i, len, p) == Direction::Dec {
                        want = !want;
                    }
                    let got = order.less(sub.vertex(graph, a, p), sub.vertex(graph, b, p));
                    report.pairs_checked += 1;
                    if got != want && report.violations.len() < 100 {
                        report.violations.push(format!("({a}, {p}) vs ({b}, {p})"));
                    }
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZViolation {
    pub rule: char,
    pub k: usize,
    pub i: usize,
    pub p: u32,
}

/// Check the three one-way implications between neighbouring Z boards:
/// (a) vertical, (b) diagonal, (c) horizontal.
pub fn check_z_consistency(z: &ZTable) -> Vec<ZViolation> {
    let (n, m) = (z.height(), z.path_len());
    let mut out = Vec::new();
    for p in 1..=m {
        for k in 2..=n {
            for i in k..=n {
                if i < n && z.get(k, i + 1, p) == z.get(k, i, p) && z.get(k - 1, i + 1, p) != z.get(k - 1, i, p) {
                    out.push(ZViolation { rule: 'a', k, i, p });
                }
                if p < m {
                    if i < n
                        && z.get(k, i + 1, p) == z.get(k, i, p + 1)
                        && z.get(k - 1, i + 1, p) != z.get(k - 1, i, p + 1)
                    {
                        out.push(ZViolation { rule: 'b', k, i, p });
                    }
                    if z.get(k, i, p) == z.get(k, i, p + 1) && z.get(k - 1, i, p) != z.get(k - 1, i, p + 1) {
                        out.push(ZViolation { rule: 'c', k, i, p });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelatedShape {
    Vertical,
    Diagonal,
    Horizontal,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MainRelatedReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl MainRelatedReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// One instance: A, Y, p and (for vertical/diagonal) the last entry v.
#[derive(Debug, Clone)]
struct RelatedCase {
    shape: RelatedShape,
    a: NodeIndex,
    y: NodeIndex,
    v: u32,
    p: u32,
}

fn related_cases(sub: &Subtree, m: u32) -> Vec<RelatedCase> {
    let tree = sub.tree();
    let n = tree.height();
    let mut out = Vec::new();
    for depth in 0..n {
        let a_level = tree.level(depth);
        let tails = tree.relative_subtree(&tree.level(depth + 1)[0]);
        for a in a_level {
            for y in &tails {
                let deep = depth + 1 + y.depth();
                for p in 1..=m {
                    if deep < n {
                        for v in 1..=sub.spec().degree(deep) {
                            out.push(RelatedCase {
                                shape: RelatedShape::Vertical,
                                a: a.clone(),
                                y: y.clone(),
                                v,
                                p,
                            });
                            if p < m {
                                out.push(RelatedCase {
                                    shape: RelatedShape::Diagonal,
                                    a: a.clone(),
                                    y: y.clone(),
                                    v,
                                    p,
                                });
                            }
                        }
                    }
                    if p < m {
                        out.push(RelatedCase {
                            shape: RelatedShape::Horizontal,
                            a: a.clone(),
                            y: y.clone(),
                            v: 0,
                            p,
                        });
                    }
                }
            }
        }
    }
    out
}

/// The vertical, diagonal and horizontal sequence pairs are related in the
/// colour the table predicts. Enumerates every case up to `cap`, otherwise
/// samples `cap` of them.
pub fn check_main_related(
    graph: &ProductGraph,
    order: &LinearOrder,
    coloring: &EdgeColoring,
    sub: &Subtree,
    table: &ColorTable,
    cap: usize,
    seed: u64,
) -> MainRelatedReport {
    let m = graph.path_len();
    let mut cases = related_cases(sub, m);
    if cases.len() > cap {
        let mut rng = StdRng::seed_from_u64(seed);
        cases = (0..cap).map(|_| cases[rng.gen_range(0..cases.len())].clone()).collect();
    }
    let view = LayoutView::new(graph.graph(), order, coloring);
    let mut report = MainRelatedReport::default();
    for case in cases {
        let degree = sub.spec().degree(case.a.depth());
        let seq = |extra: Option<u32>, pos: u32| -> Vec<usize> {
            (1..=degree)
                .map(|c| {
                    let mut node = case.a.child(c).concat(&case.y);
                    if let Some(v) = extra {
                        node = node.child(v);
                    }
                    sub.vertex(graph, &node, pos)
                })
                .collect()
        };
        let base = case.a.depth() + case.y.depth();
        let (s1, s2, expected) = match case.shape {
            RelatedShape::Vertical => (
                seq(Some(case.v), case.p),
                seq(None, case.p),
                table.get(base + 2, case.p, EdgeKind::Vertical),
            ),
            RelatedShape::Diagonal => (
                seq(Some(case.v), case.p),
                seq(None, case.p + 1),
                table.get(base + 2, case.p, EdgeKind::Diagonal),
            ),
            RelatedShape::Horizontal => (
                seq(None, case.p),
                seq(None, case.p + 1),
                table.get(base + 1, case.p, EdgeKind::Horizontal),
            ),
        };
        report.checked += 1;
        let got = is_related(&s1, &s2, &view);
        let ok = matches!(&got, Ok(Some(r)) if Some(r.color) == expected);
        if !ok && report.failures.len() < 100 {
            report.failures.push(format!(
                "{:?} A={} Y={} v={} p={}: {:?}, table colour {:?}",
                case.shape, case.a, case.y, case.v, case.p, got, expected
            ));
        }
    }
    report
}

/// Everything the three passes produce.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub subtree: Subtree,
    pub colors: ColorTable,
    pub order_report: OrderReport,
    pub lex: Vec<LexLevel>,
    pub z: ZTable,
    pub z_violations: Vec<ZViolation>,
    pub identity: IdentityReport,
    pub related: MainRelatedReport,
}

/// Colour, order and lex passes in sequence, then the Z-table and every
/// check re-run on the final subtree.
pub fn run_pipeline(
    graph: &ProductGraph,
    order: &LinearOrder,
    coloring: &EdgeColoring,
    targets: &[u32],
    seed: u64,
) -> Result<PipelineResult, PassError> {
    let sub = Subtree::full(graph);
    let (sub, _) = pass_colour(graph, coloring, &sub, targets)?;
    let (sub, _) = pass_order(graph, order, &sub, targets, seed)?;
    let (sub, lex) = pass_lex(graph, order, &sub, targets, DEFAULT_LEX_BUDGET)?;
    let colors = color_table(graph, coloring, &sub)?;
    let order_report = check_order_transfer(graph, order, &sub, 1000, seed);
    if !order_report.ok() {
        return Err(PassError::Inconsistent(order_report.violations.join("; ")));
    }
    let z = extract_z(graph, order, &sub)?;
    let z_violations = check_z_consistency(&z);
    let identity = check_identity_permutation(graph, order, &sub, &z);
    let related = check_main_related(graph, order, coloring, &sub, &colors, DEFAULT_CHECK_CAP, seed);
    Ok(PipelineResult {
        subtree: sub,
        colors,
        order_report,
        lex,
        z,
        z_violations,
        identity,
        related,
    })
}
