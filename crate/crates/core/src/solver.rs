//! Exact stack and queue numbers of small graphs by searching vertex orders.
//!
//! Orders are enumerated lexicographically. For stacks the first vertex is
//! fixed (crossings only depend on the cyclic order) and an order is kept
//! only if it is not the reversal of an earlier one. Queues keep reversal
//! pruning but not first-vertex fixing, since nesting is not invariant
//! under rotation.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::Graph;
use crate::layout::{
    crossing_graph, queues_for_order, stack_pages_for_order, EdgeColoring, LayoutError, LinearOrder,
    DEFAULT_EXACT_LIMIT,
};

pub const DEFAULT_MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("graph has {vertices} vertices; exhaustive search is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("no layout with at most {limit} colours exists")]
    AboveLimit { limit: usize },
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Stack,
    Queue,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Give up (with an error) if the answer is above this.
    pub upper_limit: Option<usize>,
    /// Wall-clock budget; when exceeded the best known witness is returned
    /// with `exact = false`.
    pub budget: Option<Duration>,
    pub jobs: usize,
    /// First-vertex fixing and reversal pruning.
    pub prune: bool,
    pub max_vertices: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            upper_limit: None,
            budget: None,
            jobs: 1,
            prune: true,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub value: usize,
    pub order: LinearOrder,
    pub coloring: EdgeColoring,
    pub exact: bool,
    pub nodes_explored: u64,
}

pub fn stack_number(graph: &Graph, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    solve(graph, Objective::Stack, opts)
}

pub fn queue_number(graph: &Graph, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    solve(graph, Objective::Queue, opts)
}

/// Colouring with at most `k` colours for this order, if one exists.
fn fit(graph: &Graph, order: &LinearOrder, objective: Objective, k: usize) -> Option<EdgeColoring> {
    match objective {
        Objective::Stack => crossing_graph(graph, order)
            .color_with(k)
            .map(|c| EdgeColoring::new(c, k).expect("colours below k")),
        Objective::Queue => {
            let q = queues_for_order(graph, order);
            (q.count <= k).then(|| EdgeColoring::new(q.coloring.colors().to_vec(), k).unwrap())
        }
    }
}

struct Search<'a> {
    graph: &'a Graph,
    objective: Objective,
    k: usize,
    prune: bool,
    deadline: Option<Instant>,
    aborted: &'a AtomicBool,
    nodes: &'a AtomicU64,
    /// Lowest partition index with a success so far.
    best_part: &'a AtomicUsize,
}

impl Search<'_> {
    fn keep(&self, seq: &[usize]) -> bool {
        let n = seq.len();
        if !self.prune {
            return true;
        }
        match self.objective {
            Objective::Stack => n < 3 || seq[1] < seq[n - 1],
            Objective::Queue => n < 2 || seq[0] < seq[n - 1],
        }
    }

    /// First order (lexicographically) extending `prefix` that fits.
    fn run(&self, part: usize, prefix: Vec<usize>) -> Option<(LinearOrder, EdgeColoring)> {
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            self.aborted.store(true, AtomicOrdering::Relaxed);
            return None;
        }
        let n = self.graph.vertex_count();
        let mut used = vec![false; n];
        for &v in &prefix {
            used[v] = true;
        }
        let mut seq = prefix;
        let mut leaves = 0u64;
        let found = self.dfs(part, &mut seq, &mut used, &mut leaves);
        self.nodes.fetch_add(leaves, AtomicOrdering::Relaxed);
        found
    }

    fn dfs(
        &self,
        part: usize,
        seq: &mut Vec<usize>,
        used: &mut [bool],
        leaves: &mut u64,
    ) -> Option<(LinearOrder, EdgeColoring)> {
        if self.aborted.load(AtomicOrdering::Relaxed) || self.best_part.load(AtomicOrdering::Relaxed) < part {
            return None;
        }
        if seq.len() == used.len() {
            *leaves += 1;
            if *leaves % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() > d) {
                self.aborted.store(true, AtomicOrdering::Relaxed);
                return None;
            }
            if !self.keep(seq) {
                return None;
            }
            let order = LinearOrder::from_sequence(seq.clone()).expect("complete permutation");
            return fit(self.graph, &order, self.objective, self.k).map(|c| (order, c));
        }
        for v in 0..used.len() {
            if used[v] {
                continue;
            }
            used[v] = true;
            seq.push(v);
            let r = self.dfs(part, seq, used, leaves);
            seq.pop();
            used[v] = false;
            if r.is_some() {
                return r;
            }
        }
        None
    }
}

/// Prefixes splitting the order space into lexicographic blocks.
fn partitions(n: usize, objective: Objective, prune: bool) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if prune && objective == Objective::Stack {
        if n == 1 {
            return vec![vec![0]];
        }
        (1..n).map(|v| vec![0, v]).collect()
    } else {
        (0..n).map(|v| vec![v]).collect()
    }
}

pub fn solve(graph: &Graph, objective: Objective, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    let n = graph.vertex_count();
    if n > opts.max_vertices {
        return Err(SolveError::TooLarge {
            vertices: n,
            limit: opts.max_vertices,
        });
    }
    let identity = LinearOrder::identity(n);
    if graph.edge_count() == 0 {
        return Ok(SolveResult {
            value: 0,
            order: identity,
            coloring: EdgeColoring::new(Vec::new(), 0)?,
            exact: true,
            nodes_explored: 0,
        });
    }
    let start = Instant::now();
    let deadline = opts.budget.map(|b| start + b);
    let initial = match objective {
        Objective::Stack => stack_pages_for_order(graph, &identity, DEFAULT_EXACT_LIMIT),
        Objective::Queue => queues_for_order(graph, &identity),
    };
    let upper = initial.count;
    let ceiling = opts.upper_limit.unwrap_or(usize::MAX);
    let aborted = AtomicBool::new(false);
    let nodes = AtomicU64::new(0);
    let parts = partitions(n, objective, opts.prune);

    for k in 1..upper.min(ceiling.saturating_add(1)) {
        let best_part = AtomicUsize::new(usize::MAX);
        let search = Search {
            graph,
            objective,
            k,
            prune: opts.prune,
            deadline,
            aborted: &aborted,
            nodes: &nodes,
            best_part: &best_part,
        };
        let results = run_partitions(&search, &parts, opts.jobs.max(1));
        if aborted.load(AtomicOrdering::Relaxed) {
            break;
        }
        if let Some((order, coloring)) = results.into_iter().flatten().next() {
            return Ok(SolveResult {
                value: k,
                order,
                coloring,
                exact: true,
                nodes_explored: nodes.load(AtomicOrdering::Relaxed),
            });
        }
    }
    let exact = !aborted.load(AtomicOrdering::Relaxed);
    if exact && upper > ceiling {
        return Err(SolveError::AboveLimit { limit: ceiling });
    }
    Ok(SolveResult {
        value: upper,
        order: identity,
        coloring: EdgeColoring::new(initial.coloring.colors().to_vec(), upper)?,
        exact,
        nodes_explored: nodes.load(AtomicOrdering::Relaxed),
    })
}

/// Per-partition results in partition order.
fn run_partitions(search: &Search<'_>, parts: &[Vec<usize>], jobs: usize) -> Vec<Option<(LinearOrder, EdgeColoring)>> {
    let record = |i: usize, r: &Option<(LinearOrder, EdgeColoring)>| {
        if r.is_some() {
            search.best_part.fetch_min(i, AtomicOrdering::Relaxed);
        }
    };
    if jobs == 1 {
        let mut out = Vec::with_capacity(parts.len());
        for (i, p) in parts.iter().enumerate() {
            let r = search.run(i, p.clone());
            record(i, &r);
            let done = r.is_some();
            out.push(r);
            if done {
                break;
            }
        }
        return out;
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<(LinearOrder, EdgeColoring)>> = vec![None; parts.len()];
    let collected: Vec<Vec<(usize, Option<(LinearOrder, EdgeColoring)>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                        if i >= parts.len() {
                            break;
                        }
                        let r = search.run(i, parts[i].clone());
                        record(i, &r);
                        mine.push((i, r));
                    }
                    mine
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    for (i, r) in collected.into_iter().flatten() {
        slots[i] = r;
    }
    slots
}

#[derive(Debug, Clone)]
pub enum ProbeOutcome {
    /// The first instance whose queue number is above the bound.
    Exceeded {
        index: usize,
        name: String,
        result: SolveResult,
    },
    Exhausted {
        checked: usize,
    },
}

/// Stream a family of graphs through the queue solver, stopping at the
/// first one that needs more than `q` queues.
pub fn probe_queue_lower_bound<I>(family: I, q: usize, opts: &SolveOptions) -> Result<ProbeOutcome, SolveError>
where
    I: IntoIterator<Item = (String, Graph)>,
{
    let mut checked = 0;
    for (index, (name, graph)) in family.into_iter().enumerate() {
        let result = queue_number(&graph, opts)?;
        checked += 1;
        if result.value > q {
            return Ok(ProbeOutcome::Exceeded { index, name, result });
        }
    }
    Ok(ProbeOutcome::Exhausted { checked })
}
