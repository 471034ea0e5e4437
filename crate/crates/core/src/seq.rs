//! Monotone vertex sequences under a fixed linear order: relation
//! predicates, interleave measures, and the crossing derivations that turn
//! large interleaves plus a fan into two same-coloured crossing edges.
//!
//! All elements handled together are assumed distinct; predicates return
//! an error instead when they are not.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::layout::{classify_pair, EdgeColoring, LinearOrder, PairRelation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("sequence is empty")]
    Empty,
    #[error("element {0} occurs more than once")]
    Duplicate(usize),
    #[error("sequences have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("edges {:?} and {:?} of colour {} cross", .0.e1, .0.e2, .0.color)]
    PageViolation(CrossingPair),
    #[error("derivation failed: {0}")]
    Contradiction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    Inc,
    Dec,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Inc => Direction::Dec,
            Direction::Dec => Direction::Inc,
        }
    }
}

/// Direction of a monotone sequence; length-1 sequences are `Either`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Strict(Direction),
    Either,
}

impl Trend {
    pub fn agrees(self, other: Trend) -> bool {
        match (self, other) {
            (Trend::Strict(a), Trend::Strict(b)) => a == b,
            _ => true,
        }
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Trend::Strict(d) => Some(d),
            Trend::Either => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelatedKind {
    Bundled,
    Rainbow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Related {
    pub kind: RelatedKind,
    pub color: usize,
}

/// Two edges of one colour that cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrossingPair {
    pub e1: (usize, usize),
    pub e2: (usize, usize),
    pub color: usize,
}

/// A graph with a fixed order and edge colouring.
#[derive(Debug, Clone, Copy)]
pub struct LayoutView<'a> {
    pub graph: &'a Graph,
    pub order: &'a LinearOrder,
    pub coloring: &'a EdgeColoring,
}

impl<'a> LayoutView<'a> {
    pub fn new(graph: &'a Graph, order: &'a LinearOrder, coloring: &'a EdgeColoring) -> Self {
        LayoutView { graph, order, coloring }
    }

    pub fn edge_color(&self, u: usize, v: usize) -> Option<usize> {
        self.graph.edge_between(u, v).map(|e| self.coloring.color(e))
    }

    fn crosses(&self, e1: (usize, usize), e2: (usize, usize)) -> bool {
        classify_pair(e1, e2, self.order) == Ok(PairRelation::Cross)
    }

    /// `Some` if both are edges of one colour that cross.
    fn crossing(&self, e1: (usize, usize), e2: (usize, usize)) -> Option<CrossingPair> {
        let c1 = self.edge_color(e1.0, e1.1)?;
        let c2 = self.edge_color(e2.0, e2.1)?;
        (c1 == c2 && self.crosses(e1, e2)).then_some(CrossingPair { e1, e2, color: c1 })
    }
}

fn distinct(parts: &[&[usize]]) -> Result<(), SeqError> {
    let mut seen = HashSet::new();
    for part in parts {
        if part.is_empty() {
            return Err(SeqError::Empty);
        }
        for &x in *part {
            if !seen.insert(x) {
                return Err(SeqError::Duplicate(x));
            }
        }
    }
    Ok(())
}

fn strictly_increasing(ranks: impl Iterator<Item = usize>) -> bool {
    let mut prev = None;
    for r in ranks {
        if prev.is_some_and(|p| p >= r) {
            return false;
        }
        prev = Some(r);
    }
    true
}

pub fn is_monotone(a: &[usize], order: &LinearOrder) -> Result<Option<Trend>, SeqError> {
    distinct(&[a])?;
    Ok(trend(a, order))
}

fn trend(a: &[usize], order: &LinearOrder) -> Option<Trend> {
    if a.len() == 1 {
        return Some(Trend::Either);
    }
    let ranks = a.iter().map(|&x| order.rank(x));
    if strictly_increasing(ranks.clone()) {
        Some(Trend::Strict(Direction::Inc))
    } else if strictly_increasing(ranks.rev()) {
        Some(Trend::Strict(Direction::Dec))
    } else {
        None
    }
}

/// `point` lies strictly between the endpoints of `edge`.
pub fn is_inside(point: usize, edge: (usize, usize), order: &LinearOrder) -> bool {
    let (lo, hi) = order.span(edge);
    let r = order.rank(point);
    lo < r && r < hi
}

/// `c < a` or `b < c` for the edge `(a, b)` with `a < b`.
pub fn is_outside(point: usize, edge: (usize, usize), order: &LinearOrder) -> bool {
    let (lo, hi) = order.span(edge);
    let r = order.rank(point);
    r < lo || hi < r
}

/// Whether two points (neither an endpoint of `edge`) are on the same side.
pub fn same_side(p: usize, q: usize, edge: (usize, usize), order: &LinearOrder) -> Option<bool> {
    for x in [p, q] {
        if x == edge.0 || x == edge.1 {
            return None;
        }
    }
    Some(is_inside(p, edge, order) == is_inside(q, edge, order))
}

pub fn is_related(a: &[usize], b: &[usize], view: &LayoutView) -> Result<Option<Related>, SeqError> {
    if a.len() != b.len() {
        return Err(SeqError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    distinct(&[a, b])?;
    let (Some(ta), Some(tb)) = (trend(a, view.order), trend(b, view.order)) else {
        return Ok(None);
    };
    let below = a.iter().zip(b).all(|(&x, &y)| view.order.less(x, y));
    let above = a.iter().zip(b).all(|(&x, &y)| view.order.less(y, x));
    if !below && !above {
        return Ok(None);
    }
    let mut color = None;
    for (&x, &y) in a.iter().zip(b) {
        match (view.edge_color(x, y), color) {
            (None, _) => return Ok(None),
            (Some(c), None) => color = Some(c),
            (Some(c), Some(prev)) if c != prev => return Ok(None),
            _ => {}
        }
    }
    let kind = if ta.agrees(tb) {
        RelatedKind::Bundled
    } else {
        RelatedKind::Rainbow
    };
    Ok(Some(Related {
        kind,
        color: color.expect("nonempty"),
    }))
}

/// One of the four alternating chains.
pub fn strongly_interleave(a: &[usize], b: &[usize], order: &LinearOrder) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return false;
    }
    let ab = || a.iter().zip(b).flat_map(|(&x, &y)| [x, y]).map(|v| order.rank(v));
    let ba = || b.iter().zip(a).flat_map(|(&x, &y)| [x, y]).map(|v| order.rank(v));
    strictly_increasing(ab())
        || strictly_increasing(ba())
        || strictly_increasing(ab().collect::<Vec<_>>().into_iter().rev())
        || strictly_increasing(ba().collect::<Vec<_>>().into_iter().rev())
}

/// Greedy alternation over the merged order, starting with a `first`
/// element. Returns the picked elements as (is_a, element) in rank order.
fn alternation(a: &[usize], b: &[usize], order: &LinearOrder, first_a: bool) -> Vec<(bool, usize)> {
    let mut merged: Vec<(usize, bool, usize)> = a
        .iter()
        .map(|&x| (order.rank(x), true, x))
        .chain(b.iter().map(|&y| (order.rank(y), false, y)))
        .collect();
    merged.sort_unstable();
    let mut want_a = first_a;
    let mut last = None;
    let mut out = Vec::new();
    for (r, is_a, x) in merged {
        if is_a == want_a && last.map_or(true, |l| l < r) {
            out.push((is_a, x));
            last = Some(r);
            want_a = !want_a;
        }
    }
    out
}

fn same_direction(a: &[usize], b: &[usize], order: &LinearOrder) -> bool {
    match (trend(a, order), trend(b, order)) {
        (Some(x), Some(y)) => x.agrees(y),
        _ => false,
    }
}

/// Largest `k` such that `a` and `b` have strongly interleaving length-`k`
/// subsequences; 0 unless both are monotone in one direction.
pub fn max_interleave(a: &[usize], b: &[usize], order: &LinearOrder) -> usize {
    if a.is_empty() || b.is_empty() || !same_direction(a, b, order) {
        return 0;
    }
    [true, false]
        .iter()
        .map(|&first| alternation(a, b, order, first).len() / 2)
        .max()
        .unwrap()
}

/// Length-`k` subsequences of `a` and `b` (in their own index order) that
/// strongly interleave.
pub fn interleave_witness(a: &[usize], b: &[usize], order: &LinearOrder, k: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    if k == 0 || !same_direction(a, b, order) {
        return None;
    }
    for first in [true, false] {
        let alt = alternation(a, b, order, first);
        if alt.len() / 2 < k {
            continue;
        }
        let picked = &alt[..2 * k];
        let keep = |src: &[usize], from_a: bool| -> Vec<usize> {
            let chosen: HashSet<usize> = picked
                .iter()
                .filter(|(is_a, _)| *is_a == from_a)
                .map(|&(_, x)| x)
                .collect();
            src.iter().copied().filter(|x| chosen.contains(x)).collect()
        };
        let (sa, sb) = (keep(a, true), keep(b, false));
        debug_assert!(strongly_interleave(&sa, &sb, order));
        return Some((sa, sb));
    }
    None
}

fn adjacency_crossing(a: &[usize], b: &[usize], view: &LayoutView) -> Option<CrossingPair> {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if let Some(p) = view.crossing((a[i], b[i]), (a[j], b[j])) {
                return Some(p);
            }
        }
    }
    None
}

/// Same-direction related sequences on a valid page strongly interleave.
/// Returns the alternating chain in increasing order.
pub fn check_bundled(a: &[usize], b: &[usize], view: &LayoutView) -> Result<Vec<usize>, SeqError> {
    match is_related(a, b, view)? {
        Some(Related {
            kind: RelatedKind::Bundled,
            ..
        }) => {}
        other => return Err(SeqError::Precondition(format!("sequences are not bundled ({other:?})"))),
    }
    if let Some(p) = adjacency_crossing(a, b, view) {
        return Err(SeqError::PageViolation(p));
    }
    if !strongly_interleave(a, b, view.order) {
        return Err(SeqError::Contradiction(
            "bundled sequences on a valid page do not strongly interleave".into(),
        ));
    }
    let mut chain: Vec<usize> = a.iter().chain(b).copied().collect();
    chain.sort_by_key(|&x| view.order.rank(x));
    Ok(chain)
}

/// Which totally separated arrangement a rainbow takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RainbowShape {
    /// Direction of `a`; `None` for length-1 sequences.
    pub a_direction: Option<Direction>,
    /// Every element of `a` precedes every element of `b`.
    pub a_first: bool,
}

/// Opposite-direction related sequences are totally separated.
pub fn check_rainbow(a: &[usize], b: &[usize], view: &LayoutView) -> Result<RainbowShape, SeqError> {
    let related = is_related(a, b, view)?;
    let ok = match related {
        Some(r) => r.kind == RelatedKind::Rainbow || a.len() == 1,
        None => false,
    };
    if !ok {
        return Err(SeqError::Precondition(format!(
            "sequences do not form a rainbow ({related:?})"
        )));
    }
    if let Some(p) = adjacency_crossing(a, b, view) {
        return Err(SeqError::PageViolation(p));
    }
    let rank = |x: &usize| view.order.rank(*x);
    let (amin, amax) = (a.iter().map(rank).min().unwrap(), a.iter().map(rank).max().unwrap());
    let (bmin, bmax) = (b.iter().map(rank).min().unwrap(), b.iter().map(rank).max().unwrap());
    let a_first = if amax < bmin {
        true
    } else if bmax < amin {
        false
    } else {
        return Err(SeqError::Contradiction(
            "rainbow sequences are not totally separated".into(),
        ));
    };
    let a_direction = trend(a, view.order).and_then(Trend::direction);
    // The chain must also run outward from the middle.
    let chain: Vec<usize> = match (a_direction, a_first) {
        (Some(Direction::Inc), true) | (Some(Direction::Dec), false) => {
            a.iter().copied().chain(b.iter().rev().copied()).collect()
        }
        (Some(Direction::Inc), false) | (Some(Direction::Dec), true) => {
            b.iter().rev().copied().chain(a.iter().copied()).collect()
        }
        (None, _) => Vec::new(),
    };
    let ranks: Vec<usize> = chain.iter().map(rank).collect();
    let monotone = strictly_increasing(ranks.iter().copied()) || strictly_increasing(ranks.iter().rev().copied());
    if !monotone {
        return Err(SeqError::Contradiction("rainbow chain is not monotone".into()));
    }
    Ok(RainbowShape { a_direction, a_first })
}

/// Colour `c` if `apex` is joined to every element by an edge of colour `c`.
pub fn fan_check(a: &[usize], apex: usize, view: &LayoutView) -> Option<usize> {
    if a.is_empty() || a.contains(&apex) {
        return None;
    }
    let mut color = None;
    for &x in a {
        let c = view.edge_color(x, apex)?;
        if color.is_some_and(|p| p != c) {
            return None;
        }
        color = Some(c);
    }
    color
}

fn verified(pair: CrossingPair, view: &LayoutView) -> Result<CrossingPair, SeqError> {
    match view.crossing(pair.e1, pair.e2) {
        Some(p) if p.color == pair.color => Ok(pair),
        _ => Err(SeqError::Contradiction(format!(
            "{:?} and {:?} do not cross in one colour",
            pair.e1, pair.e2
        ))),
    }
}

/// Two interleaving fans of one colour must cross somewhere.
pub fn derive_fan_fan_crossing(
    a: &[usize],
    apex_a: usize,
    b: &[usize],
    apex_b: usize,
    view: &LayoutView,
) -> Result<CrossingPair, SeqError> {
    distinct(&[a, b, &[apex_a], &[apex_b]])?;
    let ca = fan_check(a, apex_a, view).ok_or_else(|| SeqError::Precondition("first sequence is not fanned".into()))?;
    let cb =
        fan_check(b, apex_b, view).ok_or_else(|| SeqError::Precondition("second sequence is not fanned".into()))?;
    if ca != cb {
        return Err(SeqError::Precondition(format!("fans have colours {ca} and {cb}")));
    }
    let (wa, wb) = interleave_witness(a, b, view.order, 2)
        .ok_or_else(|| SeqError::Precondition("sequences do not 2-interleave".into()))?;
    let order = view.order;

    // For a fan edge e of one side, the other side's two leaves and its apex
    // must all lie on one side of e; a leaf on the other side gives the pair.
    let sided = |leaves: &[usize], apex: usize, edge: (usize, usize)| {
        leaves.iter().find_map(|&x| match same_side(x, apex, edge, order) {
            Some(false) => Some(CrossingPair {
                e1: edge,
                e2: (x, apex),
                color: ca,
            }),
            _ => None,
        })
    };
    for &x in &wa {
        if let Some(p) = sided(&wb, apex_b, (x, apex_a)) {
            return verified(p, view);
        }
    }
    for &y in &wb {
        if let Some(p) = sided(&wa, apex_a, (y, apex_b)) {
            return verified(p, view);
        }
    }
    for &x in a {
        for &y in b {
            if let Some(p) = view.crossing((x, apex_a), (y, apex_b)) {
                return Ok(p);
            }
        }
    }
    Err(SeqError::Contradiction("no crossing between interleaving fans".into()))
}

/// A fan interleaving one side of a same-coloured rainbow must cross it.
pub fn derive_fan_rainbow_crossing(
    a: &[usize],
    b: &[usize],
    c: &[usize],
    apex: usize,
    view: &LayoutView,
) -> Result<CrossingPair, SeqError> {
    distinct(&[a, b, c, &[apex]])?;
    let rel = is_related(a, b, view)?;
    let color = match rel {
        Some(Related {
            kind: RelatedKind::Rainbow,
            color,
        }) => color,
        other => {
            return Err(SeqError::Precondition(format!(
                "first two sequences are not a rainbow ({other:?})"
            )))
        }
    };
    if fan_check(c, apex, view) != Some(color) {
        return Err(SeqError::Precondition(format!(
            "third sequence is not fanned in colour {color}"
        )));
    }
    let k = max_interleave(a, c, view.order);
    if k < 3 {
        return Err(SeqError::Precondition(format!(
            "first and third sequences only {k}-interleave"
        )));
    }
    let order = view.order;
    let (wa, wc) = interleave_witness(a, c, order, 3).expect("interleave of at least 3");
    let mut sa = wa.clone();
    sa.sort_by_key(|&x| order.rank(x));
    let mid = sa[1];
    let partner = b[a.iter().position(|&x| x == mid).expect("witness is a subsequence")];
    let rainbow_edge = (mid, partner);
    let lo_gap = wc
        .iter()
        .copied()
        .find(|&y| order.less(sa[0], y) && order.less(y, sa[1]));
    let hi_gap = wc
        .iter()
        .copied()
        .find(|&y| order.less(sa[1], y) && order.less(y, sa[2]));
    if let (Some(c1), Some(c2)) = (lo_gap, hi_gap) {
        // c1 and c2 sit on different sides of the rainbow edge, so the apex
        // disagrees with one of them.
        for y in [c1, c2] {
            if same_side(y, apex, rainbow_edge, order) == Some(false) {
                return verified(
                    CrossingPair {
                        e1: rainbow_edge,
                        e2: (y, apex),
                        color,
                    },
                    view,
                );
            }
        }
    }
    for (&x, &y) in a.iter().zip(b) {
        for &z in c {
            if let Some(p) = view.crossing((x, y), (z, apex)) {
                return Ok(p);
            }
        }
    }
    Err(SeqError::Contradiction("no crossing between rainbow and fan".into()))
}

/// Interleave carried across two same-coloured rainbows: if `a`, `b`
/// k-interleave then `c`, `d` interleave at least `k - 2`.
pub fn rainbow_interleave_transfer(
    a: &[usize],
    b: &[usize],
    c: &[usize],
    d: &[usize],
    view: &LayoutView,
) -> Result<usize, SeqError> {
    distinct(&[a, b, c, d])?;
    if !same_direction(a, b, view.order) {
        return Err(SeqError::Precondition(
            "first two sequences are not monotone in one direction".into(),
        ));
    }
    let rainbow = |x: &[usize], y: &[usize]| match is_related(x, y, view) {
        Ok(Some(Related {
            kind: RelatedKind::Rainbow,
            color,
        })) => Ok(color),
        Ok(other) => Err(SeqError::Precondition(format!("not a rainbow ({other:?})"))),
        Err(e) => Err(e),
    };
    let (c1, c2) = (rainbow(a, c)?, rainbow(b, d)?);
    if c1 != c2 {
        return Err(SeqError::Precondition(format!("rainbows have colours {c1} and {c2}")));
    }
    let edges: Vec<(usize, usize)> = a.iter().zip(c).chain(b.iter().zip(d)).map(|(&x, &y)| (x, y)).collect();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if let Some(p) = view.crossing(edges[i], edges[j]) {
                return Err(SeqError::PageViolation(p));
            }
        }
    }
    let k = max_interleave(a, b, view.order);
    let k2 = max_interleave(c, d, view.order);
    if k2 < k.saturating_sub(2) {
        return Err(SeqError::Contradiction(format!(
            "rainbows carried a {k}-interleave down to {k2}"
        )));
    }
    Ok(k2)
}

/// Given `a`, `b` strongly interleaving and increasing positions `picks`
/// into `a`, the partners of `b` at the same positions; they strongly
/// interleave the picked part of `a`.
pub fn sub_interleave(
    a: &[usize],
    b: &[usize],
    picks: &[usize],
    order: &LinearOrder,
) -> Result<(Vec<usize>, Vec<usize>), SeqError> {
    if !strongly_interleave(a, b, order) {
        return Err(SeqError::Precondition("sequences do not strongly interleave".into()));
    }
    if picks.is_empty() || picks.windows(2).any(|w| w[0] >= w[1]) || picks.iter().any(|&i| i >= a.len()) {
        return Err(SeqError::Precondition(
            "positions must be increasing and in range".into(),
        ));
    }
    let sa: Vec<usize> = picks.iter().map(|&i| a[i]).collect();
    let sb: Vec<usize> = picks.iter().map(|&i| b[i]).collect();
    if !strongly_interleave(&sa, &sb, order) {
        return Err(SeqError::Contradiction(format!(
            "positions {picks:?} lose the strong interleave"
        )));
    }
    Ok((sa, sb))
}

/// `ceil(k/2) - 1`.
pub fn half_bound(k: usize) -> usize {
    k.div_ceil(2).saturating_sub(1)
}

/// `ceil(k/n) - 1` for a chain of `n` strong interleaves.
pub fn chain_bound(k: usize, n: usize) -> usize {
    k.div_ceil(n).saturating_sub(1)
}

/// If `a`, `b` k-interleave and `b`, `c` strongly interleave then `a`, `c`
/// interleave at least `ceil(k/2) - 1`. Returns that interleave.
pub fn check_half_interleave(a: &[usize], b: &[usize], c: &[usize], order: &LinearOrder) -> Result<usize, SeqError> {
    distinct(&[a, b, c])?;
    if !strongly_interleave(b, c, order) {
        return Err(SeqError::Precondition(
            "second and third sequences do not strongly interleave".into(),
        ));
    }
    if !same_direction(a, b, order) {
        return Err(SeqError::Precondition("directions differ".into()));
    }
    let k = max_interleave(a, b, order);
    let got = max_interleave(a, c, order);
    if got < half_bound(k) {
        return Err(SeqError::Contradiction(format!("{k}-interleave halved to {got}")));
    }
    Ok(got)
}

/// Interleave between the ends of a chain of strong interleaves, checked
/// against `ceil(k/n) - 1` (and the halving bound when `n = 2`).
pub fn chain_interleave(chain: &[Vec<usize>], order: &LinearOrder) -> Result<usize, SeqError> {
    if chain.len() < 2 {
        return Err(SeqError::Precondition("a chain needs two sequences".into()));
    }
    let k = chain[0].len();
    for s in chain {
        if s.len() != k {
            return Err(SeqError::LengthMismatch {
                left: k,
                right: s.len(),
            });
        }
        distinct(&[s])?;
    }
    for w in chain.windows(2) {
        if !strongly_interleave(&w[0], &w[1], order) {
            return Err(SeqError::Precondition(
                "consecutive sequences do not strongly interleave".into(),
            ));
        }
    }
    let n = chain.len() - 1;
    let got = max_interleave(&chain[0], &chain[n], order);
    let mut need = chain_bound(k, n);
    if n == 2 {
        need = need.max(half_bound(k));
    }
    if got < need {
        return Err(SeqError::Contradiction(format!(
            "chain of {n} with length {k} ends at {got}-interleave, below {need}"
        )));
    }
    Ok(got)
}
