//! Two-coloured hexagonal grids and their dual boundaries.
//!
//! Cells are `(i, j)` with `i` the depth (row, 1 at the top) and `j` the
//! column. Cell `(i, j)` touches `(i±1, j)`, `(i, j±1)`, `(i+1, j-1)` and
//! `(i-1, j+1)`. A dual vertex is a corner where three cells meet:
//! `(i, j, -)` meets `(i, j), (i-1, j), (i-1, j+1)` and `(i, j, +)` meets
//! `(i, j), (i, j+1), (i-1, j+1)`. Boundary lengths count cell pairs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::passes::ZTable;
use crate::seq::Direction;

pub type Cell = (i32, i32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("grid must have at least one row and one column")]
    Empty,
    #[error("row {row} has {len} cells, expected {m}")]
    RowLength { row: usize, len: usize, m: usize },
    #[error("colour value {0} is neither 0 (INC) nor 1 (DEC)")]
    BadValue(u8),
    #[error("grid is {rows}x{cols}, at least {need_rows}x{need_cols} needed")]
    Undersized {
        rows: usize,
        cols: usize,
        need_rows: u128,
        need_cols: u128,
    },
    #[error("dual vertex {0} is not on any boundary")]
    NotOnBoundary(DualVertex),
    #[error("boundary of length {len} is below the threshold {threshold:?} and has no {want} good points")]
    TooShort {
        len: usize,
        want: usize,
        threshold: Option<u128>,
    },
    #[error("no witness found: {0}")]
    NotFound(String),
    #[error("witness failed re-verification: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

/// Field order gives the depth priority `(1,*,-) < (1,*,+) < (2,*,-) < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DualVertex {
    pub i: i32,
    pub sign: Sign,
    pub j: i32,
}

impl DualVertex {
    pub fn minus(i: i32, j: i32) -> Self {
        DualVertex {
            i,
            sign: Sign::Minus,
            j,
        }
    }

    pub fn plus(i: i32, j: i32) -> Self {
        DualVertex { i, sign: Sign::Plus, j }
    }

    /// The three cells meeting at this corner (some may lie off the grid).
    pub fn cells(&self) -> [Cell; 3] {
        let (i, j) = (self.i, self.j);
        match self.sign {
            Sign::Minus => [(i, j), (i - 1, j), (i - 1, j + 1)],
            Sign::Plus => [(i, j), (i, j + 1), (i - 1, j + 1)],
        }
    }
}

impl fmt::Display for DualVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Minus { '-' } else { '+' };
        write!(f, "({},{},{s})", self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HEdgeKind {
    Vertical,
    Horizontal,
    Diagonal,
}

/// Kind of the H-edge between two cells, if they are adjacent.
pub fn h_edge_kind(a: Cell, b: Cell) -> Option<HEdgeKind> {
    let (di, dj) = (b.0 - a.0, b.1 - a.1);
    match (di, dj) {
        (1, 0) | (-1, 0) => Some(HEdgeKind::Vertical),
        (0, 1) | (0, -1) => Some(HEdgeKind::Horizontal),
        (1, -1) | (-1, 1) => Some(HEdgeKind::Diagonal),
        _ => None,
    }
}

fn cell_neighbours((i, j): Cell) -> [Cell; 6] {
    [
        (i + 1, j),
        (i - 1, j),
        (i, j + 1),
        (i, j - 1),
        (i + 1, j - 1),
        (i - 1, j + 1),
    ]
}

/// Total 2-colouring of an `n x m` grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HexFile", into = "HexFile")]
pub struct HexColoring {
    n: usize,
    m: usize,
    chi: Vec<Direction>,
}

/// `{"n":3,"m":5,"chi":[[0,1,...],...]}` with 0 = INC, 1 = DEC.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HexFile {
    pub n: usize,
    pub m: usize,
    pub chi: Vec<Vec<u8>>,
}

impl TryFrom<HexFile> for HexColoring {
    type Error = HexError;

    fn try_from(f: HexFile) -> Result<Self, HexError> {
        if f.chi.len() != f.n {
            return Err(HexError::RowLength {
                row: f.chi.len(),
                len: 0,
                m: f.m,
            });
        }
        let rows = f
            .chi
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| match v {
                        0 => Ok(Direction::Inc),
                        1 => Ok(Direction::Dec),
                        x => Err(HexError::BadValue(x)),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        HexColoring::from_rows(rows)
    }
}

impl From<HexColoring> for HexFile {
    fn from(c: HexColoring) -> Self {
        HexFile {
            n: c.n,
            m: c.m,
            chi: c
                .chi
                .chunks(c.m)
                .map(|r| r.iter().map(|&d| u8::from(d == Direction::Dec)).collect())
                .collect(),
        }
    }
}

impl HexColoring {
    pub fn new(n: usize, m: usize, f: impl Fn(usize, usize) -> Direction) -> Result<Self, HexError> {
        if n == 0 || m == 0 {
            return Err(HexError::Empty);
        }
        let mut chi = Vec::with_capacity(n * m);
        for i in 1..=n {
            for j in 1..=m {
                chi.push(f(i, j));
            }
        }
        Ok(HexColoring { n, m, chi })
    }

    pub fn from_rows(rows: Vec<Vec<Direction>>) -> Result<Self, HexError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(HexError::Empty);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(HexError::RowLength {
                    row: r + 1,
                    len: row.len(),
                    m,
                });
            }
        }
        Ok(HexColoring {
            n,
            m,
            chi: rows.into_iter().flatten().collect(),
        })
    }

    /// Colouring number `code` of all `2^(n m)`, row-major, bit set = DEC.
    pub fn from_code(n: usize, m: usize, code: u64) -> Result<Self, HexError> {
        HexColoring::new(n, m, |i, j| {
            if code >> ((i - 1) * m + j - 1) & 1 == 1 {
                Direction::Dec
            } else {
                Direction::Inc
            }
        })
    }

    pub fn random<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Self, HexError> {
        let bits: Vec<bool> = (0..n * m).map(|_| rng.gen()).collect();
        HexColoring::new(n, m, |i, j| {
            if bits[(i - 1) * m + j - 1] {
                Direction::Dec
            } else {
                Direction::Inc
            }
        })
    }

    pub fn constant(n: usize, m: usize, d: Direction) -> Result<Self, HexError> {
        HexColoring::new(n, m, |_, _| d)
    }

    /// Board `k` of a Z-table: rows `k..=n` renumbered from 1, coloured by
    /// `Z(k, row, p)`.
    pub fn board(z: &ZTable, k: usize) -> Result<Self, HexError> {
        HexColoring::new(z.height() + 1 - k, z.path_len() as usize, |i, p| {
            z.get(k, i + k - 1, p as u32)
        })
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn contains(&self, (i, j): Cell) -> bool {
        i >= 1 && j >= 1 && i as usize <= self.n && j as usize <= self.m
    }

    pub fn get(&self, c: Cell) -> Option<Direction> {
        self.contains(c)
            .then(|| self.chi[(c.0 as usize - 1) * self.m + c.1 as usize - 1])
    }

    pub fn at(&self, c: Cell) -> Direction {
        self.get(c).unwrap_or_else(|| panic!("cell {c:?} is off the grid"))
    }

    fn index(&self, c: Cell) -> usize {
        (c.0 as usize - 1) * self.m + c.1 as usize - 1
    }

    fn cell_of(&self, idx: usize) -> Cell {
        ((idx / self.m) as i32 + 1, (idx % self.m) as i32 + 1)
    }

    pub fn neighbours(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        cell_neighbours(c).into_iter().filter(move |&d| self.contains(d))
    }

    /// Monochromatic components, as a union-find over same-coloured H-edges.
    pub fn components(&self) -> UnionFind<usize> {
        let mut uf = UnionFind::new(self.n * self.m);
        for idx in 0..self.n * self.m {
            let c = self.cell_of(idx);
            for d in self.neighbours(c) {
                if self.at(c) == self.at(d) {
                    uf.union(idx, self.index(d));
                }
            }
        }
        uf
    }

    /// Every dual edge whose two cells exist, with the cells it separates.
    pub fn dual_edges(&self) -> Vec<(DualVertex, DualVertex, Cell, Cell)> {
        let (n, m) = (self.n as i32, self.m as i32);
        let mut out = Vec::new();
        for r in 1..=n {
            for c in 1..=m {
                if r >= 2 {
                    out.push((DualVertex::minus(r, c), DualVertex::plus(r, c - 1), (r, c), (r - 1, c)));
                }
                if c < m {
                    out.push((DualVertex::minus(r + 1, c), DualVertex::plus(r, c), (r, c), (r, c + 1)));
                    if r >= 2 {
                        out.push((DualVertex::minus(r, c), DualVertex::plus(r, c), (r, c), (r - 1, c + 1)));
                    }
                }
            }
        }
        out
    }
}

/// Dual edges separating differently coloured cells.
#[derive(Debug, Clone, Default)]
pub struct BoundarySubgraph {
    adj: BTreeMap<DualVertex, Vec<(DualVertex, Cell, Cell)>>,
}

impl BoundarySubgraph {
    pub fn degree(&self, v: &DualVertex) -> usize {
        self.adj.get(v).map_or(0, Vec::len)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &DualVertex> {
        self.adj.keys()
    }

    fn edges_at(&self, v: &DualVertex) -> &[(DualVertex, Cell, Cell)] {
        self.adj.get(v).map_or(&[], Vec::as_slice)
    }
}

pub fn boundary_subgraph(coloring: &HexColoring) -> BoundarySubgraph {
    let mut adj: BTreeMap<DualVertex, Vec<_>> = BTreeMap::new();
    for (u, v, a, b) in coloring.dual_edges() {
        if coloring.at(a) != coloring.at(b) {
            adj.entry(u).or_default().push((v, a, b));
            adj.entry(v).or_default().push((u, a, b));
        }
    }
    BoundarySubgraph { adj }
}

/// Whether a dual vertex meets all three of its cells inside the grid.
pub fn is_interior(coloring: &HexColoring, v: &DualVertex) -> bool {
    v.cells().iter().all(|&c| coloring.contains(c))
}

/// Interior dual vertices have boundary degree 0 or 2, border ones 0 or 1.
pub fn check_dual_degrees(coloring: &HexColoring, sub: &BoundarySubgraph) -> Result<(), String> {
    for v in sub.vertices() {
        let d = sub.degree(v);
        let ok = if is_interior(coloring, v) {
            d == 0 || d == 2
        } else {
            d <= 1
        };
        if !ok {
            return Err(format!("dual vertex {v} has boundary degree {d}"));
        }
    }
    Ok(())
}

/// A chromatic boundary line: A holds the cells of colour `a_color`, B the
/// others, and `(a[t], b[t])` is the H-edge crossed by the t-th dual edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryLine {
    pub vertices: Vec<DualVertex>,
    pub a: Vec<Cell>,
    pub b: Vec<Cell>,
    pub a_color: Direction,
    pub cycle: bool,
}

impl BoundaryLine {
    /// Number of `(a, b)` pairs.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn start(&self) -> DualVertex {
        self.vertices[0]
    }

    pub fn end(&self) -> DualVertex {
        *self.vertices.last().unwrap()
    }

    /// The same line with the A and B sides exchanged.
    pub fn swapped(&self) -> BoundaryLine {
        BoundaryLine {
            vertices: self.vertices.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
            a_color: self.a_color.flip(),
            cycle: self.cycle,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.a.iter().chain(&self.b).copied()
    }
}

/// The four defining conditions, against an arbitrary cell colouring.
pub fn verify_boundary(line: &BoundaryLine, color: impl Fn(Cell) -> Option<Direction>) -> Result<(), String> {
    if line.a.len() != line.b.len() || line.a.is_empty() {
        return Err("A and B must be nonempty and of equal length".into());
    }
    let first = color(line.a[0]).ok_or_else(|| format!("cell {:?} is missing", line.a[0]))?;
    for t in 0..line.len() {
        let (a, b) = (line.a[t], line.b[t]);
        let (ca, cb) = (color(a), color(b));
        if ca != Some(first) || cb != Some(first.flip()) {
            return Err(format!("pair {t} ({a:?}, {b:?}) is coloured {ca:?}/{cb:?}"));
        }
        if h_edge_kind(a, b).is_none() {
            return Err(format!("pair {t} ({a:?}, {b:?}) is not an H-edge"));
        }
        if t + 1 < line.len() {
            let same_a = a == line.a[t + 1];
            let same_b = b == line.b[t + 1];
            if same_a == same_b {
                return Err(format!("step {t} does not move exactly one side"));
            }
        }
    }
    let distinct: BTreeSet<(Cell, Cell)> = line.a.iter().copied().zip(line.b.iter().copied()).collect();
    if distinct.len() != line.len() {
        return Err("pairs repeat".into());
    }
    Ok(())
}

fn walk_from(sub: &BoundarySubgraph, start: DualVertex) -> (Vec<DualVertex>, Vec<(Cell, Cell)>, bool) {
    let mut vertices = vec![start];
    let mut pairs = Vec::new();
    let mut prev: Option<(Cell, Cell)> = None;
    let mut cur = start;
    loop {
        let next = sub.edges_at(&cur).iter().find(|(_, a, b)| prev != Some((*a, *b)));
        let Some(&(w, a, b)) = next else {
            return (vertices, pairs, false);
        };
        pairs.push((a, b));
        if w == start {
            return (vertices, pairs, true);
        }
        vertices.push(w);
        prev = Some((a, b));
        cur = w;
    }
}

fn line_from(coloring: &HexColoring, vertices: Vec<DualVertex>, pairs: Vec<(Cell, Cell)>, cycle: bool) -> BoundaryLine {
    let mut a = Vec::with_capacity(pairs.len());
    let mut b = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        if coloring.at(x) == Direction::Inc {
            a.push(x);
            b.push(y);
        } else {
            a.push(y);
            b.push(x);
        }
    }
    BoundaryLine {
        vertices,
        a,
        b,
        a_color: Direction::Inc,
        cycle,
    }
}

/// The whole path or cycle through `start`. Paths are walked from an end:
/// `start` itself if it is one. The result is re-verified.
pub fn trace_boundary(coloring: &HexColoring, start: DualVertex) -> Result<BoundaryLine, HexError> {
    let sub = boundary_subgraph(coloring);
    trace_in(coloring, &sub, start)
}

fn trace_in(coloring: &HexColoring, sub: &BoundarySubgraph, start: DualVertex) -> Result<BoundaryLine, HexError> {
    if sub.degree(&start) == 0 {
        return Err(HexError::NotOnBoundary(start));
    }
    let (mut vertices, mut pairs, cycle) = walk_from(sub, start);
    if !cycle && sub.degree(&start) == 2 {
        let end = *vertices.last().unwrap();
        (vertices, pairs, _) = walk_from(sub, end);
    }
    let line = line_from(coloring, vertices, pairs, cycle);
    verify_boundary(&line, |c| coloring.get(c)).map_err(HexError::Inconsistent)?;
    Ok(line)
}

/// All paths (walked from their smaller end) and cycles of the boundary
/// subgraph, each edge exactly once.
pub fn decompose_boundaries(coloring: &HexColoring) -> Vec<BoundaryLine> {
    let sub = boundary_subgraph(coloring);
    let mut used: BTreeSet<DualVertex> = BTreeSet::new();
    let mut out = Vec::new();
    let ends: Vec<DualVertex> = sub.vertices().filter(|v| sub.degree(v) == 1).copied().collect();
    let rest: Vec<DualVertex> = sub.vertices().filter(|v| sub.degree(v) == 2).copied().collect();
    for v in ends.into_iter().chain(rest) {
        if used.contains(&v) {
            continue;
        }
        let line = trace_in(coloring, &sub, v).expect("vertex lies on the subgraph");
        used.extend(line.vertices.iter().copied());
        out.push(line);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanAxis {
    /// Column 1 to column m.
    Columns,
    /// Row 1 to row n.
    Rows,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanningPath {
    pub cells: Vec<Cell>,
    pub color: Direction,
    pub axis: SpanAxis,
}

impl SpanningPath {
    /// Number of cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Hex-game winner: INC joining the left and right columns or DEC joining
/// the top and bottom rows; exactly one always happens. Returns a shortest
/// path inside the winning colour.
pub fn monochromatic_spanning_path(coloring: &HexColoring) -> SpanningPath {
    let (n, m) = (coloring.n as i32, coloring.m as i32);
    let mut uf = coloring.components();
    let spans = |uf: &mut UnionFind<usize>, from: Vec<Cell>, to: Vec<Cell>, d: Direction| {
        from.iter().filter(|&&c| coloring.at(c) == d).any(|&c| {
            to.iter()
                .filter(|&&t| coloring.at(t) == d)
                .any(|&t| uf.equiv(coloring.index(c), coloring.index(t)))
        })
    };
    let left: Vec<Cell> = (1..=n).map(|i| (i, 1)).collect();
    let right: Vec<Cell> = (1..=n).map(|i| (i, m)).collect();
    let top: Vec<Cell> = (1..=m).map(|j| (1, j)).collect();
    let bottom: Vec<Cell> = (1..=m).map(|j| (n, j)).collect();
    let (color, axis, from, to) = if spans(&mut uf, left.clone(), right.clone(), Direction::Inc) {
        (Direction::Inc, SpanAxis::Columns, left, right)
    } else {
        debug_assert!(spans(&mut uf, top.clone(), bottom.clone(), Direction::Dec));
        (Direction::Dec, SpanAxis::Rows, top, bottom)
    };
    let cells = shortest_path(coloring, color, &from, &to).expect("the winning colour connects its sides");
    SpanningPath { cells, color, axis }
}

/// BFS inside one colour class from any source to any target.
fn shortest_path(coloring: &HexColoring, color: Direction, from: &[Cell], to: &[Cell]) -> Option<Vec<Cell>> {
    let targets: BTreeSet<Cell> = to.iter().copied().collect();
    let mut prev: BTreeMap<Cell, Option<Cell>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &s in from.iter().filter(|&&c| coloring.at(c) == color) {
        prev.insert(s, None);
        queue.push_back(s);
    }
    while let Some(c) = queue.pop_front() {
        if targets.contains(&c) {
            let mut path = vec![c];
            let mut cur = c;
            while let Some(Some(p)) = prev.get(&cur) {
                path.push(*p);
                cur = *p;
            }
            path.reverse();
            return Some(path);
        }
        for d in coloring.neighbours(c) {
            if coloring.at(d) == color && !prev.contains_key(&d) {
                prev.insert(d, Some(c));
                queue.push_back(d);
            }
        }
    }
    None
}

/// A path of adjacent cells of one colour.
pub fn verify_monochromatic_path(coloring: &HexColoring, path: &[Cell]) -> Result<(), String> {
    let Some(&first) = path.first() else {
        return Err("empty path".into());
    };
    let color = coloring.get(first).ok_or("first cell is off the grid")?;
    for w in path.windows(2) {
        if h_edge_kind(w[0], w[1]).is_none() {
            return Err(format!("{:?} and {:?} are not adjacent", w[0], w[1]));
        }
    }
    if let Some(c) = path.iter().find(|&&c| coloring.get(c) != Some(color)) {
        return Err(format!("cell {c:?} has the wrong colour"));
    }
    if path.iter().collect::<BTreeSet<_>>().len() != path.len() {
        return Err("path repeats a cell".into());
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PreservationReport {
    pub boundaries_checked: usize,
    pub components_checked: usize,
    pub violations: Vec<String>,
}

impl PreservationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Boundaries of board `k` restricted to rows of board `k+1` stay
/// boundaries there; components of board `k` stay monochromatic on board
/// `k-1`. Cells are reported in absolute rows.
pub fn boundary_preservation_check(z: &ZTable) -> PreservationReport {
    let n = z.height();
    let mut report = PreservationReport::default();
    for k in 1..=n {
        let board = HexColoring::board(z, k).expect("nonempty board");
        let shift = k as i32 - 1;
        if k < n {
            let deeper = |c: Cell| {
                (c.0 > k as i32 && c.0 <= n as i32 && c.1 >= 1 && c.1 <= z.path_len() as i32)
                    .then(|| z.get(k + 1, c.0 as usize, c.1 as u32))
            };
            for line in decompose_boundaries(&board) {
                let a: Vec<Cell> = line.a.iter().map(|&(i, j)| (i + shift, j)).collect();
                let b: Vec<Cell> = line.b.iter().map(|&(i, j)| (i + shift, j)).collect();
                // Maximal runs of pairs whose cells all survive on board k+1.
                let mut t = 0;
                while t < a.len() {
                    if deeper(a[t]).is_none() || deeper(b[t]).is_none() {
                        t += 1;
                        continue;
                    }
                    let start = t;
                    while t < a.len() && deeper(a[t]).is_some() && deeper(b[t]).is_some() {
                        t += 1;
                    }
                    let run = BoundaryLine {
                        vertices: Vec::new(),
                        a: a[start..t].to_vec(),
                        b: b[start..t].to_vec(),
                        a_color: line.a_color,
                        cycle: false,
                    };
                    report.boundaries_checked += 1;
                    if let Err(e) = verify_boundary(&run, deeper) {
                        report.violations.push(format!(
                            "boundary A={:?} B={:?} of board {k} fails on board {}: {e}",
                            run.a,
                            run.b,
                            k + 1
                        ));
                    }
                }
            }
        }
        if k > 1 {
            let mut uf = board.components();
            let mut groups: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
            for idx in 0..board.n * board.m {
                groups.entry(uf.find_mut(idx)).or_default().push(board.cell_of(idx));
            }
            for cells in groups.values() {
                report.components_checked += 1;
                let colours: BTreeSet<Direction> = cells
                    .iter()
                    .map(|&(i, j)| z.get(k - 1, (i + shift) as usize, j as u32))
                    .collect();
                if colours.len() > 1 {
                    let abs: Vec<Cell> = cells.iter().map(|&(i, j)| (i + shift, j)).collect();
                    report.violations.push(format!(
                        "component {abs:?} of board {k} is not monochromatic on board {}",
                        k - 1
                    ));
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CriticalPoint {
    pub vertex: DualVertex,
    /// Colour of cell `(i, j)`.
    pub base: Direction,
    /// Index into the line's vertices.
    pub index: usize,
}

/// Vertices of the line to keep after dropping a `+` endpoint that sits at
/// the minimum depth.
fn trimmed_range(line: &BoundaryLine) -> (usize, usize) {
    let v = &line.vertices;
    let (mut lo, mut hi) = (0, v.len());
    if line.cycle {
        return (lo, hi);
    }
    let min_depth = |lo: usize, hi: usize| v[lo..hi].iter().map(|x| x.i).min().unwrap();
    let d = min_depth(lo, hi);
    if hi - lo > 1 && v[lo].sign == Sign::Plus && v[lo].i == d {
        lo += 1;
    }
    if hi - lo > 1 && v[hi - 1].sign == Sign::Plus && v[hi - 1].i == d {
        hi -= 1;
    }
    (lo, hi)
}

/// `-` vertices of minimal depth (after trimming), with their bases.
pub fn critical_points(line: &BoundaryLine, coloring: &HexColoring) -> Vec<CriticalPoint> {
    if line.vertices.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = trimmed_range(line);
    let depth = line.vertices[lo..hi].iter().map(|x| x.i).min().unwrap();
    (lo..hi)
        .filter(|&t| {
            let v = line.vertices[t];
            v.i == depth && v.sign == Sign::Minus && coloring.contains((v.i, v.j))
        })
        .map(|t| {
            let v = line.vertices[t];
            CriticalPoint {
                vertex: v,
                base: coloring.at((v.i, v.j)),
                index: t,
            }
        })
        .collect()
}

/// `C_1 = 1`, `C_{k+1} = u (k+1) C_k` with `u = (k+1)(2 C_k + 5)`.
pub fn good_point_constant(k: u32) -> Option<u128> {
    let mut c: u128 = 1;
    for step in 1..k {
        let k1 = u128::from(step) + 1;
        let u = k1.checked_mul(c.checked_mul(2)?.checked_add(5)?)?;
        c = u.checked_mul(k1)?.checked_mul(c)?;
    }
    (k >= 1).then_some(c)
}

/// Boundary length guaranteeing `s+1` good points of one base: `C_{2s+1}`.
pub fn threshold(s: u32) -> Option<u128> {
    good_point_constant(2 * s + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodPoints {
    pub base: Direction,
    pub points: Vec<CriticalPoint>,
    /// Pair index `t` on the line (oriented with A of the base colour) of the
    /// vertical H-edge `((i, j), (i-1, j))` at each point.
    pub positions: Vec<usize>,
    /// The line with its A side coloured `base`.
    pub line: BoundaryLine,
}

/// Critical points X, Y are good when their bases differ or every critical
/// point between them has the base of X.
fn pairwise_good(crit: &[CriticalPoint], x: usize, y: usize) -> bool {
    let (p, q) = (x.min(y), x.max(y));
    crit[p].base != crit[q].base || crit[p..=q].iter().all(|c| c.base == crit[p].base)
}

/// Depth condition between every two chosen positions: walking along the
/// line, A cells never rise above the shallower endpoint.
pub fn verify_depth_condition(line: &BoundaryLine, positions: &[usize]) -> Result<(), String> {
    for (x, &p) in positions.iter().enumerate() {
        for &q in &positions[x + 1..] {
            let (lo, hi) = (p.min(q), p.max(q));
            let floor = line.a[lo].0.min(line.a[hi].0);
            if let Some(t) = (lo..=hi).find(|&t| line.a[t].0 < floor) {
                return Err(format!("a[{t}] = {:?} is above depth {floor}", line.a[t]));
            }
        }
    }
    Ok(())
}

/// `s+1` pairwise good critical points of one base whose vertical H-edges
/// lie on the line, verified literally. Fails with the threshold when the
/// line is shorter than it.
pub fn find_good_points(line: &BoundaryLine, coloring: &HexColoring, s: usize) -> Result<GoodPoints, HexError> {
    let want = s + 1;
    let crit = critical_points(line, coloring);
    for base in [Direction::Inc, Direction::Dec] {
        let oriented = if line.a_color == base {
            line.clone()
        } else {
            line.swapped()
        };
        // Runs of consecutive critical points sharing this base are exactly
        // the pairwise good same-base sets.
        let mut run: Vec<(usize, usize)> = Vec::new();
        for (ci, c) in crit.iter().enumerate() {
            if c.base != base {
                run.clear();
                continue;
            }
            let (i, j) = (c.vertex.i, c.vertex.j);
            let pos = (0..oriented.len()).find(|&t| oriented.a[t] == (i, j) && oriented.b[t] == (i - 1, j));
            if let Some(t) = pos {
                run.push((ci, t));
            }
            if run.len() == want {
                let idx: Vec<usize> = run.iter().map(|r| r.0).collect();
                let positions: Vec<usize> = run.iter().map(|r| r.1).collect();
                for (x, &p) in idx.iter().enumerate() {
                    for &q in &idx[x + 1..] {
                        if !pairwise_good(&crit, p, q) {
                            return Err(HexError::Inconsistent(format!(
                                "critical points {p} and {q} are not good"
                            )));
                        }
                    }
                }
                verify_depth_condition(&oriented, &positions).map_err(HexError::Inconsistent)?;
                return Ok(GoodPoints {
                    base,
                    points: idx.iter().map(|&k| crit[k]).collect(),
                    positions,
                    line: oriented,
                });
            }
        }
    }
    let threshold = threshold(s as u32);
    if threshold.map_or(true, |t| (line.len() as u128) <= t) {
        Err(HexError::TooShort {
            len: line.len(),
            want,
            threshold,
        })
    } else {
        Err(HexError::NotFound(format!(
            "{want} good critical points on a line of length {}",
            line.len()
        )))
    }
}

/// Columns `x` with `chi(1, x) != chi(1, x+1)`.
pub fn cut_points(coloring: &HexColoring) -> Vec<usize> {
    (1..coloring.m)
        .filter(|&x| coloring.at((1, x as i32)) != coloring.at((1, x as i32 + 1)))
        .collect()
}

/// Dual vertex where the boundary leaving cut point `x` starts.
pub fn cut_anchor(x: usize) -> DualVertex {
    DualVertex::plus(1, x as i32)
}

#[derive(Debug, Clone, Serialize)]
pub struct TopBoundary {
    pub x: usize,
    pub y: usize,
    pub line: BoundaryLine,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BoundaryForest {
    pub boundaries: Vec<TopBoundary>,
    /// Cut points whose boundary leaves through another side, with its end.
    pub flagged: Vec<(usize, DualVertex)>,
    /// `(outer, inner)` indices into `boundaries`.
    pub contains: Vec<(usize, usize)>,
    pub maximal: Vec<usize>,
    pub crossings: Vec<(usize, usize)>,
    /// Maximal boundaries whose next cut point does not open another
    /// maximal boundary.
    pub successor_violations: Vec<usize>,
}

impl BoundaryForest {
    /// Maximal boundaries `B(x_1,y_1), ..., B(x_r,y_r)` in column order where
    /// each `x_{i+1}` is the cut point right after `y_i`.
    pub fn maximal_chain(&self, cuts: &[usize]) -> Vec<usize> {
        let mut best: Vec<usize> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        for &k in &self.maximal {
            let b = &self.boundaries[k];
            let follows = cur
                .last()
                .is_some_and(|&p| cuts.iter().find(|&&c| c > self.boundaries[p].y) == Some(&b.x));
            if !follows {
                cur.clear();
            }
            cur.push(k);
            if cur.len() > best.len() {
                best = cur.clone();
            }
        }
        best
    }
}

/// Boundaries `B(x, y)` joining two top cut points, their containment
/// forest and maximal elements.
pub fn maximal_boundaries(coloring: &HexColoring) -> BoundaryForest {
    let cuts = cut_points(coloring);
    let mut forest = BoundaryForest::default();
    let mut seen = BTreeSet::new();
    for &x in &cuts {
        if seen.contains(&x) {
            continue;
        }
        let line = trace_boundary(coloring, cut_anchor(x)).expect("cut points lie on a boundary");
        let end = line.end();
        let top_end = (end.i == 1 && end.sign == Sign::Plus && end.j >= 1).then_some(end.j as usize);
        match top_end {
            Some(y) if y != x => {
                seen.insert(x);
                seen.insert(y);
                forest.boundaries.push(TopBoundary {
                    x: x.min(y),
                    y: x.max(y),
                    line,
                });
            }
            _ => {
                seen.insert(x);
                forest.flagged.push((x, end));
            }
        }
    }
    forest.boundaries.sort_by_key(|b| b.x);
    let bs = &forest.boundaries;
    for p in 0..bs.len() {
        for q in 0..bs.len() {
            let (o, i) = (&bs[p], &bs[q]);
            if o.x < i.x && i.y < o.y {
                forest.contains.push((p, q));
            }
            if o.x < i.x && i.x < o.y && o.y < i.y {
                forest.crossings.push((p, q));
            }
        }
    }
    forest.maximal = (0..bs.len())
        .filter(|&q| !forest.contains.iter().any(|&(_, i)| i == q))
        .collect();
    let flagged: BTreeSet<usize> = forest.flagged.iter().map(|f| f.0).collect();
    for &k in &forest.maximal {
        let Some(&a) = cuts.iter().find(|&&c| c > bs[k].y) else {
            continue;
        };
        if flagged.contains(&a) {
            continue;
        }
        let ok = bs
            .iter()
            .position(|b| b.x == a || b.y == a)
            .is_some_and(|q| bs[q].x == a && forest.maximal.contains(&q));
        if !ok {
            forest.successor_violations.push(k);
        }
    }
    forest
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TopOrLong {
    /// Top-row columns of one monochromatic component.
    TopCells {
        color: Direction,
        columns: Vec<usize>,
    },
    LongBoundary {
        line: BoundaryLine,
    },
}

/// Same component by BFS, independent of the union-find used to find it.
fn same_component(coloring: &HexColoring, cells: &[Cell]) -> bool {
    let Some(&first) = cells.first() else { return true };
    let color = coloring.at(first);
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(c) = queue.pop_front() {
        for d in coloring.neighbours(c) {
            if coloring.at(d) == color && seen.insert(d) {
                queue.push_back(d);
            }
        }
    }
    cells.iter().all(|c| seen.contains(c))
}

/// Re-verify either witness from scratch.
pub fn verify_top_or_long(coloring: &HexColoring, s: usize, big_s: usize, w: &TopOrLong) -> Result<(), String> {
    match w {
        TopOrLong::TopCells { color, columns } => {
            let cells: Vec<Cell> = columns.iter().map(|&x| (1, x as i32)).collect();
            if columns.iter().collect::<BTreeSet<_>>().len() != s + 1 || columns.len() != s + 1 {
                return Err(format!("{} distinct columns, {} needed", columns.len(), s + 1));
            }
            if cells.iter().any(|&c| coloring.get(c) != Some(*color)) {
                return Err("a top cell has the wrong colour".into());
            }
            if !same_component(coloring, &cells) {
                return Err("top cells lie in different components".into());
            }
            Ok(())
        }
        TopOrLong::LongBoundary { line } => {
            verify_boundary(line, |c| coloring.get(c))?;
            if line.len() < big_s {
                return Err(format!("boundary has length {} < {big_s}", line.len()));
            }
            Ok(())
        }
    }
}

/// Minimum `(rows, cols)` for [`top_or_long`]: depth `S`, width
/// `2M + 2S` with `M = (s+2) S`.
pub fn top_or_long_size(s: usize, big_s: usize) -> Option<(u128, u128)> {
    let big_s = big_s as u128;
    let m = (s as u128 + 2).checked_mul(big_s)?;
    Some((big_s, m.checked_mul(2)?.checked_add(big_s.checked_mul(2)?)?))
}

/// A boundary of length at least `S`, else `s+1` top cells in one
/// monochromatic component. The witness is re-verified before returning.
pub fn top_or_long(coloring: &HexColoring, s: usize, big_s: usize) -> Result<TopOrLong, HexError> {
    let (need_rows, need_cols) = top_or_long_size(s, big_s).unwrap_or((u128::MAX, u128::MAX));
    if (coloring.n as u128) < need_rows || (coloring.m as u128) < need_cols {
        return Err(HexError::Undersized {
            rows: coloring.n,
            cols: coloring.m,
            need_rows,
            need_cols,
        });
    }
    let witness = if let Some(line) = decompose_boundaries(coloring).into_iter().find(|l| l.len() >= big_s) {
        TopOrLong::LongBoundary { line }
    } else {
        let mut uf = coloring.components();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 1..=coloring.m {
            groups
                .entry(uf.find_mut(coloring.index((1, x as i32))))
                .or_default()
                .push(x);
        }
        let columns = groups
            .into_values()
            .find(|g| g.len() > s)
            .ok_or_else(|| HexError::NotFound(format!("no boundary of length {big_s} and no {} top cells", s + 1)))?;
        TopOrLong::TopCells {
            color: coloring.at((1, columns[0] as i32)),
            columns: columns[..=s].to_vec(),
        }
    };
    verify_top_or_long(coloring, s, big_s, &witness).map_err(HexError::Inconsistent)?;
    Ok(witness)
}
