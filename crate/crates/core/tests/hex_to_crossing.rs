//! Hex witnesses turned into fans on one page: the crossing search must
//! always succeed, and the pair it returns is re-checked here.

use boxslash::graph::Graph;
use boxslash::hex::{decompose_boundaries, find_good_points, top_or_long, top_or_long_size, HexColoring, TopOrLong};
use boxslash::layout::{EdgeColoring, LinearOrder};
use boxslash::seq::{derive_fan_fan_crossing, CrossingPair, Direction, LayoutView};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Two fans whose leaves sit at the given columns, A just left of B at each
/// column, both read in the direction `d`. Returns the crossing found.
fn fans_at(columns: &[usize], d: Direction) -> (CrossingPair, Vec<usize>, Graph) {
    let k = columns.len();
    // Vertices: 0 and 1 are the apexes, then a_t = 2 + 2t, b_t = 3 + 2t.
    let mut keyed: Vec<(usize, usize)> = vec![(0, 0), (2 * columns.iter().max().unwrap() + 3, 1)];
    for (t, &x) in columns.iter().enumerate() {
        keyed.push((2 * x + 1, 2 + 2 * t));
        keyed.push((2 * x + 2, 3 + 2 * t));
    }
    keyed.sort();
    let mut pos = vec![0; 2 * k + 2];
    for (rank, &(_, v)) in keyed.iter().enumerate() {
        pos[v] = rank;
    }
    let mut a: Vec<usize> = (0..k).map(|t| 2 + 2 * t).collect();
    let mut b: Vec<usize> = (0..k).map(|t| 3 + 2 * t).collect();
    if d == Direction::Dec {
        a.reverse();
        b.reverse();
    }
    let edges: Vec<(usize, usize)> = a.iter().map(|&x| (x, 0)).chain(b.iter().map(|&y| (y, 1))).collect();
    let graph = Graph::from_edges(2 * k + 2, &edges).unwrap();
    let order = LinearOrder::from_ranks(pos.clone()).unwrap();
    let coloring = EdgeColoring::uniform(edges.len(), 0, 1).unwrap();
    let view = LayoutView::new(&graph, &order, &coloring);
    let pair = derive_fan_fan_crossing(&a, 0, &b, 1, &view).unwrap();
    (pair, pos, graph)
}

fn crosses(p: &CrossingPair, pos: &[usize], graph: &Graph) -> bool {
    let span = |(u, v): (usize, usize)| (pos[u].min(pos[v]), pos[u].max(pos[v]));
    let ((a, b), (c, d)) = (span(p.e1), span(p.e2));
    graph.edge_between(p.e1.0, p.e1.1).is_some()
        && graph.edge_between(p.e2.0, p.e2.1).is_some()
        && ((a < c && c < b && b < d) || (c < a && a < d && d < b))
}

#[test]
fn top_cells_give_crossing_fans() {
    let (rows, cols) = top_or_long_size(2, 4).unwrap();
    let (rows, cols) = (rows as usize, cols as usize);
    let mut seen = 0;
    // Constant boards, optionally with one corner flipped: every boundary is short.
    for base in [Direction::Inc, Direction::Dec] {
        for corner in [None, Some((1, 1)), Some((1, cols)), Some((rows, 1)), Some((rows, cols))] {
            let c = HexColoring::new(
                rows,
                cols,
                |i, j| if Some((i, j)) == corner { base.flip() } else { base },
            )
            .unwrap();
            let TopOrLong::TopCells { color, columns } = top_or_long(&c, 2, 4).unwrap() else {
                panic!("{corner:?} gave a long boundary");
            };
            let (pair, pos, graph) = fans_at(&columns, color);
            assert!(crosses(&pair, &pos, &graph), "{pair:?}");
            seen += 1;
        }
    }
    assert_eq!(seen, 10);
}

#[test]
fn good_points_give_crossing_fans() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut seen = 0;
    for _ in 0..300 {
        let c = HexColoring::random(5, 8, &mut rng).unwrap();
        for line in decompose_boundaries(&c) {
            let Ok(g) = find_good_points(&line, &c, 2) else {
                continue;
            };
            let columns: Vec<usize> = g.points.iter().map(|p| p.vertex.j.max(1) as usize).collect();
            let mut distinct = columns.clone();
            distinct.sort();
            distinct.dedup();
            let (pair, pos, graph) = fans_at(&distinct, g.base);
            assert!(crosses(&pair, &pos, &graph), "{pair:?}");
            seen += 1;
        }
    }
    assert!(seen > 0);
}
