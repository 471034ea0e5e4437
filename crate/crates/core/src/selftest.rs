//! Desk-scale self-checks: exhaustive hex colourings, small rainbow and
//! crossing placements, all permutations of five for Erdős–Szekeres, a
//! passes fixture, and seeded random sequence-lemma instances.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::graph::{boxslash_product, Graph, TreeSpec};
use crate::hex::{
    boundary_preservation_check, boundary_subgraph, check_dual_degrees, decompose_boundaries,
    monochromatic_spanning_path, verify_boundary, verify_monochromatic_path, HexColoring,
};
use crate::layout::{three_queue_layout, validate_stack_layout, EdgeColoring, LinearOrder};
use crate::passes::{check_z_consistency, es_monotone_subsequence, run_pipeline, ZTable};
use crate::seq::{
    chain_interleave, check_bundled, check_half_interleave, check_rainbow, derive_fan_fan_crossing, is_related,
    max_interleave, rainbow_interleave_transfer, strongly_interleave, sub_interleave, LayoutView, RelatedKind,
    SeqError,
};

/// Points on a line with one edge colouring; `seqs` are the sequences the
/// instance is about.
#[derive(Debug, Clone)]
pub struct SeqInstance {
    pub order: LinearOrder,
    pub graph: Graph,
    pub coloring: EdgeColoring,
    pub seqs: Vec<Vec<usize>>,
}

impl SeqInstance {
    pub fn view(&self) -> LayoutView<'_> {
        LayoutView::new(&self.graph, &self.order, &self.coloring)
    }

    /// Whether no two same-coloured edges cross.
    pub fn valid_page(&self) -> bool {
        validate_stack_layout(&self.graph, &self.order, &self.coloring)
            .map(|r| r.valid)
            .unwrap_or(false)
    }
}

/// Points placed by real keys; vertex ids are shuffled so they carry no
/// positional information.
struct Builder {
    keys: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            keys: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn points(&mut self, keys: &[f64]) -> Vec<usize> {
        keys.iter()
            .map(|&k| {
                self.keys.push(k);
                self.keys.len() - 1
            })
            .collect()
    }

    fn pair(&mut self, a: &[usize], b: &[usize]) {
        self.edges.extend(a.iter().copied().zip(b.iter().copied()));
    }

    /// `None` if two keys collide.
    fn build<R: Rng>(self, seqs: Vec<Vec<usize>>, rng: &mut R) -> Option<SeqInstance> {
        let n = self.keys.len();
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(rng);
        let mut by_key: Vec<usize> = (0..n).collect();
        by_key.sort_by(|&x, &y| self.keys[x].total_cmp(&self.keys[y]));
        if by_key.windows(2).any(|w| self.keys[w[0]] == self.keys[w[1]]) {
            return None;
        }
        let order = LinearOrder::from_sequence(by_key.iter().map(|&p| ids[p]).collect()).ok()?;
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (ids[u], ids[v])).collect();
        let graph = Graph::from_edges(n, &edges).ok()?;
        let coloring = EdgeColoring::uniform(graph.edge_count(), 0, 1).ok()?;
        let seqs = seqs
            .into_iter()
            .map(|s| s.into_iter().map(|p| ids[p]).collect())
            .collect();
        Some(SeqInstance {
            order,
            graph,
            coloring,
            seqs,
        })
    }
}

fn sorted_uniform<R: Rng>(rng: &mut R, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn maybe_flip<R: Rng>(rng: &mut R, keys: &mut [&mut Vec<f64>]) {
    if rng.gen_bool(0.5) {
        for v in keys.iter_mut() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// `a_i < b_i` for all `i`, or `b_i < a_i` for all `i`.
fn pointwise_ordered(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x < y) || a.iter().zip(b).all(|(x, y)| x > y)
}

fn retry<R: Rng>(rng: &mut R, mut f: impl FnMut(&mut R) -> Option<SeqInstance>) -> SeqInstance {
    loop {
        if let Some(inst) = f(rng) {
            return inst;
        }
    }
}

/// Same-direction related pair joined by one colour, length 1 to 7. Half
/// are built on a valid page, half placed at random.
pub fn gen_bundled<R: Rng>(rng: &mut R) -> SeqInstance {
    retry(rng, |rng| {
        let k = rng.gen_range(1..=7);
        let (mut a, mut b) = if rng.gen_bool(0.5) {
            let shift = if rng.gen_bool(0.5) { 0.5 } else { -0.5 };
            let a: Vec<f64> = (0..k).map(|j| j as f64).collect();
            let b = a.iter().map(|x| x + shift).collect();
            (a, b)
        } else {
            let a = sorted_uniform(rng, k, 0.0, 1.0);
            let b = sorted_uniform(rng, k, 0.0, 1.0);
            if !pointwise_ordered(&a, &b) {
                return None;
            }
            (a, b)
        };
        maybe_flip(rng, &mut [&mut a, &mut b]);
        let mut bld = Builder::new();
        let (pa, pb) = (bld.points(&a), bld.points(&b));
        bld.pair(&pa, &pb);
        bld.build(vec![pa, pb], rng)
    })
}

/// Opposite-direction related pair joined by one colour, length 1 to 7.
pub fn gen_rainbow<R: Rng>(rng: &mut R) -> SeqInstance {
    retry(rng, |rng| {
        let k = rng.gen_range(1..=7);
        let (mut a, mut b) = if rng.gen_bool(0.5) {
            let a = sorted_uniform(rng, k, 0.0, 1.0);
            let mut b = sorted_uniform(rng, k, 1.0, 2.0);
            b.reverse();
            (a, b)
        } else {
            let a = sorted_uniform(rng, k, 0.0, 1.0);
            let mut b = sorted_uniform(rng, k, 0.0, 1.0);
            b.reverse();
            if !pointwise_ordered(&a, &b) {
                return None;
            }
            (a, b)
        };
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        maybe_flip(rng, &mut [&mut a, &mut b]);
        let mut bld = Builder::new();
        let (pa, pb) = (bld.points(&a), bld.points(&b));
        bld.pair(&pa, &pb);
        bld.build(vec![pa, pb], rng)
    })
}

/// Keys of a sequence strongly interleaving `base`: one new point in each
/// gap after (or before) a base point.
fn interleaving_keys<R: Rng>(rng: &mut R, base: &[f64]) -> Vec<f64> {
    let after = rng.gen_bool(0.5);
    (0..base.len())
        .map(|j| {
            let u = rng.gen_range(0.05..0.95);
            if after {
                let next = base.get(j + 1).copied().unwrap_or(base[j] + 1.0);
                base[j] + u * (next - base[j])
            } else {
                let prev = if j == 0 { base[0] - 1.0 } else { base[j - 1] };
                base[j] - u * (base[j] - prev)
            }
        })
        .collect()
}

/// Strongly interleaving pair of length 1 to 7, no edges.
pub fn gen_strong_pair<R: Rng>(rng: &mut R) -> SeqInstance {
    retry(rng, |rng| {
        let k = rng.gen_range(1..=7);
        let mut a = sorted_uniform(rng, k, 0.0, 10.0);
        let mut b = interleaving_keys(rng, &a);
        maybe_flip(rng, &mut [&mut a, &mut b]);
        let mut bld = Builder::new();
        let (pa, pb) = (bld.points(&a), bld.points(&b));
        bld.build(vec![pa, pb], rng)
    })
}

/// `[a, b, c]`: `a, b` monotone in one direction at random positions and
/// `b, c` strongly interleaving; length 2 to 7.
pub fn gen_half<R: Rng>(rng: &mut R) -> SeqInstance {
    retry(rng, |rng| {
        let k = rng.gen_range(2..=7);
        let mut b = sorted_uniform(rng, k, 0.0, 10.0);
        let mut c = interleaving_keys(rng, &b);
        let mut a = sorted_uniform(rng, k, -1.0, 11.0);
        maybe_flip(rng, &mut [&mut a, &mut b, &mut c]);
        let mut bld = Builder::new();
        let (pa, pb, pc) = (bld.points(&a), bld.points(&b), bld.points(&c));
        bld.build(vec![pa, pb, pc], rng)
    })
}

/// Chain of 2 to 4 sequences of length 1 to 7, each strongly interleaving
/// the next.
pub fn gen_chain<R: Rng>(rng: &mut R) -> SeqInstance {
    retry(rng, |rng| {
        let links = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=7);
        let mut keys = vec![sorted_uniform(rng, k, 0.0, 10.0)];
        for _ in 0..links {
            let next = interleaving_keys(rng, keys.last().unwrap());
            keys.push(next);
        }
        if rng.gen_bool(0.5) {
            for v in &mut keys {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let mut bld = Builder::new();
        let seqs = keys.iter().map(|k| bld.points(k)).collect();
        bld.build(seqs, rng)
    })
}

/// `[a, b, c, d]` with `a, b` monotone in one direction and `(a, c)`,
/// `(b, d)` same-coloured rainbows on a valid page; length 2 to 7.
pub fn gen_transfer<R: Rng>(rng: &mut R) -> SeqInstance {
    retry(rng, |rng| {
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(2..=7);
            let mut a = sorted_uniform(rng, k, 0.0, 1.0);
            let mut b = sorted_uniform(rng, k, 0.0, 1.0);
            // Fully nested: partners mirror across 1.
            let mut c: Vec<f64> = a.iter().map(|x| 2.0 - x).collect();
            let mut d: Vec<f64> = b.iter().map(|x| 2.0 - x).collect();
            maybe_flip(rng, &mut [&mut a, &mut b, &mut c, &mut d]);
            let mut bld = Builder::new();
            let (pa, pb, pc, pd) = (bld.points(&a), bld.points(&b), bld.points(&c), bld.points(&d));
            bld.pair(&pa, &pc);
            bld.pair(&pb, &pd);
            bld.build(vec![pa, pb, pc, pd], rng)
        } else {
            let k = rng.gen_range(2..=4);
            let a = sorted_uniform(rng, k, 0.0, 1.0);
            let b = sorted_uniform(rng, k, 0.0, 1.0);
            let mut c = sorted_uniform(rng, k, 0.0, 1.0);
            let mut d = sorted_uniform(rng, k, 0.0, 1.0);
            c.reverse();
            d.reverse();
            if !pointwise_ordered(&a, &c) || !pointwise_ordered(&b, &d) {
                return None;
            }
            let mut bld = Builder::new();
            let (pa, pb, pc, pd) = (bld.points(&a), bld.points(&b), bld.points(&c), bld.points(&d));
            bld.pair(&pa, &pc);
            bld.pair(&pb, &pd);
            let inst = bld.build(vec![pa, pb, pc, pd], rng)?;
            inst.valid_page().then_some(inst)
        }
    })
}

/// Largest `t` with length-`t` subsequences of `a` and `b` forming one of
/// the four alternating chains, by trying every pair of subsequences.
pub fn brute_interleave(a: &[usize], b: &[usize], order: &LinearOrder) -> usize {
    fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == t)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }
    for t in (1..=a.len().min(b.len())).rev() {
        for sa in subsets(a.len(), t) {
            for sb in subsets(b.len(), t) {
                let x: Vec<usize> = sa.iter().map(|&i| a[i]).collect();
                let y: Vec<usize> = sb.iter().map(|&i| b[i]).collect();
                if strongly_interleave(&x, &y, order) {
                    return t;
                }
            }
        }
    }
    0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Inputs a caller may replace, e.g. with a corrupted table.
#[derive(Debug, Clone)]
pub struct Fixtures {
    pub z_table: ZTable,
    /// Random instances per sequence-lemma family.
    pub random_cases: usize,
}

impl Default for Fixtures {
    fn default() -> Self {
        let g = boxslash_product(&TreeSpec::new(vec![2, 2, 2]).unwrap(), 3).unwrap();
        let (o, c) = three_queue_layout(&g);
        let z = run_pipeline(&g, &o, &c, &[2, 2, 2], 0)
            .expect("layered fixture passes")
            .z;
        Fixtures {
            z_table: z,
            random_cases: 200,
        }
    }
}

fn small_colorings() -> impl Iterator<Item = HexColoring> {
    let sq3 = (0..1u64 << 9).map(|c| HexColoring::from_code(3, 3, c).unwrap());
    let sq2 = (0..1u64 << 4).map(|c| HexColoring::from_code(2, 2, c).unwrap());
    sq3.chain(sq2)
}

pub fn hex_lemma_suite(colorings: impl Iterator<Item = HexColoring>) -> SuiteResult {
    let mut r = SuiteResult::new("hex-lemma");
    for g in colorings {
        let p = monochromatic_spanning_path(&g);
        let side = g.rows().min(g.cols());
        let ok = verify_monochromatic_path(&g, &p.cells).is_ok() && p.len() >= side;
        r.check(ok, || format!("{g:?}: path of length {}", p.len()));
    }
    r
}

pub fn dual_degree_suite(colorings: impl Iterator<Item = HexColoring>) -> SuiteResult {
    let mut r = SuiteResult::new("dual-degree");
    for g in colorings {
        let sub = boundary_subgraph(&g);
        let lines = decompose_boundaries(&g);
        let covered: usize = lines.iter().map(|l| l.len()).sum();
        let verdict = check_dual_degrees(&g, &sub)
            .and_then(|_| lines.iter().try_for_each(|l| verify_boundary(l, |c| g.get(c))))
            .and_then(|_| {
                (covered == sub.edge_count())
                    .then_some(())
                    .ok_or_else(|| format!("walks cover {covered} of {} edges", sub.edge_count()))
            });
        r.check(verdict.is_ok(), || format!("{g:?}: {}", verdict.unwrap_err()));
    }
    r
}

/// Every placement of up to three pairs on six points: related pairs on a
/// valid page satisfy the bundled/rainbow conclusions, crossing ones are
/// reported as page violations; every fan-fan placement on six points with
/// both apexes gives a verified crossing.
pub fn rainbow_crossing_suite() -> SuiteResult {
    let mut r = SuiteResult::new("rainbow-crossing");
    for k in 1..=3usize {
        let n = 2 * k;
        for perm in permutations(n) {
            // Vertex v sits at rank perm[v]; a = 0..k, b = k..2k.
            let order = LinearOrder::from_ranks(perm.clone()).unwrap();
            let a: Vec<usize> = (0..k).collect();
            let b: Vec<usize> = (k..n).collect();
            let edges: Vec<(usize, usize)> = (0..k).map(|i| (a[i], b[i])).collect();
            let graph = Graph::from_edges(n, &edges).unwrap();
            let coloring = EdgeColoring::uniform(k, 0, 1).unwrap();
            let view = LayoutView::new(&graph, &order, &coloring);
            let valid = validate_stack_layout(&graph, &order, &coloring).unwrap().valid;
            let Ok(Some(rel)) = is_related(&a, &b, &view) else {
                continue;
            };
            match rel.kind {
                RelatedKind::Bundled => {
                    let res = check_bundled(&a, &b, &view);
                    let ok = if valid {
                        res.is_ok() && brute_interleave(&a, &b, &order) == k
                    } else {
                        matches!(res, Err(SeqError::PageViolation(_)))
                    };
                    r.check(ok, || format!("bundled {perm:?}: {res:?}"));
                }
                RelatedKind::Rainbow => {
                    let res = check_rainbow(&a, &b, &view);
                    let ok = if valid {
                        res.is_ok()
                    } else {
                        matches!(res, Err(SeqError::PageViolation(_)))
                    };
                    r.check(ok, || format!("rainbow {perm:?}: {res:?}"));
                }
            }
        }
    }
    // Fans a = {0, 1}, b = {2, 3}, apexes 4 and 5.
    for perm in permutations(6) {
        let order = LinearOrder::from_ranks(perm.clone()).unwrap();
        let graph = Graph::from_edges(6, &[(0, 4), (1, 4), (2, 5), (3, 5)]).unwrap();
        let coloring = EdgeColoring::uniform(4, 0, 1).unwrap();
        let view = LayoutView::new(&graph, &order, &coloring);
        let (mut a, mut b) = (vec![0, 1], vec![2, 3]);
        a.sort_by_key(|&v| order.rank(v));
        b.sort_by_key(|&v| order.rank(v));
        if max_interleave(&a, &b, &order) < 2 {
            continue;
        }
        let res = derive_fan_fan_crossing(&a, 4, &b, 5, &view);
        r.check(res.is_ok(), || format!("fan-fan {perm:?}: {res:?}"));
    }
    r
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap(n, &mut p, &mut out);
    out
}

fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k - 1 {
        heap(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
    heap(k - 1, p, out);
}

pub fn erdos_szekeres_suite() -> SuiteResult {
    let mut r = SuiteResult::new("erdos-szekeres");
    for perm in permutations(5) {
        let values: Vec<i64> = perm.iter().map(|&v| v as i64).collect();
        let res = es_monotone_subsequence(&values, 3);
        let ok = match &res {
            Ok(s) => {
                let inc = s.windows(2).all(|w| w[0] < w[1]);
                let dec = s.windows(2).all(|w| w[0] > w[1]);
                let mut it = values.iter();
                let sub = s.iter().all(|x| it.any(|y| y == x));
                s.len() >= 3 && (inc || dec) && sub
            }
            Err(_) => false,
        };
        r.check(ok, || format!("{values:?}: {res:?}"));
    }
    r
}

pub fn z_table_suite(z: &ZTable) -> SuiteResult {
    let mut r = SuiteResult::new("z-table");
    for v in check_z_consistency(z) {
        r.check(false, || {
            format!("rule ({}) fails at k={} i={} p={}", v.rule, v.k, v.i, v.p)
        });
    }
    let report = boundary_preservation_check(z);
    r.checked += report.boundaries_checked + report.components_checked;
    for v in report.violations.into_iter().take(20) {
        r.failures.push(v);
    }
    r.checked = r.checked.max(1);
    r
}

/// Seeded random instances of every sequence lemma, checked against
/// [`brute_interleave`].
pub fn sequence_lemma_suite(cases: usize, rng: &mut StdRng) -> SuiteResult {
    let mut r = SuiteResult::new("sequence-lemmas");
    for _ in 0..cases {
        let inst = gen_bundled(rng);
        let (a, b) = (&inst.seqs[0], &inst.seqs[1]);
        let res = check_bundled(a, b, &inst.view());
        let ok = if inst.valid_page() {
            res.is_ok() && brute_interleave(a, b, &inst.order) == a.len()
        } else {
            matches!(res, Err(SeqError::PageViolation(_)))
        };
        r.check(ok, || format!("bundled: {res:?}"));

        let inst = gen_rainbow(rng);
        let res = check_rainbow(&inst.seqs[0], &inst.seqs[1], &inst.view());
        let ok = if inst.valid_page() {
            res.is_ok()
        } else {
            matches!(res, Err(SeqError::PageViolation(_)))
        };
        r.check(ok, || format!("rainbow: {res:?}"));

        let inst = gen_strong_pair(rng);
        let (a, b) = (&inst.seqs[0], &inst.seqs[1]);
        let picks: Vec<usize> = (0..a.len()).filter(|_| rng.gen_bool(0.5)).collect();
        if !picks.is_empty() {
            let res = sub_interleave(a, b, &picks, &inst.order);
            let ok = matches!(&res, Ok((x, y)) if brute_interleave(x, y, &inst.order) == picks.len());
            r.check(ok, || format!("sub: {res:?}"));
        }

        let inst = gen_half(rng);
        let (a, b, c) = (&inst.seqs[0], &inst.seqs[1], &inst.seqs[2]);
        let res = check_half_interleave(a, b, c, &inst.order);
        let k = brute_interleave(a, b, &inst.order);
        let got = brute_interleave(a, c, &inst.order);
        r.check(res == Ok(got) && got >= crate::seq::half_bound(k), || {
            format!("half: {res:?} vs {got} from {k}")
        });

        let inst = gen_chain(rng);
        let res = chain_interleave(&inst.seqs, &inst.order);
        let n = inst.seqs.len() - 1;
        let got = brute_interleave(&inst.seqs[0], &inst.seqs[n], &inst.order);
        let k = inst.seqs[0].len();
        r.check(res == Ok(got) && got >= crate::seq::chain_bound(k, n), || {
            format!("chain: {res:?} vs {got}")
        });

        let inst = gen_transfer(rng);
        let s = &inst.seqs;
        let res = rainbow_interleave_transfer(&s[0], &s[1], &s[2], &s[3], &inst.view());
        let k = brute_interleave(&s[0], &s[1], &inst.order);
        let got = brute_interleave(&s[2], &s[3], &inst.order);
        r.check(res == Ok(got) && got + 2 >= k, || {
            format!("transfer: {res:?} vs {got} from {k}")
        });
    }
    r
}

pub fn hex_random_suite(cases: usize, rng: &mut StdRng) -> SuiteResult {
    let colorings: Vec<HexColoring> = (0..cases).map(|_| HexColoring::random(10, 10, rng).unwrap()).collect();
    let mut r = hex_lemma_suite(colorings.into_iter());
    r.name = "hex-lemma-random".into();
    r
}

pub fn run_selftest(seed: u64, fixtures: &Fixtures) -> SelftestReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let suites = vec![
        hex_lemma_suite(small_colorings()),
        dual_degree_suite(small_colorings()),
        rainbow_crossing_suite(),
        erdos_szekeres_suite(),
        z_table_suite(&fixtures.z_table),
        sequence_lemma_suite(fixtures.random_cases, &mut rng),
        hex_random_suite(fixtures.random_cases, &mut rng),
    ];
    SelftestReport { seed, suites }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Direction;

    #[test]
    fn default_fixtures_pass() {
        let report = run_selftest(
            3,
            &Fixtures {
                random_cases: 30,
                ..Fixtures::default()
            },
        );
        for s in &report.suites {
            assert!(s.passed(), "{}: {:?}", s.name, s.failures);
            assert!(s.checked > 0, "{}", s.name);
        }
    }

    #[test]
    fn corrupted_table_names_the_suite() {
        let mut fx = Fixtures {
            random_cases: 5,
            ..Fixtures::default()
        };
        fx.z_table.set(1, 3, 1, Direction::Dec);
        let report = run_selftest(1, &fx);
        let failed: Vec<&str> = report
            .suites
            .iter()
            .filter(|s| !s.passed())
            .map(|s| s.name.as_str())
            .collect();
        assert_eq!(failed, ["z-table"]);
    }

    #[test]
    fn same_seed_same_report() {
        let fx = Fixtures {
            random_cases: 10,
            ..Fixtures::default()
        };
        assert_eq!(run_selftest(9, &fx), run_selftest(9, &fx));
    }

    #[test]
    fn generators_meet_their_hypotheses() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let t = gen_transfer(&mut rng);
            assert!(t.valid_page());
            let s = gen_strong_pair(&mut rng);
            assert!(strongly_interleave(&s.seqs[0], &s.seqs[1], &s.order));
            let h = gen_half(&mut rng);
            assert!(strongly_interleave(&h.seqs[1], &h.seqs[2], &h.order));
        }
    }
}
