//! Colouring of small conflict graphs (edges of a layout that may not share
//! a page). DSATUR ordering drives both the greedy bound and the exact
//! backtracking search.

#[derive(Debug, Clone)]
pub struct ConflictGraph {
    adj: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn new(n: usize) -> Self {
        ConflictGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn add(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Connected components, each sorted, in order of smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &self.adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `members`, relabelled `0..members.len()`.
    pub fn induced(&self, members: &[usize]) -> ConflictGraph {
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in members.iter().enumerate() {
            local[v] = i;
        }
        let mut g = ConflictGraph::new(members.len());
        for (i, &v) in members.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = local[w];
                if j != usize::MAX && i < j {
                    g.add(i, j);
                }
            }
        }
        g
    }

    /// DSATUR greedy colouring.
    pub fn greedy(&self) -> Vec<usize> {
        let n = self.len();
        let mut color = vec![usize::MAX; n];
        for _ in 0..n {
            let v = self.pick(&color);
            let used: Vec<bool> = {
                let mut u = vec![false; n + 1];
                for &w in &self.adj[v] {
                    if color[w] != usize::MAX {
                        u[color[w]] = true;
                    }
                }
                u
            };
            color[v] = used.iter().position(|&b| !b).unwrap();
        }
        color
    }

    /// Uncoloured vertex of maximum saturation, ties by degree then index.
    fn pick(&self, color: &[usize]) -> usize {
        let mut best = None;
        let mut best_key = (0usize, 0usize);
        for v in 0..self.len() {
            if color[v] != usize::MAX {
                continue;
            }
            let mut seen: Vec<usize> = self.adj[v]
                .iter()
                .filter(|&&w| color[w] != usize::MAX)
                .map(|&w| color[w])
                .collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), self.adj[v].len());
            if best.is_none() || key > best_key {
                best = Some(v);
                best_key = key;
            }
        }
        best.expect("an uncoloured vertex remains")
    }

    /// A proper colouring with at most `k` colours, if one exists.
    pub fn color_with(&self, k: usize) -> Option<Vec<usize>> {
        let n = self.len();
        if n == 0 {
            return Some(Vec::new());
        }
        if k == 0 {
            return None;
        }
        let mut color = vec![usize::MAX; n];
        if self.backtrack(&mut color, n, k, 0) {
            Some(color)
        } else {
            None
        }
    }

    fn backtrack(&self, color: &mut [usize], left: usize, k: usize, used: usize) -> bool {
        if left == 0 {
            return true;
        }
        let v = self.pick(color);
        let mut blocked = vec![false; k];
        for &w in &self.adj[v] {
            if color[w] != usize::MAX {
                blocked[color[w]] = true;
            }
        }
        // Colours above `used` are interchangeable, so only the first is tried.
        for c in 0..k.min(used + 1) {
            if blocked[c] {
                continue;
            }
            color[v] = c;
            if self.backtrack(color, left - 1, k, used.max(c + 1)) {
                return true;
            }
        }
        color[v] = usize::MAX;
        false
    }

    /// Chromatic number with an optimal colouring.
    pub fn chromatic(&self) -> (usize, Vec<usize>) {
        if self.is_empty() {
            return (0, Vec::new());
        }
        let greedy = self.greedy();
        let mut best = greedy.iter().max().unwrap() + 1;
        let mut witness = greedy;
        while best > 1 {
            match self.color_with(best - 1) {
                Some(c) => {
                    best -= 1;
                    witness = c;
                }
                None => break,
            }
        }
        (best, witness)
    }
}

pub fn is_proper(g: &ConflictGraph, color: &[usize]) -> bool {
    (0..g.len()).all(|v| g.neighbours(v).iter().all(|&w| color[v] != color[w]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd_cycle(n: usize) -> ConflictGraph {
        let mut g = ConflictGraph::new(n);
        for i in 0..n {
            g.add(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn chromatic_small_graphs() {
        assert_eq!(odd_cycle(5).chromatic().0, 3);
        assert_eq!(odd_cycle(6).chromatic().0, 2);
        let mut k4 = ConflictGraph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add(u, v);
            }
        }
        let (k, c) = k4.chromatic();
        assert_eq!(k, 4);
        assert!(is_proper(&k4, &c));
        assert_eq!(ConflictGraph::new(3).chromatic().0, 1);
    }

    #[test]
    fn components_are_disjoint() {
        let mut g = ConflictGraph::new(5);
        g.add(0, 3);
        g.add(1, 4);
        assert_eq!(g.components(), vec![vec![0, 3], vec![1, 4], vec![2]]);
    }
}
