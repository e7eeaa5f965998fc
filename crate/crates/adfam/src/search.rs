//! Clique and coloring engines over bit-row adjacency matrices.
//!
//! Everything here is deterministic: ties are broken by vertex index.

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`max_clique_exact`].
pub const EXACT_CLIQUE_LIMIT: usize = 128;
/// Largest vertex count accepted by [`color_exact`].
pub const EXACT_COLOR_LIMIT: usize = 16;

/// Symmetric, irreflexive adjacency stored as bit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Adjacency {
            n,
            rows: vec![vec![0; words]; n],
        }
    }

    /// Builds the graph with an edge `{i, j}` whenever `edge(i, j)` for `i < j`.
    pub fn from_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Adjacency::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.rows[i][j / 64] |= 1 << (j % 64);
        self.rows[j][i / 64] |= 1 << (i % 64);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Self {
        Adjacency::from_fn(self.n, |i, j| !self.has_edge(i, j))
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(k, &i)| vs[k + 1..].iter().all(|&j| self.has_edge(i, j)))
    }

    pub fn is_independent(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(k, &i)| vs[k + 1..].iter().all(|&j| !self.has_edge(i, j) && i != j))
    }

    /// True when `colors` is a proper coloring (adjacent vertices differ).
    pub fn is_proper_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.n
            && (0..self.n).all(|i| self.neighbors(i).all(|j| colors[i] != colors[j]))
    }

    fn row_mask(&self, i: usize) -> u128 {
        let word = |k: usize| u128::from(self.rows[i].get(k).copied().unwrap_or(0));
        word(0) | word(1) << 64
    }
}

/// Exact maximum clique by branch and bound with greedy-coloring bounds.
pub fn max_clique_exact(g: &Adjacency) -> Result<Vec<usize>> {
    if g.len() > EXACT_CLIQUE_LIMIT {
        return Err(Error::SizeLimit {
            size: g.len(),
            limit: EXACT_CLIQUE_LIMIT,
        });
    }
    if g.is_empty() {
        return Ok(Vec::new());
    }
    let adj: Vec<u128> = (0..g.len()).map(|i| g.row_mask(i)).collect();
    let all = if g.len() == 128 {
        u128::MAX
    } else {
        (1u128 << g.len()) - 1
    };
    let mut best = Vec::new();
    let mut current = Vec::new();
    expand(&adj, &mut current, all, &mut best);
    best.sort_unstable();
    Ok(best)
}

fn expand(adj: &[u128], current: &mut Vec<usize>, candidates: u128, best: &mut Vec<usize>) {
    let (order, bounds) = color_sort(adj, candidates);
    let mut remaining = candidates;
    for k in (0..order.len()).rev() {
        if current.len() + bounds[k] <= best.len() {
            return;
        }
        let v = order[k];
        current.push(v);
        let next = remaining & adj[v];
        if next == 0 {
            if current.len() > best.len() {
                *best = current.clone();
            }
        } else {
            expand(adj, current, next, best);
        }
        current.pop();
        remaining &= !(1u128 << v);
    }
}

/// Greedy sequential coloring of the candidate set; returns vertices in
/// nondecreasing color order together with their color numbers (1-based).
fn color_sort(adj: &[u128], candidates: u128) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::new();
    let mut bounds = Vec::new();
    let mut uncolored = candidates;
    let mut color = 0;
    while uncolored != 0 {
        color += 1;
        let mut open = uncolored;
        while open != 0 {
            let v = open.trailing_zeros() as usize;
            open &= !(1u128 << v) & !adj[v];
            uncolored &= !(1u128 << v);
            order.push(v);
            bounds.push(color);
        }
    }
    (order, bounds)
}

/// Greedy clique: vertices by decreasing degree, index tie-break.
pub fn max_clique_greedy(g: &Adjacency) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut clique: Vec<usize> = Vec::new();
    for v in order {
        if clique.iter().all(|&u| g.has_edge(u, v)) {
            clique.push(v);
        }
    }
    clique.sort_unstable();
    clique
}

/// DSATUR coloring: saturation degree, then degree, then index.
pub fn color_dsatur(g: &Adjacency) -> Vec<usize> {
    let n = g.len();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut saturation = vec![0usize; n];
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v].is_none())
            .max_by_key(|&v| (saturation[v], degrees[v], std::cmp::Reverse(v)))
            .expect("an uncolored vertex remains");
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).unwrap();
        colors[v] = Some(c);
        for u in g.neighbors(v) {
            let s = &mut seen[u];
            if s.len() <= c {
                s.resize(c + 1, false);
            }
            if !s[c] {
                s[c] = true;
                saturation[u] += 1;
            }
        }
    }
    colors.into_iter().map(Option::unwrap).collect()
}

/// Minimum proper coloring by backtracking over increasing color counts.
pub fn color_exact(g: &Adjacency) -> Result<Vec<usize>> {
    let n = g.len();
    if n > EXACT_COLOR_LIMIT {
        return Err(Error::SizeLimit {
            size: n,
            limit: EXACT_COLOR_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let greedy = color_dsatur(g);
    let upper = greedy.iter().max().map_or(0, |c| c + 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    for k in 1..upper {
        let mut colors = vec![usize::MAX; n];
        if try_color(g, &order, 0, k, &mut colors) {
            return Ok(colors);
        }
    }
    Ok(greedy)
}

fn try_color(g: &Adjacency, order: &[usize], at: usize, k: usize, colors: &mut [usize]) -> bool {
    let Some(&v) = order.get(at) else {
        return true;
    };
    // Symmetry break: never open more than one new color at a time.
    let used = order[..at].iter().map(|&u| colors[u] + 1).max().unwrap_or(0);
    for c in 0..k.min(used + 1) {
        if g.neighbors(v).all(|u| colors[u] != c) {
            colors[v] = c;
            if try_color(g, order, at + 1, k, colors) {
                return true;
            }
            colors[v] = usize::MAX;
        }
    }
    false
}

/// Groups vertex indices by color, classes ordered by color number.
pub fn classes(colors: &[usize]) -> Vec<Vec<usize>> {
    let count = colors.iter().max().map_or(0, |c| c + 1);
    let mut out = vec![Vec::new(); count];
    for (v, &c) in colors.iter().enumerate() {
        out[c].push(v);
    }
    out.retain(|c| !c.is_empty());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_clique(g: &Adjacency) -> usize {
        let n = g.len();
        (0u32..1 << n)
            .filter(|mask| {
                let vs: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                g.is_clique(&vs)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn complete_and_edgeless() {
        let k5 = Adjacency::from_fn(5, |_, _| true);
        assert_eq!(max_clique_exact(&k5).unwrap(), vec![0, 1, 2, 3, 4]);
        let e5 = Adjacency::empty(5);
        assert_eq!(max_clique_exact(&e5).unwrap().len(), 1);
        assert_eq!(color_exact(&k5).unwrap().iter().max(), Some(&4));
        assert_eq!(color_exact(&e5).unwrap(), vec![0; 5]);
    }

    #[test]
    fn cycle_needs_three_colors() {
        let c5 = Adjacency::from_fn(5, |i, j| j == i + 1 || (i == 0 && j == 4));
        let colors = color_exact(&c5).unwrap();
        assert!(c5.is_proper_coloring(&colors));
        assert_eq!(colors.iter().max(), Some(&2));
        assert_eq!(brute_clique(&c5), 2);
    }
}
