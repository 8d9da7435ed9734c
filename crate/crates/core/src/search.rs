//! Clique searches over small undirected graphs given as adjacency matrices.

/// Symmetric adjacency matrix without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    rows: Vec<Vec<bool>>,
}

impl Adjacency {
    pub fn new(n: usize) -> Self {
        Adjacency {
            rows: vec![vec![false; n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn connect(&mut self, u: usize, v: usize) {
        if u != v {
            self.rows[u][v] = true;
            self.rows[v][u] = true;
        }
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u][v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].iter().filter(|&&b| b).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|u| {
                (u + 1..n)
                    .filter(move |&v| self.rows[u][v])
                    .map(move |v| (u, v))
            })
            .collect()
    }

    /// Vertices in degeneracy order: repeatedly remove a vertex of minimum
    /// remaining degree (lowest index on ties).
    pub fn degeneracy_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut removed = vec![false; n];
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (deg[v], v))
                .unwrap();
            removed[v] = true;
            order.push(v);
            for u in 0..n {
                if self.rows[v][u] && !removed[u] {
                    deg[u] -= 1;
                }
            }
        }
        order
    }
}

/// Clique number by branch and bound over candidates taken in reverse
/// degeneracy order.
pub fn clique_number(adj: &Adjacency) -> usize {
    let mut order = adj.degeneracy_order();
    order.reverse();
    let mut best = Vec::new();
    expand(adj, &mut Vec::new(), order, &mut best);
    best.len()
}

/// The lexicographically first maximum clique, sorted.
pub fn max_clique(adj: &Adjacency) -> Vec<usize> {
    let size = clique_number(adj);
    find_clique(adj, size, |c| Some(c.to_vec())).unwrap_or_default()
}

fn expand(
    adj: &Adjacency,
    current: &mut Vec<usize>,
    candidates: Vec<usize>,
    best: &mut Vec<usize>,
) {
    if candidates.is_empty() {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    for i in 0..candidates.len() {
        if current.len() + candidates.len() - i <= best.len() {
            return;
        }
        let v = candidates[i];
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&u| adj.adjacent(v, u))
            .collect();
        current.push(v);
        expand(adj, current, next, best);
        current.pop();
    }
}

/// Visits the cliques of exactly `size` vertices in lexicographic order
/// of their sorted vertex lists, stopping at the first one for which
/// `visit` returns `Some`.
pub fn find_clique<T>(
    adj: &Adjacency,
    size: usize,
    mut visit: impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    fn go<T>(
        adj: &Adjacency,
        size: usize,
        start: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> Option<T>,
    ) -> Option<T> {
        if current.len() == size {
            return visit(current);
        }
        let n = adj.len();
        let remaining = size - current.len();
        for v in start..n {
            if n - v < remaining {
                break;
            }
            if current.iter().all(|&u| adj.adjacent(u, v)) {
                current.push(v);
                let found = go(adj, size, v + 1, current, visit);
                current.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
    if size == 0 {
        return visit(&[]);
    }
    go(adj, size, 0, &mut Vec::new(), &mut visit)
}

/// Largest `n` for which some `n`-clique passes `test`, starting from
/// `n = 2`. Passing is monotone under taking subsets, so the search stops
/// at the first size with no passing clique. Returns the size, the first
/// passing clique of that size and the value `test` produced for it.
pub fn largest_passing_clique<T>(
    adj: &Adjacency,
    mut test: impl FnMut(&[usize]) -> Option<T>,
) -> Option<(usize, Vec<usize>, T)> {
    let mut best = None;
    for size in 2..=adj.len() {
        let found = find_clique(adj, size, |c| test(c).map(|t| (c.to_vec(), t)));
        match found {
            Some((clique, t)) => best = Some((size, clique, t)),
            None => break,
        }
    }
    best
}
