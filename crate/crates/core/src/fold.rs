//! Stallings folding over a union-find of vertices.

use std::collections::VecDeque;

use crate::word::{Letter, Word};

/// Transition table of a folded labeled graph: `trans[v][key]` is the
/// target of the `Letter::from_key(key)` edge leaving `v`.
pub(crate) type Transitions = Vec<Vec<Option<usize>>>;

/// Incrementally folded graph. Every edge is stored as two half-edges
/// (`x` one way, `X` the other); inserting a half-edge whose label is
/// already used at its source merges the two targets.
pub(crate) struct Folder {
    letters: usize,
    parent: Vec<usize>,
    trans: Transitions,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    pub fn new(rank: usize) -> Self {
        Folder {
            letters: 2 * rank,
            parent: Vec::new(),
            trans: Vec::new(),
            pending: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.trans.push(vec![None; self.letters]);
        v
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn add_half(&mut self, u: usize, key: usize, v: usize) {
        let u = self.find(u);
        match self.trans[u][key] {
            Some(w) => {
                let (w, v) = (self.find(w), self.find(v));
                if w != v {
                    self.pending.push((w, v));
                }
            }
            None => self.trans[u][key] = Some(v),
        }
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            self.parent[b] = a;
            let moved = std::mem::take(&mut self.trans[b]);
            for (key, target) in moved.into_iter().enumerate() {
                if let Some(t) = target {
                    self.add_half(a, key, t);
                }
            }
        }
    }

    pub fn add_edge(&mut self, u: usize, letter: Letter, v: usize) {
        self.add_half(u, letter.key(), v);
        self.add_half(v, letter.inverse().key(), u);
        self.settle();
    }

    pub fn identify(&mut self, u: usize, v: usize) {
        self.pending.push((u, v));
        self.settle();
    }

    /// Attaches a path spelling `word` from `from` to `to`.
    pub fn add_path(&mut self, from: usize, word: &Word, to: usize) {
        let letters = word.letters();
        if letters.is_empty() {
            self.identify(from, to);
            return;
        }
        let mut cur = from;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                to
            } else {
                self.add_vertex()
            };
            self.add_edge(cur, l, next);
            cur = next;
        }
    }

    /// Resolves the union-find into a table indexed by representative
    /// vertices. Entries of non-representatives are left empty.
    fn resolved(&mut self) -> Transitions {
        let n = self.parent.len();
        let mut out = vec![vec![None; self.letters]; n];
        for v in 0..n {
            if self.find(v) != v {
                continue;
            }
            for key in 0..self.letters {
                if let Some(t) = self.trans[v][key] {
                    out[v][key] = Some(self.find(t));
                }
            }
        }
        out
    }

    /// Finishes folding: optionally strips hanging trees (never removing a
    /// vertex in `keep`) and renumbers vertices breadth-first from `root`,
    /// expanding letters in shortlex order. Returns the table and the new
    /// ids of the `keep` vertices.
    pub fn finish(mut self, root: usize, keep: &[usize], prune: bool) -> (Transitions, Vec<usize>) {
        let root = self.find(root);
        let keep: Vec<usize> = keep.iter().map(|&v| self.find(v)).collect();
        let mut trans = self.resolved();
        if prune {
            prune_hanging(&mut trans, root, &keep);
        }
        let (trans, new_id) = canonical_bfs(&trans, root);
        let keep = keep
            .iter()
            .map(|&v| new_id[v].expect("kept vertex is reachable"))
            .collect();
        (trans, keep)
    }
}

fn degree(row: &[Option<usize>]) -> usize {
    row.iter().filter(|t| t.is_some()).count()
}

fn prune_hanging(trans: &mut Transitions, root: usize, keep: &[usize]) {
    let protected = |v: usize| v == root || keep.contains(&v);
    let mut queue: VecDeque<usize> = (0..trans.len())
        .filter(|&v| !protected(v) && degree(&trans[v]) == 1)
        .collect();
    while let Some(v) = queue.pop_front() {
        if degree(&trans[v]) != 1 {
            continue;
        }
        let key = trans[v].iter().position(|t| t.is_some()).unwrap();
        let u = trans[v][key].take().unwrap();
        trans[u][key ^ 1] = None;
        if !protected(u) && degree(&trans[u]) == 1 {
            queue.push_back(u);
        }
    }
}

/// Breadth-first renumbering from `root` with shortlex letter order.
/// Unreachable vertices are dropped.
pub(crate) fn canonical_bfs(trans: &Transitions, root: usize) -> (Transitions, Vec<Option<usize>>) {
    let mut new_id = vec![None; trans.len()];
    let mut order = vec![root];
    new_id[root] = Some(0);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for t in trans[v].iter().flatten() {
            if new_id[*t].is_none() {
                new_id[*t] = Some(order.len());
                order.push(*t);
            }
        }
    }
    let out = order
        .iter()
        .map(|&v| {
            trans[v]
                .iter()
                .map(|t| t.map(|t| new_id[t].unwrap()))
                .collect()
        })
        .collect();
    (out, new_id)
}

/// Shortlex-minimal labels of paths from vertex 0, for a table already in
/// canonical breadth-first order.
pub(crate) fn bfs_labels(trans: &Transitions) -> Vec<Word> {
    let mut labels: Vec<Option<Word>> = vec![None; trans.len()];
    if trans.is_empty() {
        return Vec::new();
    }
    labels[0] = Some(Word::identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let base = labels[v].clone().unwrap();
        for (key, t) in trans[v].iter().enumerate() {
            if let Some(t) = *t {
                if labels[t].is_none() {
                    let mut w = base.letters().to_vec();
                    w.push(Letter::from_key(key));
                    labels[t] = Some(Word::reduced(w));
                    queue.push_back(t);
                }
            }
        }
    }
    labels
        .into_iter()
        .map(|l| l.expect("graph is connected"))
        .collect()
}
