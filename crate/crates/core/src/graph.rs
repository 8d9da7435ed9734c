//! Stallings core graphs of finitely generated subgroups of free groups.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fold::{bfs_labels, canonical_bfs, Folder, Transitions};
use crate::word::{Alphabet, GeneratorPermutation, Letter, Word};

/// A vertex of a core graph, or the verdict that a coset lies outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CosetLocation {
    Vertex { vertex: usize, label: Word },
    Outside,
}

/// Folded core graph with basepoint `0`.
///
/// Graphs produced by [`CoreGraph::build`] number their vertices in
/// breadth-first shortlex discovery order from the basepoint, so two such
/// graphs of the same subgroup compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoreGraph {
    alphabet: Alphabet,
    trans: Transitions,
    labels: Vec<Word>,
}

/// A positively oriented edge `source --x_gen--> target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub gen: usize,
}

impl CoreGraph {
    pub const BASE: usize = 0;

    /// Folds a bouquet of the generators and strips hanging trees.
    pub fn build(alphabet: Alphabet, generators: &[Word]) -> Result<Self> {
        generators.iter().try_for_each(|g| alphabet.check(g))?;
        let mut folder = Folder::new(alphabet.rank());
        let base = folder.add_vertex();
        for g in generators {
            folder.add_path(base, g, base);
        }
        let (trans, _) = folder.finish(base, &[], true);
        Ok(Self::from_canonical(alphabet, trans))
    }

    pub(crate) fn from_canonical(alphabet: Alphabet, trans: Transitions) -> Self {
        let labels = bfs_labels(&trans);
        CoreGraph {
            alphabet,
            trans,
            labels,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn rank_of_alphabet(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn vertex_count(&self) -> usize {
        self.trans.len()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (v, row) in self.trans.iter().enumerate() {
            for (key, t) in row.iter().enumerate() {
                let letter = Letter::from_key(key);
                if let (Some(t), false) = (t, letter.is_inverse()) {
                    out.push(Edge {
                        source: v,
                        target: *t,
                        gen: letter.index(),
                    });
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.trans.iter().flatten().filter(|t| t.is_some()).count() / 2
    }

    /// Rank of the subgroup, `E - V + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn is_trivial(&self) -> bool {
        self.edge_count() == 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.trans[v].iter().filter(|t| t.is_some()).count()
    }

    pub fn step(&self, v: usize, letter: Letter) -> Option<usize> {
        self.trans[v].get(letter.key()).copied().flatten()
    }

    /// Shortlex-minimal label of a path from the basepoint to `v`.
    pub fn label(&self, v: usize) -> &Word {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Word] {
        &self.labels
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return Err(Error::BadVertex {
                vertex: v,
                count: self.vertex_count(),
            });
        }
        Ok(())
    }

    /// Reads `word` from vertex `from`; `None` once the walk leaves the graph.
    pub fn read_from(&self, from: usize, word: &Word) -> Option<usize> {
        word.letters()
            .iter()
            .try_fold(from, |v, &l| self.step(v, l))
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.read_from(Self::BASE, word) == Some(Self::BASE)
    }

    /// The vertex reached by reading `word` from the basepoint, with its
    /// shortlex label `a`, so that `H * word = H * a`.
    pub fn locate_coset(&self, word: &Word) -> CosetLocation {
        match self.read_from(Self::BASE, word) {
            Some(v) => CosetLocation::Vertex {
                vertex: v,
                label: self.labels[v].clone(),
            },
            None => CosetLocation::Outside,
        }
    }

    /// Core of `φ^k(H)`: every edge label `i` becomes `σ^k(i)`. Vertex ids
    /// are kept, so vertex `q` here is the image of vertex `q` of `self`.
    pub fn twisted(&self, perm: &GeneratorPermutation, k: i64) -> Result<Self> {
        if perm.rank() != self.alphabet.rank() {
            return Err(Error::RankMismatch {
                left: perm.rank(),
                right: self.alphabet.rank(),
            });
        }
        let k = perm.normalize(k) as i64;
        let trans: Transitions = self
            .trans
            .iter()
            .map(|row| {
                let mut out = vec![None; row.len()];
                for (key, t) in row.iter().enumerate() {
                    let l = Letter::from_key(key);
                    out[Letter::new(perm.apply(k, l.index()), l.is_inverse()).key()] = *t;
                }
                out
            })
            .collect();
        Ok(Self::from_canonical(self.alphabet, trans))
    }

    /// Renumbers vertices breadth-first in shortlex order from the basepoint.
    pub fn canonical(&self) -> Self {
        let (trans, _) = canonical_bfs(&self.trans, Self::BASE);
        Self::from_canonical(self.alphabet, trans)
    }

    /// Generators of the subgroup read off a breadth-first spanning tree:
    /// one per non-tree edge.
    pub fn basis(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for e in self.edges() {
            let letter = Letter::gen(e.gen);
            let via_edge = self.labels[e.source].multiply(&Word::letter(letter));
            if via_edge != self.labels[e.target] {
                out.push(via_edge.multiply(&self.labels[e.target].invert()));
            }
        }
        out
    }

    /// DOT rendering: basepoint double-circled, one edge per positive letter.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {name} {{").unwrap();
        writeln!(out, "  node [shape=circle];").unwrap();
        for v in 0..self.vertex_count() {
            let shape = if v == Self::BASE {
                " [shape=doublecircle]"
            } else {
                ""
            };
            writeln!(out, "  {v}{shape};").unwrap();
        }
        for e in self.edges() {
            writeln!(
                out,
                "  {} -> {} [label=\"x{}\"];",
                e.source, e.target, e.gen
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}
