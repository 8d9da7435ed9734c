//! Fiber products of core graphs.
//!
//! A vertex of the n-fold product is a tuple of vertices, one per factor,
//! and an `x_i` edge joins two tuples whenever every factor has the
//! matching `x_i` edge. The fundamental group of the component of
//! `(q_1, .., q_n)` is the intersection of the conjugates `b_j^-1 H_j b_j`,
//! where `b_j` labels a path from the basepoint of factor `j` to `q_j`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::CoreGraph;
use crate::word::{Letter, Word};

/// One connected component of a fiber product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackComponent {
    pub arity: usize,
    /// Vertex tuples of the component, sorted.
    pub tuples: Vec<Vec<usize>>,
    pub edge_count: usize,
    pub rank: usize,
    pub rep_tuple: Vec<usize>,
    /// For two factors `A`, `B` with `rep_tuple = (p, q)`: `d = a_p b_q^-1`,
    /// so that the component realizes `A ∩ d B d^-1`.
    pub double_coset_rep: Option<Word>,
    /// A nontrivial closed path at `rep_tuple`, present iff the component
    /// is not a tree.
    pub witness: Option<Word>,
}

impl PullbackComponent {
    pub fn is_tree(&self) -> bool {
        self.rank == 0
    }

    pub fn vertex_count(&self) -> usize {
        self.tuples.len()
    }

    /// DOT rendering over the factor graphs the component was built from.
    pub fn to_dot(&self, graphs: &[&CoreGraph], name: &str) -> String {
        let id = |t: &[usize]| {
            t.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        writeln!(out, "digraph {name} {{").unwrap();
        writeln!(out, "  node [shape=circle];").unwrap();
        for t in &self.tuples {
            let shape = if *t == self.rep_tuple {
                " [shape=doublecircle]"
            } else {
                ""
            };
            writeln!(out, "  \"{}\"{shape};", id(t)).unwrap();
        }
        let rank = graphs[0].rank_of_alphabet();
        for t in &self.tuples {
            for gen in 1..=rank {
                if let Some(next) = step_tuple(graphs, t, Letter::gen(gen)) {
                    writeln!(
                        out,
                        "  \"{}\" -> \"{}\" [label=\"x{gen}\"];",
                        id(t),
                        id(&next)
                    )
                    .unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn step_tuple(graphs: &[&CoreGraph], tuple: &[usize], letter: Letter) -> Option<Vec<usize>> {
    graphs
        .iter()
        .zip(tuple)
        .map(|(g, &v)| g.step(v, letter))
        .collect()
}

/// Breadth-first exploration of one product component.
struct Exploration {
    tuples: Vec<Vec<usize>>,
    parent: Vec<Option<(usize, Letter)>>,
    /// Positive edges `(from, to, gen)`, each recorded once.
    edges: Vec<(usize, usize, usize)>,
}

impl Exploration {
    fn run(graphs: &[&CoreGraph], base: &[usize]) -> Self {
        let letters: Vec<Letter> = graphs[0].alphabet().letters().collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut tuples = vec![base.to_vec()];
        let mut parent = vec![None];
        let mut edges = Vec::new();
        index.insert(base.to_vec(), 0);
        let mut head = 0;
        while head < tuples.len() {
            let u = head;
            head += 1;
            for &l in &letters {
                let Some(next) = step_tuple(graphs, &tuples[u], l) else {
                    continue;
                };
                let v = match index.get(&next) {
                    Some(&v) => v,
                    None => {
                        let v = tuples.len();
                        index.insert(next.clone(), v);
                        tuples.push(next);
                        parent.push(Some((u, l)));
                        v
                    }
                };
                if !l.is_inverse() {
                    edges.push((u, v, l.index()));
                }
            }
        }
        Exploration {
            tuples,
            parent,
            edges,
        }
    }

    fn rank(&self) -> usize {
        self.edges.len() + 1 - self.tuples.len()
    }

    fn label(&self, mut v: usize) -> Word {
        let mut rev = Vec::new();
        while let Some((u, l)) = self.parent[v] {
            rev.push(l);
            v = u;
        }
        rev.reverse();
        Word::reduced(rev)
    }

    fn is_tree_edge(&self, (u, v, gen): (usize, usize, usize)) -> bool {
        let x = Letter::gen(gen);
        self.parent[v] == Some((u, x)) || self.parent[u] == Some((v, x.inverse()))
    }

    /// Shortest closed path at the base through a single non-tree edge.
    fn witness(&self) -> Option<Word> {
        self.edges
            .iter()
            .filter(|&&e| !self.is_tree_edge(e))
            .map(|&(u, v, gen)| {
                self.label(u)
                    .multiply(&Word::letter(Letter::gen(gen)))
                    .multiply(&self.label(v).invert())
            })
            .min()
    }

    fn into_component(self) -> PullbackComponent {
        let rank = self.rank();
        let witness = self.witness();
        debug_assert_eq!(witness.is_some(), rank > 0);
        let rep_tuple = self.tuples[0].clone();
        let mut tuples = self.tuples;
        tuples.sort();
        PullbackComponent {
            arity: rep_tuple.len(),
            tuples,
            edge_count: self.edges.len(),
            rank,
            rep_tuple,
            double_coset_rep: None,
            witness,
        }
    }
}

fn check_alphabets(graphs: &[&CoreGraph]) -> Result<()> {
    let rank = graphs[0].rank_of_alphabet();
    for g in graphs {
        if g.rank_of_alphabet() != rank {
            return Err(Error::RankMismatch {
                left: rank,
                right: g.rank_of_alphabet(),
            });
        }
    }
    Ok(())
}

fn coset_rep(a: &CoreGraph, b: &CoreGraph, p: usize, q: usize) -> Word {
    a.label(p).multiply(&b.label(q).invert())
}

/// All components of `A ×_F B`, ordered by their smallest tuple.
///
/// Each component's representative tuple `(p, q)` is the one whose
/// `d^-1 = b_q a_p^-1` is shortlex-minimal.
pub fn pullback2(a: &CoreGraph, b: &CoreGraph) -> Result<Vec<PullbackComponent>> {
    let graphs = [a, b];
    check_alphabets(&graphs)?;
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for p in 0..a.vertex_count() {
        for q in 0..b.vertex_count() {
            if seen.contains(&(p, q)) {
                continue;
            }
            let first = Exploration::run(&graphs, &[p, q]);
            seen.extend(first.tuples.iter().map(|t| (t[0], t[1])));
            let rep = first
                .tuples
                .iter()
                .min_by(|s, t| {
                    coset_rep(a, b, s[0], s[1])
                        .invert()
                        .cmp(&coset_rep(a, b, t[0], t[1]).invert())
                })
                .unwrap()
                .clone();
            let explored = if rep == [p, q] {
                first
            } else {
                Exploration::run(&graphs, &rep)
            };
            let mut component = explored.into_component();
            component.double_coset_rep = Some(coset_rep(a, b, rep[0], rep[1]));
            out.push(component);
        }
    }
    Ok(out)
}

/// The component of the n-fold product containing `base`, explored only
/// from there.
pub fn pullback_n(graphs: &[&CoreGraph], base: &[usize]) -> Result<PullbackComponent> {
    if graphs.len() < 2 || graphs.len() != base.len() {
        return Err(Error::Arity(format!(
            "{} graphs with a base tuple of length {}",
            graphs.len(),
            base.len()
        )));
    }
    check_alphabets(graphs)?;
    for (g, &v) in graphs.iter().zip(base) {
        g.check_vertex(v)?;
    }
    let mut component = Exploration::run(graphs, base).into_component();
    if graphs.len() == 2 {
        component.double_coset_rep = Some(coset_rep(graphs[0], graphs[1], base[0], base[1]));
    }
    Ok(component)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn core(rank: usize, gens: &[&str]) -> CoreGraph {
        let gens: Vec<Word> = gens.iter().map(|g| w(g)).collect();
        CoreGraph::build(Alphabet::new(rank).unwrap(), &gens).unwrap()
    }

    #[test]
    fn malnormal_free_factor_has_only_the_diagonal() {
        let h = core(4, &["x1", "x2"]);
        let comps = pullback2(&h, &h).unwrap();
        assert_eq!(comps.len(), 1);
        assert!(!comps[0].is_tree());
        assert_eq!(comps[0].double_coset_rep, Some(Word::identity()));
    }

    #[test]
    fn overlapping_roses_meet_in_the_shared_generator() {
        let comps = pullback2(&core(4, &["x1", "x2"]), &core(4, &["x2", "x3"])).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].witness, Some(w("x2")));
        assert_eq!(comps[0].rank, 1);
    }

    #[test]
    fn disjoint_roses_give_a_single_point() {
        let comps = pullback2(&core(4, &["x1", "x2"]), &core(4, &["x3", "x4"])).unwrap();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].is_tree());
        assert_eq!(comps[0].vertex_count(), 1);
        assert_eq!(comps[0].witness, None);
    }

    #[test]
    fn triple_intersection_of_three_generator_roses() {
        let c1 = core(4, &["x1", "x2", "x3"]);
        let c2 = core(4, &["x2", "x3", "x4"]);
        let c3 = core(4, &["x3", "x4", "x1"]);
        let c4 = core(4, &["x4", "x1", "x2"]);
        let c = pullback_n(&[&c1, &c2, &c3], &[0, 0, 0]).unwrap();
        assert!(!c.is_tree());
        assert_eq!(c.witness, Some(w("x3")));
        let c = pullback_n(&[&c1, &c2, &c3, &c4], &[0, 0, 0, 0]).unwrap();
        assert!(c.is_tree());
    }

    #[test]
    fn anti_diagonal_of_the_square() {
        let h = core(1, &["x1 x1"]);
        let c = pullback_n(&[&h, &h], &[0, 1]).unwrap();
        assert!(!c.is_tree());
        assert_eq!(c.tuples, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(c.witness, Some(w("x1 x1")));
        assert_eq!(c.double_coset_rep, Some(w("X1")));
        let comps = pullback2(&h, &h).unwrap();
        assert_eq!(comps.len(), 2);
        // rep chosen so that d^-1 is shortlex-least: d^-1 = x1.
        assert_eq!(comps[1].double_coset_rep, Some(w("X1")));
    }

    #[test]
    fn diagonal_is_a_copy_of_the_core() {
        let h = core(2, &["x1 x2 X1 x2", "x2 x2 x1"]);
        let comps = pullback2(&h, &h).unwrap();
        let diag = comps
            .iter()
            .find(|c| c.tuples.contains(&vec![0, 0]))
            .unwrap();
        assert_eq!(diag.vertex_count(), h.vertex_count());
        assert_eq!(diag.edge_count, h.edge_count());
        assert!(diag.tuples.iter().all(|t| t[0] == t[1]));
    }

    #[test]
    fn pullback_n_validates_input() {
        let h = core(1, &["x1"]);
        assert!(pullback_n(&[&h], &[0]).is_err());
        assert!(pullback_n(&[&h, &h], &[0]).is_err());
        assert!(pullback_n(&[&h, &h], &[0, 3]).is_err());
        assert!(pullback2(&h, &core(2, &["x1"])).is_err());
    }

    #[test]
    fn component_dot() {
        let h = core(1, &["x1 x1"]);
        let c = pullback_n(&[&h, &h], &[0, 1]).unwrap();
        let dot = c.to_dot(&[&h, &h], "pb");
        assert!(dot.contains("\"0,1\" [shape=doublecircle];"));
        assert!(dot.contains("\"0,1\" -> \"1,0\" [label=\"x1\"];"));
        assert!(dot.contains("\"1,0\" -> \"0,1\" [label=\"x1\"];"));
    }
}
