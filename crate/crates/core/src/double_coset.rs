//! Recognizers for double cosets `A d B` of subgroups of a free group.
//!
//! Folding `A`, a path reading `d` and `B` into one graph is not enough:
//! the path can then be walked backwards, and the folded graph recognizes
//! `<A, d B d^-1> d`. Instead the path is one-way: read a closed walk in
//! `A`, then `d`, then a closed walk in `B`. Adding an empty move across
//! every cancelling pair `x x^-1` (Benois) makes the automaton accept a
//! reduced word exactly when it is the reduced form of such a walk.

use crate::error::{Error, Result};
use crate::graph::CoreGraph;
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCosetAutomaton {
    alphabet: Alphabet,
    /// `step[q][key]`: states reachable by one letter, empty moves included.
    step: Vec<Vec<Vec<usize>>>,
    start: Vec<usize>,
    accepting: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DoubleCosetQuery<'a> {
    Contains(&'a Word),
    Shortest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DoubleCosetAnswer {
    Contains(bool),
    Shortest(Word),
}

/// Reflexive-transitive closure of the empty moves.
fn closure(eps: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = eps.len();
    let mut cl = eps.to_vec();
    for (i, row) in cl.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if cl[i][k] {
                for j in 0..n {
                    if cl[k][j] {
                        cl[i][j] = true;
                    }
                }
            }
        }
    }
    cl
}

impl DoubleCosetAutomaton {
    pub fn new(a: &CoreGraph, d: &Word, b: &CoreGraph) -> Result<Self> {
        let alphabet = a.alphabet();
        if b.alphabet() != alphabet {
            return Err(Error::RankMismatch {
                left: alphabet.rank(),
                right: b.rank_of_alphabet(),
            });
        }
        alphabet.check(d)?;
        let keys = alphabet.letter_count();
        // States: A's vertices, the inner vertices of the d-path, B's vertices.
        let inner = d.len().saturating_sub(1);
        let offset_b = a.vertex_count() + inner;
        let n = offset_b + b.vertex_count();
        let mut raw: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); keys]; n];
        for (graph, offset) in [(a, 0), (b, offset_b)] {
            for e in graph.edges() {
                let l = Letter::gen(e.gen);
                raw[offset + e.source][l.key()].push(offset + e.target);
                raw[offset + e.target][l.inverse().key()].push(offset + e.source);
            }
        }
        let mut eps = vec![vec![false; n]; n];
        if d.is_empty() {
            eps[CoreGraph::BASE][offset_b + CoreGraph::BASE] = true;
        } else {
            let path: Vec<usize> = std::iter::once(CoreGraph::BASE)
                .chain(a.vertex_count()..offset_b)
                .chain(std::iter::once(offset_b + CoreGraph::BASE))
                .collect();
            for (i, l) in d.letters().iter().enumerate() {
                raw[path[i]][l.key()].push(path[i + 1]);
            }
        }

        // Saturate: p ~> q -x-> r ~> r' -x^-1-> s gives an empty move p -> s.
        let mut cl = closure(&eps);
        loop {
            let mut added = false;
            for p in 0..n {
                for q in (0..n).filter(|&q| cl[p][q]) {
                    for key in 0..keys {
                        let back = Letter::from_key(key).inverse().key();
                        for &r in &raw[q][key] {
                            for r2 in (0..n).filter(|&r2| cl[r][r2]) {
                                for &s in &raw[r2][back] {
                                    if !cl[p][s] {
                                        eps[p][s] = true;
                                        added = true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            if !added {
                break;
            }
            cl = closure(&eps);
        }

        let accept = offset_b + CoreGraph::BASE;
        let cl = &cl;
        let step = (0..n)
            .map(|q| {
                (0..keys)
                    .map(|key| {
                        let mut out: Vec<usize> = (0..n)
                            .filter(|&p| cl[q][p])
                            .flat_map(|p| raw[p][key].iter().copied())
                            .flat_map(|r| (0..n).filter(move |&t| cl[r][t]))
                            .collect();
                        out.sort_unstable();
                        out.dedup();
                        out
                    })
                    .collect()
            })
            .collect();
        let start = (0..n).filter(|&q| cl[CoreGraph::BASE][q]).collect();
        let accepting = (0..n).map(|q| cl[q][accept]).collect();
        Ok(DoubleCosetAutomaton {
            alphabet,
            step,
            start,
            accepting,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.step.len()
    }

    fn advance(&self, states: &[usize], key: usize) -> Vec<usize> {
        let mut out: Vec<usize> = states
            .iter()
            .flat_map(|&q| self.step[q][key].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn contains(&self, word: &Word) -> bool {
        let mut states = self.start.clone();
        for &l in word.letters() {
            if l.index() > self.alphabet.rank() {
                return false;
            }
            states = self.advance(&states, l.key());
            if states.is_empty() {
                return false;
            }
        }
        states.iter().any(|&q| self.accepting[q])
    }

    /// Shortlex-least element of the double coset.
    pub fn shortest(&self) -> Word {
        let n = self.step.len();
        let keys = self.alphabet.letter_count();
        // Pair states (q, last letter), slot `keys` meaning "no letter yet".
        // dist = length of the shortest reduced continuation to acceptance.
        let idx = |q: usize, last: usize| q * (keys + 1) + last;
        let mut dist = vec![usize::MAX; n * (keys + 1)];
        for q in (0..n).filter(|&q| self.accepting[q]) {
            for last in 0..=keys {
                dist[idx(q, last)] = 0;
            }
        }
        loop {
            let mut changed = false;
            for q in 0..n {
                for last in 0..=keys {
                    let barred = (last < keys).then(|| Letter::from_key(last).inverse().key());
                    for key in (0..keys).filter(|&k| Some(k) != barred) {
                        for &t in &self.step[q][key] {
                            let via = dist[idx(t, key)].saturating_add(1);
                            if via < dist[idx(q, last)] {
                                dist[idx(q, last)] = via;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut remaining = self
            .start
            .iter()
            .map(|&q| dist[idx(q, keys)])
            .min()
            .expect("start state");
        let mut current: Vec<(usize, usize)> = self
            .start
            .iter()
            .filter(|&&q| dist[idx(q, keys)] == remaining)
            .map(|&q| (q, keys))
            .collect();
        let mut letters = Vec::with_capacity(remaining);
        while remaining > 0 {
            let (key, next) = (0..keys)
                .find_map(|key| {
                    let mut next: Vec<(usize, usize)> = current
                        .iter()
                        .filter(|&&(_, last)| {
                            last == keys || Letter::from_key(last).inverse().key() != key
                        })
                        .flat_map(|&(q, _)| self.step[q][key].iter().map(move |&t| (t, key)))
                        .filter(|&(t, k)| dist[idx(t, k)] == remaining - 1)
                        .collect();
                    next.sort_unstable();
                    next.dedup();
                    (!next.is_empty()).then_some((key, next))
                })
                .expect("a state at distance r has a successor at distance r - 1");
            letters.push(Letter::from_key(key));
            current = next;
            remaining -= 1;
        }
        Word::reduced(letters)
    }

    pub fn query(&self, query: DoubleCosetQuery<'_>) -> DoubleCosetAnswer {
        match query {
            DoubleCosetQuery::Contains(w) => DoubleCosetAnswer::Contains(self.contains(w)),
            DoubleCosetQuery::Shortest => DoubleCosetAnswer::Shortest(self.shortest()),
        }
    }
}
