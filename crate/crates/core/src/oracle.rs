//! Brute-force ground truth for small instances.
//!
//! Enumerates every `g = w t^k` with `|w| <= R`, builds the core of
//! `g^-1 H g` straight from conjugated generators and decides infinite
//! intersections with a product search of its own. Nothing here consults
//! fiber-product components, their double-coset representatives or the
//! node graph of the exact engines.
//!
//! Completeness: if conjugates pairwise meet infinitely, their invariant
//! subtrees in the Cayley tree pairwise meet, so (Helly) they share a
//! vertex. Translating that vertex to a core vertex of the first member
//! puts every coset `H g_i` at `H a_q a_p^-1`, of length at most `2K`. The
//! same bound holds for shortest double-coset representatives. So once
//! `R >= 2K` and nothing was cut off, the oracle sees everything.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{ball_count, qc_constant};
use crate::double_coset::DoubleCosetAutomaton;
use crate::error::Result;
use crate::extension::{ExtElement, ExtensionSpec};
use crate::graph::CoreGraph;
use crate::report::InvariantReport;
use crate::word::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleConfig {
    pub radius: usize,
    /// Most group elements enumerated before giving up.
    pub max_ball: usize,
    /// Largest collection tried when searching for the height.
    pub tuple_cap: usize,
    /// Most distinct conjugates kept for the width and height searches.
    pub max_candidates: usize,
}

impl OracleConfig {
    pub fn with_radius(radius: usize) -> Self {
        OracleConfig {
            radius,
            ..Self::default()
        }
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            radius: 3,
            max_ball: 250_000,
            tuple_cap: 6,
            max_candidates: 400,
        }
    }
}

/// One double coset `H g H` met by the enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleBucket {
    /// First element met: shortlex-least free part inside the ball.
    pub shortest: ExtElement,
    pub members_seen: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub radius: usize,
    pub ball_size: usize,
    /// Set when the element budget cut the enumeration short.
    pub truncated: bool,
    pub qc_constant: usize,
    pub buckets: Vec<OracleBucket>,
    pub per_twist_weak_width: Vec<usize>,
    pub weak_width: usize,
    pub weak_width_complete: bool,
    pub candidate_count: usize,
    pub candidates_truncated: bool,
    pub width: usize,
    pub width_complete: bool,
    pub height: usize,
    pub height_complete: bool,
    pub notes: Vec<String>,
}

/// Ball elements in order: free part by shortlex, then t-exponent.
fn ball(spec: &ExtensionSpec, radius: usize, budget: usize) -> (Vec<ExtElement>, bool) {
    let m = spec.order();
    let letters: Vec<Letter> = spec.alphabet().letters().collect();
    let mut out = Vec::new();
    let mut level = vec![Word::identity()];
    for len in 0..=radius {
        for w in &level {
            for k in 0..m {
                if out.len() == budget {
                    return (out, true);
                }
                out.push(ExtElement::new(w.clone(), k));
            }
        }
        if len == radius {
            break;
        }
        let mut next = Vec::new();
        for w in &level {
            let last = w.letters().last().copied();
            for &l in &letters {
                if Some(l.inverse()) != last {
                    let mut v = w.letters().to_vec();
                    v.push(l);
                    next.push(Word::reduced(v));
                }
            }
        }
        level = next;
    }
    (out, false)
}

/// Whether the component of the all-basepoint tuple in the product of
/// `graphs` carries a cycle.
fn product_has_cycle(graphs: &[&CoreGraph]) -> bool {
    let letters: Vec<Letter> = graphs[0]
        .alphabet()
        .letters()
        .filter(|l| !l.is_inverse())
        .collect();
    let start = vec![CoreGraph::BASE; graphs.len()];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut edges = 0usize;
    while let Some(t) = queue.pop_front() {
        for &l in &letters {
            for dir in [l, l.inverse()] {
                let next: Option<Vec<usize>> = graphs
                    .iter()
                    .zip(&t)
                    .map(|(g, &v)| g.step(v, dir))
                    .collect();
                if let Some(next) = next {
                    if !dir.is_inverse() {
                        edges += 1;
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    edges >= seen.len()
}

/// Canonical name of the coset `H w`: the core vertex where reading `w`
/// leaves the core and the unread rest.
fn coset_key(h: &CoreGraph, w: &Word) -> (usize, Word) {
    let mut v = CoreGraph::BASE;
    for (i, &l) in w.letters().iter().enumerate() {
        match h.step(v, l) {
            Some(u) => v = u,
            None => return (v, Word::reduced(w.letters()[i..].iter().copied())),
        }
    }
    (v, Word::identity())
}

pub fn oracle(
    spec: &ExtensionSpec,
    generators: &[Word],
    config: &OracleConfig,
) -> Result<OracleReport> {
    let alphabet = spec.alphabet();
    for g in generators {
        alphabet.check(g)?;
    }
    let m = spec.order();
    let h = CoreGraph::build(alphabet, generators)?;
    let k_const = qc_constant(&h);
    let radius = config.radius;
    let mut notes = Vec::new();

    let expected = ball_count(spec.rank(), radius).saturating_mul(m as u128);
    let (elements, truncated) = ball(spec, radius, config.max_ball);
    if truncated {
        notes.push(format!(
            "ball of {expected} elements cut to {}",
            elements.len()
        ));
    }
    if h.is_trivial() {
        return Ok(OracleReport {
            radius,
            ball_size: elements.len(),
            truncated,
            qc_constant: 0,
            buckets: Vec::new(),
            per_twist_weak_width: vec![0; m],
            weak_width: 0,
            weak_width_complete: !truncated,
            candidate_count: 0,
            candidates_truncated: false,
            width: 0,
            width_complete: !truncated,
            height: 0,
            height_complete: !truncated,
            notes,
        });
    }

    let conjugate_core = |g: &ExtElement| -> Result<CoreGraph> {
        let gens = generators
            .iter()
            .map(|s| {
                spec.conjugate(g, &ExtElement::new(s.clone(), 0))
                    .map(|c| c.fpart)
            })
            .collect::<Result<Vec<_>>>()?;
        CoreGraph::build(alphabet, &gens)
    };

    // H ∩ g^-1 H g for every g in the ball.
    let meets: Vec<Option<CoreGraph>> = elements
        .par_iter()
        .map(|g| -> Result<Option<CoreGraph>> {
            let c = conjugate_core(g)?;
            Ok(product_has_cycle(&[&h, &c]).then_some(c))
        })
        .collect::<Result<_>>()?;

    // H w t^k H = (H w φ^-k(H)) t^k.
    let twisted: Vec<CoreGraph> = (0..m)
        .map(|k| {
            let gens: Vec<Word> = generators
                .iter()
                .map(|s| spec.twist(-(k as i64), s))
                .collect();
            CoreGraph::build(alphabet, &gens)
        })
        .collect::<Result<_>>()?;
    let mut buckets: Vec<(DoubleCosetAutomaton, OracleBucket)> = Vec::new();
    let mut candidates: Vec<CoreGraph> = Vec::new();
    let mut keys: BTreeSet<(usize, usize, Word)> = BTreeSet::new();
    let mut candidates_truncated = false;
    for (g, core) in elements.iter().zip(meets) {
        let Some(core) = core else { continue };
        match buckets
            .iter_mut()
            .find(|(aut, b)| b.shortest.tpart == g.tpart && aut.contains(&g.fpart))
        {
            Some((_, b)) => b.members_seen += 1,
            None => {
                let aut = DoubleCosetAutomaton::new(&h, &g.fpart, &twisted[g.tpart])?;
                buckets.push((
                    aut,
                    OracleBucket {
                        shortest: g.clone(),
                        members_seen: 1,
                    },
                ));
            }
        }
        let (v, rest) = coset_key(&h, &g.fpart);
        if keys.insert((g.tpart, v, rest)) {
            if candidates.len() == config.max_candidates {
                candidates_truncated = true;
            } else {
                candidates.push(core);
            }
        }
    }
    if candidates_truncated {
        notes.push(format!(
            "kept only the first {} conjugates",
            config.max_candidates
        ));
    }
    let mut buckets: Vec<OracleBucket> = buckets.into_iter().map(|(_, b)| b).collect();
    buckets.sort_by(|a, b| {
        (a.shortest.tpart, &a.shortest.fpart).cmp(&(b.shortest.tpart, &b.shortest.fpart))
    });
    let mut per_twist = vec![0; m];
    for b in &buckets {
        per_twist[b.shortest.tpart] += 1;
    }

    // Candidate 0 is H itself (g = 1 comes first in the ball).
    let n = candidates.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let linked: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| product_has_cycle(&[&candidates[i], &candidates[j]]))
        .collect();
    let mut adj = vec![vec![false; n]; n];
    for (&(i, j), &l) in pairs.iter().zip(&linked) {
        adj[i][j] = l;
        adj[j][i] = l;
    }

    let width = largest_clique_with_first(&adj);
    let mut height = 1;
    for size in 2..=config.tuple_cap.min(width) {
        let found = first_clique_with_first(&adj, size, &mut |clique| {
            let cores: Vec<&CoreGraph> = clique.iter().map(|&i| &candidates[i]).collect();
            product_has_cycle(&cores)
        });
        if !found {
            break;
        }
        height = size;
    }

    let base_complete = !truncated && !candidates_truncated && radius >= 2 * k_const;
    if radius < 2 * k_const {
        notes.push(format!(
            "radius {radius} is below 2K = {}; values are lower bounds",
            2 * k_const
        ));
    }
    let height_capped = height == config.tuple_cap && width > config.tuple_cap;
    if height_capped {
        notes.push(format!(
            "height search stopped at {} conjugates",
            config.tuple_cap
        ));
    }
    let weak_width = buckets.len();
    Ok(OracleReport {
        radius,
        ball_size: elements.len(),
        truncated,
        qc_constant: k_const,
        buckets,
        per_twist_weak_width: per_twist,
        weak_width,
        weak_width_complete: !truncated && radius >= 2 * k_const,
        candidate_count: n,
        candidates_truncated,
        width,
        width_complete: base_complete,
        height,
        height_complete: base_complete && !height_capped,
        notes,
    })
}

/// Size of the largest clique containing vertex 0.
fn largest_clique_with_first(adj: &[Vec<bool>]) -> usize {
    fn grow(adj: &[Vec<bool>], size: usize, pool: &[usize], best: &mut usize) {
        if size > *best {
            *best = size;
        }
        for (i, &v) in pool.iter().enumerate() {
            if size + pool.len() - i <= *best {
                return;
            }
            let rest: Vec<usize> = pool[i + 1..]
                .iter()
                .copied()
                .filter(|&u| adj[v][u])
                .collect();
            grow(adj, size + 1, &rest, best);
        }
    }
    if adj.is_empty() {
        return 0;
    }
    let pool: Vec<usize> = (1..adj.len()).filter(|&u| adj[0][u]).collect();
    let mut best = 0;
    grow(adj, 1, &pool, &mut best);
    best
}

/// Whether some clique of `size` vertices containing vertex 0 passes `test`.
fn first_clique_with_first(
    adj: &[Vec<bool>],
    size: usize,
    test: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    fn go(
        adj: &[Vec<bool>],
        size: usize,
        current: &mut Vec<usize>,
        pool: &[usize],
        test: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == size {
            return test(current);
        }
        for (i, &v) in pool.iter().enumerate() {
            if current.len() + pool.len() - i < size {
                return false;
            }
            let rest: Vec<usize> = pool[i + 1..]
                .iter()
                .copied()
                .filter(|&u| adj[v][u])
                .collect();
            current.push(v);
            let hit = go(adj, size, current, &rest, test);
            current.pop();
            if hit {
                return true;
            }
        }
        false
    }
    let pool: Vec<usize> = (1..adj.len()).filter(|&u| adj[0][u]).collect();
    go(adj, size, &mut vec![0], &pool, test)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleComparison {
    pub radius: usize,
    /// Engine double cosets whose shortest element has length `<= R - 2`.
    pub engine_buckets: Vec<ExtElement>,
    pub oracle_buckets: Vec<ExtElement>,
    pub buckets_agree: bool,
    /// Equality where the oracle is complete, oracle `<=` engine elsewhere.
    pub weak_width_agree: bool,
    pub width_agree: bool,
    pub height_agree: bool,
    pub agreement: bool,
}

pub fn compare(engine: &InvariantReport, oracle: &OracleReport) -> OracleComparison {
    let limit = oracle.radius.checked_sub(2);
    let short = |e: &ExtElement| limit.is_some_and(|l| e.fpart.len() <= l);
    let mut engine_buckets: Vec<ExtElement> = engine
        .certificates
        .weak_width
        .iter()
        .map(|c| c.shortest.clone())
        .filter(|e| short(e))
        .collect();
    let mut oracle_buckets: Vec<ExtElement> = oracle
        .buckets
        .iter()
        .map(|b| b.shortest.clone())
        .filter(|e| short(e))
        .collect();
    let order = |a: &ExtElement, b: &ExtElement| (a.tpart, &a.fpart).cmp(&(b.tpart, &b.fpart));
    engine_buckets.sort_by(order);
    oracle_buckets.sort_by(order);
    let buckets_agree = engine_buckets == oracle_buckets;
    let agree = |exact: usize, seen: usize, complete: bool| {
        if complete {
            exact == seen
        } else {
            seen <= exact
        }
    };
    let weak_width_agree = agree(
        engine.weak_width,
        oracle.weak_width,
        oracle.weak_width_complete,
    );
    let width_agree = agree(engine.width, oracle.width, oracle.width_complete);
    let height_agree = agree(engine.height, oracle.height, oracle.height_complete);
    OracleComparison {
        radius: oracle.radius,
        engine_buckets,
        oracle_buckets,
        buckets_agree,
        weak_width_agree,
        width_agree,
        height_agree,
        agreement: buckets_agree && weak_width_agree && width_agree && height_agree,
    }
}
