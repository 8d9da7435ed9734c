//! The groups `G = F_n ⋊ Z/m` with `t^-1 x_i t = x_σ(i)` and `t^m = 1`,
//! and the invariants of subgroups `H ≤ F_n` inside them.
//!
//! Every element of `G` is uniquely `w t^k` with `w` reduced and
//! `0 <= k < m`. Writing `φ(x_i) = x_σ(i)`, we have `w t = t φ(w)`, so
//! conjugating `H` by `w t^k` gives `φ^k(w^-1 H w)`. The conjugates of `H`
//! are therefore the `F`-conjugates of the twisted subgroups `φ^k(H)`, and
//! their cosets are indexed by pairs `(k, coset of φ^k(H) in F)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::double_coset::DoubleCosetAutomaton;
use crate::error::{Error, Result};
use crate::graph::CoreGraph;
use crate::pullback::{pullback2, pullback_n};
use crate::report::{
    Certificates, DoubleCosetCertificate, Exactness, HeightCertificate, InvariantReport,
    MemberNode, PairWitness, WidthCertificate,
};
use crate::search::{largest_passing_clique, max_clique, Adjacency};
use crate::word::{Alphabet, GeneratorPermutation, Word};

/// The ambient group: rank, permutation `σ` and order `m` of `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtensionSpec {
    alphabet: Alphabet,
    perm: GeneratorPermutation,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    rank: usize,
    order: usize,
    perm: Vec<usize>,
}

impl Serialize for ExtensionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr {
            rank: self.rank(),
            order: self.order(),
            perm: self.perm.images().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtensionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(d)?;
        if repr.perm.len() != repr.rank {
            return Err(serde::de::Error::custom("perm length differs from rank"));
        }
        ExtensionSpec::new(repr.perm, repr.order).map_err(serde::de::Error::custom)
    }
}

impl ExtensionSpec {
    pub fn new(images: Vec<usize>, order: usize) -> Result<Self> {
        let alphabet = Alphabet::new(images.len())?;
        let perm = GeneratorPermutation::new(images, order)?;
        Ok(ExtensionSpec { alphabet, perm })
    }

    /// `m = 1`, `σ = id`: the free group itself.
    pub fn free(rank: usize) -> Result<Self> {
        let alphabet = Alphabet::new(rank)?;
        Ok(ExtensionSpec {
            alphabet,
            perm: GeneratorPermutation::identity(rank),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn order(&self) -> usize {
        self.perm.order()
    }

    pub fn perm(&self) -> &GeneratorPermutation {
        &self.perm
    }

    /// `φ^k(w)`, `k` taken mod `m`.
    pub fn twist(&self, k: i64, w: &Word) -> Word {
        self.perm.twist(k, w)
    }

    pub fn identity(&self) -> ExtElement {
        ExtElement::new(Word::identity(), 0)
    }

    pub fn t(&self) -> ExtElement {
        ExtElement::new(Word::identity(), 1 % self.order())
    }

    pub fn check(&self, g: &ExtElement) -> Result<()> {
        if g.tpart >= self.order() {
            return Err(Error::SpecMismatch(format!(
                "t-exponent {} is not below {}",
                g.tpart,
                self.order()
            )));
        }
        self.alphabet
            .check(&g.fpart)
            .map_err(|e| Error::SpecMismatch(e.to_string()))
    }

    /// `(w1 t^k1)(w2 t^k2) = w1 φ^-k1(w2) t^(k1+k2)`.
    pub fn multiply(&self, a: &ExtElement, b: &ExtElement) -> Result<ExtElement> {
        self.check(a)?;
        self.check(b)?;
        let fpart = a.fpart.multiply(&self.twist(-(a.tpart as i64), &b.fpart));
        Ok(ExtElement::new(fpart, (a.tpart + b.tpart) % self.order()))
    }

    /// `(w t^k)^-1 = φ^k(w^-1) t^-k`.
    pub fn invert(&self, a: &ExtElement) -> Result<ExtElement> {
        self.check(a)?;
        let m = self.order();
        Ok(ExtElement::new(
            self.twist(a.tpart as i64, &a.fpart.invert()),
            (m - a.tpart) % m,
        ))
    }

    pub fn compose(&self, a: &ExtElement, b: &ExtElement, op: ExtOp) -> Result<ExtElement> {
        match op {
            ExtOp::Multiply => self.multiply(a, b),
            ExtOp::Invert => self.invert(a),
        }
    }

    /// `g^-1 x g`.
    pub fn conjugate(&self, g: &ExtElement, x: &ExtElement) -> Result<ExtElement> {
        self.multiply(&self.invert(g)?, &self.multiply(x, g)?)
    }

    /// Whether the element `z` of `F` lies in `g^-1 H g`.
    pub fn in_conjugate(&self, h: &CoreGraph, g: &ExtElement, z: &Word) -> Result<bool> {
        let inner = self.multiply(
            &self.multiply(g, &ExtElement::new(z.clone(), 0))?,
            &self.invert(g)?,
        )?;
        Ok(inner.tpart == 0 && h.contains(&inner.fpart))
    }

    /// `[H, φ(H), .., φ^(m-1)(H)]`, vertex ids shared with `H`'s core.
    pub fn twisted_cores(&self, h: &CoreGraph) -> Result<Vec<CoreGraph>> {
        if h.alphabet() != self.alphabet {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: h.rank_of_alphabet(),
            });
        }
        (0..self.order())
            .map(|k| h.twisted(&self.perm, k as i64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtOp {
    Multiply,
    /// Inverts the first operand; the second is ignored.
    Invert,
}

/// Normal form `fpart * t^tpart`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtElement {
    pub fpart: Word,
    pub tpart: usize,
}

impl ExtElement {
    pub fn new(fpart: Word, tpart: usize) -> Self {
        ExtElement { fpart, tpart }
    }
}

impl std::fmt::Display for ExtElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.fpart.is_empty(), self.tpart) {
            (true, 0) => f.write_str("1"),
            (true, 1) => f.write_str("t"),
            (true, k) => write!(f, "t^{k}"),
            (false, 0) => write!(f, "{}", self.fpart),
            (false, 1) => write!(f, "{} t", self.fpart),
            (false, k) => write!(f, "{} t^{k}", self.fpart),
        }
    }
}

/// A node `(k, q)`: the conjugate `b_q^-1 φ^k(H) b_q` of `H` by
/// `g = φ^-k(b_q) t^k`, where `b_q` labels a path to `q` in the core of
/// `φ^k(H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub twist: usize,
    pub vertex: usize,
}

/// Conjugates of `H` located at core vertices, joined when they meet in an
/// infinite subgroup.
#[derive(Debug, Clone)]
pub struct NodeGraph {
    pub nodes: Vec<NodeId>,
    pub adjacency: Adjacency,
}

impl NodeGraph {
    pub fn index(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search(&id).ok()
    }
}

fn check_core(spec: &ExtensionSpec, h: &CoreGraph) -> Result<()> {
    if h.alphabet() != spec.alphabet() {
        return Err(Error::RankMismatch {
            left: spec.rank(),
            right: h.rank_of_alphabet(),
        });
    }
    Ok(())
}

/// All nodes `(k, q)`, ordered by twist then vertex, with an edge whenever
/// the component of `(q, q')` in `core(φ^k H) × core(φ^k' H)` is not a tree.
pub fn node_graph(h: &CoreGraph, spec: &ExtensionSpec) -> Result<NodeGraph> {
    let cores = spec.twisted_cores(h)?;
    Ok(node_graph_of(&cores))
}

fn node_graph_of(cores: &[CoreGraph]) -> NodeGraph {
    let m = cores.len();
    let v = cores[0].vertex_count();
    let nodes: Vec<NodeId> = (0..m)
        .flat_map(|twist| (0..v).map(move |vertex| NodeId { twist, vertex }))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|k| (k..m).map(move |l| (k, l))).collect();
    let edges: Vec<Vec<(usize, usize)>> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let comps = pullback2(&cores[k], &cores[l]).expect("twisted cores share an alphabet");
            let mut out = Vec::new();
            for c in comps.iter().filter(|c| !c.is_tree()) {
                for t in &c.tuples {
                    out.push((k * v + t[0], l * v + t[1]));
                }
            }
            out
        })
        .collect();
    let mut adjacency = Adjacency::new(nodes.len());
    for (a, b) in edges.into_iter().flatten() {
        adjacency.connect(a, b);
    }
    NodeGraph { nodes, adjacency }
}

pub(crate) fn member_node(cores: &[CoreGraph], spec: &ExtensionSpec, id: NodeId) -> MemberNode {
    let label = cores[id.twist].label(id.vertex);
    MemberNode {
        twist: id.twist,
        vertex: id.vertex,
        coset_rep: ExtElement::new(spec.twist(-(id.twist as i64), label), id.twist),
    }
}

/// A non-tree component kept after double-coset deduplication.
struct KeptComponent {
    d: Word,
    automaton: DoubleCosetAutomaton,
    witness: Word,
}

/// Non-tree components of `A × B`, one per double coset `A d B`.
fn distinct_nontree_components(a: &CoreGraph, b: &CoreGraph) -> Vec<KeptComponent> {
    let mut kept: Vec<KeptComponent> = Vec::new();
    for c in pullback2(a, b).expect("same alphabet") {
        let Some(cycle) = c.witness else { continue };
        let d = c.double_coset_rep.expect("binary pullback carries a rep");
        if kept.iter().any(|k| k.automaton.contains(&d)) {
            continue;
        }
        // The cycle sits at (p, q); move it to the basepoint of A.
        let a_p = a.label(c.rep_tuple[0]);
        let witness = a_p.multiply(&cycle).multiply(&a_p.invert());
        let automaton = DoubleCosetAutomaton::new(a, &d, b).expect("same alphabet");
        kept.push(KeptComponent {
            d,
            automaton,
            witness,
        });
    }
    kept
}

/// Weak width, width and height of `H ≤ F` inside `G`.
pub fn invariants_ext(h: &CoreGraph, spec: &ExtensionSpec) -> Result<InvariantReport> {
    check_core(spec, h)?;
    let m = spec.order();
    if h.is_trivial() {
        return Ok(InvariantReport::trivial(m));
    }
    let cores = spec.twisted_cores(h)?;

    let per_twist: Vec<Vec<KeptComponent>> = (0..m)
        .into_par_iter()
        .map(|k| distinct_nontree_components(&cores[0], &cores[k]))
        .collect();
    let mut weak_certs = Vec::new();
    for (k, kept) in per_twist.iter().enumerate() {
        for c in kept {
            // g = φ^-k(d^-1) t^k, so g^-1 H g = d φ^k(H) d^-1.
            let fpart = spec.twist(-(k as i64), &c.d.invert());
            let shortest_aut = DoubleCosetAutomaton::new(&cores[0], &fpart, &cores[(m - k) % m])?;
            weak_certs.push(DoubleCosetCertificate {
                twist: k,
                representative: ExtElement::new(fpart, k),
                shortest: ExtElement::new(shortest_aut.shortest(), k),
                witness: c.witness.clone(),
            });
        }
    }
    let per_twist_counts: Vec<usize> = per_twist.iter().map(Vec::len).collect();

    let graph = node_graph_of(&cores);
    let (width, width_certificate) = width_from(&graph, &cores, spec);
    let (height, height_certificate) = height_from(&graph, &cores, spec);

    Ok(InvariantReport {
        weak_width: weak_certs.len(),
        height,
        width,
        exact: Exactness::all(),
        per_twist_weak_width: per_twist_counts,
        certificates: Certificates {
            weak_width: weak_certs,
            width: width_certificate,
            height: height_certificate,
        },
    })
}

fn pair_witness(cores: &[CoreGraph], a: NodeId, b: NodeId) -> Option<Word> {
    pullback_n(&[&cores[a.twist], &cores[b.twist]], &[a.vertex, b.vertex])
        .ok()?
        .witness
}

fn some_element(h: &CoreGraph) -> Word {
    h.basis()
        .into_iter()
        .min()
        .expect("infinite subgroup has a basis element")
}

pub(crate) fn width_from(
    graph: &NodeGraph,
    cores: &[CoreGraph],
    spec: &ExtensionSpec,
) -> (usize, WidthCertificate) {
    let clique = max_clique(&graph.adjacency);
    let ids: Vec<NodeId> = clique.iter().map(|&i| graph.nodes[i]).collect();
    let mut pair_witnesses = Vec::new();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let witness = pair_witness(cores, ids[i], ids[j]).expect("clique edges are non-tree");
            pair_witnesses.push(PairWitness {
                first: i,
                second: j,
                witness,
            });
        }
    }
    let members = ids.iter().map(|&id| member_node(cores, spec, id)).collect();
    (
        clique.len(),
        WidthCertificate {
            members,
            pair_witnesses,
        },
    )
}

pub(crate) fn height_from(
    graph: &NodeGraph,
    cores: &[CoreGraph],
    spec: &ExtensionSpec,
) -> (usize, HeightCertificate) {
    let found = largest_passing_clique(&graph.adjacency, |clique| {
        let ids: Vec<NodeId> = clique.iter().map(|&i| graph.nodes[i]).collect();
        let factors: Vec<&CoreGraph> = ids.iter().map(|id| &cores[id.twist]).collect();
        let base: Vec<usize> = ids.iter().map(|id| id.vertex).collect();
        pullback_n(&factors, &base).ok().and_then(|c| c.witness)
    });
    match found {
        Some((n, clique, witness)) => {
            let members = clique
                .iter()
                .map(|&i| member_node(cores, spec, graph.nodes[i]))
                .collect();
            (
                n,
                HeightCertificate {
                    members,
                    witness: Some(witness),
                },
            )
        }
        None => {
            let base = NodeId {
                twist: 0,
                vertex: CoreGraph::BASE,
            };
            let members = vec![member_node(cores, spec, base)];
            (
                1,
                HeightCertificate {
                    members,
                    witness: Some(some_element(&cores[0])),
                },
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distinctness {
    /// Pairwise distinct right cosets `H g`.
    Essential,
    /// Pairwise distinct double cosets `H g H`.
    Strong,
}

/// Whether `elements` are pairwise (strongly) `H`-essentially distinct in `G`.
pub fn ext_distinctness(
    h: &CoreGraph,
    spec: &ExtensionSpec,
    elements: &[ExtElement],
    mode: Distinctness,
) -> Result<bool> {
    check_core(spec, h)?;
    elements.iter().try_for_each(|g| spec.check(g))?;
    let m = spec.order();
    match mode {
        Distinctness::Essential => {
            for i in 0..elements.len() {
                for j in i + 1..elements.len() {
                    let q = spec.multiply(&elements[i], &spec.invert(&elements[j])?)?;
                    if q.tpart == 0 && h.contains(&q.fpart) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Distinctness::Strong => {
            let cores = spec.twisted_cores(h)?;
            for j in 0..elements.len() {
                // H w t^k H = (H w φ^-k(H)) t^k.
                let gj = &elements[j];
                let aut =
                    DoubleCosetAutomaton::new(&cores[0], &gj.fpart, &cores[(m - gj.tpart) % m])?;
                for gi in &elements[..j] {
                    if gi.tpart == gj.tpart && aut.contains(&gi.fpart) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn rotation() -> ExtensionSpec {
        ExtensionSpec::new(vec![2, 3, 4, 1], 4).unwrap()
    }

    fn core(rank: usize, gens: &[&str]) -> CoreGraph {
        let gens: Vec<Word> = gens.iter().map(|g| w(g)).collect();
        CoreGraph::build(Alphabet::new(rank).unwrap(), &gens).unwrap()
    }

    fn e(f: &str, k: usize) -> ExtElement {
        ExtElement::new(w(f), k)
    }

    #[test]
    fn composition_examples() {
        let g = rotation();
        let xt = e("x1", 1);
        assert_eq!(g.multiply(&xt, &xt).unwrap(), e("x1 x4", 2));
        assert_eq!(g.invert(&xt).unwrap(), e("X2", 3));
        assert_eq!(g.compose(&xt, &xt, ExtOp::Invert).unwrap(), e("X2", 3));
        let u = e("x3 X1 x2", 0);
        assert_eq!(
            g.multiply(&u, &g.invert(&u).unwrap()).unwrap(),
            g.identity()
        );
    }

    #[test]
    fn presentation_relations_hold() {
        let g = rotation();
        let t = g.t();
        for i in 1..=4 {
            let xi = e(&format!("x{i}"), 0);
            let image = e(&format!("x{}", i % 4 + 1), 0);
            assert_eq!(g.conjugate(&t, &xi).unwrap(), image);
        }
        let mut power = g.identity();
        for _ in 0..4 {
            power = g.multiply(&power, &t).unwrap();
        }
        assert_eq!(power, g.identity());
    }

    #[test]
    fn mismatched_elements_are_rejected() {
        let g = rotation();
        assert!(g.multiply(&e("x5", 0), &g.identity()).is_err());
        assert!(g.invert(&e("x1", 4)).is_err());
    }

    #[test]
    fn example_with_two_generator_rose() {
        let pair = core(4, &["x1", "x2"]);
        let spec = rotation();
        let graph = node_graph(&pair, &spec).unwrap();
        assert_eq!(graph.nodes.len(), 4);
        assert_eq!(
            graph.adjacency.edges(),
            vec![(0, 1), (0, 3), (1, 2), (2, 3)]
        );
        let report = invariants_ext(&pair, &spec).unwrap();
        assert_eq!((report.weak_width, report.width, report.height), (3, 2, 2));
        assert_eq!(report.per_twist_weak_width, vec![1, 1, 0, 1]);
        let reps: Vec<ExtElement> = report
            .certificates
            .weak_width
            .iter()
            .map(|c| c.representative.clone())
            .collect();
        assert_eq!(reps, vec![e("", 0), e("", 1), e("", 3)]);
    }

    #[test]
    fn example_with_three_generator_rose() {
        let triple_factor = core(4, &["x1", "x2", "x3"]);
        let spec = rotation();
        let graph = node_graph(&triple_factor, &spec).unwrap();
        assert_eq!(graph.adjacency.edges().len(), 6);
        let report = invariants_ext(&triple_factor, &spec).unwrap();
        assert_eq!((report.weak_width, report.width, report.height), (4, 4, 3));
        let twists: Vec<usize> = report
            .certificates
            .height
            .members
            .iter()
            .map(|m| m.twist)
            .collect();
        assert_eq!(twists, vec![0, 1, 2]);
        assert_eq!(report.certificates.height.witness, Some(w("x3")));
    }

    #[test]
    fn degenerate_extension_is_the_free_group() {
        let h = core(1, &["x1 x1"]);
        let report = invariants_ext(&h, &ExtensionSpec::free(1).unwrap()).unwrap();
        assert_eq!((report.weak_width, report.width, report.height), (2, 2, 2));
        let h = core(1, &["x1"]);
        let graph = node_graph(&h, &ExtensionSpec::free(1).unwrap()).unwrap();
        assert_eq!(
            graph.nodes,
            vec![NodeId {
                twist: 0,
                vertex: 0
            }]
        );
    }

    #[test]
    fn distinctness_in_the_extension() {
        let h = core(4, &["x1", "x2"]);
        let spec = rotation();
        let powers: Vec<ExtElement> = (0..4).map(|k| e("", k)).collect();
        assert!(ext_distinctness(&h, &spec, &powers, Distinctness::Strong).unwrap());
        // x2 x3 X2 lies in <x2, x3>.
        let pair = [e("", 3), e("x2 x3 X2", 3)];
        assert!(!ext_distinctness(&h, &spec, &pair, Distinctness::Strong).unwrap());
        assert!(ext_distinctness(&h, &spec, &pair, Distinctness::Essential).unwrap());
        assert!(
            !ext_distinctness(&h, &spec, &[e("", 0), e("", 0)], Distinctness::Essential).unwrap()
        );
    }

    #[test]
    fn spec_json() {
        let spec = rotation();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"rank":4,"order":4,"perm":[2,3,4,1]}"#);
        assert_eq!(serde_json::from_str::<ExtensionSpec>(&text).unwrap(), spec);
        assert!(
            serde_json::from_str::<ExtensionSpec>(r#"{"rank":4,"order":2,"perm":[2,3,4,1]}"#)
                .is_err()
        );
        let g = e("x1 X3", 2);
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"fpart":"x1 X3","tpart":2}"#
        );
    }
}
