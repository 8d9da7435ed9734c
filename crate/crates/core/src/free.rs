//! Exact weak width, width and height of finitely generated subgroups
//! inside the free group itself.
//!
//! Conjugates `g^-1 H g` are indexed by cosets `H g`. Those that can take
//! part in an infinite intersection are, after a common conjugation, the
//! ones whose coset is a vertex `p` of the core, i.e. `a_p^-1 H a_p`. Two
//! of them meet infinitely iff the component of `(p, q)` in `Γ_H × Γ_H`
//! carries a cycle.

use serde::{Deserialize, Serialize};

use crate::double_coset::DoubleCosetAutomaton;
use crate::error::Result;
use crate::extension::{height_from, width_from, ExtElement, ExtensionSpec, NodeGraph, NodeId};
use crate::graph::CoreGraph;
use crate::pullback::{pullback2, pullback_n};
use crate::report::{
    Certificates, DoubleCosetCertificate, Exactness, HeightCertificate, InvariantReport,
    WidthCertificate,
};
use crate::search::Adjacency;
use crate::word::Word;

pub use crate::extension::Distinctness;

/// Weak width with one certificate per double coset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakWidthPart {
    pub value: usize,
    pub certificates: Vec<DoubleCosetCertificate>,
}

pub fn weak_width_free(h: &CoreGraph) -> WeakWidthPart {
    let mut kept: Vec<(DoubleCosetAutomaton, DoubleCosetCertificate)> = Vec::new();
    for c in pullback2(h, h).expect("same graph") {
        let Some(cycle) = c.witness else { continue };
        // The component realizes H ∩ d H d^-1 = H ∩ g^-1 H g with g = d^-1.
        let g = c.double_coset_rep.expect("binary pullback").invert();
        if kept.iter().any(|(aut, _)| aut.contains(&g)) {
            continue;
        }
        let aut = DoubleCosetAutomaton::new(h, &g, h).expect("same alphabet");
        let a_p = h.label(c.rep_tuple[0]);
        let cert = DoubleCosetCertificate {
            twist: 0,
            representative: ExtElement::new(g, 0),
            shortest: ExtElement::new(aut.shortest(), 0),
            witness: a_p.multiply(&cycle).multiply(&a_p.invert()),
        };
        kept.push((aut, cert));
    }
    let certificates: Vec<DoubleCosetCertificate> = kept.into_iter().map(|(_, c)| c).collect();
    WeakWidthPart {
        value: certificates.len(),
        certificates,
    }
}

/// Whether the conjugates `a_p^-1 H a_p` and `a_q^-1 H a_q` meet in an
/// infinite subgroup.
pub fn member_edge(h: &CoreGraph, p: usize, q: usize) -> Result<bool> {
    Ok(!pullback_n(&[h, h], &[p, q])?.is_tree())
}

/// Core vertices joined by [`member_edge`], computed from one pass over
/// the components of `Γ_H × Γ_H`.
pub fn member_graph(h: &CoreGraph) -> Adjacency {
    let mut adj = Adjacency::new(h.vertex_count());
    for c in pullback2(h, h).expect("same graph") {
        if !c.is_tree() {
            for t in &c.tuples {
                adj.connect(t[0], t[1]);
            }
        }
    }
    adj
}

fn free_setting(h: &CoreGraph) -> (NodeGraph, Vec<CoreGraph>, ExtensionSpec) {
    let nodes = (0..h.vertex_count())
        .map(|vertex| NodeId { twist: 0, vertex })
        .collect();
    let graph = NodeGraph {
        nodes,
        adjacency: member_graph(h),
    };
    let spec = ExtensionSpec::free(h.rank_of_alphabet()).expect("rank is positive");
    (graph, vec![h.clone()], spec)
}

pub fn width_free(h: &CoreGraph) -> (usize, WidthCertificate) {
    if h.is_trivial() {
        return (0, WidthCertificate::default());
    }
    let (graph, cores, spec) = free_setting(h);
    width_from(&graph, &cores, &spec)
}

pub fn height_free(h: &CoreGraph) -> (usize, HeightCertificate) {
    if h.is_trivial() {
        return (0, HeightCertificate::default());
    }
    let (graph, cores, spec) = free_setting(h);
    height_from(&graph, &cores, &spec)
}

pub fn invariants_free(h: &CoreGraph) -> InvariantReport {
    if h.is_trivial() {
        return InvariantReport::trivial(1);
    }
    let weak = weak_width_free(h);
    let (width, width_cert) = width_free(h);
    let (height, height_cert) = height_free(h);
    InvariantReport {
        weak_width: weak.value,
        height,
        width,
        exact: Exactness::all(),
        per_twist_weak_width: vec![weak.value],
        certificates: Certificates {
            weak_width: weak.certificates,
            width: width_cert,
            height: height_cert,
        },
    }
}

/// Whether `elements` are pairwise (strongly) `H`-essentially distinct.
pub fn distinctness(h: &CoreGraph, elements: &[Word], mode: Distinctness) -> bool {
    let pairs = || (0..elements.len()).flat_map(|j| (0..j).map(move |i| (i, j)));
    match mode {
        Distinctness::Essential => {
            pairs().all(|(i, j)| !h.contains(&elements[i].multiply(&elements[j].invert())))
        }
        Distinctness::Strong => pairs().all(|(i, j)| {
            let aut = DoubleCosetAutomaton::new(h, &elements[j], h).expect("same alphabet");
            !aut.contains(&elements[i])
        }),
    }
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

    fn triple(h: &CoreGraph) -> (usize, usize, usize) {
        let r = invariants_free(h);
        (r.weak_width, r.width, r.height)
    }

    #[test]
    fn malnormal_free_factor() {
        let h = core(4, &["x1", "x2"]);
        assert_eq!(weak_width_free(&h).value, 1);
        assert_eq!(triple(&h), (1, 1, 1));
        assert!(member_edge(&h, 0, 0).unwrap());
    }

    #[test]
    fn square_of_a_generator() {
        let h = core(1, &["x1 x1"]);
        let weak = weak_width_free(&h);
        let reps: Vec<Word> = weak
            .certificates
            .iter()
            .map(|c| c.representative.fpart.clone())
            .collect();
        assert_eq!(reps, vec![Word::identity(), w("x1")]);
        assert!(member_edge(&h, 0, 1).unwrap());
        assert_eq!(triple(&h), (2, 2, 2));
    }

    #[test]
    fn lollipop_is_malnormal() {
        let h = core(2, &["x1 x2 X1"]);
        assert!(!member_edge(&h, 0, 1).unwrap());
        assert_eq!(triple(&h), (1, 1, 1));
    }

    #[test]
    fn trivial_subgroup_has_zero_invariants() {
        let h = core(2, &[]);
        assert_eq!(triple(&h), (0, 0, 0));
        assert!(!member_edge(&h, 0, 0).unwrap());
    }

    #[test]
    fn distinctness_examples() {
        let h = core(1, &["x1 x1"]);
        let reps = [Word::identity(), w("x1")];
        assert!(distinctness(&h, &reps, Distinctness::Essential));
        assert!(distinctness(&h, &reps, Distinctness::Strong));
        let rose = core(4, &["x1", "x2"]);
        assert!(distinctness(
            &rose,
            &[Word::identity(), w("x1 x3 x2")],
            Distinctness::Strong
        ));
        assert!(!distinctness(
            &rose,
            &[Word::identity(), w("x3"), w("x1 x3 x2")],
            Distinctness::Strong
        ));
        assert!(!distinctness(
            &rose,
            &[w("x1"), w("x2")],
            Distinctness::Essential
        ));
    }

    #[test]
    fn cyclic_subgroups_of_higher_powers() {
        // <x1^n> in F_1 is normal of index n: every coset meets it fully.
        for n in 1..=5 {
            let gen = vec!["x1"; n].join(" ");
            let h = core(1, &[&gen]);
            assert_eq!(triple(&h), (n, n, n), "n = {n}");
        }
    }

    #[test]
    fn certificates_verify() {
        for gens in [
            &["x1 x1"][..],
            &["x1 x2 X1", "x2 x2"],
            &["x1 x2 x1", "X2 x1 x1"],
            &["x1", "x2 x1 X2"],
        ] {
            let h = core(2, gens);
            let report = invariants_free(&h);
            let problems = report.verify(&h, &ExtensionSpec::free(2).unwrap()).unwrap();
            assert!(problems.is_empty(), "{gens:?}: {problems:?}");
        }
    }
}
