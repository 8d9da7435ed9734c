//! Invariant reports and their certificates.
//!
//! Everything in a certificate can be re-checked with group operations
//! and core-graph membership alone; see [`InvariantReport::verify`].

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extension::{ext_distinctness, Distinctness, ExtElement, ExtensionSpec};
use crate::graph::CoreGraph;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvariantReport {
    pub weak_width: usize,
    pub height: usize,
    pub width: usize,
    pub exact: Exactness,
    /// Weak-width contributions of the double cosets `H w t^k H`, by `k`.
    pub per_twist_weak_width: Vec<usize>,
    pub certificates: Certificates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Exactness {
    pub weak_width: bool,
    pub height: bool,
    pub width: bool,
}

impl Exactness {
    pub fn all() -> Self {
        Exactness {
            weak_width: true,
            height: true,
            width: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificates {
    pub weak_width: Vec<DoubleCosetCertificate>,
    pub width: WidthCertificate,
    pub height: HeightCertificate,
}

/// A double coset `H g H` with `H ∩ g^-1 H g` infinite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DoubleCosetCertificate {
    pub twist: usize,
    pub representative: ExtElement,
    /// Element of the double coset with shortlex-least free part.
    pub shortest: ExtElement,
    /// A nontrivial element of `H ∩ g^-1 H g`.
    pub witness: Word,
}

/// The conjugate `g^-1 H g` for `g = coset_rep`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MemberNode {
    pub twist: usize,
    pub vertex: usize,
    pub coset_rep: ExtElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairWitness {
    pub first: usize,
    pub second: usize,
    pub witness: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WidthCertificate {
    pub members: Vec<MemberNode>,
    /// One common nontrivial element per pair of members (indices into
    /// `members`).
    pub pair_witnesses: Vec<PairWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeightCertificate {
    pub members: Vec<MemberNode>,
    /// A nontrivial element of every member.
    pub witness: Option<Word>,
}

impl InvariantReport {
    /// The report of a finite (here: trivial) subgroup.
    pub fn trivial(order: usize) -> Self {
        InvariantReport {
            weak_width: 0,
            height: 0,
            width: 0,
            exact: Exactness::all(),
            per_twist_weak_width: vec![0; order],
            certificates: Certificates::default(),
        }
    }

    /// Re-checks every certificate against `h` in the group `spec`,
    /// returning a description of each failure.
    pub fn verify(&self, h: &CoreGraph, spec: &ExtensionSpec) -> Result<Vec<String>> {
        let mut problems = Vec::new();
        let certs = &self.certificates;

        if certs.weak_width.len() != self.weak_width {
            problems.push(format!(
                "{} weak-width certificates for weak width {}",
                certs.weak_width.len(),
                self.weak_width
            ));
        }
        if self.per_twist_weak_width.iter().sum::<usize>() != self.weak_width {
            problems.push("per-twist counts do not add up to the weak width".into());
        }
        for c in &certs.weak_width {
            let g = &c.representative;
            if c.witness.is_empty()
                || !h.contains(&c.witness)
                || !spec.in_conjugate(h, g, &c.witness)?
            {
                problems.push(format!(
                    "witness {} is not a nontrivial element of H ∩ g^-1 H g for g = {g}",
                    c.witness
                ));
            }
            if c.twist != g.tpart
                || ext_distinctness(
                    h,
                    spec,
                    &[g.clone(), c.shortest.clone()],
                    Distinctness::Strong,
                )?
            {
                problems.push(format!(
                    "shortest element {} is not in H ({g}) H",
                    c.shortest
                ));
            }
        }
        let reps: Vec<ExtElement> = certs
            .weak_width
            .iter()
            .map(|c| c.representative.clone())
            .collect();
        if !ext_distinctness(h, spec, &reps, Distinctness::Strong)? {
            problems.push("weak-width representatives share a double coset".into());
        }

        let width = &certs.width;
        if width.members.len() != self.width {
            problems.push(format!(
                "{} width members for width {}",
                width.members.len(),
                self.width
            ));
        }
        self.check_members(h, spec, &width.members, "width", &mut problems)?;
        let n = width.members.len();
        for i in 0..n {
            for j in i + 1..n {
                let Some(pw) = width
                    .pair_witnesses
                    .iter()
                    .find(|p| p.first == i && p.second == j)
                else {
                    problems.push(format!("width members {i} and {j} have no common witness"));
                    continue;
                };
                let gi = &width.members[i].coset_rep;
                let gj = &width.members[j].coset_rep;
                if pw.witness.is_empty()
                    || !spec.in_conjugate(h, gi, &pw.witness)?
                    || !spec.in_conjugate(h, gj, &pw.witness)?
                {
                    problems.push(format!(
                        "witness {} does not lie in width members {i} and {j}",
                        pw.witness
                    ));
                }
            }
        }

        let height = &certs.height;
        if height.members.len() != self.height {
            problems.push(format!(
                "{} height members for height {}",
                height.members.len(),
                self.height
            ));
        }
        self.check_members(h, spec, &height.members, "height", &mut problems)?;
        if self.height > 0 {
            match &height.witness {
                Some(z) if !z.is_empty() => {
                    for (i, m) in height.members.iter().enumerate() {
                        if !spec.in_conjugate(h, &m.coset_rep, z)? {
                            problems.push(format!("height witness {z} is not in member {i}"));
                        }
                    }
                }
                _ => problems.push("missing height witness".into()),
            }
        }

        if self.height > self.width {
            problems.push(format!(
                "height {} exceeds width {}",
                self.height, self.width
            ));
        }
        Ok(problems)
    }

    fn check_members(
        &self,
        h: &CoreGraph,
        spec: &ExtensionSpec,
        members: &[MemberNode],
        what: &str,
        problems: &mut Vec<String>,
    ) -> Result<()> {
        let reps: Vec<ExtElement> = members.iter().map(|m| m.coset_rep.clone()).collect();
        if !ext_distinctness(h, spec, &reps, Distinctness::Essential)? {
            problems.push(format!("{what} members are not essentially distinct"));
        }
        Ok(())
    }
}
