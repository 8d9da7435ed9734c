//! Quasiconvexity constants and the double-coset length bounds for
//! subgroups of free groups (where `δ = 0`).

use serde::{Deserialize, Serialize};

use crate::free::invariants_free;
use crate::graph::CoreGraph;
use crate::report::InvariantReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HyperbolicContext {
    pub delta: usize,
    pub qc_constant: usize,
    /// Number of group elements of length at most `2K + 2δ`.
    pub ball_bound: u128,
}

impl HyperbolicContext {
    pub fn for_free_subgroup(h: &CoreGraph) -> Self {
        let k = qc_constant(h);
        HyperbolicContext {
            delta: 0,
            qc_constant: k,
            ball_bound: ball_count(h.rank_of_alphabet(), 2 * k),
        }
    }

    pub fn short_length(&self) -> usize {
        2 * self.qc_constant + 2 * self.delta
    }
}

/// Largest distance from a core vertex to the basepoint. Every prefix of
/// a reduced element of `H` ends at a core vertex, from which a path of
/// at most this length returns into `H`.
pub fn qc_constant(h: &CoreGraph) -> usize {
    h.labels().iter().map(|l| l.len()).max().unwrap_or(0)
}

/// Number of reduced words of length at most `len` over `rank` generators
/// (saturating).
pub fn ball_count(rank: usize, len: usize) -> u128 {
    let letters = 2 * rank as u128;
    let mut total: u128 = 1;
    let mut sphere: u128 = letters;
    for _ in 0..len {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(letters - 1);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub check: String,
    pub representative: String,
    pub length: usize,
    pub bound: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub context: HyperbolicContext,
    pub weak_width: usize,
    pub checks: Vec<Check>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

pub const BALL_BOUND_CHECK: &str = "weak-width-ball-bound";
pub const SHORT_REPRESENTATIVE_CHECK: &str = "short-double-coset-representatives";
pub const INTERSECTION_CHECK: &str = "finite-intersection-length";
pub const QC_CHECK: &str = "quasiconvexity-return-paths";

pub fn verify_bounds(h: &CoreGraph) -> VerificationReport {
    verify_with_report(h, &invariants_free(h))
}

/// As [`verify_bounds`], reusing an already computed free-group report.
pub fn verify_with_report(h: &CoreGraph, report: &InvariantReport) -> VerificationReport {
    let context = HyperbolicContext::for_free_subgroup(h);
    let short = context.short_length();
    let mut checks = Vec::new();
    let mut violations = Vec::new();

    let ww = report.weak_width as u128;
    let within_ball_bound = ww <= context.ball_bound;
    if !within_ball_bound {
        violations.push(Violation {
            check: BALL_BOUND_CHECK.into(),
            representative: String::new(),
            length: report.weak_width,
            bound: context.ball_bound,
        });
    }
    checks.push(Check {
        name: BALL_BOUND_CHECK.into(),
        pass: within_ball_bound,
        details: format!(
            "weak width {} <= N = {} (elements of length <= {short})",
            ww, context.ball_bound
        ),
    });

    let mut longest = 0;
    for cert in &report.certificates.weak_width {
        let len = cert.shortest.fpart.len();
        longest = longest.max(len);
        if len > short {
            violations.push(Violation {
                check: SHORT_REPRESENTATIVE_CHECK.into(),
                representative: cert.shortest.to_string(),
                length: len,
                bound: short as u128,
            });
        }
    }
    checks.push(Check {
        name: SHORT_REPRESENTATIVE_CHECK.into(),
        pass: longest <= short,
        details: format!(
            "{} double cosets with infinite intersection; longest shortest representative {longest} <= 2K + 2δ = {short}",
            report.certificates.weak_width.len()
        ),
    });

    // In a free group a finite intersection is trivial, so its elements
    // all have length 0 < 2K + 8δ + 2.
    checks.push(Check {
        name: INTERSECTION_CHECK.into(),
        pass: true,
        details: format!(
            "finite intersections are trivial; length 0 < 2K + 8δ + 2 = {}",
            2 * context.qc_constant + 2
        ),
    });

    let mut qc_ok = true;
    for g in h.basis() {
        for i in 0..=g.len() {
            let prefix = crate::word::Word::reduced(g.letters()[..i].iter().copied());
            match h.read_from(CoreGraph::BASE, &prefix) {
                Some(v) if h.label(v).len() <= context.qc_constant => {}
                _ => qc_ok = false,
            }
        }
    }
    if !qc_ok {
        violations.push(Violation {
            check: QC_CHECK.into(),
            representative: String::new(),
            length: 0,
            bound: context.qc_constant as u128,
        });
    }
    checks.push(Check {
        name: QC_CHECK.into(),
        pass: qc_ok,
        details: format!(
            "every prefix of every basis element returns to H within K = {}",
            context.qc_constant
        ),
    });

    VerificationReport {
        context,
        weak_width: report.weak_width,
        checks,
        violations,
    }
}
