//! Problem files: the ambient group, a generating set for `H` and run
//! options, as JSON.
//!
//! ```json
//! {"group": {"type": "cyclic_extension", "rank": 4, "order": 4, "perm": [2, 3, 4, 1]},
//!  "subgroup": ["x1", "x2"],
//!  "options": {"radius": 3}}
//! ```

use serde::{Deserialize, Serialize};

use crate::extension::ExtensionSpec;
use crate::graph::CoreGraph;
use crate::word::{Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Free {
        rank: usize,
    },
    CyclicExtension {
        rank: usize,
        order: usize,
        perm: Vec<usize>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub group: GroupSpec,
    pub subgroup: Vec<String>,
    #[serde(default)]
    pub options: ProblemOptions,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub spec: ExtensionSpec,
    pub generators: Vec<Word>,
    pub core: CoreGraph,
}

impl Problem {
    pub fn is_extension(&self) -> bool {
        matches!(self.file.group, GroupSpec::CyclicExtension { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", render(.0))]
    Invalid(Vec<Violation>),
}

fn render(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("{}: {}", v.path, v.message))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn parse_problem(bytes: &[u8]) -> Result<Problem, ProblemError> {
    let file: ProblemFile = serde_json::from_slice(bytes).map_err(|e| ProblemError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate(file)
}

fn violation(path: &str, message: impl Into<String>) -> Violation {
    Violation {
        path: path.into(),
        message: message.into(),
    }
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&p| (1..=perm.len()).contains(&p) && !std::mem::replace(&mut seen[p - 1], true))
}

pub fn validate(file: ProblemFile) -> Result<Problem, ProblemError> {
    let mut violations = Vec::new();
    let rank = match &file.group {
        GroupSpec::Free { rank } | GroupSpec::CyclicExtension { rank, .. } => *rank,
    };
    if rank == 0 {
        violations.push(violation("group.rank", "must be at least 1"));
    }
    if let GroupSpec::CyclicExtension { order, perm, .. } = &file.group {
        if *order == 0 {
            violations.push(violation("group.order", "must be at least 1"));
        }
        if perm.len() != rank {
            violations.push(violation(
                "group.perm",
                format!("has {} entries for rank {rank}", perm.len()),
            ));
        }
        if !is_permutation(perm) {
            violations.push(violation("group.perm", "not a permutation"));
        }
    }
    let alphabet = Alphabet::new(rank.max(1)).expect("positive");
    let mut generators = Vec::new();
    for (i, text) in file.subgroup.iter().enumerate() {
        match alphabet.parse(text) {
            Ok(w) if rank > 0 => generators.push(w),
            Ok(_) => {}
            Err(e) => violations.push(violation(&format!("subgroup[{i}]"), e.to_string())),
        }
    }
    let spec = match (&file.group, violations.is_empty()) {
        (_, false) => None,
        (GroupSpec::Free { rank }, true) => ExtensionSpec::free(*rank).ok(),
        (GroupSpec::CyclicExtension { order, perm, .. }, true) => {
            match ExtensionSpec::new(perm.clone(), *order) {
                Ok(spec) => Some(spec),
                Err(e) => {
                    violations.push(violation("group.perm", e.to_string()));
                    None
                }
            }
        }
    };
    match spec {
        Some(spec) if violations.is_empty() => {
            let core = CoreGraph::build(spec.alphabet(), &generators).expect("generators checked");
            Ok(Problem {
                file,
                spec,
                generators,
                core,
            })
        }
        _ => Err(ProblemError::Invalid(violations)),
    }
}
