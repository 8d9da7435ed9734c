//! Exact height, width and weak width of finitely generated subgroups of
//! free groups, and of free groups extended by a finite cyclic group that
//! permutes the generators.
//!
//! Subgroups are represented by Stallings core graphs ([`CoreGraph`]).
//! Intersections of conjugates are read off fiber products
//! ([`pullback2`], [`pullback_n`]) and double cosets are recognized by
//! folded automata ([`DoubleCosetAutomaton`]).

pub mod bounds;
pub mod corpus;
pub mod double_coset;
pub mod error;
pub mod extension;
mod fold;
pub mod free;
pub mod graph;
pub mod oracle;
pub mod problem;
pub mod pullback;
pub mod report;
pub mod search;
pub mod word;

pub use bounds::{ball_count, qc_constant, verify_bounds, HyperbolicContext, VerificationReport};
pub use corpus::{random_corpus, CorpusConfig, CorpusEntry};
pub use double_coset::{DoubleCosetAnswer, DoubleCosetAutomaton, DoubleCosetQuery};
pub use error::{Error, Result};
pub use extension::{
    ext_distinctness, invariants_ext, node_graph, Distinctness, ExtElement, ExtOp, ExtensionSpec,
};
pub use free::{
    distinctness, height_free, invariants_free, member_edge, weak_width_free, width_free,
};
pub use graph::{CoreGraph, CosetLocation};
pub use oracle::{compare, oracle, OracleComparison, OracleConfig, OracleReport};
pub use problem::{parse_problem, GroupSpec, Problem, ProblemError, ProblemFile};
pub use pullback::{pullback2, pullback_n, PullbackComponent};
pub use report::InvariantReport;
pub use word::{Alphabet, GeneratorPermutation, Letter, Word};
