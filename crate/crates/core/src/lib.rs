//! Decide whether a finitely generated subgroup `H` of a free or virtually
//! free group `G` is a free factor, by testing constancy of extension counts
//! over finite witness groups.
//!
//! The central quantity is `h(G, H, gamma, P)`: the number of homomorphisms
//! `G -> P` into a finite group `P` whose restriction to `H` equals a given
//! `gamma: H -> P`. If `H` is a free factor of `G` then `h` does not depend
//! on `gamma`; conversely, a witness group `P` on which `h` varies certifies
//! that `H` is not a free factor. This crate implements both directions at
//! desk scale:
//!
//! * [`fingroup`]: exact small finite groups (the witness catalog),
//!   subgroup lattices and automorphism groups;
//! * [`words`]: free-group words, Stallings subgroup graphs, and the
//!   Whitehead primitivity oracle;
//! * [`gog`]: graphs of finite groups and their fundamental-group
//!   presentations (the input pipeline for virtually free groups);
//! * [`presentation`]: finitely presented groups and the exact
//!   homomorphism-counting kernel;
//! * [`factor`]: the constancy test, refutation scan, corestriction
//!   identity, and the finite-level isomorphism-extension test;
//! * [`wordmeasure`]: word-value distributions and expected fixed points
//!   under uniformly random homomorphisms to symmetric groups.
//!
//! All counting is exact: integer counts overflow-checked, expectations as
//! exact rationals. Parallel runs partition the search space and merge by
//! integer addition, so results are identical for any worker count.

pub mod factor;
pub mod fingroup;
pub mod gog;
pub mod presentation;
pub mod wordmeasure;
pub mod words;

use thiserror::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by construction, validation, and counting.
#[derive(Debug, Error)]
pub enum Error {
    /// A size or range precondition was violated.
    #[error("bound exceeded: {0}")]
    Bound(String),
    /// A multiplication table failed the group axioms.
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    /// A word used a generator that is not declared.
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    /// Word text that does not match the token syntax.
    #[error("cannot parse word: {0}")]
    ParseWord(String),
    /// A presentation failed validation.
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    /// A graph of groups failed validation or referenced missing data.
    #[error("invalid graph of groups: {0}")]
    InvalidGraph(String),
    /// A subgroup specification failed validation.
    #[error("invalid subgroup spec: {0}")]
    InvalidSubgroup(String),
    /// A map that was required to be a homomorphism is not one.
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    /// The backtracking node budget was exhausted; no count is reported.
    #[error("node budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    /// An exact integer count would overflow; the run aborts rather than wrap.
    #[error("count overflow: {0}")]
    Overflow(String),
    /// The partition identity failed, indicating an inconsistent subgroup
    /// embedding (its relators are not trivial in the ambient group).
    #[error("partition identity violated: {0}")]
    PartitionViolation(String),
    /// Two routes that must agree disagreed; indicates a defect, never
    /// expected on valid inputs.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
