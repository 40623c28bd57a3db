//! Command implementations, input schemas, and the result cache behind the
//! `freefactor` binary. Everything user-visible is deterministic: JSON
//! output is byte-stable across runs, worker counts, and cache state.

pub mod cache;
pub mod commands;
pub mod job;
pub mod render;

/// Exit code conventions: 0 success (scan: no witness found), 1 scan found
/// a witness, 2 any error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
