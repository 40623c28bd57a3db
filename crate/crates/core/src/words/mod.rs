//! Free-group words, Stallings subgroup graphs, and the Whitehead
//! primitivity oracle. This module is the independent ground truth for the
//! constancy criterion when the ambient group is free.

mod stallings;
mod whitehead;
mod word;

pub use stallings::{stallings_fold, StallingsGraph};
pub use whitehead::{is_primitive_whitehead, whitehead_autos, WhiteheadAuto, MAX_WHITEHEAD_RANK};
pub use word::{Alphabet, Letter, Word};
