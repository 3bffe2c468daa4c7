//! Command-line front-end for the `heitler` library: flat run
//! configurations, deterministic CSV/JSON rendering, command execution, and
//! the bundled figure-dataset builders.

// Validation deliberately writes `!(x > 0.0)` and friends: the negation also
// rejects NaN, which a flipped comparison would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod exec;
pub mod figures;
pub mod render;
