//! Tree-by-path boxslash products and the machinery around their stack
//! and queue layouts: exact solvers for small graphs, monotone sequence
//! predicates, subtree passes, and hexagonal-grid boundary analysis.

pub mod conflict;
pub mod graph;
pub mod hex;
pub mod layout;
pub mod passes;
pub mod selftest;
pub mod seq;
pub mod solver;
