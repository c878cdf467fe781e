//! Keeps the book honest: each chapter is included verbatim as module
//! documentation, so `cargo test --doc` compiles and runs every Rust
//! snippet in `book/src/`. A snippet that drifts from the real API fails
//! the build instead of rotting on the page.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/hadamard-walk.md")]
pub mod hadamard_walk {}

#[doc = include_str!("../../../book/src/qbit-individuals.md")]
pub mod qbit_individuals {}

#[doc = include_str!("../../../book/src/walk-search.md")]
pub mod walk_search {}

#[doc = include_str!("../../../book/src/knapsack.md")]
pub mod knapsack {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
