//! Exact-arithmetic toolkit for first-order rational Gödel logic and its
//! ultrametric extension.

pub mod cli;
pub mod modelsearch;
pub mod proofkernel;
pub mod semantics;
pub mod syntax;
pub mod truthval;
pub mod ultrametric;
