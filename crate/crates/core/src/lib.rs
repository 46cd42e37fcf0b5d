//! Proof kernel, finite semantics and decision procedures for intuitionistic
//! and classical first-order theories, including a choice-sequence theory
//! with stage-indexed "box" formulas.

// Kernel errors carry the failing line and its context by value.
#![allow(clippy::result_large_err)]

pub mod derivations;
pub mod experiments;
pub mod kernel;
pub mod prover;
pub mod semantics;
pub mod syntax;
pub mod theories;

pub use syntax::{Formula, Sort, Term, Var};
