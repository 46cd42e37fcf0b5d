//! Proof kernel: Lemmon-style natural deduction with explicit dependency
//! sets, a script format, and elaboration of derived rules into core steps.
//!
//! Only [`check::Checker`] is trusted. Everything else (the script parser,
//! macro expansion, propositional search, the decidability generator)
//! produces ordinary lines that the checker re-validates.

mod check;
mod decide;
mod elab;
pub mod library;
mod matching;
mod proof;
pub mod script;

pub use check::{check, check_with, CheckError, Checker, Judgment, LemmaEntry, LemmaEnv};
pub use decide::{decide_into, derive_decidability, derive_decidability_in, DecideCtx, DecideError};
pub use elab::{LemmaReport, ScriptFailure, Session};
pub use matching::{find_instance, replaces, term_alpha_eq};
pub use proof::{BuildError, Label, Line, Proof, ProofBuilder, Step};
pub use script::{parse_script, Marker, RawJust, Script, ScriptError};
