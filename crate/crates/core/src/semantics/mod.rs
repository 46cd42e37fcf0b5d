//! Finite model theory: Tarski evaluation, bounded validity by exhaustive
//! enumeration, standard and Henkin second-order evaluation, isomorphism
//! search and propositional Kripke forcing.

mod enumerate;
mod eval;
mod iso;
mod kripke;
mod pool;
mod so;
mod structure;

pub use enumerate::{
    enumerate_structures, structure_count, validity_fo_bounded, BoundedValidity, EnumOptions, DEFAULT_STRUCTURE_BUDGET,
};
pub use eval::{eval_fo, signature_of, Assignment};
pub use iso::{iso_search, IsoResult};
pub use kripke::{enumerate_models, kripke_eval, rooted_frames, KripkeModel};
pub use pool::{formula_pool, pool_size};
pub use so::{comprehension_audit, eval_so, eval_so_with, Audit, SetFamily, SoBudget, SoStructure};
pub use structure::{all_relations, FiniteStructure, Relation, Signature, Tuple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemError {
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unassigned free variable {0}")]
    Unbound(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("ill-formed structure: {0}")]
    Structure(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("unknown world {0}")]
    UnknownWorld(usize),
    #[error("Henkin family has no relations of arity {0}")]
    MissingArity(usize),
}
