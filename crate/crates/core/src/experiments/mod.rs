//! Reproducible experiment pipelines: squeeze runs, finite decidedness and
//! categoricity, interpretability and `Fund`, and informal-rigour
//! assemblies. Every report carries a [`ReportHeader`].

mod assembly;
mod decided;
mod interp;
mod report;
mod squeeze;

use crate::prover::ProverError;
use crate::semantics::SemError;

pub use assembly::{AssemblyAudit, KreiselianAssembly, Principle};
pub use decided::{
    categoricity_check, decided_by, samples as theories, Categoricity, CategoricityReport, Decidedness,
    DecidednessQuery, DecidednessReport, ModeDivergence,
};
pub use interp::{
    fund, induced_structure, interpretability_search, samples as structures, verify_interpretation, FundReport,
    FundVerdict, InterpResult, Interpretation,
};
pub use report::{config_hash, ReportHeader, TOOL, VERSION};
pub use squeeze::{
    capped_monadic_structures, monadic_formulas, prop_counts, squeeze_run, Answer, Decider, Fragment, SqueezeConfig,
    SqueezeReport, Violation, ViolationKind,
};

#[derive(Debug, thiserror::Error)]
pub enum ExpError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Semantics(#[from] SemError),
    #[error("internal error: {0}")]
    Internal(String),
}
