//! Proof search and decision procedures: a classical first-order tableau
//! with replayable certificates, truth-table completeness for classical
//! propositional logic, and intuitionistic propositional decisions.

mod intuitionistic;
pub mod ipc;
mod kalmar;
mod replay;
mod tableau;

use std::collections::BTreeMap;

use crate::kernel::Proof;
use crate::semantics::{FiniteStructure, KripkeModel};

pub use intuitionistic::{glivenko, ipc_decide, ipc_proof, kripke_countermodel, IpcBudget, IpcDecision};
pub use kalmar::{letters, prop_complete, truth, truth_table_counterexample, valuations, PropResult, Valuation};
pub use replay::{check_certificate, ReplayError};
pub use tableau::{tableau_closes_without_dne, tableau_prove, TableauBudget, TableauCertificate, TableauNode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProverError {
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
pub enum Certificate {
    Tableau(TableauCertificate),
    /// A kernel proof; re-check with [`crate::kernel::check`].
    Proof(Proof),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Countermodel {
    Structure(FiniteStructure),
    Kripke(KripkeModel),
    Valuation(BTreeMap<String, bool>),
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Proved(Certificate),
    Refuted(Countermodel),
    Exhausted(String),
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proved(_) => "proved",
            Verdict::Refuted(_) => "refuted",
            Verdict::Exhausted(_) => "exhausted",
        }
    }
}

#[cfg(test)]
mod tests;
