//! Intuitionistic propositional decisions: derivability by contraction-free
//! search, countermodels by exhaustive Kripke frame search.

use crate::kernel::{check, Proof, ProofBuilder};
use crate::semantics::{enumerate_models, kripke_eval, KripkeModel};
use crate::syntax::{is_propositional, Formula};

use super::ipc::{emit_term, search, Atoms, Search};
use super::kalmar::{letters, truth_table_counterexample};
use super::{Certificate, Countermodel, ProverError, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IpcBudget {
    /// Step budget of the sequent search.
    pub search_steps: u64,
    /// Largest frame tried by the countermodel search.
    pub max_worlds: usize,
}

impl Default for IpcBudget {
    fn default() -> Self {
        IpcBudget { search_steps: super::ipc::DEFAULT_BUDGET, max_worlds: 4 }
    }
}

/// Outcome of [`ipc_decide`]. `derivable` is the search's answer even when
/// no countermodel was found within the frame bound.
#[derive(Debug, Clone)]
pub struct IpcDecision {
    pub derivable: bool,
    pub verdict: Verdict,
}

/// The smallest rooted Kripke model whose root does not force `phi`.
pub fn kripke_countermodel(phi: &Formula, max_worlds: usize) -> Result<Option<KripkeModel>, ProverError> {
    let ls = letters(phi);
    for k in enumerate_models(&ls, max_worlds) {
        if !kripke_eval(&k, 0, phi).map_err(|e| ProverError::Internal(e.to_string()))? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// A kernel proof of `phi` in `Logic`, if the sequent search finds one.
pub fn ipc_proof(phi: &Formula, budget: u64) -> Result<Option<Proof>, ProverError> {
    let mut atoms = Atoms::default();
    let (res, g4) = search(&mut atoms, &[], phi, budget);
    match res {
        Search::Proved(term) => {
            let mut b = ProofBuilder::new("");
            emit_term(&mut b, &atoms, &g4.hyps, &[], &term);
            Ok(Some(b.finish("ipc", "Logic", phi.clone())))
        }
        Search::Unprovable => Ok(None),
        Search::Budget => Err(ProverError::Budget(format!("sequent search exceeded {budget} steps"))),
    }
}

/// Decides intuitionistic propositional derivability. A proof is returned
/// as a kernel proof in `Logic` and re-checked; a refutation carries the
/// smallest Kripke countermodel within the frame bound.
pub fn ipc_decide(phi: &Formula, budget: IpcBudget) -> Result<IpcDecision, ProverError> {
    if !is_propositional(phi) {
        return Err(ProverError::Unsupported(format!("{phi} is not propositional")));
    }
    if let Some(p) = ipc_proof(phi, budget.search_steps)? {
        check(&p, "Logic").map_err(|e| ProverError::Internal(format!("emitted proof rejected: {e}")))?;
        return Ok(IpcDecision { derivable: true, verdict: Verdict::Proved(Certificate::Proof(p)) });
    }
    let verdict = match kripke_countermodel(phi, budget.max_worlds)? {
        Some(k) => Verdict::Refuted(Countermodel::Kripke(k)),
        None => Verdict::Exhausted(format!("not derivable; no countermodel with at most {} worlds", budget.max_worlds)),
    };
    Ok(IpcDecision { derivable: false, verdict })
}

/// Whether a classical tautology's double negation is intuitionistically
/// derivable. `None` if `phi` is not a tautology.
pub fn glivenko(phi: &Formula, budget: IpcBudget) -> Result<Option<bool>, ProverError> {
    if !is_propositional(phi) {
        return Err(ProverError::Unsupported(format!("{phi} is not propositional")));
    }
    if truth_table_counterexample(phi).is_some() {
        return Ok(None);
    }
    let nn = Formula::not(Formula::not(phi.clone()));
    Ok(Some(ipc_decide(&nn, budget)?.derivable))
}
