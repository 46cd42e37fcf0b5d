//! The shipped derivation catalog: which scripts must check, what they must
//! prove, and which step markers they must carry.

mod corrupt;
mod lint;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::kernel::{library, LemmaReport, ScriptFailure, Session};
use crate::syntax::parse_formula;
use crate::theories::TheoryRegistry;

pub use corrupt::{classify, corrupt_line, proof_lines, CorruptionOutcome, ProofLineRef};
pub use lint::{step_lint, LintError, StepUse};

const BUILTIN_CATALOG: &str = include_str!("../../../../proofs/catalog.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Required,
    Optional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub file: String,
    pub lemmas: Vec<String>,
    /// Every lemma of the entry must be checked in an extension of this theory.
    pub theory: String,
    #[serde(default)]
    pub goal: Option<String>,
    pub anchor: String,
    pub status: Status,
    #[serde(default)]
    pub steps: Vec<String>,
    /// Lemmas the last listed lemma must cite rather than inline.
    #[serde(default)]
    pub cites: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Note {
    pub topic: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    #[serde(default, rename = "entry")]
    pub entries: Vec<CatalogEntry>,
    #[serde(default, rename = "note")]
    pub notes: Vec<Note>,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog manifest: {0}")]
    Manifest(String),
    #[error("{entry}: {failure}")]
    Script { entry: String, failure: ScriptFailure },
    #[error("{entry}: script {file} not found")]
    MissingFile { entry: String, file: String },
    #[error("{entry}: lemma {lemma} is not defined by {file}")]
    MissingLemma { entry: String, lemma: String, file: String },
    #[error("{entry}: lemma {lemma} proves {found}, expected {expected}")]
    GoalMismatch { entry: String, lemma: String, found: String, expected: String },
    #[error("{entry}: lemma {lemma} is checked in {found}, which does not extend {expected}")]
    Theory { entry: String, lemma: String, found: String, expected: String },
    #[error("{entry}: {lemma} does not cite {missing}")]
    Citation { entry: String, lemma: String, missing: String },
    #[error("{entry}: {error}")]
    Lint { entry: String, error: LintError },
}

impl CatalogError {
    /// The kernel or parser failure behind the error, if any.
    pub fn failure(&self) -> Option<&ScriptFailure> {
        match self {
            CatalogError::Script { failure, .. } => Some(failure),
            _ => None,
        }
    }
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_toml(BUILTIN_CATALOG).expect("built-in catalog")
    }

    pub fn from_toml(text: &str) -> Result<Catalog, CatalogError> {
        let c: Catalog = toml::from_str(text).map_err(|e| CatalogError::Manifest(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for e in &c.entries {
            if !seen.insert(&e.id) {
                return Err(CatalogError::Manifest(format!("duplicate entry {}", e.id)));
            }
            if e.lemmas.is_empty() {
                return Err(CatalogError::Manifest(format!("entry {} lists no lemmas", e.id)));
            }
        }
        Ok(c)
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// The catalog restricted to the given entry ids.
    pub fn only(&self, ids: &[&str]) -> Catalog {
        Catalog {
            entries: self.entries.iter().filter(|e| ids.contains(&e.id.as_str())).cloned().collect(),
            notes: self.notes.clone(),
        }
    }
}

/// Where script files come from. Overlays take precedence, which is how the
/// negative controls substitute a corrupted file.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    dir: Option<PathBuf>,
    overlay: BTreeMap<String, String>,
}

impl Sources {
    /// The scripts compiled into the crate.
    pub fn embedded() -> Sources {
        Sources::default()
    }

    /// Scripts read from a directory, falling back to the embedded copies.
    pub fn dir(path: impl Into<PathBuf>) -> Sources {
        Sources { dir: Some(path.into()), overlay: BTreeMap::new() }
    }

    pub fn with_override(mut self, file: &str, text: String) -> Sources {
        self.overlay.insert(file.to_string(), text);
        self
    }

    pub fn read(&self, file: &str) -> Option<String> {
        if let Some(t) = self.overlay.get(file) {
            return Some(t.clone());
        }
        if let Some(d) = &self.dir {
            if let Ok(t) = std::fs::read_to_string(d.join(file)) {
                return Some(t);
            }
        }
        library::embedded(file).map(str::to_string)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSummary {
    pub name: String,
    pub theory: String,
    pub goal: String,
    pub script_lines: usize,
    pub kernel_lines: usize,
    pub axioms: Vec<String>,
    pub lemmas: Vec<String>,
}

impl LemmaSummary {
    fn of(r: &LemmaReport) -> LemmaSummary {
        LemmaSummary {
            name: r.judgment.lemma.clone(),
            theory: r.judgment.theory.clone(),
            goal: r.judgment.goal.clone(),
            script_lines: r.script_lines,
            kernel_lines: r.judgment.lines,
            axioms: r.judgment.axioms.iter().cloned().collect(),
            lemmas: r.judgment.lemmas.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum EntryOutcome {
    Accepted,
    /// Only optional entries end up here; a required failure aborts the run.
    Rejected {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub file: String,
    pub status: Status,
    pub anchor: String,
    pub outcome: EntryOutcome,
    pub lemmas: Vec<LemmaSummary>,
    /// Axioms and schemas cited by the entry's lemmas, with theory prefixes.
    pub axioms: Vec<String>,
    pub script_lines: usize,
    pub kernel_lines: usize,
    pub gapfills: usize,
    pub steps: Vec<StepUse>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CatalogReport {
    pub entries: Vec<EntryReport>,
    pub notes: Vec<Note>,
    pub elapsed_ms: u128,
}

impl CatalogReport {
    pub fn accepted(&self) -> impl Iterator<Item = &EntryReport> {
        self.entries.iter().filter(|e| e.outcome == EntryOutcome::Accepted)
    }
}

/// Checks every entry of the catalog. Files are loaded once into a shared
/// session; a required entry that fails stops the run.
pub fn check_all(catalog: &Catalog, sources: &Sources) -> Result<CatalogReport, CatalogError> {
    let start = Instant::now();
    let registry = TheoryRegistry::builtin();
    let mut session = library::session();
    let mut loaded: BTreeMap<String, Result<(), String>> = BTreeMap::new();
    let mut out = CatalogReport { notes: catalog.notes.clone(), ..Default::default() };
    for entry in &catalog.entries {
        match check_entry(entry, sources, registry, &mut session, &mut loaded) {
            Ok(rep) => out.entries.push(rep),
            Err(e) if entry.status == Status::Optional => out.entries.push(EntryReport {
                id: entry.id.clone(),
                file: entry.file.clone(),
                status: entry.status,
                anchor: entry.anchor.clone(),
                outcome: EntryOutcome::Rejected { reason: e.to_string() },
                lemmas: vec![],
                axioms: vec![],
                script_lines: 0,
                kernel_lines: 0,
                gapfills: 0,
                steps: vec![],
            }),
            Err(e) => return Err(e),
        }
    }
    out.elapsed_ms = start.elapsed().as_millis();
    Ok(out)
}

fn check_entry(
    entry: &CatalogEntry,
    sources: &Sources,
    registry: &TheoryRegistry,
    session: &mut Session,
    loaded: &mut BTreeMap<String, Result<(), String>>,
) -> Result<EntryReport, CatalogError> {
    let id = || entry.id.clone();
    let text =
        sources.read(&entry.file).ok_or_else(|| CatalogError::MissingFile { entry: id(), file: entry.file.clone() })?;
    match loaded.get(&entry.file) {
        Some(Ok(())) => {}
        Some(Err(msg)) => {
            return Err(CatalogError::Manifest(format!("{}: {} failed earlier: {msg}", entry.id, entry.file)))
        }
        None => {
            let res = session.run(&text, &entry.file, &|n| sources.read(n));
            loaded.insert(entry.file.clone(), res.as_ref().map(|_| ()).map_err(|e| e.to_string()));
            res.map_err(|failure| CatalogError::Script { entry: id(), failure })?;
        }
    }
    let mut lemmas = Vec::new();
    for name in &entry.lemmas {
        let r =
            session.reports.iter().find(|r| &r.judgment.lemma == name && r.file == entry.file).ok_or_else(|| {
                CatalogError::MissingLemma { entry: id(), lemma: name.clone(), file: entry.file.clone() }
            })?;
        let ok = registry.extends(&r.judgment.theory, &entry.theory).unwrap_or(false);
        if !ok {
            return Err(CatalogError::Theory {
                entry: id(),
                lemma: name.clone(),
                found: r.judgment.theory.clone(),
                expected: entry.theory.clone(),
            });
        }
        lemmas.push(r);
    }
    let last = *lemmas.last().expect("entries list lemmas");
    if let Some(goal) = &entry.goal {
        let expected = parse_formula(goal).map_err(|e| CatalogError::Manifest(format!("{}: goal: {e}", entry.id)))?;
        if !expected.alpha_eq(&last.proof.goal) {
            return Err(CatalogError::GoalMismatch {
                entry: id(),
                lemma: last.judgment.lemma.clone(),
                found: last.proof.goal.to_string(),
                expected: expected.to_string(),
            });
        }
    }
    for c in &entry.cites {
        if !last.judgment.lemmas.contains(c) {
            return Err(CatalogError::Citation { entry: id(), lemma: last.judgment.lemma.clone(), missing: c.clone() });
        }
    }
    let steps = if entry.steps.is_empty() {
        vec![]
    } else {
        let tags: Vec<&str> = entry.steps.iter().map(|s| s.as_str()).collect();
        step_lint(&text, &entry.file, &tags).map_err(|error| CatalogError::Lint { entry: id(), error })?
    };
    let axioms: BTreeSet<String> = lemmas.iter().flat_map(|r| r.judgment.axioms.iter().cloned()).collect();
    Ok(EntryReport {
        id: id(),
        file: entry.file.clone(),
        status: entry.status,
        anchor: entry.anchor.clone(),
        outcome: EntryOutcome::Accepted,
        lemmas: lemmas.iter().map(|r| LemmaSummary::of(r)).collect(),
        axioms: axioms.into_iter().collect(),
        script_lines: lemmas.iter().map(|r| r.script_lines).sum(),
        kernel_lines: lemmas.iter().map(|r| r.judgment.lines).sum(),
        gapfills: text.lines().filter(|l| l.trim_start().starts_with("# gapfill")).count(),
        steps,
    })
}

#[cfg(test)]
mod tests;
