//! Theory registry: named axioms, axiom schemas with side conditions, and the
//! extension order between theories. Built-in theories come from an embedded
//! TOML manifest; further manifests can be layered on top.

mod schema;

use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use serde::Deserialize;

use crate::syntax::{parse_formula, Formula};

pub use schema::{instantiate, Instance, ParamKind, SchemaId, SchemaInstanceRequest, SchemaParam, ALL_SCHEMAS};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("unknown theory {0}")]
    UnknownTheory(String),
    #[error("unknown schema {0}")]
    UnknownSchema(String),
    #[error("theory {theory} has no axiom or schema named {name}")]
    UnknownAxiom { theory: String, name: String },
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("bad schema parameters: {0}")]
    BadParams(String),
    #[error("manifest: {0}")]
    Manifest(String),
}

pub type TheoryId = String;

#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub id: TheoryId,
    pub extends: Option<TheoryId>,
    pub classical: bool,
    pub axioms: Vec<(String, Formula)>,
    pub schemas: Vec<SchemaId>,
    pub doc: String,
}

#[derive(Debug, Deserialize)]
struct ManifestFile {
    #[serde(default)]
    theory: Vec<ManifestTheory>,
}

#[derive(Debug, Deserialize)]
struct ManifestTheory {
    id: String,
    extends: Option<String>,
    #[serde(default)]
    classical: bool,
    #[serde(default)]
    schemas: Vec<String>,
    #[serde(default)]
    axioms: Vec<ManifestAxiom>,
    #[serde(default)]
    doc: String,
}

#[derive(Debug, Deserialize)]
struct ManifestAxiom {
    name: String,
    formula: String,
}

#[derive(Debug, Clone, Default)]
pub struct TheoryRegistry {
    theories: BTreeMap<TheoryId, Theory>,
}

const BUILTIN_MANIFEST: &str = include_str!("../../../../configs/theories.toml");

static BUILTIN: Lazy<TheoryRegistry> = Lazy::new(|| {
    let mut r = TheoryRegistry::default();
    r.load_manifest(BUILTIN_MANIFEST).expect("built-in theory manifest");
    r
});

impl TheoryRegistry {
    pub fn builtin() -> &'static TheoryRegistry {
        &BUILTIN
    }

    /// Adds the theories of a manifest. Parents must already be present or
    /// appear earlier in the same manifest.
    pub fn load_manifest(&mut self, text: &str) -> Result<(), TheoryError> {
        let file: ManifestFile = toml::from_str(text).map_err(|e| TheoryError::Manifest(e.to_string()))?;
        for t in file.theory {
            if self.theories.contains_key(&t.id) {
                return Err(TheoryError::Manifest(format!("duplicate theory {}", t.id)));
            }
            if let Some(p) = &t.extends {
                if !self.theories.contains_key(p) {
                    return Err(TheoryError::Manifest(format!("{} extends unknown theory {p}", t.id)));
                }
            }
            let mut axioms = Vec::new();
            for a in t.axioms {
                let f = parse_formula(&a.formula)
                    .map_err(|e| TheoryError::Manifest(format!("{}.{}: {e}", t.id, a.name)))?;
                if !f.is_closed() {
                    return Err(TheoryError::Manifest(format!("{}.{} is not closed", t.id, a.name)));
                }
                axioms.push((a.name, f));
            }
            let schemas = t.schemas.iter().map(|s| s.parse()).collect::<Result<Vec<SchemaId>, _>>()?;
            let theory =
                Theory { id: t.id.clone(), extends: t.extends, classical: t.classical, axioms, schemas, doc: t.doc };
            self.theories.insert(t.id, theory);
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&Theory, TheoryError> {
        self.theories.get(id).ok_or_else(|| TheoryError::UnknownTheory(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.theories.keys().map(|s| s.as_str())
    }

    /// The theory itself followed by its ancestors.
    pub fn chain(&self, id: &str) -> Result<Vec<&Theory>, TheoryError> {
        let mut out = Vec::new();
        let mut cur = Some(id.to_string());
        while let Some(c) = cur {
            let t = self.get(&c)?;
            out.push(t);
            cur = t.extends.clone();
        }
        Ok(out)
    }

    pub fn is_classical(&self, id: &str) -> Result<bool, TheoryError> {
        Ok(self.chain(id)?.iter().any(|t| t.classical))
    }

    /// Whether every theorem of `base` is a theorem of `ext`.
    pub fn extends(&self, ext: &str, base: &str) -> Result<bool, TheoryError> {
        if self.chain(ext)?.iter().any(|t| t.id == base) {
            return Ok(true);
        }
        // Pure logic is contained in every theory of matching strength.
        let pure = self.theory_axioms(base)?.is_empty() && self.schemas(base)?.is_empty();
        Ok(pure && (!self.is_classical(base)? || self.is_classical(ext)?))
    }

    /// Named axioms including inherited ones.
    pub fn theory_axioms(&self, id: &str) -> Result<Vec<(String, Formula)>, TheoryError> {
        let mut chain = self.chain(id)?;
        chain.reverse();
        Ok(chain.iter().flat_map(|t| t.axioms.iter().cloned()).collect())
    }

    pub fn schemas(&self, id: &str) -> Result<Vec<SchemaId>, TheoryError> {
        let mut chain = self.chain(id)?;
        chain.reverse();
        let mut out: Vec<SchemaId> = Vec::new();
        for t in chain {
            for s in &t.schemas {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
        }
        Ok(out)
    }

    pub fn axiom(&self, id: &str, name: &str) -> Result<Formula, TheoryError> {
        self.theory_axioms(id)?
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| TheoryError::UnknownAxiom { theory: id.to_string(), name: name.to_string() })
    }

    pub fn has_schema(&self, id: &str, s: SchemaId) -> Result<bool, TheoryError> {
        Ok(self.schemas(id)?.contains(&s))
    }
}
