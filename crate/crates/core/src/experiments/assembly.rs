//! Informal-rigour assemblies as data: the vocabulary classes, the
//! principle sets and the theories they combine into.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::derivations::Catalog;
use crate::syntax::{parse_formula, Formula, Var};
use crate::theories::{instantiate, SchemaId, SchemaInstanceRequest, SchemaParam, TheoryRegistry};

use super::ExpError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Principle {
    pub label: String,
    /// The schema this principle names, if it is one.
    pub schema: Option<String>,
    /// A representative formula (an instance, for schemas).
    pub formula: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreiselianAssembly {
    pub name: String,
    /// Vocabulary classes by label: common, precise, joint, novel, Kreiselian.
    pub vocabulary: BTreeMap<String, Vec<String>>,
    /// Common predicates with the precise predicates that implement them.
    pub implementations: BTreeMap<String, String>,
    pub gamma1: Vec<Principle>,
    pub gamma2_c: Vec<Principle>,
    pub gamma2_j: Vec<Principle>,
    pub gamma2_k: Vec<Principle>,
    pub precise_theory: String,
    pub kreiselian_theory: String,
    /// Catalog entries that derive the target claim in the Kreiselian theory.
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyAudit {
    pub principles: usize,
    pub added_schemas: Vec<String>,
    pub evidence: Vec<String>,
}

fn schema_principle(id: SchemaId, matrix: &str, note: &str) -> Principle {
    let a = parse_formula(matrix).expect("sample matrix parses");
    let req =
        SchemaInstanceRequest { schema: id, params: vec![SchemaParam::Var(Var::nat("n")), SchemaParam::Formula(a)] };
    let inst = instantiate(&req).expect("sample instance");
    Principle {
        label: id.name().into(),
        schema: Some(id.name().into()),
        formula: inst.closed.to_string(),
        note: note.into(),
    }
}

impl KreiselianAssembly {
    /// The creating-subject case: no common vocabulary, the creating subject
    /// as novel vocabulary, and CS as the only discovered principles.
    pub fn creating_subject() -> KreiselianAssembly {
        let vocab = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let precise = vocab(&["0", "S", "+", "*", "<", "=", "application", "<..>", "#", "bar", "proj", "chi"]);
        let mut kreiselian = precise.clone();
        kreiselian.push("box".into());
        KreiselianAssembly {
            name: "creating-subject".into(),
            vocabulary: BTreeMap::from([
                ("common".into(), vec![]),
                ("precise".into(), precise),
                ("joint".into(), vec![]),
                ("novel".into(), vocab(&["box"])),
                ("kreiselian".into(), kreiselian),
            ]),
            implementations: BTreeMap::new(),
            gamma1: vec![],
            gamma2_c: vec![],
            gamma2_j: vec![],
            gamma2_k: vec![
                schema_principle(SchemaId::Cs1, "a(0) = 0", "the subject has or has not evidence at each stage"),
                schema_principle(SchemaId::Cs2, "a(0) = 0", "truth implies the subject cannot fail to find evidence"),
                schema_principle(SchemaId::Cs3, "a(0) = 0", "evidence at some stage implies truth"),
            ],
            precise_theory: "FIM0+".into(),
            kreiselian_theory: "FIM0+CS".into(),
            evidence: vec!["negglem".into(), "neggmp".into(), "gmp_conditional".into()],
        }
    }

    pub fn gamma2(&self) -> impl Iterator<Item = &Principle> {
        self.gamma1.iter().chain(&self.gamma2_c).chain(&self.gamma2_j).chain(&self.gamma2_k)
    }

    /// Checks that every principle parses, that the registered Kreiselian
    /// theory adds to the precise theory exactly the schemas of Γ₂, and that
    /// the evidence entries exist and are checked in the Kreiselian theory.
    pub fn validate(&self, registry: &TheoryRegistry, catalog: &Catalog) -> Result<AssemblyAudit, ExpError> {
        let bad = |m: String| ExpError::Config(format!("{}: {m}", self.name));
        for p in self.gamma2() {
            parse_formula(&p.formula).map_err(|e| bad(format!("{}: {e}", p.label)))?;
        }
        if !registry.extends(&self.kreiselian_theory, &self.precise_theory).map_err(|e| bad(e.to_string()))? {
            return Err(bad(format!("{} does not extend {}", self.kreiselian_theory, self.precise_theory)));
        }
        let names = |id: &str| -> Result<BTreeSet<String>, ExpError> {
            Ok(registry.schemas(id).map_err(|e| bad(e.to_string()))?.iter().map(|s| s.name().to_string()).collect())
        };
        let added: BTreeSet<String> =
            names(&self.kreiselian_theory)?.difference(&names(&self.precise_theory)?).cloned().collect();
        let claimed: BTreeSet<String> = self.gamma2().filter_map(|p| p.schema.clone()).collect();
        if added != claimed {
            return Err(bad(format!("registered schemas {added:?} differ from the assembly's {claimed:?}")));
        }
        let axioms = |id: &str| -> Result<Vec<(String, Formula)>, ExpError> {
            registry.theory_axioms(id).map_err(|e| bad(e.to_string()))
        };
        if axioms(&self.kreiselian_theory)?.len() != axioms(&self.precise_theory)?.len() {
            return Err(bad("the Kreiselian theory adds axioms outside Γ₂".into()));
        }
        for id in &self.evidence {
            let e = catalog.get(id).ok_or_else(|| bad(format!("no catalog entry {id}")))?;
            if !registry.extends(&self.kreiselian_theory, &e.theory).map_err(|e| bad(e.to_string()))? {
                return Err(bad(format!("entry {id} is stated in {}, outside {}", e.theory, self.kreiselian_theory)));
            }
        }
        Ok(AssemblyAudit {
            principles: self.gamma2().count(),
            added_schemas: added.into_iter().collect(),
            evidence: self.evidence.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn creating_subject_assembly_is_consistent() {
        let a = KreiselianAssembly::creating_subject();
        let audit = a.validate(TheoryRegistry::builtin(), &Catalog::builtin()).unwrap();
        assert_eq!(audit.added_schemas, vec!["CS1", "CS2", "CS3"]);
        assert_eq!(audit.principles, 3);
        assert!(a.vocabulary["common"].is_empty());
    }

    #[test]
    fn mismatched_theories_are_caught() {
        let mut a = KreiselianAssembly::creating_subject();
        a.precise_theory = "FIM0".into();
        assert!(a.validate(TheoryRegistry::builtin(), &Catalog::builtin()).is_err());
        let mut b = KreiselianAssembly::creating_subject();
        b.gamma2_k.pop();
        assert!(b.validate(TheoryRegistry::builtin(), &Catalog::builtin()).is_err());
        let mut c = KreiselianAssembly::creating_subject();
        c.evidence.push("nonexistent".into());
        assert!(c.validate(TheoryRegistry::builtin(), &Catalog::builtin()).is_err());
    }
}
