use super::*;

fn required() -> Vec<&'static str> {
    vec!["negglem", "glem_refutation_chain", "neggmp", "gmp_conditional", "wks_iff_cs", "sks_iff_scs2"]
}

#[test]
fn builtin_catalog_is_accepted() {
    let report = check_all(&Catalog::builtin(), &Sources::embedded()).unwrap();
    for id in required() {
        let e = report.entries.iter().find(|e| e.id == id).unwrap();
        assert_eq!(e.outcome, EntryOutcome::Accepted, "{id}");
    }
    let myhill = report.entries.iter().find(|e| e.id == "myhill_inconsistency").unwrap();
    assert!(matches!(myhill.outcome, EntryOutcome::Rejected { .. }));
    let neggmp = report.entries.iter().find(|e| e.id == "neggmp").unwrap();
    assert_eq!(neggmp.steps.len(), 23);
    assert!(neggmp.axioms.iter().any(|a| a.contains("BCN")));
    assert!(neggmp.lemmas.last().unwrap().lemmas.contains(&"glem_refutation_chain".to_string()));
}

#[test]
fn empty_catalog_is_ok() {
    let r = check_all(&Catalog::default(), &Sources::embedded()).unwrap();
    assert!(r.entries.is_empty());
    assert!(Catalog::from_toml("").unwrap().entries.is_empty());
}

#[test]
fn manifest_errors() {
    let dup = "[[entry]]\nid='a'\nfile='f'\nlemmas=['x']\ntheory='HA'\nanchor=''\nstatus='required'\n";
    assert!(Catalog::from_toml(&format!("{dup}{dup}")).is_err());
    assert!(Catalog::from_toml("[[entry]]\nid='a'\n").is_err());
}

#[test]
fn wrong_goal_and_theory_are_rejected() {
    let mut c = Catalog::builtin().only(&["gmp_conditional"]);
    c.entries[0].goal = Some("bot".into());
    assert!(matches!(check_all(&c, &Sources::embedded()), Err(CatalogError::GoalMismatch { .. })));
    let mut c = Catalog::builtin().only(&["gmp_conditional"]);
    c.entries[0].theory = "FIM0+sKS".into();
    assert!(matches!(check_all(&c, &Sources::embedded()), Err(CatalogError::Theory { .. })));
    let mut c = Catalog::builtin().only(&["gmp_conditional"]);
    c.entries[0].cites = vec!["add_comm".into()];
    assert!(matches!(check_all(&c, &Sources::embedded()), Err(CatalogError::Citation { .. })));
}

#[test]
fn missing_required_file_fails() {
    let mut c = Catalog::builtin().only(&["gmp_conditional"]);
    c.entries[0].file = "nope.prf".into();
    assert!(matches!(check_all(&c, &Sources::embedded()), Err(CatalogError::MissingFile { .. })));
}

#[test]
fn every_corrupted_neggmp_line_is_rejected_at_that_line() {
    let catalog = Catalog::builtin().only(&["neggmp"]);
    let text = library::embedded("neggmp.prf").unwrap();
    let lines = proof_lines(text, "neggmp.prf").unwrap();
    assert!(lines.len() > 100);
    let mut bad = Vec::new();
    for l in &lines {
        let corrupted = corrupt_line(text, "neggmp.prf", l.src_line).unwrap();
        let sources = Sources::embedded().with_override("neggmp.prf", corrupted);
        let outcome = classify(&check_all(&catalog, &sources), l);
        if outcome != CorruptionOutcome::Named {
            bad.push((l.clone(), outcome));
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn shipped_lemmas_recheck_in_extensions() {
    let registry = TheoryRegistry::builtin();
    let mut s = library::session();
    for (name, text) in library::SCRIPTS.iter().skip(1) {
        s.run(text, name, &|n| library::embedded(n).map(str::to_string)).unwrap();
    }
    let mut rechecked = 0;
    for r in &s.reports {
        for ext in registry.ids() {
            if ext != r.proof.theory && registry.extends(ext, &r.proof.theory).unwrap() {
                crate::kernel::Checker::new(registry, &s.lemmas)
                    .check(&r.proof, ext)
                    .unwrap_or_else(|e| panic!("{} in {ext}: {e}", r.proof.name));
                rechecked += 1;
            }
        }
    }
    assert!(rechecked > 10);
}
