use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::syntax::{subst, Formula, Term, Var};
use crate::theories::{instantiate, SchemaId, SchemaInstanceRequest, TheoryRegistry};

use super::matching::{find_instance, replaces};
use super::proof::{Label, Line, Proof, Step};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{lemma}: line {line} ({rule}): {message}{}", fmt_related(.related))]
pub struct CheckError {
    pub lemma: String,
    pub line: Label,
    pub rule: String,
    pub message: String,
    /// Premise and hypothesis labels involved in the failure.
    pub related: Vec<Label>,
    pub src_line: Option<usize>,
}

fn fmt_related(r: &[Label]) -> String {
    if r.is_empty() {
        String::new()
    } else {
        format!(" [related: {}]", r.join(", "))
    }
}

/// A proved lemma available for citation.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaEntry {
    pub theory: String,
    pub statement: Formula,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaEnv {
    entries: BTreeMap<String, LemmaEntry>,
}

impl LemmaEnv {
    pub fn new() -> LemmaEnv {
        LemmaEnv::default()
    }
    pub fn insert(&mut self, name: &str, theory: &str, statement: Formula) {
        self.entries.insert(name.to_string(), LemmaEntry { theory: theory.to_string(), statement });
    }
    pub fn get(&self, name: &str) -> Option<&LemmaEntry> {
        self.entries.get(name)
    }
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }
}

/// Result of a successful check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Judgment {
    pub lemma: String,
    pub theory: String,
    pub goal: String,
    pub lines: usize,
    pub axioms: BTreeSet<String>,
    pub lemmas: BTreeSet<String>,
}

struct Checked {
    formula: Formula,
    deps: BTreeSet<Label>,
    is_assumption: bool,
}

pub struct Checker<'a> {
    pub registry: &'a TheoryRegistry,
    pub lemmas: &'a LemmaEnv,
}

/// Whether `f` is `closed` with some leading universal quantifiers dropped.
fn strips_to(closed: &Formula, f: &Formula) -> bool {
    let mut cur = closed;
    loop {
        if cur.alpha_eq(f) {
            return true;
        }
        match cur {
            Formula::All(_, body) => cur = body,
            _ => return false,
        }
    }
}

impl<'a> Checker<'a> {
    pub fn new(registry: &'a TheoryRegistry, lemmas: &'a LemmaEnv) -> Checker<'a> {
        Checker { registry, lemmas }
    }

    /// Checks `proof` in theory `theory`.
    pub fn check(&self, proof: &Proof, theory: &str) -> Result<Judgment, CheckError> {
        let classical =
            self.registry.is_classical(theory).map_err(|e| self.err(proof, None, "theory", e.to_string()))?;
        let mut table: HashMap<&str, Checked> = HashMap::new();
        let mut used: BTreeSet<&str> = BTreeSet::new();
        let mut axioms = BTreeSet::new();
        let mut lemmas = BTreeSet::new();
        if proof.lines.is_empty() {
            return Err(self.err(proof, None, "proof", "the proof has no lines".into()));
        }
        for line in &proof.lines {
            if table.contains_key(line.label.as_str()) {
                return Err(self.err(proof, Some(line), "label", format!("duplicate label {}", line.label)));
            }
            for p in line.step.premises() {
                if !table.contains_key(p.as_str()) {
                    return Err(CheckError {
                        related: vec![p.clone()],
                        ..self.err(proof, Some(line), line.step.rule_name(), format!("cites unknown or later line {p}"))
                    });
                }
                used.insert(p.as_str());
            }
            let deps = self.step(proof, line, theory, classical, &table, &mut axioms, &mut lemmas).map_err(
                |(msg, mut related)| {
                    if related.is_empty() {
                        for p in line.step.premises() {
                            related.push(p.clone());
                            if let Some(c) = table.get(p.as_str()) {
                                related.extend(c.deps.iter().cloned());
                            }
                        }
                        related.dedup();
                    }
                    CheckError { related, ..self.err(proof, Some(line), line.step.rule_name(), msg) }
                },
            )?;
            table.insert(
                &line.label,
                Checked { formula: line.formula.clone(), deps, is_assumption: line.step == Step::Assume },
            );
        }
        let last = proof.lines.last().expect("nonempty");
        for line in &proof.lines[..proof.lines.len() - 1] {
            if !used.contains(line.label.as_str()) {
                return Err(self.err(proof, Some(line), "lint", format!("line {} is never used", line.label)));
            }
        }
        let fin = &table[last.label.as_str()];
        if !fin.deps.is_empty() {
            return Err(CheckError {
                related: fin.deps.iter().cloned().collect(),
                ..self.err(proof, Some(last), "conclusion", "the last line still depends on open assumptions".into())
            });
        }
        if !last.formula.alpha_eq(&proof.goal) {
            return Err(self.err(
                proof,
                Some(last),
                "conclusion",
                format!("the last line proves {} but the goal is {}", last.formula, proof.goal),
            ));
        }
        Ok(Judgment {
            lemma: proof.name.clone(),
            theory: theory.to_string(),
            goal: proof.goal.to_string(),
            lines: proof.lines.len(),
            axioms,
            lemmas,
        })
    }

    fn err(&self, proof: &Proof, line: Option<&Line>, rule: &str, message: String) -> CheckError {
        CheckError {
            lemma: proof.name.clone(),
            line: line.map(|l| l.label.clone()).unwrap_or_default(),
            rule: rule.to_string(),
            message,
            related: vec![],
            src_line: line.and_then(|l| l.src),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        _proof: &Proof,
        line: &Line,
        theory: &str,
        classical: bool,
        table: &HashMap<&str, Checked>,
        axioms: &mut BTreeSet<String>,
        lemmas: &mut BTreeSet<String>,
    ) -> Result<BTreeSet<Label>, (String, Vec<Label>)> {
        let r = &line.formula;
        let f = |l: &Label| &table[l.as_str()].formula;
        let d = |l: &Label| table[l.as_str()].deps.clone();
        let fail = |msg: String| Err((msg, vec![]));
        let expect = |ok: bool, msg: &dyn Fn() -> String| if ok { Ok(()) } else { Err((msg(), vec![])) };
        let union = |a: BTreeSet<Label>, b: BTreeSet<Label>| a.union(&b).cloned().collect::<BTreeSet<Label>>();
        let hyp = |h: &Label| -> Result<(), (String, Vec<Label>)> {
            if table[h.as_str()].is_assumption {
                Ok(())
            } else {
                Err((format!("line {h} is not an assumption"), vec![h.clone()]))
            }
        };
        let free_in_deps = |x: &Var, deps: &BTreeSet<Label>| -> Option<Label> {
            deps.iter().find(|h| table[h.as_str()].formula.has_free(x)).cloned()
        };
        match &line.step {
            Step::Assume => Ok(BTreeSet::from([line.label.clone()])),
            Step::Refl => match r {
                Formula::Eq(a, b) if super::matching::term_alpha_eq(a, b) => Ok(BTreeSet::new()),
                _ => fail(format!("{r} is not of the form t = t")),
            },
            Step::ReplEq { eq, target } => match f(eq) {
                Formula::Eq(s, t) => {
                    expect(replaces(f(target), r, s, t), &|| {
                        format!("{r} does not follow from line {target} by rewriting with {s} = {t}")
                    })?;
                    Ok(union(d(eq), d(target)))
                }
                other => fail(format!("line {eq} is not an equation: {other}")),
            },
            Step::AndI(a, b) => {
                expect(r.alpha_eq(&Formula::and(f(a).clone(), f(b).clone())), &|| {
                    format!("{r} is not the conjunction of lines {a} and {b}")
                })?;
                Ok(union(d(a), d(b)))
            }
            Step::AndE1(a) | Step::AndE2(a) => match f(a) {
                Formula::And(x, y) => {
                    let part = if matches!(line.step, Step::AndE1(_)) { x } else { y };
                    expect(part.alpha_eq(r), &|| format!("{r} is not a conjunct of line {a}"))?;
                    Ok(d(a))
                }
                other => fail(format!("line {a} is not a conjunction: {other}")),
            },
            Step::OrI1(a) | Step::OrI2(a) => match r {
                Formula::Or(x, y) => {
                    let part = if matches!(line.step, Step::OrI1(_)) { x } else { y };
                    expect(part.alpha_eq(f(a)), &|| format!("line {a} is not the chosen disjunct of {r}"))?;
                    Ok(d(a))
                }
                _ => fail(format!("{r} is not a disjunction")),
            },
            Step::OrE { disj, left_hyp, left, right_hyp, right } => {
                hyp(left_hyp)?;
                hyp(right_hyp)?;
                let (x, y) = match f(disj) {
                    Formula::Or(x, y) => (x, y),
                    other => return fail(format!("line {disj} is not a disjunction: {other}")),
                };
                expect(f(left_hyp).alpha_eq(x), &|| format!("assumption {left_hyp} is not the left disjunct"))?;
                expect(f(right_hyp).alpha_eq(y), &|| format!("assumption {right_hyp} is not the right disjunct"))?;
                expect(f(left).alpha_eq(r) && f(right).alpha_eq(r), &|| {
                    format!("both cases {left} and {right} must conclude {r}")
                })?;
                let mut out = d(disj);
                out.extend(d(left).into_iter().filter(|h| h != left_hyp));
                out.extend(d(right).into_iter().filter(|h| h != right_hyp));
                Ok(out)
            }
            Step::ImpI { hyp: h, body } => {
                hyp(h)?;
                expect(r.alpha_eq(&Formula::imp(f(h).clone(), f(body).clone())), &|| {
                    format!("{r} is not line {h} implies line {body}")
                })?;
                Ok(d(body).into_iter().filter(|x| x != h).collect())
            }
            Step::ImpE { imp, arg } => match f(imp) {
                Formula::Imp(x, y) => {
                    expect(x.alpha_eq(f(arg)), &|| format!("line {arg} is not the antecedent of line {imp}"))?;
                    expect(y.alpha_eq(r), &|| format!("{r} is not the consequent of line {imp}"))?;
                    Ok(union(d(imp), d(arg)))
                }
                other => fail(format!("line {imp} is not an implication: {other}")),
            },
            Step::BotE(a) => {
                expect(*f(a) == Formula::Bot, &|| format!("line {a} is not bot"))?;
                Ok(d(a))
            }
            Step::Dne(a) => {
                expect(classical, &|| format!("double negation elimination is not available in {theory}"))?;
                let inner = f(a).as_neg().and_then(|g| g.as_neg());
                expect(inner.is_some_and(|g| g.alpha_eq(r)), &|| format!("line {a} is not ~~({r})"))?;
                Ok(d(a))
            }
            Step::AllI { prem, eigen } => {
                let (v, body) = match r {
                    Formula::All(v, body) => (v, body),
                    _ => return fail(format!("{r} is not universal")),
                };
                expect(v.sort == eigen.sort, &|| format!("eigenvariable {eigen} has the wrong sort"))?;
                expect(subst(body, v, &Term::Var(eigen.clone())).alpha_eq(f(prem)), &|| {
                    format!("line {prem} is not the instance of {r} at {eigen}")
                })?;
                expect(!r.has_free(eigen), &|| format!("eigenvariable {eigen} is free in the conclusion"))?;
                let deps = d(prem);
                if let Some(h) = free_in_deps(eigen, &deps) {
                    return Err((
                        format!("eigenvariable {eigen} is free in open assumption {h}"),
                        vec![prem.clone(), h],
                    ));
                }
                Ok(deps)
            }
            Step::AllE { prem, term } => {
                let (v, body) = match f(prem) {
                    Formula::All(v, body) => (v, body),
                    other => return fail(format!("line {prem} is not universal: {other}")),
                };
                let t = match term {
                    Some(t) => t.clone(),
                    None => match find_instance(body, v, r) {
                        Some(t) => t,
                        None => return fail(format!("{r} is not an instance of line {prem}")),
                    },
                };
                expect(t.sort() == v.sort, &|| format!("term {t} has the wrong sort for {v}"))?;
                expect(subst(body, v, &t).alpha_eq(r), &|| format!("{r} is not the instance of line {prem} at {t}"))?;
                Ok(d(prem))
            }
            Step::ExI { prem, term } => {
                let (v, body) = match r {
                    Formula::Ex(v, body) => (v, body),
                    _ => return fail(format!("{r} is not existential")),
                };
                let t = match term {
                    Some(t) => t.clone(),
                    None => match find_instance(body, v, f(prem)) {
                        Some(t) => t,
                        None => return fail(format!("line {prem} is not an instance of {r}")),
                    },
                };
                expect(t.sort() == v.sort, &|| format!("term {t} has the wrong sort for {v}"))?;
                expect(subst(body, v, &t).alpha_eq(f(prem)), &|| {
                    format!("line {prem} is not the instance of {r} at {t}")
                })?;
                Ok(d(prem))
            }
            Step::ExE { exists, hyp: h, body, eigen } => {
                hyp(h)?;
                let (v, matrix) = match f(exists) {
                    Formula::Ex(v, m) => (v, m),
                    other => return fail(format!("line {exists} is not existential: {other}")),
                };
                expect(v.sort == eigen.sort, &|| format!("eigenvariable {eigen} has the wrong sort"))?;
                expect(subst(matrix, v, &Term::Var(eigen.clone())).alpha_eq(f(h)), &|| {
                    format!("assumption {h} is not the instance of line {exists} at {eigen}")
                })?;
                expect(f(body).alpha_eq(r), &|| format!("{r} is not the formula of line {body}"))?;
                expect(!f(exists).has_free(eigen), &|| format!("eigenvariable {eigen} is free in line {exists}"))?;
                expect(!r.has_free(eigen), &|| format!("eigenvariable {eigen} is free in the conclusion"))?;
                let rest: BTreeSet<Label> = d(body).into_iter().filter(|x| x != h).collect();
                if let Some(o) = free_in_deps(eigen, &rest) {
                    return Err((
                        format!("eigenvariable {eigen} is free in open assumption {o}"),
                        vec![body.clone(), o],
                    ));
                }
                Ok(union(d(exists), rest))
            }
            Step::Axiom { theory: t, name, params } => {
                let ext = self.registry.extends(theory, t).map_err(|e| (e.to_string(), vec![]))?;
                expect(ext, &|| format!("{theory} does not extend {t}"))?;
                let closed = if let Ok(ax) = self.registry.axiom(t, name) {
                    expect(params.is_empty(), &|| format!("axiom {name} takes no parameters"))?;
                    ax
                } else {
                    let schema: SchemaId =
                        name.parse().map_err(|e: crate::theories::TheoryError| (e.to_string(), vec![]))?;
                    let has = self.registry.has_schema(t, schema).map_err(|e| (e.to_string(), vec![]))?;
                    expect(has, &|| format!("{t} has no axiom or schema named {name}"))?;
                    instantiate(&SchemaInstanceRequest { schema, params: params.clone() })
                        .map_err(|e| (e.to_string(), vec![]))?
                        .closed
                };
                expect(strips_to(&closed, r), &|| format!("{r} is not the axiom {t}.{name}: {closed}"))?;
                axioms.insert(format!("{t}.{name}"));
                Ok(BTreeSet::new())
            }
            Step::Lemma(name) => {
                let entry = match self.lemmas.get(name) {
                    Some(e) => e,
                    None => return fail(format!("unknown lemma {name}")),
                };
                let ext = self.registry.extends(theory, &entry.theory).map_err(|e| (e.to_string(), vec![]))?;
                expect(ext, &|| {
                    format!("lemma {name} was proved in {}, which {theory} does not extend", entry.theory)
                })?;
                expect(strips_to(&entry.statement, r), &|| format!("{r} is not the statement of lemma {name}"))?;
                lemmas.insert(name.clone());
                Ok(BTreeSet::new())
            }
        }
    }
}

/// Checks a proof against the built-in theories with the given lemmas.
pub fn check_with(proof: &Proof, theory: &str, lemmas: &LemmaEnv) -> Result<Judgment, CheckError> {
    Checker::new(TheoryRegistry::builtin(), lemmas).check(proof, theory)
}

/// Checks a proof in its own theory, citing only the arithmetic prelude.
pub fn check(proof: &Proof, theory: &str) -> Result<Judgment, CheckError> {
    check_with(proof, theory, super::library::prelude())
}
