use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::syntax::{subst, Formula, Term, Var};
use crate::theories::{SchemaParam, TheoryId};

pub type Label = String;

/// Justification of a proof line. These are the only rules the checker trusts.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Assume,
    Refl,
    /// From `s = t` and A, infer A with some occurrences of s replaced by t (or t by s).
    ReplEq {
        eq: Label,
        target: Label,
    },
    AndI(Label, Label),
    AndE1(Label),
    AndE2(Label),
    OrI1(Label),
    OrI2(Label),
    OrE {
        disj: Label,
        left_hyp: Label,
        left: Label,
        right_hyp: Label,
        right: Label,
    },
    ImpI {
        hyp: Label,
        body: Label,
    },
    ImpE {
        imp: Label,
        arg: Label,
    },
    BotE(Label),
    AllI {
        prem: Label,
        eigen: Var,
    },
    AllE {
        prem: Label,
        term: Option<Term>,
    },
    ExI {
        prem: Label,
        term: Option<Term>,
    },
    ExE {
        exists: Label,
        hyp: Label,
        body: Label,
        eigen: Var,
    },
    Dne(Label),
    Axiom {
        theory: TheoryId,
        name: String,
        params: Vec<SchemaParam>,
    },
    Lemma(String),
}

impl Step {
    pub fn rule_name(&self) -> &'static str {
        match self {
            Step::Assume => "assume",
            Step::Refl => "Refl",
            Step::ReplEq { .. } => "ReplEq",
            Step::AndI(..) => "AndI",
            Step::AndE1(_) => "AndE1",
            Step::AndE2(_) => "AndE2",
            Step::OrI1(_) => "OrI1",
            Step::OrI2(_) => "OrI2",
            Step::OrE { .. } => "OrE",
            Step::ImpI { .. } => "ImpI",
            Step::ImpE { .. } => "ImpE",
            Step::BotE(_) => "BotE",
            Step::AllI { .. } => "AllI",
            Step::AllE { .. } => "AllE",
            Step::ExI { .. } => "ExI",
            Step::ExE { .. } => "ExE",
            Step::Dne(_) => "DNE",
            Step::Axiom { .. } => "Axiom",
            Step::Lemma(_) => "Lemma",
        }
    }

    /// Labels of the lines this step cites.
    pub fn premises(&self) -> Vec<&Label> {
        match self {
            Step::Assume | Step::Refl | Step::Axiom { .. } | Step::Lemma(_) => vec![],
            Step::ReplEq { eq, target } => vec![eq, target],
            Step::AndI(a, b) => vec![a, b],
            Step::AndE1(a) | Step::AndE2(a) | Step::OrI1(a) | Step::OrI2(a) | Step::BotE(a) | Step::Dne(a) => vec![a],
            Step::OrE { disj, left_hyp, left, right_hyp, right } => vec![disj, left_hyp, left, right_hyp, right],
            Step::ImpI { hyp, body } => vec![hyp, body],
            Step::ImpE { imp, arg } => vec![imp, arg],
            Step::AllI { prem, .. } | Step::AllE { prem, .. } | Step::ExI { prem, .. } => vec![prem],
            Step::ExE { exists, hyp, body, .. } => vec![exists, hyp, body],
        }
    }

    fn map_labels(&mut self, f: &impl Fn(&Label) -> Label) {
        let g = |l: &mut Label| *l = f(l);
        match self {
            Step::Assume | Step::Refl | Step::Axiom { .. } | Step::Lemma(_) => {}
            Step::ReplEq { eq, target } => {
                g(eq);
                g(target)
            }
            Step::AndI(a, b) => {
                g(a);
                g(b)
            }
            Step::AndE1(a) | Step::AndE2(a) | Step::OrI1(a) | Step::OrI2(a) | Step::BotE(a) | Step::Dne(a) => g(a),
            Step::OrE { disj, left_hyp, left, right_hyp, right } => {
                g(disj);
                g(left_hyp);
                g(left);
                g(right_hyp);
                g(right)
            }
            Step::ImpI { hyp, body } => {
                g(hyp);
                g(body)
            }
            Step::ImpE { imp, arg } => {
                g(imp);
                g(arg)
            }
            Step::AllI { prem, .. } | Step::AllE { prem, .. } | Step::ExI { prem, .. } => g(prem),
            Step::ExE { exists, hyp, body, .. } => {
                g(exists);
                g(hyp);
                g(body)
            }
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Assume => return f.write_str("assume"),
            Step::Refl => return f.write_str("Refl"),
            Step::Axiom { theory, name, params } => {
                write!(f, "Axiom({theory}, {name}")?;
                for p in params {
                    write!(f, ", {p}")?;
                }
                return f.write_str(")");
            }
            Step::Lemma(n) => return write!(f, "Lemma({n})"),
            _ => {}
        }
        let mut args: Vec<String> = self.premises().into_iter().cloned().collect();
        match self {
            Step::AllI { eigen, .. } | Step::ExE { eigen, .. } => args.push(eigen.name.to_string()),
            Step::AllE { term: Some(t), .. } | Step::ExI { term: Some(t), .. } => args.push(format!("({t})")),
            _ => {}
        }
        write!(f, "{}({})", self.rule_name(), args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub label: Label,
    pub formula: Formula,
    pub step: Step,
    /// Line number in the source script, if any.
    pub src: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proof {
    pub name: String,
    pub theory: TheoryId,
    pub goal: Formula,
    pub lines: Vec<Line>,
}

impl Proof {
    /// Renders the proof in script syntax.
    pub fn to_script(&self) -> String {
        let mut out = format!("lemma {} in {}:\ngoal {}\n", self.name, self.theory, self.goal);
        for l in &self.lines {
            match l.step {
                Step::Assume => out.push_str(&format!("{}. assume {}\n", l.label, l.formula)),
                _ => out.push_str(&format!("{}. {} by {}\n", l.label, l.formula, l.step)),
            }
        }
        out
    }

    /// Drops every line the last line does not depend on.
    pub fn prune_unused(&self) -> Proof {
        let mut needed: HashSet<&str> = HashSet::new();
        if let Some(last) = self.lines.last() {
            needed.insert(&last.label);
        }
        for l in self.lines.iter().rev() {
            if needed.contains(l.label.as_str()) {
                needed.extend(l.step.premises().into_iter().map(|p| p.as_str()));
            }
        }
        Proof {
            lines: self.lines.iter().filter(|l| needed.contains(l.label.as_str())).cloned().collect(),
            ..self.clone()
        }
    }

    /// Uniform substitution of a closed formula for a propositional letter.
    /// Sound for proofs without eigenvariable steps that mention the letter's replacement.
    pub fn subst_letter(&self, letter: &str, by: &Formula) -> Proof {
        let sub = |f: &Formula| crate::syntax::subst_pred(f, letter, &[], by);
        Proof {
            name: self.name.clone(),
            theory: self.theory.clone(),
            goal: sub(&self.goal),
            lines: self
                .lines
                .iter()
                .map(|l| Line { label: l.label.clone(), formula: sub(&l.formula), step: l.step.clone(), src: l.src })
                .collect(),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("builder: {0}")]
pub struct BuildError(pub String);

/// Programmatic construction of Lemmon-style proofs. Formulas of derived
/// lines are computed from the premises; the checker re-validates everything.
#[derive(Debug, Clone)]
pub struct ProofBuilder {
    prefix: String,
    next: usize,
    lines: Vec<Line>,
    known: HashMap<Label, Formula>,
}

impl ProofBuilder {
    pub fn new(prefix: &str) -> ProofBuilder {
        ProofBuilder { prefix: prefix.to_string(), next: 1, lines: Vec::new(), known: HashMap::new() }
    }

    /// Makes an existing line (outside this builder) citable.
    pub fn known(&mut self, label: &str, f: Formula) {
        self.known.insert(label.to_string(), f);
    }

    pub fn formula(&self, l: &str) -> &Formula {
        self.known.get(l).unwrap_or_else(|| panic!("unknown label {l}"))
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn push(&mut self, f: Formula, step: Step) -> Label {
        let label = format!("{}{}", self.prefix, self.next);
        self.next += 1;
        self.known.insert(label.clone(), f.clone());
        self.lines.push(Line { label: label.clone(), formula: f, step, src: None });
        label
    }

    pub fn assume(&mut self, f: Formula) -> Label {
        self.push(f, Step::Assume)
    }

    pub fn refl(&mut self, t: Term) -> Label {
        self.push(Formula::eq(t.clone(), t), Step::Refl)
    }

    pub fn repl(&mut self, eq: &str, target: &str, result: Formula) -> Label {
        self.push(result, Step::ReplEq { eq: eq.into(), target: target.into() })
    }

    pub fn and_i(&mut self, a: &str, b: &str) -> Label {
        let f = Formula::and(self.formula(a).clone(), self.formula(b).clone());
        self.push(f, Step::AndI(a.into(), b.into()))
    }

    pub fn and_e1(&mut self, l: &str) -> Label {
        match self.formula(l).clone() {
            Formula::And(a, _) => self.push(*a, Step::AndE1(l.into())),
            f => panic!("AndE1 on {f}"),
        }
    }

    pub fn and_e2(&mut self, l: &str) -> Label {
        match self.formula(l).clone() {
            Formula::And(_, b) => self.push(*b, Step::AndE2(l.into())),
            f => panic!("AndE2 on {f}"),
        }
    }

    pub fn or_i1(&mut self, l: &str, right: Formula) -> Label {
        let f = Formula::or(self.formula(l).clone(), right);
        self.push(f, Step::OrI1(l.into()))
    }

    pub fn or_i2(&mut self, left: Formula, l: &str) -> Label {
        let f = Formula::or(left, self.formula(l).clone());
        self.push(f, Step::OrI2(l.into()))
    }

    pub fn or_e(&mut self, disj: &str, h1: &str, m1: &str, h2: &str, m2: &str) -> Label {
        let f = self.formula(m1).clone();
        self.push(
            f,
            Step::OrE {
                disj: disj.into(),
                left_hyp: h1.into(),
                left: m1.into(),
                right_hyp: h2.into(),
                right: m2.into(),
            },
        )
    }

    pub fn imp_i(&mut self, hyp: &str, body: &str) -> Label {
        let f = Formula::imp(self.formula(hyp).clone(), self.formula(body).clone());
        self.push(f, Step::ImpI { hyp: hyp.into(), body: body.into() })
    }

    pub fn imp_e(&mut self, imp: &str, arg: &str) -> Label {
        match self.formula(imp).clone() {
            Formula::Imp(_, b) => self.push(*b, Step::ImpE { imp: imp.into(), arg: arg.into() }),
            f => panic!("ImpE on {f}"),
        }
    }

    pub fn bot_e(&mut self, l: &str, f: Formula) -> Label {
        self.push(f, Step::BotE(l.into()))
    }

    /// Generalizes over `x`, naming the bound variable `x` as well.
    pub fn all_i(&mut self, l: &str, x: &Var) -> Label {
        let f = Formula::all(x, self.formula(l).clone());
        self.push(f, Step::AllI { prem: l.into(), eigen: x.clone() })
    }

    pub fn all_e(&mut self, l: &str, t: Term) -> Label {
        match self.formula(l).clone() {
            Formula::All(v, body) => {
                let f = subst(&body, &v, &t);
                self.push(f, Step::AllE { prem: l.into(), term: Some(t) })
            }
            f => panic!("AllE on {f}"),
        }
    }

    pub fn all_e_many(&mut self, l: &str, ts: &[Term]) -> Label {
        let mut cur = l.to_string();
        for t in ts {
            cur = self.all_e(&cur, t.clone());
        }
        cur
    }

    /// `result` must be `ex v. A` with the premise equal to A[t/v].
    pub fn ex_i(&mut self, l: &str, result: Formula, t: Term) -> Label {
        self.push(result, Step::ExI { prem: l.into(), term: Some(t) })
    }

    pub fn ex_e(&mut self, ex: &str, hyp: &str, body: &str, eigen: &Var) -> Label {
        let f = self.formula(body).clone();
        self.push(f, Step::ExE { exists: ex.into(), hyp: hyp.into(), body: body.into(), eigen: eigen.clone() })
    }

    pub fn dne(&mut self, l: &str) -> Label {
        let f = self.formula(l).clone();
        match f.as_neg().and_then(|g| g.as_neg()) {
            Some(a) => {
                let a = a.clone();
                self.push(a, Step::Dne(l.into()))
            }
            None => panic!("DNE on {f}"),
        }
    }

    pub fn axiom(&mut self, theory: &str, name: &str, params: Vec<SchemaParam>, f: Formula) -> Label {
        self.push(f, Step::Axiom { theory: theory.into(), name: name.into(), params })
    }

    pub fn lemma(&mut self, name: &str, f: Formula) -> Label {
        self.push(f, Step::Lemma(name.into()))
    }

    /// Propositional consequence found by intuitionistic proof search.
    pub fn prop(&mut self, premises: &[&str], goal: Formula) -> Result<Label, BuildError> {
        let prem: Vec<(Label, Formula)> = premises.iter().map(|l| (l.to_string(), self.formula(l).clone())).collect();
        crate::prover::ipc::emit_consequence(self, &prem, &goal)
            .ok_or_else(|| BuildError(format!("no intuitionistic propositional proof of {goal}")))
    }

    /// Renames the last line to `label` and rewrites references to it.
    pub fn rename_last(&mut self, label: &str) {
        let old = self.lines.last().expect("nonempty").label.clone();
        let f = self.known.remove(&old).expect("known");
        self.known.insert(label.to_string(), f);
        for l in &mut self.lines {
            if l.label == old {
                l.label = label.to_string();
            }
            let (o, n) = (old.clone(), label.to_string());
            l.step.map_labels(&move |x| if *x == o { n.clone() } else { x.clone() });
        }
    }

    pub fn into_lines(self) -> Vec<Line> {
        self.lines
    }

    pub fn finish(self, name: &str, theory: &str, goal: Formula) -> Proof {
        Proof { name: name.into(), theory: theory.into(), goal, lines: self.lines }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check;
    use crate::syntax::parse_formula;

    #[test]
    fn pruning_drops_dead_lines() {
        let p = parse_formula("p").unwrap();
        let mut b = ProofBuilder::new("");
        let h = b.assume(p.clone());
        let _dead = b.assume(parse_formula("q").unwrap());
        let i = b.imp_i(&h, &h);
        let proof = b.finish("t", "Logic", Formula::imp(p.clone(), p));
        assert!(check(&proof, "Logic").is_err());
        let pruned = proof.prune_unused();
        assert_eq!(pruned.lines.len(), 2);
        assert_eq!(pruned.lines.last().unwrap().label, i);
        check(&pruned, "Logic").unwrap();
    }
}
