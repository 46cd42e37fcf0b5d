//! Turns parsed scripts into kernel proofs. Macro rules expand into ordinary
//! lines labelled `N.1`, `N.2`, ... so the checker never sees them.

use std::collections::{BTreeSet, HashMap};

use crate::syntax::{
    parse_formula_with, parse_term_with, subst, Formula, NotationTable, ParseCtx, Sort, SyntaxError, Term, Var,
};
use crate::theories::{ParamKind, SchemaId, SchemaParam, TheoryRegistry};

use super::check::{CheckError, Checker, Judgment, LemmaEnv};
use super::decide::{decide_into, DecideCtx};
use super::matching::find_instance;
use super::proof::{Label, Line, Proof, ProofBuilder, Step};
use super::script::{parse_script, Item, LemmaBlock, Marker, RawJust, RawLine, ScriptError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScriptFailure {
    /// Malformed script text or formula.
    #[error("{0}")]
    Parse(#[from] ScriptError),
    /// Well-formed but rejected by the elaborator or the kernel.
    #[error("{0}")]
    Check(#[from] CheckError),
}

impl ScriptFailure {
    pub fn is_parse(&self) -> bool {
        matches!(self, ScriptFailure::Parse(_))
    }
}

/// A lemma that was elaborated and checked.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub file: String,
    pub proof: Proof,
    pub judgment: Judgment,
    pub markers: Vec<Marker>,
    pub script_lines: usize,
}

/// Loads scripts in order, checking each lemma and making it citable.
#[derive(Debug)]
pub struct Session {
    pub registry: &'static TheoryRegistry,
    pub lemmas: LemmaEnv,
    pub notations: NotationTable,
    pub reports: Vec<LemmaReport>,
    loaded: BTreeSet<String>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(LemmaEnv::new())
    }
}

impl Session {
    pub fn new(lemmas: LemmaEnv) -> Session {
        Session {
            registry: TheoryRegistry::builtin(),
            lemmas,
            notations: NotationTable::builtin(),
            reports: Vec::new(),
            loaded: BTreeSet::new(),
        }
    }

    /// Marks a file as already loaded so imports of it are skipped.
    pub fn mark_loaded(&mut self, file: &str) {
        self.loaded.insert(file.to_string());
    }

    /// Runs a script. Imports are looked up with `resolve`; each file is
    /// loaded at most once.
    pub fn run(
        &mut self,
        text: &str,
        file: &str,
        resolve: &dyn Fn(&str) -> Option<String>,
    ) -> Result<(), ScriptFailure> {
        self.loaded.insert(file.to_string());
        let script = parse_script(text, file)?;
        for item in &script.items {
            match item {
                Item::Import { path, src } => {
                    if self.loaded.contains(path) {
                        continue;
                    }
                    let body = resolve(path).ok_or_else(|| ScriptError {
                        file: file.to_string(),
                        line: *src,
                        msg: format!("cannot find import \"{path}\""),
                    })?;
                    self.run(&body, path, resolve)?;
                }
                Item::Define { name, params, body, src } => {
                    let ps: Vec<(&str, Sort)> = params.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                    self.notations.define_text(name, &ps, body).map_err(|e| ScriptError {
                        file: file.to_string(),
                        line: *src,
                        msg: e.to_string(),
                    })?;
                }
                Item::Lemma(block) => {
                    let proof = self.elaborate(block, file)?;
                    let judgment = Checker::new(self.registry, &self.lemmas).check(&proof, &block.theory)?;
                    self.lemmas.insert(&block.name, &block.theory, proof.goal.clone());
                    self.reports.push(LemmaReport {
                        file: file.to_string(),
                        proof,
                        judgment,
                        markers: block.markers.clone(),
                        script_lines: block.lines.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn elaborate(&self, block: &LemmaBlock, file: &str) -> Result<Proof, ScriptFailure> {
        if self.lemmas.get(&block.name).is_some() {
            return Err(ScriptError {
                file: file.into(),
                line: block.src,
                msg: format!("lemma {} is already defined", block.name),
            }
            .into());
        }
        self.registry.get(&block.theory).map_err(|e| ScriptError {
            file: file.into(),
            line: block.src,
            msg: e.to_string(),
        })?;
        let mut el = Elab {
            session: self,
            file,
            block,
            ctx: ParseCtx::with_notations(&self.notations),
            formulas: HashMap::new(),
            lines: Vec::new(),
        };
        let goal = el.formula(&block.goal, block.goal_src)?;
        for raw in &block.lines {
            el.line(raw)?;
        }
        Ok(Proof { name: block.name.clone(), theory: block.theory.clone(), goal, lines: el.lines })
    }
}

struct Elab<'a> {
    session: &'a Session,
    file: &'a str,
    block: &'a LemmaBlock,
    ctx: ParseCtx,
    formulas: HashMap<Label, Formula>,
    lines: Vec<Line>,
}

type Res<T> = Result<T, ScriptFailure>;

impl Elab<'_> {
    fn parse_err(&self, src: usize, e: SyntaxError) -> ScriptFailure {
        ScriptError { file: self.file.into(), line: src, msg: e.to_string() }.into()
    }

    fn fail(&self, raw: &RawLine, rule: &str, msg: String) -> ScriptFailure {
        let related = match &raw.just {
            RawJust::By { args, .. } => {
                args.iter().filter(|a| self.formulas.contains_key(a.as_str())).cloned().collect()
            }
            RawJust::Assume => vec![],
        };
        CheckError {
            lemma: self.block.name.clone(),
            line: raw.label.clone(),
            rule: rule.into(),
            message: msg,
            related,
            src_line: Some(raw.src),
        }
        .into()
    }

    fn remember_sorts(&mut self, f: &Formula) {
        for v in f.free_vars() {
            self.ctx.hints.entry(v.name.to_string()).or_insert(v.sort);
        }
    }

    fn formula(&mut self, text: &str, src: usize) -> Res<Formula> {
        let f = parse_formula_with(text, &self.ctx).map_err(|e| self.parse_err(src, e))?;
        self.remember_sorts(&f);
        Ok(f)
    }

    fn term(&self, text: &str, src: usize, sort: Sort, ctx: Option<&ParseCtx>) -> Res<Term> {
        let t = parse_term_with(text, ctx.unwrap_or(&self.ctx), Some(sort)).map_err(|e| self.parse_err(src, e))?;
        if t.sort() != sort {
            return Err(self.parse_err(src, SyntaxError::Sort(format!("{text} is not a {sort} term"))));
        }
        Ok(t)
    }

    fn known(&self, raw: &RawLine, rule: &str, l: &str) -> Res<Formula> {
        self.formulas.get(l).cloned().ok_or_else(|| self.fail(raw, rule, format!("cites unknown or later line {l}")))
    }

    fn arity(&self, raw: &RawLine, rule: &str, args: &[String], ok: impl Fn(usize) -> bool) -> Res<()> {
        if ok(args.len()) {
            Ok(())
        } else {
            Err(self.fail(raw, rule, format!("wrong number of arguments ({})", args.len())))
        }
    }

    fn line(&mut self, raw: &RawLine) -> Res<()> {
        if self.formulas.contains_key(&raw.label) {
            return Err(self.fail(raw, "label", format!("duplicate label {}", raw.label)));
        }
        let f = self.formula(&raw.formula, raw.src)?;
        let new = match &raw.just {
            RawJust::Assume => vec![self.plain(raw, &f, Step::Assume)],
            RawJust::By { rule, args } => self.rule(raw, &f, rule, args)?,
        };
        for l in new {
            self.formulas.insert(l.label.clone(), l.formula.clone());
            self.lines.push(l);
        }
        Ok(())
    }

    fn plain(&self, raw: &RawLine, f: &Formula, step: Step) -> Line {
        Line { label: raw.label.clone(), formula: f.clone(), step, src: Some(raw.src) }
    }

    fn builder(&self, raw: &RawLine, cites: &[&str]) -> ProofBuilder {
        let mut b = ProofBuilder::new(&format!("{}.", raw.label));
        for c in cites {
            if let Some(f) = self.formulas.get(*c) {
                b.known(c, f.clone());
            }
        }
        b
    }

    /// Makes `root` the line named by the script and returns all new lines.
    fn finish(&self, raw: &RawLine, f: &Formula, mut b: ProofBuilder, root: &str) -> Vec<Line> {
        if b.lines().last().map(|l| l.label != root).unwrap_or(true) {
            let c = b.and_i(root, root);
            b.and_e1(&c);
        }
        b.rename_last(&raw.label);
        let mut lines = b.into_lines();
        for l in &mut lines {
            l.src = Some(raw.src);
        }
        if let Some(last) = lines.last_mut() {
            last.formula = f.clone();
        }
        lines
    }

    fn rule(&mut self, raw: &RawLine, f: &Formula, rule: &str, args: &[String]) -> Res<Vec<Line>> {
        let a = |i: usize| args[i].clone();
        let one = |s: &Self, step: Step| Ok(vec![s.plain(raw, f, step)]);
        match rule {
            "Refl" => {
                self.arity(raw, rule, args, |n| n == 0)?;
                one(self, Step::Refl)
            }
            "ReplEq" => {
                self.arity(raw, rule, args, |n| n == 2)?;
                one(self, Step::ReplEq { eq: a(0), target: a(1) })
            }
            "Trans" => {
                self.arity(raw, rule, args, |n| n == 2)?;
                one(self, Step::ReplEq { eq: a(1), target: a(0) })
            }
            "Sym" => {
                self.arity(raw, rule, args, |n| n == 1)?;
                let e = self.known(raw, rule, &args[0])?;
                let Formula::Eq(s, _) = &e else {
                    return Err(self.fail(raw, rule, format!("line {} is not an equation", args[0])));
                };
                let mut b = self.builder(raw, &[&args[0]]);
                let r = b.refl(s.clone());
                let root = b.repl(&args[0], &r, f.clone());
                Ok(self.finish(raw, f, b, &root))
            }
            "AndI" => {
                self.arity(raw, rule, args, |n| n == 2)?;
                one(self, Step::AndI(a(0), a(1)))
            }
            "AndE1" | "AndE2" | "OrI1" | "OrI2" | "BotE" | "DNE" => {
                self.arity(raw, rule, args, |n| n == 1)?;
                let l = a(0);
                one(
                    self,
                    match rule {
                        "AndE1" => Step::AndE1(l),
                        "AndE2" => Step::AndE2(l),
                        "OrI1" => Step::OrI1(l),
                        "OrI2" => Step::OrI2(l),
                        "BotE" => Step::BotE(l),
                        _ => Step::Dne(l),
                    },
                )
            }
            "AndE" => {
                self.arity(raw, rule, args, |n| n == 1)?;
                let c = self.known(raw, rule, &args[0])?;
                let left = matches!(&c, Formula::And(x, _) if x.alpha_eq(f));
                one(self, if left { Step::AndE1(a(0)) } else { Step::AndE2(a(0)) })
            }
            "OrI" => {
                self.arity(raw, rule, args, |n| n == 1)?;
                let p = self.known(raw, rule, &args[0])?;
                let left = matches!(f, Formula::Or(x, _) if x.alpha_eq(&p));
                one(self, if left { Step::OrI1(a(0)) } else { Step::OrI2(a(0)) })
            }
            "OrE" => {
                self.arity(raw, rule, args, |n| n == 5)?;
                one(self, Step::OrE { disj: a(0), left_hyp: a(1), left: a(2), right_hyp: a(3), right: a(4) })
            }
            "ImpI" => {
                self.arity(raw, rule, args, |n| n == 2)?;
                one(self, Step::ImpI { hyp: a(0), body: a(1) })
            }
            "ImpE" => {
                self.arity(raw, rule, args, |n| n == 2)?;
                one(self, Step::ImpE { imp: a(0), arg: a(1) })
            }
            "AllI" => {
                self.arity(raw, rule, args, |n| n == 1 || n == 2)?;
                let Formula::All(v, _) = f else {
                    return Err(self.fail(raw, rule, format!("{f} is not universal")));
                };
                let eigen = if args.len() == 2 { Var::new(&args[1], v.sort) } else { v.clone() };
                one(self, Step::AllI { prem: a(0), eigen })
            }
            "Gen" => {
                self.arity(raw, rule, args, |n| n == 1)?;
                let prem = self.known(raw, rule, &args[0])?;
                let mut prefix = Vec::new();
                let mut cur = f;
                while !cur.alpha_eq(&prem) {
                    match cur {
                        Formula::All(v, body) => {
                            prefix.push(v.clone());
                            cur = body;
                        }
                        _ => return Err(self.fail(raw, rule, format!("{f} does not generalize line {}", args[0]))),
                    }
                }
                let mut b = self.builder(raw, &[&args[0]]);
                let mut root = args[0].clone();
                for v in prefix.iter().rev() {
                    root = b.all_i(&root, v);
                }
                Ok(self.finish(raw, f, b, &root))
            }
            "AllE" => {
                self.arity(raw, rule, args, |n| n >= 1)?;
                if args.len() == 1 {
                    return one(self, Step::AllE { prem: a(0), term: None });
                }
                let mut cur = self.known(raw, rule, &args[0])?;
                let mut b = self.builder(raw, &[&args[0]]);
                let mut label = args[0].clone();
                for t in &args[1..] {
                    let Formula::All(v, body) = &cur else {
                        return Err(self.fail(raw, rule, format!("too many terms for line {}", args[0])));
                    };
                    let term = self.term(t, raw.src, v.sort, None)?;
                    cur = subst(body, v, &term);
                    label = b.all_e(&label, term);
                }
                Ok(self.finish(raw, f, b, &label))
            }
            "ExI" => {
                self.arity(raw, rule, args, |n| n == 1 || n == 2)?;
                let term = if args.len() == 2 {
                    let Formula::Ex(v, _) = f else {
                        return Err(self.fail(raw, rule, format!("{f} is not existential")));
                    };
                    Some(self.term(&args[1], raw.src, v.sort, None)?)
                } else {
                    None
                };
                one(self, Step::ExI { prem: a(0), term })
            }
            "ExE" => {
                self.arity(raw, rule, args, |n| n == 3 || n == 4)?;
                let ex = self.known(raw, rule, &args[0])?;
                let Formula::Ex(v, m) = &ex else {
                    return Err(self.fail(raw, rule, format!("line {} is not existential", args[0])));
                };
                let eigen = if args.len() == 4 {
                    Var::new(&args[3], v.sort)
                } else {
                    let h = self.known(raw, rule, &args[1])?;
                    match find_instance(m, v, &h) {
                        Some(Term::Var(y)) => y,
                        _ => {
                            return Err(self.fail(
                                raw,
                                rule,
                                format!("cannot read the eigenvariable off line {}", args[1]),
                            ))
                        }
                    }
                };
                one(self, Step::ExE { exists: a(0), hyp: a(1), body: a(2), eigen })
            }
            "Axiom" => {
                self.arity(raw, rule, args, |n| n >= 2)?;
                let params = self.schema_params(raw, &args[1], &args[2..])?;
                one(self, Step::Axiom { theory: a(0), name: a(1), params })
            }
            "Lemma" => {
                self.arity(raw, rule, args, |n| n >= 1)?;
                if args.len() == 1 {
                    return one(self, Step::Lemma(a(0)));
                }
                let entry = self
                    .session
                    .lemmas
                    .get(&args[0])
                    .ok_or_else(|| self.fail(raw, rule, format!("unknown lemma {}", args[0])))?;
                let mut b = self.builder(raw, &[]);
                let mut label = b.lemma(&args[0], entry.statement.clone());
                let mut cur = entry.statement.clone();
                for t in &args[1..] {
                    let Formula::All(v, body) = &cur else {
                        return Err(self.fail(raw, rule, format!("too many terms for lemma {}", args[0])));
                    };
                    let term = self.term(t, raw.src, v.sort, None)?;
                    cur = subst(body, v, &term);
                    label = b.all_e(&label, term);
                }
                Ok(self.finish(raw, f, b, &label))
            }
            "Prop" => {
                let cites: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                for c in &cites {
                    self.known(raw, rule, c)?;
                }
                let mut b = self.builder(raw, &cites);
                let root = b.prop(&cites, f.clone()).map_err(|_| {
                    self.fail(raw, rule, format!("{f} is not a propositional consequence of {}", args.join(", ")))
                })?;
                Ok(self.finish(raw, f, b, &root))
            }
            "Induct" => {
                self.arity(raw, rule, args, |n| n == 2)?;
                let Formula::All(x, body) = f else {
                    return Err(self.fail(raw, rule, format!("{f} is not universal")));
                };
                if x.sort != Sort::Nat {
                    return Err(self.fail(raw, rule, "induction needs a number variable".into()));
                }
                let inst = crate::theories::instantiate(&crate::theories::SchemaInstanceRequest {
                    schema: SchemaId::Ind,
                    params: vec![SchemaParam::Var(x.clone()), SchemaParam::Formula((**body).clone())],
                })
                .map_err(|e| self.fail(raw, rule, e.to_string()))?;
                let mut b = self.builder(raw, &[&args[0], &args[1]]);
                let ax = b.axiom(
                    "HA",
                    "Ind",
                    vec![SchemaParam::Var(x.clone()), SchemaParam::Formula((**body).clone())],
                    inst.matrix,
                );
                let both = b.and_i(&args[0], &args[1]);
                let root = b.imp_e(&ax, &both);
                Ok(self.finish(raw, f, b, &root))
            }
            "Decide" => {
                self.arity(raw, rule, args, |n| n == 0)?;
                let mut prefix = Vec::new();
                let mut cur = f;
                while let Formula::All(v, body) = cur {
                    prefix.push(v.clone());
                    cur = body;
                }
                let target = match cur {
                    Formula::Or(x, y) if y.as_neg().is_some_and(|n| n.alpha_eq(x)) => (**x).clone(),
                    _ => return Err(self.fail(raw, rule, format!("{f} is not of the form A | ~A"))),
                };
                let cx = DecideCtx::new(self.session.registry, &self.session.lemmas, &self.block.theory);
                let mut b = self.builder(raw, &[]);
                let mut root = decide_into(&mut b, &target, &cx).map_err(|m| self.fail(raw, rule, m))?;
                for v in prefix.iter().rev() {
                    root = b.all_i(&root, v);
                }
                Ok(self.finish(raw, f, b, &root))
            }
            other => Err(self.fail(raw, other, format!("unknown rule {other}"))),
        }
    }

    fn schema_params(&self, raw: &RawLine, name: &str, args: &[String]) -> Res<Vec<SchemaParam>> {
        let Ok(schema) = name.parse::<SchemaId>() else {
            if !args.is_empty() {
                return Err(self.fail(raw, "Axiom", format!("axiom {name} takes no parameters")));
            }
            return Ok(vec![]);
        };
        let kinds = schema.params();
        if kinds.len() != args.len() {
            return Err(self.fail(
                raw,
                "Axiom",
                format!("{name} takes {} parameters, got {}", kinds.len(), args.len()),
            ));
        }
        let mut ctx = self.ctx.clone();
        for (k, text) in kinds.iter().zip(args) {
            if let ParamKind::Var(s) = k {
                ctx.hint(text.trim(), *s);
            }
        }
        let mut out = Vec::new();
        for (k, text) in kinds.iter().zip(args) {
            out.push(match k {
                ParamKind::Var(s) => {
                    let name = text.trim();
                    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') || name.is_empty() {
                        return Err(self.fail(raw, "Axiom", format!("expected a variable, got {name}")));
                    }
                    SchemaParam::Var(Var::new(name, *s))
                }
                ParamKind::Term => SchemaParam::Term(self.term(text, raw.src, Sort::Nat, Some(&ctx))?),
                ParamKind::Formula => {
                    SchemaParam::Formula(parse_formula_with(text, &ctx).map_err(|e| self.parse_err(raw.src, e))?)
                }
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Result<Session, ScriptFailure> {
        let mut s = Session::default();
        s.run(text, "test.prf", &|_| None)?;
        Ok(s)
    }

    #[test]
    fn propositional_macro_expands() {
        let s = run("lemma dn in Logic:\ngoal (p | q) -> ~~(q | p)\n1. (p | q) -> ~~(q | p) by Prop\n").unwrap();
        let r = &s.reports[0];
        assert!(r.proof.lines.len() > 1);
        assert_eq!(r.proof.lines.last().unwrap().label, "1");
    }

    #[test]
    fn kernel_rejects_bad_eigenvariable() {
        let e = run("lemma bad in Logic:\ngoal P(x) -> all x. P(x)\n1. assume P(x)\n2. all x. P(x) by AllI(1)\n3. P(x) -> all x. P(x) by ImpI(1, 2)\n")
            .unwrap_err();
        match e {
            ScriptFailure::Check(c) => {
                assert_eq!(c.line, "2");
                assert!(c.message.contains("eigenvariable"), "{}", c.message);
                assert!(c.related.contains(&"1".to_string()));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn quantifier_rules() {
        let text = "lemma swap in Logic:\n\
            goal (ex x:obj. all y:obj. R(x, y)) -> all y:obj. ex x:obj. R(x, y)\n\
            1. assume ex x:obj. all y:obj. R(x, y)\n\
            2. assume all y:obj. R(u, y)\n\
            3. R(u, v) by AllE(2, v)\n\
            4. ex x:obj. R(x, v) by ExI(3, u)\n\
            5. ex x:obj. R(x, v) by ExE(1, 2, 4)\n\
            6. all y:obj. ex x:obj. R(x, y) by AllI(5, v)\n\
            7. (ex x:obj. all y:obj. R(x, y)) -> all y:obj. ex x:obj. R(x, y) by ImpI(1, 6)\n";
        run(text).unwrap();
    }

    #[test]
    fn unused_lines_are_flagged() {
        let e = run("lemma u in Logic:\ngoal p -> p\n1. assume p\n2. 0 = 0 by Refl\n3. p -> p by ImpI(1, 1)\n")
            .unwrap_err();
        assert!(e.to_string().contains("never used"), "{e}");
    }

    #[test]
    fn dne_needs_classical_theory() {
        let text = "lemma d in THEORY:\ngoal ~~p -> p\n1. assume ~~p\n2. p by DNE(1)\n3. ~~p -> p by ImpI(1, 2)\n";
        assert!(run(&text.replace("THEORY", "Classical")).is_ok());
        assert!(run(&text.replace("THEORY", "Logic")).is_err());
    }
}
