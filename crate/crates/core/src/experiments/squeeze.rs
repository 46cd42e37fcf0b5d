//! Squeeze runs: a narrow decider D and a wide decider V are run over every
//! formula of a finite fragment, and both inclusions D ⊆ V and V ⊆ D are
//! audited over that same enumeration.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::check;
use crate::prover::{
    check_certificate, ipc_proof, kripke_countermodel, prop_complete, tableau_closes_without_dne, tableau_prove,
    truth_table_counterexample, Certificate, Countermodel, PropResult, TableauBudget, Valuation, Verdict,
};
use crate::semantics::{
    eval_fo, formula_pool, validity_fo_bounded, Assignment, BoundedValidity, FiniteStructure, SemError, Signature,
    DEFAULT_STRUCTURE_BUDGET,
};
use crate::syntax::Formula;

use super::{ExpError, ReportHeader};

const LETTERS: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
const PREDS: [&str; 4] = ["P", "Q", "R", "S"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fragment {
    /// Formulas over the first `letters` of p, q, r, ... with at most
    /// `connectives` occurrences of `~`, `&`, `|`, `->`.
    Propositional { letters: usize, connectives: usize },
    /// Closed formulas over unary P, Q, ... of pool size at most `max_size`
    /// and quantifier rank at most `qrank`.
    Monadic {
        preds: usize,
        qrank: usize,
        max_size: usize,
        #[serde(default)]
        equality: bool,
    },
}

impl Fragment {
    /// Largest model size the monadic fragment needs: 2^preds * qrank.
    pub fn model_bound(&self) -> Option<usize> {
        match *self {
            Fragment::Monadic { preds, qrank, .. } => Some((1usize << preds) * qrank.max(1)),
            Fragment::Propositional { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Decider {
    /// Truth-table proof synthesis, each proof checked by the kernel.
    Kalmar,
    TruthTable,
    /// Intuitionistic derivability; proofs checked by the kernel in `Logic`.
    Ipc {
        #[serde(default = "default_ipc_steps")]
        steps: u64,
    },
    /// Tableau proofs with certificate replay. `max_terms` defaults to the
    /// fragment's model bound.
    Tableau {
        #[serde(default)]
        max_terms: Option<usize>,
        #[serde(default = "default_tableau_steps")]
        max_steps: u64,
    },
    /// The tableau without its double-negation step. Negative control.
    TableauNoDne {
        #[serde(default)]
        max_terms: Option<usize>,
        #[serde(default = "default_tableau_steps")]
        max_steps: u64,
    },
    /// Truth in every structure up to `max_size`, by brute force.
    BoundedModels {
        max_size: usize,
    },
    /// Truth in every monadic structure whose colour classes have at most
    /// `qrank` elements. Complete for the fragment by the usual
    /// Ehrenfeucht-Fraisse counting argument.
    MonadicModels,
}

fn default_ipc_steps() -> u64 {
    crate::prover::ipc::DEFAULT_BUDGET
}

fn default_tableau_steps() -> u64 {
    TableauBudget::default().max_steps
}

impl Decider {
    fn fits(&self, fragment: &Fragment) -> bool {
        let prop = matches!(fragment, Fragment::Propositional { .. });
        match self {
            Decider::Kalmar | Decider::TruthTable | Decider::Ipc { .. } => prop,
            Decider::MonadicModels => !prop,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqueezeConfig {
    pub name: String,
    pub fragment: Fragment,
    pub narrow: Decider,
    pub wide: Decider,
    /// Maximum number of formulas examined; the report says whether the
    /// fragment was exhausted.
    pub budget: u64,
}

impl SqueezeConfig {
    pub fn from_toml(text: &str) -> Result<SqueezeConfig, ExpError> {
        let c: SqueezeConfig = toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        if self.budget == 0 {
            return Err(ExpError::Config("budget must be positive".into()));
        }
        match self.fragment {
            Fragment::Propositional { letters, .. } if letters == 0 || letters > LETTERS.len() => {
                return Err(ExpError::Config(format!("letters must be between 1 and {}", LETTERS.len())))
            }
            Fragment::Monadic { preds, .. } if preds == 0 || preds > PREDS.len() => {
                return Err(ExpError::Config(format!("preds must be between 1 and {}", PREDS.len())))
            }
            _ => {}
        }
        for (role, d) in [("narrow", &self.narrow), ("wide", &self.wide)] {
            if !d.fits(&self.fragment) {
                return Err(ExpError::Config(format!("{role} decider {d:?} does not apply to {:?}", self.fragment)));
            }
        }
        Ok(())
    }
}

/// Number of propositional formulas over `letters` letters with exactly
/// `c` connectives, for each `c` up to `max`. Saturates at `u128::MAX`.
pub fn prop_counts(letters: usize, max: usize) -> Vec<u128> {
    let mut n = vec![letters as u128];
    for c in 1..=max {
        let mut t = n[c - 1];
        for l in 0..c {
            t = t.saturating_add(n[l].saturating_mul(n[c - 1 - l]).saturating_mul(3));
        }
        n.push(t);
    }
    n
}

struct PropSpace {
    letters: Vec<Formula>,
    counts: Vec<u128>,
}

impl PropSpace {
    fn new(letters: usize, connectives: usize) -> PropSpace {
        PropSpace {
            letters: LETTERS[..letters].iter().map(|l| Formula::letter(l)).collect(),
            counts: prop_counts(letters, connectives),
        }
    }

    fn total(&self) -> u128 {
        self.counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    /// The `i`-th formula in enumeration order: by connective count, then
    /// negations, then `&`, `|`, `->` by left operand size.
    fn nth(&self, mut i: u128) -> Formula {
        for c in 0..self.counts.len() {
            if i < self.counts[c] {
                return self.unrank(c, i);
            }
            i -= self.counts[c];
        }
        panic!("index outside the fragment")
    }

    fn unrank(&self, c: usize, mut i: u128) -> Formula {
        if c == 0 {
            return self.letters[i as usize].clone();
        }
        if i < self.counts[c - 1] {
            return Formula::not(self.unrank(c - 1, i));
        }
        i -= self.counts[c - 1];
        for op in [Formula::and, Formula::or, Formula::imp] {
            for l in 0..c {
                let r = c - 1 - l;
                let block = self.counts[l] * self.counts[r];
                if i < block {
                    return op(self.unrank(l, i / self.counts[r]), self.unrank(r, i % self.counts[r]));
                }
                i -= block;
            }
        }
        unreachable!("rank within the level")
    }
}

/// The closed formulas of a monadic fragment, in pool order.
pub fn monadic_formulas(preds: usize, qrank: usize, max_size: usize, equality: bool) -> Vec<Formula> {
    let sig: Signature = PREDS[..preds].iter().map(|p| (p.to_string(), 1)).collect();
    formula_pool(&sig, &[], max_size, equality).into_iter().filter(|f| f.quantifier_rank() <= qrank).collect()
}

/// Every monadic structure over `preds` unary predicates in which each of
/// the 2^preds colour classes has at most `cap` elements (and the domain is
/// nonempty).
pub fn capped_monadic_structures(preds: usize, cap: usize) -> Vec<FiniteStructure> {
    let colours = 1usize << preds;
    let mut out = Vec::new();
    let mut counts = vec![0usize; colours];
    loop {
        let size: usize = counts.iter().sum();
        if size > 0 {
            let mut elems = Vec::with_capacity(size);
            for (colour, &k) in counts.iter().enumerate() {
                elems.extend(std::iter::repeat_n(colour, k));
            }
            let mut m = FiniteStructure::new(size).expect("nonempty");
            for (j, p) in PREDS[..preds].iter().enumerate() {
                let tuples = elems.iter().enumerate().filter(|(_, &c)| c >> j & 1 == 1).map(|(e, _)| vec![e]);
                m.add_relation(p, 1, tuples).expect("unary relation");
            }
            out.push(m);
        }
        let mut i = 0;
        while i < colours && counts[i] == cap {
            counts[i] = 0;
            i += 1;
        }
        if i == colours {
            return out;
        }
        counts[i] += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// D accepts a formula V rejects.
    Soundness,
    /// V accepts a formula D rejects.
    Completeness,
    /// A decider gave no answer within its budget.
    Undecided,
    /// D's certificate failed independent checking.
    Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub index: u64,
    pub formula: String,
    pub kind: ViolationKind,
    pub narrow: Answer,
    pub wide: Answer,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezeReport {
    pub header: ReportHeader,
    pub config: SqueezeConfig,
    /// Size of the whole fragment, when it fits in a `u64`.
    pub fragment_size: Option<u64>,
    pub enumerated: u64,
    pub exhaustive: bool,
    pub narrow_yes: u64,
    pub wide_yes: u64,
    /// Formulas on which both deciders were run: the common base of both
    /// inclusion checks.
    pub soundness_checked: u64,
    pub completeness_checked: u64,
    pub violations: Vec<Violation>,
    /// Set only when both directions were checked over the same set with no
    /// violation of any kind.
    pub full_squeeze: bool,
    pub elapsed_ms: u128,
}

struct Ctx {
    fragment: Fragment,
    capped: Vec<FiniteStructure>,
}

struct Outcome {
    answer: Answer,
    defect: Option<String>,
}

impl Outcome {
    fn of(holds: bool) -> Outcome {
        Outcome { answer: if holds { Answer::Yes } else { Answer::No }, defect: None }
    }
}

fn tableau_budget(ctx: &Ctx, max_terms: Option<usize>, max_steps: u64) -> TableauBudget {
    let terms = max_terms.or(ctx.fragment.model_bound()).unwrap_or(TableauBudget::default().max_terms);
    TableauBudget { max_terms: terms, max_steps }
}

fn decide(d: &Decider, phi: &Formula, ctx: &Ctx) -> Result<Outcome, ExpError> {
    Ok(match *d {
        Decider::TruthTable => Outcome::of(truth_table_counterexample(phi).is_none()),
        Decider::Kalmar => match prop_complete(phi)? {
            PropResult::Falsifying(_) => Outcome::of(false),
            PropResult::Proof(p) => match check(&p, "Classical") {
                Ok(_) => Outcome::of(true),
                Err(e) => Outcome { answer: Answer::Yes, defect: Some(format!("kernel rejects proof: {e}")) },
            },
        },
        Decider::Ipc { steps } => match ipc_proof(phi, steps) {
            Ok(None) => Outcome::of(false),
            Ok(Some(p)) => match check(&p, "Logic") {
                Ok(_) => Outcome::of(true),
                Err(e) => Outcome { answer: Answer::Yes, defect: Some(format!("kernel rejects proof: {e}")) },
            },
            Err(crate::prover::ProverError::Budget(m)) => Outcome { answer: Answer::Unknown, defect: Some(m) },
            Err(e) => return Err(e.into()),
        },
        Decider::Tableau { max_terms, max_steps } => {
            match tableau_prove(phi, tableau_budget(ctx, max_terms, max_steps))? {
                Verdict::Proved(Certificate::Tableau(c)) => match check_certificate(phi, &c.root) {
                    Ok(()) => Outcome::of(true),
                    Err(e) => Outcome { answer: Answer::Yes, defect: Some(format!("certificate replay failed: {e}")) },
                },
                Verdict::Proved(Certificate::Proof(_)) => unreachable!("the tableau emits tableau certificates"),
                Verdict::Refuted(_) => Outcome::of(false),
                Verdict::Exhausted(m) => Outcome { answer: Answer::Unknown, defect: Some(m) },
            }
        }
        Decider::TableauNoDne { max_terms, max_steps } => {
            Outcome::of(tableau_closes_without_dne(phi, tableau_budget(ctx, max_terms, max_steps))?)
        }
        Decider::BoundedModels { max_size } => match validity_fo_bounded(phi, max_size, DEFAULT_STRUCTURE_BUDGET) {
            Ok(v) => Outcome::of(v.is_valid()),
            Err(SemError::Budget(m)) => Outcome { answer: Answer::Unknown, defect: Some(m) },
            Err(e) => return Err(e.into()),
        },
        Decider::MonadicModels => Outcome::of(capped_countermodel(phi, ctx)?.is_none()),
    })
}

fn capped_countermodel<'a>(phi: &Formula, ctx: &'a Ctx) -> Result<Option<&'a FiniteStructure>, ExpError> {
    for m in &ctx.capped {
        if !eval_fo(m, phi, &Assignment::new())? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn show_valuation(v: &Valuation) -> String {
    v.iter().map(|(k, b)| format!("{k}={}", u8::from(*b))).collect::<Vec<_>>().join(" ")
}

/// A human-readable witness for a decider's negative answer.
fn explain(d: &Decider, phi: &Formula, ctx: &Ctx) -> String {
    let r: Result<String, ExpError> = (|| {
        Ok(match *d {
            Decider::TruthTable | Decider::Kalmar => match truth_table_counterexample(phi) {
                Some(v) => format!("falsified by {}", show_valuation(&v)),
                None => "tautology".into(),
            },
            Decider::Ipc { .. } => match kripke_countermodel(phi, 3)? {
                Some(k) => format!("Kripke countermodel:\n{k}"),
                None => "no Kripke countermodel with at most 3 worlds".into(),
            },
            Decider::Tableau { max_terms, max_steps } => {
                match tableau_prove(phi, tableau_budget(ctx, max_terms, max_steps))? {
                    Verdict::Refuted(Countermodel::Structure(m)) => format!("tableau countermodel:\n{m}"),
                    v => format!("tableau verdict: {}", v.label()),
                }
            }
            Decider::TableauNoDne { .. } => "no closed tableau without double negation elimination".into(),
            Decider::BoundedModels { max_size } => {
                match validity_fo_bounded(phi, max_size, DEFAULT_STRUCTURE_BUDGET)? {
                    BoundedValidity::Countermodel(m) => format!("countermodel:\n{m}"),
                    BoundedValidity::ValidUpTo(n) => format!("valid up to size {n}"),
                }
            }
            Decider::MonadicModels => match capped_countermodel(phi, ctx)? {
                Some(m) => format!("countermodel:\n{m}"),
                None => "valid in all capped monadic structures".into(),
            },
        })
    })();
    r.unwrap_or_else(|e| format!("no witness: {e}"))
}

#[derive(Default)]
struct Tally {
    narrow_yes: u64,
    wide_yes: u64,
    checked: u64,
    violations: Vec<Violation>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.narrow_yes += other.narrow_yes;
        self.wide_yes += other.wide_yes;
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self
    }
}

fn audit(cfg: &SqueezeConfig, ctx: &Ctx, index: u64, phi: &Formula) -> Result<Tally, ExpError> {
    let d = decide(&cfg.narrow, phi, ctx)?;
    let v = decide(&cfg.wide, phi, ctx)?;
    let mut t = Tally { checked: 1, ..Tally::default() };
    t.narrow_yes = u64::from(d.answer == Answer::Yes);
    t.wide_yes = u64::from(v.answer == Answer::Yes);
    let mut flag = |kind, detail: String| {
        t.violations.push(Violation { index, formula: phi.to_string(), kind, narrow: d.answer, wide: v.answer, detail })
    };
    if let Some(defect) = &d.defect {
        if d.answer == Answer::Yes {
            flag(ViolationKind::Certificate, defect.clone());
        }
    }
    match (d.answer, v.answer) {
        (Answer::Yes, Answer::No) => flag(ViolationKind::Soundness, explain(&cfg.wide, phi, ctx)),
        (Answer::No, Answer::Yes) => flag(ViolationKind::Completeness, explain(&cfg.narrow, phi, ctx)),
        (Answer::Unknown, _) => flag(ViolationKind::Undecided, format!("narrow: {}", d.defect.unwrap_or_default())),
        (_, Answer::Unknown) => flag(ViolationKind::Undecided, format!("wide: {}", v.defect.unwrap_or_default())),
        _ => {}
    }
    Ok(t)
}

pub fn squeeze_run(cfg: &SqueezeConfig) -> Result<SqueezeReport, ExpError> {
    cfg.validate()?;
    let start = Instant::now();
    let capped = match cfg.fragment {
        Fragment::Monadic { preds, qrank, .. }
            if cfg.narrow == Decider::MonadicModels || cfg.wide == Decider::MonadicModels =>
        {
            capped_monadic_structures(preds, qrank.max(1))
        }
        _ => vec![],
    };
    let ctx = Ctx { fragment: cfg.fragment, capped };
    let (tally, fragment_size, enumerated) = match cfg.fragment {
        Fragment::Propositional { letters, connectives } => {
            let space = PropSpace::new(letters, connectives);
            let total = space.total();
            let n = total.min(u128::from(cfg.budget)) as u64;
            let tally = (0..n)
                .into_par_iter()
                .map(|i| audit(cfg, &ctx, i, &space.nth(u128::from(i))))
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
            (tally, u64::try_from(total).ok(), n)
        }
        Fragment::Monadic { preds, qrank, max_size, equality } => {
            let all = monadic_formulas(preds, qrank, max_size, equality);
            let n = all.len().min(cfg.budget as usize);
            let tally = all[..n]
                .par_iter()
                .enumerate()
                .map(|(i, f)| audit(cfg, &ctx, i as u64, f))
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
            (tally, Some(all.len() as u64), n as u64)
        }
    };
    let mut violations = tally.violations;
    violations.sort_by_key(|v| (v.index, v.kind as u8));
    let exhaustive = fragment_size == Some(enumerated);
    let full_squeeze = tally.checked == enumerated && violations.is_empty();
    Ok(SqueezeReport {
        header: ReportHeader::new("squeeze", cfg),
        config: cfg.clone(),
        fragment_size,
        enumerated,
        exhaustive,
        narrow_yes: tally.narrow_yes,
        wide_yes: tally.wide_yes,
        soundness_checked: tally.checked,
        completeness_checked: tally.checked,
        violations,
        full_squeeze,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::validity_fo_bounded;

    fn prop(letters: usize, connectives: usize, narrow: Decider) -> SqueezeConfig {
        SqueezeConfig {
            name: "t".into(),
            fragment: Fragment::Propositional { letters, connectives },
            narrow,
            wide: Decider::TruthTable,
            budget: 1 << 40,
        }
    }

    #[test]
    fn counts_match_the_recurrence() {
        assert_eq!(prop_counts(3, 4), vec![3, 30, 570, 13530, 359670]);
        assert_eq!(prop_counts(1, 2), vec![1, 4, 28]);
    }

    #[test]
    fn unranking_is_a_bijection_onto_sizes() {
        let s = PropSpace::new(2, 3);
        let all: Vec<String> = (0..s.total()).map(|i| s.nth(i).to_string()).collect();
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert_eq!(all[0], "p");
        assert_eq!(all[2], "~p");
    }

    #[test]
    fn propositional_squeeze_is_full() {
        let r = squeeze_run(&prop(2, 3, Decider::Kalmar)).unwrap();
        assert!(r.exhaustive && r.full_squeeze, "{:?}", r.violations.first());
        assert_eq!(r.enumerated, prop_counts(2, 3).iter().sum::<u128>() as u64);
        assert_eq!(r.narrow_yes, r.wide_yes);
        assert!(r.narrow_yes > 0);
    }

    #[test]
    fn intuitionistic_control_is_caught() {
        let r = squeeze_run(&prop(1, 2, Decider::Ipc { steps: default_ipc_steps() })).unwrap();
        assert!(!r.full_squeeze);
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::Completeness));
        assert!(r.violations.iter().any(|v| v.formula == "p | ~p"), "{:?}", r.violations);
        assert!(r.violations[0].detail.contains("Kripke countermodel"));
    }

    #[test]
    fn budget_truncates_and_flags() {
        let mut c = prop(2, 3, Decider::Kalmar);
        c.budget = 10;
        let r = squeeze_run(&c).unwrap();
        assert_eq!(r.enumerated, 10);
        assert!(!r.exhaustive);
    }

    #[test]
    fn capped_structures_cover_each_count() {
        // 1 predicate, cap 2: counts (a, b) in {0,1,2}^2 minus (0, 0).
        let ms = capped_monadic_structures(1, 2);
        assert_eq!(ms.len(), 8);
        assert_eq!(ms.iter().map(|m| m.size).max(), Some(4));
    }

    #[test]
    fn capped_models_agree_with_brute_force() {
        // Bound validation at tiny parameters: one predicate, rank 2, with
        // equality, against every structure of size at most 6.
        let ctx = Ctx {
            fragment: Fragment::Monadic { preds: 1, qrank: 2, max_size: 5, equality: true },
            capped: capped_monadic_structures(1, 2),
        };
        let fs = monadic_formulas(1, 2, 5, true);
        assert!(fs.len() > 100);
        for f in &fs {
            let capped = decide(&Decider::MonadicModels, f, &ctx).unwrap().answer == Answer::Yes;
            let brute = validity_fo_bounded(f, 6, 1 << 20).unwrap().is_valid();
            assert_eq!(capped, brute, "{f}");
        }
    }

    #[test]
    fn monadic_squeeze_and_control() {
        let mut c = SqueezeConfig {
            name: "m".into(),
            fragment: Fragment::Monadic { preds: 1, qrank: 2, max_size: 5, equality: false },
            narrow: Decider::Tableau { max_terms: None, max_steps: default_tableau_steps() },
            wide: Decider::BoundedModels { max_size: 4 },
            budget: 100_000,
        };
        let r = squeeze_run(&c).unwrap();
        assert!(r.full_squeeze && r.exhaustive, "{:?}", r.violations.first());
        c.narrow = Decider::TableauNoDne { max_terms: None, max_steps: default_tableau_steps() };
        let r = squeeze_run(&c).unwrap();
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Completeness));
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::Completeness));
    }

    #[test]
    fn mismatched_deciders_are_rejected() {
        let mut c = prop(2, 2, Decider::MonadicModels);
        assert!(matches!(squeeze_run(&c), Err(ExpError::Config(_))));
        c.narrow = Decider::Kalmar;
        c.budget = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let text = r#"
            name = "prop2"
            budget = 1000
            [fragment]
            kind = "propositional"
            letters = 2
            connectives = 2
            [narrow]
            kind = "kalmar"
            [wide]
            kind = "truth-table"
        "#;
        let c = SqueezeConfig::from_toml(text).unwrap();
        assert_eq!(c.fragment, Fragment::Propositional { letters: 2, connectives: 2 });
        let t = SqueezeConfig::from_toml("name='x'\nbudget=1\n[fragment]\nkind='monadic'\npreds=1\nqrank=1\nmax_size=3\n[narrow]\nkind='tableau'\n[wide]\nkind='monadic-models'").unwrap();
        assert_eq!(t.narrow, Decider::Tableau { max_terms: None, max_steps: default_tableau_steps() });
    }
}
