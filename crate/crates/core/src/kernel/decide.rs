//! Generates proofs of `A | ~A` for extended bounded formulas A.
//!
//! Atoms come from the `eq_dec` and `lt_dec` lemmas of the arithmetic
//! prelude, box formulas from CS1, connectives from propositional search and
//! bounded quantifiers from an induction on the bound.

use crate::syntax::{fresh_name, is_extended_delta0, subst, Formula, Term, Var};
use crate::theories::{instantiate, SchemaId, SchemaInstanceRequest, SchemaParam, TheoryRegistry};

use super::check::LemmaEnv;
use super::proof::{Label, Proof, ProofBuilder};

pub struct DecideCtx<'a> {
    lemmas: &'a LemmaEnv,
    /// Theory in the current chain that provides CS1, if any.
    cs1: Option<String>,
}

impl<'a> DecideCtx<'a> {
    pub fn new(registry: &TheoryRegistry, lemmas: &'a LemmaEnv, theory: &str) -> DecideCtx<'a> {
        let cs1 = registry
            .chain(theory)
            .ok()
            .and_then(|c| c.into_iter().find(|t| t.schemas.contains(&SchemaId::Cs1)).map(|t| t.id.clone()));
        DecideCtx { lemmas, cs1 }
    }
}

fn names_of(f: &Formula) -> Vec<String> {
    let mut out: Vec<String> = f.free_vars().into_iter().map(|v| v.name.to_string()).collect();
    collect_bound(f, &mut out);
    out
}

fn collect_bound(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::All(v, a) | Formula::Ex(v, a) => {
            out.push(v.name.to_string());
            collect_bound(a, out)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            collect_bound(a, out);
            collect_bound(b, out)
        }
        Formula::Box(_, a) | Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => collect_bound(a, out),
        _ => {}
    }
}

fn cite(b: &mut ProofBuilder, cx: &DecideCtx, name: &str) -> Result<Label, String> {
    let e = cx.lemmas.get(name).ok_or_else(|| format!("deciding atoms needs the lemma {name}"))?;
    Ok(b.lemma(name, e.statement.clone()))
}

/// Instance of `x < S(y) <-> x < y | x = y`.
fn lt_succ(b: &mut ProofBuilder, x: Term, y: Term) -> Label {
    let ax = crate::theories::TheoryRegistry::builtin().axiom("HA", "lt_succ").expect("lt_succ");
    let l = b.axiom("HA", "lt_succ", vec![], ax);
    b.all_e_many(&l, &[x, y])
}

/// `y < S(y)`.
fn lt_succ_self(b: &mut ProofBuilder, y: &Term) -> Label {
    let iff = lt_succ(b, y.clone(), y.clone());
    let back = b.and_e2(&iff);
    let r = b.refl(y.clone());
    let disj = b.or_i2(Formula::lt(y.clone(), y.clone()), &r);
    b.imp_e(&back, &disj)
}

/// `x < y -> x < S(y)` applied to a line proving `x < y`.
fn widen(b: &mut ProofBuilder, x: &Term, y: &Term, h: &str) -> Label {
    let iff = lt_succ(b, x.clone(), y.clone());
    let back = b.and_e2(&iff);
    let disj = b.or_i1(h, Formula::eq(x.clone(), y.clone()));
    b.imp_e(&back, &disj)
}

/// Appends lines proving `a | ~a` without open assumptions.
pub fn decide_into(b: &mut ProofBuilder, a: &Formula, cx: &DecideCtx) -> Result<Label, String> {
    if let Some((x, t, body)) = a.as_bounded_all() {
        return bounded(b, x, t, body, cx, true);
    }
    if let Some((x, t, body)) = a.as_bounded_ex() {
        return bounded(b, x, t, body, cx, false);
    }
    match a {
        Formula::Eq(s, t) | Formula::Lt(s, t) => {
            let name = if matches!(a, Formula::Eq(..)) { "eq_dec" } else { "lt_dec" };
            if s.sort() != crate::syntax::Sort::Nat {
                return Err(format!("{a} is not an arithmetic atom"));
            }
            let l = cite(b, cx, name)?;
            Ok(b.all_e_many(&l, &[s.clone(), t.clone()]))
        }
        Formula::Bot => {
            let h = b.assume(Formula::Bot);
            let n = b.imp_i(&h, &h);
            Ok(b.or_i2(Formula::Bot, &n))
        }
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Imp(x, y) => {
            let lx = decide_into(b, x, cx)?;
            let ly = decide_into(b, y, cx)?;
            let goal = Formula::or(a.clone(), Formula::not(a.clone()));
            b.prop(&[&lx, &ly], goal).map_err(|e| e.0)
        }
        Formula::Box(t, body) => {
            let th = cx.cs1.clone().ok_or_else(|| format!("deciding {a} needs CS1"))?;
            let taken = names_of(a);
            let n = Var::nat(&fresh_name("n", |c| taken.iter().any(|t| t == c)));
            let params = vec![SchemaParam::Var(n.clone()), SchemaParam::Formula((**body).clone())];
            let inst = instantiate(&SchemaInstanceRequest { schema: SchemaId::Cs1, params: params.clone() })
                .map_err(|e| e.to_string())?;
            let l = b.axiom(&th, "CS1", params, inst.matrix);
            let g = b.all_i(&l, &n);
            Ok(b.all_e(&g, t.clone()))
        }
        _ => Err(format!("{a} is not an extended bounded formula")),
    }
}

/// Decides `all x<t. body` (`universal`) or `ex x<t. body` by induction on the bound.
fn bounded(
    b: &mut ProofBuilder,
    x: &Var,
    t: &Term,
    body: &Formula,
    cx: &DecideCtx,
    universal: bool,
) -> Result<Label, String> {
    let whole = if universal {
        Formula::all_below(x, t.clone(), body.clone())
    } else {
        Formula::ex_below(x, t.clone(), body.clone())
    };
    let mut taken = names_of(&whole);
    taken.extend(t.free_vars().into_iter().map(|v| v.name.to_string()));
    let n = Var::nat(&fresh_name("n", |c| taken.iter().any(|s| s == c)));
    let nt = Term::var(&n);
    let xt = Term::var(x);
    let sn = Term::succ(nt.clone());
    let p = |bound: Term| {
        if universal {
            Formula::all_below(x, bound, body.clone())
        } else {
            Formula::ex_below(x, bound, body.clone())
        }
    };
    let q = |bound: Term| Formula::or(p(bound.clone()), Formula::not(p(bound)));
    let b_at = |s: &Term| subst(body, x, s);

    let d = decide_into(b, body, cx)?;
    let dx = b.all_i(&d, x);

    let lt_zero_ax = TheoryRegistry::builtin().axiom("HA", "lt_zero").expect("lt_zero");
    let base = {
        let lz = b.axiom("HA", "lt_zero", vec![], lt_zero_ax.clone());
        let nlt = b.all_e(&lz, xt.clone());
        if universal {
            let h = b.assume(Formula::lt(xt.clone(), Term::Zero));
            let bot = b.imp_e(&nlt, &h);
            let bx = b.bot_e(&bot, body.clone());
            let imp = b.imp_i(&h, &bx);
            let all = b.all_i(&imp, x);
            b.or_i1(&all, Formula::not(p(Term::Zero)))
        } else {
            let pz = b.assume(p(Term::Zero));
            let h = b.assume(Formula::and(Formula::lt(xt.clone(), Term::Zero), body.clone()));
            let lt = b.and_e1(&h);
            let bot = b.imp_e(&nlt, &lt);
            let out = b.ex_e(&pz, &h, &bot, x);
            let neg = b.imp_i(&pz, &out);
            b.or_i2(p(Term::Zero), &neg)
        }
    };

    let ih = b.assume(q(nt.clone()));
    let bn = b.all_e(&dx, nt.clone());
    let facts: Vec<Label> = if universal {
        // P(Sn) -> P(n)
        let i = {
            let ps = b.assume(p(sn.clone()));
            let h = b.assume(Formula::lt(xt.clone(), nt.clone()));
            let wide = widen(b, &xt, &nt, &h);
            let inst = b.all_e(&ps, xt.clone());
            let bx = b.imp_e(&inst, &wide);
            let imp = b.imp_i(&h, &bx);
            let all = b.all_i(&imp, x);
            b.imp_i(&ps, &all)
        };
        // P(Sn) -> B(n)
        let ii = {
            let ps = b.assume(p(sn.clone()));
            let inst = b.all_e(&ps, nt.clone());
            let lt = lt_succ_self(b, &nt);
            let out = b.imp_e(&inst, &lt);
            b.imp_i(&ps, &out)
        };
        // P(n) -> B(n) -> P(Sn)
        let iii = {
            let pn = b.assume(p(nt.clone()));
            let bnh = b.assume(b_at(&nt));
            let h = b.assume(Formula::lt(xt.clone(), sn.clone()));
            let iff = lt_succ(b, xt.clone(), nt.clone());
            let fwd = b.and_e1(&iff);
            let disj = b.imp_e(&fwd, &h);
            let h1 = b.assume(Formula::lt(xt.clone(), nt.clone()));
            let inst = b.all_e(&pn, xt.clone());
            let c1 = b.imp_e(&inst, &h1);
            let h2 = b.assume(Formula::eq(xt.clone(), nt.clone()));
            let c2 = b.repl(&h2, &bnh, body.clone());
            let bx = b.or_e(&disj, &h1, &c1, &h2, &c2);
            let imp = b.imp_i(&h, &bx);
            let all = b.all_i(&imp, x);
            let l1 = b.imp_i(&bnh, &all);
            b.imp_i(&pn, &l1)
        };
        vec![i, ii, iii]
    } else {
        // P(n) -> P(Sn)
        let i = {
            let pn = b.assume(p(nt.clone()));
            let h = b.assume(Formula::and(Formula::lt(xt.clone(), nt.clone()), body.clone()));
            let lt = b.and_e1(&h);
            let wide = widen(b, &xt, &nt, &lt);
            let bx = b.and_e2(&h);
            let both = b.and_i(&wide, &bx);
            let ex = b.ex_i(&both, p(sn.clone()), xt.clone());
            let out = b.ex_e(&pn, &h, &ex, x);
            b.imp_i(&pn, &out)
        };
        // B(n) -> P(Sn)
        let ii = {
            let bnh = b.assume(b_at(&nt));
            let lt = lt_succ_self(b, &nt);
            let both = b.and_i(&lt, &bnh);
            let ex = b.ex_i(&both, p(sn.clone()), nt.clone());
            b.imp_i(&bnh, &ex)
        };
        // P(Sn) -> P(n) | B(n)
        let iii = {
            let ps = b.assume(p(sn.clone()));
            let h = b.assume(Formula::and(Formula::lt(xt.clone(), sn.clone()), body.clone()));
            let lt = b.and_e1(&h);
            let bx = b.and_e2(&h);
            let iff = lt_succ(b, xt.clone(), nt.clone());
            let fwd = b.and_e1(&iff);
            let disj = b.imp_e(&fwd, &lt);
            let h1 = b.assume(Formula::lt(xt.clone(), nt.clone()));
            let both = b.and_i(&h1, &bx);
            let ex = b.ex_i(&both, p(nt.clone()), xt.clone());
            let c1 = b.or_i1(&ex, b_at(&nt));
            let h2 = b.assume(Formula::eq(xt.clone(), nt.clone()));
            let bn2 = b.repl(&h2, &bx, b_at(&nt));
            let c2 = b.or_i2(p(nt.clone()), &bn2);
            let out = b.or_e(&disj, &h1, &c1, &h2, &c2);
            let out = b.ex_e(&ps, &h, &out, x);
            b.imp_i(&ps, &out)
        };
        vec![i, ii, iii]
    };
    let mut prem: Vec<&str> = vec![&ih, &bn];
    prem.extend(facts.iter().map(|s| s.as_str()));
    let next = b.prop(&prem, q(sn.clone())).map_err(|e| e.0)?;
    let step_imp = b.imp_i(&ih, &next);
    let step = b.all_i(&step_imp, &n);

    let matrix = q(nt.clone());
    let params = vec![SchemaParam::Var(n.clone()), SchemaParam::Formula(matrix.clone())];
    let inst = instantiate(&SchemaInstanceRequest { schema: SchemaId::Ind, params: params.clone() })
        .map_err(|e| e.to_string())?;
    let ind = b.axiom("HA", "Ind", params, inst.matrix);
    let both = b.and_i(&base, &step);
    let all = b.imp_e(&ind, &both);
    Ok(b.all_e(&all, t.clone()))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecideError {
    #[error("{0} is not an extended bounded formula")]
    NotBounded(String),
    #[error("{0}")]
    Failed(String),
}

/// Proof of the universal closure of `a | ~a` in `theory`, citing the lemmas in `lemmas`.
pub fn derive_decidability_in(a: &Formula, theory: &str, lemmas: &LemmaEnv) -> Result<Proof, DecideError> {
    if !is_extended_delta0(a) {
        return Err(DecideError::NotBounded(a.to_string()));
    }
    let registry = TheoryRegistry::builtin();
    let cx = DecideCtx::new(registry, lemmas, theory);
    let mut b = ProofBuilder::new("d");
    let mut root = decide_into(&mut b, a, &cx).map_err(DecideError::Failed)?;
    let goal = Formula::or(a.clone(), Formula::not(a.clone()));
    for v in goal.free_vars_ordered().iter().rev() {
        root = b.all_i(&root, v);
    }
    debug_assert_eq!(b.lines().last().map(|l| l.label.as_str()), Some(root.as_str()));
    Ok(b.finish("decidability", theory, goal.closure()))
}

/// Proof of the closure of `a | ~a` in HA, or in FIM0+CS when `a` contains box formulas.
pub fn derive_decidability(a: &Formula) -> Result<Proof, DecideError> {
    let theory = if crate::syntax::is_box_free(a) { "HA" } else { "FIM0+CS" };
    let theory = if crate::syntax::uses_seq(a) && theory == "HA" { "FIM0" } else { theory };
    derive_decidability_in(a, theory, super::library::prelude())
}
