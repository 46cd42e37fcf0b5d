use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Formula, Sort, Term, Var};

pub(super) fn term_free_vars(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    let mut ord = Vec::new();
    term_fv(t, bound, &mut ord);
    out.extend(ord);
}

pub(super) fn formula_free_vars(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    let mut ord = Vec::new();
    formula_fv(f, bound, &mut ord);
    out.extend(ord);
}

pub(super) fn formula_free_vars_ordered(f: &Formula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
    formula_fv(f, bound, out);
}

fn push_unique(out: &mut Vec<Var>, v: &Var) {
    if !out.contains(v) {
        out.push(v.clone());
    }
}

fn term_fv(t: &Term, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) {
                push_unique(out, v)
            }
        }
        Term::Zero => {}
        Term::Succ(a) => term_fv(a, bound, out),
        Term::Add(a, b) | Term::Mul(a, b) | Term::Proj(a, b) | Term::Cat(a, b) => {
            term_fv(a, bound, out);
            term_fv(b, bound, out);
        }
        Term::App(v, a) | Term::Bar(v, a) => {
            if !bound.contains(v) {
                push_unique(out, v)
            }
            term_fv(a, bound, out);
        }
        Term::Tuple(ts) => ts.iter().for_each(|a| term_fv(a, bound, out)),
        Term::Chi { var, body, arg } => {
            bound.push(var.clone());
            formula_fv(body, bound, out);
            bound.pop();
            term_fv(arg, bound, out);
        }
    }
}

fn formula_fv(f: &Formula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
    match f {
        Formula::Eq(a, b) | Formula::Lt(a, b) => {
            term_fv(a, bound, out);
            term_fv(b, bound, out);
        }
        Formula::Pred(_, args) => args.iter().for_each(|a| term_fv(a, bound, out)),
        Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            formula_fv(a, bound, out);
            formula_fv(b, bound, out);
        }
        Formula::All(v, a) | Formula::Ex(v, a) => {
            bound.push(v.clone());
            formula_fv(a, bound, out);
            bound.pop();
        }
        Formula::Box(t, a) => {
            term_fv(t, bound, out);
            formula_fv(a, bound, out);
        }
        Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => formula_fv(a, bound, out),
    }
}

pub(super) fn term_occurs(t: &Term, v: &Var) -> bool {
    match t {
        Term::Var(x) => x == v,
        Term::Zero => false,
        Term::Succ(a) => term_occurs(a, v),
        Term::Add(a, b) | Term::Mul(a, b) | Term::Proj(a, b) | Term::Cat(a, b) => {
            term_occurs(a, v) || term_occurs(b, v)
        }
        Term::App(x, a) | Term::Bar(x, a) => x == v || term_occurs(a, v),
        Term::Tuple(ts) => ts.iter().any(|a| term_occurs(a, v)),
        Term::Chi { var, body, arg } => (var != v && formula_occurs(body, v)) || term_occurs(arg, v),
    }
}

pub(super) fn formula_occurs(f: &Formula, v: &Var) -> bool {
    match f {
        Formula::Eq(a, b) | Formula::Lt(a, b) => term_occurs(a, v) || term_occurs(b, v),
        Formula::Pred(_, args) => args.iter().any(|a| term_occurs(a, v)),
        Formula::Bot => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => formula_occurs(a, v) || formula_occurs(b, v),
        Formula::All(x, a) | Formula::Ex(x, a) => x != v && formula_occurs(a, v),
        Formula::Box(t, a) => term_occurs(t, v) || formula_occurs(a, v),
        Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => formula_occurs(a, v),
    }
}

pub(super) fn formula_preds(f: &Formula, bound: &mut Vec<Arc<str>>, out: &mut BTreeSet<(Arc<str>, usize)>) {
    match f {
        Formula::Pred(p, args) => {
            if !bound.contains(p) {
                out.insert((p.clone(), args.len()));
            }
            args.iter().for_each(|t| term_preds(t, bound, out));
        }
        Formula::Eq(a, b) | Formula::Lt(a, b) => {
            term_preds(a, bound, out);
            term_preds(b, bound, out);
        }
        Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            formula_preds(a, bound, out);
            formula_preds(b, bound, out);
        }
        Formula::All(_, a) | Formula::Ex(_, a) => formula_preds(a, bound, out),
        Formula::Box(t, a) => {
            term_preds(t, bound, out);
            formula_preds(a, bound, out);
        }
        Formula::SoAll(p, _, a) | Formula::SoEx(p, _, a) => {
            bound.push(p.clone());
            formula_preds(a, bound, out);
            bound.pop();
        }
    }
}

fn term_preds(t: &Term, bound: &mut Vec<Arc<str>>, out: &mut BTreeSet<(Arc<str>, usize)>) {
    match t {
        Term::Chi { body, arg, .. } => {
            formula_preds(body, bound, out);
            term_preds(arg, bound, out);
        }
        Term::Succ(a) | Term::App(_, a) | Term::Bar(_, a) => term_preds(a, bound, out),
        Term::Add(a, b) | Term::Mul(a, b) | Term::Proj(a, b) | Term::Cat(a, b) => {
            term_preds(a, bound, out);
            term_preds(b, bound, out);
        }
        Term::Tuple(ts) => ts.iter().for_each(|a| term_preds(a, bound, out)),
        Term::Var(_) | Term::Zero => {}
    }
}

/// Appends primes to `base` until `taken` rejects the name.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

fn all_names_f(f: &Formula, out: &mut BTreeSet<Arc<str>>) {
    match f {
        Formula::Eq(a, b) | Formula::Lt(a, b) => {
            all_names_t(a, out);
            all_names_t(b, out);
        }
        Formula::Pred(_, args) => args.iter().for_each(|a| all_names_t(a, out)),
        Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            all_names_f(a, out);
            all_names_f(b, out);
        }
        Formula::All(v, a) | Formula::Ex(v, a) => {
            out.insert(v.name.clone());
            all_names_f(a, out);
        }
        Formula::Box(t, a) => {
            all_names_t(t, out);
            all_names_f(a, out);
        }
        Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => all_names_f(a, out),
    }
}

fn all_names_t(t: &Term, out: &mut BTreeSet<Arc<str>>) {
    match t {
        Term::Var(v) => {
            out.insert(v.name.clone());
        }
        Term::Zero => {}
        Term::Succ(a) => all_names_t(a, out),
        Term::Add(a, b) | Term::Mul(a, b) | Term::Proj(a, b) | Term::Cat(a, b) => {
            all_names_t(a, out);
            all_names_t(b, out);
        }
        Term::App(v, a) | Term::Bar(v, a) => {
            out.insert(v.name.clone());
            all_names_t(a, out);
        }
        Term::Tuple(ts) => ts.iter().for_each(|a| all_names_t(a, out)),
        Term::Chi { var, body, arg } => {
            out.insert(var.name.clone());
            all_names_f(body, out);
            all_names_t(arg, out);
        }
    }
}

struct Subst<'a> {
    var: &'a Var,
    by: &'a Term,
    /// Names free in the replacement; binders with these names get renamed.
    danger: BTreeSet<Arc<str>>,
}

impl Subst<'_> {
    fn binder(&self, y: &Var, body: &Formula) -> (Var, Option<Formula>) {
        if !self.danger.contains(&y.name) {
            return (y.clone(), None);
        }
        let mut taken = self.danger.clone();
        all_names_f(body, &mut taken);
        taken.insert(self.var.name.clone());
        let fresh = Var::new(&fresh_name(&y.name, |n| taken.contains(n)), y.sort);
        let renamed = subst(body, y, &Term::Var(fresh.clone()));
        (fresh, Some(renamed))
    }

    fn seq_target(&self) -> Var {
        match self.by {
            Term::Var(b) if b.sort == Sort::Seq => b.clone(),
            other => panic!("sequence variable replaced by non-variable term {other}"),
        }
    }

    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => {
                if x == self.var {
                    self.by.clone()
                } else {
                    t.clone()
                }
            }
            Term::Zero => Term::Zero,
            Term::Succ(a) => Term::succ(self.term(a)),
            Term::Add(a, b) => Term::add(self.term(a), self.term(b)),
            Term::Mul(a, b) => Term::mul(self.term(a), self.term(b)),
            Term::Proj(a, b) => Term::proj(self.term(a), self.term(b)),
            Term::Cat(a, b) => Term::cat(self.term(a), self.term(b)),
            Term::App(x, a) => {
                let head = if x == self.var { self.seq_target() } else { x.clone() };
                Term::App(head, Box::new(self.term(a)))
            }
            Term::Bar(x, a) => {
                let head = if x == self.var { self.seq_target() } else { x.clone() };
                Term::Bar(head, Box::new(self.term(a)))
            }
            Term::Tuple(ts) => Term::Tuple(ts.iter().map(|a| self.term(a)).collect()),
            Term::Chi { var, body, arg } => {
                let arg = Box::new(self.term(arg));
                if var == self.var || !body.has_free(self.var) {
                    return Term::Chi { var: var.clone(), body: body.clone(), arg };
                }
                let (y, renamed) = self.binder(var, body);
                let body = renamed.as_ref().unwrap_or(body);
                Term::Chi { var: y, body: Box::new(self.formula(body)), arg }
            }
        }
    }

    fn formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Lt(a, b) => Formula::Lt(self.term(a), self.term(b)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| self.term(a)).collect()),
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Imp(a, b) => Formula::imp(self.formula(a), self.formula(b)),
            Formula::All(y, a) | Formula::Ex(y, a) => {
                if y == self.var || !a.has_free(self.var) {
                    return f.clone();
                }
                let (y2, renamed) = self.binder(y, a);
                let body = self.formula(renamed.as_ref().unwrap_or(a));
                match f {
                    Formula::All(..) => Formula::all(&y2, body),
                    _ => Formula::ex(&y2, body),
                }
            }
            Formula::Box(t, a) => Formula::boxed(self.term(t), self.formula(a)),
            Formula::SoAll(p, k, a) => Formula::SoAll(p.clone(), *k, Box::new(self.formula(a))),
            Formula::SoEx(p, k, a) => Formula::SoEx(p.clone(), *k, Box::new(self.formula(a))),
        }
    }
}

/// Capture-avoiding substitution of `by` for the free occurrences of `var`.
/// Bound variables that would capture get primed names.
pub fn subst(f: &Formula, var: &Var, by: &Term) -> Formula {
    if !f.has_free(var) {
        return f.clone();
    }
    let danger = by.free_vars().into_iter().map(|v| v.name).collect();
    Subst { var, by, danger }.formula(f)
}

/// Capture-avoiding substitution inside a term.
pub fn subst_term(t: &Term, var: &Var, by: &Term) -> Term {
    let danger = by.free_vars().into_iter().map(|v| v.name).collect();
    Subst { var, by, danger }.term(t)
}

/// Simultaneous capture-avoiding substitution.
pub fn subst_many(f: &Formula, pairs: &[(Var, Term)]) -> Formula {
    let temps: Vec<Var> = pairs.iter().enumerate().map(|(i, (v, _))| Var::new(&format!("%s{i}"), v.sort)).collect();
    let mut out = f.clone();
    for ((v, _), tmp) in pairs.iter().zip(&temps) {
        out = subst(&out, v, &Term::Var(tmp.clone()));
    }
    for ((_, t), tmp) in pairs.iter().zip(&temps) {
        out = subst(&out, tmp, t);
    }
    out
}

/// Replaces every free occurrence of the predicate letter `name` (with matching
/// arity) by `body[args/params]`, renaming binders that would capture free
/// variables of `body`.
pub fn subst_pred(f: &Formula, name: &str, params: &[Var], body: &Formula) -> Formula {
    let mut danger: BTreeSet<Arc<str>> = body.free_vars().into_iter().map(|v| v.name).collect();
    for p in params {
        danger.remove(&p.name);
    }
    pred_rec(f, name, params, body, &danger)
}

fn pred_rec(f: &Formula, name: &str, params: &[Var], body: &Formula, danger: &BTreeSet<Arc<str>>) -> Formula {
    let rec = |g: &Formula| pred_rec(g, name, params, body, danger);
    match f {
        Formula::Pred(p, args) if &**p == name && args.len() == params.len() => {
            let pairs: Vec<(Var, Term)> = params.iter().cloned().zip(args.iter().cloned()).collect();
            subst_many(body, &pairs)
        }
        Formula::Eq(..) | Formula::Lt(..) | Formula::Pred(..) | Formula::Bot => f.clone(),
        Formula::And(a, b) => Formula::and(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
        Formula::Imp(a, b) => Formula::imp(rec(a), rec(b)),
        Formula::All(y, a) | Formula::Ex(y, a) => {
            let (y2, a2) = if danger.contains(&y.name) {
                let mut taken = danger.clone();
                all_names_f(a, &mut taken);
                let fresh = Var::new(&fresh_name(&y.name, |n| taken.contains(n)), y.sort);
                let renamed = subst(a, y, &Term::Var(fresh.clone()));
                (fresh, renamed)
            } else {
                (y.clone(), (**a).clone())
            };
            let inner = rec(&a2);
            match f {
                Formula::All(..) => Formula::all(&y2, inner),
                _ => Formula::ex(&y2, inner),
            }
        }
        Formula::Box(t, a) => Formula::boxed(t.clone(), rec(a)),
        Formula::SoAll(p, k, a) | Formula::SoEx(p, k, a) => {
            let inner = if &**p == name && *k == params.len() { (**a).clone() } else { rec(a) };
            match f {
                Formula::SoAll(..) => Formula::SoAll(p.clone(), *k, Box::new(inner)),
                _ => Formula::SoEx(p.clone(), *k, Box::new(inner)),
            }
        }
    }
}

/// Canonical representative of the alpha-equivalence class: every bound
/// variable is renamed after its binding depth.
pub fn canon(f: &Formula) -> Formula {
    Canon::default().formula(f)
}

pub fn canon_term(t: &Term) -> Term {
    Canon::default().term(t)
}

#[derive(Default)]
struct Canon {
    fo: Vec<(Var, Var)>,
    so: Vec<(Arc<str>, Arc<str>)>,
}

impl Canon {
    fn lookup(&self, v: &Var) -> Var {
        self.fo.iter().rev().find(|(old, _)| old == v).map(|(_, new)| new.clone()).unwrap_or_else(|| v.clone())
    }

    fn enter(&mut self, v: &Var) -> Var {
        let depth = self.fo.len() + self.so.len();
        let new = Var::new(&format!("%{depth}"), v.sort);
        self.fo.push((v.clone(), new.clone()));
        new
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.lookup(v)),
            Term::Zero => Term::Zero,
            Term::Succ(a) => Term::succ(self.term(a)),
            Term::Add(a, b) => Term::add(self.term(a), self.term(b)),
            Term::Mul(a, b) => Term::mul(self.term(a), self.term(b)),
            Term::Proj(a, b) => Term::proj(self.term(a), self.term(b)),
            Term::Cat(a, b) => Term::cat(self.term(a), self.term(b)),
            Term::App(v, a) => Term::App(self.lookup(v), Box::new(self.term(a))),
            Term::Bar(v, a) => Term::Bar(self.lookup(v), Box::new(self.term(a))),
            Term::Tuple(ts) => Term::Tuple(ts.iter().map(|a| self.term(a)).collect()),
            Term::Chi { var, body, arg } => {
                let arg = Box::new(self.term(arg));
                let v = self.enter(var);
                let body = Box::new(self.formula(body));
                self.fo.pop();
                Term::Chi { var: v, body, arg }
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Lt(a, b) => Formula::Lt(self.term(a), self.term(b)),
            Formula::Pred(p, args) => {
                let name = self
                    .so
                    .iter()
                    .rev()
                    .find(|(old, _)| old == p)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| p.clone());
                Formula::Pred(name, args.iter().map(|a| self.term(a)).collect())
            }
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Imp(a, b) => Formula::imp(self.formula(a), self.formula(b)),
            Formula::All(v, a) | Formula::Ex(v, a) => {
                let nv = self.enter(v);
                let body = self.formula(a);
                self.fo.pop();
                match f {
                    Formula::All(..) => Formula::all(&nv, body),
                    _ => Formula::ex(&nv, body),
                }
            }
            Formula::Box(t, a) => Formula::boxed(self.term(t), self.formula(a)),
            Formula::SoAll(p, k, a) | Formula::SoEx(p, k, a) => {
                let depth = self.fo.len() + self.so.len();
                let np: Arc<str> = Arc::from(format!("%R{depth}").as_str());
                self.so.push((p.clone(), np.clone()));
                let body = Box::new(self.formula(a));
                self.so.pop();
                match f {
                    Formula::SoAll(..) => Formula::SoAll(np, *k, body),
                    _ => Formula::SoEx(np, *k, body),
                }
            }
        }
    }
}
