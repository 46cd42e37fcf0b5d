//! Structural comparison of formulas up to renaming of bound variables, with
//! hooks for instance matching and equality replacement.

use std::sync::Arc;

use crate::syntax::{Formula, Term, Var};

#[derive(Default)]
struct Env {
    fo: Vec<(Var, Var)>,
    so: Vec<(Arc<str>, Arc<str>)>,
}

impl Env {
    fn left_index(&self, v: &Var) -> Option<usize> {
        self.fo.iter().rposition(|(l, _)| l == v)
    }
    fn right_index(&self, v: &Var) -> Option<usize> {
        self.fo.iter().rposition(|(_, r)| r == v)
    }
    fn var_eq(&self, a: &Var, b: &Var) -> bool {
        match (self.left_index(a), self.right_index(b)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }
    fn pred_eq(&self, a: &Arc<str>, b: &Arc<str>) -> bool {
        let i = self.so.iter().rposition(|(l, _)| l == a);
        let j = self.so.iter().rposition(|(_, r)| r == b);
        match (i, j) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }
    fn left_bound_in(&self, t: &Term) -> bool {
        t.free_vars().iter().any(|v| self.left_index(v).is_some())
    }
    fn right_bound_in(&self, t: &Term) -> bool {
        t.free_vars().iter().any(|v| self.right_index(v).is_some())
    }
}

/// Decides, at a pair of corresponding subterms, whether they are accepted
/// without further descent.
trait Hook {
    fn terms(&mut self, env: &Env, a: &Term, b: &Term) -> bool;
}

fn zip_terms<H: Hook>(env: &mut Env, h: &mut H, a: &Term, b: &Term) -> bool {
    if h.terms(env, a, b) {
        return true;
    }
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => env.var_eq(x, y),
        (Term::Zero, Term::Zero) => true,
        (Term::Succ(x), Term::Succ(y)) => zip_terms(env, h, x, y),
        (Term::Add(x1, x2), Term::Add(y1, y2))
        | (Term::Mul(x1, x2), Term::Mul(y1, y2))
        | (Term::Proj(x1, x2), Term::Proj(y1, y2))
        | (Term::Cat(x1, x2), Term::Cat(y1, y2)) => zip_terms(env, h, x1, y1) && zip_terms(env, h, x2, y2),
        (Term::App(f, x), Term::App(g, y)) | (Term::Bar(f, x), Term::Bar(g, y)) => {
            (env.var_eq(f, g) || h.terms(env, &Term::Var(f.clone()), &Term::Var(g.clone()))) && zip_terms(env, h, x, y)
        }
        (Term::Tuple(xs), Term::Tuple(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| zip_terms(env, h, x, y))
        }
        (Term::Chi { var: v, body: f, arg: x }, Term::Chi { var: w, body: g, arg: y }) => {
            if v.sort != w.sort || !zip_terms(env, h, x, y) {
                return false;
            }
            env.fo.push((v.clone(), w.clone()));
            let ok = zip_formulas(env, h, f, g);
            env.fo.pop();
            ok
        }
        _ => false,
    }
}

fn zip_formulas<H: Hook>(env: &mut Env, h: &mut H, a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Formula::Eq(x1, x2), Formula::Eq(y1, y2)) | (Formula::Lt(x1, x2), Formula::Lt(y1, y2)) => {
            zip_terms(env, h, x1, y1) && zip_terms(env, h, x2, y2)
        }
        (Formula::Pred(p, xs), Formula::Pred(q, ys)) => {
            env.pred_eq(p, q) && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| zip_terms(env, h, x, y))
        }
        (Formula::Bot, Formula::Bot) => true,
        (Formula::And(x1, x2), Formula::And(y1, y2))
        | (Formula::Or(x1, x2), Formula::Or(y1, y2))
        | (Formula::Imp(x1, x2), Formula::Imp(y1, y2)) => zip_formulas(env, h, x1, y1) && zip_formulas(env, h, x2, y2),
        (Formula::All(v, x), Formula::All(w, y)) | (Formula::Ex(v, x), Formula::Ex(w, y)) => {
            if v.sort != w.sort {
                return false;
            }
            env.fo.push((v.clone(), w.clone()));
            let ok = zip_formulas(env, h, x, y);
            env.fo.pop();
            ok
        }
        (Formula::Box(s, x), Formula::Box(t, y)) => zip_terms(env, h, s, t) && zip_formulas(env, h, x, y),
        (Formula::SoAll(p, k, x), Formula::SoAll(q, l, y)) | (Formula::SoEx(p, k, x), Formula::SoEx(q, l, y)) => {
            if k != l {
                return false;
            }
            env.so.push((p.clone(), q.clone()));
            let ok = zip_formulas(env, h, x, y);
            env.so.pop();
            ok
        }
        _ => false,
    }
}

struct NoHook;
impl Hook for NoHook {
    fn terms(&mut self, _: &Env, _: &Term, _: &Term) -> bool {
        false
    }
}

pub fn term_alpha_eq(a: &Term, b: &Term) -> bool {
    a == b || zip_terms(&mut Env::default(), &mut NoHook, a, b)
}

struct Repl<'a> {
    s: &'a Term,
    t: &'a Term,
}

impl Hook for Repl<'_> {
    fn terms(&mut self, env: &Env, a: &Term, b: &Term) -> bool {
        if env.left_bound_in(a) || env.right_bound_in(b) {
            return false;
        }
        (term_alpha_eq(a, self.s) && term_alpha_eq(b, self.t)) || (term_alpha_eq(a, self.t) && term_alpha_eq(b, self.s))
    }
}

/// Whether `b` arises from `a` by replacing some free occurrences of `s` by `t`
/// or of `t` by `s`.
pub fn replaces(a: &Formula, b: &Formula, s: &Term, t: &Term) -> bool {
    zip_formulas(&mut Env::default(), &mut Repl { s, t }, a, b)
}

struct Inst<'a> {
    v: &'a Var,
    found: Option<Term>,
    clash: bool,
}

impl Hook for Inst<'_> {
    fn terms(&mut self, env: &Env, a: &Term, b: &Term) -> bool {
        match a {
            Term::Var(x) if x == self.v && env.left_index(x).is_none() => {
                if env.right_bound_in(b) || b.sort() != x.sort {
                    self.clash = true;
                    return false;
                }
                match &self.found {
                    Some(prev) if !term_alpha_eq(prev, b) => {
                        self.clash = true;
                        false
                    }
                    Some(_) => true,
                    None => {
                        self.found = Some(b.clone());
                        true
                    }
                }
            }
            _ => false,
        }
    }
}

/// Finds t with `body[t/v]` structurally equal to `target`. Returns `v` itself
/// when `v` does not occur. The caller re-checks the result by substitution.
pub fn find_instance(body: &Formula, v: &Var, target: &Formula) -> Option<Term> {
    let mut h = Inst { v, found: None, clash: false };
    let ok = zip_formulas(&mut Env::default(), &mut h, body, target);
    if !ok || h.clash {
        return None;
    }
    Some(h.found.unwrap_or_else(|| Term::Var(v.clone())))
}
