//! Multi-sorted first-order syntax with choice sequences, finite-sequence
//! coding, characteristic-function terms, stage-indexed box formulas and
//! second-order relation quantifiers.

mod classify;
mod notation;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use classify::{is_box_free, is_chi_free, is_extended_delta0, is_propositional, uses_seq, Features};
pub use notation::{Notation, NotationTable};
pub use parse::{parse_formula, parse_formula_with, parse_term, parse_term_with, ParseCtx};
pub use subst::{canon, canon_term, fresh_name, subst, subst_many, subst_pred, subst_term};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("ill-formed: {0}")]
    IllFormed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Nat,
    Seq,
    Obj,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Nat => "nat",
            Sort::Seq => "seq",
            Sort::Obj => "obj",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Var {
        Var { name: Arc::from(name), sort }
    }
    pub fn nat(name: &str) -> Var {
        Var::new(name, Sort::Nat)
    }
    pub fn seq(name: &str) -> Var {
        Var::new(name, Sort::Seq)
    }
    pub fn obj(name: &str) -> Var {
        Var::new(name, Sort::Obj)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Zero,
    Succ(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// `a(t)`: value of a choice sequence.
    App(Var, Box<Term>),
    /// `<t1, ..., tk>`: code of a finite sequence.
    Tuple(Vec<Term>),
    /// `proj(u, i)`: i-th entry of a coded sequence.
    Proj(Box<Term>, Box<Term>),
    /// `u # v`: concatenation of coded sequences.
    Cat(Box<Term>, Box<Term>),
    /// `bar(a, t)`: code of the initial segment of length t.
    Bar(Var, Box<Term>),
    /// `chi[x. A](t)`: characteristic function of A at t.
    Chi {
        var: Var,
        body: Box<Formula>,
        arg: Box<Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Lt(Term, Term),
    /// Predicate letter or second-order relation variable applied to terms.
    Pred(Arc<str>, Vec<Term>),
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    All(Var, Box<Formula>),
    Ex(Var, Box<Formula>),
    /// `box[t] A`: A has been established at stage t.
    Box(Term, Box<Formula>),
    SoAll(Arc<str>, usize, Box<Formula>),
    SoEx(Arc<str>, usize, Box<Formula>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }
    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }
    pub fn num(n: usize) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::succ(t))
    }
    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }
    pub fn app(a: &Var, t: Term) -> Term {
        Term::App(a.clone(), Box::new(t))
    }
    pub fn cat(a: Term, b: Term) -> Term {
        Term::Cat(Box::new(a), Box::new(b))
    }
    pub fn bar(a: &Var, t: Term) -> Term {
        Term::Bar(a.clone(), Box::new(t))
    }
    pub fn proj(u: Term, i: Term) -> Term {
        Term::Proj(Box::new(u), Box::new(i))
    }

    /// Sort of a well-formed term. Sequence-valued terms only occur as variables.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            _ => Sort::Nat,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        subst::term_free_vars(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, v: &Var) -> bool {
        subst::term_occurs(self, v)
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Lt(a, b)
    }
    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(Arc::from(name), args)
    }
    pub fn letter(name: &str) -> Formula {
        Formula::Pred(Arc::from(name), Vec::new())
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }
    pub fn all(v: &Var, body: Formula) -> Formula {
        Formula::All(v.clone(), Box::new(body))
    }
    pub fn ex(v: &Var, body: Formula) -> Formula {
        Formula::Ex(v.clone(), Box::new(body))
    }
    pub fn boxed(t: Term, body: Formula) -> Formula {
        Formula::Box(t, Box::new(body))
    }
    /// `all x. x < t -> body`
    pub fn all_below(x: &Var, t: Term, body: Formula) -> Formula {
        Formula::all(x, Formula::imp(Formula::lt(Term::var(x), t), body))
    }
    /// `ex x. x < t & body`
    pub fn ex_below(x: &Var, t: Term, body: Formula) -> Formula {
        Formula::ex(x, Formula::and(Formula::lt(Term::var(x), t), body))
    }
    pub fn conj(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Formula::not(Formula::Bot),
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }
    pub fn disj(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Formula::Bot,
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    /// If this is `A -> bot`, returns A.
    pub fn as_neg(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(a, b) if **b == Formula::Bot => Some(a),
            _ => None,
        }
    }

    /// If this is `(A -> B) & (B -> A)`, returns (A, B).
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::And(l, r) = self {
            if let (Formula::Imp(a, b), Formula::Imp(b2, a2)) = (&**l, &**r) {
                if a == a2 && b == b2 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Recognizes `all x. x < t -> A` with x not free in t.
    pub fn as_bounded_all(&self) -> Option<(&Var, &Term, &Formula)> {
        if let Formula::All(x, body) = self {
            if let Formula::Imp(g, a) = &**body {
                if let Formula::Lt(Term::Var(y), t) = &**g {
                    if y == x && x.sort == Sort::Nat && !t.has_free(x) {
                        return Some((x, t, a));
                    }
                }
            }
        }
        None
    }

    /// Recognizes `ex x. x < t & A` with x not free in t.
    pub fn as_bounded_ex(&self) -> Option<(&Var, &Term, &Formula)> {
        if let Formula::Ex(x, body) = self {
            if let Formula::And(g, a) = &**body {
                if let Formula::Lt(Term::Var(y), t) = &**g {
                    if y == x && x.sort == Sort::Nat && !t.has_free(x) {
                        return Some((x, t, a));
                    }
                }
            }
        }
        None
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        subst::formula_free_vars(self, &mut Vec::new(), &mut out);
        out
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<Var> {
        let mut out = Vec::new();
        subst::formula_free_vars_ordered(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, v: &Var) -> bool {
        subst::formula_occurs(self, v)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Free predicate letters with their arities (second-order bound ones excluded).
    pub fn predicates(&self) -> BTreeSet<(Arc<str>, usize)> {
        let mut out = BTreeSet::new();
        subst::formula_preds(self, &mut Vec::new(), &mut out);
        out
    }

    /// Alpha-equivalence.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || canon(self) == canon(other)
    }

    /// Universal closure over the free variables in order of first occurrence.
    pub fn closure(&self) -> Formula {
        let vars = self.free_vars_ordered();
        vars.iter().rev().fold(self.clone(), |acc, v| Formula::all(v, acc))
    }

    /// Number of connective, quantifier and atom nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Lt(..) | Formula::Pred(..) | Formula::Bot => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::All(_, a) | Formula::Ex(_, a) | Formula::Box(_, a) => 1 + a.size(),
            Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => 1 + a.size(),
        }
    }

    /// First-order quantifier rank.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Lt(..) | Formula::Pred(..) | Formula::Bot => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            Formula::All(_, a) | Formula::Ex(_, a) => 1 + a.quantifier_rank(),
            Formula::Box(_, a) | Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => a.quantifier_rank(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::term_to_string(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::formula_to_string(self))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests;
