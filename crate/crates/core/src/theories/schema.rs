use std::fmt;
use std::str::FromStr;

use crate::syntax::{
    fresh_name, is_box_free, is_chi_free, is_extended_delta0, parse_formula, subst, Features, Formula, NotationTable,
    Sort, Term, Var,
};

use super::TheoryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemaId {
    Ind,
    PrAn2,
    PrAn2Plus,
    ChiDef,
    BcN,
    BcC,
    Cs1,
    Cs2,
    Cs3,
    SCs2,
    WKs,
    SKs,
    Mp,
    Gmp,
}

pub const ALL_SCHEMAS: [SchemaId; 14] = [
    SchemaId::Ind,
    SchemaId::PrAn2,
    SchemaId::PrAn2Plus,
    SchemaId::ChiDef,
    SchemaId::BcN,
    SchemaId::BcC,
    SchemaId::Cs1,
    SchemaId::Cs2,
    SchemaId::Cs3,
    SchemaId::SCs2,
    SchemaId::WKs,
    SchemaId::SKs,
    SchemaId::Mp,
    SchemaId::Gmp,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Var(Sort),
    Term,
    Formula,
}

impl SchemaId {
    pub fn name(self) -> &'static str {
        match self {
            SchemaId::Ind => "Ind",
            SchemaId::PrAn2 => "PrAn2",
            SchemaId::PrAn2Plus => "PrAn2+",
            SchemaId::ChiDef => "ChiDef",
            SchemaId::BcN => "BCN",
            SchemaId::BcC => "BCC",
            SchemaId::Cs1 => "CS1",
            SchemaId::Cs2 => "CS2",
            SchemaId::Cs3 => "CS3",
            SchemaId::SCs2 => "sCS2",
            SchemaId::WKs => "wKS",
            SchemaId::SKs => "sKS",
            SchemaId::Mp => "MP",
            SchemaId::Gmp => "GMP",
        }
    }

    /// Parameters in the order they are written: `Axiom(T, NAME, p1, ..., pk)`.
    pub fn params(self) -> &'static [ParamKind] {
        use ParamKind::*;
        match self {
            SchemaId::Ind | SchemaId::ChiDef | SchemaId::Mp => &[Var(Sort::Nat), Formula],
            SchemaId::Cs1 | SchemaId::Cs2 | SchemaId::Cs3 | SchemaId::SCs2 => &[Var(Sort::Nat), Formula],
            SchemaId::PrAn2 | SchemaId::PrAn2Plus => &[Var(Sort::Seq), Var(Sort::Nat), Term],
            SchemaId::BcN | SchemaId::WKs | SchemaId::SKs => &[Var(Sort::Seq), Var(Sort::Nat), Formula],
            SchemaId::BcC => &[Var(Sort::Seq), Var(Sort::Seq), Formula],
            SchemaId::Gmp => &[],
        }
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemaId {
    type Err = TheoryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_SCHEMAS.iter().copied().find(|id| id.name() == s).ok_or_else(|| TheoryError::UnknownSchema(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemaParam {
    Var(Var),
    Term(Term),
    Formula(Formula),
}

impl fmt::Display for SchemaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaParam::Var(v) => write!(f, "{v}"),
            SchemaParam::Term(t) => write!(f, "{t}"),
            SchemaParam::Formula(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaInstanceRequest {
    pub schema: SchemaId,
    pub params: Vec<SchemaParam>,
}

/// A schema instance: the universally closed formula and its open matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub closed: Formula,
    pub matrix: Formula,
}

fn var_param(p: &SchemaParam, sort: Sort, schema: SchemaId) -> Result<Var, TheoryError> {
    match p {
        SchemaParam::Var(v) if v.sort == sort => Ok(v.clone()),
        SchemaParam::Term(Term::Var(v)) if v.sort == sort => Ok(v.clone()),
        other => Err(TheoryError::BadParams(format!("{schema}: expected a {sort} variable, got {other}"))),
    }
}

fn formula_param(p: &SchemaParam, schema: SchemaId) -> Result<Formula, TheoryError> {
    match p {
        SchemaParam::Formula(f) => Ok(f.clone()),
        other => Err(TheoryError::BadParams(format!("{schema}: expected a formula, got {other}"))),
    }
}

fn term_param(p: &SchemaParam, schema: SchemaId) -> Result<Term, TheoryError> {
    match p {
        SchemaParam::Term(t) => Ok(t.clone()),
        SchemaParam::Var(v) if v.sort != Sort::Seq => Ok(Term::Var(v.clone())),
        other => Err(TheoryError::BadParams(format!("{schema}: expected a term, got {other}"))),
    }
}

fn side(cond: bool, schema: SchemaId, msg: &str) -> Result<(), TheoryError> {
    if cond {
        Ok(())
    } else {
        Err(TheoryError::SideCondition(format!("{schema}: {msg}")))
    }
}

fn no_box(a: &Formula, schema: SchemaId) -> Result<(), TheoryError> {
    side(is_box_free(a), schema, "matrix must be box-free")?;
    side(!Features::of(a).second_order, schema, "matrix must be first-order")
}

fn gmp() -> Formula {
    parse_formula("all a:seq. ~~ex x:nat. a(x) = 0 -> ex x:nat. a(x) = 0").expect("GMP")
}

/// Checks side conditions and builds the instance.
pub fn instantiate(req: &SchemaInstanceRequest) -> Result<Instance, TheoryError> {
    let s = req.schema;
    let kinds = s.params();
    if req.params.len() != kinds.len() {
        return Err(TheoryError::BadParams(format!("{s} takes {} parameters, got {}", kinds.len(), req.params.len())));
    }
    let p = &req.params;
    let notations = NotationTable::builtin();
    let matrix = match s {
        SchemaId::Ind => {
            let x = var_param(&p[0], Sort::Nat, s)?;
            let a = formula_param(&p[1], s)?;
            let base = subst(&a, &x, &Term::Zero);
            let step = Formula::all(&x, Formula::imp(a.clone(), subst(&a, &x, &Term::succ(Term::var(&x)))));
            Formula::imp(Formula::and(base, step), Formula::all(&x, a))
        }
        SchemaId::PrAn2 | SchemaId::PrAn2Plus => {
            let a = var_param(&p[0], Sort::Seq, s)?;
            let x = var_param(&p[1], Sort::Nat, s)?;
            let t = term_param(&p[2], s)?;
            side(t.sort() == Sort::Nat, s, "the defining term must be a number term")?;
            side(!t.has_free(&a), s, "the sequence variable must not occur in the defining term")?;
            if s == SchemaId::PrAn2 {
                side(!Features::of_term(&t).chi, s, "characteristic-function terms need PrAn2+")?;
            }
            let body = Formula::eq(Term::app(&a, Term::var(&x)), t);
            Formula::ex(&a, Formula::all(&x, body))
        }
        SchemaId::ChiDef => {
            let x = var_param(&p[0], Sort::Nat, s)?;
            let a = formula_param(&p[1], s)?;
            side(is_extended_delta0(&a), s, "the formula must be extended bounded")?;
            let chi = Term::Chi { var: x.clone(), body: Box::new(a.clone()), arg: Box::new(Term::var(&x)) };
            let one = Formula::iff(Formula::eq(chi.clone(), Term::num(1)), a.clone());
            let zero = Formula::iff(Formula::eq(chi, Term::Zero), Formula::not(a));
            Formula::all(&x, Formula::and(one, zero))
        }
        SchemaId::BcN | SchemaId::BcC => {
            let a = var_param(&p[0], Sort::Seq, s)?;
            let (x, x_sort) = if s == SchemaId::BcN {
                (var_param(&p[1], Sort::Nat, s)?, Sort::Nat)
            } else {
                (var_param(&p[1], Sort::Seq, s)?, Sort::Seq)
            };
            let body = formula_param(&p[2], s)?;
            no_box(&body, s)?;
            let fv = body.free_vars();
            let g = Var::seq(&fresh_name("g", |n| n == &*a.name || n == &*x.name || fv.iter().any(|v| &*v.name == n)));
            let note = if x_sort == Sort::Nat { "val" } else { "cval" };
            let link = notations
                .get(note)
                .expect("builtin")
                .expand(&[Term::var(&g), Term::var(&a), Term::var(&x)])
                .map_err(|e| TheoryError::SideCondition(e.to_string()))?;
            let k0 = notations.get("K0").expect("builtin").expand(&[Term::var(&g)]).expect("K0");
            let hyp = Formula::all(&a, Formula::ex(&x, body.clone()));
            let concl = Formula::ex(&g, Formula::and(k0, Formula::all(&a, Formula::ex(&x, Formula::and(link, body)))));
            Formula::imp(hyp, concl)
        }
        SchemaId::Cs1 | SchemaId::Cs2 | SchemaId::Cs3 | SchemaId::SCs2 => {
            let n = var_param(&p[0], Sort::Nat, s)?;
            let a = formula_param(&p[1], s)?;
            no_box(&a, s)?;
            let bx = Formula::boxed(Term::var(&n), a.clone());
            if s != SchemaId::Cs1 {
                side(!a.has_free(&n), s, "the stage variable must not occur free in the matrix")?;
            }
            match s {
                SchemaId::Cs1 => Formula::or(bx.clone(), Formula::not(bx)),
                SchemaId::Cs2 => Formula::imp(a, Formula::not(Formula::not(Formula::ex(&n, bx)))),
                SchemaId::Cs3 => Formula::imp(Formula::ex(&n, bx), a),
                _ => Formula::imp(a, Formula::ex(&n, bx)),
            }
        }
        SchemaId::WKs | SchemaId::SKs => {
            let al = var_param(&p[0], Sort::Seq, s)?;
            let x = var_param(&p[1], Sort::Nat, s)?;
            let a = formula_param(&p[2], s)?;
            no_box(&a, s)?;
            side(!a.has_free(&al), s, "the sequence variable must not occur free in the matrix")?;
            let zero = Formula::eq(Term::app(&al, Term::var(&x)), Term::Zero);
            let some_nonzero = Formula::ex(&x, Formula::not(zero.clone()));
            let body = if s == SchemaId::WKs {
                Formula::and(
                    Formula::iff(Formula::not(a.clone()), Formula::all(&x, zero)),
                    Formula::imp(some_nonzero, a),
                )
            } else {
                Formula::iff(a, some_nonzero)
            };
            Formula::ex(&al, body)
        }
        SchemaId::Mp => {
            let x = var_param(&p[0], Sort::Nat, s)?;
            let a = formula_param(&p[1], s)?;
            let dec = Formula::all(&x, Formula::or(a.clone(), Formula::not(a.clone())));
            let ex = Formula::ex(&x, a);
            Formula::imp(dec, Formula::imp(Formula::not(Formula::not(ex.clone())), ex))
        }
        SchemaId::Gmp => gmp(),
    };
    if s != SchemaId::ChiDef && s != SchemaId::PrAn2Plus {
        for q in p {
            let chi = match q {
                SchemaParam::Formula(f) => !is_chi_free(f),
                SchemaParam::Term(t) => Features::of_term(t).chi,
                SchemaParam::Var(_) => false,
            };
            // Induction is the one other schema allowed over the extended language.
            side(!chi || s == SchemaId::Ind, s, "characteristic-function terms are not allowed here")?;
        }
    }
    Ok(Instance { closed: matrix.closure(), matrix })
}
