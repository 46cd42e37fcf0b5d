//! Tarski evaluation. Formulas are compiled once against a signature into a
//! form with de Bruijn levels and dense relation tables, so enumeration can
//! evaluate the same formula over many structures cheaply.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::syntax::{Formula, Sort, Term};

use super::structure::{FiniteStructure, Signature};
use super::SemError;

/// Values of free variables, by name.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Slot {
    Bound(usize),
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub(crate) enum Code {
    Rel(usize, Vec<Slot>),
    RelVar(usize, Vec<Slot>),
    Eq(Slot, Slot),
    Bot,
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Imp(Box<Code>, Box<Code>),
    All(Box<Code>),
    Ex(Box<Code>),
    SoAll(usize, Box<Code>),
    SoEx(usize, Box<Code>),
}

struct Compiler<'a> {
    rels: BTreeMap<&'a str, (usize, usize)>,
    fixed: BTreeMap<&'a str, usize>,
    bound: Vec<Arc<str>>,
    so_bound: Vec<(Arc<str>, usize)>,
    allow_so: bool,
}

impl Compiler<'_> {
    fn slot(&self, t: &Term) -> Result<Slot, SemError> {
        match t {
            Term::Var(v) if v.sort != Sort::Seq => {
                if let Some(i) = self.bound.iter().rposition(|b| *b == v.name) {
                    Ok(Slot::Bound(i))
                } else if let Some(&c) = self.fixed.get(&*v.name) {
                    Ok(Slot::Fixed(c))
                } else {
                    Err(SemError::Unbound(v.name.to_string()))
                }
            }
            other => Err(SemError::Unsupported(format!("term {other} in a relational formula"))),
        }
    }

    fn slots(&self, ts: &[Term]) -> Result<Vec<Slot>, SemError> {
        ts.iter().map(|t| self.slot(t)).collect()
    }

    fn go(&mut self, f: &Formula) -> Result<Code, SemError> {
        let bin = |s: &mut Self, a: &Formula, b: &Formula| -> Result<(Box<Code>, Box<Code>), SemError> {
            Ok((Box::new(s.go(a)?), Box::new(s.go(b)?)))
        };
        Ok(match f {
            Formula::Bot => Code::Bot,
            Formula::Eq(a, b) => Code::Eq(self.slot(a)?, self.slot(b)?),
            Formula::Pred(name, args) => {
                if let Some(i) = self.so_bound.iter().rposition(|(n, _)| n == name) {
                    let arity = self.so_bound[i].1;
                    if arity != args.len() {
                        return Err(SemError::Signature(format!("{name} has arity {arity}, used with {}", args.len())));
                    }
                    Code::RelVar(i, self.slots(args)?)
                } else {
                    let &(idx, arity) = self
                        .rels
                        .get(&**name)
                        .ok_or_else(|| SemError::Signature(format!("no relation {name} in the structure")))?;
                    if arity != args.len() {
                        return Err(SemError::Signature(format!("{name} has arity {arity}, used with {}", args.len())));
                    }
                    Code::Rel(idx, self.slots(args)?)
                }
            }
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Code::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Code::Or(a, b)
            }
            Formula::Imp(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Code::Imp(a, b)
            }
            Formula::All(v, a) | Formula::Ex(v, a) => {
                if v.sort == Sort::Seq {
                    return Err(SemError::Unsupported("sequence quantifiers".into()));
                }
                self.bound.push(v.name.clone());
                let body = self.go(a);
                self.bound.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::All(..)) {
                    Code::All(body)
                } else {
                    Code::Ex(body)
                }
            }
            Formula::SoAll(x, k, a) | Formula::SoEx(x, k, a) => {
                if !self.allow_so {
                    return Err(SemError::Unsupported("second-order quantifier in eval_fo".into()));
                }
                self.so_bound.push((x.clone(), *k));
                let body = self.go(a);
                self.so_bound.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::SoAll(..)) {
                    Code::SoAll(*k, body)
                } else {
                    Code::SoEx(*k, body)
                }
            }
            Formula::Lt(..) => return Err(SemError::Unsupported("arithmetic atoms".into())),
            Formula::Box(..) => return Err(SemError::Unsupported("box formulas".into())),
        })
    }
}

/// Compiles `f` against a signature. Relation indices follow the
/// signature's name order; `fixed` resolves free variables.
pub(crate) fn compile(
    f: &Formula,
    sig: &Signature,
    fixed: &BTreeMap<&str, usize>,
    allow_so: bool,
) -> Result<Code, SemError> {
    let rels = sig.iter().enumerate().map(|(i, (k, &a))| (k.as_str(), (i, a))).collect();
    let mut c = Compiler { rels, fixed: fixed.clone(), bound: vec![], so_bound: vec![], allow_so };
    c.go(f)
}

/// Source of second-order relation values during evaluation.
pub(crate) trait Family {
    fn for_each(&self, n: usize, arity: usize, f: &mut dyn FnMut(&[bool]) -> bool) -> bool;
}

pub(crate) struct NoFamily;

impl Family for NoFamily {
    fn for_each(&self, _: usize, _: usize, _: &mut dyn FnMut(&[bool]) -> bool) -> bool {
        unreachable!("first-order code has no second-order quantifiers")
    }
}

pub(crate) struct Machine<'a> {
    pub n: usize,
    pub rels: Vec<&'a [bool]>,
    pub env: Vec<usize>,
    pub so_env: Vec<Vec<bool>>,
}

impl Machine<'_> {
    fn val(&self, s: Slot) -> usize {
        match s {
            Slot::Bound(i) => self.env[i],
            Slot::Fixed(c) => c,
        }
    }

    fn index(&self, args: &[Slot]) -> usize {
        args.iter().fold(0, |acc, s| acc * self.n + self.val(*s))
    }

    pub fn run(&mut self, c: &Code, fam: &dyn Family) -> bool {
        match c {
            Code::Bot => false,
            Code::Rel(r, args) => self.rels[*r][self.index(args)],
            Code::RelVar(r, args) => {
                let i = self.index(args);
                self.so_env[*r][i]
            }
            Code::Eq(a, b) => self.val(*a) == self.val(*b),
            Code::And(a, b) => self.run(a, fam) && self.run(b, fam),
            Code::Or(a, b) => self.run(a, fam) || self.run(b, fam),
            Code::Imp(a, b) => !self.run(a, fam) || self.run(b, fam),
            Code::All(a) | Code::Ex(a) => {
                let want = matches!(c, Code::Ex(_));
                let mut found = !want;
                for d in 0..self.n {
                    self.env.push(d);
                    let v = self.run(a, fam);
                    self.env.pop();
                    if v == want {
                        found = want;
                        break;
                    }
                }
                found
            }
            Code::SoAll(k, a) | Code::SoEx(k, a) => {
                let want = matches!(c, Code::SoEx(..));
                let mut found = !want;
                let n = self.n;
                // Each candidate value is copied into the environment for the body.
                fam.for_each(n, *k, &mut |table| {
                    self.so_env.push(table.to_vec());
                    let v = self.run(a, fam);
                    self.so_env.pop();
                    if v == want {
                        found = want;
                        return false;
                    }
                    true
                });
                found
            }
        }
    }
}

/// Free predicate letters of `f` as a signature. Fails if one name is used
/// with two arities.
pub fn signature_of(f: &Formula) -> Result<Signature, SemError> {
    let mut sig = Signature::new();
    for (name, k) in f.predicates() {
        if let Some(prev) = sig.insert(name.to_string(), k) {
            if prev != k {
                return Err(SemError::Signature(format!("{name} is used with arities {prev} and {k}")));
            }
        }
    }
    Ok(sig)
}

pub(crate) fn fixed_values<'a>(
    m: &'a FiniteStructure,
    asg: &'a Assignment,
) -> Result<BTreeMap<&'a str, usize>, SemError> {
    let mut fixed: BTreeMap<&str, usize> = m.constants.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    for (k, &v) in asg {
        if v >= m.size {
            return Err(SemError::Structure(format!("{k} = {v} is outside the domain")));
        }
        fixed.insert(k, v);
    }
    Ok(fixed)
}

/// Truth of a relational first-order formula in `m` under `asg`. Free
/// variables missing from `asg` are looked up among the constants of `m`.
pub fn eval_fo(m: &FiniteStructure, phi: &Formula, asg: &Assignment) -> Result<bool, SemError> {
    let sig = m.signature();
    let fixed = fixed_values(m, asg)?;
    let code = compile(phi, &sig, &fixed, false)?;
    let mut mach = Machine {
        n: m.size,
        rels: m.relations.values().map(|r| r.table.as_slice()).collect(),
        env: vec![],
        so_env: vec![],
    };
    Ok(mach.run(&code, &NoFamily))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn cycle3() -> FiniteStructure {
        FiniteStructure::new(3).unwrap().with("E", 2, &[&[0, 1], &[1, 2], &[2, 0]])
    }

    #[test]
    fn basic_clauses() {
        let m = FiniteStructure::new(2).unwrap().with("P", 1, &[&[0]]);
        let none = Assignment::new();
        assert!(eval_fo(&m, &f("ex x:obj. P(x)"), &none).unwrap());
        assert!(!eval_fo(&m, &f("all x:obj. P(x)"), &none).unwrap());
        assert!(eval_fo(&m, &f("all x:obj. P(x) -> P(x)"), &none).unwrap());
        assert!(eval_fo(&cycle3(), &f("all x:obj. ex y:obj. E(x, y)"), &none).unwrap());
        assert!(!eval_fo(&cycle3(), &f("ex x:obj. E(x, x)"), &none).unwrap());
    }

    #[test]
    fn assignment_and_constants() {
        let mut m = cycle3();
        m.add_constant("c", 2).unwrap();
        let asg = Assignment::from([("x".to_string(), 1)]);
        assert!(eval_fo(&m, &f("E(x, c)"), &asg).unwrap());
        assert!(matches!(eval_fo(&m, &f("E(x, d)"), &asg), Err(SemError::Unbound(_))));
    }

    #[test]
    fn signature_errors() {
        let m = cycle3();
        assert!(matches!(eval_fo(&m, &f("ex x:obj. P(x)"), &Assignment::new()), Err(SemError::Signature(_))));
        assert!(matches!(eval_fo(&m, &f("ex x:obj. E(x)"), &Assignment::new()), Err(SemError::Signature(_))));
        assert!(eval_fo(&m, &f("ex x. x < 0"), &Assignment::new()).is_err());
        assert!(signature_of(&f("P(x) & P(x, x)")).is_err());
    }

    #[test]
    fn shadowing_uses_innermost_binder() {
        let m = FiniteStructure::new(2).unwrap().with("P", 1, &[&[1]]);
        assert!(eval_fo(&m, &f("all x:obj. ex x:obj. P(x)"), &Assignment::new()).unwrap());
    }
}
