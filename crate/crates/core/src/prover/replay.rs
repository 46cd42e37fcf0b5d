//! Replays tableau certificates. Written against the syntax tree directly
//! and sharing no code with the search: it recomputes the negation normal
//! form, applies each recorded rule, and checks every closure.

use std::collections::BTreeMap;

use crate::syntax::{subst, Formula, Term, Var};

use super::tableau::TableauNode;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate rejected at branch formula {at}: {msg}")]
pub struct ReplayError {
    pub at: usize,
    pub msg: String,
}

fn not(f: Formula) -> Formula {
    Formula::imp(f, Formula::Bot)
}

fn top() -> Formula {
    not(Formula::Bot)
}

/// NNF with the same conventions as the search: `A -> bot` flips polarity.
fn nnf(f: &Formula, pos: bool) -> Formula {
    match (f, pos) {
        (Formula::Bot, true) => Formula::Bot,
        (Formula::Bot, false) => top(),
        (Formula::Pred(..) | Formula::Eq(..), true) => f.clone(),
        (Formula::Pred(..) | Formula::Eq(..), false) => not(f.clone()),
        (Formula::Imp(a, b), _) if **b == Formula::Bot => nnf(a, !pos),
        (Formula::And(a, b), true) => Formula::and(nnf(a, true), nnf(b, true)),
        (Formula::And(a, b), false) => Formula::or(nnf(a, false), nnf(b, false)),
        (Formula::Or(a, b), true) => Formula::or(nnf(a, true), nnf(b, true)),
        (Formula::Or(a, b), false) => Formula::and(nnf(a, false), nnf(b, false)),
        (Formula::Imp(a, b), true) => Formula::or(nnf(a, false), nnf(b, true)),
        (Formula::Imp(a, b), false) => Formula::and(nnf(a, true), nnf(b, false)),
        (Formula::All(x, a), true) => Formula::all(x, nnf(a, true)),
        (Formula::All(x, a), false) => Formula::ex(x, nnf(a, false)),
        (Formula::Ex(x, a), true) => Formula::ex(x, nnf(a, true)),
        (Formula::Ex(x, a), false) => Formula::all(x, nnf(a, false)),
        _ => f.clone(),
    }
}

fn constant(c: u32, like: &Var) -> Term {
    Term::Var(Var::new(&format!("#c{c}"), like.sort))
}

fn name_of(t: &Term) -> Option<&str> {
    match t {
        Term::Var(v) => Some(&v.name),
        _ => None,
    }
}

/// Equivalence classes induced by the positive equations on the branch.
fn classes(branch: &[Formula]) -> BTreeMap<String, String> {
    let mut rep: BTreeMap<String, String> = BTreeMap::new();
    fn find(rep: &BTreeMap<String, String>, x: &str) -> String {
        let mut cur = x.to_string();
        while let Some(next) = rep.get(&cur) {
            cur = next.clone();
        }
        cur
    }
    for f in branch {
        if let Formula::Eq(a, b) = f {
            if let (Some(a), Some(b)) = (name_of(a), name_of(b)) {
                let (ra, rb) = (find(&rep, a), find(&rep, b));
                if ra != rb {
                    rep.insert(ra, rb);
                }
            }
        }
    }
    rep.keys().cloned().collect::<Vec<_>>().into_iter().map(|k| (k.clone(), find(&rep, &k))).collect()
}

fn equal(cls: &BTreeMap<String, String>, a: &Term, b: &Term) -> bool {
    match (name_of(a), name_of(b)) {
        (Some(x), Some(y)) => {
            let rx = cls.get(x).map(String::as_str).unwrap_or(x);
            let ry = cls.get(y).map(String::as_str).unwrap_or(y);
            rx == ry
        }
        _ => false,
    }
}

fn get(branch: &[Formula], i: usize) -> Result<&Formula, ReplayError> {
    branch.get(i).ok_or(ReplayError { at: i, msg: "no such branch formula".into() })
}

fn replay(branch: &mut Vec<Formula>, node: &TableauNode) -> Result<(), ReplayError> {
    let err = |at: usize, msg: &str| Err(ReplayError { at, msg: msg.to_string() });
    match node {
        TableauNode::Alpha { of, then } => {
            let Formula::And(a, b) = get(branch, *of)?.clone() else { return err(*of, "alpha on a non-conjunction") };
            let mark = branch.len();
            branch.push(*a);
            branch.push(*b);
            replay(branch, then)?;
            branch.truncate(mark);
            Ok(())
        }
        TableauNode::Beta { of, left, right } => {
            let Formula::Or(a, b) = get(branch, *of)?.clone() else { return err(*of, "beta on a non-disjunction") };
            let mark = branch.len();
            branch.push(*a);
            replay(branch, left)?;
            branch.truncate(mark);
            branch.push(*b);
            replay(branch, right)?;
            branch.truncate(mark);
            Ok(())
        }
        TableauNode::Gamma { of, constant: c, then } => {
            let Formula::All(x, a) = get(branch, *of)?.clone() else { return err(*of, "gamma on a non-universal") };
            let mark = branch.len();
            branch.push(subst(&a, &x, &constant(*c, &x)));
            replay(branch, then)?;
            branch.truncate(mark);
            Ok(())
        }
        TableauNode::Delta { of, fresh, then } => {
            let Formula::Ex(x, a) = get(branch, *of)?.clone() else { return err(*of, "delta on a non-existential") };
            let name = format!("#c{fresh}");
            if branch.iter().any(|f| f.free_vars().iter().any(|v| *v.name == *name)) {
                return err(*of, "delta witness is not fresh");
            }
            let mark = branch.len();
            branch.push(subst(&a, &x, &constant(*fresh, &x)));
            replay(branch, then)?;
            branch.truncate(mark);
            Ok(())
        }
        TableauNode::Close { pos, neg } => {
            let cls = classes(branch);
            let (Formula::Pred(p, xs), Some(Formula::Pred(q, ys))) = (get(branch, *pos)?, get(branch, *neg)?.as_neg())
            else {
                return err(*pos, "closure needs an atom and its negation");
            };
            if p != q || xs.len() != ys.len() || !xs.iter().zip(ys).all(|(a, b)| equal(&cls, a, b)) {
                return err(*neg, "atoms differ modulo the branch equalities");
            }
            Ok(())
        }
        TableauNode::CloseNeq { at } => {
            let cls = classes(branch);
            match get(branch, *at)?.as_neg() {
                Some(Formula::Eq(a, b)) if equal(&cls, a, b) => Ok(()),
                _ => err(*at, "not a refuted disequality"),
            }
        }
        TableauNode::CloseBot { at } => match get(branch, *at)? {
            Formula::Bot => Ok(()),
            _ => err(*at, "not bot"),
        },
    }
}

/// Checks that `root` is a closed tableau for the negation of `phi`.
pub fn check_certificate(phi: &Formula, root: &TableauNode) -> Result<(), ReplayError> {
    let mut branch = vec![nnf(phi, false)];
    replay(&mut branch, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn hand_written_certificate() {
        // ~(P(a) -> P(a)) in NNF is P(a) & ~P(a) once a is bound by a universal.
        let phi = parse_formula("all x. P(x) -> P(x)").unwrap();
        let cert = TableauNode::Delta {
            of: 0,
            fresh: 0,
            then: Box::new(TableauNode::Alpha { of: 1, then: Box::new(TableauNode::Close { pos: 2, neg: 3 }) }),
        };
        check_certificate(&phi, &cert).unwrap();
    }

    #[test]
    fn rejects_bad_certificates() {
        let phi = parse_formula("all x. P(x) -> Q(x)").unwrap();
        let cert = TableauNode::Delta {
            of: 0,
            fresh: 0,
            then: Box::new(TableauNode::Alpha { of: 1, then: Box::new(TableauNode::Close { pos: 2, neg: 3 }) }),
        };
        assert!(check_certificate(&phi, &cert).is_err());
        let phi = parse_formula("(ex x. P(x)) -> all x. P(x)").unwrap();
        // Reusing the witness of the existential for the universal is unsound.
        let cert = TableauNode::Alpha {
            of: 0,
            then: Box::new(TableauNode::Delta {
                of: 1,
                fresh: 0,
                then: Box::new(TableauNode::Delta {
                    of: 2,
                    fresh: 0,
                    then: Box::new(TableauNode::Close { pos: 3, neg: 4 }),
                }),
            }),
        };
        assert!(check_certificate(&phi, &cert).is_err());
    }
}
