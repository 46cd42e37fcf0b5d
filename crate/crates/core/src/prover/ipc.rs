//! Contraction-free sequent search (G4ip) for intuitionistic propositional
//! logic. Non-propositional subformulas are treated as atoms. Successful
//! searches return natural-deduction proof terms, which are linearized into
//! kernel lines.

use std::collections::HashMap;
use std::rc::Rc;

use crate::kernel::{Label, ProofBuilder};
use crate::syntax::{canon, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PF {
    Atom(u32),
    Bot,
    And(P, P),
    Or(P, P),
    Imp(P, P),
}

pub type P = Rc<PF>;

fn imp(a: &P, b: &P) -> P {
    Rc::new(PF::Imp(a.clone(), b.clone()))
}

/// Natural-deduction proof terms over a table of hypotheses.
#[derive(Debug)]
pub enum Pt {
    Hyp(usize),
    AndI(R, R),
    AndE1(R),
    AndE2(R),
    OrI1(R, P),
    OrI2(P, R),
    OrE(R, usize, R, usize, R),
    ImpI(usize, R),
    ImpE(R, R),
    BotE(R, P),
}

pub type R = Rc<Pt>;

fn pt(t: Pt) -> R {
    Rc::new(t)
}

/// Bijection between atoms and the formulas they abstract.
#[derive(Debug, Default, Clone)]
pub struct Atoms {
    formulas: Vec<Formula>,
    index: HashMap<Formula, u32>,
}

impl Atoms {
    pub fn to_pf(&mut self, f: &Formula) -> P {
        Rc::new(match f {
            Formula::Bot => PF::Bot,
            Formula::And(a, b) => PF::And(self.to_pf(a), self.to_pf(b)),
            Formula::Or(a, b) => PF::Or(self.to_pf(a), self.to_pf(b)),
            Formula::Imp(a, b) => PF::Imp(self.to_pf(a), self.to_pf(b)),
            other => {
                let key = canon(other);
                let next = self.formulas.len() as u32;
                let id = *self.index.entry(key).or_insert(next);
                if id == next {
                    self.formulas.push(other.clone());
                }
                PF::Atom(id)
            }
        })
    }

    pub fn to_formula(&self, p: &PF) -> Formula {
        match p {
            PF::Atom(i) => self.formulas[*i as usize].clone(),
            PF::Bot => Formula::Bot,
            PF::And(a, b) => Formula::and(self.to_formula(a), self.to_formula(b)),
            PF::Or(a, b) => Formula::or(self.to_formula(a), self.to_formula(b)),
            PF::Imp(a, b) => Formula::imp(self.to_formula(a), self.to_formula(b)),
        }
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}

#[derive(Clone, Default)]
struct Ctx {
    seen: Vec<(P, R)>,
    atoms: HashMap<u32, R>,
    atom_imps: Vec<(u32, P, R)>,
    imp_imps: Vec<(P, P, P, R)>,
    disjs: Vec<(P, P, R)>,
}

/// Proof search state. `hyps[i]` is the formula of hypothesis `i`.
pub struct G4 {
    pub hyps: Vec<P>,
    steps: u64,
    budget: u64,
    pub exhausted: bool,
}

impl G4 {
    pub fn new(budget: u64) -> G4 {
        G4 { hyps: Vec::new(), steps: 0, budget, exhausted: false }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn hyp(&mut self, p: &P) -> usize {
        self.hyps.push(p.clone());
        self.hyps.len() - 1
    }

    /// Adds formulas to the context, applying the invertible left rules.
    /// Returns a proof of bot if one turns up.
    fn add(&mut self, ctx: &mut Ctx, items: Vec<(P, R)>) -> Option<R> {
        let mut work = items;
        while let Some((p, r)) = work.pop() {
            if ctx.seen.iter().any(|(q, _)| *q == p) {
                continue;
            }
            ctx.seen.push((p.clone(), r.clone()));
            match &*p {
                PF::Bot => return Some(r),
                PF::Atom(a) => {
                    ctx.atoms.insert(*a, r.clone());
                    let (fire, keep): (Vec<_>, Vec<_>) = ctx.atom_imps.drain(..).partition(|(q, _, _)| q == a);
                    ctx.atom_imps = keep;
                    for (_, b, ri) in fire {
                        work.push((b, pt(Pt::ImpE(ri, r.clone()))));
                    }
                }
                PF::And(x, y) => {
                    work.push((x.clone(), pt(Pt::AndE1(r.clone()))));
                    work.push((y.clone(), pt(Pt::AndE2(r))));
                }
                PF::Or(x, y) => ctx.disjs.push((x.clone(), y.clone(), r)),
                PF::Imp(a, b) => match &**a {
                    PF::Atom(q) => match ctx.atoms.get(q) {
                        Some(ra) => work.push((b.clone(), pt(Pt::ImpE(r, ra.clone())))),
                        None => ctx.atom_imps.push((*q, b.clone(), r)),
                    },
                    PF::Bot => {}
                    PF::And(c, d) => {
                        let (hc, hd) = (self.hyp(c), self.hyp(d));
                        let conj = pt(Pt::AndI(pt(Pt::Hyp(hc)), pt(Pt::Hyp(hd))));
                        let t = pt(Pt::ImpI(hc, pt(Pt::ImpI(hd, pt(Pt::ImpE(r, conj))))));
                        work.push((imp(c, &imp(d, b)), t));
                    }
                    PF::Or(c, d) => {
                        let hc = self.hyp(c);
                        let tc = pt(Pt::ImpI(hc, pt(Pt::ImpE(r.clone(), pt(Pt::OrI1(pt(Pt::Hyp(hc)), d.clone()))))));
                        let hd = self.hyp(d);
                        let td = pt(Pt::ImpI(hd, pt(Pt::ImpE(r, pt(Pt::OrI2(c.clone(), pt(Pt::Hyp(hd))))))));
                        work.push((imp(c, b), tc));
                        work.push((imp(d, b), td));
                    }
                    PF::Imp(c, d) => ctx.imp_imps.push((c.clone(), d.clone(), b.clone(), r)),
                },
            }
        }
        None
    }

    fn extend(&mut self, mut ctx: Ctx, items: Vec<(P, R)>, goal: &P) -> Option<R> {
        match self.add(&mut ctx, items) {
            Some(bot) => Some(pt(Pt::BotE(bot, goal.clone()))),
            None => self.prove(ctx, goal),
        }
    }

    fn prove(&mut self, mut ctx: Ctx, goal: &P) -> Option<R> {
        self.steps += 1;
        if self.steps > self.budget {
            self.exhausted = true;
            return None;
        }
        if let Some((_, r)) = ctx.seen.iter().find(|(q, _)| q == goal) {
            return Some(r.clone());
        }
        match &**goal {
            PF::And(a, b) => {
                let pa = self.prove(ctx.clone(), a)?;
                let pb = self.prove(ctx, b)?;
                return Some(pt(Pt::AndI(pa, pb)));
            }
            PF::Imp(a, b) => {
                let h = self.hyp(a);
                let body = self.extend(ctx, vec![(a.clone(), pt(Pt::Hyp(h)))], b)?;
                return Some(pt(Pt::ImpI(h, body)));
            }
            _ => {}
        }
        if let Some((x, y, r)) = ctx.disjs.pop() {
            let h1 = self.hyp(&x);
            let p1 = self.extend(ctx.clone(), vec![(x, pt(Pt::Hyp(h1)))], goal)?;
            let h2 = self.hyp(&y);
            let p2 = self.extend(ctx, vec![(y, pt(Pt::Hyp(h2)))], goal)?;
            return Some(pt(Pt::OrE(r, h1, p1, h2, p2)));
        }
        if let PF::Atom(a) = &**goal {
            if let Some(r) = ctx.atoms.get(a) {
                return Some(r.clone());
            }
        }
        if let PF::Or(a, b) = &**goal {
            if let Some(p) = self.prove(ctx.clone(), a) {
                return Some(pt(Pt::OrI1(p, b.clone())));
            }
            if let Some(p) = self.prove(ctx.clone(), b) {
                return Some(pt(Pt::OrI2(a.clone(), p)));
            }
        }
        for i in 0..ctx.imp_imps.len() {
            if self.exhausted {
                return None;
            }
            let mut rest = ctx.clone();
            let (c, d, b, r) = rest.imp_imps.remove(i);
            let (hd, hc) = (self.hyp(&d), self.hyp(&c));
            let d_to_b = pt(Pt::ImpI(hd, pt(Pt::ImpE(r.clone(), pt(Pt::ImpI(hc, pt(Pt::Hyp(hd))))))));
            let Some(p1) = self.extend(rest.clone(), vec![(imp(&d, &b), d_to_b)], &imp(&c, &d)) else {
                continue;
            };
            if let Some(p2) = self.extend(rest, vec![(b.clone(), pt(Pt::ImpE(r, p1)))], goal) {
                return Some(p2);
            }
        }
        None
    }

    /// Searches for a proof of `goal` from hypotheses `0..premises.len()`.
    pub fn search(&mut self, premises: &[P], goal: &P) -> Option<R> {
        let items: Vec<(P, R)> = premises
            .iter()
            .map(|p| {
                let h = self.hyp(p);
                (p.clone(), pt(Pt::Hyp(h)))
            })
            .collect();
        self.extend(Ctx::default(), items, goal)
    }
}

pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Outcome of a bounded intuitionistic provability search.
#[derive(Debug)]
pub enum Search {
    Proved(R),
    Unprovable,
    Budget,
}

pub fn search(atoms: &mut Atoms, premises: &[Formula], goal: &Formula, budget: u64) -> (Search, G4) {
    let prem: Vec<P> = premises.iter().map(|f| atoms.to_pf(f)).collect();
    let g = atoms.to_pf(goal);
    let mut s = G4::new(budget);
    let r = s.search(&prem, &g);
    let out = match r {
        Some(p) => Search::Proved(p),
        None if s.exhausted => Search::Budget,
        None => Search::Unprovable,
    };
    (out, s)
}

struct Emitter<'a> {
    b: &'a mut ProofBuilder,
    atoms: &'a Atoms,
    hyps: &'a [P],
    premises: usize,
    names: HashMap<usize, Label>,
    cache: HashMap<*const Pt, Label>,
    closed: HashMap<*const Pt, bool>,
}

impl Emitter<'_> {
    /// Whether the term only uses premises, so its lines can be shared.
    fn premise_only(&mut self, t: &R) -> bool {
        let key = Rc::as_ptr(t);
        if let Some(v) = self.closed.get(&key) {
            return *v;
        }
        let v = match &**t {
            Pt::Hyp(h) => *h < self.premises,
            Pt::AndI(a, b) | Pt::ImpE(a, b) => self.premise_only(a) && self.premise_only(b),
            Pt::AndE1(a) | Pt::AndE2(a) | Pt::OrI1(a, _) | Pt::OrI2(_, a) | Pt::BotE(a, _) => self.premise_only(a),
            // Binders introduce non-premise hypotheses; be conservative.
            Pt::OrE(..) | Pt::ImpI(..) => false,
        };
        self.closed.insert(key, v);
        v
    }

    fn emit(&mut self, t: &R) -> Label {
        let key = Rc::as_ptr(t);
        let shareable = self.premise_only(t);
        if shareable {
            if let Some(l) = self.cache.get(&key) {
                return l.clone();
            }
        }
        let f = |s: &Self, p: &P| s.atoms.to_formula(p);
        let label = match &**t {
            Pt::Hyp(h) => self.names[h].clone(),
            Pt::AndI(a, b) => {
                let (la, lb) = (self.emit(a), self.emit(b));
                self.b.and_i(&la, &lb)
            }
            Pt::AndE1(a) => {
                let la = self.emit(a);
                self.b.and_e1(&la)
            }
            Pt::AndE2(a) => {
                let la = self.emit(a);
                self.b.and_e2(&la)
            }
            Pt::OrI1(a, right) => {
                let la = self.emit(a);
                let r = f(self, right);
                self.b.or_i1(&la, r)
            }
            Pt::OrI2(left, a) => {
                let la = self.emit(a);
                let l = f(self, left);
                self.b.or_i2(l, &la)
            }
            Pt::OrE(d, h1, m1, h2, m2) => {
                let ld = self.emit(d);
                let a1 = self.b.assume(f(self, &self.hyps[*h1]));
                self.names.insert(*h1, a1.clone());
                let l1 = self.emit(m1);
                let a2 = self.b.assume(f(self, &self.hyps[*h2]));
                self.names.insert(*h2, a2.clone());
                let l2 = self.emit(m2);
                self.b.or_e(&ld, &a1, &l1, &a2, &l2)
            }
            Pt::ImpI(h, body) => {
                let a = self.b.assume(f(self, &self.hyps[*h]));
                self.names.insert(*h, a.clone());
                let lb = self.emit(body);
                self.b.imp_i(&a, &lb)
            }
            Pt::ImpE(i, a) => {
                let (li, la) = (self.emit(i), self.emit(a));
                self.b.imp_e(&li, &la)
            }
            Pt::BotE(a, target) => {
                let la = self.emit(a);
                let g = f(self, target);
                self.b.bot_e(&la, g)
            }
        };
        if shareable {
            self.cache.insert(key, label.clone());
        }
        label
    }
}

/// Appends lines deriving `goal` from the labelled premises. Returns the label
/// of the conclusion, which may be a premise label if nothing was needed.
pub fn emit_consequence(b: &mut ProofBuilder, premises: &[(Label, Formula)], goal: &Formula) -> Option<Label> {
    let mut atoms = Atoms::default();
    let fs: Vec<Formula> = premises.iter().map(|(_, f)| f.clone()).collect();
    let (res, g4) = search(&mut atoms, &fs, goal, DEFAULT_BUDGET);
    let Search::Proved(term) = res else { return None };
    emit_term(b, &atoms, &g4.hyps, premises, &term)
}

/// Linearizes a proof term whose first hypotheses are the given premises.
pub fn emit_term(
    b: &mut ProofBuilder,
    atoms: &Atoms,
    hyps: &[P],
    premises: &[(Label, Formula)],
    term: &R,
) -> Option<Label> {
    let mut e = Emitter {
        b,
        atoms,
        hyps,
        premises: premises.len(),
        names: premises.iter().enumerate().map(|(i, (l, _))| (i, l.clone())).collect(),
        cache: HashMap::new(),
        closed: HashMap::new(),
    };
    Some(e.emit(term))
}

/// Whether `goal` follows intuitionistically from `premises` by propositional
/// reasoning alone, within the step budget. `None` when the budget ran out.
pub fn provable(premises: &[Formula], goal: &Formula, budget: u64) -> Option<bool> {
    let mut atoms = Atoms::default();
    match search(&mut atoms, premises, goal, budget).0 {
        Search::Proved(_) => Some(true),
        Search::Unprovable => Some(false),
        Search::Budget => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn classics() {
        for ok in [
            "p -> p",
            "p & q -> q & p",
            "(p | q) -> (q | p)",
            "~~(p | ~p)",
            "~~~p -> ~p",
            "((p -> q) -> p) -> ~~p",
            "(p -> q) -> ~q -> ~p",
        ] {
            assert_eq!(provable(&[], &f(ok), 100_000), Some(true), "{ok}");
        }
        for bad in ["p | ~p", "~~p -> p", "((p -> q) -> p) -> p", "(~q -> ~p) -> p -> q", "(p -> q) | (q -> p)"] {
            assert_eq!(provable(&[], &f(bad), 100_000), Some(false), "{bad}");
        }
    }

    #[test]
    fn quantified_parts_are_atoms() {
        let prem = [f("all x. x = 0"), f("(all x. x = 0) -> ex y. y = 0")];
        assert_eq!(provable(&prem, &f("ex z. z = 0"), 1000), Some(true));
    }
}
