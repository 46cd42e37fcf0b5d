//! Propositional completeness made constructive: a tautology gets a
//! classical natural-deduction proof assembled from its truth table.
//!
//! For each valuation v, the literals of v derive phi or ~phi by recursion
//! on phi. Case splits on excluded middle for each letter, itself derived
//! with DNE, then discharge the literal hypotheses.

use std::collections::BTreeMap;

use crate::kernel::{Label, Proof, ProofBuilder};
use crate::syntax::{is_propositional, Formula};

use super::ProverError;

pub type Valuation = BTreeMap<String, bool>;

#[derive(Debug, Clone)]
pub enum PropResult {
    Proof(Proof),
    Falsifying(Valuation),
}

/// Proposition letters of `f`, sorted.
pub fn letters(f: &Formula) -> Vec<String> {
    f.predicates().into_iter().map(|(n, _)| n.to_string()).collect()
}

pub fn truth(f: &Formula, v: &Valuation) -> bool {
    match f {
        Formula::Bot => false,
        Formula::Pred(p, _) => v[&**p],
        Formula::And(a, b) => truth(a, v) && truth(b, v),
        Formula::Or(a, b) => truth(a, v) || truth(b, v),
        Formula::Imp(a, b) => !truth(a, v) || truth(b, v),
        other => panic!("not propositional: {other}"),
    }
}

/// All valuations of `letters`, in binary counting order with the first
/// letter as the most significant bit.
pub fn valuations(letters: &[String]) -> impl Iterator<Item = Valuation> + '_ {
    let k = letters.len();
    (0u32..1 << k)
        .map(move |bits| letters.iter().enumerate().map(|(i, p)| (p.clone(), bits >> (k - 1 - i) & 1 == 1)).collect())
}

/// The first falsifying valuation, if any.
pub fn truth_table_counterexample(f: &Formula) -> Option<Valuation> {
    let ls = letters(f);
    let found = valuations(&ls).find(|v| !truth(f, v));
    found
}

fn neg(f: &Formula) -> Formula {
    Formula::not(f.clone())
}

struct Kalmar {
    b: ProofBuilder,
    lits: BTreeMap<String, Label>,
    v: Valuation,
}

impl Kalmar {
    /// Derives `f` if it is true under the valuation, else `~f`.
    fn derive(&mut self, f: &Formula) -> Label {
        let val = |g: &Formula, s: &Self| truth(g, &s.v);
        match f {
            Formula::Pred(p, _) => self.lits[&**p].clone(),
            Formula::Bot => {
                let h = self.b.assume(Formula::Bot);
                self.b.imp_i(&h, &h)
            }
            Formula::And(a, b) => match (val(a, self), val(b, self)) {
                (true, true) => {
                    let (la, lb) = (self.derive(a), self.derive(b));
                    self.b.and_i(&la, &lb)
                }
                (false, _) => {
                    let na = self.derive(a);
                    let h = self.b.assume(f.clone());
                    let x = self.b.and_e1(&h);
                    let bot = self.b.imp_e(&na, &x);
                    self.b.imp_i(&h, &bot)
                }
                (true, false) => {
                    let nb = self.derive(b);
                    let h = self.b.assume(f.clone());
                    let x = self.b.and_e2(&h);
                    let bot = self.b.imp_e(&nb, &x);
                    self.b.imp_i(&h, &bot)
                }
            },
            Formula::Or(a, b) => match (val(a, self), val(b, self)) {
                (true, _) => {
                    let la = self.derive(a);
                    self.b.or_i1(&la, (**b).clone())
                }
                (false, true) => {
                    let lb = self.derive(b);
                    self.b.or_i2((**a).clone(), &lb)
                }
                (false, false) => {
                    let (na, nb) = (self.derive(a), self.derive(b));
                    let h = self.b.assume(f.clone());
                    let h1 = self.b.assume((**a).clone());
                    let m1 = self.b.imp_e(&na, &h1);
                    let h2 = self.b.assume((**b).clone());
                    let m2 = self.b.imp_e(&nb, &h2);
                    let bot = self.b.or_e(&h, &h1, &m1, &h2, &m2);
                    self.b.imp_i(&h, &bot)
                }
            },
            Formula::Imp(a, b) => match (val(a, self), val(b, self)) {
                (_, true) => {
                    let lb = self.derive(b);
                    let h = self.b.assume((**a).clone());
                    self.b.imp_i(&h, &lb)
                }
                (false, false) => {
                    let na = self.derive(a);
                    let h = self.b.assume((**a).clone());
                    let bot = self.b.imp_e(&na, &h);
                    let lb = self.b.bot_e(&bot, (**b).clone());
                    self.b.imp_i(&h, &lb)
                }
                (true, false) => {
                    let (la, nb) = (self.derive(a), self.derive(b));
                    let h = self.b.assume(f.clone());
                    let y = self.b.imp_e(&h, &la);
                    let bot = self.b.imp_e(&nb, &y);
                    self.b.imp_i(&h, &bot)
                }
            },
            other => panic!("not propositional: {other}"),
        }
    }

    /// `p | ~p` by the usual double-negation detour.
    fn excluded_middle(&mut self, p: &Formula) -> Label {
        let lem = Formula::or(p.clone(), neg(p));
        let h = self.b.assume(neg(&lem));
        let hp = self.b.assume(p.clone());
        let l1 = self.b.or_i1(&hp, neg(p));
        let b1 = self.b.imp_e(&h, &l1);
        let np = self.b.imp_i(&hp, &b1);
        let l2 = self.b.or_i2(p.clone(), &np);
        let b2 = self.b.imp_e(&h, &l2);
        let nn = self.b.imp_i(&h, &b2);
        self.b.dne(&nn)
    }
}

fn split(k: &mut Kalmar, f: &Formula, letters: &[String], i: usize) -> Label {
    if i == letters.len() {
        return k.derive(f);
    }
    let p = &letters[i];
    let letter = Formula::letter(p);
    let lem = k.excluded_middle(&letter);
    let hp = k.b.assume(letter.clone());
    k.lits.insert(p.clone(), hp.clone());
    k.v.insert(p.clone(), true);
    let yes = split(k, f, letters, i + 1);
    let hn = k.b.assume(neg(&letter));
    k.lits.insert(p.clone(), hn.clone());
    k.v.insert(p.clone(), false);
    let no = split(k, f, letters, i + 1);
    k.b.or_e(&lem, &hp, &yes, &hn, &no)
}

/// A classical proof of a tautology, or the first falsifying valuation.
pub fn prop_complete(phi: &Formula) -> Result<PropResult, ProverError> {
    if !is_propositional(phi) {
        return Err(ProverError::Unsupported(format!("{phi} is not propositional")));
    }
    if let Some(v) = truth_table_counterexample(phi) {
        return Ok(PropResult::Falsifying(v));
    }
    let ls = letters(phi);
    let mut k = Kalmar { b: ProofBuilder::new(""), lits: BTreeMap::new(), v: Valuation::new() };
    split(&mut k, phi, &ls, 0);
    Ok(PropResult::Proof(k.b.finish("kalmar", "Classical", phi.clone())))
}
