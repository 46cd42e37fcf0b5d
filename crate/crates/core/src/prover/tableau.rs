//! Ground analytic tableau for classical first-order logic with equality,
//! over relational signatures.
//!
//! The search refutes the negation normal form of `~phi`. Existentials
//! branch over a fresh constant (tried first) and every existing constant
//! class. A closed fresh branch yields a certificate that uses only the
//! standard rules; an open saturated branch, possibly through reused
//! constants, is a Hintikka set with a finite domain and yields a
//! countermodel.

use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::semantics::{eval_fo, signature_of, Assignment, FiniteStructure};
use crate::syntax::{is_box_free, Formula, Term};

use super::{Countermodel, ProverError, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauBudget {
    /// Maximum number of constants on a branch.
    pub max_terms: usize,
    /// Maximum number of rule applications in the whole search.
    pub max_steps: u64,
}

impl Default for TableauBudget {
    fn default() -> Self {
        TableauBudget { max_terms: 8, max_steps: 200_000 }
    }
}

/// A closed tableau. Each node names the branch formula it expands by its
/// position in the branch, counting from the root formula at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableauNode {
    Alpha {
        of: usize,
        then: Box<TableauNode>,
    },
    Beta {
        of: usize,
        left: Box<TableauNode>,
        right: Box<TableauNode>,
    },
    Gamma {
        of: usize,
        constant: u32,
        then: Box<TableauNode>,
    },
    Delta {
        of: usize,
        fresh: u32,
        then: Box<TableauNode>,
    },
    /// An atom and a negated atom whose arguments agree modulo the branch equalities.
    Close {
        pos: usize,
        neg: usize,
    },
    /// `~(s = t)` with s and t equal modulo the branch equalities.
    CloseNeq {
        at: usize,
    },
    CloseBot {
        at: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableauCertificate {
    /// The formula proved, printed.
    pub formula: String,
    pub root: TableauNode,
}

impl TableauNode {
    pub fn size(&self) -> usize {
        match self {
            TableauNode::Alpha { then, .. } | TableauNode::Gamma { then, .. } | TableauNode::Delta { then, .. } => {
                1 + then.size()
            }
            TableauNode::Beta { left, right, .. } => 1 + left.size() + right.size(),
            _ => 1,
        }
    }
}

type Name = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum T {
    V(Name),
    C(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Atom {
    P(Name, Vec<T>),
    Eq(T, T),
}

#[derive(Debug)]
enum N {
    Lit(bool, Atom),
    True,
    False,
    And(Rc<N>, Rc<N>),
    Or(Rc<N>, Rc<N>),
    All(Name, Rc<N>),
    Ex(Name, Rc<N>),
}

fn term(t: &Term) -> Result<T, ProverError> {
    match t {
        Term::Var(v) => Ok(T::V(v.name.clone())),
        other => Err(ProverError::Unsupported(format!("term {other}"))),
    }
}

/// Negation normal form of `f` (if `pos`) or of `~f`. Negations `A -> bot`
/// flip polarity directly rather than becoming a disjunction with `bot`.
/// Without `dne`, a refuted negation asserts nothing instead of its body.
fn nnf(f: &Formula, pos: bool) -> Result<Rc<N>, ProverError> {
    nnf_with(f, pos, true)
}

fn nnf_with(f: &Formula, pos: bool, dne: bool) -> Result<Rc<N>, ProverError> {
    let nnf = |f: &Formula, pos: bool| nnf_with(f, pos, dne);
    Ok(Rc::new(match f {
        Formula::Bot => {
            if pos {
                N::False
            } else {
                N::True
            }
        }
        Formula::Pred(p, args) => N::Lit(pos, Atom::P(p.clone(), args.iter().map(term).collect::<Result<_, _>>()?)),
        Formula::Eq(a, b) => N::Lit(pos, Atom::Eq(term(a)?, term(b)?)),
        Formula::Imp(_, b) if **b == Formula::Bot && !pos && !dne => N::True,
        Formula::Imp(a, b) if **b == Formula::Bot => return nnf(a, !pos),
        Formula::And(a, b) if pos => N::And(nnf(a, true)?, nnf(b, true)?),
        Formula::And(a, b) => N::Or(nnf(a, false)?, nnf(b, false)?),
        Formula::Or(a, b) if pos => N::Or(nnf(a, true)?, nnf(b, true)?),
        Formula::Or(a, b) => N::And(nnf(a, false)?, nnf(b, false)?),
        Formula::Imp(a, b) if pos => N::Or(nnf(a, false)?, nnf(b, true)?),
        Formula::Imp(a, b) => N::And(nnf(a, true)?, nnf(b, false)?),
        Formula::All(x, a) if pos => N::All(x.name.clone(), nnf(a, true)?),
        Formula::All(x, a) => N::Ex(x.name.clone(), nnf(a, false)?),
        Formula::Ex(x, a) if pos => N::Ex(x.name.clone(), nnf(a, true)?),
        Formula::Ex(x, a) => N::All(x.name.clone(), nnf(a, false)?),
        other => return Err(ProverError::Unsupported(format!("{other} is not relational first-order"))),
    }))
}

fn inst_t(t: &T, x: &Name, c: u32) -> T {
    match t {
        T::V(v) if v == x => T::C(c),
        other => other.clone(),
    }
}

fn inst(n: &Rc<N>, x: &Name, c: u32) -> Rc<N> {
    let at = |a: &Atom| match a {
        Atom::P(p, ts) => Atom::P(p.clone(), ts.iter().map(|t| inst_t(t, x, c)).collect()),
        Atom::Eq(s, t) => Atom::Eq(inst_t(s, x, c), inst_t(t, x, c)),
    };
    match &**n {
        N::Lit(s, a) => Rc::new(N::Lit(*s, at(a))),
        N::True | N::False => n.clone(),
        N::And(a, b) => Rc::new(N::And(inst(a, x, c), inst(b, x, c))),
        N::Or(a, b) => Rc::new(N::Or(inst(a, x, c), inst(b, x, c))),
        N::All(y, _) | N::Ex(y, _) if y == x => n.clone(),
        N::All(y, a) => Rc::new(N::All(y.clone(), inst(a, x, c))),
        N::Ex(y, a) => Rc::new(N::Ex(y.clone(), inst(a, x, c))),
    }
}

#[derive(Clone, Default)]
struct Branch {
    forms: Vec<Rc<N>>,
    alpha: Vec<usize>,
    beta: Vec<usize>,
    /// Oldest first, so every existential is eventually expanded.
    delta: VecDeque<usize>,
    gammas: Vec<(usize, usize)>,
    consts: Vec<u32>,
    next: u32,
    pos: Vec<(usize, Atom)>,
    neg: Vec<(usize, Atom)>,
    eqs: Vec<(u32, u32)>,
    closed: Option<TableauNode>,
}

fn cid(t: &T) -> u32 {
    match t {
        T::C(c) => *c,
        T::V(v) => panic!("free variable {v} on a ground branch"),
    }
}

impl Branch {
    fn find(&self, c: u32) -> u32 {
        // Union-find over the (few) positive equalities, recomputed on demand.
        let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
        fn root(p: &BTreeMap<u32, u32>, mut x: u32) -> u32 {
            while let Some(&y) = p.get(&x) {
                x = y;
            }
            x
        }
        for &(a, b) in &self.eqs {
            let (ra, rb) = (root(&parent, a), root(&parent, b));
            if ra != rb {
                parent.insert(ra.max(rb), ra.min(rb));
            }
        }
        root(&parent, c)
    }

    fn same(&self, a: &T, b: &T) -> bool {
        self.find(cid(a)) == self.find(cid(b))
    }

    fn matches(&self, a: &Atom, b: &Atom) -> bool {
        match (a, b) {
            (Atom::P(p, xs), Atom::P(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.same(x, y))
            }
            _ => false,
        }
    }

    fn check_closed(&mut self) {
        if self.closed.is_some() {
            return;
        }
        for (j, a) in &self.neg {
            if let Atom::Eq(s, t) = a {
                if self.same(s, t) {
                    self.closed = Some(TableauNode::CloseNeq { at: *j });
                    return;
                }
            }
        }
        for (i, a) in &self.pos {
            for (j, b) in &self.neg {
                if self.matches(a, b) {
                    self.closed = Some(TableauNode::Close { pos: *i, neg: *j });
                    return;
                }
            }
        }
    }

    fn add(&mut self, f: Rc<N>) {
        let i = self.forms.len();
        self.forms.push(f.clone());
        match &*f {
            N::True => {}
            N::False => {
                self.closed.get_or_insert(TableauNode::CloseBot { at: i });
            }
            N::Lit(true, a) => {
                if let Atom::Eq(s, t) = a {
                    self.eqs.push((cid(s), cid(t)));
                }
                self.pos.push((i, a.clone()));
                self.check_closed();
            }
            N::Lit(false, a) => {
                self.neg.push((i, a.clone()));
                self.check_closed();
            }
            N::And(..) => self.alpha.push(i),
            N::Or(..) => self.beta.push(i),
            N::Ex(..) => self.delta.push_back(i),
            N::All(..) => self.gammas.push((i, 0)),
        }
    }

    fn fresh(&mut self) -> u32 {
        let c = self.next;
        self.next += 1;
        self.consts.push(c);
        c
    }

    fn class_reps(&self) -> Vec<u32> {
        let mut reps: Vec<u32> = self.consts.iter().map(|&c| self.find(c)).collect();
        reps.sort_unstable();
        reps.dedup();
        reps
    }
}

enum Out {
    Closed(TableauNode),
    Open(Box<Branch>),
    Exhausted,
}

enum Lin {
    Alpha(usize),
    Gamma(usize, u32),
}

fn wrap(steps: Vec<Lin>, mut node: TableauNode) -> TableauNode {
    for s in steps.into_iter().rev() {
        node = match s {
            Lin::Alpha(of) => TableauNode::Alpha { of, then: Box::new(node) },
            Lin::Gamma(of, constant) => TableauNode::Gamma { of, constant, then: Box::new(node) },
        };
    }
    node
}

struct Search {
    budget: TableauBudget,
    steps: u64,
}

impl Search {
    fn run(&mut self, mut b: Branch) -> Out {
        let mut steps = Vec::new();
        loop {
            self.steps += 1;
            if self.steps > self.budget.max_steps {
                return Out::Exhausted;
            }
            if let Some(c) = b.closed.take() {
                return Out::Closed(wrap(steps, c));
            }
            if let Some(i) = b.alpha.pop() {
                let N::And(l, r) = &*b.forms[i].clone() else { unreachable!() };
                b.add(l.clone());
                b.add(r.clone());
                steps.push(Lin::Alpha(i));
                continue;
            }
            if !b.gammas.is_empty() && b.consts.is_empty() {
                if self.budget.max_terms == 0 {
                    return Out::Exhausted;
                }
                b.fresh();
            }
            if let Some(g) = b.gammas.iter().position(|(_, done)| *done < b.consts.len()) {
                let (i, done) = b.gammas[g];
                let c = b.consts[done];
                b.gammas[g].1 += 1;
                let N::All(x, body) = &*b.forms[i].clone() else { unreachable!() };
                b.add(inst(body, x, c));
                steps.push(Lin::Gamma(i, c));
                continue;
            }
            if let Some(i) = b.beta.pop() {
                let N::Or(l, r) = &*b.forms[i].clone() else { unreachable!() };
                let mut left = b.clone();
                left.add(l.clone());
                let lo = self.run(left);
                if let Out::Open(m) = lo {
                    return Out::Open(m);
                }
                let mut right = b;
                right.add(r.clone());
                return match (lo, self.run(right)) {
                    (_, Out::Open(m)) => Out::Open(m),
                    (Out::Closed(a), Out::Closed(c)) => {
                        Out::Closed(wrap(steps, TableauNode::Beta { of: i, left: Box::new(a), right: Box::new(c) }))
                    }
                    _ => Out::Exhausted,
                };
            }
            if let Some(i) = b.delta.pop_front() {
                let N::Ex(x, body) = &*b.forms[i].clone() else { unreachable!() };
                if b.consts.len() < self.budget.max_terms {
                    let mut fresh = b.clone();
                    let c = fresh.fresh();
                    fresh.add(inst(body, x, c));
                    match self.run(fresh) {
                        Out::Closed(t) => {
                            return Out::Closed(wrap(steps, TableauNode::Delta { of: i, fresh: c, then: Box::new(t) }))
                        }
                        Out::Open(m) => return Out::Open(m),
                        Out::Exhausted => {}
                    }
                }
                // Witnesses among existing elements can only produce models.
                for c in b.class_reps() {
                    let mut reuse = b.clone();
                    reuse.add(inst(body, x, c));
                    if let Out::Open(m) = self.run(reuse) {
                        return Out::Open(m);
                    }
                    if self.steps > self.budget.max_steps {
                        break;
                    }
                }
                return Out::Exhausted;
            }
            if b.consts.is_empty() {
                b.fresh();
            }
            return Out::Open(Box::new(b));
        }
    }
}

fn model_of(b: &Branch, phi: &Formula) -> Result<FiniteStructure, ProverError> {
    let reps = b.class_reps();
    let elem = |c: u32| reps.binary_search(&b.find(c)).expect("class");
    let mut m = FiniteStructure::new(reps.len()).map_err(|e| ProverError::Internal(e.to_string()))?;
    let sig = signature_of(phi).map_err(|e| ProverError::Unsupported(e.to_string()))?;
    for (name, &k) in &sig {
        let tuples = b.pos.iter().filter_map(|(_, a)| match a {
            Atom::P(p, ts) if **p == **name => Some(ts.iter().map(|t| elem(cid(t))).collect::<Vec<_>>()),
            _ => None,
        });
        m.add_relation(name, k, tuples).map_err(|e| ProverError::Internal(e.to_string()))?;
    }
    Ok(m)
}

/// Classical tableau proof search for a closed relational first-order sentence.
pub fn tableau_prove(phi: &Formula, budget: TableauBudget) -> Result<Verdict, ProverError> {
    if !phi.is_closed() {
        return Err(ProverError::Unsupported(format!("{phi} has free variables")));
    }
    if !is_box_free(phi) {
        return Err(ProverError::Unsupported("box formulas".into()));
    }
    signature_of(phi).map_err(|e| ProverError::Unsupported(e.to_string()))?;
    let mut root = Branch::default();
    root.add(nnf(phi, false)?);
    let mut s = Search { budget, steps: 0 };
    match s.run(root) {
        Out::Closed(t) => {
            Ok(Verdict::Proved(super::Certificate::Tableau(TableauCertificate { formula: phi.to_string(), root: t })))
        }
        Out::Open(b) => {
            // Tighter constant bounds can still leave an open branch; keep the
            // smallest one found.
            let mut best = b;
            for k in 1..best.consts.len() {
                let mut root = Branch::default();
                root.add(nnf(phi, false)?);
                let mut s = Search { budget: TableauBudget { max_terms: k, ..budget }, steps: 0 };
                if let Out::Open(b) = s.run(root) {
                    best = b;
                    break;
                }
            }
            let m = model_of(&best, phi)?;
            let holds = eval_fo(&m, phi, &Assignment::new()).map_err(|e| ProverError::Internal(e.to_string()))?;
            if holds {
                return Err(ProverError::Internal(format!("open branch does not refute {phi}:\n{m}")));
            }
            Ok(Verdict::Refuted(Countermodel::Structure(m)))
        }
        Out::Exhausted => Ok(Verdict::Exhausted(format!(
            "no closed tableau or finite open branch within {} constants and {} steps",
            budget.max_terms, budget.max_steps
        ))),
    }
}

/// The tableau with the double-negation step removed: whether it closes.
/// Sound but incomplete; used as a negative control.
pub fn tableau_closes_without_dne(phi: &Formula, budget: TableauBudget) -> Result<bool, ProverError> {
    if !phi.is_closed() || !is_box_free(phi) {
        return Err(ProverError::Unsupported(format!("{phi} is not a closed box-free sentence")));
    }
    let mut root = Branch::default();
    root.add(nnf_with(phi, false, false)?);
    Ok(matches!(Search { budget, steps: 0 }.run(root), Out::Closed(_)))
}
