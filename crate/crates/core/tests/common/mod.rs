//! Seeded generators shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use logicbench::kernel::{check, Label, Proof, ProofBuilder};
use logicbench::semantics::{FiniteStructure, KripkeModel};
use logicbench::syntax::{is_extended_delta0, Formula, Term, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random propositional formula with exactly `connectives` connectives.
pub fn prop_formula(r: &mut ChaCha8Rng, letters: &[&str], connectives: usize) -> Formula {
    if connectives == 0 {
        return Formula::letter(letters.choose(r).unwrap());
    }
    if r.gen_bool(0.25) {
        return Formula::not(prop_formula(r, letters, connectives - 1));
    }
    let left = r.gen_range(0..connectives);
    let a = prop_formula(r, letters, left);
    let b = prop_formula(r, letters, connectives - 1 - left);
    match r.gen_range(0..3) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        _ => Formula::imp(a, b),
    }
}

pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut out = vec![f.clone()];
    match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            out.extend(subformulas(a));
            out.extend(subformulas(b));
        }
        Formula::All(_, a) | Formula::Ex(_, a) | Formula::Box(_, a) => out.extend(subformulas(a)),
        _ => {}
    }
    out
}

/// A random rooted Kripke model: an order inside the index order and an
/// upward-closed valuation for each letter.
pub fn random_kripke(r: &mut ChaCha8Rng, letters: &[&str], max_worlds: usize) -> KripkeModel {
    let n = r.gen_range(1..=max_worlds);
    let mut order = Vec::new();
    for j in 1..n {
        order.push((0, j));
        for i in 1..j {
            if r.gen_bool(0.4) {
                order.push((i, j));
            }
        }
    }
    // Closure of the generating pairs, for up-closing the valuation.
    let mut le = vec![vec![false; n]; n];
    for (w, row) in le.iter_mut().enumerate() {
        row[w] = true;
    }
    for &(i, j) in &order {
        le[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let mut val = vec![BTreeSet::new(); n];
    for l in letters {
        for row in &le {
            if r.gen_bool(0.3) {
                for (v, above) in row.iter().enumerate() {
                    if *above {
                        val[v].insert(l.to_string());
                    }
                }
            }
        }
    }
    KripkeModel::new(n, &order, letters.iter().map(|s| s.to_string()), val).expect("monotone by construction")
}

fn nat(name: &str) -> Term {
    Term::var(&Var::nat(name))
}

fn arith_term(r: &mut ChaCha8Rng, depth: usize, bound: &[Var]) -> Term {
    let leaf = |r: &mut ChaCha8Rng| -> Term {
        let mut opts = vec![Term::Zero, nat("x"), nat("y")];
        opts.extend(bound.iter().map(Term::var));
        opts.choose(r).unwrap().clone()
    };
    if depth == 0 || r.gen_bool(0.5) {
        return leaf(r);
    }
    match r.gen_range(0..4) {
        0 => Term::succ(arith_term(r, depth - 1, bound)),
        1 => Term::add(arith_term(r, depth - 1, bound), arith_term(r, depth - 1, bound)),
        2 => Term::mul(arith_term(r, depth - 1, bound), arith_term(r, depth - 1, bound)),
        _ => Term::app(&Var::seq("b"), arith_term(r, depth - 1, bound)),
    }
}

fn delta0(r: &mut ChaCha8Rng, fuel: usize, bound: &mut Vec<Var>) -> Formula {
    let atom = |r: &mut ChaCha8Rng, bound: &[Var]| {
        let (s, t) = (arith_term(r, 1, bound), arith_term(r, 1, bound));
        if r.gen_bool(0.5) {
            Formula::eq(s, t)
        } else {
            Formula::lt(s, t)
        }
    };
    if fuel <= 1 {
        return atom(r, bound);
    }
    match r.gen_range(0..8) {
        0 => atom(r, bound),
        1 => Formula::not(delta0(r, fuel - 2, bound)),
        2 => Formula::and(delta0(r, fuel / 2, bound), delta0(r, fuel / 2, bound)),
        3 => Formula::or(delta0(r, fuel / 2, bound), delta0(r, fuel / 2, bound)),
        4 => Formula::imp(delta0(r, fuel / 2, bound), delta0(r, fuel / 2, bound)),
        5 | 6 => {
            let z = Var::nat(&format!("z{}", bound.len() + 1));
            let t = arith_term(r, 1, bound);
            bound.push(z.clone());
            let body = delta0(r, fuel.saturating_sub(3), bound);
            bound.pop();
            if r.gen_bool(0.5) {
                Formula::all_below(&z, t, body)
            } else {
                Formula::ex_below(&z, t, body)
            }
        }
        _ => {
            let body = if r.gen_bool(0.5) {
                atom(r, bound)
            } else {
                let v = Var::nat("w");
                Formula::ex(&v, Formula::eq(Term::app(&Var::seq("b"), Term::var(&v)), Term::Zero))
            };
            Formula::boxed(arith_term(r, 0, bound), body)
        }
    }
}

/// A random extended bounded formula of size at most `max_size`, with free
/// variables among `x`, `y` (numbers) and `b` (a sequence).
pub fn delta0_formula(r: &mut ChaCha8Rng, max_size: usize) -> Formula {
    loop {
        let fuel = r.gen_range(3..=max_size.max(3));
        let f = delta0(r, fuel, &mut Vec::new());
        if f.size() <= max_size && is_extended_delta0(&f) {
            return f;
        }
    }
}

pub const FO_SIG: [(&str, usize); 3] = [("P", 1), ("Q", 1), ("E", 2)];

fn obj(name: &str) -> Var {
    Var::obj(name)
}

fn fo_atom(r: &mut ChaCha8Rng, vars: &[Var]) -> Formula {
    let t = |r: &mut ChaCha8Rng| Term::var(vars.choose(r).unwrap());
    match r.gen_range(0..4) {
        0 => Formula::pred("P", vec![t(r)]),
        1 => Formula::pred("Q", vec![t(r)]),
        2 => Formula::pred("E", vec![t(r), t(r)]),
        _ => Formula::eq(t(r), t(r)),
    }
}

fn fo(r: &mut ChaCha8Rng, depth: usize, vars: &mut Vec<Var>) -> Formula {
    if depth == 0 || (!vars.is_empty() && r.gen_bool(0.2)) {
        if vars.is_empty() {
            return if r.gen_bool(0.5) { Formula::Bot } else { Formula::not(Formula::Bot) };
        }
        return fo_atom(r, vars);
    }
    let pick = if vars.is_empty() && r.gen_bool(0.6) { r.gen_range(4..6) } else { r.gen_range(0..6) };
    match pick {
        0 => Formula::not(fo(r, depth - 1, vars)),
        1 => Formula::and(fo(r, depth - 1, vars), fo(r, depth - 1, vars)),
        2 => Formula::or(fo(r, depth - 1, vars), fo(r, depth - 1, vars)),
        3 => Formula::imp(fo(r, depth - 1, vars), fo(r, depth - 1, vars)),
        k => {
            let v = obj(&format!("v{}", vars.len() + 1));
            vars.push(v.clone());
            let body = fo(r, depth - 1, vars);
            vars.pop();
            if k == 4 {
                Formula::all(&v, body)
            } else {
                Formula::ex(&v, body)
            }
        }
    }
}

/// A random closed first-order sentence over [`FO_SIG`] with equality.
pub fn fo_sentence(r: &mut ChaCha8Rng, depth: usize) -> Formula {
    fo(r, depth, &mut Vec::new())
}

pub fn random_structure(r: &mut ChaCha8Rng, sig: &[(&str, usize)], max_size: usize) -> FiniteStructure {
    let n = r.gen_range(1..=max_size);
    let mut m = FiniteStructure::new(n).unwrap();
    for &(name, k) in sig {
        let mut tuples = Vec::new();
        let mut t = vec![0usize; k];
        loop {
            if r.gen_bool(0.4) {
                tuples.push(t.clone());
            }
            let mut i = 0;
            while i < k && t[i] == n - 1 {
                t[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            t[i] += 1;
        }
        m.add_relation(name, k, tuples).unwrap();
    }
    m
}

/// Forward random derivation in the classical base theory. Tracks each
/// line's open assumptions so generalisation is only attempted when the
/// eigenvariable condition holds.
struct Deriver<'a> {
    r: &'a mut ChaCha8Rng,
    b: ProofBuilder,
    lines: Vec<(Label, Formula, BTreeSet<Label>)>,
    depth: Vec<usize>,
    hyps: BTreeMap<Label, Formula>,
}

impl Deriver<'_> {
    fn vars() -> Vec<Var> {
        vec![obj("x"), obj("y")]
    }

    fn small(&mut self) -> Formula {
        let vars = Self::vars();
        match self.r.gen_range(0..6) {
            0 => Formula::not(Formula::not(fo_atom(self.r, &vars))),
            1 => Formula::not(fo_atom(self.r, &vars)),
            2 => {
                let v = vars.choose(self.r).unwrap().clone();
                Formula::all(&v, fo_atom(self.r, &vars))
            }
            3 => Formula::imp(fo_atom(self.r, &vars), fo_atom(self.r, &vars)),
            _ => fo_atom(self.r, &vars),
        }
    }

    fn pick(&mut self, pred: impl Fn(&Formula) -> bool) -> Option<usize> {
        let idx: Vec<usize> = (0..self.lines.len()).filter(|&i| pred(&self.lines[i].1)).collect();
        idx.choose(self.r).copied()
    }

    fn push(&mut self, l: Label, deps: BTreeSet<Label>) {
        let f = self.b.formula(&l).clone();
        let step = &self.b.lines().last().expect("just pushed").step;
        let depth = step
            .premises()
            .iter()
            .filter_map(|p| self.lines.iter().position(|(q, _, _)| q == *p))
            .map(|i| self.depth[i] + 1)
            .max()
            .unwrap_or(0);
        self.lines.push((l, f, deps));
        self.depth.push(depth);
    }

    fn step(&mut self) {
        match self.r.gen_range(0..11) {
            0 | 1 => {
                let f = self.small();
                let l = self.b.assume(f.clone());
                self.hyps.insert(l.clone(), f);
                self.push(l.clone(), BTreeSet::from([l]));
            }
            2 => {
                if let (Some(i), Some(j)) = (self.pick(|_| true), self.pick(|_| true)) {
                    let (a, b) = (self.lines[i].0.clone(), self.lines[j].0.clone());
                    let deps = &self.lines[i].2 | &self.lines[j].2;
                    let l = self.b.and_i(&a, &b);
                    self.push(l, deps);
                }
            }
            3 => {
                if let Some(i) = self.pick(|f| matches!(f, Formula::And(..))) {
                    let (a, deps) = (self.lines[i].0.clone(), self.lines[i].2.clone());
                    let l = if self.r.gen_bool(0.5) { self.b.and_e1(&a) } else { self.b.and_e2(&a) };
                    self.push(l, deps);
                }
            }
            4 => {
                if let Some(i) = self.pick(|_| true) {
                    let (a, deps) = (self.lines[i].0.clone(), self.lines[i].2.clone());
                    let other = self.small();
                    let l = if self.r.gen_bool(0.5) { self.b.or_i1(&a, other) } else { self.b.or_i2(other, &a) };
                    self.push(l, deps);
                }
            }
            5 => {
                let hs: Vec<Label> = self.hyps.keys().cloned().collect();
                if let (Some(h), Some(i)) = (hs.choose(self.r).cloned(), self.pick(|_| true)) {
                    let (body, mut deps) = (self.lines[i].0.clone(), self.lines[i].2.clone());
                    deps.remove(&h);
                    let l = self.b.imp_i(&h, &body);
                    self.push(l, deps);
                }
            }
            6 => {
                for i in 0..self.lines.len() {
                    let Formula::Imp(a, _) = &self.lines[i].1 else { continue };
                    if let Some(j) = (0..self.lines.len()).find(|&j| self.lines[j].1 == **a) {
                        let (imp, arg) = (self.lines[i].0.clone(), self.lines[j].0.clone());
                        let deps = &self.lines[i].2 | &self.lines[j].2;
                        let l = self.b.imp_e(&imp, &arg);
                        self.push(l, deps);
                        return;
                    }
                }
            }
            7 => {
                if let Some(i) = self.pick(|f| matches!(f, Formula::All(..))) {
                    let (a, deps) = (self.lines[i].0.clone(), self.lines[i].2.clone());
                    let t = Term::var(Self::vars().choose(self.r).unwrap());
                    let l = self.b.all_e(&a, t);
                    self.push(l, deps);
                }
            }
            8 => {
                if let Some(i) = self.pick(|f| !f.free_vars().is_empty()) {
                    let (a, f, deps) = self.lines[i].clone();
                    let v = f.free_vars().into_iter().next().unwrap();
                    let blocked = deps.iter().any(|h| self.hyps[h].has_free(&v));
                    if !blocked {
                        let l = self.b.all_i(&a, &v);
                        self.push(l, deps);
                    } else {
                        let l = self.b.ex_i(&a, Formula::ex(&v, f.clone()), Term::var(&v));
                        self.push(l, deps);
                    }
                }
            }
            9 => {
                if let Some(i) = self.pick(|f| f.as_neg().and_then(|g| g.as_neg()).is_some()) {
                    let (a, deps) = (self.lines[i].0.clone(), self.lines[i].2.clone());
                    let l = self.b.dne(&a);
                    self.push(l, deps);
                }
            }
            _ => {
                // Refute a negation against its body when both are present.
                for i in 0..self.lines.len() {
                    let Some(body) = self.lines[i].1.as_neg().cloned() else { continue };
                    if let Some(j) = (0..self.lines.len()).find(|&j| self.lines[j].1 == body) {
                        let (n, a) = (self.lines[i].0.clone(), self.lines[j].0.clone());
                        let deps = &self.lines[i].2 | &self.lines[j].2;
                        let l = self.b.imp_e(&n, &a);
                        self.push(l, deps);
                        return;
                    }
                }
            }
        }
    }
}

/// A random theorem of classical first-order logic over [`FO_SIG`] with its
/// kernel proof, or `None` if the attempt did not yield a checked proof.
pub fn random_theorem(r: &mut ChaCha8Rng, steps: usize) -> Option<(Formula, Proof)> {
    let mut d = Deriver { r, b: ProofBuilder::new("t"), lines: Vec::new(), depth: Vec::new(), hyps: BTreeMap::new() };
    for _ in 0..steps {
        d.step();
    }
    let deepest = d.depth.iter().copied().max()?;
    let tops: Vec<usize> = (0..d.lines.len()).filter(|&i| d.depth[i] == deepest).collect();
    let i = *tops.choose(d.r)?;
    let (mut cur, _, deps) = d.lines[i].clone();
    for h in deps.iter().rev() {
        cur = d.b.imp_i(h, &cur);
    }
    let mut goal = d.b.formula(&cur).clone();
    for v in goal.free_vars_ordered().into_iter().rev() {
        cur = d.b.all_i(&cur, &v);
        goal = d.b.formula(&cur).clone();
    }
    let proof = d.b.finish("random", "Classical", goal.clone()).prune_unused();
    check(&proof, "Classical").ok()?;
    Some((goal, proof))
}
