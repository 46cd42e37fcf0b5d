use super::{Formula, Sort, Term};

/// Which parts of the language a formula uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Features {
    pub seq: bool,
    pub chi: bool,
    pub boxes: bool,
    pub preds: bool,
    pub second_order: bool,
    pub obj: bool,
}

impl Features {
    pub fn of(f: &Formula) -> Features {
        let mut out = Features::default();
        feat_f(f, &mut out);
        out
    }

    pub fn of_term(t: &Term) -> Features {
        let mut out = Features::default();
        feat_t(t, &mut out);
        out
    }
}

fn feat_t(t: &Term, out: &mut Features) {
    match t {
        Term::Var(v) => match v.sort {
            Sort::Seq => out.seq = true,
            Sort::Obj => out.obj = true,
            Sort::Nat => {}
        },
        Term::Zero => {}
        Term::Succ(a) => feat_t(a, out),
        Term::Add(a, b) | Term::Mul(a, b) => {
            feat_t(a, out);
            feat_t(b, out);
        }
        Term::Proj(a, b) | Term::Cat(a, b) => {
            out.seq = true;
            feat_t(a, out);
            feat_t(b, out);
        }
        Term::App(_, a) | Term::Bar(_, a) => {
            out.seq = true;
            feat_t(a, out);
        }
        Term::Tuple(ts) => {
            out.seq = true;
            ts.iter().for_each(|a| feat_t(a, out));
        }
        Term::Chi { body, arg, .. } => {
            out.chi = true;
            feat_f(body, out);
            feat_t(arg, out);
        }
    }
}

fn feat_f(f: &Formula, out: &mut Features) {
    match f {
        Formula::Eq(a, b) | Formula::Lt(a, b) => {
            feat_t(a, out);
            feat_t(b, out);
        }
        Formula::Pred(_, args) => {
            out.preds = true;
            args.iter().for_each(|a| feat_t(a, out));
        }
        Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            feat_f(a, out);
            feat_f(b, out);
        }
        Formula::All(v, a) | Formula::Ex(v, a) => {
            match v.sort {
                Sort::Seq => out.seq = true,
                Sort::Obj => out.obj = true,
                Sort::Nat => {}
            }
            feat_f(a, out);
        }
        Formula::Box(t, a) => {
            out.boxes = true;
            feat_t(t, out);
            feat_f(a, out);
        }
        Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => {
            out.second_order = true;
            feat_f(a, out);
        }
    }
}

pub fn is_box_free(f: &Formula) -> bool {
    !Features::of(f).boxes
}

pub fn is_chi_free(f: &Formula) -> bool {
    !Features::of(f).chi
}

pub fn uses_seq(f: &Formula) -> bool {
    Features::of(f).seq
}

/// Built from predicate letters, `bot` and the propositional connectives only.
pub fn is_propositional(f: &Formula) -> bool {
    match f {
        Formula::Pred(_, args) => args.is_empty(),
        Formula::Bot => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => is_propositional(a) && is_propositional(b),
        _ => false,
    }
}

/// Extended bounded formulas: arithmetical atoms and box formulas closed
/// under the propositional connectives and bounded number quantifiers.
pub fn is_extended_delta0(f: &Formula) -> bool {
    if let Some((_, t, a)) = f.as_bounded_all().or_else(|| f.as_bounded_ex()) {
        return arithmetical_term(t) && is_extended_delta0(a);
    }
    match f {
        Formula::Eq(a, b) | Formula::Lt(a, b) => a.sort() == Sort::Nat && arithmetical_term(a) && arithmetical_term(b),
        Formula::Bot => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => is_extended_delta0(a) && is_extended_delta0(b),
        Formula::Box(t, a) => arithmetical_term(t) && is_box_free(a) && !Features::of(a).second_order,
        _ => false,
    }
}

fn arithmetical_term(t: &Term) -> bool {
    match t {
        Term::Var(v) => v.sort == Sort::Nat,
        Term::Zero => true,
        Term::Succ(a) | Term::App(_, a) | Term::Bar(_, a) => arithmetical_term(a),
        Term::Add(a, b) | Term::Mul(a, b) | Term::Proj(a, b) | Term::Cat(a, b) => {
            arithmetical_term(a) && arithmetical_term(b)
        }
        Term::Tuple(ts) => ts.iter().all(arithmetical_term),
        Term::Chi { arg, .. } => arithmetical_term(arg),
    }
}
