use super::{Formula, Sort, Term};

const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub(super) fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    term(t, 0, &mut s);
    s
}

pub(super) fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    form(f, IFF, IFF, None, &mut s);
    s
}

fn numeral(t: &Term) -> Option<usize> {
    let mut n = 0;
    let mut cur = t;
    loop {
        match cur {
            Term::Zero => return Some(n),
            Term::Succ(a) => {
                n += 1;
                cur = a;
            }
            _ => return None,
        }
    }
}

/// Term levels: 0 `#`, 1 `+`, 2 `*`, 3 primary.
fn term(t: &Term, min: u8, out: &mut String) {
    let (level, open) = match t {
        Term::Cat(..) => (0, min > 0),
        Term::Add(..) => (1, min > 1),
        Term::Mul(..) => (2, min > 2),
        _ => (3, false),
    };
    if open {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Zero => out.push('0'),
        Term::Succ(a) => match numeral(t) {
            Some(n) => out.push_str(&n.to_string()),
            None => {
                out.push_str("S(");
                term(a, 0, out);
                out.push(')');
            }
        },
        Term::Cat(a, b) | Term::Add(a, b) | Term::Mul(a, b) => {
            let op = match t {
                Term::Cat(..) => " # ",
                Term::Add(..) => " + ",
                _ => " * ",
            };
            term(a, level, out);
            out.push_str(op);
            term(b, level + 1, out);
        }
        Term::App(v, a) => {
            out.push_str(&v.name);
            out.push('(');
            term(a, 0, out);
            out.push(')');
        }
        Term::Bar(v, a) => {
            out.push_str("bar(");
            out.push_str(&v.name);
            out.push_str(", ");
            term(a, 0, out);
            out.push(')');
        }
        Term::Proj(a, b) => {
            out.push_str("proj(");
            term(a, 0, out);
            out.push_str(", ");
            term(b, 0, out);
            out.push(')');
        }
        Term::Tuple(ts) => {
            out.push('<');
            for (i, a) in ts.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                term(a, 0, out);
            }
            out.push('>');
        }
        Term::Chi { var, body, arg } => {
            out.push_str("chi[");
            let nats: Vec<_> = body.free_vars_ordered().into_iter().filter(|v| v.sort == Sort::Nat).collect();
            if nats.len() != 1 || &nats[0] != var {
                out.push_str(&var.name);
                out.push_str(". ");
            }
            form(body, IFF, IFF, None, out);
            out.push_str("](");
            term(arg, 0, out);
            out.push(')');
        }
    }
    if open {
        out.push(')');
    }
}

fn binary(f: &Formula) -> Option<(u8, &Formula, &Formula, &'static str)> {
    if let Some((a, b)) = f.as_iff() {
        return Some((IFF, a, b, " <-> "));
    }
    match f {
        Formula::And(a, b) => Some((AND, a, b, " & ")),
        Formula::Or(a, b) => Some((OR, a, b, " | ")),
        Formula::Imp(a, b) if **b != Formula::Bot => Some((IMP, a, b, " -> ")),
        _ => None,
    }
}

/// `accept`: loosest binary operator allowed here without parentheses.
/// `qb`: how far a quantifier starting here would extend.
/// `follow`: level of the operator printed right after this subformula.
fn form(f: &Formula, accept: u8, qb: u8, follow: Option<u8>, out: &mut String) {
    if let Some((lv, a, b, op)) = binary(f) {
        if lv < accept {
            out.push('(');
            form(f, IFF, IFF, None, out);
            out.push(')');
            return;
        }
        let (lhs_accept, rhs_accept) = match lv {
            IFF => (IFF, IMP),
            IMP => (OR, IMP),
            OR => (OR, AND),
            _ => (AND, UNARY),
        };
        form(a, lhs_accept, qb, Some(lv), out);
        out.push_str(op);
        form(b, rhs_accept, rhs_accept, follow, out);
        return;
    }
    if let Some(a) = f.as_neg() {
        if let Formula::Eq(s, t) = a {
            term(s, 0, out);
            out.push_str(" != ");
            term(t, 0, out);
            return;
        }
        out.push('~');
        form(a, UNARY, UNARY, follow, out);
        return;
    }
    let quant_head = if let Some((x, t, a)) = f.as_bounded_all() {
        Some((format!("all {}<", x.name), Some(t), a))
    } else if let Some((x, t, a)) = f.as_bounded_ex() {
        Some((format!("ex {}<", x.name), Some(t), a))
    } else {
        match f {
            Formula::All(v, a) => Some((format!("all {}:{}", v.name, v.sort), None, &**a)),
            Formula::Ex(v, a) => Some((format!("ex {}:{}", v.name, v.sort), None, &**a)),
            Formula::SoAll(p, k, a) => Some((format!("all {p}:pred{k}"), None, &**a)),
            Formula::SoEx(p, k, a) => Some((format!("ex {p}:pred{k}"), None, &**a)),
            Formula::Box(..) => None,
            _ => None,
        }
    };
    let boxed = if let Formula::Box(t, a) = f { Some((t, &**a)) } else { None };
    if quant_head.is_some() || boxed.is_some() {
        if follow.is_some_and(|l| l >= qb) {
            out.push('(');
            form(f, IFF, IFF, None, out);
            out.push(')');
            return;
        }
        let body = match (quant_head, boxed) {
            (Some((head, bound, body)), _) => {
                out.push_str(&head);
                if let Some(t) = bound {
                    term(t, 0, out);
                }
                out.push_str(". ");
                body
            }
            (None, Some((t, body))) => {
                out.push_str("box[");
                term(t, 0, out);
                out.push_str("] ");
                body
            }
            _ => unreachable!(),
        };
        form(body, qb, qb, follow, out);
        return;
    }
    match f {
        Formula::Eq(s, t) => {
            term(s, 0, out);
            out.push_str(" = ");
            term(t, 0, out);
        }
        Formula::Lt(s, t) => {
            term(s, 0, out);
            out.push_str(" < ");
            term(t, 0, out);
        }
        Formula::Pred(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    term(a, 0, out);
                }
                out.push(')');
            }
        }
        Formula::Bot => out.push_str("bot"),
        _ => unreachable!("handled above"),
    }
}
