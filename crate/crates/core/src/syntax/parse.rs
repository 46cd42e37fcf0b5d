//! Lexer, recursive-descent parser and sort inference.
//!
//! Precedence, loosest first: `<->`, `->` (right associative), `|`, `&`, `~`.
//! A quantifier or box takes the binding power of the slot it appears in: its
//! body absorbs exactly the operators that slot would absorb. So
//! `all a:seq. ~~ex x:nat. a(x) = 0 -> ex x:nat. a(x) = 0` reads as
//! `all a. ((~~ex x. a(x) = 0) -> ex x. a(x) = 0)`.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Formula, NotationTable, Sort, SyntaxError, Term, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    Sym(&'static str),
    End,
}

const SYMBOLS: [&str; 20] =
    ["<->", "->", "!=", "<", ">", "(", ")", "[", "]", ",", ".", ":", "=", "~", "&", "|", "#", "+", "*", "@"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let uni = match c {
            '∀' => Some(Tok::Ident("all".into())),
            '∃' => Some(Tok::Ident("ex".into())),
            '⊥' => Some(Tok::Ident("bot".into())),
            '¬' => Some(Tok::Sym("~")),
            '∧' => Some(Tok::Sym("&")),
            '∨' => Some(Tok::Sym("|")),
            '→' => Some(Tok::Sym("->")),
            '↔' => Some(Tok::Sym("<->")),
            '≠' => Some(Tok::Sym("!=")),
            _ => None,
        };
        if let Some(t) = uni {
            chars.next();
            out.push((t, pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: usize = 0;
            while let Some(&(_, d)) = chars.peek() {
                if let Some(v) = d.to_digit(10) {
                    n = n.saturating_mul(10).saturating_add(v as usize);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Num(n), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '\'' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let rest = &src[pos..];
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                for _ in 0..s.chars().count() {
                    chars.next();
                }
                out.push((Tok::Sym(s), pos));
            }
            None => return Err(SyntaxError::Parse { pos, msg: format!("unexpected character {c:?}") }),
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

const KEYWORDS: [&str; 8] = ["all", "ex", "box", "chi", "bar", "proj", "bot", "S"];

#[derive(Debug, Clone)]
enum RTerm {
    Var(String),
    Zero,
    Succ(Box<RTerm>),
    Add(Box<RTerm>, Box<RTerm>),
    Mul(Box<RTerm>, Box<RTerm>),
    App(String, Box<RTerm>),
    Tuple(Vec<RTerm>),
    Proj(Box<RTerm>, Box<RTerm>),
    Cat(Box<RTerm>, Box<RTerm>),
    Bar(String, Box<RTerm>),
    Chi(Option<String>, Box<RForm>, Box<RTerm>, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quant {
    All,
    Ex,
}

#[derive(Debug, Clone)]
enum Binder {
    Sorted(Option<Sort>),
    Below(RTerm),
    Pred(usize),
}

#[derive(Debug, Clone)]
enum RForm {
    Eq(RTerm, RTerm),
    Ne(RTerm, RTerm),
    Lt(RTerm, RTerm),
    Pred(String, Vec<RTerm>, usize),
    Bot,
    Not(Box<RForm>),
    And(Box<RForm>, Box<RForm>),
    Or(Box<RForm>, Box<RForm>),
    Imp(Box<RForm>, Box<RForm>),
    Iff(Box<RForm>, Box<RForm>),
    Quant(Quant, String, Binder, Box<RForm>),
    Box(RTerm, Box<RForm>),
    Notation(String, Vec<RTerm>, usize),
}

const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }
    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }
    fn pos(&self) -> usize {
        self.toks[self.i].1
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }
    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::Parse { pos: self.pos(), msg: msg.into() })
    }
    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }
    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }
    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }
    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }
    fn ident(&mut self) -> PResult<(String, usize)> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s, pos)),
            t => Err(SyntaxError::Parse { pos, msg: format!("expected identifier, found {}", describe(&t)) }),
        }
    }

    fn formula(&mut self, q: u8) -> PResult<RForm> {
        self.iff(q)
    }

    fn iff(&mut self, q: u8) -> PResult<RForm> {
        let mut lhs = self.imp(q)?;
        if q > IFF {
            return Ok(lhs);
        }
        while self.eat_sym("<->") {
            let rhs = self.imp(IMP)?;
            lhs = RForm::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self, q: u8) -> PResult<RForm> {
        let lhs = self.or(q)?;
        if q <= IMP && self.eat_sym("->") {
            let rhs = self.imp(IMP)?;
            return Ok(RForm::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self, q: u8) -> PResult<RForm> {
        let mut lhs = self.and(q)?;
        if q > OR {
            return Ok(lhs);
        }
        while self.eat_sym("|") {
            let rhs = self.and(AND)?;
            lhs = RForm::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self, q: u8) -> PResult<RForm> {
        let mut lhs = self.unary(q)?;
        if q > AND {
            return Ok(lhs);
        }
        while self.eat_sym("&") {
            let rhs = self.unary(UNARY)?;
            lhs = RForm::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self, q: u8) -> PResult<RForm> {
        if self.eat_sym("~") {
            let inner = self.unary(UNARY)?;
            return Ok(RForm::Not(Box::new(inner)));
        }
        if self.is_kw("all") || self.is_kw("ex") {
            let quant = if self.is_kw("all") { Quant::All } else { Quant::Ex };
            self.bump();
            let (name, _) = self.ident()?;
            let binder = if self.eat_sym(":") {
                let (sort, _) = match self.bump() {
                    Tok::Ident(s) => (s, ()),
                    t => return self.err(format!("expected sort, found {}", describe(&t))),
                };
                match sort.as_str() {
                    "nat" => Binder::Sorted(Some(Sort::Nat)),
                    "seq" => Binder::Sorted(Some(Sort::Seq)),
                    "obj" => Binder::Sorted(Some(Sort::Obj)),
                    s if s.starts_with("pred") => match s[4..].parse::<usize>() {
                        Ok(k) => Binder::Pred(k),
                        Err(_) => return self.err(format!("unknown sort {s}")),
                    },
                    s => return self.err(format!("unknown sort {s}")),
                }
            } else if self.eat_sym("<") {
                Binder::Below(self.term()?)
            } else {
                Binder::Sorted(None)
            };
            self.expect_sym(".")?;
            let body = self.formula(q)?;
            return Ok(RForm::Quant(quant, name, binder, Box::new(body)));
        }
        if self.is_kw("box") {
            self.bump();
            self.expect_sym("[")?;
            let t = self.term()?;
            self.expect_sym("]")?;
            let body = self.formula(q)?;
            return Ok(RForm::Box(t, Box::new(body)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<RForm> {
        let pos = self.pos();
        if self.is_kw("bot") {
            self.bump();
            return Ok(RForm::Bot);
        }
        if self.eat_sym("@") {
            let (name, _) = match self.bump() {
                Tok::Ident(s) => (s, ()),
                t => return self.err(format!("expected notation name, found {}", describe(&t))),
            };
            let args = if self.eat_sym("(") { self.term_list(")")? } else { Vec::new() };
            return Ok(RForm::Notation(name, args, pos));
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if name.chars().next().is_some_and(|c| c.is_uppercase()) && name != "S" {
                self.bump();
                let args = if self.eat_sym("(") { self.term_list(")")? } else { Vec::new() };
                return Ok(RForm::Pred(name, args, pos));
            }
        }
        let save = self.i;
        match self.relation() {
            Ok(f) => Ok(f),
            Err(e) => {
                let rel_err = e;
                self.i = save;
                if self.eat_sym("(") {
                    let f = self.formula(IFF)?;
                    self.expect_sym(")")?;
                    return Ok(f);
                }
                if let Tok::Ident(name) = self.peek().clone() {
                    if !KEYWORDS.contains(&name.as_str()) {
                        self.bump();
                        return Ok(RForm::Pred(name, Vec::new(), pos));
                    }
                }
                Err(rel_err)
            }
        }
    }

    fn relation(&mut self) -> PResult<RForm> {
        let lhs = self.term()?;
        if self.eat_sym("=") {
            Ok(RForm::Eq(lhs, self.term()?))
        } else if self.eat_sym("!=") {
            Ok(RForm::Ne(lhs, self.term()?))
        } else if self.eat_sym("<") {
            Ok(RForm::Lt(lhs, self.term()?))
        } else {
            self.err(format!("expected `=`, `!=` or `<`, found {}", describe(self.peek())))
        }
    }

    fn term_list(&mut self, close: &str) -> PResult<Vec<RTerm>> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn term(&mut self) -> PResult<RTerm> {
        let mut lhs = self.add()?;
        while self.eat_sym("#") {
            let rhs = self.add()?;
            lhs = RTerm::Cat(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn add(&mut self) -> PResult<RTerm> {
        let mut lhs = self.mul()?;
        while self.eat_sym("+") {
            let rhs = self.mul()?;
            lhs = RTerm::Add(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn mul(&mut self) -> PResult<RTerm> {
        let mut lhs = self.primary()?;
        while self.eat_sym("*") {
            let rhs = self.primary()?;
            lhs = RTerm::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> PResult<RTerm> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                if n > 10_000 {
                    return self.err("numeral too large");
                }
                Ok((0..n).fold(RTerm::Zero, |t, _| RTerm::Succ(Box::new(t))))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Sym("<") => {
                self.bump();
                Ok(RTerm::Tuple(self.term_list(">")?))
            }
            Tok::Ident(s) if s == "S" => {
                self.bump();
                let arg = self.primary()?;
                Ok(RTerm::Succ(Box::new(arg)))
            }
            Tok::Ident(s) if s == "proj" => {
                self.bump();
                self.expect_sym("(")?;
                let u = self.term()?;
                self.expect_sym(",")?;
                let i = self.term()?;
                self.expect_sym(")")?;
                Ok(RTerm::Proj(Box::new(u), Box::new(i)))
            }
            Tok::Ident(s) if s == "bar" => {
                self.bump();
                self.expect_sym("(")?;
                let (a, _) = self.ident()?;
                self.expect_sym(",")?;
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(RTerm::Bar(a, Box::new(t)))
            }
            Tok::Ident(s) if s == "chi" => {
                self.bump();
                self.expect_sym("[")?;
                let binder = match (self.peek().clone(), self.peek_at(1).clone()) {
                    (Tok::Ident(x), Tok::Sym(".")) if !KEYWORDS.contains(&x.as_str()) => {
                        self.bump();
                        self.bump();
                        Some(x)
                    }
                    _ => None,
                };
                let body = self.formula(IFF)?;
                self.expect_sym("]")?;
                self.expect_sym("(")?;
                let arg = self.term()?;
                self.expect_sym(")")?;
                Ok(RTerm::Chi(binder, Box::new(body), Box::new(arg), pos))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                if s.chars().next().is_some_and(|c| c.is_uppercase()) {
                    return self.err(format!("predicate {s} used as a term"));
                }
                self.bump();
                if self.eat_sym("(") {
                    let arg = self.term()?;
                    self.expect_sym(")")?;
                    Ok(RTerm::App(s, Box::new(arg)))
                } else {
                    Ok(RTerm::Var(s))
                }
            }
            t => self.err(format!("expected term, found {}", describe(&t))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::End => "end of input".into(),
    }
}

/// Context for parsing: notation table and sort hints for free variables.
#[derive(Debug, Clone)]
pub struct ParseCtx {
    pub notations: NotationTable,
    pub hints: HashMap<String, Sort>,
}

impl Default for ParseCtx {
    fn default() -> Self {
        ParseCtx { notations: NotationTable::builtin(), hints: HashMap::new() }
    }
}

impl ParseCtx {
    pub fn with_notations(n: &NotationTable) -> ParseCtx {
        ParseCtx { notations: n.clone(), hints: HashMap::new() }
    }
    pub fn hint(&mut self, name: &str, sort: Sort) -> &mut Self {
        self.hints.insert(name.to_string(), sort);
        self
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, SyntaxError> {
    parse_formula_with(src, &ParseCtx::default())
}

pub fn parse_formula_with(src: &str, ctx: &ParseCtx) -> Result<Formula, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let raw = p.formula(IFF)?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after formula", describe(p.peek())));
    }
    let mut inf = Infer::new(ctx);
    inf.form(&raw)?;
    inf.build_form(&raw)
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    parse_term_with(src, &ParseCtx::default(), None)
}

/// Parses a term; `expected` constrains the sort of a bare variable.
pub fn parse_term_with(src: &str, ctx: &ParseCtx, expected: Option<Sort>) -> Result<Term, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let raw = p.term()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after term", describe(p.peek())));
    }
    let mut inf = Infer::new(ctx);
    // A bare name stands for a sequence when one is expected.
    if let (RTerm::Var(n), Some(Sort::Seq)) = (&raw, expected) {
        if ctx.hints.get(n.as_str()).is_none_or(|s| *s == Sort::Seq) {
            return Ok(Term::Var(Var::seq(n)));
        }
    }
    let ty = inf.term(&raw)?;
    if let Some(s) = expected {
        inf.constrain(ty, s)?;
    }
    inf.build_term(&raw)
}

#[derive(Clone, Copy)]
enum Ty {
    Known(Sort),
    Slot(usize),
}

/// Union-find sort inference. Every binder occurrence and every free name owns a slot.
struct Infer<'a> {
    ctx: &'a ParseCtx,
    parent: Vec<usize>,
    sort: Vec<Option<Sort>>,
    free: HashMap<String, usize>,
    scope: Vec<(String, usize)>,
    so_scope: Vec<(String, usize)>,
    /// Slot assigned to each binder, in traversal order.
    binder_slots: Vec<usize>,
    cursor: usize,
}

impl<'a> Infer<'a> {
    fn new(ctx: &'a ParseCtx) -> Self {
        Infer {
            ctx,
            parent: Vec::new(),
            sort: Vec::new(),
            free: HashMap::new(),
            scope: Vec::new(),
            so_scope: Vec::new(),
            binder_slots: Vec::new(),
            cursor: 0,
        }
    }

    fn fresh(&mut self, s: Option<Sort>) -> usize {
        self.parent.push(self.parent.len());
        self.sort.push(s);
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn slot_of(&mut self, name: &str) -> usize {
        if let Some((_, s)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return *s;
        }
        if let Some(s) = self.free.get(name) {
            return *s;
        }
        let hint = self.ctx.hints.get(name).copied();
        let s = self.fresh(hint);
        self.free.insert(name.to_string(), s);
        s
    }

    fn constrain(&mut self, ty: Ty, s: Sort) -> PResult<()> {
        match ty {
            Ty::Known(k) if k == s => Ok(()),
            Ty::Known(k) => Err(SyntaxError::Sort(format!("expected {s}, found {k}"))),
            Ty::Slot(x) => {
                let r = self.find(x);
                match self.sort[r] {
                    None => {
                        self.sort[r] = Some(s);
                        Ok(())
                    }
                    Some(k) if k == s => Ok(()),
                    Some(k) => {
                        Err(SyntaxError::Sort(format!("variable {} used both as {k} and as {s}", self.name_of(r))))
                    }
                }
            }
        }
    }

    fn name_of(&mut self, root: usize) -> String {
        let names: Vec<(String, usize)> =
            self.scope.iter().cloned().chain(self.free.iter().map(|(n, s)| (n.clone(), *s))).collect();
        for (n, s) in names {
            if self.find(s) == root {
                return n;
            }
        }
        "?".into()
    }

    fn unify(&mut self, a: Ty, b: Ty) -> PResult<()> {
        match (a, b) {
            (Ty::Known(s), t) | (t, Ty::Known(s)) => self.constrain(t, s),
            (Ty::Slot(x), Ty::Slot(y)) => {
                let (rx, ry) = (self.find(x), self.find(y));
                if rx == ry {
                    return Ok(());
                }
                match (self.sort[rx], self.sort[ry]) {
                    (Some(s), Some(t)) if s != t => {
                        return Err(SyntaxError::Sort(format!(
                            "{} ({s}) compared with {} ({t})",
                            self.name_of(rx),
                            self.name_of(ry)
                        )))
                    }
                    (None, Some(t)) => self.sort[rx] = Some(t),
                    _ => {}
                }
                self.parent[ry] = rx;
                Ok(())
            }
        }
    }

    fn nat(&mut self, t: &RTerm) -> PResult<()> {
        let ty = self.term(t)?;
        self.constrain(ty, Sort::Nat)
    }

    fn term(&mut self, t: &RTerm) -> PResult<Ty> {
        match t {
            RTerm::Var(n) => Ok(Ty::Slot(self.slot_of(n))),
            RTerm::Zero => Ok(Ty::Known(Sort::Nat)),
            RTerm::Succ(a) => {
                self.nat(a)?;
                Ok(Ty::Known(Sort::Nat))
            }
            RTerm::Add(a, b) | RTerm::Mul(a, b) | RTerm::Proj(a, b) | RTerm::Cat(a, b) => {
                self.nat(a)?;
                self.nat(b)?;
                Ok(Ty::Known(Sort::Nat))
            }
            RTerm::App(n, a) | RTerm::Bar(n, a) => {
                let s = self.slot_of(n);
                self.constrain(Ty::Slot(s), Sort::Seq)?;
                self.nat(a)?;
                Ok(Ty::Known(Sort::Nat))
            }
            RTerm::Tuple(ts) => {
                for a in ts {
                    self.nat(a)?;
                }
                Ok(Ty::Known(Sort::Nat))
            }
            RTerm::Chi(binder, body, arg, _) => {
                self.nat(arg)?;
                match binder {
                    Some(x) => {
                        let s = self.fresh(Some(Sort::Nat));
                        self.binder_slots.push(s);
                        self.scope.push((x.clone(), s));
                        self.form(body)?;
                        self.scope.pop();
                    }
                    None => self.form(body)?,
                }
                Ok(Ty::Known(Sort::Nat))
            }
        }
    }

    fn form(&mut self, f: &RForm) -> PResult<()> {
        match f {
            RForm::Eq(a, b) | RForm::Ne(a, b) => {
                let (ta, tb) = (self.term(a)?, self.term(b)?);
                self.unify(ta, tb)
            }
            RForm::Lt(a, b) => {
                self.nat(a)?;
                self.nat(b)
            }
            RForm::Pred(name, args, pos) => {
                if let Some((_, k)) = self.so_scope.iter().rev().find(|(n, _)| n == name) {
                    if *k != args.len() {
                        return Err(SyntaxError::Parse {
                            pos: *pos,
                            msg: format!("relation variable {name} has arity {k}, used with {}", args.len()),
                        });
                    }
                }
                for a in args {
                    let ty = self.term(a)?;
                    self.constrain(ty, Sort::Obj)?;
                }
                Ok(())
            }
            RForm::Bot => Ok(()),
            RForm::Not(a) => self.form(a),
            RForm::And(a, b) | RForm::Or(a, b) | RForm::Imp(a, b) | RForm::Iff(a, b) => {
                self.form(a)?;
                self.form(b)
            }
            RForm::Quant(_, name, binder, body) => match binder {
                Binder::Pred(k) => {
                    self.so_scope.push((name.clone(), *k));
                    self.form(body)?;
                    self.so_scope.pop();
                    Ok(())
                }
                Binder::Sorted(s) => {
                    let slot = self.fresh(*s);
                    self.binder_slots.push(slot);
                    self.scope.push((name.clone(), slot));
                    self.form(body)?;
                    self.scope.pop();
                    Ok(())
                }
                Binder::Below(t) => {
                    self.nat(t)?;
                    let slot = self.fresh(Some(Sort::Nat));
                    self.binder_slots.push(slot);
                    self.scope.push((name.clone(), slot));
                    self.form(body)?;
                    self.scope.pop();
                    Ok(())
                }
            },
            RForm::Box(t, body) => {
                self.nat(t)?;
                self.form(body)
            }
            RForm::Notation(name, args, pos) => {
                let n = self
                    .ctx
                    .notations
                    .get(name)
                    .cloned()
                    .ok_or_else(|| SyntaxError::Parse { pos: *pos, msg: format!("unknown notation @{name}") })?;
                if n.params.len() != args.len() {
                    return Err(SyntaxError::Parse {
                        pos: *pos,
                        msg: format!("@{name} expects {} arguments", n.params.len()),
                    });
                }
                for (p, a) in n.params.iter().zip(args) {
                    let ty = self.term(a)?;
                    self.constrain(ty, p.sort)?;
                }
                Ok(())
            }
        }
    }

    fn resolved(&mut self, slot: usize) -> Sort {
        let r = self.find(slot);
        self.sort[r].unwrap_or(Sort::Nat)
    }

    fn var(&mut self, name: &str) -> Var {
        let slot = self.slot_of(name);
        Var::new(name, self.resolved(slot))
    }

    fn next_binder(&mut self) -> usize {
        let s = self.binder_slots[self.cursor];
        self.cursor += 1;
        s
    }

    fn build_term(&mut self, t: &RTerm) -> PResult<Term> {
        Ok(match t {
            RTerm::Var(n) => {
                let v = self.var(n);
                if v.sort == Sort::Seq {
                    return Err(SyntaxError::Sort(format!("sequence variable {n} used as a value")));
                }
                Term::Var(v)
            }
            RTerm::Zero => Term::Zero,
            RTerm::Succ(a) => Term::succ(self.build_term(a)?),
            RTerm::Add(a, b) => Term::add(self.build_term(a)?, self.build_term(b)?),
            RTerm::Mul(a, b) => Term::mul(self.build_term(a)?, self.build_term(b)?),
            RTerm::Proj(a, b) => Term::proj(self.build_term(a)?, self.build_term(b)?),
            RTerm::Cat(a, b) => Term::cat(self.build_term(a)?, self.build_term(b)?),
            RTerm::App(n, a) => Term::App(self.var(n), Box::new(self.build_term(a)?)),
            RTerm::Bar(n, a) => Term::Bar(self.var(n), Box::new(self.build_term(a)?)),
            RTerm::Tuple(ts) => Term::Tuple(ts.iter().map(|a| self.build_term(a)).collect::<PResult<_>>()?),
            RTerm::Chi(binder, body, arg, pos) => {
                let arg = Box::new(self.build_term(arg)?);
                match binder {
                    Some(x) => {
                        let slot = self.next_binder();
                        self.scope.push((x.clone(), slot));
                        let body = self.build_form(body);
                        self.scope.pop();
                        Term::Chi { var: Var::nat(x), body: Box::new(body?), arg }
                    }
                    None => {
                        let body = self.build_form(body)?;
                        let nats: Vec<Var> =
                            body.free_vars_ordered().into_iter().filter(|v| v.sort == Sort::Nat).collect();
                        if nats.len() != 1 {
                            return Err(SyntaxError::Parse {
                                pos: *pos,
                                msg: format!(
                                    "chi[A] needs exactly one free nat variable in A, found {}; use chi[x. A]",
                                    nats.len()
                                ),
                            });
                        }
                        Term::Chi { var: nats[0].clone(), body: Box::new(body), arg }
                    }
                }
            }
        })
    }

    fn build_form(&mut self, f: &RForm) -> PResult<Formula> {
        Ok(match f {
            RForm::Eq(a, b) | RForm::Ne(a, b) => {
                let (ta, tb) = (self.build_term(a)?, self.build_term(b)?);
                if ta.sort() == Sort::Seq {
                    return Err(SyntaxError::Sort("equality between sequences".into()));
                }
                let eq = Formula::Eq(ta, tb);
                if matches!(f, RForm::Ne(..)) {
                    Formula::not(eq)
                } else {
                    eq
                }
            }
            RForm::Lt(a, b) => Formula::Lt(self.build_term(a)?, self.build_term(b)?),
            RForm::Pred(n, args, _) => {
                Formula::Pred(Arc::from(n.as_str()), args.iter().map(|a| self.build_term(a)).collect::<PResult<_>>()?)
            }
            RForm::Bot => Formula::Bot,
            RForm::Not(a) => Formula::not(self.build_form(a)?),
            RForm::And(a, b) => Formula::and(self.build_form(a)?, self.build_form(b)?),
            RForm::Or(a, b) => Formula::or(self.build_form(a)?, self.build_form(b)?),
            RForm::Imp(a, b) => Formula::imp(self.build_form(a)?, self.build_form(b)?),
            RForm::Iff(a, b) => Formula::iff(self.build_form(a)?, self.build_form(b)?),
            RForm::Quant(q, name, binder, body) => match binder {
                Binder::Pred(k) => {
                    let inner = Box::new(self.build_form(body)?);
                    let n: Arc<str> = Arc::from(name.as_str());
                    match q {
                        Quant::All => Formula::SoAll(n, *k, inner),
                        Quant::Ex => Formula::SoEx(n, *k, inner),
                    }
                }
                Binder::Sorted(_) | Binder::Below(_) => {
                    let bound = match binder {
                        Binder::Below(t) => Some(self.build_term(t)?),
                        _ => None,
                    };
                    let slot = self.next_binder();
                    let v = Var::new(name, self.resolved(slot));
                    self.scope.push((name.clone(), slot));
                    let inner = self.build_form(body);
                    self.scope.pop();
                    let inner = inner?;
                    match (q, bound) {
                        (Quant::All, None) => Formula::all(&v, inner),
                        (Quant::Ex, None) => Formula::ex(&v, inner),
                        (Quant::All, Some(t)) => {
                            if t.has_free(&v) {
                                return Err(SyntaxError::IllFormed(format!("bound of {name} mentions {name}")));
                            }
                            Formula::all_below(&v, t, inner)
                        }
                        (Quant::Ex, Some(t)) => {
                            if t.has_free(&v) {
                                return Err(SyntaxError::IllFormed(format!("bound of {name} mentions {name}")));
                            }
                            Formula::ex_below(&v, t, inner)
                        }
                    }
                }
            },
            RForm::Box(t, body) => {
                let t = self.build_term(t)?;
                let body = self.build_form(body)?;
                if !super::is_box_free(&body) {
                    return Err(SyntaxError::IllFormed("nested box".into()));
                }
                Formula::boxed(t, body)
            }
            RForm::Notation(name, args, _) => {
                let n = self.ctx.notations.get(name).cloned().expect("checked during inference");
                let args: Vec<Term> = args
                    .iter()
                    .zip(&n.params)
                    .map(|(a, p)| {
                        if p.sort == Sort::Seq {
                            match a {
                                RTerm::Var(x) => Ok(Term::Var(self.var(x))),
                                _ => Err(SyntaxError::Sort(format!("@{name}: sequence argument must be a variable"))),
                            }
                        } else {
                            self.build_term(a)
                        }
                    })
                    .collect::<PResult<_>>()?;
                n.expand(&args)?
            }
        })
    }
}
