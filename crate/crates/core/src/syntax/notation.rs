use std::collections::BTreeMap;

use once_cell::sync::Lazy;

use super::{parse_formula_with, subst_many, Formula, ParseCtx, Sort, SyntaxError, Term, Var};

/// A defined abbreviation `@name(params) := body`, expanded at parse time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Notation {
    pub name: String,
    pub params: Vec<Var>,
    pub body: Formula,
}

impl Notation {
    pub fn new(name: &str, params: Vec<Var>, body: Formula) -> Result<Notation, SyntaxError> {
        for v in body.free_vars() {
            if !params.contains(&v) {
                return Err(SyntaxError::IllFormed(format!(
                    "notation @{name}: variable {v} is free in the body but not a parameter"
                )));
            }
        }
        Ok(Notation { name: name.to_string(), params, body })
    }

    pub fn expand(&self, args: &[Term]) -> Result<Formula, SyntaxError> {
        if args.len() != self.params.len() {
            return Err(SyntaxError::IllFormed(format!(
                "@{} expects {} arguments, got {}",
                self.name,
                self.params.len(),
                args.len()
            )));
        }
        let mut pairs = Vec::new();
        for (p, a) in self.params.iter().zip(args) {
            if a.sort() != p.sort || (p.sort == Sort::Seq && !matches!(a, Term::Var(_))) {
                return Err(SyntaxError::Sort(format!(
                    "@{}: argument {a} does not fit parameter {}:{}",
                    self.name, p.name, p.sort
                )));
            }
            pairs.push((p.clone(), a.clone()));
        }
        Ok(subst_many(&self.body, &pairs))
    }
}

#[derive(Debug, Clone, Default)]
pub struct NotationTable {
    defs: BTreeMap<String, Notation>,
}

static BUILTIN: Lazy<NotationTable> = Lazy::new(|| {
    let mut t = NotationTable { defs: BTreeMap::new() };
    let defs: [(&str, &[(&str, Sort)], &str); 3] = [
        (
            "K0",
            &[("g", Sort::Seq)],
            "(all x:nat. all y:nat. g(x) != 0 -> g(x # y) = g(x)) & all b:seq. ex x:nat. g(bar(b, x)) != 0",
        ),
        ("val", &[("g", Sort::Seq), ("a", Sort::Seq), ("y", Sort::Nat)], "ex z:nat. S(y) = g(bar(a, z))"),
        (
            "cval",
            &[("g", Sort::Seq), ("a", Sort::Seq), ("b", Sort::Seq)],
            "all x:nat. ex z:nat. S(b(x)) = g(<x> # bar(a, z))",
        ),
    ];
    for (name, params, body) in defs {
        t.define_text(name, params, body).expect("builtin notation");
    }
    t
});

impl NotationTable {
    /// Table holding `@K0`, `@val` and `@cval`.
    pub fn builtin() -> NotationTable {
        BUILTIN.clone()
    }

    pub fn get(&self, name: &str) -> Option<&Notation> {
        self.defs.get(name)
    }

    pub fn insert(&mut self, n: Notation) {
        self.defs.insert(n.name.clone(), n);
    }

    pub fn define_text(&mut self, name: &str, params: &[(&str, Sort)], body: &str) -> Result<(), SyntaxError> {
        let vars: Vec<Var> = params.iter().map(|(n, s)| Var::new(n, *s)).collect();
        let mut ctx = ParseCtx::with_notations(self);
        for v in &vars {
            ctx.hint(&v.name, v.sort);
        }
        let body = parse_formula_with(body, &ctx)?;
        self.insert(Notation::new(name, vars, body)?);
        Ok(())
    }
}
