//! Second-order evaluation. Relation quantifiers range over the full
//! powerset (standard) or over an explicit family (Henkin).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::syntax::{Formula, Var};

use super::eval::{compile, eval_fo, fixed_values, Assignment, Family, Machine};
use super::pool::formula_pool;
use super::structure::{index_of, FiniteStructure, Tuple};
use super::SemError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetFamily {
    Standard,
    /// Relation values available to quantifiers, by arity.
    Henkin(BTreeMap<usize, Vec<BTreeSet<Tuple>>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Audit {
    /// Every relation defined by a pool formula belongs to the family.
    pub closed: bool,
    /// Pool formulas examined.
    pub checked: usize,
    pub max_size: usize,
    /// A definable relation missing from the family.
    pub witness: Option<(String, Vec<Tuple>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoStructure {
    pub base: FiniteStructure,
    pub family: SetFamily,
    /// Result of [`comprehension_audit`] when it has been run.
    pub audit: Option<Audit>,
}

impl SoStructure {
    pub fn standard(base: FiniteStructure) -> SoStructure {
        SoStructure { base, family: SetFamily::Standard, audit: None }
    }

    pub fn henkin(
        base: FiniteStructure,
        family: BTreeMap<usize, Vec<BTreeSet<Tuple>>>,
    ) -> Result<SoStructure, SemError> {
        for (k, sets) in &family {
            if sets.is_empty() {
                return Err(SemError::MissingArity(*k));
            }
            for t in sets.iter().flatten() {
                if t.len() != *k || t.iter().any(|&a| a >= base.size) {
                    return Err(SemError::Structure(format!("tuple {t:?} in the arity-{k} family")));
                }
            }
        }
        Ok(SoStructure { base, family: SetFamily::Henkin(family), audit: None })
    }

    /// The full powerset listed explicitly, per arity.
    pub fn explicit_powerset(base: FiniteStructure, arities: &[usize]) -> SoStructure {
        let n = base.size;
        let family = arities.iter().map(|&k| (k, super::structure::all_relations(n, k))).collect();
        SoStructure { base, family: SetFamily::Henkin(family), audit: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SoBudget {
    /// Largest n^k a standard quantifier may range over (2^(n^k) values).
    pub max_cells: usize,
    /// Maximum nesting of second-order quantifiers.
    pub max_depth: usize,
}

impl Default for SoBudget {
    fn default() -> Self {
        SoBudget { max_cells: 16, max_depth: 3 }
    }
}

struct Standard;

impl Family for Standard {
    fn for_each(&self, n: usize, arity: usize, f: &mut dyn FnMut(&[bool]) -> bool) -> bool {
        let cells = n.pow(arity as u32);
        let mut table = vec![false; cells];
        for bits in 0u64..1 << cells {
            for (i, t) in table.iter_mut().enumerate() {
                *t = bits >> i & 1 == 1;
            }
            if !f(&table) {
                return false;
            }
        }
        true
    }
}

struct Listed(BTreeMap<usize, Vec<Vec<bool>>>);

impl Family for Listed {
    fn for_each(&self, _: usize, arity: usize, f: &mut dyn FnMut(&[bool]) -> bool) -> bool {
        for t in &self.0[&arity] {
            if !f(t) {
                return false;
            }
        }
        true
    }
}

fn so_shape(f: &Formula, depth: usize, out: &mut (usize, BTreeSet<usize>)) {
    match f {
        Formula::SoAll(_, k, a) | Formula::SoEx(_, k, a) => {
            out.0 = out.0.max(depth + 1);
            out.1.insert(*k);
            so_shape(a, depth + 1, out)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            so_shape(a, depth, out);
            so_shape(b, depth, out)
        }
        Formula::All(_, a) | Formula::Ex(_, a) | Formula::Box(_, a) => so_shape(a, depth, out),
        _ => {}
    }
}

/// Evaluates a closed second-order sentence with the default budget.
pub fn eval_so(s: &SoStructure, phi: &Formula) -> Result<bool, SemError> {
    eval_so_with(s, phi, &Assignment::new(), SoBudget::default())
}

pub fn eval_so_with(s: &SoStructure, phi: &Formula, asg: &Assignment, budget: SoBudget) -> Result<bool, SemError> {
    let mut shape = (0, BTreeSet::new());
    so_shape(phi, 0, &mut shape);
    if shape.0 > budget.max_depth {
        return Err(SemError::Budget(format!("second-order nesting {} exceeds {}", shape.0, budget.max_depth)));
    }
    let n = s.base.size;
    let fam: Box<dyn Family> = match &s.family {
        SetFamily::Standard => {
            for &k in &shape.1 {
                let cells = n.checked_pow(k as u32).unwrap_or(usize::MAX);
                if cells > budget.max_cells {
                    return Err(SemError::Budget(format!(
                        "arity-{k} quantifier over a size-{n} domain needs 2^{cells} values"
                    )));
                }
            }
            Box::new(Standard)
        }
        SetFamily::Henkin(map) => {
            let mut listed = BTreeMap::new();
            for &k in &shape.1 {
                let sets = map.get(&k).filter(|v| !v.is_empty()).ok_or(SemError::MissingArity(k))?;
                let tables = sets
                    .iter()
                    .map(|set| {
                        let mut t = vec![false; n.pow(k as u32)];
                        for tup in set {
                            t[index_of(n, tup)] = true;
                        }
                        t
                    })
                    .collect();
                listed.insert(k, tables);
            }
            Box::new(Listed(listed))
        }
    };
    let fixed = fixed_values(&s.base, asg)?;
    let code = compile(phi, &s.base.signature(), &fixed, true)?;
    let mut m = Machine {
        n,
        rels: s.base.relations.values().map(|r| r.table.as_slice()).collect(),
        env: vec![],
        so_env: vec![],
    };
    Ok(m.run(&code, fam.as_ref()))
}

/// Checks whether every relation of a family arity that is definable by a
/// parameter-free first-order formula of pool size at most `max_size` is in
/// the family. Standard structures are closed by construction.
pub fn comprehension_audit(s: &SoStructure, max_size: usize) -> Result<Audit, SemError> {
    let SetFamily::Henkin(map) = &s.family else {
        return Ok(Audit { closed: true, checked: 0, max_size, witness: None });
    };
    let n = s.base.size;
    let sig = s.base.signature();
    let mut checked = 0;
    for (&k, sets) in map {
        let vars: Vec<Var> = (1..=k).map(|i| Var::obj(&format!("x{i}"))).collect();
        let members: BTreeSet<&BTreeSet<Tuple>> = sets.iter().collect();
        for f in formula_pool(&sig, &vars, max_size, true) {
            checked += 1;
            let mut ext = BTreeSet::new();
            for i in 0..n.pow(k as u32) {
                let t = super::structure::tuple_at(n, k, i);
                let asg: Assignment = vars.iter().zip(&t).map(|(v, &a)| (v.name.to_string(), a)).collect();
                if eval_fo(&s.base, &f, &asg)? {
                    ext.insert(t);
                }
            }
            if !members.contains(&ext) {
                return Ok(Audit {
                    closed: false,
                    checked,
                    max_size,
                    witness: Some((f.to_string(), ext.into_iter().collect())),
                });
            }
        }
    }
    Ok(Audit { closed: true, checked, max_size, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::structure::all_relations;
    use crate::syntax::{parse_formula, Term};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    /// Evaluator written straight from the satisfaction clauses, with
    /// relation variables as explicit tuple sets.
    fn oracle(
        m: &FiniteStructure,
        phi: &Formula,
        fo: &mut BTreeMap<String, usize>,
        so: &mut BTreeMap<String, BTreeSet<Tuple>>,
    ) -> bool {
        let val = |t: &Term, fo: &BTreeMap<String, usize>| match t {
            Term::Var(v) => fo[&*v.name],
            _ => panic!("relational terms only"),
        };
        match phi {
            Formula::Bot => false,
            Formula::Eq(a, b) => val(a, fo) == val(b, fo),
            Formula::Pred(r, args) => {
                let t: Tuple = args.iter().map(|a| val(a, fo)).collect();
                match so.get(&**r) {
                    Some(set) => set.contains(&t),
                    None => m.holds(r, &t),
                }
            }
            Formula::And(a, b) => oracle(m, a, fo, so) && oracle(m, b, fo, so),
            Formula::Or(a, b) => oracle(m, a, fo, so) || oracle(m, b, fo, so),
            Formula::Imp(a, b) => !oracle(m, a, fo, so) || oracle(m, b, fo, so),
            Formula::All(v, a) | Formula::Ex(v, a) => {
                let results: Vec<bool> = (0..m.size)
                    .map(|d| {
                        let old = fo.insert(v.name.to_string(), d);
                        let r = oracle(m, a, fo, so);
                        match old {
                            Some(o) => fo.insert(v.name.to_string(), o),
                            None => fo.remove(&*v.name),
                        };
                        r
                    })
                    .collect();
                if matches!(phi, Formula::All(..)) {
                    results.iter().all(|b| *b)
                } else {
                    results.iter().any(|b| *b)
                }
            }
            Formula::SoAll(x, k, a) | Formula::SoEx(x, k, a) => {
                let results: Vec<bool> = all_relations(m.size, *k)
                    .into_iter()
                    .map(|set| {
                        let old = so.insert(x.to_string(), set);
                        let r = oracle(m, a, fo, so);
                        match old {
                            Some(o) => so.insert(x.to_string(), o),
                            None => so.remove(&**x),
                        };
                        r
                    })
                    .collect();
                if matches!(phi, Formula::SoAll(..)) {
                    results.iter().all(|b| *b)
                } else {
                    results.iter().any(|b| *b)
                }
            }
            other => panic!("unsupported {other}"),
        }
    }

    fn p0() -> FiniteStructure {
        FiniteStructure::new(2).unwrap().with("P", 1, &[&[0]])
    }

    #[test]
    fn full_set_exists() {
        for n in 1..=4 {
            let m = FiniteStructure::new(n).unwrap();
            assert!(eval_so(&SoStructure::standard(m), &f("ex X:pred1. all x. X(x)")).unwrap());
        }
    }

    #[test]
    fn standard_henkin_divergence() {
        let phi = f("ex X:pred1. all x. X(x) <-> P(x)");
        assert!(eval_so(&SoStructure::standard(p0()), &phi).unwrap());
        let fam = BTreeMap::from([(1, vec![BTreeSet::new(), BTreeSet::from([vec![1]])])]);
        let h = SoStructure::henkin(p0(), fam).unwrap();
        assert!(!eval_so(&h, &phi).unwrap());
        let audit = comprehension_audit(&h, 1).unwrap();
        assert!(!audit.closed);
        assert_eq!(audit.witness.unwrap().1, vec![vec![0]]);
    }

    #[test]
    fn exactly_two_elements() {
        // Some set and its complement are both singletons, and nothing else exists.
        let two = f("ex X:pred1. (ex x. X(x) & (all y. X(y) -> y = x)) & (ex x. ~X(x) & (all y. ~X(y) -> y = x))");
        let sizes: Vec<bool> =
            (1..=4).map(|n| eval_so(&SoStructure::standard(FiniteStructure::new(n).unwrap()), &two).unwrap()).collect();
        assert_eq!(sizes, vec![false, true, false, false]);
    }

    #[test]
    fn henkin_errors() {
        let phi = f("ex X:pred2. all x. X(x, x)");
        let fam = BTreeMap::from([(1, vec![BTreeSet::new()])]);
        let h = SoStructure::henkin(p0(), fam).unwrap();
        assert_eq!(eval_so(&h, &phi), Err(SemError::MissingArity(2)));
        assert!(SoStructure::henkin(p0(), BTreeMap::from([(1, vec![])])).is_err());
        let big = SoStructure::standard(FiniteStructure::new(5).unwrap());
        assert!(matches!(eval_so(&big, &phi), Err(SemError::Budget(_))));
    }

    #[test]
    fn standard_agrees_with_oracle_and_explicit_powerset() {
        let sentences = [
            "ex X:pred1. all x. X(x) <-> P(x)",
            "all X:pred1. (ex x. X(x)) -> ex x. X(x) & ~P(x) | P(x)",
            "ex X:pred2. all x. ex y. X(x, y) & ~X(y, x)",
            "all X:pred1. all Y:pred1. (all x. X(x) -> Y(x)) | ex x. X(x) & ~Y(x)",
            "ex X:pred1. ex x. ex y. X(x) & ~X(y) & P(x)",
        ];
        for n in 1..=3 {
            for bits in 0..1u32 << n {
                let mut m = FiniteStructure::new(n).unwrap();
                m.add_relation("P", 1, (0..n).filter(|i| bits >> i & 1 == 1).map(|i| vec![i])).unwrap();
                for src in sentences {
                    let phi = f(src);
                    let std = eval_so(&SoStructure::standard(m.clone()), &phi).unwrap();
                    let want = oracle(&m, &phi, &mut BTreeMap::new(), &mut BTreeMap::new());
                    assert_eq!(std, want, "{src} on {m}");
                    let explicit = SoStructure::explicit_powerset(m.clone(), &[1, 2]);
                    assert_eq!(eval_so(&explicit, &phi).unwrap(), std, "{src}");
                }
            }
        }
    }
}
