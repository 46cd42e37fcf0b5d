//! One-dimensional interpretations between finite structures, and the
//! `Fund` ordering built on them.
//!
//! The search works on extensions: candidate formulas from the pool are
//! evaluated in `A` once and deduplicated by what they define, then for
//! every domain of the right size and every bijection onto `B` the needed
//! relations are looked up. Found interpretations are re-checked by
//! [`verify_interpretation`], which only uses `eval_fo` and `iso_search`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::semantics::{eval_fo, formula_pool, iso_search, Assignment, FiniteStructure};
use crate::syntax::{Formula, Term, Var};

use super::{ExpError, ReportHeader};

/// A domain formula in `x` and one formula in `x1, ..., xk` per relation
/// symbol of the interpreted structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpretation {
    #[serde(serialize_with = "as_text")]
    pub domain: Formula,
    #[serde(serialize_with = "map_as_text")]
    pub symbols: BTreeMap<String, Formula>,
}

fn as_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

fn map_as_text<S: serde::Serializer>(m: &BTreeMap<String, Formula>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, f)| (k, f.to_string())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum InterpResult {
    Found(Interpretation),
    /// `exhaustive` is set when every pool formula up to the size bound was
    /// tried; otherwise the failure is relative to the candidate budget.
    NotFound {
        exhaustive: bool,
        candidates: u64,
    },
}

impl InterpResult {
    pub fn found(&self) -> bool {
        matches!(self, InterpResult::Found(_))
    }

    pub fn refuted_at_bound(&self) -> bool {
        matches!(self, InterpResult::NotFound { exhaustive: true, .. })
    }
}

pub fn domain_var() -> Var {
    Var::obj("x")
}

pub fn arg_vars(k: usize) -> Vec<Var> {
    (1..=k).map(|i| Var::obj(&format!("x{i}"))).collect()
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t: Vec<usize>| (0..n).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

fn extension(a: &FiniteStructure, f: &Formula, vars: &[Var]) -> Result<Vec<bool>, ExpError> {
    tuples(a.size, vars.len())
        .iter()
        .map(|t| {
            let asg: Assignment = vars.iter().zip(t).map(|(v, &e)| (v.name.to_string(), e)).collect();
            Ok(eval_fo(a, f, &asg)?)
        })
        .collect()
}

/// The structure `B*` induced in `a` by the interpretation, evaluated
/// directly with `eval_fo`.
pub fn induced_structure(
    a: &FiniteStructure,
    it: &Interpretation,
    arities: &BTreeMap<String, usize>,
) -> Result<FiniteStructure, ExpError> {
    let x = domain_var();
    let dom: Vec<usize> = extension(a, &it.domain, std::slice::from_ref(&x))?
        .into_iter()
        .enumerate()
        .filter_map(|(e, b)| b.then_some(e))
        .collect();
    let mut m = FiniteStructure::new(dom.len())?;
    for (name, &k) in arities {
        let f = it.symbols.get(name).ok_or_else(|| ExpError::Config(format!("no formula for {name}")))?;
        let vars = arg_vars(k);
        let mut rel = Vec::new();
        for t in tuples(dom.len(), k) {
            let asg: Assignment = vars.iter().zip(&t).map(|(v, &p)| (v.name.to_string(), dom[p])).collect();
            if eval_fo(a, f, &asg)? {
                rel.push(t);
            }
        }
        m.add_relation(name, k, rel)?;
    }
    Ok(m)
}

/// Whether the interpretation's free variables are in order and the
/// structure it induces in `a` is isomorphic to `b`.
pub fn verify_interpretation(a: &FiniteStructure, b: &FiniteStructure, it: &Interpretation) -> Result<bool, ExpError> {
    let arities: BTreeMap<String, usize> = b.relations.iter().map(|(n, r)| (n.clone(), r.arity)).collect();
    if it.domain.free_vars().iter().any(|v| *v != domain_var()) {
        return Ok(false);
    }
    for (name, &k) in &arities {
        let allowed = arg_vars(k);
        match it.symbols.get(name) {
            Some(f) if f.free_vars().iter().all(|v| allowed.contains(v)) => {}
            _ => return Ok(false),
        }
    }
    if it.symbols.len() != arities.len() {
        return Ok(false);
    }
    let m = induced_structure(a, it, &arities)?;
    Ok(m.size > 0 && iso_search(&m, b).is_iso())
}

struct Pool {
    /// First formula found for each extension over `A^k`.
    by_ext: Vec<(Vec<bool>, Formula)>,
}

fn pool(
    a: &FiniteStructure,
    vars: &[Var],
    bound: usize,
    left: &mut u64,
    seed: Option<Formula>,
) -> Result<(Pool, bool), ExpError> {
    let sig = a.signature();
    let mut forms: Vec<Formula> = seed.into_iter().collect();
    forms.extend(formula_pool(&sig, vars, bound, true));
    let complete = forms.len() as u64 <= *left;
    forms.truncate((*left).min(forms.len() as u64) as usize);
    *left -= forms.len() as u64;
    let mut seen = HashSet::new();
    let mut by_ext = Vec::new();
    for f in forms {
        let ext = extension(a, &f, vars)?;
        if seen.insert(ext.clone()) {
            by_ext.push((ext, f));
        }
    }
    Ok((Pool { by_ext }, complete))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut p: Vec<usize> = (0..n).collect();
    fn go(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            go(i + 1, p, out);
            p.swap(i, j);
        }
    }
    go(0, &mut p, &mut out);
    out
}

/// Searches for a one-dimensional interpretation of `b` in `a` whose
/// defining formulas have pool size at most `bound`, trying at most
/// `budget` candidate formulas in total.
pub fn interpretability_search(
    a: &FiniteStructure,
    b: &FiniteStructure,
    bound: usize,
    budget: u64,
) -> Result<InterpResult, ExpError> {
    if !b.constants.is_empty() {
        return Err(ExpError::Config("interpreted structures must be relational".into()));
    }
    let mut left = budget;
    let x = domain_var();
    let trivial = Formula::eq(Term::var(&x), Term::var(&x));
    let (domains, mut exhaustive) = pool(a, std::slice::from_ref(&x), bound, &mut left, Some(trivial))?;
    let mut symbol_pools = BTreeMap::new();
    for (name, r) in &b.relations {
        let (p, complete) = pool(a, &arg_vars(r.arity), bound, &mut left, None)?;
        exhaustive &= complete;
        symbol_pools.insert(name.clone(), (r.arity, p));
    }
    let candidates = budget - left;
    let m = b.size;
    let perms = permutations(m);
    for (dext, dform) in &domains.by_ext {
        let dom: Vec<usize> = dext.iter().enumerate().filter_map(|(e, &t)| t.then_some(e)).collect();
        if dom.len() != m {
            continue;
        }
        // Per symbol: restriction to dom^k (by position) -> defining formula.
        let mut restricted: BTreeMap<&str, HashMap<Vec<bool>, &Formula>> = BTreeMap::new();
        for (name, (k, p)) in &symbol_pools {
            let idx: Vec<usize> =
                tuples(m, *k).iter().map(|t| t.iter().fold(0, |acc, &pos| acc * a.size + dom[pos])).collect();
            let mut map = HashMap::new();
            for (ext, f) in &p.by_ext {
                map.entry(idx.iter().map(|&i| ext[i]).collect()).or_insert(f);
            }
            restricted.insert(name.as_str(), map);
        }
        // pi maps elements of b to positions in dom.
        'perm: for pi in &perms {
            let mut symbols = BTreeMap::new();
            for (name, (k, _)) in &symbol_pools {
                let want: Vec<bool> = tuples(m, *k)
                    .iter()
                    .map(|t| {
                        let pre: Vec<usize> =
                            t.iter().map(|&pos| pi.iter().position(|&q| q == pos).expect("bijection")).collect();
                        b.holds(name, &pre)
                    })
                    .collect();
                match restricted[name.as_str()].get(&want) {
                    Some(f) => {
                        symbols.insert(name.clone(), (*f).clone());
                    }
                    None => continue 'perm,
                }
            }
            let it = Interpretation { domain: dform.clone(), symbols };
            if !verify_interpretation(a, b, &it)? {
                return Err(ExpError::Internal(format!(
                    "search produced an interpretation that fails verification: {it:?}"
                )));
            }
            return Ok(InterpResult::Found(it));
        }
    }
    Ok(InterpResult::NotFound { exhaustive, candidates })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FundVerdict {
    Fund,
    NotFund,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundReport {
    pub header: ReportHeader,
    pub verdict: FundVerdict,
    /// `B` interpreted in `A`.
    pub b_in_a: InterpResult,
    /// `A` interpreted in `B`.
    pub a_in_b: InterpResult,
    pub reason: String,
}

#[derive(Serialize)]
struct FundKey<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    bound: usize,
    budget: u64,
}

/// `Fund(A, B)`: `B` is interpretable in `A` and `A` is certified not to be
/// interpretable in `B` at the bound.
pub fn fund(a: &FiniteStructure, b: &FiniteStructure, bound: usize, budget: u64) -> Result<FundReport, ExpError> {
    let b_in_a = interpretability_search(a, b, bound, budget)?;
    let a_in_b = interpretability_search(b, a, bound, budget)?;
    let (verdict, reason) = if a_in_b.found() {
        (FundVerdict::NotFund, "A is interpretable in B".to_string())
    } else if b_in_a.refuted_at_bound() {
        (FundVerdict::NotFund, format!("B is not interpretable in A with formulas of size at most {bound}"))
    } else if b_in_a.found() && a_in_b.refuted_at_bound() {
        (FundVerdict::Fund, format!("B is interpretable in A; A is not interpretable in B at size {bound}"))
    } else {
        (FundVerdict::Inconclusive, "the candidate budget ran out before either direction was settled".to_string())
    };
    Ok(FundReport {
        header: ReportHeader::new("interp", &FundKey { a, b, bound, budget }),
        verdict,
        b_in_a,
        a_in_b,
        reason,
    })
}

/// Structures used by tests, the CLI and the acceptance run.
pub mod samples {
    use crate::semantics::FiniteStructure;

    /// The strict order 0 < 1 < ... < n-1.
    pub fn linear_order(n: usize) -> FiniteStructure {
        let pairs: Vec<Vec<usize>> = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
        let mut m = FiniteStructure::new(n).expect("positive size");
        m.add_relation("L", 2, pairs).expect("binary relation");
        m
    }

    pub fn pure_set(n: usize) -> FiniteStructure {
        FiniteStructure::new(n).expect("positive size")
    }

    /// The path 0 - 1 - 2 - 3 with its endpoints coloured `R`.
    pub fn coloured_path() -> FiniteStructure {
        FiniteStructure::new(4)
            .expect("positive size")
            .with("E", 2, &[&[0, 1], &[1, 0], &[1, 2], &[2, 1], &[2, 3], &[3, 2]])
            .with("R", 1, &[&[0], &[3]])
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    const BUDGET: u64 = 1 << 20;

    #[test]
    fn identity_interpretation() {
        let a = linear_order(3);
        let InterpResult::Found(it) = interpretability_search(&a, &a, 2, BUDGET).unwrap() else { panic!() };
        assert_eq!(it.domain.to_string(), "x = x");
        assert_eq!(it.symbols["L"].to_string(), "L(x1, x2)");
    }

    #[test]
    fn endpoints_of_a_path() {
        let r = interpretability_search(&coloured_path(), &pure_set(2), 3, BUDGET).unwrap();
        let InterpResult::Found(it) = r else { panic!("{r:?}") };
        assert!(verify_interpretation(&coloured_path(), &pure_set(2), &it).unwrap());
    }

    #[test]
    fn too_small_a_domain() {
        let r = interpretability_search(&pure_set(1), &pure_set(3), 3, BUDGET).unwrap();
        assert!(r.refuted_at_bound(), "{r:?}");
    }

    #[test]
    fn fund_examples() {
        let f = fund(&linear_order(3), &pure_set(3), 4, BUDGET).unwrap();
        assert_eq!(f.verdict, FundVerdict::Fund, "{f:?}");
        let iso = linear_order(3).permuted(&[2, 0, 1]);
        assert_eq!(fund(&linear_order(3), &iso, 4, BUDGET).unwrap().verdict, FundVerdict::NotFund);
        assert_eq!(fund(&linear_order(3), &iso, 4, 1).unwrap().verdict, FundVerdict::Inconclusive);
    }

    #[test]
    fn verifier_rejects_bad_interpretations() {
        let a = linear_order(3);
        let wrong = Interpretation {
            domain: Formula::eq(Term::var(&domain_var()), Term::var(&domain_var())),
            symbols: BTreeMap::from([("L".to_string(), crate::syntax::parse_formula("L(x2, x1)").unwrap())]),
        };
        // The reversed order is isomorphic to the order.
        assert!(verify_interpretation(&a, &a, &wrong).unwrap());
        let empty = Interpretation {
            symbols: BTreeMap::from([(
                "L".to_string(),
                crate::syntax::parse_formula("L(x1, x2) & ~L(x1, x2)").unwrap(),
            )]),
            ..wrong.clone()
        };
        assert!(!verify_interpretation(&a, &a, &empty).unwrap());
        let stray = Interpretation {
            symbols: BTreeMap::from([("L".to_string(), crate::syntax::parse_formula("L(x1, y)").unwrap())]),
            ..wrong
        };
        assert!(!verify_interpretation(&a, &a, &stray).unwrap());
    }
}
