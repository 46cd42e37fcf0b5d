//! Exhaustive enumeration of finite structures over a relational signature,
//! and validity checking up to a size bound.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::syntax::{is_box_free, Formula};

use super::eval::{compile, signature_of, Machine, NoFamily};
use super::iso::permutations;
use super::structure::{index_of, tuple_at, FiniteStructure, Relation, Signature};
use super::SemError;

/// Default cap on the number of structures examined by one call.
pub const DEFAULT_STRUCTURE_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, Copy)]
pub struct EnumOptions {
    /// Maximum number of raw structures generated per call.
    pub budget: u64,
    /// Keep one representative per isomorphism class.
    pub iso_filter: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { budget: DEFAULT_STRUCTURE_BUDGET, iso_filter: false }
    }
}

fn cells(sig: &Signature, n: usize) -> Option<u32> {
    sig.values().try_fold(0u32, |acc, &k| acc.checked_add(u32::try_from(n.checked_pow(k as u32)?).ok()?))
}

/// Number of structures of size `n` over `sig`, if it fits in a `u64`.
pub fn structure_count(sig: &Signature, n: usize) -> Option<u64> {
    let c = cells(sig, n)?;
    1u64.checked_shl(c).filter(|_| c < 64)
}

fn decode(arities: &[usize], n: usize, mut bits: u64) -> Vec<Vec<bool>> {
    arities
        .iter()
        .map(|&k| {
            let len = n.pow(k as u32);
            let t: Vec<bool> = (0..len).map(|i| bits >> i & 1 == 1).collect();
            bits >>= len;
            t
        })
        .collect()
}

fn build(sig: &Signature, n: usize, tables: Vec<Vec<bool>>) -> FiniteStructure {
    let relations =
        sig.iter().zip(tables).map(|((name, &arity), table)| (name.clone(), Relation { arity, table })).collect();
    FiniteStructure { size: n, relations, constants: BTreeMap::new() }
}

fn encode(s: &FiniteStructure) -> Vec<bool> {
    s.relations.values().flat_map(|r| r.table.iter().copied()).collect()
}

/// Canonical code: the lexicographically least encoding over all relabellings.
fn canonical(s: &FiniteStructure, perms: &[Vec<usize>]) -> Vec<bool> {
    let n = s.size;
    perms
        .iter()
        .map(|p| {
            let mut out = Vec::new();
            for r in s.relations.values() {
                let mut t = vec![false; r.table.len()];
                for (i, &b) in r.table.iter().enumerate() {
                    if b {
                        let u: Vec<usize> = tuple_at(n, r.arity, i).iter().map(|&a| p[a]).collect();
                        t[index_of(n, &u)] = true;
                    }
                }
                out.extend(t);
            }
            out
        })
        .min()
        .unwrap_or_else(|| encode(s))
}

/// All structures of size `n` over `sig`, in order of their bit encoding.
/// With `iso_filter`, the first structure of each isomorphism class is kept.
pub fn enumerate_structures(sig: &Signature, n: usize, opts: EnumOptions) -> Result<Vec<FiniteStructure>, SemError> {
    if n == 0 {
        return Err(SemError::Structure("domains are nonempty".into()));
    }
    let count = structure_count(sig, n)
        .filter(|c| *c <= opts.budget)
        .ok_or_else(|| SemError::Budget(format!("more than {} structures of size {n}", opts.budget)))?;
    let arities: Vec<usize> = sig.values().copied().collect();
    let all = (0..count).map(|bits| build(sig, n, decode(&arities, n, bits)));
    if !opts.iso_filter {
        return Ok(all.collect());
    }
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    Ok(all.filter(|s| seen.insert(canonical(s, &perms))).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BoundedValidity {
    /// True in every structure of size at most the bound.
    ValidUpTo(usize),
    /// The first falsifying structure, smallest size first.
    Countermodel(FiniteStructure),
}

impl BoundedValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, BoundedValidity::ValidUpTo(_))
    }
}

/// Checks a closed relational sentence in every structure of size
/// `1..=max_size` over its own signature. `budget` caps the total number of
/// structures; exceeding it is an error rather than a partial answer.
pub fn validity_fo_bounded(phi: &Formula, max_size: usize, budget: u64) -> Result<BoundedValidity, SemError> {
    if !phi.is_closed() {
        return Err(SemError::Unbound(
            phi.free_vars().iter().map(|v| v.name.to_string()).collect::<Vec<_>>().join(", "),
        ));
    }
    if !is_box_free(phi) {
        return Err(SemError::Unsupported("box formulas".into()));
    }
    let sig = signature_of(phi)?;
    let code = compile(phi, &sig, &BTreeMap::new(), false)?;
    let arities: Vec<usize> = sig.values().copied().collect();
    let mut spent = 0u64;
    for n in 1..=max_size {
        let count = structure_count(&sig, n)
            .filter(|c| spent.checked_add(*c).is_some_and(|t| t <= budget))
            .ok_or_else(|| SemError::Budget(format!("structures up to size {n} exceed the budget of {budget}")))?;
        spent += count;
        let bad = (0..count).into_par_iter().find_first(|&bits| {
            let tables = decode(&arities, n, bits);
            let mut m = Machine { n, rels: tables.iter().map(|t| t.as_slice()).collect(), env: vec![], so_env: vec![] };
            !m.run(&code, &NoFamily)
        });
        if let Some(bits) = bad {
            return Ok(BoundedValidity::Countermodel(build(&sig, n, decode(&arities, n, bits))));
        }
    }
    Ok(BoundedValidity::ValidUpTo(max_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_fo, Assignment};
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn tautology_and_nontheorem() {
        assert_eq!(
            validity_fo_bounded(&f("(all x. P(x)) | ex x. ~P(x)"), 4, 1 << 20).unwrap(),
            BoundedValidity::ValidUpTo(4)
        );
        match validity_fo_bounded(&f("ex x:obj. ex y:obj. x != y"), 3, 1 << 20).unwrap() {
            BoundedValidity::Countermodel(m) => assert_eq!(m.size, 1),
            v => panic!("{v:?}"),
        }
        let monadic = f("(ex x. P(x)) & (ex x. ~P(x)) -> ex x:obj. ex y:obj. x != y");
        assert!(validity_fo_bounded(&monadic, 4, 1 << 20).unwrap().is_valid());
    }

    #[test]
    fn countermodel_falsifies() {
        let phi = f("(all x. ex y. E(x, y)) -> ex y. all x. E(x, y)");
        let BoundedValidity::Countermodel(m) = validity_fo_bounded(&phi, 3, 1 << 20).unwrap() else { panic!() };
        assert_eq!(m.size, 2);
        assert!(!eval_fo(&m, &phi, &Assignment::new()).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let phi = f("all x. all y. E(x, y) | ~E(x, y) | F(x, y)");
        assert!(matches!(validity_fo_bounded(&phi, 4, 1000), Err(SemError::Budget(_))));
    }

    #[test]
    fn iso_filter_counts_graphs() {
        // Directed graphs with loops on 2 and 3 vertices, up to isomorphism.
        let sig = Signature::from([("E".to_string(), 2)]);
        let opts = EnumOptions { iso_filter: true, ..Default::default() };
        assert_eq!(enumerate_structures(&sig, 2, opts).unwrap().len(), 10);
        assert_eq!(enumerate_structures(&sig, 3, opts).unwrap().len(), 104);
        assert_eq!(enumerate_structures(&sig, 3, EnumOptions::default()).unwrap().len(), 512);
    }
}
