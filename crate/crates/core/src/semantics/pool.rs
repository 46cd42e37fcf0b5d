//! Syntactic enumeration of relational formulas by size, used for
//! definability checks and interpretation search.

use crate::syntax::{Formula, Term, Var};

use super::structure::Signature;

/// Size used by the pool: atoms count 1, each connective, negation or
/// quantifier adds 1.
pub fn pool_size(f: &Formula) -> usize {
    match f {
        Formula::Eq(..) | Formula::Lt(..) | Formula::Pred(..) | Formula::Bot => 1,
        Formula::Imp(a, b) if **b == Formula::Bot => 1 + pool_size(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + pool_size(a) + pool_size(b),
        Formula::All(_, a) | Formula::Ex(_, a) | Formula::Box(_, a) => 1 + pool_size(a),
        Formula::SoAll(_, _, a) | Formula::SoEx(_, _, a) => 1 + pool_size(a),
    }
}

fn tuples(vars: &[Var], k: usize) -> Vec<Vec<Term>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Term>| {
                vars.iter().map(move |v| {
                    let mut u = t.clone();
                    u.push(Term::var(v));
                    u
                })
            })
            .collect();
    }
    out
}

/// All formulas of pool size `1..=max_size` whose free variables are among
/// `free`, built from the relations of `sig`, equality (if `with_eq`),
/// `~`, `&`, `|`, `->` and both quantifiers. Bound variables are named
/// `z1`, `z2`, ... by depth. Ordered by size, then by construction.
pub fn formula_pool(sig: &Signature, free: &[Var], max_size: usize, with_eq: bool) -> Vec<Formula> {
    // table[d][s]: formulas of size s over free + z1..zd.
    let max_depth = max_size.saturating_sub(1);
    let mut table: Vec<Vec<Vec<Formula>>> = vec![vec![vec![]; max_size + 1]; max_depth + 1];
    let ctx = |d: usize| -> Vec<Var> {
        let mut v = free.to_vec();
        v.extend((1..=d).map(|i| Var::obj(&format!("z{i}"))));
        v
    };
    for s in 1..=max_size {
        // Depth d only needs sizes up to max_size - d.
        for d in 0..=max_depth.min(max_size - s) {
            let vars = ctx(d);
            let mut out = Vec::new();
            if s == 1 {
                for (name, &k) in sig {
                    for args in tuples(&vars, k) {
                        out.push(Formula::pred(name, args));
                    }
                }
                if with_eq {
                    for i in 0..vars.len() {
                        for j in i + 1..vars.len() {
                            out.push(Formula::eq(Term::var(&vars[i]), Term::var(&vars[j])));
                        }
                    }
                }
            } else {
                for a in &table[d][s - 1] {
                    out.push(Formula::not(a.clone()));
                }
                for l in 1..s - 1 {
                    let r = s - 1 - l;
                    for a in &table[d][l] {
                        for b in &table[d][r] {
                            out.push(Formula::and(a.clone(), b.clone()));
                            out.push(Formula::or(a.clone(), b.clone()));
                            out.push(Formula::imp(a.clone(), b.clone()));
                        }
                    }
                }
                if d < max_depth {
                    let z = Var::obj(&format!("z{}", d + 1));
                    for a in &table[d + 1][s - 1] {
                        if a.has_free(&z) {
                            out.push(Formula::ex(&z, a.clone()));
                            out.push(Formula::all(&z, a.clone()));
                        }
                    }
                }
            }
            table[d][s] = out;
        }
    }
    table.swap_remove(0).into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_pools() {
        let sig = Signature::from([("P".to_string(), 1)]);
        let x = Var::obj("x");
        let p = formula_pool(&sig, std::slice::from_ref(&x), 1, true);
        assert_eq!(p.len(), 1);
        let p2 = formula_pool(&sig, std::slice::from_ref(&x), 2, true);
        // P(x), ~P(x), and the quantified z1-atoms: ex z1. P(z1), all z1. P(z1), ex z1. x = z1, all z1. x = z1.
        assert_eq!(p2.len(), 6);
        assert!(p2.iter().all(|f| pool_size(f) <= 2 && f.free_vars().iter().all(|v| *v == x)));
    }

    #[test]
    fn sizes_are_respected() {
        let sig = Signature::from([("E".to_string(), 2)]);
        let vs = [Var::obj("x"), Var::obj("y")];
        for f in formula_pool(&sig, &vs, 4, true) {
            assert!(pool_size(&f) <= 4, "{f}");
            assert!(f.free_vars().iter().all(|v| vs.contains(v)), "{f}");
        }
    }
}
