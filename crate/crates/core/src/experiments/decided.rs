//! Decidedness and categoricity of second-order theories over finite
//! domains. Models of the theory are found by enumerating structures up to
//! isomorphism and evaluating the theory under standard semantics.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::semantics::{
    enumerate_structures, eval_fo, eval_so_with, iso_search, signature_of, structure_count, Assignment, EnumOptions,
    FiniteStructure, Signature, SoBudget, SoStructure,
};
use crate::syntax::Formula;

use super::{ExpError, ReportHeader};

#[derive(Debug, Clone, PartialEq)]
pub struct DecidednessQuery {
    pub tau2: Formula,
    pub phi: Formula,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Decidedness {
    DecidedTrue,
    DecidedFalse,
    Mixed {
        true_in: FiniteStructure,
        false_in: FiniteStructure,
    },
    /// The theory has no model of the given sizes, so every sentence is
    /// vacuously decided. Reported separately.
    NoModels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecidednessReport {
    pub header: ReportHeader,
    pub tau2: String,
    pub phi: String,
    pub sizes: Vec<usize>,
    /// Isomorphism classes examined.
    pub structures: u64,
    pub models_by_size: BTreeMap<usize, u64>,
    pub verdict: Decidedness,
}

#[derive(Serialize)]
struct QueryKey<'a> {
    tau2: String,
    phi: Option<String>,
    sizes: &'a [usize],
    budget: u64,
}

fn joint_signature(fs: &[&Formula]) -> Result<Signature, ExpError> {
    let mut sig = Signature::new();
    for f in fs {
        if !f.is_closed() {
            return Err(ExpError::Config(format!("{f} is not a sentence")));
        }
        for (name, k) in signature_of(f)? {
            if let Some(prev) = sig.insert(name.clone(), k) {
                if prev != k {
                    return Err(ExpError::Config(format!("{name} is used with arities {prev} and {k}")));
                }
            }
        }
    }
    Ok(sig)
}

/// Structures of each size over `sig`, one per isomorphism class, with the
/// raw count charged against `budget`.
fn structures(sig: &Signature, sizes: &[usize], budget: u64) -> Result<Vec<FiniteStructure>, ExpError> {
    let mut left = budget;
    let mut out = Vec::new();
    for &n in sizes {
        if n == 0 {
            return Err(ExpError::Config("domain sizes must be positive".into()));
        }
        let raw = structure_count(sig, n)
            .filter(|&c| c <= left)
            .ok_or_else(|| ExpError::Budget(format!("size {n} needs more than the remaining {left} structures")))?;
        left -= raw;
        out.extend(enumerate_structures(sig, n, EnumOptions { budget: raw, iso_filter: true })?);
    }
    Ok(out)
}

fn satisfies(m: &FiniteStructure, tau2: &Formula) -> Result<bool, ExpError> {
    Ok(eval_so_with(&SoStructure::standard(m.clone()), tau2, &Assignment::new(), SoBudget::default())?)
}

pub fn decided_by(q: &DecidednessQuery, budget: u64) -> Result<DecidednessReport, ExpError> {
    let sig = joint_signature(&[&q.tau2, &q.phi])?;
    let mut models_by_size = BTreeMap::new();
    let (mut yes, mut no) = (None, None);
    let all = structures(&sig, &q.sizes, budget)?;
    for m in &all {
        if !satisfies(m, &q.tau2)? {
            continue;
        }
        *models_by_size.entry(m.size).or_insert(0) += 1;
        let slot = if eval_fo(m, &q.phi, &Assignment::new())? { &mut yes } else { &mut no };
        slot.get_or_insert_with(|| m.clone());
    }
    let verdict = match (yes, no) {
        (None, None) => Decidedness::NoModels,
        (Some(_), None) => Decidedness::DecidedTrue,
        (None, Some(_)) => Decidedness::DecidedFalse,
        (Some(t), Some(f)) => Decidedness::Mixed { true_in: t, false_in: f },
    };
    let key = QueryKey { tau2: q.tau2.to_string(), phi: Some(q.phi.to_string()), sizes: &q.sizes, budget };
    Ok(DecidednessReport {
        header: ReportHeader::new("decided", &key),
        tau2: key.tau2.clone(),
        phi: q.phi.to_string(),
        sizes: q.sizes.clone(),
        structures: all.len() as u64,
        models_by_size,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Categoricity {
    Categorical,
    NotCategorical,
    NoModels,
}

/// A structure on which standard and sparse Henkin evaluation disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDivergence {
    pub structure: FiniteStructure,
    pub standard: bool,
    pub henkin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricityReport {
    pub header: ReportHeader,
    pub tau2: String,
    pub sizes: Vec<usize>,
    pub structures: u64,
    pub models_by_size: BTreeMap<usize, u64>,
    pub verdict: Categoricity,
    pub counterexample: Option<(FiniteStructure, FiniteStructure)>,
    /// Number of structures where the two modes disagree, with the first few.
    pub divergences: u64,
    pub divergence_examples: Vec<ModeDivergence>,
}

const DIVERGENCE_EXAMPLES: usize = 4;

fn so_arities(f: &Formula, out: &mut BTreeSet<usize>) {
    match f {
        Formula::SoAll(_, k, a) | Formula::SoEx(_, k, a) => {
            out.insert(*k);
            so_arities(a, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            so_arities(a, out);
            so_arities(b, out);
        }
        Formula::All(_, a) | Formula::Ex(_, a) | Formula::Box(_, a) => so_arities(a, out),
        _ => {}
    }
}

/// The Henkin structure whose relation variables range only over the empty
/// and the full relation of each arity.
fn sparse_henkin(m: &FiniteStructure, arities: &BTreeSet<usize>) -> Result<SoStructure, ExpError> {
    let family = arities
        .iter()
        .map(|&k| {
            let full = crate::semantics::all_relations(m.size, k)
                .into_iter()
                .max_by_key(|r| r.len())
                .expect("nonempty powerset");
            (k, vec![BTreeSet::new(), full])
        })
        .collect();
    Ok(SoStructure::henkin(m.clone(), family)?)
}

pub fn categoricity_check(tau2: &Formula, sizes: &[usize], budget: u64) -> Result<CategoricityReport, ExpError> {
    let sig = joint_signature(&[tau2])?;
    let mut arities = BTreeSet::new();
    so_arities(tau2, &mut arities);
    let all = structures(&sig, sizes, budget)?;
    let mut models: Vec<&FiniteStructure> = Vec::new();
    let mut models_by_size = BTreeMap::new();
    let (mut divergences, mut divergence_examples) = (0, Vec::new());
    for m in &all {
        let standard = satisfies(m, tau2)?;
        if standard {
            models.push(m);
            *models_by_size.entry(m.size).or_insert(0) += 1;
        }
        if !arities.is_empty() {
            let henkin = eval_so_with(&sparse_henkin(m, &arities)?, tau2, &Assignment::new(), SoBudget::default())?;
            if henkin != standard {
                divergences += 1;
                if divergence_examples.len() < DIVERGENCE_EXAMPLES {
                    divergence_examples.push(ModeDivergence { structure: m.clone(), standard, henkin });
                }
            }
        }
    }
    let mut counterexample = None;
    'pairs: for (i, a) in models.iter().enumerate() {
        for b in &models[i + 1..] {
            if !iso_search(a, b).is_iso() {
                counterexample = Some(((*a).clone(), (*b).clone()));
                break 'pairs;
            }
        }
    }
    let verdict = match (models.is_empty(), &counterexample) {
        (true, _) => Categoricity::NoModels,
        (false, None) => Categoricity::Categorical,
        (false, Some(_)) => Categoricity::NotCategorical,
    };
    let key = QueryKey { tau2: tau2.to_string(), phi: None, sizes, budget };
    Ok(CategoricityReport {
        header: ReportHeader::new("categorical", &key),
        tau2: key.tau2.clone(),
        sizes: sizes.to_vec(),
        structures: all.len() as u64,
        models_by_size,
        verdict,
        counterexample,
        divergences,
        divergence_examples,
    })
}

/// Sample theories used by tests, the CLI and the acceptance run.
pub mod samples {
    /// Exactly two elements, stated with a second-order singleton quantifier.
    pub const EXACTLY_TWO: &str =
        "ex X:pred1. (ex x. X(x) & (all y. X(y) -> y = x)) & (ex x. ~X(x) & (all y. ~X(y) -> y = x))";
    pub const TWO_DISTINCT: &str = "ex x:obj. ex y:obj. ~x = y";
    pub const THREE_DISTINCT: &str = "ex x:obj. ex y:obj. ex z:obj. ~x = y & ~x = z & ~y = z";
    /// A strict linear order `L`.
    pub const LINEAR_ORDER: &str = "(all x. ~L(x, x)) & (all x. all y. all z. L(x, y) & L(y, z) -> L(x, z)) \
         & (all x. all y. L(x, y) | x = y | L(y, x))";
    /// A linear order with endpoints whose interior is a single point.
    pub const LINEAR_ORDER_3: &str = "(all x. ~L(x, x)) & (all x. all y. all z. L(x, y) & L(y, z) -> L(x, z)) \
         & (all x. all y. L(x, y) | x = y | L(y, x)) \
         & (ex x. all y. x = y | L(x, y)) & (ex x. all y. x = y | L(y, x)) \
         & (ex X:pred1. (ex x. X(x) & (all y. X(y) -> y = x)) & (all y. X(y) <-> (ex a. L(a, y)) & (ex b. L(y, b))))";
    /// Comprehension for a definable set; standard-valid, fails in sparse
    /// Henkin structures.
    pub const COMPREHENSION: &str = "ex X:pred1. all x. X(x) <-> P(x)";
    pub const UNSATISFIABLE: &str = "ex x. ~x = x";
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn query(tau2: &str, phi: &str) -> Decidedness {
        decided_by(&DecidednessQuery { tau2: f(tau2), phi: f(phi), sizes: vec![1, 2, 3, 4] }, 1 << 20).unwrap().verdict
    }

    #[test]
    fn exactly_two() {
        assert_eq!(query(EXACTLY_TWO, TWO_DISTINCT), Decidedness::DecidedTrue);
        assert_eq!(query(EXACTLY_TWO, THREE_DISTINCT), Decidedness::DecidedFalse);
        assert_eq!(query(UNSATISFIABLE, TWO_DISTINCT), Decidedness::NoModels);
        let mixed = query(LINEAR_ORDER, THREE_DISTINCT);
        let Decidedness::Mixed { true_in, false_in } = mixed else { panic!("{mixed:?}") };
        assert!(true_in.size >= 3 && false_in.size < 3);
    }

    #[test]
    fn three_element_order_is_categorical() {
        let r = categoricity_check(&f(LINEAR_ORDER_3), &[1, 2, 3, 4], 1 << 20).unwrap();
        assert_eq!(r.verdict, Categoricity::Categorical);
        assert_eq!(r.models_by_size, BTreeMap::from([(3, 1)]));
        // Consistency with decidedness over the same sizes.
        for phi in [TWO_DISTINCT, THREE_DISTINCT, "all x. ex y. L(x, y)", "ex x. all y. ~L(y, x)"] {
            let d = decided_by(
                &DecidednessQuery { tau2: f(LINEAR_ORDER_3), phi: f(phi), sizes: vec![1, 2, 3, 4] },
                1 << 20,
            )
            .unwrap();
            assert!(matches!(d.verdict, Decidedness::DecidedTrue | Decidedness::DecidedFalse), "{phi}");
        }
    }

    #[test]
    fn linear_orders_of_two_sizes_are_not_categorical() {
        let r = categoricity_check(&f(LINEAR_ORDER), &[2, 3], 1 << 20).unwrap();
        assert_eq!(r.verdict, Categoricity::NotCategorical);
        let (a, b) = r.counterexample.unwrap();
        assert_ne!(a.size, b.size);
        assert_eq!(r.divergences, 0);
    }

    #[test]
    fn comprehension_diverges_between_modes() {
        let r = categoricity_check(&f(COMPREHENSION), &[1, 2, 3], 1 << 20).unwrap();
        assert!(r.divergences > 0);
        let d = &r.divergence_examples[0];
        assert!(d.standard && !d.henkin);
        // Standard semantics accepts every structure.
        assert_eq!(r.models_by_size.values().sum::<u64>(), r.structures);
    }

    #[test]
    fn budget_and_input_errors() {
        let q = DecidednessQuery { tau2: f(LINEAR_ORDER), phi: f(TWO_DISTINCT), sizes: vec![4] };
        assert!(matches!(decided_by(&q, 100), Err(ExpError::Budget(_))));
        let open = DecidednessQuery { tau2: f("P(x)"), phi: f(TWO_DISTINCT), sizes: vec![1] };
        assert!(matches!(decided_by(&open, 100), Err(ExpError::Config(_))));
    }
}
