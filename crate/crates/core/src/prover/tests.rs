use super::*;
use crate::kernel::check;
use crate::semantics::{kripke_eval, validity_fo_bounded};
use crate::syntax::parse_formula;

fn f(s: &str) -> crate::Formula {
    parse_formula(s).unwrap()
}

#[test]
fn prop_complete_examples() {
    let PropResult::Proof(p) = prop_complete(&f("p -> p")).unwrap() else { panic!() };
    check(&p, "Classical").unwrap();
    let PropResult::Falsifying(v) = prop_complete(&f("p -> q")).unwrap() else { panic!() };
    assert_eq!(v, Valuation::from([("p".into(), true), ("q".into(), false)]));
    let PropResult::Proof(peirce) = prop_complete(&f("((p -> q) -> p) -> p")).unwrap() else { panic!() };
    check(&peirce, "Classical").unwrap();
    assert!(peirce.lines.iter().any(|l| l.step.rule_name() == "DNE"));
    assert!(check(&peirce, "Logic").is_err());
    for s in ["bot -> bot", "(p -> q -> r) -> (p -> q) -> p -> r", "~(p & ~p)", "(p <-> q) | (p <-> ~q)"] {
        let PropResult::Proof(p) = prop_complete(&f(s)).unwrap() else { panic!("{s}") };
        check(&p, "Classical").unwrap_or_else(|e| panic!("{s}: {e}"));
    }
}

#[test]
fn ipc_examples() {
    let b = IpcBudget::default();
    assert!(ipc_decide(&f("p -> ~~p"), b).unwrap().derivable);
    assert!(ipc_decide(&f("~~(p | ~p)"), b).unwrap().derivable);
    for s in ["~~p -> p", "p | ~p"] {
        let d = ipc_decide(&f(s), b).unwrap();
        assert!(!d.derivable);
        let Verdict::Refuted(Countermodel::Kripke(k)) = d.verdict else { panic!("{s}") };
        assert_eq!(k.worlds(), 2, "{s}");
        assert!(!kripke_eval(&k, 0, &f(s)).unwrap());
    }
}

#[test]
fn glivenko_examples() {
    let b = IpcBudget::default();
    assert_eq!(glivenko(&f("((p -> q) -> p) -> p"), b).unwrap(), Some(true));
    assert_eq!(glivenko(&f("p | ~p"), b).unwrap(), Some(true));
    assert_eq!(glivenko(&f("p"), b).unwrap(), None);
}

#[test]
fn tableau_examples_against_bounded_models() {
    let cases = [
        ("(all x. P(x)) -> ex x. P(x)", true),
        ("(ex x. P(x)) -> all x. P(x)", false),
        ("(all x. ex y. E(x, y)) -> ex y. all x. E(x, y)", false),
        ("(ex y. all x. E(x, y)) -> all x. ex y. E(x, y)", true),
    ];
    for (s, valid) in cases {
        let v = tableau_prove(&f(s), TableauBudget::default()).unwrap();
        assert_eq!(v.is_proved(), valid, "{s}");
        assert_eq!(v.is_refuted(), !valid, "{s}");
        assert_eq!(validity_fo_bounded(&f(s), 3, 1 << 20).unwrap().is_valid(), valid, "{s}");
    }
}
