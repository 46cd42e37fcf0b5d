use proptest::prelude::*;

use super::*;

fn p(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

#[test]
fn quantifier_takes_slot_binding_power() {
    let gmp = p("all a:seq. ~~ex x:nat. a(x) = 0 -> ex x:nat. a(x) = 0");
    let a = Var::seq("a");
    let x = Var::nat("x");
    let e = Formula::ex(&x, Formula::eq(Term::app(&a, Term::var(&x)), Term::Zero));
    let expect = Formula::all(&a, Formula::imp(Formula::not(Formula::not(e.clone())), e));
    assert_eq!(gmp, expect);
}

#[test]
fn leading_quantifier_is_greedy() {
    let f = p("all x:obj. P(x) -> Q(x)");
    assert!(matches!(f, Formula::All(..)));
    let g = p("(all x:obj. P(x)) -> Q");
    assert!(matches!(g, Formula::Imp(..)));
}

#[test]
fn sorts_are_inferred() {
    let f = p("b(x) = y & P(u)");
    let fv = f.free_vars();
    assert!(fv.contains(&Var::seq("b")));
    assert!(fv.contains(&Var::nat("x")));
    assert!(fv.contains(&Var::nat("y")));
    assert!(fv.contains(&Var::obj("u")));
    assert!(parse_formula("a(x) = 0 & P(a)").is_err());
    assert!(parse_formula("all a:seq. all b:seq. a = b").is_err());
}

#[test]
fn iff_and_bounded_sugar_round_trip() {
    for s in [
        "p <-> q",
        "all x<y. ex z<x. z = z",
        "a(x) != 0",
        "~(p | q) & r",
        "p -> q -> r",
        "(p -> q) -> r",
        "chi[a(x) = 0](S(x)) = 1",
        "chi[x. x < y](0) = 0",
        "box[n] all x:nat. b(x) = 0",
        "bar(a, z) # <a(z)> = bar(a, S(z))",
        "proj(<1, 2> # <>, 0) = 1",
        "all X:pred1. ex x:obj. X(x) | ~X(x)",
        "@val(g, a, y)",
        "(all x:nat. x = x) & p",
    ] {
        let f = p(s);
        let printed = f.to_string();
        assert_eq!(p(&printed), f, "{s} printed as {printed}");
    }
}

#[test]
fn notation_expands_with_renaming() {
    let f = p("@val(z, a, y)");
    let z = Var::seq("z");
    assert!(f.free_vars().contains(&z));
    assert_eq!(f.free_vars().len(), 3);
}

#[test]
fn substitution_avoids_capture() {
    let f = p("ex y:nat. x < y");
    let g = subst(&f, &Var::nat("x"), &Term::var(&Var::nat("y")));
    assert_eq!(g.to_string(), "ex y':nat. y < y'");
    assert!(g.alpha_eq(&p("ex w:nat. y < w")));
    assert!(!g.alpha_eq(&p("ex w:nat. w < w")));
}

#[test]
fn extended_delta0() {
    assert!(is_extended_delta0(&p("all x<m. b(x) = 0 | box[m] all x:nat. b(x) = 0")));
    assert!(is_extended_delta0(&p("~(ex x<m. b(x) != 0)")));
    assert!(!is_extended_delta0(&p("all x:nat. b(x) = 0")));
    assert!(!is_extended_delta0(&p("P(u)")));
}

#[test]
fn parse_errors_carry_positions() {
    match parse_formula("p & & q") {
        Err(SyntaxError::Parse { pos, .. }) => assert_eq!(pos, 4),
        other => panic!("{other:?}"),
    }
    assert!(parse_formula("box[0] box[1] p").is_err());
    assert!(parse_formula("chi[x < y](0) = 0").is_err());
}

fn nat_var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::nat("x")), Just(Var::nat("y")), Just(Var::nat("z"))]
}

fn seq_var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::seq("a")), Just(Var::seq("b"))]
}

fn obj_var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::obj("u")), Just(Var::obj("v"))]
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![nat_var().prop_map(Term::Var), Just(Term::Zero)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
            (seq_var(), inner.clone()).prop_map(|(a, t)| Term::app(&a, t)),
            (seq_var(), inner.clone()).prop_map(|(a, t)| Term::bar(&a, t)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::cat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::proj(a, b)),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Term::Tuple),
        ]
    })
}

fn arb_atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::eq(a, b)),
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::lt(a, b)),
        obj_var().prop_map(|u| Formula::pred("P", vec![Term::Var(u)])),
        (obj_var(), obj_var()).prop_map(|(u, v)| Formula::pred("R", vec![Term::Var(u), Term::Var(v)])),
        Just(Formula::letter("p")),
        Just(Formula::Bot),
    ]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    arb_atom().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            inner.clone().prop_map(Formula::not),
            (nat_var(), inner.clone()).prop_map(|(v, a)| Formula::all(&v, a)),
            (seq_var(), inner.clone()).prop_map(|(v, a)| Formula::ex(&v, a)),
            (obj_var(), inner.clone()).prop_map(|(v, a)| Formula::all(&v, a)),
            (nat_var(), arb_term(), inner.clone()).prop_map(|(v, t, a)| Formula::ex_below(&v, t, a)),
            (arb_term(), inner.clone()).prop_map(|(t, a)| {
                let body = if is_box_free(&a) { a } else { Formula::Bot };
                Formula::boxed(t, body)
            }),
        ]
    })
}

/// Forces every free variable to keep its sort when re-parsed by closing the formula.
fn well_sorted(f: Formula) -> Formula {
    f.closure()
}

proptest! {
    #[test]
    fn print_parse_round_trip(f in arb_formula().prop_map(well_sorted)) {
        let s = f.to_string();
        let g = parse_formula(&s).map_err(|e| TestCaseError::fail(format!("{s}: {e}")))?;
        prop_assert_eq!(g, f);
    }

    #[test]
    fn substitution_composes(f in arb_formula(), t in arb_term(), s in arb_term()) {
        // f[t/x][s/y] == f[s/y][t[s/y]/x] when x is not free in s
        let x = Var::nat("x");
        let y = Var::nat("y");
        prop_assume!(!s.has_free(&x));
        let lhs = subst(&subst(&f, &x, &t), &y, &s);
        let t2 = subst_term(&t, &y, &s);
        let rhs = subst(&subst(&f, &y, &s), &x, &t2);
        prop_assert!(lhs.alpha_eq(&rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn substitution_preserves_closedness(f in arb_formula(), t in arb_term()) {
        let closed_t = t.free_vars().is_empty();
        let g = subst(&f, &Var::nat("x"), &t);
        let mut expect = f.free_vars();
        if f.has_free(&Var::nat("x")) {
            expect.remove(&Var::nat("x"));
            expect.extend(t.free_vars());
        }
        prop_assert_eq!(g.free_vars(), expect);
        if closed_t && f.free_vars().iter().all(|v| v == &Var::nat("x")) {
            prop_assert!(g.is_closed());
        }
    }

    #[test]
    fn alpha_equivalence_is_respected_by_renaming(f in arb_formula()) {
        let g = canon(&f);
        prop_assert!(f.alpha_eq(&g));
        prop_assert_eq!(canon(&g), g.clone());
        prop_assert_eq!(f.free_vars(), g.free_vars());
    }
}
