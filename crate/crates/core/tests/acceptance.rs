//! Acceptance run: one line per criterion, PASS or FAIL, with timings against
//! pinned targets. Failures listed in `BLOCKED` are printed as FAIL but do not
//! fail the process unless `LOGICBENCH_STRICT` is set; each has a ledger entry.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use logicbench::derivations::{check_all, classify, corrupt_line, proof_lines, Catalog, CorruptionOutcome, Sources};
use logicbench::experiments::{
    categoricity_check, decided_by, fund, prop_counts, squeeze_run, structures, theories, Categoricity, Decidedness,
    DecidednessQuery, FundVerdict, SqueezeConfig, ViolationKind,
};
use logicbench::kernel::{check, derive_decidability, library};
use logicbench::prover::{
    glivenko, ipc_decide, truth_table_counterexample, Certificate, Countermodel, IpcBudget, Verdict,
};
use logicbench::semantics::{eval_fo, eval_so, kripke_eval, Assignment, SoStructure};
use logicbench::syntax::parse_formula;
use logicbench::Formula;
use rand::Rng;

use common::*;

const FLAGSHIP: [&str; 5] = ["negglem", "neggmp", "wks_iff_cs", "sks_iff_scs2", "gmp_conditional"];
const PROP3: &str = include_str!("../../../configs/prop3.toml");
const MONADIC: &str = include_str!("../../../configs/monadic.toml");
const MONADIC_NODNE: &str = include_str!("../../../configs/monadic_nodne.toml");

/// Criteria that cannot pass at desk scale. See the decisions ledger.
const BLOCKED: &[u8] = &[3];

/// Connective bound of the propositional slice that is actually enumerated.
const PROP_SLICE: usize = 4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Run = fn() -> Result<Outcome, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    target: Option<Duration>,
    run: Run,
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn f(s: &str) -> Formula {
    parse_formula(s).expect("fixed formula parses")
}

fn flagship() -> Result<Outcome, String> {
    let report = check_all(&Catalog::builtin().only(&FLAGSHIP), &Sources::embedded()).map_err(|e| e.to_string())?;
    let accepted: BTreeSet<&str> = report.accepted().map(|e| e.id.as_str()).collect();
    let missing: Vec<&str> = FLAGSHIP.iter().copied().filter(|id| !accepted.contains(id)).collect();
    if !missing.is_empty() {
        return Ok(outcome(false, format!("not accepted: {missing:?}")));
    }
    let catalog = Catalog::builtin().only(&["neggmp"]);
    let text = library::embedded("neggmp.prf").ok_or("neggmp.prf is not embedded")?;
    let lines = proof_lines(text, "neggmp.prf").map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for l in &lines {
        let corrupted = corrupt_line(text, "neggmp.prf", l.src_line).ok_or("corruption failed")?;
        let sources = Sources::embedded().with_override("neggmp.prf", corrupted);
        let o = classify(&check_all(&catalog, &sources), l);
        if o != CorruptionOutcome::Named {
            bad.push(format!("line {}: {o:?}", l.src_line));
        }
    }
    Ok(outcome(
        bad.is_empty(),
        format!(
            "5/5 accepted; {} of {} corrupted neggmp lines rejected at that line {}",
            lines.len() - bad.len(),
            lines.len(),
            bad.join("; ")
        ),
    ))
}

fn decidability() -> Result<Outcome, String> {
    let mut r = rng(0x0dec1de);
    let mut failures = Vec::new();
    let mut theories = BTreeMap::new();
    for _ in 0..200 {
        let a = delta0_formula(&mut r, 8);
        let expected = Formula::or(a.clone(), Formula::not(a.clone())).closure();
        match derive_decidability(&a) {
            Ok(p) if !p.goal.alpha_eq(&expected) => failures.push(format!("{a}: wrong goal {}", p.goal)),
            Ok(p) => match check(&p, &p.theory.to_string()) {
                Ok(_) => *theories.entry(p.theory.to_string()).or_insert(0) += 1,
                Err(e) => failures.push(format!("{a}: {e}")),
            },
            Err(e) => failures.push(format!("{a}: {e}")),
        }
    }
    Ok(outcome(
        failures.is_empty(),
        format!("{}/200 checked, by theory {theories:?} {}", 200 - failures.len(), failures.join("; ")),
    ))
}

fn prop_squeeze() -> Result<Outcome, String> {
    let full = SqueezeConfig::from_toml(PROP3).map_err(|e| e.to_string())?;
    let total: u128 = prop_counts(3, 7).iter().sum();
    let mut slice = full.clone();
    slice.fragment = logicbench::experiments::Fragment::Propositional { letters: 3, connectives: PROP_SLICE };
    let start = Instant::now();
    let r = squeeze_run(&slice).map_err(|e| e.to_string())?;
    let rate = r.enumerated as f64 / start.elapsed().as_secs_f64();
    let projected_h = total as f64 / rate / 3600.0;
    let slice_ok = r.exhaustive && r.full_squeeze;
    Ok(outcome(
        false,
        format!(
            "slice <= {PROP_SLICE} connectives: {} formulas, exhaustive {}, {} violations, {} tautologies with kernel-checked proofs; \
             full fragment has {total} formulas, {rate:.0}/s projects {projected_h:.0} h against a 2 min target{}",
            r.enumerated,
            r.exhaustive,
            r.violations.len(),
            r.narrow_yes,
            if slice_ok { "" } else { "; SLICE FAILED" }
        ),
    ))
}

fn monadic_squeeze() -> Result<Outcome, String> {
    let cfg = SqueezeConfig::from_toml(MONADIC).map_err(|e| e.to_string())?;
    let r = squeeze_run(&cfg).map_err(|e| e.to_string())?;
    let control =
        squeeze_run(&SqueezeConfig::from_toml(MONADIC_NODNE).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let caught = control.violations.iter().filter(|v| v.kind == ViolationKind::Completeness).count();
    let control_sound = control.violations.iter().all(|v| v.kind == ViolationKind::Completeness);
    let first = control.violations.first().map(|v| v.formula.clone()).unwrap_or_default();
    Ok(outcome(
        r.exhaustive && r.full_squeeze && r.enumerated >= 10_000 && caught >= 1 && control_sound,
        format!(
            "{} formulas, exhaustive {}, {} violations, {} valid; control: {caught} completeness violations (first: {first}), only completeness {control_sound}",
            r.enumerated,
            r.exhaustive,
            r.violations.len(),
            r.wide_yes
        ),
    ))
}

fn intuitionistic() -> Result<Outcome, String> {
    let b = IpcBudget::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for s in ["~~p -> p", "p | ~p"] {
        let phi = f(s);
        let d = ipc_decide(&phi, b).map_err(|e| e.to_string())?;
        match &d.verdict {
            Verdict::Refuted(Countermodel::Kripke(k))
                if k.worlds() <= 2 && !kripke_eval(k, 0, &phi).map_err(|e| e.to_string())? =>
            {
                notes.push(format!("{s} refuted, {} worlds", k.worlds()))
            }
            v => {
                ok = false;
                notes.push(format!("{s}: {}", v.label()))
            }
        }
    }
    let phi = f("p -> ~~p");
    match ipc_decide(&phi, b).map_err(|e| e.to_string())?.verdict {
        Verdict::Proved(Certificate::Proof(p)) if check(&p, "Logic").is_ok() && p.goal == phi => {
            notes.push("p -> ~~p proved in Logic".into())
        }
        v => {
            ok = false;
            notes.push(format!("p -> ~~p: {}", v.label()))
        }
    }
    let mut r = rng(0x611e);
    let mut corpus = BTreeSet::new();
    while corpus.len() < 500 {
        let c = r.gen_range(1..7);
        let phi = prop_formula(&mut r, &["p", "q", "r"], c);
        if truth_table_counterexample(&phi).is_none() {
            corpus.insert(phi.to_string());
        }
    }
    let mut held = 0;
    for s in &corpus {
        if glivenko(&f(s), b).map_err(|e| e.to_string())? == Some(true) {
            held += 1;
        }
    }
    ok &= held == corpus.len();
    notes.push(format!("Glivenko {held}/{}", corpus.len()));
    Ok(outcome(ok, notes.join("; ")))
}

fn soundness() -> Result<Outcome, String> {
    let mut r = rng(0x50d);
    let (mut pairs, mut attempts, mut classical, mut bad) = (0, 0, 0, Vec::new());
    while pairs < 1000 {
        attempts += 1;
        let Some((thm, proof)) = random_theorem(&mut r, 20) else { continue };
        if check(&proof, "Logic").is_err() {
            classical += 1;
        }
        let m = random_structure(&mut r, &FO_SIG, 5);
        if !eval_fo(&m, &thm, &Assignment::new()).map_err(|e| e.to_string())? {
            bad.push(thm.to_string());
        }
        pairs += 1;
    }
    Ok(outcome(
        bad.is_empty(),
        format!(
            "{}/1000 true ({attempts} derivation attempts, {classical} theorems need classical rules) {}",
            1000 - bad.len(),
            bad.join("; ")
        ),
    ))
}

fn decidedness() -> Result<Outcome, String> {
    let sizes = vec![1, 2, 3, 4];
    let q = |tau2: &str, phi: &str| -> Result<Decidedness, String> {
        let q = DecidednessQuery { tau2: f(tau2), phi: f(phi), sizes: sizes.clone() };
        Ok(decided_by(&q, 1 << 20).map_err(|e| e.to_string())?.verdict)
    };
    let mut checks: Vec<(&str, bool)> = vec![
        ("exactly-2 decides 2 distinct", q(theories::EXACTLY_TWO, theories::TWO_DISTINCT)? == Decidedness::DecidedTrue),
        (
            "exactly-2 refutes 3 distinct",
            q(theories::EXACTLY_TWO, theories::THREE_DISTINCT)? == Decidedness::DecidedFalse,
        ),
        ("unsatisfiable has no models", q(theories::UNSATISFIABLE, theories::TWO_DISTINCT)? == Decidedness::NoModels),
    ];
    let two = f(theories::EXACTLY_TWO);
    let on = |n: usize| eval_so(&SoStructure::standard(structures::pure_set(n)), &two).map_err(|e| e.to_string());
    checks.push(("exactly-2 true on 2, false on 3", on(2)? && !on(3)?));
    let cat = categoricity_check(&f(theories::LINEAR_ORDER_3), &sizes, 1 << 20).map_err(|e| e.to_string())?;
    checks.push((
        "3-linear-order categorical",
        cat.verdict == Categoricity::Categorical && cat.models_by_size == BTreeMap::from([(3, 1)]),
    ));
    let lin = categoricity_check(&f(theories::LINEAR_ORDER), &[2, 3], 1 << 20).map_err(|e| e.to_string())?;
    checks.push(("linear order on 2..3 not categorical", lin.verdict == Categoricity::NotCategorical));
    let comp = f(theories::COMPREHENSION);
    let base = structures::pure_set(2).with("P", 1, &[&[0]]);
    let family = BTreeMap::from([(1, vec![BTreeSet::new(), BTreeSet::from([vec![1]])])]);
    let standard = eval_so(&SoStructure::standard(base.clone()), &comp).map_err(|e| e.to_string())?;
    let henkin =
        eval_so(&SoStructure::henkin(base, family).map_err(|e| e.to_string())?, &comp).map_err(|e| e.to_string())?;
    checks.push(("comprehension demo standard true, Henkin false", standard && !henkin));
    let div = categoricity_check(&comp, &[1, 2, 3], 1 << 20).map_err(|e| e.to_string())?;
    checks.push(("comprehension report shows mode divergence", div.divergences > 0));
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(outcome(
        failed.is_empty(),
        format!("{}/{} verdicts as listed {failed:?}", checks.len() - failed.len(), checks.len()),
    ))
}

fn interpretability() -> Result<Outcome, String> {
    const BOUND: usize = 4;
    let lo = structures::linear_order(3);
    let iso = lo.permuted(&[2, 0, 1]);
    let cases = [
        ("order over set", fund(&lo, &structures::pure_set(3), BOUND, 1 << 20), FundVerdict::Fund),
        ("order over isomorphic copy", fund(&lo, &iso, BOUND, 1 << 20), FundVerdict::NotFund),
        ("starved budget", fund(&lo, &iso, BOUND, 1), FundVerdict::Inconclusive),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, r, want) in cases {
        let got = r.map_err(|e| e.to_string())?.verdict;
        ok &= got == want;
        notes.push(format!("{name}: {got:?}"));
    }
    Ok(outcome(ok, notes.join("; ")))
}

fn heredity() -> Result<Outcome, String> {
    let letters = ["p", "q", "r"];
    let mut r = rng(0x4e7ed);
    let formulas: Vec<Formula> = (0..100)
        .map(|_| {
            let c = r.gen_range(0..8);
            prop_formula(&mut r, &letters, c)
        })
        .collect();
    let subs: Vec<Formula> = formulas
        .iter()
        .flat_map(subformulas)
        .map(|g| (g.to_string(), g))
        .collect::<BTreeMap<_, _>>()
        .into_values()
        .collect();
    let (mut checks, mut bad) = (0u64, Vec::new());
    for _ in 0..1000 {
        let k = random_kripke(&mut r, &letters, 4);
        for phi in &subs {
            let at: Vec<bool> = (0..k.worlds())
                .map(|w| kripke_eval(&k, w, phi))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for w in 0..k.worlds() {
                for v in 0..k.worlds() {
                    if k.le(w, v) {
                        checks += 1;
                        if at[w] && !at[v] {
                            bad.push(format!("{phi} at {w} not {v}"));
                        }
                    }
                }
            }
        }
    }
    Ok(outcome(
        bad.is_empty(),
        format!(
            "{checks} world pairs over {} distinct subformulas, {} failures {}",
            subs.len(),
            bad.len(),
            bad.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "flagship derivations and neggmp corruption", target: secs(5), run: flagship },
        Criterion { id: 2, name: "decidability generator", target: secs(30), run: decidability },
        Criterion { id: 3, name: "propositional squeeze", target: secs(120), run: prop_squeeze },
        Criterion { id: 4, name: "monadic squeeze with DNE-free control", target: secs(600), run: monadic_squeeze },
        Criterion { id: 5, name: "intuitionistic layer", target: secs(60), run: intuitionistic },
        Criterion { id: 6, name: "semantic soundness of kernel theorems", target: None, run: soundness },
        Criterion { id: 7, name: "decidedness and categoricity", target: secs(60), run: decidedness },
        Criterion { id: 8, name: "interpretability", target: secs(300), run: interpretability },
        Criterion { id: 9, name: "Kripke heredity", target: None, run: heredity },
    ];
    let strict = std::env::var_os("LOGICBENCH_STRICT").is_some();
    let mut fatal = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.target.is_none_or(|t| elapsed <= t);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let target = c.target.map_or(String::new(), |t| format!(" / < {} s", t.as_secs()));
        let blocked = !pass && BLOCKED.contains(&c.id);
        println!(
            "{} {}. {} [{:.2} s{target}{}] {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over target" },
            if blocked { format!("(blocked, see ledger) {detail}") } else { detail }
        );
        if !pass && (strict || !blocked) {
            fatal += 1;
        }
    }
    if fatal == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
