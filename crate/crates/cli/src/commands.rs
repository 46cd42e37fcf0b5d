use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};

use logicbench::derivations::{check_all, Catalog, CatalogError, EntryOutcome, Sources};
use logicbench::experiments::{
    categoricity_check, decided_by, fund, theories, DecidednessQuery, ExpError, FundVerdict, ReportHeader,
    SqueezeConfig,
};
use logicbench::kernel::{check, library, ScriptFailure};
use logicbench::prover::{
    check_certificate, ipc_decide, prop_complete, tableau_prove, Certificate, Countermodel, IpcBudget, PropResult,
    ProverError, TableauBudget, Verdict,
};
use logicbench::semantics::{
    enumerate_structures, eval_fo, eval_so, kripke_eval, Assignment, EnumOptions, FiniteStructure, KripkeModel,
    SemError, Signature, SoStructure, Tuple, DEFAULT_STRUCTURE_BUDGET,
};
use logicbench::syntax::{is_propositional, parse_formula};
use logicbench::Formula;
use serde_json::{json, Value};

use crate::{report, Cli, Command, Opts};

const OK: u8 = 0;
const REJECTED: u8 = 1;
const INPUT: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => INPUT,
            CliError::Budget(_) => BUDGET,
        }
    }
}

fn input(e: impl Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<SemError> for CliError {
    fn from(e: SemError) -> Self {
        match e {
            SemError::Budget(m) => CliError::Budget(m),
            e => input(e),
        }
    }
}

impl From<ProverError> for CliError {
    fn from(e: ProverError) -> Self {
        match e {
            ProverError::Budget(m) => CliError::Budget(m),
            e => input(e),
        }
    }
}

impl From<ExpError> for CliError {
    fn from(e: ExpError) -> Self {
        match e {
            ExpError::Budget(m) => CliError::Budget(m),
            ExpError::Prover(p) => p.into(),
            ExpError::Semantics(s) => s.into(),
            e => input(e),
        }
    }
}

/// A finished command: exit status, report header and report body.
struct Done {
    status: u8,
    header: ReportHeader,
    body: Value,
}

impl Done {
    fn new(status: u8, kind: &str, config: Value, body: Value) -> Done {
        Done { status, header: ReportHeader::new(kind, &config), body }
    }
}

pub fn run(cli: &Cli) -> u8 {
    let result = dispatch(&cli.cmd, &cli.opts);
    let status = match &result {
        Ok(d) => d.status,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    };
    if let (Some(path), Ok(d)) = (&cli.opts.report, &result) {
        if let Err(e) = report::append(path, &d.header, status, d.body.clone()) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return INPUT;
        }
    }
    status
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn formula(s: &str) -> Result<Formula, CliError> {
    parse_formula(s).map_err(|e| input(format!("formula: {e}")))
}

fn structure(path: &Path) -> Result<FiniteStructure, CliError> {
    FiniteStructure::parse(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_countermodel(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, opts: &Opts) -> Result<Done, CliError> {
    match cmd {
        Command::Check { files } => check_files(files),
        Command::Catalog { manifest, proofs, only } => catalog(manifest.as_deref(), proofs.as_deref(), only),
        Command::Prove { formula: f, countermodel } => prove(f, countermodel, opts),
        Command::Ipc { formula: f, countermodel } => ipc(f, countermodel, opts),
        Command::Eval { model, formula: f, kripke, world, henkin } => {
            eval(model, f, *kripke, *world, henkin.as_deref())
        }
        Command::Enumerate { signature, iso, list } => enumerate(signature, *iso, *list, opts),
        Command::Squeeze { manifest } => squeeze(manifest),
        Command::Decided { theory, phi } => decided(theory, phi, opts),
        Command::Categorical { theory } => categorical(theory, opts),
        Command::Interp { a, b } => interp(a, b, opts),
    }
}

fn check_files(files: &[PathBuf]) -> Result<Done, CliError> {
    if files.is_empty() {
        return Err(input("no proof files given"));
    }
    let mut status = OK;
    let mut results = Vec::new();
    for path in files {
        let text = read(path)?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let resolve =
            |f: &str| std::fs::read_to_string(dir.join(f)).ok().or_else(|| library::embedded(f).map(str::to_string));
        let mut session = library::session();
        match session.run(&text, &name, &resolve) {
            Ok(()) => {
                let lemmas: Vec<Value> = session
                    .reports
                    .iter()
                    .filter(|r| r.file == name)
                    .map(|r| {
                        println!("{}: {} [{}] ok, {} kernel lines", path.display(), r.judgment.lemma, r.judgment.theory, r.judgment.lines);
                        json!({ "lemma": r.judgment.lemma, "theory": r.judgment.theory, "goal": r.judgment.goal, "lines": r.judgment.lines })
                    })
                    .collect();
                results.push(json!({ "file": path.display().to_string(), "accepted": true, "lemmas": lemmas }));
            }
            Err(failure) => {
                let (code, line) = match &failure {
                    ScriptFailure::Parse(e) => (INPUT, Some(e.line)),
                    ScriptFailure::Check(e) => (REJECTED, e.src_line),
                };
                let at = line.map_or(String::new(), |l| format!("{l}:"));
                eprintln!("{}:{at} {failure}", path.display());
                status = status.max(code);
                results.push(json!({ "file": path.display().to_string(), "accepted": false, "line": line, "error": failure.to_string() }));
            }
        }
    }
    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    Ok(Done::new(status, "check", json!({ "files": files }), json!(results)))
}

fn catalog(manifest: Option<&Path>, proofs: Option<&Path>, only: &[String]) -> Result<Done, CliError> {
    let mut cat = match manifest {
        Some(p) => Catalog::from_toml(&read(p)?).map_err(input)?,
        None => Catalog::builtin(),
    };
    if !only.is_empty() {
        let ids: Vec<&str> = only.iter().map(String::as_str).collect();
        cat = cat.only(&ids);
    }
    let sources = proofs.map_or_else(Sources::embedded, Sources::dir);
    let config = json!({ "manifest": manifest.map(|p| p.display().to_string()), "proofs": proofs.map(|p| p.display().to_string()), "only": only });
    match check_all(&cat, &sources) {
        Ok(r) => {
            for e in &r.entries {
                match &e.outcome {
                    EntryOutcome::Accepted => println!(
                        "{}: accepted ({} script lines, {} kernel lines)",
                        e.id, e.script_lines, e.kernel_lines
                    ),
                    EntryOutcome::Rejected { reason } => println!("{}: rejected (optional): {reason}", e.id),
                }
            }
            Ok(Done::new(OK, "catalog", config, serde_json::to_value(&r).map_err(input)?))
        }
        Err(e @ CatalogError::Manifest(_)) => Err(input(e)),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(Done::new(REJECTED, "catalog", config, json!({ "error": e.to_string() })))
        }
    }
}

fn prove(src: &str, countermodel: &Option<PathBuf>, opts: &Opts) -> Result<Done, CliError> {
    let phi = formula(src)?;
    if !phi.is_closed() {
        return Err(input(format!("{phi} has free variables")));
    }
    let defaults = TableauBudget::default();
    let budget = TableauBudget { max_terms: opts.budget_terms.map_or(defaults.max_terms, |t| t as usize), ..defaults };
    let config = json!({ "formula": phi.to_string(), "max_terms": budget.max_terms, "max_steps": budget.max_steps });
    if is_propositional(&phi) {
        return match prop_complete(&phi)? {
            PropResult::Proof(p) => {
                check(&p, "Classical").map_err(|e| input(format!("synthesized proof rejected: {e}")))?;
                println!("proved: {} kernel lines in Classical", p.lines.len());
                Ok(Done::new(
                    OK,
                    "prove",
                    config,
                    json!({ "verdict": "proved", "method": "truth-table synthesis", "lines": p.lines.len() }),
                ))
            }
            PropResult::Falsifying(v) => {
                let text: String = v.iter().map(|(k, b)| format!("{k} = {}\n", u8::from(*b))).collect();
                println!("refuted by the valuation\n{text}");
                write_countermodel(countermodel, &text)?;
                Ok(Done::new(REJECTED, "prove", config, json!({ "verdict": "refuted", "valuation": v })))
            }
        };
    }
    match tableau_prove(&phi, budget)? {
        Verdict::Proved(Certificate::Tableau(c)) => {
            check_certificate(&phi, &c.root).map_err(|e| input(format!("certificate replay failed: {e}")))?;
            println!("proved: closed tableau with {} nodes, replayed", c.root.size());
            Ok(Done::new(OK, "prove", config, json!({ "verdict": "proved", "certificate": c })))
        }
        Verdict::Proved(Certificate::Proof(p)) => {
            check(&p, "Classical").map_err(|e| input(format!("proof rejected: {e}")))?;
            println!("proved: {} kernel lines", p.lines.len());
            Ok(Done::new(OK, "prove", config, json!({ "verdict": "proved", "lines": p.lines.len() })))
        }
        Verdict::Refuted(cm) => {
            let text = match &cm {
                Countermodel::Structure(m) => m.to_string(),
                Countermodel::Kripke(k) => k.to_string(),
                Countermodel::Valuation(v) => v.iter().map(|(k, b)| format!("{k} = {}\n", u8::from(*b))).collect(),
            };
            println!("refuted; countermodel:\n{text}");
            write_countermodel(countermodel, &text)?;
            Ok(Done::new(REJECTED, "prove", config, json!({ "verdict": "refuted", "countermodel": text })))
        }
        Verdict::Exhausted(why) => {
            println!("undecided: {why}");
            Ok(Done::new(BUDGET, "prove", config, json!({ "verdict": "exhausted", "reason": why })))
        }
    }
}

fn ipc(src: &str, countermodel: &Option<PathBuf>, opts: &Opts) -> Result<Done, CliError> {
    let phi = formula(src)?;
    let defaults = IpcBudget::default();
    let budget = IpcBudget {
        search_steps: opts.budget_terms.unwrap_or(defaults.search_steps),
        max_worlds: opts.max_size.map_or(defaults.max_worlds, |n| n as usize),
    };
    let config =
        json!({ "formula": phi.to_string(), "search_steps": budget.search_steps, "max_worlds": budget.max_worlds });
    let d = ipc_decide(&phi, budget)?;
    match d.verdict {
        Verdict::Proved(Certificate::Proof(p)) => {
            println!("derivable: {} kernel lines in Logic", p.lines.len());
            Ok(Done::new(
                OK,
                "ipc",
                config,
                json!({ "verdict": "proved", "lines": p.lines.len(), "script": p.to_script() }),
            ))
        }
        Verdict::Refuted(Countermodel::Kripke(k)) => {
            let text = k.to_string();
            println!("not derivable; Kripke countermodel:\n{text}");
            write_countermodel(countermodel, &text)?;
            Ok(Done::new(REJECTED, "ipc", config, json!({ "verdict": "refuted", "countermodel": text })))
        }
        v => {
            println!("undecided: {} (search says derivable = {})", v.label(), d.derivable);
            Ok(Done::new(BUDGET, "ipc", config, json!({ "verdict": v.label(), "derivable": d.derivable })))
        }
    }
}

fn second_order(f: &Formula) -> bool {
    match f {
        Formula::SoAll(..) | Formula::SoEx(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => second_order(a) || second_order(b),
        Formula::All(_, a) | Formula::Ex(_, a) | Formula::Box(_, a) => second_order(a),
        _ => false,
    }
}

/// Parses a Henkin family: one `set K = TUPLES` line per relation of arity K.
fn henkin_family(text: &str, n: usize) -> Result<BTreeMap<usize, Vec<BTreeSet<Tuple>>>, CliError> {
    let mut family: BTreeMap<usize, Vec<BTreeSet<Tuple>>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |m: &str| input(format!("henkin family line {}: {m}", i + 1));
        let rest = line.strip_prefix("set ").ok_or_else(|| at("expected `set ARITY = TUPLES`"))?;
        let (k, body) = rest.split_once('=').ok_or_else(|| at("missing `=`"))?;
        let k: usize = k.trim().parse().map_err(|_| at("bad arity"))?;
        let mut set = BTreeSet::new();
        for tok in body.split(')').map(|t| t.trim().trim_start_matches('(')).filter(|t| !t.is_empty()) {
            for group in if k == 1 { tok.split_whitespace().collect::<Vec<_>>() } else { vec![tok] } {
                let t: Tuple = group
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| at("bad element"))?;
                if t.len() != k || t.iter().any(|&a| a >= n) {
                    return Err(at("tuple has the wrong arity or leaves the domain"));
                }
                set.insert(t);
            }
        }
        family.entry(k).or_default().push(set);
    }
    Ok(family)
}

fn eval(model: &Path, src: &str, kripke: bool, world: usize, henkin: Option<&Path>) -> Result<Done, CliError> {
    let phi = formula(src)?;
    let text = read(model)?;
    let (value, mode) = if kripke {
        let k = KripkeModel::parse(&text).map_err(|e| input(format!("{}: {e}", model.display())))?;
        (kripke_eval(&k, world, &phi)?, "kripke")
    } else {
        let m = FiniteStructure::parse(&text).map_err(|e| input(format!("{}: {e}", model.display())))?;
        match henkin {
            Some(h) => {
                let family = henkin_family(&read(h)?, m.size)?;
                (eval_so(&SoStructure::henkin(m, family)?, &phi)?, "henkin")
            }
            None if second_order(&phi) => (eval_so(&SoStructure::standard(m), &phi)?, "standard"),
            None => (eval_fo(&m, &phi, &Assignment::new())?, "first-order"),
        }
    };
    println!("{value}");
    let config = json!({ "model": text, "formula": phi.to_string(), "mode": mode, "world": world });
    Ok(Done::new(OK, "eval", config, json!({ "value": value, "mode": mode })))
}

fn enumerate(sig_src: &str, iso: bool, list: bool, opts: &Opts) -> Result<Done, CliError> {
    let mut sig = Signature::new();
    for part in sig_src.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, k) = part.split_once('/').ok_or_else(|| input(format!("expected NAME/ARITY, got `{part}`")))?;
        let k: usize = k.parse().map_err(|_| input(format!("bad arity in `{part}`")))?;
        sig.insert(name.to_string(), k);
    }
    let max = opts.max_size.unwrap_or(3) as usize;
    let budget = opts.budget_structures.unwrap_or(DEFAULT_STRUCTURE_BUDGET);
    let mut counts = BTreeMap::new();
    for n in 1..=max {
        let all = enumerate_structures(&sig, n, EnumOptions { budget, iso_filter: iso })?;
        println!("size {n}: {}", all.len());
        if list {
            for m in &all {
                println!("{m}");
            }
        }
        counts.insert(n, all.len());
    }
    let config = json!({ "signature": sig, "max_size": max, "iso": iso, "budget": budget });
    Ok(Done::new(OK, "enumerate", config, json!({ "counts": counts })))
}

fn squeeze(manifest: &Path) -> Result<Done, CliError> {
    let cfg = SqueezeConfig::from_toml(&read(manifest)?)?;
    let r = logicbench::experiments::squeeze_run(&cfg)?;
    println!(
        "{}: {} formulas (exhaustive: {}), narrow yes {}, wide yes {}, {} violations, full squeeze: {}",
        cfg.name,
        r.enumerated,
        r.exhaustive,
        r.narrow_yes,
        r.wide_yes,
        r.violations.len(),
        r.full_squeeze
    );
    for v in r.violations.iter().take(10) {
        println!("  #{} {:?}: {}\n    {}", v.index, v.kind, v.formula, v.detail.replace('\n', "\n    "));
    }
    let status = if !r.violations.is_empty() {
        REJECTED
    } else if !r.exhaustive {
        BUDGET
    } else {
        OK
    };
    Ok(Done { status, header: r.header.clone(), body: serde_json::to_value(&r).map_err(input)? })
}

fn theory(src: &str) -> Result<Formula, CliError> {
    let named = match src {
        "exactly-two" => theories::EXACTLY_TWO,
        "two-distinct" => theories::TWO_DISTINCT,
        "three-distinct" => theories::THREE_DISTINCT,
        "linear-order" => theories::LINEAR_ORDER,
        "linear-order-3" => theories::LINEAR_ORDER_3,
        "comprehension" => theories::COMPREHENSION,
        "unsatisfiable" => theories::UNSATISFIABLE,
        other => other,
    };
    formula(named)
}

fn sizes(opts: &Opts) -> Vec<usize> {
    (1..=opts.max_size.unwrap_or(4) as usize).collect()
}

fn decided(tau2: &str, phi: &str, opts: &Opts) -> Result<Done, CliError> {
    let q = DecidednessQuery { tau2: theory(tau2)?, phi: theory(phi)?, sizes: sizes(opts) };
    let r = decided_by(&q, opts.budget_structures.unwrap_or(1 << 20))?;
    let body = serde_json::to_value(&r).map_err(input)?;
    println!("{}", body["verdict"]["verdict"].as_str().unwrap_or("?"));
    Ok(Done { status: OK, header: r.header.clone(), body })
}

fn categorical(tau2: &str, opts: &Opts) -> Result<Done, CliError> {
    let r = categoricity_check(&theory(tau2)?, &sizes(opts), opts.budget_structures.unwrap_or(1 << 20))?;
    let body = serde_json::to_value(&r).map_err(input)?;
    println!(
        "{}; models by size {:?}; standard/Henkin divergences {}",
        body["verdict"].as_str().unwrap_or("?"),
        r.models_by_size,
        r.divergences
    );
    if let Some((a, b)) = &r.counterexample {
        println!("non-isomorphic models:\n{a}\n{b}");
    }
    Ok(Done { status: OK, header: r.header.clone(), body })
}

fn interp(a: &Path, b: &Path, opts: &Opts) -> Result<Done, CliError> {
    let (a, b) = (structure(a)?, structure(b)?);
    let bound = opts.max_size.unwrap_or(4) as usize;
    let r = fund(&a, &b, bound, opts.budget_terms.unwrap_or(1 << 20))?;
    println!("{:?}: {}", r.verdict, r.reason);
    let status = if r.verdict == FundVerdict::Inconclusive { BUDGET } else { OK };
    Ok(Done { status, header: r.header.clone(), body: serde_json::to_value(&r).map_err(input)? })
}
