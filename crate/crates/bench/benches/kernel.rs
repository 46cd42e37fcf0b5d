use criterion::{black_box, criterion_group, criterion_main, Criterion};
use logicbench::derivations::{check_all, Catalog, Sources};
use logicbench::kernel::{check, derive_decidability};
use logicbench::prover::{ipc_decide, prop_complete, tableau_prove, IpcBudget, TableauBudget};
use logicbench::syntax::parse_formula;

fn catalog(c: &mut Criterion) {
    let cat = Catalog::builtin().only(&["neggmp"]);
    c.bench_function("check_all neggmp", |b| b.iter(|| check_all(black_box(&cat), &Sources::embedded()).unwrap()));
}

fn decidability(c: &mut Criterion) {
    let a = parse_formula("all z < x. (ex w < z. b(w) = z) | z * z < y").unwrap();
    c.bench_function("derive_decidability", |b| b.iter(|| derive_decidability(black_box(&a)).unwrap()));
    let p = derive_decidability(&a).unwrap();
    let theory = p.theory.to_string();
    c.bench_function("check decidability proof", |b| b.iter(|| check(black_box(&p), &theory).unwrap()));
}

fn provers(c: &mut Criterion) {
    let peirce = parse_formula("((p -> q) -> p) -> p").unwrap();
    c.bench_function("prop_complete peirce", |b| b.iter(|| prop_complete(black_box(&peirce)).unwrap()));
    let dn = parse_formula("~~(p | ~p)").unwrap();
    c.bench_function("ipc_decide ~~(p | ~p)", |b| b.iter(|| ipc_decide(black_box(&dn), IpcBudget::default()).unwrap()));
    let drinker = parse_formula("ex x:obj. P(x) -> all y:obj. P(y)").unwrap();
    c.bench_function("tableau drinker", |b| {
        b.iter(|| tableau_prove(black_box(&drinker), TableauBudget::default()).unwrap())
    });
}

criterion_group!(benches, catalog, decidability, provers);
criterion_main!(benches);
