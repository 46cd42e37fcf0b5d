//! Proof scripts shipped with the crate.

use once_cell::sync::Lazy;

use super::check::LemmaEnv;
use super::elab::Session;

/// Embedded scripts by file name, in dependency order.
pub const SCRIPTS: &[(&str, &str)] = &[
    ("arith.prf", include_str!("../../../../proofs/arith.prf")),
    ("seq.prf", include_str!("../../../../proofs/seq.prf")),
    ("negglem.prf", include_str!("../../../../proofs/negglem.prf")),
    ("neggmp.prf", include_str!("../../../../proofs/neggmp.prf")),
    ("gmp_conditional.prf", include_str!("../../../../proofs/gmp_conditional.prf")),
    ("wks_iff_cs.prf", include_str!("../../../../proofs/wks_iff_cs.prf")),
    ("sks_iff_scs2.prf", include_str!("../../../../proofs/sks_iff_scs2.prf")),
];

pub fn embedded(name: &str) -> Option<&'static str> {
    SCRIPTS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

static PRELUDE: Lazy<LemmaEnv> = Lazy::new(|| {
    let mut s = Session::default();
    if let Err(e) = s.run(embedded("arith.prf").expect("arith.prf"), "arith.prf", &|n| embedded(n).map(str::to_string))
    {
        panic!("arithmetic prelude does not check: {e}");
    }
    s.lemmas
});

/// Lemmas of `arith.prf`.
pub fn prelude() -> &'static LemmaEnv {
    &PRELUDE
}

/// A session with the arithmetic prelude loaded.
pub fn session() -> Session {
    let mut s = Session::new(prelude().clone());
    s.mark_loaded("arith.prf");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check, derive_decidability};
    use crate::syntax::parse_formula;

    #[test]
    fn prelude_checks() {
        let env = prelude();
        for name in ["eq_dec", "lt_dec", "add_comm", "zero_or_succ"] {
            assert!(env.get(name).is_some(), "{name}");
        }
    }

    #[test]
    fn shipped_scripts_check() {
        let mut s = session();
        for (name, text) in SCRIPTS.iter().skip(1) {
            s.run(text, name, &|n| embedded(n).map(str::to_string)).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn decidability_proofs_check() {
        for src in ["x = y", "all z < x. z < y | z = 0", "ex z < S(x). z + z = x", "b(x) = 0 -> all y < x. b(y) != 1"] {
            let a = parse_formula(src).unwrap();
            let p = derive_decidability(&a).unwrap();
            check(&p, &p.theory).unwrap_or_else(|e| panic!("{src}: {e}"));
        }
    }
}
