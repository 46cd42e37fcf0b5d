//! Propositional Kripke models and intuitionistic forcing.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::Formula;

use super::SemError;

/// A finite partial order of worlds with a monotone valuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    worlds: usize,
    /// `le[w][v]` iff w <= v. Reflexive, transitive, antisymmetric.
    le: Vec<Vec<bool>>,
    /// Letters true at each world.
    val: Vec<BTreeSet<String>>,
    letters: BTreeSet<String>,
}

impl KripkeModel {
    /// Builds a model from generating order pairs (closed reflexively and
    /// transitively) and per-world true letters.
    pub fn new(
        worlds: usize,
        order: &[(usize, usize)],
        letters: impl IntoIterator<Item = String>,
        val: Vec<BTreeSet<String>>,
    ) -> Result<KripkeModel, SemError> {
        if worlds == 0 {
            return Err(SemError::Structure("a Kripke model needs a world".into()));
        }
        if val.len() != worlds {
            return Err(SemError::Structure(format!("{} valuations for {worlds} worlds", val.len())));
        }
        let mut le = vec![vec![false; worlds]; worlds];
        for (w, row) in le.iter_mut().enumerate() {
            row[w] = true;
        }
        for &(a, b) in order {
            if a >= worlds || b >= worlds {
                return Err(SemError::UnknownWorld(a.max(b)));
            }
            le[a][b] = true;
        }
        for k in 0..worlds {
            for i in 0..worlds {
                for j in 0..worlds {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        Self::from_order(le, letters.into_iter().collect(), val)
    }

    fn from_order(
        le: Vec<Vec<bool>>,
        letters: BTreeSet<String>,
        val: Vec<BTreeSet<String>>,
    ) -> Result<KripkeModel, SemError> {
        let worlds = le.len();
        for i in 0..worlds {
            for j in 0..worlds {
                if i != j && le[i][j] && le[j][i] {
                    return Err(SemError::Structure(format!("worlds {i} and {j} are mutually below each other")));
                }
            }
        }
        for (w, vs) in val.iter().enumerate() {
            if let Some(p) = vs.iter().find(|p| !letters.contains(*p)) {
                return Err(SemError::Signature(format!("world {w} makes undeclared letter {p} true")));
            }
            for v in 0..worlds {
                if le[w][v] && !vs.is_subset(&val[v]) {
                    return Err(SemError::Structure(format!("valuation is not monotone from world {w} to {v}")));
                }
            }
        }
        Ok(KripkeModel { worlds, le, val, letters })
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn le(&self, w: usize, v: usize) -> bool {
        self.le[w][v]
    }

    pub fn letters(&self) -> &BTreeSet<String> {
        &self.letters
    }

    pub fn true_at(&self, w: usize) -> &BTreeSet<String> {
        &self.val[w]
    }

    /// Parses the format written by `Display`:
    ///
    /// ```text
    /// worlds 2
    /// letters p q
    /// le 0 1
    /// force 1 p
    /// ```
    pub fn parse(text: &str) -> Result<KripkeModel, SemError> {
        let mut worlds = None;
        let mut letters = BTreeSet::new();
        let mut order = Vec::new();
        let mut forced: Vec<(usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| SemError::Format { line: i + 1, msg };
            let num = |s: &str| s.parse::<usize>().map_err(|e| at(format!("`{s}`: {e}")));
            let mut words = line.split_whitespace();
            match words.next() {
                Some("worlds") => worlds = Some(num(words.next().unwrap_or(""))?),
                Some("letters") => letters.extend(words.map(str::to_string)),
                Some("le") => {
                    let a = num(words.next().unwrap_or(""))?;
                    let b = num(words.next().unwrap_or(""))?;
                    order.push((a, b));
                }
                Some("force") => {
                    let w = num(words.next().unwrap_or(""))?;
                    forced.extend(words.map(|p| (w, p.to_string())));
                }
                _ => return Err(at(format!("unrecognized line `{line}`"))),
            }
        }
        let n = worlds.ok_or(SemError::Format { line: 0, msg: "missing `worlds N`".into() })?;
        let mut val = vec![BTreeSet::new(); n];
        for (w, p) in forced {
            val.get_mut(w).ok_or(SemError::UnknownWorld(w))?.insert(p);
        }
        KripkeModel::new(n, &order, letters, val)
    }
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "worlds {}", self.worlds)?;
        if !self.letters.is_empty() {
            writeln!(f, "letters {}", self.letters.iter().cloned().collect::<Vec<_>>().join(" "))?;
        }
        for w in 0..self.worlds {
            for v in 0..self.worlds {
                if w != v && self.le[w][v] {
                    writeln!(f, "le {w} {v}")?;
                }
            }
        }
        for (w, vs) in self.val.iter().enumerate() {
            if !vs.is_empty() {
                writeln!(f, "force {w} {}", vs.iter().cloned().collect::<Vec<_>>().join(" "))?;
            }
        }
        Ok(())
    }
}

fn forces(k: &KripkeModel, w: usize, phi: &Formula) -> Result<bool, SemError> {
    Ok(match phi {
        Formula::Bot => false,
        Formula::Pred(p, args) if args.is_empty() => {
            if !k.letters.contains(&**p) {
                return Err(SemError::Signature(format!("letter {p} has no valuation")));
            }
            k.val[w].contains(&**p)
        }
        Formula::And(a, b) => forces(k, w, a)? && forces(k, w, b)?,
        Formula::Or(a, b) => forces(k, w, a)? || forces(k, w, b)?,
        Formula::Imp(a, b) => {
            for v in (0..k.worlds).filter(|&v| k.le[w][v]) {
                if forces(k, v, a)? && !forces(k, v, b)? {
                    return Ok(false);
                }
            }
            true
        }
        other => return Err(SemError::Unsupported(format!("{other} is not propositional"))),
    })
}

/// Whether world `w` forces the propositional formula `phi`.
pub fn kripke_eval(k: &KripkeModel, w: usize, phi: &Formula) -> Result<bool, SemError> {
    if w >= k.worlds {
        return Err(SemError::UnknownWorld(w));
    }
    forces(k, w, phi)
}

/// Partial orders on `0..n` with least element 0 whose order is contained in
/// the index order. Every finite rooted frame is isomorphic to one of these.
pub fn rooted_frames(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for bits in 0u64..1 << pairs.len() {
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            le[i][i] = true;
            le[0][i] = true;
        }
        for (b, &(i, j)) in pairs.iter().enumerate() {
            le[i][j] = bits >> b & 1 == 1;
        }
        let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(le[i][j] && le[j][k]) || le[i][k])));
        if transitive {
            out.push(le);
        }
    }
    out
}

fn up_sets(le: &[Vec<bool>]) -> Vec<BTreeSet<usize>> {
    let n = le.len();
    (0u64..1 << n)
        .map(|bits| (0..n).filter(|i| bits >> i & 1 == 1).collect::<BTreeSet<usize>>())
        .filter(|s| s.iter().all(|&w| (0..n).all(|v| !le[w][v] || s.contains(&v))))
        .collect()
}

/// Every rooted model over `letters` with at most `max_worlds` worlds,
/// smallest first.
pub fn enumerate_models(letters: &[String], max_worlds: usize) -> impl Iterator<Item = KripkeModel> + '_ {
    (1..=max_worlds).flat_map(move |n| {
        rooted_frames(n).into_iter().flat_map(move |le| {
            let ups = up_sets(&le);
            let total = ups.len().pow(letters.len() as u32);
            (0..total).map(move |mut code| {
                let mut val = vec![BTreeSet::new(); n];
                for p in letters {
                    let s = &ups[code % ups.len()];
                    code /= ups.len();
                    for &w in s {
                        val[w].insert(p.clone());
                    }
                }
                KripkeModel::from_order(le.clone(), letters.iter().cloned().collect(), val)
                    .expect("monotone by construction")
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn chain_p_at_top() -> KripkeModel {
        KripkeModel::new(2, &[(0, 1)], ["p".to_string()], vec![BTreeSet::new(), BTreeSet::from(["p".to_string()])])
            .unwrap()
    }

    #[test]
    fn single_world_is_classical() {
        let k = KripkeModel::new(1, &[], ["p".to_string()], vec![BTreeSet::from(["p".to_string()])]).unwrap();
        assert!(kripke_eval(&k, 0, &f("p | ~p")).unwrap());
    }

    #[test]
    fn two_chain_refutes_excluded_middle() {
        let k = chain_p_at_top();
        assert!(!kripke_eval(&k, 0, &f("p | ~p")).unwrap());
        assert!(!kripke_eval(&k, 0, &f("~~p -> p")).unwrap());
        assert!(kripke_eval(&k, 1, &f("p | ~p")).unwrap());
    }

    #[test]
    fn double_negated_excluded_middle_everywhere() {
        let letters = vec!["p".to_string()];
        let phi = f("~~(p | ~p)");
        let mut count = 0;
        for k in enumerate_models(&letters, 3) {
            for w in 0..k.worlds() {
                assert!(kripke_eval(&k, w, &phi).unwrap());
            }
            count += 1;
        }
        assert!(count > 10);
    }

    #[test]
    fn frame_counts() {
        assert_eq!(rooted_frames(1).len(), 1);
        assert_eq!(rooted_frames(2).len(), 1);
        assert_eq!(rooted_frames(3).len(), 2);
        assert_eq!(rooted_frames(4).len(), 7);
    }

    #[test]
    fn validation_and_round_trip() {
        assert!(KripkeModel::new(
            2,
            &[(0, 1)],
            ["p".to_string()],
            vec![BTreeSet::from(["p".to_string()]), BTreeSet::new()]
        )
        .is_err());
        assert!(KripkeModel::new(2, &[(0, 1), (1, 0)], [], vec![BTreeSet::new(), BTreeSet::new()]).is_err());
        let k = chain_p_at_top();
        assert_eq!(KripkeModel::parse(&k.to_string()).unwrap(), k);
        assert!(matches!(kripke_eval(&k, 5, &f("p")), Err(SemError::UnknownWorld(5))));
        assert!(kripke_eval(&k, 0, &f("q")).is_err());
    }
}
