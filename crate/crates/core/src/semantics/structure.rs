use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SemError;

/// Relation symbols and their arities.
pub type Signature = BTreeMap<String, usize>;

pub type Tuple = Vec<usize>;

/// Dense extension table of one relation over a domain of size `n`.
/// Tuple `(a1, ..., ak)` sits at index `a1 * n^(k-1) + ... + ak`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub arity: usize,
    pub table: Vec<bool>,
}

pub(crate) fn index_of(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &a| acc * n + a)
}

pub(crate) fn tuple_at(n: usize, arity: usize, mut i: usize) -> Tuple {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = i % n;
        i /= n;
    }
    t
}

impl Relation {
    pub fn empty(n: usize, arity: usize) -> Relation {
        Relation { arity, table: vec![false; n.pow(arity as u32)] }
    }

    pub fn from_tuples(n: usize, arity: usize, tuples: impl IntoIterator<Item = Tuple>) -> Result<Relation, SemError> {
        let mut r = Relation::empty(n, arity);
        for t in tuples {
            if t.len() != arity {
                return Err(SemError::Structure(format!("tuple {t:?} does not have arity {arity}")));
            }
            if let Some(a) = t.iter().find(|&&a| a >= n) {
                return Err(SemError::Structure(format!("element {a} is outside the domain 0..{n}")));
            }
            r.table[index_of(n, &t)] = true;
        }
        Ok(r)
    }

    pub fn holds(&self, n: usize, t: &[usize]) -> bool {
        self.table[index_of(n, t)]
    }

    pub fn tuples(&self, n: usize) -> impl Iterator<Item = Tuple> + '_ {
        let arity = self.arity;
        self.table.iter().enumerate().filter(|(_, b)| **b).map(move |(i, _)| tuple_at(n, arity, i))
    }
}

/// A finite relational structure on the domain `0..size`, with optional
/// named constants. Free variables of a formula that are not assigned are
/// read as constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Repr", try_from = "Repr")]
pub struct FiniteStructure {
    pub size: usize,
    pub relations: BTreeMap<String, Relation>,
    pub constants: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    size: usize,
    relations: BTreeMap<String, RelRepr>,
    #[serde(default)]
    constants: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RelRepr {
    arity: usize,
    tuples: Vec<Tuple>,
}

impl From<FiniteStructure> for Repr {
    fn from(s: FiniteStructure) -> Repr {
        let relations = s
            .relations
            .iter()
            .map(|(k, r)| (k.clone(), RelRepr { arity: r.arity, tuples: r.tuples(s.size).collect() }))
            .collect();
        Repr { size: s.size, relations, constants: s.constants }
    }
}

impl TryFrom<Repr> for FiniteStructure {
    type Error = SemError;
    fn try_from(r: Repr) -> Result<FiniteStructure, SemError> {
        let mut s = FiniteStructure::new(r.size)?;
        for (name, rel) in r.relations {
            s.add_relation(&name, rel.arity, rel.tuples)?;
        }
        for (name, c) in r.constants {
            s.add_constant(&name, c)?;
        }
        Ok(s)
    }
}

impl FiniteStructure {
    pub fn new(size: usize) -> Result<FiniteStructure, SemError> {
        if size == 0 {
            return Err(SemError::Structure("domains are nonempty".into()));
        }
        Ok(FiniteStructure { size, relations: BTreeMap::new(), constants: BTreeMap::new() })
    }

    pub fn add_relation(
        &mut self,
        name: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Tuple>,
    ) -> Result<&mut Self, SemError> {
        let r = Relation::from_tuples(self.size, arity, tuples)?;
        self.relations.insert(name.to_string(), r);
        Ok(self)
    }

    pub fn add_constant(&mut self, name: &str, value: usize) -> Result<&mut Self, SemError> {
        if value >= self.size {
            return Err(SemError::Structure(format!("constant {name} = {value} is outside the domain")));
        }
        self.constants.insert(name.to_string(), value);
        Ok(self)
    }

    /// Builder shorthand for tests and fixtures.
    pub fn with(mut self, name: &str, arity: usize, tuples: &[&[usize]]) -> FiniteStructure {
        self.add_relation(name, arity, tuples.iter().map(|t| t.to_vec())).expect("valid relation");
        self
    }

    pub fn signature(&self) -> Signature {
        self.relations.iter().map(|(k, r)| (k.clone(), r.arity)).collect()
    }

    pub fn holds(&self, rel: &str, t: &[usize]) -> bool {
        self.relations.get(rel).is_some_and(|r| r.holds(self.size, t))
    }

    /// The structure with elements renamed by `perm` (element `i` becomes `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> FiniteStructure {
        let n = self.size;
        let relations = self
            .relations
            .iter()
            .map(|(k, r)| {
                let mut out = Relation::empty(n, r.arity);
                for t in r.tuples(n) {
                    let u: Tuple = t.iter().map(|&a| perm[a]).collect();
                    out.table[index_of(n, &u)] = true;
                }
                (k.clone(), out)
            })
            .collect();
        let constants = self.constants.iter().map(|(k, &c)| (k.clone(), perm[c])).collect();
        FiniteStructure { size: n, relations, constants }
    }

    /// Parses the line format written by `Display`:
    ///
    /// ```text
    /// size 3
    /// rel E/2 = (0,1) (1,2) (2,0)
    /// rel P/1 = 0 2
    /// const c = 1
    /// ```
    pub fn parse(text: &str) -> Result<FiniteStructure, SemError> {
        let mut s: Option<FiniteStructure> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| SemError::Format { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix("size ") {
                let n = rest.trim().parse::<usize>().map_err(|e| at(e.to_string()))?;
                s = Some(FiniteStructure::new(n).map_err(|e| at(e.to_string()))?);
                continue;
            }
            let st = s.as_mut().ok_or_else(|| at("`size N` must come first".into()))?;
            if let Some(rest) = line.strip_prefix("rel ") {
                let (head, body) = rest.split_once('=').ok_or_else(|| at("expected `rel NAME/ARITY = ...`".into()))?;
                let (name, arity) = head.trim().split_once('/').ok_or_else(|| at("expected NAME/ARITY".into()))?;
                let arity = arity.trim().parse::<usize>().map_err(|e| at(e.to_string()))?;
                let tuples = parse_tuples(body, arity).map_err(at)?;
                st.add_relation(name.trim(), arity, tuples).map_err(|e| at(e.to_string()))?;
            } else if let Some(rest) = line.strip_prefix("const ") {
                let (name, v) = rest.split_once('=').ok_or_else(|| at("expected `const NAME = ELEMENT`".into()))?;
                let v = v.trim().parse::<usize>().map_err(|e| at(e.to_string()))?;
                st.add_constant(name.trim(), v).map_err(|e| at(e.to_string()))?;
            } else {
                return Err(at(format!("unrecognized line `{line}`")));
            }
        }
        s.ok_or(SemError::Format { line: 0, msg: "empty structure file".into() })
    }
}

fn parse_tuples(body: &str, arity: usize) -> Result<Vec<Tuple>, String> {
    let mut out = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('(') {
            let close = r.find(')').ok_or("unclosed tuple")?;
            let inner = r[..close].trim();
            let t: Result<Tuple, _> = if inner.is_empty() {
                Ok(vec![])
            } else {
                inner.split(',').map(|x| x.trim().parse::<usize>()).collect()
            };
            out.push(t.map_err(|e| e.to_string())?);
            rest = r[close + 1..].trim_start();
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let a = rest[..end].parse::<usize>().map_err(|e| format!("bad element `{}`: {e}", &rest[..end]))?;
            if arity != 1 {
                return Err(format!("bare element {a} in a relation of arity {arity}"));
            }
            out.push(vec![a]);
            rest = rest[end..].trim_start();
        }
    }
    Ok(out)
}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "size {}", self.size)?;
        for (name, r) in &self.relations {
            write!(f, "rel {name}/{} =", r.arity)?;
            for t in r.tuples(self.size) {
                let parts: Vec<String> = t.iter().map(|a| a.to_string()).collect();
                write!(f, " ({})", parts.join(","))?;
            }
            writeln!(f)?;
        }
        for (name, c) in &self.constants {
            writeln!(f, "const {name} = {c}")?;
        }
        Ok(())
    }
}

/// All distinct tuple sets, used when listing relation values explicitly.
pub fn all_relations(n: usize, arity: usize) -> Vec<BTreeSet<Tuple>> {
    let cells = n.pow(arity as u32);
    (0u64..1 << cells)
        .map(|bits| (0..cells).filter(|i| bits >> i & 1 == 1).map(|i| tuple_at(n, arity, i)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let s = FiniteStructure::new(3).unwrap().with("E", 2, &[&[0, 1], &[1, 2], &[2, 0]]).with("P", 1, &[&[2]]).with(
            "q",
            0,
            &[&[]],
        );
        let back = FiniteStructure::parse(&s.to_string()).unwrap();
        assert_eq!(back, s);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<FiniteStructure>(&json).unwrap(), s);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteStructure::parse("size 2\nrel P/1 = 5\n").is_err());
        assert!(FiniteStructure::parse("rel P/1 = 0\n").is_err());
        assert!(FiniteStructure::parse("size 2\nrel E/2 = 1\n").is_err());
        assert!(FiniteStructure::new(0).is_err());
        assert!(serde_json::from_str::<FiniteStructure>(r#"{"size":1,"relations":{"P":{"arity":1,"tuples":[[3]]}}}"#)
            .is_err());
    }

    #[test]
    fn tuple_indexing_is_a_bijection() {
        for i in 0..27 {
            assert_eq!(index_of(3, &tuple_at(3, 3, i)), i);
        }
    }
}
