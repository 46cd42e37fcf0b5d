//! Isomorphism search by backtracking over partial bijections, pruned by
//! per-element occurrence counts.

use serde::Serialize;

use super::structure::{tuple_at, FiniteStructure};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum IsoResult {
    /// `map[i]` is the image of element `i` of the first structure.
    Isomorphism(Vec<usize>),
    NotIsomorphic,
}

impl IsoResult {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoResult::Isomorphism(_))
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// For each element: how often it occurs at each position of each relation.
fn profiles(s: &FiniteStructure) -> Vec<Vec<usize>> {
    let mut p = vec![Vec::new(); s.size];
    for r in s.relations.values() {
        let mut counts = vec![vec![0usize; r.arity + 1]; s.size];
        for t in r.tuples(s.size) {
            for (pos, &a) in t.iter().enumerate() {
                counts[a][pos] += 1;
            }
            if t.windows(2).all(|w| w[0] == w[1]) && !t.is_empty() {
                counts[t[0]][r.arity] += 1;
            }
        }
        for (a, c) in counts.into_iter().enumerate() {
            p[a].extend(c);
        }
    }
    p
}

struct Search<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    pa: Vec<Vec<usize>>,
    pb: Vec<Vec<usize>>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl Search<'_> {
    /// Checks every tuple whose entries are all mapped and include `last`.
    fn consistent(&self, last: usize) -> bool {
        let n = self.a.size;
        for (name, ra) in &self.a.relations {
            let rb = &self.b.relations[name];
            for i in 0..ra.table.len() {
                let t = tuple_at(n, ra.arity, i);
                if !t.contains(&last) {
                    continue;
                }
                let img: Option<Vec<usize>> = t.iter().map(|&x| self.map[x]).collect();
                if let Some(u) = img {
                    if ra.table[i] != rb.holds(n, &u) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Finds an isomorphism from `a` to `b`, respecting relations and constants.
/// Structures with different signatures or sizes are not isomorphic.
pub fn iso_search(a: &FiniteStructure, b: &FiniteStructure) -> IsoResult {
    if a.size != b.size || a.signature() != b.signature() || a.constants.keys().ne(b.constants.keys()) {
        return IsoResult::NotIsomorphic;
    }
    let mut s = Search { a, b, pa: profiles(a), pb: profiles(b), map: vec![None; a.size], used: vec![false; b.size] };
    for (k, &ca) in &a.constants {
        let cb = b.constants[k];
        match s.map[ca] {
            Some(x) if x != cb => return IsoResult::NotIsomorphic,
            _ => {}
        }
        if s.pa[ca] != s.pb[cb] || (s.used[cb] && s.map[ca] != Some(cb)) {
            return IsoResult::NotIsomorphic;
        }
        s.map[ca] = Some(cb);
        s.used[cb] = true;
    }
    // Constants are fixed up front; the search fills the remaining elements.
    let fixed: Vec<bool> = s.map.iter().map(|m| m.is_some()).collect();
    fn fill(s: &mut Search, fixed: &[bool], i: usize) -> bool {
        if i == s.a.size {
            return (0..s.a.size).all(|x| s.consistent(x));
        }
        if fixed[i] {
            return fill(s, fixed, i + 1);
        }
        for j in 0..s.b.size {
            if s.used[j] || s.pa[i] != s.pb[j] {
                continue;
            }
            s.map[i] = Some(j);
            s.used[j] = true;
            if s.consistent(i) && fill(s, fixed, i + 1) {
                return true;
            }
            s.map[i] = None;
            s.used[j] = false;
        }
        false
    }
    if fill(&mut s, &fixed, 0) {
        IsoResult::Isomorphism(s.map.into_iter().map(|m| m.expect("total")).collect())
    } else {
        IsoResult::NotIsomorphic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> FiniteStructure {
        FiniteStructure::new(3).unwrap().with("E", 2, &[&[0, 1], &[1, 2], &[2, 0]])
    }

    fn check_map(a: &FiniteStructure, b: &FiniteStructure, map: &[usize]) {
        assert_eq!(&a.permuted(map), b);
    }

    #[test]
    fn cycle_to_itself() {
        let c = cycle3();
        let IsoResult::Isomorphism(m) = iso_search(&c, &c) else { panic!() };
        assert_eq!(m, vec![0, 1, 2]);
    }

    #[test]
    fn cycle_is_not_a_path() {
        let path = FiniteStructure::new(3).unwrap().with("E", 2, &[&[0, 1], &[1, 2]]);
        assert_eq!(iso_search(&cycle3(), &path), IsoResult::NotIsomorphic);
    }

    #[test]
    fn two_element_orders() {
        let a = FiniteStructure::new(2).unwrap().with("L", 2, &[&[0, 1]]);
        let b = FiniteStructure::new(2).unwrap().with("L", 2, &[&[1, 0]]);
        let IsoResult::Isomorphism(m) = iso_search(&a, &b) else { panic!() };
        assert_eq!(m, vec![1, 0]);
        check_map(&a, &b, &m);
    }

    #[test]
    fn relabelled_structures_are_found() {
        let a =
            FiniteStructure::new(4).unwrap().with("E", 2, &[&[0, 1], &[1, 2], &[2, 2], &[3, 0]]).with("P", 1, &[&[3]]);
        for p in permutations(4) {
            let b = a.permuted(&p);
            let IsoResult::Isomorphism(m) = iso_search(&a, &b) else { panic!("{p:?}") };
            check_map(&a, &b, &m);
        }
    }

    #[test]
    fn constants_must_match() {
        let mut a = FiniteStructure::new(2).unwrap().with("P", 1, &[]);
        let mut b = a.clone();
        a.add_constant("c", 0).unwrap();
        b.add_constant("c", 1).unwrap();
        let IsoResult::Isomorphism(m) = iso_search(&a, &b) else { panic!() };
        assert_eq!(m[0], 1);
        b.add_relation("P", 1, vec![vec![1]]).unwrap();
        assert_eq!(iso_search(&a, &b), IsoResult::NotIsomorphic);
    }
}
