//! Step markers: `# @step TAG -> LABEL` comments tying proof lines to the
//! numbered steps of the informal argument.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::kernel::{parse_script, ScriptError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepUse {
    pub tag: String,
    pub lemma: String,
    pub label: String,
    pub src_line: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LintError {
    #[error("{0}")]
    Parse(#[from] ScriptError),
    #[error("step {tag} is not marked")]
    Missing { tag: String },
    #[error("step {tag} is marked {count} times (lines {lines:?})")]
    Duplicate { tag: String, count: usize, lines: Vec<usize> },
    #[error("line {src_line}: step {tag} points at {label}, which is not a line of {lemma}")]
    Dangling { tag: String, lemma: String, label: String, src_line: usize },
    #[error("line {src_line}: step {tag} is not in the expected list")]
    Unknown { tag: String, src_line: usize },
}

/// Checks that each expected tag is marked exactly once, on a line that
/// exists in the enclosing lemma, and that no other tags appear.
pub fn step_lint(text: &str, file: &str, expected: &[&str]) -> Result<Vec<StepUse>, LintError> {
    let script = parse_script(text, file)?;
    let mut uses: BTreeMap<String, Vec<StepUse>> = BTreeMap::new();
    for l in script.lemmas() {
        for m in &l.markers {
            if !l.lines.iter().any(|r| r.label == m.label) {
                return Err(LintError::Dangling {
                    tag: m.tag.clone(),
                    lemma: l.name.clone(),
                    label: m.label.clone(),
                    src_line: m.src,
                });
            }
            if !expected.contains(&m.tag.as_str()) {
                return Err(LintError::Unknown { tag: m.tag.clone(), src_line: m.src });
            }
            uses.entry(m.tag.clone()).or_default().push(StepUse {
                tag: m.tag.clone(),
                lemma: l.name.clone(),
                label: m.label.clone(),
                src_line: m.src,
            });
        }
    }
    let mut out = Vec::new();
    for tag in expected {
        match uses.remove(*tag) {
            None => return Err(LintError::Missing { tag: tag.to_string() }),
            Some(v) if v.len() > 1 => {
                return Err(LintError::Duplicate {
                    tag: tag.to_string(),
                    count: v.len(),
                    lines: v.iter().map(|u| u.src_line).collect(),
                })
            }
            Some(mut v) => out.push(v.pop().expect("one use")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str =
        "lemma t in Logic:\ngoal p -> p\n1. assume p\n# @step a -> 1\n2. p -> p by ImpI(1, 1)\n# @step b -> 2\n";

    #[test]
    fn accepts_each_tag_once() {
        let u = step_lint(SRC, "t.prf", &["a", "b"]).unwrap();
        assert_eq!(u.iter().map(|s| s.label.as_str()).collect::<Vec<_>>(), ["1", "2"]);
    }

    #[test]
    fn reports_missing_duplicate_dangling_unknown() {
        assert!(matches!(step_lint(SRC, "", &["a", "b", "c"]), Err(LintError::Missing { .. })));
        let dup = format!("{SRC}# @step a -> 2\n");
        assert!(matches!(step_lint(&dup, "", &["a", "b"]), Err(LintError::Duplicate { count: 2, .. })));
        let dangling = SRC.replace("b -> 2", "b -> 9");
        assert!(matches!(step_lint(&dangling, "", &["a", "b"]), Err(LintError::Dangling { .. })));
        assert!(matches!(step_lint(SRC, "", &["a"]), Err(LintError::Unknown { .. })));
    }
}
