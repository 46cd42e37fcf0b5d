//! Negative controls: rewrite one proof line so that it asserts `F & bot`
//! in place of `F`, then check that the catalog rejects the file at that line.

use crate::kernel::{parse_script, CheckError, RawJust, ScriptError, ScriptFailure};

use super::CatalogError;

/// A proof line of a script, identified by lemma, label and physical line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLineRef {
    pub lemma: String,
    pub label: String,
    pub src_line: usize,
}

pub fn proof_lines(text: &str, file: &str) -> Result<Vec<ProofLineRef>, ScriptError> {
    let s = parse_script(text, file)?;
    Ok(s.lemmas()
        .flat_map(|l| {
            l.lines.iter().map(|r| ProofLineRef { lemma: l.name.clone(), label: r.label.clone(), src_line: r.src })
        })
        .collect())
}

/// Replaces the logical line starting at `src_line` (1-based) by a single
/// physical line whose formula is conjoined with `bot`.
pub fn corrupt_line(text: &str, file: &str, src_line: usize) -> Option<String> {
    let s = parse_script(text, file).ok()?;
    let raw = s.lemmas().flat_map(|l| l.lines.iter()).find(|r| r.src == src_line)?;
    let body = match &raw.just {
        RawJust::Assume => format!("{}. assume ({}) & bot", raw.label, raw.formula),
        RawJust::By { rule, args } => {
            format!("{}. ({}) & bot by {}({})", raw.label, raw.formula, rule, args.join(", "))
        }
    };
    let lines: Vec<&str> = text.lines().collect();
    let mut end = src_line;
    while end < lines.len() && lines[end].starts_with(char::is_whitespace) && !lines[end].trim().is_empty() {
        end += 1;
    }
    let mut out: Vec<String> = lines[..src_line - 1].iter().map(|l| l.to_string()).collect();
    out.push(body);
    // Keep the physical numbering of everything after the corrupted line.
    out.extend(std::iter::repeat_n(String::new(), end - src_line));
    out.extend(lines[end..].iter().map(|l| l.to_string()));
    Some(out.join("\n") + "\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorruptionOutcome {
    /// Rejected, and the error names the corrupted line.
    Named,
    /// Rejected, but the error points somewhere else.
    Misattributed(String),
    Accepted,
}

fn base_label(l: &str) -> &str {
    l.split('.').next().unwrap_or(l)
}

fn names_line(e: &CheckError, lemma: &str, line: &ProofLineRef) -> bool {
    if e.src_line == Some(line.src_line) {
        return true;
    }
    e.lemma == lemma && (base_label(&e.line) == line.label || e.related.iter().any(|r| base_label(r) == line.label))
}

/// Classifies the result of checking a corrupted file.
pub fn classify(result: &Result<super::CatalogReport, CatalogError>, line: &ProofLineRef) -> CorruptionOutcome {
    match result {
        Ok(_) => CorruptionOutcome::Accepted,
        Err(err) => match err.failure() {
            Some(ScriptFailure::Check(e)) if names_line(e, &line.lemma, line) => CorruptionOutcome::Named,
            Some(ScriptFailure::Parse(p)) if p.line == line.src_line => CorruptionOutcome::Named,
            _ => CorruptionOutcome::Misattributed(err.to_string()),
        },
    }
}
