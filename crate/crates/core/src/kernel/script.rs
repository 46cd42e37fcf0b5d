//! Line-oriented proof script format.
//!
//! ```text
//! import "arith.prf"
//! define NAME(p:sort, ...) := FORMULA
//! lemma NAME in THEORY:
//! goal FORMULA
//! 1. assume FORMULA
//! 2. FORMULA by RULE(arg, ...)   # trailing comment
//! ```
//!
//! Lines starting with `#` are comments; indented lines continue the previous
//! item. A comment of the form `# @step TAG -> LABEL` marks the line that
//! carries a named step of an informal argument.

use std::fmt;

use crate::syntax::Sort;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ScriptError {
    pub file: String,
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.file.is_empty() {
            write!(f, "line {}: {}", self.line, self.msg)
        } else {
            write!(f, "{}:{}: {}", self.file, self.line, self.msg)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawJust {
    Assume,
    By { rule: String, args: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawLine {
    pub label: String,
    pub formula: String,
    pub just: RawJust,
    pub src: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub tag: String,
    pub label: String,
    pub src: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaBlock {
    pub name: String,
    pub theory: String,
    pub goal: String,
    pub goal_src: usize,
    pub lines: Vec<RawLine>,
    pub markers: Vec<Marker>,
    pub src: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Import { path: String, src: usize },
    Define { name: String, params: Vec<(String, Sort)>, body: String, src: usize },
    Lemma(LemmaBlock),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub file: String,
    pub items: Vec<Item>,
}

impl Script {
    pub fn lemmas(&self) -> impl Iterator<Item = &LemmaBlock> {
        self.items.iter().filter_map(|i| match i {
            Item::Lemma(l) => Some(l),
            _ => None,
        })
    }
}

/// Splits on commas outside brackets. Tuples must be parenthesized.
pub fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                cur.push(c)
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(c)
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '+')
}

/// Parses `RULE` or `RULE(args)` with an optional trailing `# comment`.
fn parse_just(s: &str) -> Option<(String, Vec<String>)> {
    let s = s.trim();
    let name_end = s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(s.len());
    let rule = &s[..name_end];
    if rule.is_empty() || !rule.chars().next()?.is_ascii_alphabetic() {
        return None;
    }
    let rest = s[name_end..].trim_start();
    let (args, tail) = if let Some(body) = rest.strip_prefix('(') {
        let mut depth = 1;
        let mut close = None;
        for (i, c) in body.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let close = close?;
        (split_args(&body[..close]), body[close + 1..].trim())
    } else {
        (vec![], rest)
    };
    if !tail.is_empty() && !tail.starts_with('#') {
        return None;
    }
    Some((rule.to_string(), args))
}

fn parse_proof_line(text: &str, src: usize) -> Result<RawLine, String> {
    let dot = text.find(". ").ok_or("expected `LABEL. ...`")?;
    let label = text[..dot].trim();
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("bad line label `{label}`"));
    }
    let body = text[dot + 2..].trim();
    if let Some(f) = body.strip_prefix("assume ") {
        return Ok(RawLine { label: label.into(), formula: f.trim().into(), just: RawJust::Assume, src });
    }
    let mut search = body.len();
    while let Some(pos) = body[..search].rfind(" by ") {
        if let Some((rule, args)) = parse_just(&body[pos + 4..]) {
            return Ok(RawLine {
                label: label.into(),
                formula: body[..pos].trim().into(),
                just: RawJust::By { rule, args },
                src,
            });
        }
        search = pos;
    }
    Err("expected `FORMULA by RULE(...)` or `assume FORMULA`".into())
}

fn parse_define(text: &str) -> Result<(String, Vec<(String, Sort)>, String), String> {
    let (head, body) = text.split_once(":=").ok_or("expected `define NAME(params) := FORMULA`")?;
    let head = head.trim();
    let open = head.find('(').ok_or("expected a parameter list")?;
    let name = head[..open].trim().trim_start_matches('@');
    if !is_ident(name) {
        return Err(format!("bad notation name `{name}`"));
    }
    let inner = head[open + 1..].strip_suffix(')').ok_or("unclosed parameter list")?;
    let mut params = Vec::new();
    for p in split_args(inner) {
        let (n, s) = p.split_once(':').ok_or_else(|| format!("parameter `{p}` needs a sort"))?;
        let sort = match s.trim() {
            "nat" => Sort::Nat,
            "seq" => Sort::Seq,
            "obj" => Sort::Obj,
            other => return Err(format!("unknown sort `{other}`")),
        };
        params.push((n.trim().to_string(), sort));
    }
    Ok((name.to_string(), params, body.trim().to_string()))
}

/// Parses script text. `file` is used in error messages only.
pub fn parse_script(text: &str, file: &str) -> Result<Script, ScriptError> {
    let err = |line: usize, msg: String| ScriptError { file: file.to_string(), line, msg };
    // Join continuation lines; keep the number of the first physical line.
    let mut logical: Vec<(usize, String)> = Vec::new();
    let mut markers: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            markers.push((n, trimmed.to_string()));
            continue;
        }
        if raw.starts_with(|c: char| c.is_whitespace()) {
            match logical.last_mut() {
                Some((_, prev)) => {
                    prev.push(' ');
                    prev.push_str(trimmed);
                }
                None => return Err(err(n, "continuation line without a preceding item".into())),
            }
        } else {
            logical.push((n, trimmed.to_string()));
        }
    }

    let mut items = Vec::new();
    let mut current: Option<LemmaBlock> = None;
    for (n, line) in logical {
        if let Some(rest) = line.strip_prefix("import ") {
            let path = rest.trim().trim_matches('"').to_string();
            items.extend(current.take().map(Item::Lemma));
            items.push(Item::Import { path, src: n });
        } else if let Some(rest) = line.strip_prefix("define ") {
            let (name, params, body) = parse_define(rest).map_err(|m| err(n, m))?;
            items.extend(current.take().map(Item::Lemma));
            items.push(Item::Define { name, params, body, src: n });
        } else if let Some(rest) = line.strip_prefix("lemma ") {
            items.extend(current.take().map(Item::Lemma));
            let rest =
                rest.trim().strip_suffix(':').ok_or_else(|| err(n, "expected `lemma NAME in THEORY:`".into()))?;
            let (name, theory) =
                rest.split_once(" in ").ok_or_else(|| err(n, "expected `lemma NAME in THEORY:`".into()))?;
            if !is_ident(name.trim()) {
                return Err(err(n, format!("bad lemma name `{}`", name.trim())));
            }
            current = Some(LemmaBlock {
                name: name.trim().into(),
                theory: theory.trim().into(),
                goal: String::new(),
                goal_src: n,
                lines: vec![],
                markers: vec![],
                src: n,
            });
        } else if let Some(rest) = line.strip_prefix("goal ") {
            let l = current.as_mut().ok_or_else(|| err(n, "goal outside a lemma".into()))?;
            if !l.goal.is_empty() {
                return Err(err(n, "second goal in one lemma".into()));
            }
            l.goal = rest.trim().into();
            l.goal_src = n;
        } else {
            let l = current.as_mut().ok_or_else(|| err(n, format!("unexpected text `{line}`")))?;
            if l.goal.is_empty() {
                return Err(err(n, "proof line before the goal".into()));
            }
            l.lines.push(parse_proof_line(&line, n).map_err(|m| err(n, m))?);
        }
    }
    items.extend(current.take().map(Item::Lemma));

    // Attach step markers to the lemma whose span contains them.
    let spans: Vec<usize> = items
        .iter()
        .map(|i| match i {
            Item::Import { src, .. } | Item::Define { src, .. } => *src,
            Item::Lemma(l) => l.src,
        })
        .collect();
    for (n, text) in markers {
        let body = text.trim_start_matches('#').trim();
        let Some(rest) = body.strip_prefix("@step ") else { continue };
        let (tag, label) = rest.split_once("->").ok_or_else(|| err(n, "expected `@step TAG -> LABEL`".into()))?;
        let idx = spans.iter().rposition(|s| *s <= n);
        match idx.map(|i| &mut items[i]) {
            Some(Item::Lemma(l)) => {
                l.markers.push(Marker { tag: tag.trim().into(), label: label.trim().into(), src: n })
            }
            _ => return Err(err(n, "step marker outside a lemma".into())),
        }
    }
    for i in &items {
        if let Item::Lemma(l) = i {
            if l.goal.is_empty() {
                return Err(err(l.src, format!("lemma {} has no goal", l.name)));
            }
        }
    }
    Ok(Script { file: file.to_string(), items })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_items_and_continuations() {
        let text = "import \"arith.prf\"\n# note\nlemma id in Logic:\ngoal p -> p\n1. assume p\n2. p -> p\n     by ImpI(1, 1)  # done\n# @step (a) -> 2\n";
        let s = parse_script(text, "t.prf").unwrap();
        assert_eq!(s.items.len(), 2);
        let l = s.lemmas().next().unwrap();
        assert_eq!(l.lines.len(), 2);
        assert_eq!(l.lines[1].just, RawJust::By { rule: "ImpI".into(), args: vec!["1".into(), "1".into()] });
        assert_eq!(l.lines[1].src, 6);
        assert_eq!(l.markers, vec![Marker { tag: "(a)".into(), label: "2".into(), src: 8 }]);
    }

    #[test]
    fn concatenation_is_not_a_comment() {
        let s = parse_script("lemma c in FIM0:\ngoal u # <> = u\n1. u # <> = u by Axiom(FIM0, cat_nil)\n", "").unwrap();
        let l = s.lemmas().next().unwrap();
        assert_eq!(l.lines[0].formula, "u # <> = u");
    }

    #[test]
    fn nested_args_split_at_top_level() {
        assert_eq!(split_args("3, (a(x), 0), f(1, 2)"), vec!["3", "(a(x), 0)", "f(1, 2)"]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_script("lemma x in Logic:\n1. assume p\n", "f.prf").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.to_string().starts_with("f.prf:2:"));
    }
}
