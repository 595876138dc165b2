//! The `.rules` format for binary operators in de Simone format.
//!
//! ```text
//! op f arity 2
//! x -?m-> x' ==> f(x,y) -?m-> x' || y
//! x -?c-> x', y -~?c-> y' ==> f(x,y) -tau-> x' || y'
//! ```
//!
//! A negative premise is written `x -a-/->`; it is accepted by the reader so
//! that validation can report it.

use std::path::Path;

use crate::error::{Error, Result};
use crate::sos::{validate_de_simone, DeSimoneRuleSet, Premise, SosRule};
use crate::term::{Alphabet, Ident};

use super::axioms::{assignments, substitute_metavariables};
use super::{parse_action_at, parse_term_at};

fn col_of(line: &str, part: &str) -> usize {
    // `part` is always a subslice of `line`.
    (part.as_ptr() as usize - line.as_ptr() as usize) + 1
}

fn metavariables(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == '?' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                j += 1;
            }
            let name: String = bytes[i + 1..j].iter().collect();
            if !out.contains(&name) {
                out.push(name);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    out
}

fn parse_ident(s: &str, line: usize, column: usize) -> Result<Ident> {
    let s = s.trim();
    let ok = !s.is_empty()
        && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    ok.then(|| Ident::new(s))
        .flatten()
        .ok_or_else(|| Error::parse(line, column, format!("invalid identifier `{s}`")))
}

fn parse_premise(src: &str, full: &str, line: usize, alphabet: &Alphabet) -> Result<Premise> {
    let col = col_of(full, src);
    let trimmed = src.trim();
    let dash = trimmed
        .find('-')
        .ok_or_else(|| Error::parse(line, col, "expected a premise `x -a-> x'`"))?;
    let source = parse_ident(&trimmed[..dash], line, col)?;
    let rest = &trimmed[dash + 1..];
    if let Some(end) = rest.find("-/->") {
        let label = parse_action_at(rest[..end].trim(), alphabet, line, col)?;
        if !rest[end + 4..].trim().is_empty() {
            return Err(Error::parse(line, col, "a negative premise has no target"));
        }
        return Ok(Premise {
            source,
            label,
            target: None,
            negative: true,
        });
    }
    let end = rest
        .find("->")
        .ok_or_else(|| Error::parse(line, col, "expected `->` in premise"))?;
    let label_src = rest[..end].trim().strip_suffix('-').unwrap_or(rest[..end].trim());
    let label_src = label_src.trim_end_matches('-').trim();
    let label = parse_action_at(label_src, alphabet, line, col)?;
    let target = parse_ident(&rest[end + 2..], line, col)?;
    Ok(Premise {
        source,
        label,
        target: Some(target),
        negative: false,
    })
}

fn parse_rule(src: &str, line: usize, op: Ident, alphabet: &Alphabet) -> Result<SosRule> {
    let arrow = src
        .find("==>")
        .ok_or_else(|| Error::parse(line, 1, "expected `==>` between premises and conclusion"))?;
    let (prem_src, concl_src) = (&src[..arrow], &src[arrow + 3..]);
    let mut premises = Vec::new();
    if !prem_src.trim().is_empty() {
        for part in prem_src.split(',') {
            premises.push(parse_premise(part, src, line, alphabet)?);
        }
    }
    let concl_col = col_of(src, concl_src);
    let concl = concl_src.trim();
    let open = concl
        .find('(')
        .ok_or_else(|| Error::parse(line, concl_col, "expected `f(x,y)` in the conclusion"))?;
    let close = concl
        .find(')')
        .ok_or_else(|| Error::parse(line, concl_col, "expected `)` in the conclusion"))?;
    let name = parse_ident(&concl[..open], line, concl_col)?;
    if name != op {
        return Err(Error::parse(
            line,
            concl_col,
            format!("conclusion is about `{name}`, the file defines `{op}`"),
        ));
    }
    let args: Vec<&str> = concl[open + 1..close].split(',').map(str::trim).collect();
    if args != ["x", "y"] {
        return Err(Error::parse(line, concl_col, "the conclusion source must be `f(x,y)`"));
    }
    let rest = concl[close + 1..].trim_start();
    let rest = rest
        .strip_prefix('-')
        .ok_or_else(|| Error::parse(line, concl_col, "expected `-label->` after the source"))?;
    let end = rest
        .find("->")
        .ok_or_else(|| Error::parse(line, concl_col, "expected `->` in the conclusion"))?;
    let label_src = rest[..end].trim().trim_end_matches('-').trim();
    let label = parse_action_at(label_src, alphabet, line, concl_col)?;
    let target_src = &rest[end + 2..];
    let target = parse_term_at(target_src, alphabet, line, col_of(src, target_src), true)?;
    Ok(SosRule {
        premises,
        label,
        target,
        line,
    })
}

/// Reads a rule file without validating it, expanding metavariables `?m`
/// (over `A ∪ Ā ∪ {τ}`) and `?c` (over `A ∪ Ā`).
pub fn parse_rule_set_unchecked(text: &str, alphabet: &Alphabet) -> Result<DeSimoneRuleSet> {
    let mut header: Option<(Ident, usize)> = None;
    let mut rules = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some((op, _)) = header else {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["op", name, "arity", n] => {
                    let arity = n
                        .parse()
                        .map_err(|_| Error::parse(line_no, 1, format!("invalid arity `{n}`")))?;
                    header = Some((parse_ident(name, line_no, 4)?, arity));
                    continue;
                }
                _ => return Err(Error::parse(line_no, 1, "expected header `op NAME arity 2`")),
            }
        };
        let metas = metavariables(line);
        for assignment in assignments(&metas, alphabet, crate::equational::schemas::DEFAULT_CAP)? {
            let concrete = substitute_metavariables(line, &assignment);
            rules.push(parse_rule(&concrete, line_no, op, alphabet)?);
        }
    }
    let (op, arity) = header.ok_or_else(|| Error::parse(1, 1, "missing header `op NAME arity 2`"))?;
    Ok(DeSimoneRuleSet { op, arity, rules })
}

/// Reads and validates a rule set.
pub fn parse_rule_set(text: &str, alphabet: &Alphabet) -> Result<DeSimoneRuleSet> {
    let rs = parse_rule_set_unchecked(text, alphabet)?;
    if rs.arity != 2 {
        return Err(Error::ArityMismatch {
            op: rs.op.to_string(),
            arity: rs.arity,
        });
    }
    let violations = validate_de_simone(&rs);
    if !violations.is_empty() {
        return Err(Error::NonDeSimone(violations.iter().map(|v| v.to_string()).collect()));
    }
    Ok(rs)
}

pub fn load_rule_set(path: &Path, alphabet: &Alphabet) -> Result<DeSimoneRuleSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rule_set(&text, alphabet)
}
