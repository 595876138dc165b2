//! Equations, axiom systems and the `.ax` file format.
//!
//! ```text
//! # comment
//! A1 : X + Y = Y + X
//! RS : ?mu.(?nu.X + ?nu.Y + Z) = ?mu.(?nu.X + ?nu.Y + Z) + ?mu.(?nu.X + Z)
//! @schema EL1
//! ```
//!
//! A `?name` is an action metavariable. Lines containing metavariables are
//! expanded at load time over `A ∪ Ā ∪ {τ}` (or over `A ∪ Ā` when the
//! metavariable name starts with `c`), and each instance is named after its
//! template with the chosen actions in brackets, e.g. `RS[a,~b]`.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::equational::schemas;
use crate::error::{Error, Result};
use crate::term::{Action, Alphabet, Ident, Substitution, Term};

use super::parse_term_at;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Equation {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Equation {
        Equation {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    /// The template an instance was generated from: the name up to `[`.
    pub fn family(&self) -> &str {
        self.name.split('[').next().unwrap_or(&self.name)
    }

    pub fn vars(&self) -> BTreeSet<Ident> {
        let mut v = self.lhs.free_vars();
        v.extend(self.rhs.free_vars());
        v
    }

    pub fn is_closed(&self) -> bool {
        self.lhs.is_closed() && self.rhs.is_closed()
    }

    pub fn instantiate(&self, sigma: &Substitution) -> (Term, Term) {
        (self.lhs.substitute(sigma), self.rhs.substitute(sigma))
    }

    pub fn flipped(&self) -> Equation {
        Equation::new(self.name.clone(), self.rhs.clone(), self.lhs.clone())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} = {}", self.name, self.lhs, self.rhs)
    }
}

/// Alphabet-dependent schemas instantiated when a system is loaded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SchemaTag {
    /// The unbounded expansion law; instances are resolved on demand by name.
    EL,
    EL1,
    EL2,
    RT,
    RSP2,
}

impl FromStr for SchemaTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "EL" => SchemaTag::EL,
            "EL1" => SchemaTag::EL1,
            "EL2" => SchemaTag::EL2,
            "RT" => SchemaTag::RT,
            "RSP2" => SchemaTag::RSP2,
            other => return Err(Error::UnknownSchemaTag(other.to_string())),
        })
    }
}

impl fmt::Display for SchemaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A named, finite collection of equations over a fixed alphabet.
#[derive(Clone, Debug)]
pub struct AxiomSystem {
    pub name: String,
    pub alphabet: Alphabet,
    pub schema_tags: BTreeSet<SchemaTag>,
    equations: Vec<Equation>,
    index: HashMap<String, usize>,
}

impl AxiomSystem {
    pub fn new(name: impl Into<String>, alphabet: Alphabet) -> AxiomSystem {
        AxiomSystem {
            name: name.into(),
            alphabet,
            schema_tags: BTreeSet::new(),
            equations: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn push(&mut self, eq: Equation) -> Result<()> {
        if self.index.contains_key(&eq.name) {
            return Err(Error::DuplicateEquation(eq.name));
        }
        self.index.insert(eq.name.clone(), self.equations.len());
        self.equations.push(eq);
        Ok(())
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// True when instances of the unbounded expansion law are admitted.
    pub fn expansion_law(&self) -> bool {
        self.schema_tags.contains(&SchemaTag::EL)
    }

    /// Looks an axiom up by name; `EL[..]` instances are built on demand when
    /// the system admits the expansion law.
    pub fn get(&self, name: &str) -> Option<Cow<'_, Equation>> {
        if let Some(&i) = self.index.get(name) {
            return Some(Cow::Borrowed(&self.equations[i]));
        }
        if self.expansion_law() && name.starts_with("EL[") {
            return schemas::instance_by_name(name, &self.alphabet).map(Cow::Owned);
        }
        None
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    /// Equations grouped by family, in order of first appearance.
    pub fn families(&self) -> Vec<(String, Vec<&Equation>)> {
        let mut out: Vec<(String, Vec<&Equation>)> = Vec::new();
        let mut pos: HashMap<&str, usize> = HashMap::new();
        for eq in &self.equations {
            let fam = eq.family();
            match pos.get(fam) {
                Some(&i) => out[i].1.push(eq),
                None => {
                    pos.insert(fam, out.len());
                    out.push((fam.to_string(), vec![eq]));
                }
            }
        }
        out
    }

    /// Serialises the concrete system. Instantiated schemas are written out
    /// explicitly; only the on-demand expansion law stays a tag, so loading
    /// the output again yields the same system.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n", self.name);
        if self.expansion_law() {
            s.push_str("@schema EL\n");
        }
        for eq in &self.equations {
            s.push_str(&eq.to_string());
            s.push('\n');
        }
        s
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '[' | ']' | ',' | '|' | '~' | '\''))
}

/// Splits `text` into literal pieces and `?meta` references.
fn metavariables(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '?' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let name: String = chars[start..j].iter().collect();
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

/// Replaces every `?meta` by the rendering of its action.
pub(crate) fn substitute_metavariables(text: &str, assignment: &[(String, Action)]) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '?' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let name: String = chars[start..j].iter().collect();
            match assignment.iter().find(|(n, _)| *n == name) {
                Some((_, a)) => out.push_str(&a.to_string()),
                None => {
                    out.push('?');
                    out.push_str(&name);
                }
            }
            i = j;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// The range of a metavariable: visible actions for names starting with `c`,
/// all of `A ∪ Ā ∪ {τ}` otherwise.
pub(crate) fn metavariable_range(name: &str, alphabet: &Alphabet) -> Vec<Action> {
    if name.starts_with('c') {
        alphabet.visible()
    } else {
        alphabet.actions()
    }
}

/// Every assignment of actions to the given metavariables, in lexicographic
/// action order.
pub(crate) fn assignments(metas: &[String], alphabet: &Alphabet, cap: usize) -> Result<Vec<Vec<(String, Action)>>> {
    let ranges: Vec<Vec<Action>> = metas.iter().map(|m| metavariable_range(m, alphabet)).collect();
    let count = ranges.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len())).unwrap_or(usize::MAX);
    if count > cap {
        return Err(Error::SchemaCap {
            tag: metas.join(","),
            count,
            cap,
        });
    }
    let mut out = vec![Vec::new()];
    for (m, range) in metas.iter().zip(&ranges) {
        let mut next = Vec::with_capacity(out.len() * range.len());
        for prefix in &out {
            for &a in range {
                let mut v: Vec<(String, Action)> = prefix.clone();
                v.push((m.clone(), a));
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Parses the contents of an axiom file.
pub fn parse_axiom_system(text: &str, name: &str, alphabet: &Alphabet) -> Result<AxiomSystem> {
    parse_axiom_system_capped(text, name, alphabet, schemas::DEFAULT_CAP)
}

pub fn parse_axiom_system_capped(text: &str, name: &str, alphabet: &Alphabet, cap: usize) -> Result<AxiomSystem> {
    let mut sys = AxiomSystem::new(name, alphabet.clone());
    let mut templates: BTreeSet<String> = BTreeSet::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("@schema") {
            for tag in rest.split(|c: char| c.is_whitespace() || c == '|' || c == ',') {
                if !tag.is_empty() {
                    sys.schema_tags.insert(tag.parse()?);
                }
            }
            continue;
        }
        let colon = line
            .find(':')
            .ok_or_else(|| Error::parse(line_no, 1, "expected `NAME : lhs = rhs`"))?;
        let eq_name = line[..colon].trim();
        if !valid_name(eq_name) {
            return Err(Error::parse(line_no, 1, format!("invalid equation name `{eq_name}`")));
        }
        let body = &line[colon + 1..];
        let mut parts = body.split('=');
        let (lhs_src, rhs_src) = match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) => (l, r),
            _ => {
                return Err(Error::parse(
                    line_no,
                    colon + 2,
                    "expected exactly one `=` between the two sides",
                ))
            }
        };
        let lhs_col = colon + 2;
        let rhs_col = colon + 2 + lhs_src.chars().count() + 1;
        let metas = metavariables(body);
        if metas.is_empty() {
            let lhs = parse_term_at(lhs_src, alphabet, line_no, lhs_col, false)?;
            let rhs = parse_term_at(rhs_src, alphabet, line_no, rhs_col, false)?;
            sys.push(Equation::new(eq_name, lhs, rhs))?;
            continue;
        }
        if !templates.insert(eq_name.to_string()) {
            return Err(Error::DuplicateEquation(eq_name.to_string()));
        }
        for assignment in assignments(&metas, alphabet, cap)? {
            let l = substitute_metavariables(lhs_src, &assignment);
            let r = substitute_metavariables(rhs_src, &assignment);
            let lhs = parse_term_at(&l, alphabet, line_no, lhs_col, false)?;
            let rhs = parse_term_at(&r, alphabet, line_no, rhs_col, false)?;
            let label: Vec<String> = assignment.iter().map(|(_, a)| a.to_string()).collect();
            sys.push(Equation::new(format!("{eq_name}[{}]", label.join(",")), lhs, rhs))?;
        }
    }
    let tags = sys.schema_tags.clone();
    for eq in schemas::instantiate_schemas(&tags, alphabet, cap)? {
        sys.push(eq)?;
    }
    Ok(sys)
}

/// Loads an axiom file; the system is named after the file stem.
pub fn load_axiom_system(path: &Path, alphabet: &Alphabet) -> Result<AxiomSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("axioms");
    parse_axiom_system(&text, name, alphabet)
}
