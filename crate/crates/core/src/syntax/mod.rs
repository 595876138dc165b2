//! Concrete syntax: a term parser, a minimal-parenthesis printer and the
//! text formats for axiom systems and operator rule sets.
//!
//! ```text
//! term   := sum
//! sum    := par ("+" par)*
//! par    := prefix ("||" prefix)*
//! prefix := action "." prefix | action | atom
//! atom   := "0" | VAR | func | "(" term ")"
//! func   := ("lmerge" | "cmerge" | OPNAME) "(" term "," term ")"
//! action := "tau" | "~"* NAME
//! ```
//!
//! Variables start with an uppercase letter, action and operator names with
//! a lowercase one. A bare action `a` abbreviates `a.0`.

mod axioms;
mod rules;

pub use axioms::{load_axiom_system, parse_axiom_system, AxiomSystem, Equation, SchemaTag};
pub use rules::{load_rule_set, parse_rule_set, parse_rule_set_unchecked};

use std::fmt;

use crate::error::{Error, Result};
use crate::term::{Action, Alphabet, Ident, Term, TermKind};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Zero,
    Lower(String),
    Upper(String),
    Tilde,
    Dot,
    Plus,
    Bar2,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Zero => f.write_str("`0`"),
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Bar2 => f.write_str("`||`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (line0, col0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '~' => Some(Tok::Tilde),
            '.' => Some(Tok::Dot),
            '+' => Some(Tok::Plus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        if c == '|' {
            if chars.get(i + 1) == Some(&'|') {
                out.push(Spanned { tok: Tok::Bar2, line: tl, column: tc });
                i += 2;
                col += 2;
                continue;
            }
            return Err(Error::parse(tl, tc, "expected `||`"));
        }
        if c == '0' {
            if chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) {
                return Err(Error::parse(tl, tc, "unexpected numeral (only `0` is allowed)"));
            }
            out.push(Spanned { tok: Tok::Zero, line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            while i < chars.len() && chars[i] == '\'' {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if c.is_ascii_uppercase() { Tok::Upper(word) } else { Tok::Lower(word) };
            out.push(Spanned { tok, line: tl, column: tc });
            continue;
        }
        return Err(Error::parse(tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    alphabet: &'a Alphabet,
    /// Lowercase `x`, `y`, `x'`, `y'` are variables (rule targets).
    rule_vars: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> Error {
        let t = self.peek();
        Error::parse(t.line, t.column, format!("expected {what}, found {}", t.tok))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&self, s: &str, line: usize, column: usize) -> Result<Ident> {
        Ident::new(s).ok_or_else(|| {
            Error::parse(line, column, format!("identifier `{s}` is longer than {} bytes", Ident::MAX_LEN))
        })
    }

    fn is_rule_var(&self, s: &str) -> bool {
        self.rule_vars && matches!(s, "x" | "y" | "x'" | "y'")
    }

    fn sum(&mut self) -> Result<Term> {
        let mut t = self.par()?;
        while self.peek().tok == Tok::Plus {
            self.bump();
            let r = self.par()?;
            t = Term::sum(t, r);
        }
        Ok(t)
    }

    fn par(&mut self) -> Result<Term> {
        let mut t = self.prefix()?;
        while self.peek().tok == Tok::Bar2 {
            self.bump();
            let r = self.prefix()?;
            t = Term::par(t, r);
        }
        Ok(t)
    }

    fn starts_action(&self) -> bool {
        match &self.peek().tok {
            Tok::Tilde => true,
            Tok::Lower(s) => *self.peek_at(1) != Tok::LParen && !self.is_rule_var(s),
            _ => false,
        }
    }

    fn action(&mut self) -> Result<Action> {
        let mut flips = 0usize;
        let start = self.peek().clone();
        while self.peek().tok == Tok::Tilde {
            self.bump();
            flips += 1;
        }
        let t = self.bump();
        let name = match t.tok {
            Tok::Lower(s) => s,
            other => {
                return Err(Error::parse(t.line, t.column, format!("expected an action name, found {other}")))
            }
        };
        let base = if name == "tau" {
            Action::Tau
        } else {
            let id = self.ident(&name, t.line, t.column)?;
            if name.contains('\'') || !self.alphabet.contains(id) {
                return Err(Error::UnknownAction {
                    line: t.line,
                    column: t.column,
                    name,
                });
            }
            Action::Name(id)
        };
        let mut a = base;
        for _ in 0..flips {
            a = a.complement().map_err(|_| Error::parse(start.line, start.column, "tau has no complement"))?;
        }
        Ok(a)
    }

    fn prefix(&mut self) -> Result<Term> {
        if self.starts_action() {
            let a = self.action()?;
            if self.peek().tok == Tok::Dot {
                self.bump();
                let body = self.prefix()?;
                return Ok(Term::prefix(a, body));
            }
            return Ok(Term::prefix(a, Term::nil()));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Zero => {
                self.bump();
                Ok(Term::nil())
            }
            Tok::Upper(ref s) => {
                self.bump();
                Ok(Term::var_id(self.ident(s, t.line, t.column)?))
            }
            Tok::Lower(ref s) if self.is_rule_var(s) => {
                self.bump();
                Ok(Term::var_id(self.ident(s, t.line, t.column)?))
            }
            Tok::Lower(ref s) => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let l = self.sum()?;
                self.expect(Tok::Comma, "`,`")?;
                let r = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(match s.as_str() {
                    "lmerge" => Term::left_merge(l, r),
                    "cmerge" => Term::comm_merge(l, r),
                    _ => Term::op(self.ident(s, t.line, t.column)?, l, r),
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

pub(crate) fn parse_term_at(src: &str, alphabet: &Alphabet, line: usize, column: usize, rule_vars: bool) -> Result<Term> {
    let toks = lex(src, line, column)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
        rule_vars,
    };
    let t = p.sum()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

/// Parses a term; errors carry a 1-based line and column.
pub fn parse_term(src: &str, alphabet: &Alphabet) -> Result<Term> {
    parse_term_at(src, alphabet, 1, 1, false)
}

/// Parses a single action such as `tau`, `a` or `~a`.
pub fn parse_action(src: &str, alphabet: &Alphabet) -> Result<Action> {
    parse_action_at(src, alphabet, 1, 1)
}

pub(crate) fn parse_action_at(src: &str, alphabet: &Alphabet, line: usize, column: usize) -> Result<Action> {
    let toks = lex(src, line, column)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
        rule_vars: false,
    };
    let a = p.action()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(a)
}

const PREC_SUM: u8 = 0;
const PREC_PAR: u8 = 1;
const PREC_PREFIX: u8 = 2;

fn write_term(t: &Term, ctx: u8, out: &mut String) {
    use std::fmt::Write;
    let own = match t.kind() {
        TermKind::Sum(..) => PREC_SUM,
        TermKind::Par(..) => PREC_PAR,
        _ => PREC_PREFIX,
    };
    let paren = own < ctx;
    if paren {
        out.push('(');
    }
    match t.kind() {
        TermKind::Nil => out.push('0'),
        TermKind::Var(x) => out.push_str(x.as_str()),
        TermKind::Prefix(a, body) => {
            let _ = write!(out, "{a}.");
            write_term(body, PREC_PREFIX, out);
        }
        TermKind::Sum(l, r) => {
            write_term(l, PREC_SUM, out);
            out.push_str(" + ");
            write_term(r, PREC_PAR, out);
        }
        TermKind::Par(l, r) => {
            write_term(l, PREC_PAR, out);
            out.push_str(" || ");
            write_term(r, PREC_PREFIX, out);
        }
        TermKind::LeftMerge(l, r) => write_app("lmerge", l, r, out),
        TermKind::CommMerge(l, r) => write_app("cmerge", l, r, out),
        TermKind::Op(f, l, r) => write_app(f.as_str(), l, r, out),
    }
    if paren {
        out.push(')');
    }
}

fn write_app(name: &str, l: &Term, r: &Term, out: &mut String) {
    out.push_str(name);
    out.push('(');
    write_term(l, PREC_SUM, out);
    out.push_str(", ");
    write_term(r, PREC_SUM, out);
    out.push(')');
}

/// Renders with the fewest parentheses that still parse back to the same tree.
pub fn render_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, PREC_SUM, &mut s);
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}
