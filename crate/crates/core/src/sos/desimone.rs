//! Binary operators defined by rules in de Simone format.
//!
//! Rules mention the fixed variables `x`, `y` (the arguments) and `x'`, `y'`
//! (their derivatives). A premise `x -a-> x'` tests the left argument; the
//! conclusion is always `f(x,y) -μ-> target`.

use std::fmt;

use serde::Serialize;

use crate::equiv::strong_bisim;
use crate::error::{Error, Result};
use crate::gen::{sample_rng, TermGen};
use crate::term::{ident, Action, Alphabet, Ident, Term, TermKind};

use super::OpRegistry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Arg {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub source: Ident,
    pub label: Action,
    /// `None` for a negative premise `x -a-/->`.
    pub target: Option<Ident>,
    pub negative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosRule {
    pub premises: Vec<Premise>,
    pub label: Action,
    pub target: Term,
    /// Source line, for diagnostics (0 when built programmatically).
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeSimoneRuleSet {
    pub op: Ident,
    pub arity: usize,
    pub rules: Vec<SosRule>,
}

pub(crate) fn var_x() -> Ident {
    ident("x")
}
pub(crate) fn var_y() -> Ident {
    ident("y")
}
pub(crate) fn var_xp() -> Ident {
    ident("x'")
}
pub(crate) fn var_yp() -> Ident {
    ident("y'")
}

impl SosRule {
    pub fn premise(&self, arg: Arg) -> Option<&Premise> {
        let v = match arg {
            Arg::Left => var_x(),
            Arg::Right => var_y(),
        };
        self.premises.iter().find(|p| p.source == v && !p.negative)
    }

    /// `Some(μ)` when the rule has a single premise on `arg` labelled `μ` and
    /// concludes with the same label.
    pub fn fires_alone(&self, arg: Arg) -> Option<Action> {
        if self.premises.len() != 1 {
            return None;
        }
        let p = self.premise(arg)?;
        (p.label == self.label).then_some(p.label)
    }

    /// `Some(α)` for `x -α-> x', y -ᾱ-> y'` concluding with `τ`.
    pub fn sync_action(&self) -> Option<Action> {
        if self.premises.len() != 2 || self.label != Action::Tau {
            return None;
        }
        let (px, py) = (self.premise(Arg::Left)?, self.premise(Arg::Right)?);
        px.label.complements(py.label).then_some(px.label)
    }
}

impl fmt::Display for SosRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prem: Vec<String> = self
            .premises
            .iter()
            .map(|p| match (p.negative, p.target) {
                (true, _) | (_, None) => format!("{} -{}-/->", p.source, p.label),
                (false, Some(t)) => format!("{} -{}-> {}", p.source, p.label, t),
            })
            .collect();
        write!(f, "{} ==> f(x,y) -{}-> {}", prem.join(", "), self.label, self.target)
    }
}

/// Applies one rule to `op(l, r)` given the moves of both arguments.
pub(crate) fn fire(
    rule: &SosRule,
    l: &Term,
    r: &Term,
    lm: &[(Action, Term)],
    rm: &[(Action, Term)],
    out: &mut Vec<(Action, Term)>,
) {
    let pick = |arg: Arg, moves: &[(Action, Term)]| -> Vec<Option<Term>> {
        match rule.premise(arg) {
            None => vec![None],
            Some(p) => moves
                .iter()
                .filter(|(a, _)| *a == p.label)
                .map(|(_, t)| Some(t.clone()))
                .collect(),
        }
    };
    let xs = pick(Arg::Left, lm);
    let ys = pick(Arg::Right, rm);
    for xd in &xs {
        for yd in &ys {
            let t = rule.target.map_vars(&mut |v| {
                if v == var_x() {
                    Some(l.clone())
                } else if v == var_y() {
                    Some(r.clone())
                } else if v == var_xp() {
                    xd.clone()
                } else if v == var_yp() {
                    yd.clone()
                } else {
                    None
                }
            });
            out.push((rule.label, t.ac_canonical()));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Arity(usize),
    NoPremises,
    NegativePremise,
    UnknownSource(String),
    DuplicatePremise(String),
    PremiseTarget { expected: String, found: String },
    RepeatedTargetVariable(String),
    TestedArgumentInTarget(String),
    UntestedDerivativeInTarget(String),
    UnknownTargetVariable(String),
    TargetShape(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending rule, `None` for whole-set problems.
    pub rule: Option<usize>,
    pub line: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.rule {
            write!(f, "rule {}", i + 1)?;
            if self.line > 0 {
                write!(f, " (line {})", self.line)?;
            }
            f.write_str(": ")?;
        }
        match &self.kind {
            ViolationKind::Arity(n) => write!(f, "arity {n}, only binary operators are supported"),
            ViolationKind::NoPremises => f.write_str("rule without premises (every rule must consume an action)"),
            ViolationKind::NegativePremise => f.write_str("negative premises are not allowed"),
            ViolationKind::UnknownSource(v) => write!(f, "premise tests `{v}`, which is not an argument"),
            ViolationKind::DuplicatePremise(v) => write!(f, "argument `{v}` is tested more than once"),
            ViolationKind::PremiseTarget { expected, found } => {
                write!(f, "premise target must be `{expected}`, found `{found}`")
            }
            ViolationKind::RepeatedTargetVariable(v) => write!(f, "variable `{v}` occurs more than once in the target"),
            ViolationKind::TestedArgumentInTarget(v) => {
                write!(f, "target uses `{v}` although that argument is tested")
            }
            ViolationKind::UntestedDerivativeInTarget(v) => {
                write!(f, "target uses `{v}` although no premise provides it")
            }
            ViolationKind::UnknownTargetVariable(v) => write!(f, "unknown variable `{v}` in the target"),
            ViolationKind::TargetShape(t) => write!(
                f,
                "target `{t}` is neither a variable nor a single operator applied to variables"
            ),
        }
    }
}

fn target_shape_ok(t: &Term, op: Ident) -> bool {
    let all_vars = |kids: Vec<&Term>| kids.iter().all(|k| matches!(k.kind(), TermKind::Var(_)));
    match t.kind() {
        TermKind::Nil | TermKind::Var(_) => true,
        TermKind::Prefix(..) | TermKind::Sum(..) | TermKind::Par(..) => all_vars(t.children()),
        TermKind::Op(g, ..) => *g == op && all_vars(t.children()),
        TermKind::LeftMerge(..) | TermKind::CommMerge(..) => false,
    }
}

fn var_occurrences(t: &Term, out: &mut Vec<Ident>) {
    match t.kind() {
        TermKind::Var(x) => out.push(*x),
        _ => t.children().iter().for_each(|c| var_occurrences(c, out)),
    }
}

/// Checks the de Simone constraints and the target shape restriction.
/// Returns every violation found; an empty list means the set is valid.
pub fn validate_de_simone(rs: &DeSimoneRuleSet) -> Vec<Violation> {
    let mut out = Vec::new();
    if rs.arity != 2 {
        out.push(Violation {
            rule: None,
            line: 0,
            kind: ViolationKind::Arity(rs.arity),
        });
    }
    for (i, rule) in rs.rules.iter().enumerate() {
        let mut push = |kind| {
            out.push(Violation {
                rule: Some(i),
                line: rule.line,
                kind,
            })
        };
        if rule.premises.is_empty() {
            push(ViolationKind::NoPremises);
        }
        let mut tested: Vec<Ident> = Vec::new();
        for p in &rule.premises {
            if p.negative || p.target.is_none() {
                push(ViolationKind::NegativePremise);
                continue;
            }
            let expected = if p.source == var_x() {
                var_xp()
            } else if p.source == var_y() {
                var_yp()
            } else {
                push(ViolationKind::UnknownSource(p.source.to_string()));
                continue;
            };
            if tested.contains(&p.source) {
                push(ViolationKind::DuplicatePremise(p.source.to_string()));
            }
            tested.push(p.source);
            let found = p.target.expect("positive premise has a target");
            if found != expected {
                push(ViolationKind::PremiseTarget {
                    expected: expected.to_string(),
                    found: found.to_string(),
                });
            }
        }
        let mut occ = Vec::new();
        var_occurrences(&rule.target, &mut occ);
        let mut seen: Vec<Ident> = Vec::new();
        let mut repeated: Vec<Ident> = Vec::new();
        for v in occ {
            if seen.contains(&v) {
                if !repeated.contains(&v) {
                    repeated.push(v);
                    push(ViolationKind::RepeatedTargetVariable(v.to_string()));
                }
                continue;
            }
            seen.push(v);
            let (arg, derivative) = if v == var_x() {
                (var_x(), false)
            } else if v == var_y() {
                (var_y(), false)
            } else if v == var_xp() {
                (var_x(), true)
            } else if v == var_yp() {
                (var_y(), true)
            } else {
                push(ViolationKind::UnknownTargetVariable(v.to_string()));
                continue;
            };
            match (derivative, tested.contains(&arg)) {
                (false, true) => push(ViolationKind::TestedArgumentInTarget(v.to_string())),
                (true, false) => push(ViolationKind::UntestedDerivativeInTarget(v.to_string())),
                _ => {}
            }
        }
        if !target_shape_ok(&rule.target, rs.op) {
            push(ViolationKind::TargetShape(rule.target.to_string()));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Prop1Status {
    /// A synchronisation rule and a firing rule for every action.
    Complete,
    /// Every present rule is consistent, but some required rules are absent.
    Partial,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetCheck {
    pub rule: usize,
    pub target: String,
    /// `structural` for the whitelisted shapes, `sampled` otherwise.
    pub method: &'static str,
    pub samples: usize,
    pub ok: bool,
    pub counterexample: Option<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Report {
    pub rules: usize,
    pub violations: Vec<String>,
    pub sync_actions: Vec<String>,
    pub missing_actions: Vec<String>,
    pub targets: Vec<TargetCheck>,
    pub status: Prop1Status,
}

impl Prop1Report {
    pub fn targets_ok(&self) -> bool {
        self.targets.iter().all(|t| t.ok)
    }
}

/// Reads a rule target as a term in `x`, `y` by dropping primes.
fn unprimed(t: &Term) -> Term {
    t.map_vars(&mut |v| {
        if v == var_xp() {
            Some(Term::var_id(var_x()))
        } else if v == var_yp() {
            Some(Term::var_id(var_y()))
        } else {
            None
        }
    })
}

/// Checks the rule shapes the operator needs to satisfy PF and, for every rule,
/// whether its target behaves like `x || y` (structurally or on `samples`
/// sampled closed instances of depth at most 4).
pub fn check_prop1_shape(rs: &DeSimoneRuleSet, alphabet: &Alphabet, samples: usize, seed: u64) -> Prop1Report {
    let violations: Vec<String> = validate_de_simone(rs).iter().map(|v| v.to_string()).collect();
    let mut sync_actions: Vec<Action> = rs.rules.iter().filter_map(|r| r.sync_action()).collect();
    sync_actions.sort();
    sync_actions.dedup();
    let missing: Vec<Action> = alphabet
        .actions()
        .into_iter()
        .filter(|&mu| {
            !rs.rules
                .iter()
                .any(|r| r.fires_alone(Arg::Left) == Some(mu) || r.fires_alone(Arg::Right) == Some(mu))
        })
        .collect();

    let registry = if violations.is_empty() {
        OpRegistry::new().with(rs.clone()).ok()
    } else {
        None
    };
    let x = Term::var_id(var_x());
    let y = Term::var_id(var_y());
    let whitelist = [Term::par(x.clone(), y.clone()), Term::par(y.clone(), x.clone())];
    let gen = TermGen::new(alphabet.actions(), 4);
    let mut targets = Vec::new();
    for (i, rule) in rs.rules.iter().enumerate() {
        let t = unprimed(&rule.target);
        if whitelist.contains(&t) {
            targets.push(TargetCheck {
                rule: i,
                target: rule.target.to_string(),
                method: "structural",
                samples: 0,
                ok: true,
                counterexample: None,
            });
            continue;
        }
        let mut check = TargetCheck {
            rule: i,
            target: rule.target.to_string(),
            method: "sampled",
            samples: 0,
            ok: false,
            counterexample: None,
        };
        if let Some(reg) = &registry {
            check.ok = true;
            for k in 0..samples {
                let mut rng = sample_rng(seed, k as u64);
                let p = gen.sample(&mut rng);
                let q = gen.sample(&mut rng);
                let inst = t.map_vars(&mut |v| {
                    if v == var_x() {
                        Some(p.clone())
                    } else if v == var_y() {
                        Some(q.clone())
                    } else {
                        None
                    }
                });
                let par = Term::par(p.clone(), q.clone());
                check.samples = k + 1;
                if !strong_bisim(&inst, &par, reg).unwrap_or(false) {
                    check.ok = false;
                    check.counterexample = Some((inst.to_string(), par.to_string()));
                    break;
                }
            }
        }
        targets.push(check);
    }

    let status = if rs.rules.is_empty() || !violations.is_empty() || targets.iter().any(|t| !t.ok) {
        Prop1Status::Fail
    } else if !sync_actions.is_empty() && missing.is_empty() {
        Prop1Status::Complete
    } else {
        Prop1Status::Partial
    };
    Prop1Report {
        rules: rs.rules.len(),
        violations,
        sync_actions: sync_actions.iter().map(|a| a.to_string()).collect(),
        missing_actions: missing.iter().map(|a| a.to_string()).collect(),
        targets,
        status,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum PfVerdict {
    Pass {
        samples: usize,
    },
    Fail {
        sample: usize,
        p: String,
        q: String,
        lhs: String,
        rhs: String,
    },
}

impl PfVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PfVerdict::Pass { .. })
    }
}

/// Tests `p || q ~B f(p,q) + f(q,p)` on sampled closed `p`, `q`.
pub fn check_parallel_decomposition(
    rs: &DeSimoneRuleSet,
    alphabet: &Alphabet,
    samples: usize,
    seed: u64,
    depth: usize,
) -> Result<PfVerdict> {
    if rs.arity != 2 {
        return Err(Error::ArityMismatch {
            op: rs.op.to_string(),
            arity: rs.arity,
        });
    }
    let reg = OpRegistry::new().with(rs.clone())?;
    let gen = TermGen::new(alphabet.actions(), depth);
    for k in 0..samples {
        let mut rng = sample_rng(seed, k as u64);
        let p = gen.sample(&mut rng);
        let q = gen.sample(&mut rng);
        let lhs = Term::par(p.clone(), q.clone());
        let rhs = Term::sum(Term::op(rs.op, p.clone(), q.clone()), Term::op(rs.op, q.clone(), p.clone()));
        if !strong_bisim(&lhs, &rhs, &reg)? {
            return Ok(PfVerdict::Fail {
                sample: k,
                p: p.to_string(),
                q: q.to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    Ok(PfVerdict::Pass { samples })
}
