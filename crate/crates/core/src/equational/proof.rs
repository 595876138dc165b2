//! Equational proofs and their checker.
//!
//! A [`Proof`] is a list of steps, each an equation justified by one rule of
//! equational logic:
//!
//! * e1 `t ≈ t`; e2 symmetry; e3 transitivity;
//! * e4 a substitution instance of an axiom of the system;
//! * e5 prefix congruence; e6 `+` congruence; e7 congruence for `||`, and
//!   also for the merges and user operators;
//! * `gap`: a closed equation justified by a semantic check, allowed only in
//!   proofs that declare a trusted gap.
//!
//! Steps are compared modulo associativity and commutativity of `+` whenever
//! the system contains A1 and A2, so reordering summands never needs a step.
//!
//! Positions: a leaf step (e1, e4, gap) records where its equation sits in the
//! rewritten term; e2 and e3 share the position of their premises; the
//! premise for argument `i` of a congruence step at `π` sits at `π·i`.
//!
//! Proofs are usually produced through a [`Derivation`], a sequence of axiom
//! applications at positions of a term, which is expanded into steps.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equiv::{equiv, Semantics};
use crate::error::{Error, Result};
use crate::sos::OpRegistry;
use crate::syntax::{parse_term, AxiomSystem, Equation};
use crate::term::{Alphabet, Ident, Position, Substitution, Term, TermKind};

/// The marker recorded when the last part of a proof rests on the known
/// ground completeness of the basic axioms for the sequential fragment.
pub const TRUSTED_GAP: &str = "vG90-BCCSP-completeness";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    Gap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axiom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subst: Option<Substitution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantics: Option<Semantics>,
    pub position: Position,
    pub premises: Vec<usize>,
    pub lhs: Term,
    pub rhs: Term,
}

impl Step {
    fn new(rule: Rule, position: Position, premises: Vec<usize>, lhs: Term, rhs: Term) -> Step {
        Step {
            rule,
            axiom: None,
            subst: None,
            semantics: None,
            position,
            premises,
            lhs,
            rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Goal {
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Proof {
    pub system: String,
    pub alphabet: Alphabet,
    pub goal: Goal,
    pub steps: Vec<Step>,
    pub trusted_gap: Option<String>,
}

#[derive(Deserialize)]
struct RawStep {
    rule: Rule,
    axiom: Option<String>,
    subst: Option<BTreeMap<String, String>>,
    semantics: Option<String>,
    #[serde(default)]
    position: Position,
    #[serde(default)]
    premises: Vec<usize>,
    lhs: String,
    rhs: String,
}

#[derive(Deserialize)]
struct RawGoal {
    lhs: String,
    rhs: String,
}

#[derive(Deserialize)]
struct RawProof {
    system: String,
    alphabet: Vec<String>,
    goal: RawGoal,
    steps: Vec<RawStep>,
    trusted_gap: Option<String>,
}

impl Proof {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proofs serialise")
    }

    pub fn from_json(text: &str) -> Result<Proof> {
        let raw: RawProof = serde_json::from_str(text)?;
        let alphabet = Alphabet::new(&raw.alphabet)?;
        let term = |s: &str| parse_term(s, &alphabet);
        let mut steps = Vec::with_capacity(raw.steps.len());
        for s in raw.steps {
            let subst = match s.subst {
                None => None,
                Some(map) => {
                    let mut sigma = Substitution::new();
                    for (k, v) in map {
                        let x = Ident::new(&k).ok_or_else(|| Error::MalformedProof(format!("bad variable `{k}`")))?;
                        sigma.insert(x, term(&v)?);
                    }
                    Some(sigma)
                }
            };
            steps.push(Step {
                rule: s.rule,
                axiom: s.axiom,
                subst,
                semantics: s.semantics.map(|x| x.parse()).transpose()?,
                position: s.position,
                premises: s.premises,
                lhs: term(&s.lhs)?,
                rhs: term(&s.rhs)?,
            });
        }
        Ok(Proof {
            system: raw.system,
            goal: Goal {
                lhs: term(&raw.goal.lhs)?,
                rhs: term(&raw.goal.rhs)?,
            },
            alphabet,
            steps,
            trusted_gap: raw.trusted_gap,
        })
    }
}

/// The first step that fails to check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvalidStep {
    /// Index of the step; `steps.len()` when the goal is not the conclusion.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for InvalidStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

pub fn check_proof(pr: &Proof, system: &AxiomSystem) -> std::result::Result<(), InvalidStep> {
    check_proof_with(pr, system, &OpRegistry::new())
}

fn congruence_rule(t: &Term) -> Option<Rule> {
    match t.kind() {
        TermKind::Prefix(..) => Some(Rule::E5),
        TermKind::Sum(..) => Some(Rule::E6),
        TermKind::Par(..) | TermKind::LeftMerge(..) | TermKind::CommMerge(..) | TermKind::Op(..) => Some(Rule::E7),
        TermKind::Nil | TermKind::Var(_) => None,
    }
}

/// Same head symbol, ignoring arguments.
fn same_head(a: &Term, b: &Term) -> bool {
    match (a.kind(), b.kind()) {
        (TermKind::Prefix(x, _), TermKind::Prefix(y, _)) => x == y,
        (TermKind::Op(f, ..), TermKind::Op(g, ..)) => f == g,
        (x, y) => std::mem::discriminant(x) == std::mem::discriminant(y),
    }
}

pub fn check_proof_with(pr: &Proof, system: &AxiomSystem, reg: &OpRegistry) -> std::result::Result<(), InvalidStep> {
    let ac = system.contains("A1") && system.contains("A2");
    let same = |a: &Term, b: &Term| if ac { a.ac_equal(b) } else { a == b };
    for (i, s) in pr.steps.iter().enumerate() {
        let fail = |reason: String| Err(InvalidStep { step: i, reason });
        if s.premises.iter().any(|&p| p >= i) {
            return fail("premises must refer to earlier steps".into());
        }
        let prem: Vec<&Step> = s.premises.iter().map(|&p| &pr.steps[p]).collect();
        let arity = match s.rule {
            Rule::E1 | Rule::E4 | Rule::Gap => 0,
            Rule::E2 | Rule::E5 => 1,
            Rule::E3 | Rule::E6 | Rule::E7 => 2,
        };
        if prem.len() != arity {
            return fail(format!("{:?} needs {arity} premises", s.rule));
        }
        match s.rule {
            Rule::E1 => {
                if !same(&s.lhs, &s.rhs) {
                    return fail("reflexivity between different terms".into());
                }
            }
            Rule::E2 => {
                if prem[0].position != s.position {
                    return fail("symmetry changes the position".into());
                }
                if !same(&s.lhs, &prem[0].rhs) || !same(&s.rhs, &prem[0].lhs) {
                    return fail("symmetry does not swap the premise".into());
                }
            }
            Rule::E3 => {
                if prem[0].position != s.position || prem[1].position != s.position {
                    return fail("transitivity across positions".into());
                }
                if !same(&prem[0].rhs, &prem[1].lhs) {
                    return fail("transitivity chain is broken".into());
                }
                if !same(&s.lhs, &prem[0].lhs) || !same(&s.rhs, &prem[1].rhs) {
                    return fail("transitivity conclusion does not match its premises".into());
                }
            }
            Rule::E4 => {
                let Some(name) = &s.axiom else {
                    return fail("substitution step without an axiom".into());
                };
                let Some(eq) = system.get(name) else {
                    return fail(format!("`{name}` is not an axiom of {}", system.name));
                };
                let sigma = s.subst.clone().unwrap_or_default();
                let (l, r) = eq.instantiate(&sigma);
                if !same(&s.lhs, &l) || !same(&s.rhs, &r) {
                    return fail(format!("not an instance of `{name}`"));
                }
            }
            Rule::E5 | Rule::E6 | Rule::E7 => {
                if congruence_rule(&s.lhs) != Some(s.rule) || !same_head(&s.lhs, &s.rhs) {
                    return fail(format!("{:?} does not apply to these head symbols", s.rule));
                }
                let (ls, rs) = (s.lhs.children(), s.rhs.children());
                for (k, p) in prem.iter().enumerate() {
                    let mut expected = s.position.clone();
                    expected.push(k);
                    if p.position != expected {
                        return fail(format!("premise {k} is not at position {expected:?}"));
                    }
                    if !same(ls[k], &p.lhs) || !same(rs[k], &p.rhs) {
                        return fail(format!("argument {k} does not match premise"));
                    }
                }
            }
            Rule::Gap => {
                if pr.trusted_gap.is_none() {
                    return fail("semantic step in a proof without a trusted gap".into());
                }
                let Some(sem) = s.semantics else {
                    return fail("semantic step without semantics".into());
                };
                match equiv(&s.lhs, &s.rhs, sem, reg) {
                    Ok(true) => {}
                    Ok(false) => return fail(format!("the two sides are not {sem}-equivalent")),
                    Err(e) => return fail(e.to_string()),
                }
            }
        }
    }
    let Some(last) = pr.steps.last() else {
        return Err(InvalidStep {
            step: 0,
            reason: "empty proof".into(),
        });
    };
    if !same(&last.lhs, &pr.goal.lhs) || !same(&last.rhs, &pr.goal.rhs) {
        return Err(InvalidStep {
            step: pr.steps.len(),
            reason: "the last step is not the goal".into(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Justification {
    Axiom {
        name: String,
        reversed: bool,
        subst: Substitution,
    },
    Gap(Semantics),
}

/// One rewrite inside a derivation. At `pos` the current subterm is replaced
/// by `view`, an AC-equal reshaping of it; the justification rewrites `view`
/// at `inner` and yields `after`.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub pos: Position,
    pub view: Term,
    pub inner: Position,
    pub just: Justification,
    pub after: Term,
}

/// A sequence of rewrites from `start` to `end`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    start: Term,
    end: Term,
    events: Vec<Event>,
}

fn concat(a: &[usize], b: &[usize]) -> Position {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

impl Derivation {
    pub fn new(t: Term) -> Derivation {
        Derivation {
            start: t.clone(),
            end: t,
            events: Vec::new(),
        }
    }

    pub fn start(&self) -> &Term {
        &self.start
    }

    pub fn end(&self) -> &Term {
        &self.end
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Rewrites with an axiom instance. `view` must be AC-equal to the current
    /// subterm at `pos`, and the chosen side of the instance AC-equal to the
    /// subterm of `view` at `inner`.
    pub fn apply(
        &mut self,
        pos: &[usize],
        view: Term,
        inner: &[usize],
        eq: &Equation,
        reversed: bool,
        subst: Substitution,
    ) -> Result<()> {
        let current = self.end.subterm(pos).ok_or_else(|| Error::BadPosition(pos.to_vec()))?;
        let no_match = || Error::NoMatch {
            axiom: eq.name.clone(),
            position: concat(pos, inner),
        };
        if !current.ac_equal(&view) {
            return Err(no_match());
        }
        let (mut l, mut r) = eq.instantiate(&subst);
        if reversed {
            std::mem::swap(&mut l, &mut r);
        }
        let target = view.subterm(inner).ok_or_else(|| Error::BadPosition(inner.to_vec()))?;
        if !target.ac_equal(&l) {
            return Err(no_match());
        }
        let after = view.replace_at(inner, r).expect("inner position checked");
        self.end = self.end.replace_at(pos, after.clone()).expect("position checked");
        self.events.push(Event {
            pos: pos.to_vec(),
            view,
            inner: inner.to_vec(),
            just: Justification::Axiom {
                name: eq.name.clone(),
                reversed,
                subst,
            },
            after,
        });
        Ok(())
    }

    /// [`Derivation::apply`] on the current subterm itself.
    pub fn apply_here(&mut self, pos: &[usize], eq: &Equation, reversed: bool, subst: Substitution) -> Result<()> {
        let view = self.end.subterm(pos).ok_or_else(|| Error::BadPosition(pos.to_vec()))?.clone();
        self.apply(pos, view, &[], eq, reversed, subst)
    }

    /// Replaces the whole term by a term claimed equivalent under `s`.
    pub fn gap(&mut self, to: Term, s: Semantics) {
        self.events.push(Event {
            pos: Vec::new(),
            view: self.end.clone(),
            inner: Vec::new(),
            just: Justification::Gap(s),
            after: to.clone(),
        });
        self.end = to;
    }

    /// Embeds a derivation of the subterm at `pos`.
    pub fn lift(&mut self, pos: &[usize], sub: Derivation) -> Result<()> {
        if self.end.subterm(pos) != Some(&sub.start) {
            return Err(Error::BadPosition(pos.to_vec()));
        }
        for mut e in sub.events {
            e.pos = concat(pos, &e.pos);
            self.events.push(e);
        }
        self.end = self.end.replace_at(pos, sub.end).expect("position checked");
        Ok(())
    }

    /// Expands the derivation into proof steps appended to `out`; returns the
    /// index of the step proving `start ≈ end` at the root.
    pub fn expand_into(&self, out: &mut Vec<Step>) -> usize {
        let mut cur = self.start.clone();
        let mut acc: Option<usize> = None;
        for e in &self.events {
            let before = cur.replace_at(&e.pos, e.view.clone()).expect("event position");
            let after = cur.replace_at(&e.pos, e.after.clone()).expect("event position");
            let full = concat(&e.pos, &e.inner);
            let mut idx = match &e.just {
                Justification::Axiom { name, reversed, subst } => {
                    let eq_l = before.subterm(&full).expect("event position").clone();
                    let eq_r = after.subterm(&full).expect("event position").clone();
                    let (l, r) = if *reversed { (eq_r, eq_l) } else { (eq_l, eq_r) };
                    let mut s = Step::new(Rule::E4, full.clone(), Vec::new(), l, r);
                    s.axiom = Some(name.clone());
                    s.subst = Some(subst.clone());
                    out.push(s);
                    let mut idx = out.len() - 1;
                    if *reversed {
                        let p = &out[idx];
                        out.push(Step::new(Rule::E2, full.clone(), vec![idx], p.rhs.clone(), p.lhs.clone()));
                        idx = out.len() - 1;
                    }
                    idx
                }
                Justification::Gap(sem) => {
                    let mut s = Step::new(Rule::Gap, full.clone(), Vec::new(), before.clone(), after.clone());
                    s.semantics = Some(*sem);
                    out.push(s);
                    out.len() - 1
                }
            };
            for depth in (0..full.len()).rev() {
                let at = &full[..depth];
                let (nb, na) = (before.subterm(at).expect("path"), after.subterm(at).expect("path"));
                let rule = congruence_rule(nb).expect("a node with children");
                let mut premises = Vec::new();
                for (k, child) in nb.children().into_iter().enumerate() {
                    if k == full[depth] {
                        premises.push(idx);
                    } else {
                        out.push(Step::new(Rule::E1, concat(at, &[k]), Vec::new(), child.clone(), child.clone()));
                        premises.push(out.len() - 1);
                    }
                }
                out.push(Step::new(rule, at.to_vec(), premises, nb.clone(), na.clone()));
                idx = out.len() - 1;
            }
            // the root-level step for this event
            acc = Some(match acc {
                None => idx,
                Some(a) => {
                    let lhs = out[a].lhs.clone();
                    out.push(Step::new(Rule::E3, Vec::new(), vec![a, idx], lhs, after.clone()));
                    out.len() - 1
                }
            });
            cur = after;
        }
        acc.unwrap_or_else(|| {
            out.push(Step::new(Rule::E1, Vec::new(), Vec::new(), self.start.clone(), self.start.clone()));
            out.len() - 1
        })
    }

    /// A proof of `start ≈ end`.
    pub fn into_proof(self, system: &AxiomSystem) -> Proof {
        let mut steps = Vec::new();
        self.expand_into(&mut steps);
        let trusted_gap = self
            .events
            .iter()
            .any(|e| matches!(e.just, Justification::Gap(_)))
            .then(|| TRUSTED_GAP.to_string());
        Proof {
            system: system.name.clone(),
            alphabet: system.alphabet.clone(),
            goal: Goal {
                lhs: self.start,
                rhs: self.end,
            },
            steps,
            trusted_gap,
        }
    }
}

/// A proof of `p.start ≈ q.start` from derivations meeting in AC-equal terms,
/// or in terms related by a semantic gap.
pub fn join(p: &Derivation, q: &Derivation, system: &AxiomSystem, gap: Option<Semantics>) -> Proof {
    let mut steps = Vec::new();
    let mut ip = p.expand_into(&mut steps);
    let iq = q.expand_into(&mut steps);
    if let Some(sem) = gap {
        let mut s = Step::new(Rule::Gap, Vec::new(), Vec::new(), p.end.clone(), q.end.clone());
        s.semantics = Some(sem);
        steps.push(s);
        let ig = steps.len() - 1;
        steps.push(Step::new(Rule::E3, Vec::new(), vec![ip, ig], p.start.clone(), q.end.clone()));
        ip = steps.len() - 1;
    }
    steps.push(Step::new(Rule::E2, Vec::new(), vec![iq], q.end.clone(), q.start.clone()));
    let ir = steps.len() - 1;
    steps.push(Step::new(Rule::E3, Vec::new(), vec![ip, ir], p.start.clone(), q.start.clone()));
    let has_gap = gap.is_some() || [p, q].iter().any(|d| d.events.iter().any(|e| matches!(e.just, Justification::Gap(_))));
    Proof {
        system: system.name.clone(),
        alphabet: system.alphabet.clone(),
        goal: Goal {
            lhs: p.start.clone(),
            rhs: q.start.clone(),
        },
        steps,
        trusted_gap: has_gap.then(|| TRUSTED_GAP.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_axiom_system;

    fn sys() -> AxiomSystem {
        let text = "A0 : X + 0 = X\nA1 : X + Y = Y + X\nA2 : (X + Y) + Z = X + (Y + Z)\nA3 : X + X = X\nP0 : X || 0 = X\nP1 : X || Y = Y || X\n";
        parse_axiom_system(text, "e1", &Alphabet::new(["a", "b"]).unwrap()).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &Alphabet::new(["a", "b"]).unwrap()).unwrap()
    }

    fn deep_derivation(system: &AxiomSystem) -> Derivation {
        let mut d = Derivation::new(t("a.(b.(0 || 0) + 0) + b.0"));
        let p0 = system.get("P0").unwrap().into_owned();
        let a0 = system.get("A0").unwrap().into_owned();
        d.apply_here(&[0, 0, 0, 0], &p0, false, Substitution::new().with("X", Term::nil()))
            .unwrap();
        d.apply_here(&[0, 0], &a0, false, Substitution::new().with("X", t("b.0"))).unwrap();
        d
    }

    #[test]
    fn derivations_expand_to_checkable_proofs() {
        let system = sys();
        let d = deep_derivation(&system);
        assert_eq!(d.end(), &t("a.b.0 + b.0"));
        let pr = d.into_proof(&system);
        assert_eq!(check_proof(&pr, &system), Ok(()));
        assert!(pr.trusted_gap.is_none());
    }

    #[test]
    fn reversed_and_reshaped_rewrites() {
        let system = sys();
        let a3 = system.get("A3").unwrap().into_owned();
        let mut d = Derivation::new(t("a.0 + b.0 + a.0"));
        // view the sum as (a.0 + a.0) + b.0 and contract the duplicate
        let view = t("(a.0 + a.0) + b.0");
        d.apply(&[], view, &[0], &a3, false, Substitution::new().with("X", t("a.0")))
            .unwrap();
        let a0 = system.get("A0").unwrap().into_owned();
        d.apply_here(&[], &a0, true, Substitution::new().with("X", t("a.0 + b.0")))
            .unwrap();
        assert_eq!(d.end(), &t("a.0 + b.0 + 0"));
        let pr = d.into_proof(&system);
        assert_eq!(check_proof(&pr, &system), Ok(()));
    }

    #[test]
    fn mismatched_instances_are_refused() {
        let system = sys();
        let p0 = system.get("P0").unwrap().into_owned();
        let mut d = Derivation::new(t("0 || b.0"));
        let err = d.apply_here(&[], &p0, false, Substitution::new().with("X", Term::nil()));
        assert!(matches!(err, Err(Error::NoMatch { .. })));
    }

    #[test]
    fn checker_rejects_foreign_axioms_and_broken_chains() {
        let system = sys();
        let mut pr = deep_derivation(&system).into_proof(&system);
        let e4 = pr.steps.iter().position(|s| s.rule == Rule::E4).unwrap();
        let mut bad = pr.clone();
        bad.steps[e4].axiom = Some("T".into());
        assert_eq!(check_proof(&bad, &system).unwrap_err().step, e4);
        let e3 = pr.steps.iter().position(|s| s.rule == Rule::E3).unwrap();
        pr.steps[e3].premises.swap(0, 1);
        assert!(check_proof(&pr, &system).is_err());
    }

    #[test]
    fn gaps_need_a_declared_trust_marker() {
        let system = sys();
        let mut d = Derivation::new(t("a.(b.0 + b.0)"));
        d.gap(t("a.b.0"), Semantics::T);
        let mut pr = d.into_proof(&system);
        assert_eq!(pr.trusted_gap.as_deref(), Some(TRUSTED_GAP));
        assert_eq!(check_proof(&pr, &system), Ok(()));
        pr.trusted_gap = None;
        assert!(check_proof(&pr, &system).is_err());
    }

    #[test]
    fn json_round_trip() {
        let system = sys();
        let pr = deep_derivation(&system).into_proof(&system);
        let back = Proof::from_json(&pr.to_json()).unwrap();
        assert_eq!(back, pr);
    }

    #[test]
    fn join_meets_in_the_middle() {
        let system = sys();
        let p = deep_derivation(&system);
        let mut q = Derivation::new(t("b.0 + a.b.0 + 0"));
        let a0 = system.get("A0").unwrap().into_owned();
        q.apply_here(&[], &a0, false, Substitution::new().with("X", t("b.0 + a.b.0")))
            .unwrap();
        let pr = join(&p, &q, &system, None);
        assert_eq!(check_proof(&pr, &system), Ok(()));
        assert_eq!(pr.goal.rhs, t("b.0 + a.b.0 + 0"));
    }
}
