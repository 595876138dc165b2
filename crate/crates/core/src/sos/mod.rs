//! Structural operational semantics and finite transition systems.
//!
//! The CCS rules: `μ.x` does `μ` and becomes `x`; a sum does whatever one of
//! its summands does; `x || y` interleaves and lets complementary actions
//! synchronise into `τ`. `lmerge(x, y)` only lets `x` move, `cmerge(x, y)` only
//! synchronises; both continue as a parallel composition. User operators are
//! executed from their de Simone rule sets.
//!
//! Variables have no transitions, so `step` is defined on open terms too.

pub mod desimone;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};

pub use desimone::{
    check_parallel_decomposition, check_prop1_shape, validate_de_simone, Arg, DeSimoneRuleSet, PfVerdict,
    Premise, Prop1Report, Prop1Status, SosRule, TargetCheck, Violation,
};

use crate::error::{Error, Result};
use crate::term::{Action, Ident, Term, TermKind};

/// The operators a term may refer to through `Op` nodes.
#[derive(Clone, Debug, Default)]
pub struct OpRegistry {
    ops: BTreeMap<Ident, Arc<DeSimoneRuleSet>>,
}

impl OpRegistry {
    pub fn new() -> OpRegistry {
        OpRegistry::default()
    }

    /// Registers a rule set after validating it.
    pub fn register(&mut self, rs: DeSimoneRuleSet) -> Result<()> {
        let violations = validate_de_simone(&rs);
        if !violations.is_empty() {
            return Err(Error::NonDeSimone(violations.iter().map(|v| v.to_string()).collect()));
        }
        self.ops.insert(rs.op, Arc::new(rs));
        Ok(())
    }

    pub fn with(mut self, rs: DeSimoneRuleSet) -> Result<OpRegistry> {
        self.register(rs)?;
        Ok(self)
    }

    pub fn get(&self, op: Ident) -> Option<&DeSimoneRuleSet> {
        self.ops.get(&op).map(|r| r.as_ref())
    }
}

type Moves = Arc<Vec<(Action, Term)>>;

/// Computes transitions, caching the moves of subterms of parallel-like nodes.
pub(crate) struct Stepper<'r> {
    reg: &'r OpRegistry,
    cache: HashMap<Term, Moves>,
}

impl<'r> Stepper<'r> {
    pub(crate) fn new(reg: &'r OpRegistry) -> Stepper<'r> {
        Stepper {
            reg,
            cache: HashMap::new(),
        }
    }

    fn cached(&mut self, t: &Term) -> Result<Moves> {
        if let Some(m) = self.cache.get(t) {
            return Ok(m.clone());
        }
        let mut out = Vec::new();
        self.step_into(t, &mut out)?;
        out.sort();
        out.dedup();
        let m = Arc::new(out);
        self.cache.insert(t.clone(), m.clone());
        Ok(m)
    }

    /// Pushes the transitions of `t`. When `t` is AC-canonical, so are the targets.
    fn step_into(&mut self, t: &Term, out: &mut Vec<(Action, Term)>) -> Result<()> {
        match t.kind() {
            TermKind::Nil | TermKind::Var(_) => {}
            TermKind::Prefix(a, body) => out.push((*a, body.clone())),
            TermKind::Sum(l, r) => {
                self.step_into(l, out)?;
                self.step_into(r, out)?;
            }
            TermKind::Par(l, r) => {
                let lm = self.cached(l)?;
                let rm = self.cached(r)?;
                for (a, l2) in lm.iter() {
                    out.push((*a, Term::par(l2.clone(), r.clone())));
                }
                for (b, r2) in rm.iter() {
                    out.push((*b, Term::par(l.clone(), r2.clone())));
                }
                for (a, l2) in lm.iter() {
                    for (b, r2) in rm.iter() {
                        if a.complements(*b) {
                            out.push((Action::Tau, Term::par(l2.clone(), r2.clone())));
                        }
                    }
                }
            }
            TermKind::LeftMerge(l, r) => {
                let lm = self.cached(l)?;
                for (a, l2) in lm.iter() {
                    out.push((*a, Term::par(l2.clone(), r.clone())));
                }
            }
            TermKind::CommMerge(l, r) => {
                let lm = self.cached(l)?;
                let rm = self.cached(r)?;
                for (a, l2) in lm.iter() {
                    for (b, r2) in rm.iter() {
                        if a.complements(*b) {
                            out.push((Action::Tau, Term::par(l2.clone(), r2.clone())));
                        }
                    }
                }
            }
            TermKind::Op(op, l, r) => {
                let reg = self.reg;
                let rs = reg.get(*op).ok_or_else(|| Error::UnknownOperator(op.to_string()))?;
                let lm = self.cached(l)?;
                let rm = self.cached(r)?;
                for rule in &rs.rules {
                    desimone::fire(rule, l, r, &lm, &rm, out);
                }
            }
        }
        Ok(())
    }

    pub(crate) fn step(&mut self, t: &Term) -> Result<Vec<(Action, Term)>> {
        let mut out = Vec::new();
        self.step_into(t, &mut out)?;
        for (_, u) in out.iter_mut() {
            *u = u.ac_canonical();
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Like `step`, but trusts that `t` is already AC-canonical.
    fn step_canonical(&mut self, t: &Term) -> Result<Vec<(Action, Term)>> {
        let mut out = Vec::new();
        self.step_into(t, &mut out)?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// All transitions of `t`, with AC-canonical targets, sorted and deduplicated.
pub fn step(t: &Term, reg: &OpRegistry) -> Result<Vec<(Action, Term)>> {
    Stepper::new(reg).step(t)
}

/// Initial actions of `t`.
pub fn initials(t: &Term, reg: &OpRegistry) -> Result<Vec<Action>> {
    let mut v: Vec<Action> = step(t, reg)?.into_iter().map(|(a, _)| a).collect();
    v.dedup();
    Ok(v)
}

/// A finite acyclic transition system over AC-canonical closed terms.
#[derive(Clone, Debug)]
pub struct Lts {
    states: Vec<Term>,
    succ: Vec<Vec<(Action, usize)>>,
    roots: Vec<usize>,
}

impl Lts {
    /// Breadth-first closure of `step` from `root`.
    pub fn build(root: &Term, reg: &OpRegistry) -> Result<Lts> {
        Lts::build_joint(std::slice::from_ref(root), reg)
    }

    /// One transition system containing all the given roots, sharing states.
    pub fn build_joint(roots: &[Term], reg: &OpRegistry) -> Result<Lts> {
        let mut stepper = Stepper::new(reg);
        let mut index: HashMap<Term, usize> = HashMap::new();
        let mut states: Vec<Term> = Vec::new();
        let mut root_ids = Vec::with_capacity(roots.len());
        for r in roots {
            if !r.is_closed() {
                return Err(Error::OpenTerm(r.to_string()));
            }
            let c = r.ac_canonical();
            let id = *index.entry(c.clone()).or_insert_with(|| {
                states.push(c);
                states.len() - 1
            });
            root_ids.push(id);
        }
        let mut succ: Vec<Vec<(Action, usize)>> = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let t = states[next].clone();
            let moves = stepper.step_canonical(&t)?;
            let mut edges = Vec::with_capacity(moves.len());
            for (a, u) in moves {
                let id = match index.get(&u) {
                    Some(&id) => id,
                    None => {
                        states.push(u.clone());
                        index.insert(u, states.len() - 1);
                        states.len() - 1
                    }
                };
                edges.push((a, id));
            }
            edges.sort();
            edges.dedup();
            succ.push(edges);
            next += 1;
        }
        Ok(Lts {
            states,
            succ,
            roots: root_ids,
        })
    }

    pub fn root(&self) -> usize {
        self.roots[0]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &Term {
        &self.states[i]
    }

    pub fn states(&self) -> &[Term] {
        &self.states
    }

    pub fn succ(&self, i: usize) -> &[(Action, usize)] {
        &self.succ[i]
    }

    pub fn successors(&self) -> &[Vec<(Action, usize)>] {
        &self.succ
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Action, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, es)| es.iter().map(move |&(a, j)| (i, a, j)))
    }

    /// Sorted, duplicate-free initial actions of a state.
    pub fn init(&self, i: usize) -> Vec<Action> {
        let mut v: Vec<Action> = self.succ[i].iter().map(|&(a, _)| a).collect();
        v.dedup();
        v
    }

    /// Every label occurring in the system.
    pub fn labels(&self) -> Vec<Action> {
        let mut v: Vec<Action> = self.transitions().map(|(_, a, _)| a).collect();
        v.sort();
        v.dedup();
        v
    }

    /// A `||`-free term with the same transition tree as state `s`.
    pub fn unfold(&self, s: usize) -> Term {
        let mut memo: HashMap<usize, Term> = HashMap::new();
        for i in self.bottom_up() {
            let parts: Vec<Term> = self.succ[i].iter().map(|&(a, t)| Term::prefix(a, memo[&t].clone())).collect();
            memo.insert(i, Term::sum_of(parts));
        }
        memo.remove(&s).expect("state in range")
    }

    /// States ordered so that every state comes after all of its successors.
    pub fn bottom_up(&self) -> Vec<usize> {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            while let Some(&mut (s, ref mut k)) = stack.last_mut() {
                if *k < self.succ[s].len() {
                    let t = self.succ[s][*k].1;
                    *k += 1;
                    if !seen[t] {
                        seen[t] = true;
                        stack.push((t, 0));
                    }
                } else {
                    order.push(s);
                    stack.pop();
                }
            }
        }
        order
    }

    pub fn to_json(&self) -> Value {
        let states: Vec<Value> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, t)| json!({"id": i, "term": t.to_string()}))
            .collect();
        let transitions: Vec<Value> = self
            .transitions()
            .map(|(i, a, j)| json!({"from": i, "label": a.to_string(), "to": j}))
            .collect();
        json!({"root": self.root(), "states": states, "transitions": transitions})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::term::Alphabet;

    fn p(s: &str) -> Term {
        parse_term(s, &Alphabet::new(["a", "b", "c"]).unwrap()).unwrap()
    }

    fn moves(s: &str) -> Vec<(String, String)> {
        step(&p(s), &OpRegistry::new())
            .unwrap()
            .into_iter()
            .map(|(a, t)| (a.to_string(), t.to_string()))
            .collect()
    }

    #[test]
    fn parallel_interleaves_and_synchronises() {
        let got = moves("a.0 || ~a.0");
        let want = [("tau", "0 || 0"), ("a", "0 || ~a.0"), ("~a", "a.0 || 0")];
        let want: Vec<(String, String)> = want.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn left_merge_fires_only_on_the_left() {
        let got = moves("lmerge(a.0 + b.0, c.0)");
        assert_eq!(got, vec![("a".into(), "0 || c.0".into()), ("b".into(), "0 || c.0".into())]);
    }

    #[test]
    fn communication_merge_only_synchronises() {
        assert_eq!(moves("cmerge(a.0 + b.0, ~a.c.0)"), vec![("tau".into(), "0 || c.0".into())]);
        assert!(moves("cmerge(a.0, b.0)").is_empty());
    }

    #[test]
    fn variables_are_inert() {
        assert_eq!(moves("X + a.0"), vec![("a".into(), "0".into())]);
        assert!(moves("X || Y").is_empty());
    }

    #[test]
    fn lts_of_independent_parallel() {
        let l = Lts::build(&p("a.0 || b.0"), &OpRegistry::new()).unwrap();
        assert_eq!((l.len(), l.transition_count()), (4, 4));
        let z = Lts::build(&Term::nil(), &OpRegistry::new()).unwrap();
        assert_eq!((z.len(), z.transition_count()), (1, 0));
        let d = Lts::build(&p("a.0 + a.0"), &OpRegistry::new()).unwrap();
        assert_eq!((d.len(), d.transition_count()), (2, 1));
    }

    #[test]
    fn open_terms_are_rejected() {
        assert!(matches!(Lts::build(&p("a.X"), &OpRegistry::new()), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn unknown_operator_is_an_error() {
        assert!(matches!(step(&p("g(a.0, 0)"), &OpRegistry::new()), Err(Error::UnknownOperator(_))));
    }

    #[test]
    fn bottom_up_puts_successors_first() {
        let l = Lts::build(&p("a.(b.0 || c.0) + b.a.0"), &OpRegistry::new()).unwrap();
        let order = l.bottom_up();
        let mut pos = vec![0; l.len()];
        for (k, &s) in order.iter().enumerate() {
            pos[s] = k;
        }
        for (i, _, j) in l.transitions() {
            assert!(pos[j] < pos[i]);
        }
    }

    #[test]
    fn json_export_shape() {
        let l = Lts::build(&p("a.0"), &OpRegistry::new()).unwrap();
        let v = l.to_json();
        assert_eq!(v["root"], 0);
        assert_eq!(v["states"][0]["term"], "a.0");
        assert_eq!(v["transitions"][0]["label"], "a");
    }
}
