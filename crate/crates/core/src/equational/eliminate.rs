//! Elimination of parallel composition from closed terms.
//!
//! Parallel nodes are handled innermost first. A node `L || R` whose
//! arguments are `||`-free is rewritten by one *move*:
//!
//! 1. A0 drops a `0` summand of `L` or `R`, or A3 merges equal summands;
//! 2. P0 when `R = 0`, or P1 followed by P0 when `L = 0`;
//! 3. otherwise the system's distributivity or expansion axiom, read left to
//!    right, possibly after P1 and after padding an argument with a `0`
//!    summand (A0 right to left) so the axiom's context variable has a value.
//!
//! Moves are made in rounds, one on every innermost node per round, and
//! between rounds equal summands that contain `||` are merged with A3.
//!
//! Termination measure: the pair of the number of non-innermost parallel
//! nodes and the multiset of the weights of innermost ones, compared
//! lexicographically, with the multiset ordering on the second component.
//! The weight of `L || R` is its depth (the longest run of prefixes), then
//! the number of nonzero summands of `L` and `R`, then the number of `0`
//! summands. Expansion laws lower the depth of every new node;
//! distributivity keeps the depth and lowers the summand count; A0 lowers the
//! count of `0` summands, and A3 the count of nonzero ones. Merging equal
//! summands that contain `||` removes nodes, so it never raises the measure.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::equiv::equiv;
use crate::error::{Error, Result};
use crate::sos::OpRegistry;
use crate::syntax::{AxiomSystem, Equation};
use crate::systems::System;
use crate::term::{Action, Substitution, Term, TermKind};

use super::proof::{Derivation, Proof};
use super::schemas;

/// Default bound on the number of moves of one elimination.
pub const DEFAULT_MOVE_BUDGET: usize = 200_000;

/// One oriented rule of an elimination strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientedRule {
    pub name: String,
    /// Read right to left.
    pub reversed: bool,
}

/// The oriented rules a system's strategy may use, with its measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteSystem {
    pub system: System,
    pub rules: Vec<OrientedRule>,
    pub measure: &'static str,
}

pub const MEASURE: &str = "(non-innermost || nodes, multiset of (depth, nonzero summands, zero summands) of innermost || nodes)";

impl RewriteSystem {
    pub fn for_system(system: System) -> RewriteSystem {
        let forward = |n: &str| OrientedRule {
            name: n.into(),
            reversed: false,
        };
        let mut rules = vec![forward("A0"), forward("P0"), forward("P1")];
        let specific: &[&str] = match system {
            System::B => &["EL"],
            System::RS => &["RSP1", "RSP2", "EL2"],
            System::CS => &["CSP1", "CSP2", "EL1", "EL1tau"],
            System::S => &["SP1", "SP2", "EL1", "EL1tau"],
            System::RT | System::FT | System::R | System::F => &["FP", "EL2"],
            System::CT => &["CTP", "EL1", "EL1tau"],
            System::T => &["TP", "EL1", "EL1tau"],
        };
        rules.extend(specific.iter().map(|n| forward(n)));
        if matches!(system, System::CS | System::CT) {
            rules.push(OrientedRule {
                name: "A0".into(),
                reversed: true,
            });
        }
        RewriteSystem {
            system,
            rules,
            measure: MEASURE,
        }
    }
}

/// The longest run of prefixes.
pub fn depth(t: &Term) -> usize {
    match t.kind() {
        TermKind::Nil | TermKind::Var(_) => 0,
        TermKind::Prefix(_, b) => 1 + depth(b),
        TermKind::Sum(l, r) => depth(l).max(depth(r)),
        _ => t.children().iter().map(|c| depth(c)).sum(),
    }
}

fn has_par(t: &Term) -> bool {
    matches!(t.kind(), TermKind::Par(..)) || t.children().iter().any(|c| has_par(c))
}

/// Indices `i != j` of summands `μ.A`, `μ.B` where the summands of `A` form
/// a proper sub-multiset of those of `B` (modulo AC), with the summands of
/// `B` outside `A`. `completed` requires a prefix summand in `A`.
fn absorbable(parts: &[Term], completed: bool) -> Option<(usize, usize, Vec<Term>)> {
    let bodies: Vec<Option<(Action, Vec<Term>)>> = parts
        .iter()
        .map(|p| prefix_parts(p).map(|(a, b)| (a, b.summands())))
        .collect();
    for (i, bi) in bodies.iter().enumerate() {
        let Some((mu, a)) = bi else { continue };
        if completed && !a.iter().any(|t| prefix_parts(t).is_some()) {
            continue;
        }
        for (j, bj) in bodies.iter().enumerate() {
            let Some((nu, b)) = bj else { continue };
            if i == j || mu != nu || b.len() <= a.len() {
                continue;
            }
            let mut rest: Vec<Term> = b.clone();
            let inside = a.iter().all(|x| match rest.iter().position(|y| y.ac_equal(x)) {
                Some(k) => {
                    rest.remove(k);
                    true
                }
                None => false,
            });
            if inside {
                return Some((i, j, rest));
            }
        }
    }
    None
}

/// Positions, under `pos`, of the innermost `||` nodes and of the maximal
/// sums containing `||`, each in post-order.
fn scan(t: &Term, pos: &[usize]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    fn go(t: &Term, pos: &mut Vec<usize>, in_sum: bool, pars: &mut Vec<Vec<usize>>, sums: &mut Vec<Vec<usize>>) -> bool {
        let is_sum = matches!(t.kind(), TermKind::Sum(..));
        let mut below = false;
        for (i, c) in t.children().into_iter().enumerate() {
            pos.push(i);
            below |= go(c, pos, is_sum, pars, sums);
            pos.pop();
        }
        let is_par = matches!(t.kind(), TermKind::Par(..));
        if is_par && !below {
            pars.push(pos.clone());
        }
        if is_sum && !in_sum && below {
            sums.push(pos.clone());
        }
        below || is_par
    }
    let (mut pars, mut sums) = (Vec::new(), Vec::new());
    go(t, &mut pos.to_vec(), false, &mut pars, &mut sums);
    (pars, sums)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measure {
    pub outer: usize,
    /// Sorted in decreasing order.
    pub inner: Vec<(usize, usize, usize)>,
}

impl Measure {
    pub fn of(t: &Term) -> Measure {
        let mut m = Measure {
            outer: 0,
            inner: Vec::new(),
        };
        collect(t, &mut m);
        m.inner.sort_by(|a, b| b.cmp(a));
        m
    }
}

fn collect(t: &Term, m: &mut Measure) {
    if let TermKind::Par(l, r) = t.kind() {
        if has_par(l) || has_par(r) {
            m.outer += 1;
        } else {
            let (ls, rs) = (l.summands(), r.summands());
            let zero = ls.iter().chain(&rs).filter(|s| s.is_nil()).count();
            m.inner.push((depth(t), ls.len() + rs.len() - zero, zero));
        }
    }
    t.children().iter().for_each(|c| collect(c, m));
}

impl PartialOrd for Measure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Measure {
    /// Lexicographic; for a total base order the multiset ordering is the
    /// lexicographic order of the decreasingly sorted elements.
    fn cmp(&self, other: &Self) -> Ordering {
        self.outer.cmp(&other.outer).then_with(|| self.inner.cmp(&other.inner))
    }
}

/// The outcome of an elimination.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub system: AxiomSystem,
    pub derivation: Derivation,
    /// The measure before the first move and after every move.
    pub measures: Vec<Measure>,
}

impl Elimination {
    pub fn term(&self) -> &Term {
        self.derivation.end()
    }

    pub fn moves(&self) -> usize {
        self.measures.len() - 1
    }

    pub fn proof(&self) -> Proof {
        self.derivation.clone().into_proof(&self.system)
    }

    /// Whether the result is equivalent to the input under the system's
    /// semantics.
    pub fn sound(&self, kind: System) -> Result<bool> {
        equiv(self.derivation.start(), self.derivation.end(), kind.semantics(), &OpRegistry::new())
    }
}

/// Eliminates `||` from a closed term with the bundled system.
pub fn eliminate_parallel(p: &Term, kind: System, alphabet: &crate::term::Alphabet) -> Result<Elimination> {
    let system = kind.load(alphabet)?;
    eliminate_with(p, kind, system, DEFAULT_MOVE_BUDGET)
}

/// Eliminates `||` using the axioms of `system`, read by the strategy of `kind`.
pub fn eliminate_with(p: &Term, kind: System, system: AxiomSystem, budget: usize) -> Result<Elimination> {
    if !p.is_closed() {
        return Err(Error::OpenTerm(p.to_string()));
    }
    let mut e = Eliminator {
        kind,
        system: &system,
        d: Derivation::new(p.clone()),
        measures: vec![Measure::of(p)],
        budget,
    };
    e.walk(Vec::new())?;
    let Eliminator { d, measures, .. } = e;
    Ok(Elimination {
        system,
        derivation: d,
        measures,
    })
}

struct Eliminator<'s> {
    kind: System,
    system: &'s AxiomSystem,
    d: Derivation,
    measures: Vec<Measure>,
    budget: usize,
}

fn child(pos: &[usize], i: usize) -> Vec<usize> {
    let mut v = pos.to_vec();
    v.push(i);
    v
}

fn without(parts: &[Term], skip: &[usize]) -> Vec<Term> {
    parts
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, t)| t.clone())
        .collect()
}

/// A summand split as `μ.body`.
fn prefix_parts(t: &Term) -> Option<(Action, Term)> {
    match t.kind() {
        TermKind::Prefix(a, b) => Some((*a, b.clone())),
        _ => None,
    }
}

fn prefixes(parts: &[Term]) -> Result<Vec<(Action, Term)>> {
    parts
        .iter()
        .map(|p| prefix_parts(p).ok_or_else(|| Error::StuckTerm(p.to_string())))
        .collect()
}

/// Indices of two summands with the same action.
fn repeated(ps: &[(Action, Term)]) -> Option<(usize, usize)> {
    (0..ps.len()).find_map(|i| ((i + 1)..ps.len()).find(|&j| ps[i].0 == ps[j].0).map(|j| (i, j)))
}

fn sigma(pairs: &[(&str, Term)]) -> Substitution {
    pairs.iter().fold(Substitution::new(), |s, (x, t)| s.with(x, t.clone()))
}

impl Eliminator<'_> {
    fn axiom(&self, name: &str) -> Result<Equation> {
        self.system
            .get(name)
            .map(|c| c.into_owned())
            .ok_or_else(|| Error::UnknownAxiom(format!("{name} (in {})", self.system.name)))
    }

    fn current(&self, pos: &[usize]) -> Term {
        self.d.end().subterm(pos).expect("positions stay valid").clone()
    }

    /// Applies `name` left to right at `pos`, viewing the subterm as the
    /// instance's left-hand side.
    fn rewrite(&mut self, pos: &[usize], name: &str, s: Substitution) -> Result<()> {
        let eq = self.axiom(name)?;
        let view = eq.lhs.substitute(&s);
        self.d.apply(pos, view, &[], &eq, false, s)
    }

    fn end_move(&mut self) -> Result<()> {
        let m = Measure::of(self.d.end());
        self.measures.push(m);
        if self.measures.len() > self.budget {
            return Err(Error::StepBudget(self.budget));
        }
        Ok(())
    }

    fn walk(&mut self, pos: Vec<usize>) -> Result<()> {
        let t = self.current(&pos);
        match t.kind() {
            TermKind::Nil | TermKind::Var(_) => Ok(()),
            TermKind::Prefix(..) => self.walk(child(&pos, 0)),
            TermKind::Sum(..) => {
                self.walk(child(&pos, 0))?;
                self.walk(child(&pos, 1))
            }
            TermKind::Par(..) => self.rounds(&pos),
            _ => Err(Error::Unsupported(format!(
                "parallel elimination is defined for CCS terms, got `{t}`"
            ))),
        }
    }

    /// Eliminates every `||` below `pos` in rounds. A round drops `0`
    /// summands from the arguments of innermost nodes, merges equal summands
    /// that contain `||` with A3, then makes one move on every innermost node.
    /// The splitting laws of the simulation systems reach the same node along
    /// many branches; merging keeps the derivation from repeating that work.
    fn rounds(&mut self, pos: &[usize]) -> Result<()> {
        loop {
            let (pars, _) = scan(&self.current(pos), pos);
            if pars.is_empty() {
                return Ok(());
            }
            for p in &pars {
                while self.cleanup(p)? {
                    self.end_move()?;
                }
            }
            let (_, sums) = scan(&self.current(pos), pos);
            for q in &sums {
                while self.merge(q, false)? {}
            }
            let (pars, _) = scan(&self.current(pos), pos);
            for p in &pars {
                self.step(p)?;
                self.end_move()?;
            }
        }
    }

    /// Merges pairs of AC-equal summands of the sum at `pos`, only those
    /// containing `||` unless `all`; returns whether any pair was merged.
    fn merge(&mut self, pos: &[usize], all: bool) -> Result<bool> {
        let parts = self.current(pos).summands();
        let mut groups: HashMap<Term, Vec<usize>> = HashMap::new();
        for (i, t) in parts.iter().enumerate() {
            if all || has_par(t) {
                groups.entry(t.ac_canonical()).or_default().push(i);
            }
        }
        let mut pairs: Vec<(usize, usize)> = groups
            .values()
            .flat_map(|g| g.chunks_exact(2).map(|c| (c[0], c[1])))
            .collect();
        if pairs.is_empty() {
            return Ok(false);
        }
        pairs.sort_unstable();
        let used: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
        let rest = without(&parts, &used);
        let tail = !rest.is_empty();
        // view: (p1 + q1) + ((p2 + q2) + (... + rest)), merged front to back
        let mut view = tail.then(|| Term::sum_of(rest));
        for &(i, j) in pairs.iter().rev() {
            let pair = Term::sum(parts[i].clone(), parts[j].clone());
            view = Some(match view {
                Some(v) => Term::sum(pair, v),
                None => pair,
            });
        }
        let mut view = view.expect("at least one pair");
        let a3 = self.axiom("A3")?;
        for (k, &(i, _)) in pairs.iter().enumerate() {
            let mut inner = vec![1; k];
            if k + 1 < pairs.len() || tail {
                inner.push(0);
            }
            self.d.apply(pos, view, &inner, &a3, false, sigma(&[("X", parts[i].clone())]))?;
            view = self.current(pos);
        }
        Ok(true)
    }

    /// Moves 1 and 2 on the innermost node at `pos`, if one applies.
    fn cleanup(&mut self, pos: &[usize]) -> Result<bool> {
        let t = self.current(pos);
        let TermKind::Par(l, r) = t.kind() else {
            return Ok(false);
        };
        let (l, r) = (l.clone(), r.clone());
        for (k, side) in [(0, &l), (1, &r)] {
            let parts = side.summands();
            if parts.len() > 1 {
                if let Some(i) = parts.iter().position(Term::is_nil) {
                    let rest = Term::sum_of(without(&parts, &[i]));
                    self.rewrite(&child(pos, k), "A0", sigma(&[("X", rest)]))?;
                    return Ok(true);
                }
                if self.merge(&child(pos, k), true)? || self.absorb(&child(pos, k))? {
                    return Ok(true);
                }
            }
        }
        if r.is_nil() {
            self.rewrite(pos, "P0", sigma(&[("X", l)]))?;
            return Ok(true);
        }
        if l.is_nil() {
            self.rewrite(pos, "P1", sigma(&[("X", l), ("Y", r.clone())]))?;
            self.rewrite(pos, "P0", sigma(&[("X", r)]))?;
            return Ok(true);
        }
        Ok(false)
    }

    /// Drops a summand `μ.A` of the sum at `pos` next to a summand `μ.B`
    /// whose summands include those of `A`, with the system's absorption
    /// axiom read right to left. Only the simulation systems have one.
    fn absorb(&mut self, pos: &[usize]) -> Result<bool> {
        let axiom = match self.kind {
            System::S => "S",
            System::CS => "CS",
            _ => return Ok(false),
        };
        let parts = self.current(pos).summands();
        let Some((i, j, extra)) = absorbable(&parts, self.kind == System::CS) else {
            return Ok(false);
        };
        let (mu, a) = prefix_parts(&parts[i]).expect("absorbable summands are prefixes");
        let mut a_parts = a.summands();
        if let Some(k) = a_parts.iter().position(|t| prefix_parts(t).is_some()) {
            a_parts.swap(0, k);
        }
        // the axiom needs a nonempty context summand; pad with `0`
        let need_pad = if axiom == "S" { a_parts.is_empty() } else { a_parts.len() == 1 };
        if need_pad {
            let others = without(&parts, &[i, j]);
            let pad_in = |this: &mut Self, target: &Term, other: &Term| -> Result<Term> {
                let pair = Term::sum(target.clone(), other.clone());
                let (view, inner) = if others.is_empty() {
                    (pair, vec![0, 0])
                } else {
                    (Term::sum(pair, Term::sum_of(others.clone())), vec![0, 0, 0])
                };
                let body = prefix_parts(target).expect("prefix").1;
                let a0 = this.axiom("A0")?;
                this.d.apply(pos, view, &inner, &a0, true, sigma(&[("X", body.clone())]))?;
                Ok(Term::prefix(mu, Term::sum(body, Term::nil())))
            };
            let padded_b = pad_in(self, &parts[j], &parts[i])?;
            if axiom == "CS" {
                pad_in(self, &parts[i], &padded_b)?;
            }
            a_parts.push(Term::nil());
        }
        let rest = without(&parts, &[i, j]);
        let (name, s, absorbed, keep) = if axiom == "S" {
            let x = Term::sum_of(a_parts.clone());
            let y = Term::sum_of(extra);
            let keep = Term::prefix(mu, Term::sum(x.clone(), y.clone()));
            (format!("S[{mu}]"), sigma(&[("X", x.clone()), ("Y", y)]), Term::prefix(mu, x), keep)
        } else {
            let (nu, x) = prefix_parts(&a_parts[0]).expect("completed absorption starts with a prefix");
            let z = Term::sum_of(a_parts[1..].to_vec());
            let y = Term::sum_of(extra);
            let first = Term::prefix(nu, x.clone());
            let keep = Term::prefix(mu, Term::sum(Term::sum(first.clone(), y.clone()), z.clone()));
            let absorbed = Term::prefix(mu, Term::sum(first, z.clone()));
            let s = sigma(&[("X", x), ("Y", y), ("Z", z)]);
            (format!("CS[{mu},{nu}]"), s, absorbed, keep)
        };
        let eq = self.axiom(&name)?;
        let pair = Term::sum(keep, absorbed);
        let (view, inner) = if rest.is_empty() {
            (pair, vec![])
        } else {
            (Term::sum(pair, Term::sum_of(rest)), vec![0])
        };
        self.d.apply(pos, view, &inner, &eq, true, s)?;
        Ok(true)
    }

    /// One move on the innermost node at `pos`.
    fn step(&mut self, pos: &[usize]) -> Result<()> {
        if self.cleanup(pos)? {
            return Ok(());
        }
        let t = self.current(pos);
        let (l, r) = match t.kind() {
            TermKind::Par(l, r) => (l.clone(), r.clone()),
            _ => unreachable!("called on parallel nodes"),
        };
        let lp = prefixes(&l.summands())?;
        let rp = prefixes(&r.summands())?;
        match self.kind {
            System::B => self.expansion(pos, &lp, &rp, "EL"),
            System::T => self.trace_move(pos, &lp, &rp),
            System::CT => self.completed_trace_move(pos, &lp, &rp),
            System::S => self.simulation_move(pos, &lp, &rp),
            System::CS => self.completed_simulation_move(pos, &lp, &rp),
            System::RS => self.ready_simulation_move(pos, &lp, &rp),
            System::RT | System::FT | System::R | System::F => self.failure_move(pos, &lp, &rp),
        }
    }

    fn swap(&mut self, pos: &[usize]) -> Result<()> {
        let t = self.current(pos);
        let kids = t.children();
        let s = sigma(&[("X", kids[0].clone()), ("Y", kids[1].clone())]);
        self.rewrite(pos, "P1", s)
    }

    /// Pads argument `k` with a `0` summand.
    fn pad(&mut self, pos: &[usize], k: usize) -> Result<()> {
        let at = child(pos, k);
        let arg = self.current(&at);
        let a0 = self.axiom("A0")?;
        self.d.apply(&at, arg.clone(), &[], &a0, true, sigma(&[("X", arg)]))
    }

    /// Context of the summands other than `skip`, padding argument `k` when
    /// nothing is left.
    fn context(&mut self, pos: &[usize], k: usize, parts: &[(Action, Term)], skip: &[usize]) -> Result<Term> {
        let rest: Vec<Term> = parts
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, (a, b))| Term::prefix(*a, b.clone()))
            .collect();
        if rest.is_empty() {
            self.pad(pos, k)?;
            Ok(Term::nil())
        } else {
            Ok(Term::sum_of(rest))
        }
    }

    fn sorted_by_alphabet(&self, ps: &[(Action, Term)]) -> Vec<(Action, Term)> {
        let order = self.system.alphabet.actions();
        let mut v = ps.to_vec();
        v.sort_by_key(|(a, _)| order.iter().position(|b| b == a));
        v
    }

    /// An expansion-law instance on `Σ μ_i x_i || Σ ν_j y_j`.
    fn expansion(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)], family: &str) -> Result<()> {
        let (lp, rp) = if family == "EL" {
            (lp.to_vec(), rp.to_vec())
        } else {
            (self.sorted_by_alphabet(lp), self.sorted_by_alphabet(rp))
        };
        let mus: Vec<Action> = lp.iter().map(|p| p.0).collect();
        let nus: Vec<Action> = rp.iter().map(|p| p.0).collect();
        let eq = match family {
            "EL" => schemas::expansion_instance(&mus, &nus),
            "EL1" => schemas::el1_instance(mus[0], nus[0]),
            _ => schemas::el2_instance(&mus, &nus).ok_or_else(|| Error::StuckTerm(self.current(pos).to_string()))?,
        };
        let mut s = Substitution::new();
        for (i, (_, x)) in lp.iter().enumerate() {
            s = s.with(&format!("X{}", i + 1), x.clone());
        }
        for (j, (_, y)) in rp.iter().enumerate() {
            s = s.with(&format!("Y{}", j + 1), y.clone());
        }
        if family == "EL1" {
            s = sigma(&[("X", lp[0].1.clone()), ("Y", rp[0].1.clone())]);
        }
        self.rewrite(pos, &eq.name, s)
    }

    fn trace_move(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)]) -> Result<()> {
        if lp.len() == 1 && rp.len() == 1 {
            return self.expansion(pos, lp, rp, "EL1");
        }
        let (lp, rp) = if lp.len() == 1 {
            self.swap(pos)?;
            (rp, lp)
        } else {
            (lp, rp)
        };
        let first = Term::prefix(lp[0].0, lp[0].1.clone());
        let rest = Term::sum_of(lp[1..].iter().map(|(a, b)| Term::prefix(*a, b.clone())));
        let z = Term::sum_of(rp.iter().map(|(a, b)| Term::prefix(*a, b.clone())));
        self.rewrite(pos, "TP", sigma(&[("X", first), ("Y", rest), ("Z", z)]))
    }

    fn completed_trace_move(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)]) -> Result<()> {
        if lp.len() == 1 && rp.len() == 1 {
            return self.expansion(pos, lp, rp, "EL1");
        }
        let (lp, rp) = if lp.len() == 1 {
            self.swap(pos)?;
            (rp, lp)
        } else {
            (lp, rp)
        };
        let w = self.context(pos, 0, lp, &[0, 1])?;
        let z = Term::sum_of(rp.iter().map(|(a, b)| Term::prefix(*a, b.clone())));
        let name = format!("CTP[{},{}]", lp[0].0, lp[1].0);
        let s = sigma(&[("X", lp[0].1.clone()), ("Y", lp[1].1.clone()), ("W", w), ("Z", z)]);
        self.rewrite(pos, &name, s)
    }

    fn simulation_move(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)]) -> Result<()> {
        let sum = |ps: &[(Action, Term)]| Term::sum_of(ps.iter().map(|(a, b)| Term::prefix(*a, b.clone())));
        match (lp.len(), rp.len()) {
            (1, 1) => self.expansion(pos, lp, rp, "EL1"),
            (1, _) | (_, 1) => {
                let (lp, rp) = if rp.len() == 1 {
                    self.swap(pos)?;
                    (rp, lp)
                } else {
                    (lp, rp)
                };
                let name = format!("SP2[{}]", lp[0].0);
                let s = sigma(&[("X", lp[0].1.clone()), ("Y", sum(&rp[..1])), ("Z", sum(&rp[1..]))]);
                self.rewrite(pos, &name, s)
            }
            _ => {
                let s = sigma(&[("X", sum(&lp[..1])), ("Y", sum(&lp[1..])), ("Z", sum(&rp[..1])), ("W", sum(&rp[1..]))]);
                self.rewrite(pos, "SP1", s)
            }
        }
    }

    fn completed_simulation_move(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)]) -> Result<()> {
        match (lp.len(), rp.len()) {
            (1, 1) => self.expansion(pos, lp, rp, "EL1"),
            (1, _) | (_, 1) => {
                let (lp, rp) = if rp.len() == 1 {
                    self.swap(pos)?;
                    (rp, lp)
                } else {
                    (lp, rp)
                };
                let w = self.context(pos, 1, rp, &[0, 1])?;
                let name = format!("CSP2[{},{},{}]", lp[0].0, rp[0].0, rp[1].0);
                let s = sigma(&[("X", lp[0].1.clone()), ("Y", rp[0].1.clone()), ("Z", rp[1].1.clone()), ("W", w)]);
                self.rewrite(pos, &name, s)
            }
            _ => {
                let u = self.context(pos, 0, lp, &[0, 1])?;
                let v = self.context(pos, 1, rp, &[0, 1])?;
                let name = format!("CSP1[{},{},{},{}]", lp[0].0, lp[1].0, rp[0].0, rp[1].0);
                let s = sigma(&[
                    ("X", lp[0].1.clone()),
                    ("Y", lp[1].1.clone()),
                    ("U", u),
                    ("Z", rp[0].1.clone()),
                    ("W", rp[1].1.clone()),
                    ("V", v),
                ]);
                self.rewrite(pos, &name, s)
            }
        }
    }

    fn ready_simulation_move(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)]) -> Result<()> {
        match (repeated(lp), repeated(rp)) {
            (None, None) => self.expansion(pos, lp, rp, "EL2"),
            (Some((i, j)), Some((h, k))) => {
                let u = self.context(pos, 0, lp, &[i, j])?;
                let v = self.context(pos, 1, rp, &[h, k])?;
                let name = format!("RSP1[{},{}]", lp[i].0, rp[h].0);
                let s = sigma(&[
                    ("X", lp[i].1.clone()),
                    ("Y", lp[j].1.clone()),
                    ("U", u),
                    ("Z", rp[h].1.clone()),
                    ("W", rp[k].1.clone()),
                    ("V", v),
                ]);
                self.rewrite(pos, &name, s)
            }
            (l, r) => {
                let (lp, rp, (h, k)) = match (l, r) {
                    (None, Some(hk)) => (lp, rp, hk),
                    (Some(ij), None) => {
                        self.swap(pos)?;
                        (rp, lp, ij)
                    }
                    _ => unreachable!("the other cases are handled above"),
                };
                let lp = self.sorted_by_alphabet(lp);
                let w = self.context(pos, 1, rp, &[h, k])?;
                let mus: Vec<Action> = lp.iter().map(|p| p.0).collect();
                let eq = schemas::rsp2_instance(&mus, rp[h].0).ok_or_else(|| Error::StuckTerm(self.current(pos).to_string()))?;
                let mut s = sigma(&[("Y", rp[h].1.clone()), ("Z", rp[k].1.clone()), ("W", w)]);
                for (i, (_, x)) in lp.iter().enumerate() {
                    s = s.with(&format!("X{}", i + 1), x.clone());
                }
                self.rewrite(pos, &eq.name, s)
            }
        }
    }

    fn failure_move(&mut self, pos: &[usize], lp: &[(Action, Term)], rp: &[(Action, Term)]) -> Result<()> {
        let (lp, rp, (i, j)) = match (repeated(lp), repeated(rp)) {
            (None, None) => return self.expansion(pos, lp, rp, "EL2"),
            (Some(ij), _) => (lp, rp, ij),
            (None, Some(hk)) => {
                self.swap(pos)?;
                (rp, lp, hk)
            }
        };
        let w = self.context(pos, 0, lp, &[i, j])?;
        let z = Term::sum_of(rp.iter().map(|(a, b)| Term::prefix(*a, b.clone())));
        let name = format!("FP[{}]", lp[i].0);
        let s = sigma(&[("X", lp[i].1.clone()), ("Y", lp[j].1.clone()), ("W", w), ("Z", z)]);
        self.rewrite(pos, &name, s)
    }
}
