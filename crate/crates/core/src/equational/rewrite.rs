//! Matching modulo associativity and commutativity of `+`, and single
//! rewrite steps.
//!
//! A sum pattern is read as the multiset of its summands. Summands that are
//! not variables match distinct summands of the subject; each variable summand
//! absorbs a nonempty sub-multiset of what is left. All other operators match
//! syntactically.

use crate::error::{Error, Result};
use crate::syntax::Equation;
use crate::term::{Substitution, Term, TermKind};

use super::proof::{Rule, Step};

/// The first substitution `σ` with `σ(pattern)` AC-equal to `subject`.
pub fn ac_match(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut found = None;
    go(pattern, subject, &Substitution::new(), &mut |s| {
        found = Some(s.clone());
        true
    });
    found
}

/// Calls `k` on every match extending `sigma` until `k` returns true.
fn go(p: &Term, t: &Term, sigma: &Substitution, k: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    match (p.kind(), t.kind()) {
        (TermKind::Var(x), _) => bind(sigma, *x, t.clone(), k),
        (TermKind::Sum(..), _) => sum(&p.summands(), &t.summands(), sigma, k),
        (TermKind::Nil, TermKind::Nil) => k(sigma),
        (TermKind::Prefix(a, p1), TermKind::Prefix(b, t1)) if a == b => go(p1, t1, sigma, k),
        (TermKind::Op(f, ..), TermKind::Op(g, ..)) if f != g => false,
        (pk, tk) if std::mem::discriminant(pk) == std::mem::discriminant(tk) && !matches!(pk, TermKind::Nil | TermKind::Prefix(..)) => {
            let (ps, ts) = (p.children(), t.children());
            pairs(&ps, &ts, sigma, k)
        }
        _ => false,
    }
}

fn bind(sigma: &Substitution, x: crate::term::Ident, t: Term, k: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    match sigma.get(x) {
        Some(old) => old.ac_equal(&t) && k(sigma),
        None => {
            let mut s = sigma.clone();
            s.insert(x, t);
            k(&s)
        }
    }
}

fn pairs(ps: &[&Term], ts: &[&Term], sigma: &Substitution, k: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    match (ps.split_first(), ts.split_first()) {
        (None, None) => k(sigma),
        (Some((p, prest)), Some((t, trest))) => go(p, t, sigma, &mut |s| pairs(prest, trest, s, k)),
        _ => false,
    }
}

fn sum(ps: &[Term], ts: &[Term], sigma: &Substitution, k: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    let (vars, rigid): (Vec<&Term>, Vec<&Term>) = ps.iter().partition(|p| matches!(p.kind(), TermKind::Var(_)));
    if rigid.len() + vars.len().min(1) > ts.len() || (vars.is_empty() && rigid.len() != ts.len()) {
        return false;
    }
    let mut used = vec![false; ts.len()];
    rigid_summands(&rigid, ts, &mut used, sigma, &mut |s, used| spread(&vars, ts, used, s, k))
}

/// Matches each rigid pattern summand against a distinct unused summand.
fn rigid_summands(
    rigid: &[&Term],
    ts: &[Term],
    used: &mut [bool],
    sigma: &Substitution,
    k: &mut dyn FnMut(&Substitution, &[bool]) -> bool,
) -> bool {
    let Some((p, rest)) = rigid.split_first() else {
        return k(sigma, used);
    };
    for i in 0..ts.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut snapshot = used.to_vec();
        let done = go(p, &ts[i], sigma, &mut |s| rigid_summands(rest, ts, &mut snapshot, s, k));
        used[i] = false;
        if done {
            return true;
        }
    }
    false
}

/// Distributes the unused summands over the variable summands, each variable
/// receiving at least one.
fn spread(vars: &[&Term], ts: &[Term], used: &[bool], sigma: &Substitution, k: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    let left: Vec<&Term> = ts.iter().zip(used).filter(|(_, &u)| !u).map(|(t, _)| t).collect();
    if vars.is_empty() {
        return left.is_empty() && k(sigma);
    }
    if left.len() < vars.len() {
        return false;
    }
    let m = vars.len();
    let mut choice = vec![0usize; left.len()];
    loop {
        let mut parts: Vec<Vec<Term>> = vec![Vec::new(); m];
        for (t, &c) in left.iter().zip(&choice) {
            parts[c].push((*t).clone());
        }
        if parts.iter().all(|p| !p.is_empty()) && assign(vars, &parts, sigma, k) {
            return true;
        }
        // next assignment in base m
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < m {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            return false;
        }
    }
}

fn assign(vars: &[&Term], parts: &[Vec<Term>], sigma: &Substitution, k: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    match vars.split_first() {
        None => k(sigma),
        Some((v, rest)) => {
            let TermKind::Var(x) = v.kind() else { unreachable!("variable summands only") };
            let value = Term::sum_of(parts[0].iter().cloned());
            bind(sigma, *x, value, &mut |s| assign(rest, &parts[1..], s, k))
        }
    }
}

/// Rewrites the subterm at `pos` with `eq`, read right to left when
/// `reversed`. The returned step is the axiom instance used, in the axiom's
/// own orientation.
pub fn rewrite_step(t: &Term, eq: &Equation, reversed: bool, pos: &[usize]) -> Result<(Term, Step)> {
    let sub = t.subterm(pos).ok_or_else(|| Error::BadPosition(pos.to_vec()))?;
    let (from, to) = if reversed { (&eq.rhs, &eq.lhs) } else { (&eq.lhs, &eq.rhs) };
    let no_match = || Error::NoMatch {
        axiom: eq.name.clone(),
        position: pos.to_vec(),
    };
    let sigma = ac_match(from, sub).ok_or_else(no_match)?;
    if to.free_vars().iter().any(|x| sigma.get(*x).is_none()) {
        return Err(Error::Unsupported(format!(
            "`{}` introduces variables when read in this direction",
            eq.name
        )));
    }
    let (l, r) = eq.instantiate(&sigma);
    let new = if reversed { l.clone() } else { r.clone() };
    let out = t.replace_at(pos, new).expect("position checked");
    let step = Step {
        rule: Rule::E4,
        axiom: Some(eq.name.clone()),
        subst: Some(sigma),
        semantics: None,
        position: pos.to_vec(),
        premises: Vec::new(),
        lhs: l,
        rhs: r,
    };
    Ok((out, step))
}
