//! Weak transitions, weak bisimilarity and rooted weak bisimilarity.
//!
//! `p ⇒ε q` is the reflexive-transitive closure of `τ`. For a visible `μ`,
//! `⇒μ` is `⇒ε -μ-> ⇒ε`; `⇒τ` is `⇒ε`. The hatted `⇒τ̂` requires at least one
//! `τ`-step, so `⇒μ̂` differs from `⇒μ` only at `τ`.

use std::collections::BTreeSet;

use crate::sos::Lts;
use crate::term::Action;

use super::bisim::refine;

#[derive(Clone, Debug)]
pub struct Saturation {
    /// `⇒ε`, reflexive, sorted.
    pub eps: Vec<Vec<usize>>,
    /// `⇒μ` for every label, with `τ` read as `⇒ε`. Sorted by label.
    pub weak: Vec<Vec<(Action, usize)>>,
    /// `⇒τ̂`: at least one `τ`-step.
    pub tau_hat: Vec<Vec<usize>>,
}

impl Saturation {
    /// `⇒μ̂` from `s`.
    pub fn hat(&self, s: usize, mu: Action) -> Vec<usize> {
        if mu == Action::Tau {
            self.tau_hat[s].clone()
        } else {
            self.weak[s].iter().filter(|&&(a, _)| a == mu).map(|&(_, t)| t).collect()
        }
    }

    pub fn reaches(&self, s: usize, mu: Action, t: usize) -> bool {
        self.weak[s].binary_search(&(mu, t)).is_ok()
    }
}

/// Saturates an acyclic transition system.
pub fn weak_saturate(lts: &Lts) -> Saturation {
    let n = lts.len();
    let order = lts.bottom_up();
    let mut eps: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &s in &order {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(s);
        for &(a, t) in lts.succ(s) {
            if a == Action::Tau {
                set.extend(eps[t].iter().copied());
            }
        }
        eps[s] = set.into_iter().collect();
    }
    let mut weak: Vec<Vec<(Action, usize)>> = vec![Vec::new(); n];
    let mut tau_hat: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        let mut set: BTreeSet<(Action, usize)> = eps[s].iter().map(|&t| (Action::Tau, t)).collect();
        let mut hat: BTreeSet<usize> = BTreeSet::new();
        for &u in &eps[s] {
            for &(a, v) in lts.succ(u) {
                for &w in &eps[v] {
                    if a == Action::Tau {
                        hat.insert(w);
                    } else {
                        set.insert((a, w));
                    }
                }
            }
        }
        weak[s] = set.into_iter().collect();
        tau_hat[s] = hat.into_iter().collect();
    }
    Saturation { eps, weak, tau_hat }
}

/// Weak bisimilarity classes: strong bisimilarity of the saturated relation.
pub fn weak_classes(sat: &Saturation) -> Vec<u32> {
    refine(&sat.weak)
}

/// A root move of `from` that `other` cannot answer with `⇒μ̂` into a weakly
/// bisimilar state.
pub fn rooted_unmatched(lts: &Lts, sat: &Saturation, wb: &[u32], from: usize, other: usize) -> Option<(Action, usize)> {
    lts.succ(from)
        .iter()
        .find(|&&(a, t)| !sat.hat(other, a).iter().any(|&u| wb[u] == wb[t]))
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sos::OpRegistry;
    use crate::syntax::parse_term;
    use crate::term::{Alphabet, Term};

    fn build(ts: &[&str]) -> Lts {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let terms: Vec<Term> = ts.iter().map(|s| parse_term(s, &ab).unwrap()).collect();
        Lts::build_joint(&terms, &OpRegistry::new()).unwrap()
    }

    #[test]
    fn weak_action_through_tau() {
        let l = build(&["tau.a.0"]);
        let s = weak_saturate(&l);
        assert!(s.weak[l.root()].iter().any(|&(a, _)| a == Action::name("a")));
    }

    #[test]
    fn no_tau_hat_without_tau() {
        let l = build(&["a.0"]);
        let s = weak_saturate(&l);
        assert!(s.tau_hat[l.root()].is_empty());
        assert_eq!(s.eps[l.root()], vec![l.root()]);
    }

    #[test]
    fn epsilon_closure_of_tau_chain() {
        let l = build(&["tau.tau.a.0"]);
        let s = weak_saturate(&l);
        assert_eq!(s.eps[l.root()].len(), 3);
    }
}
