//! Exhaustive search for pairs that separate adjacent semantics.
//!
//! Closed terms are enumerated by size and deduplicated up to bisimilarity.
//! Only pairs with equal weak traces are compared, since every semantics of
//! the spectrum implies weak trace equality.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::equational::normal_form::normal_form_bisim;
use crate::error::Result;
use crate::gen::enumerate_closed;
use crate::sos::{Lts, OpRegistry};
use crate::term::{Action, Term};

use super::traces::{ready_traces, Trace};
use super::{EquivContext, Semantics};

/// `left` and `right` agree on `coarser` but not on `finer`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separation {
    pub finer: Semantics,
    pub coarser: Semantics,
    pub left: Term,
    pub right: Term,
}

/// Searches terms over `actions` of size at most `max_size` for a separating
/// pair of every arrow in `arrows`, stopping once all are found. Arrows with
/// no example within the bound are absent from the result.
pub fn separating_examples(
    actions: &[Action],
    max_size: usize,
    par: bool,
    arrows: &[(Semantics, Semantics)],
    reg: &OpRegistry,
) -> Result<Vec<Separation>> {
    let mut todo: BTreeSet<(Semantics, Semantics)> = arrows.iter().copied().collect();
    let mut found = Vec::new();
    let mut seen: BTreeSet<Term> = BTreeSet::new();
    let mut buckets: HashMap<BTreeSet<Trace>, Vec<Term>> = HashMap::new();
    for layer in enumerate_closed(actions, max_size, par) {
        for t in layer {
            if todo.is_empty() {
                return Ok(found);
            }
            let lts = Lts::build(&t, reg)?;
            if !seen.insert(normal_form_bisim(&lts.unfold(lts.root()))) {
                continue;
            }
            let weak: BTreeSet<Trace> = ready_traces(&lts, lts.root())
                .into_iter()
                .map(|rt| rt.actions.into_iter().filter(|a| !a.is_tau()).collect())
                .collect();
            let bucket = buckets.entry(weak).or_default();
            for q in bucket.iter() {
                let cx = EquivContext::new(q, &t, reg)?;
                let hits: Vec<_> = todo.iter().copied().filter(|&(f, c)| cx.equal(c) && !cx.equal(f)).collect();
                for (finer, coarser) in hits {
                    todo.remove(&(finer, coarser));
                    found.push(Separation {
                        finer,
                        coarser,
                        left: q.clone(),
                        right: t.clone(),
                    });
                }
            }
            bucket.push(t);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::equiv;

    #[test]
    fn finds_the_branching_time_examples() {
        let acts = [Action::name("a"), Action::name("b")];
        let reg = OpRegistry::new();
        let arrows = [(Semantics::S, Semantics::T), (Semantics::CS, Semantics::S)];
        let out = separating_examples(&acts, 5, false, &arrows, &reg).unwrap();
        assert_eq!(out.len(), 2);
        for s in out {
            assert!(s.left.size() <= 5 && s.right.size() <= 5);
            assert!(equiv(&s.left, &s.right, s.coarser, &reg).unwrap());
            assert!(!equiv(&s.left, &s.right, s.finer, &reg).unwrap());
        }
    }

    #[test]
    fn weak_arrows_need_tau() {
        let reg = OpRegistry::new();
        let arrows = [(Semantics::RWB, Semantics::WB)];
        let visible = separating_examples(&[Action::name("a")], 3, false, &arrows, &reg).unwrap();
        assert!(visible.is_empty());
        let with_tau = separating_examples(&[Action::name("a"), Action::Tau], 3, false, &arrows, &reg).unwrap();
        assert_eq!(with_tau.len(), 1);
    }
}
