//! Simulation preorders and 2-nested simulation on acyclic systems.
//!
//! A simulation relates `p` to `q` when every move `p -μ-> p'` is matched by
//! some `q -μ-> q'` with `p'` related to `q'`. The variants add a condition on
//! every related pair:
//!
//! * completed: `init(p) = ∅` iff `init(q) = ∅`;
//! * ready: `init(p) = init(q)`.
//!
//! A 2-nested simulation is a simulation contained in the converse of the
//! simulation preorder. On a finite acyclic system the greatest fixpoint is
//! reached by structural recursion, which is memoised per pair.

use std::collections::HashMap;

use serde::Serialize;

use crate::sos::Lts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimVariant {
    Plain,
    Completed,
    Ready,
}

pub struct Simulator<'a> {
    lts: &'a Lts,
    memo: HashMap<(SimVariant, usize, usize), bool>,
    nested: HashMap<(usize, usize), bool>,
}

impl<'a> Simulator<'a> {
    pub fn new(lts: &'a Lts) -> Simulator<'a> {
        Simulator {
            lts,
            memo: HashMap::new(),
            nested: HashMap::new(),
        }
    }

    fn local(&self, v: SimVariant, p: usize, q: usize) -> bool {
        match v {
            SimVariant::Plain => true,
            SimVariant::Completed => self.lts.succ(p).is_empty() == self.lts.succ(q).is_empty(),
            SimVariant::Ready => self.lts.init(p) == self.lts.init(q),
        }
    }

    /// `p` is simulated by `q`.
    pub fn le(&mut self, v: SimVariant, p: usize, q: usize) -> bool {
        if p == q {
            return true;
        }
        if let Some(&r) = self.memo.get(&(v, p, q)) {
            return r;
        }
        let r = self.local(v, p, q) && self.moves_matched(v, p, q).is_none();
        self.memo.insert((v, p, q), r);
        r
    }

    /// The first move of `p` that no move of `q` simulates.
    pub fn moves_matched(&mut self, v: SimVariant, p: usize, q: usize) -> Option<usize> {
        let lts = self.lts;
        for (k, &(a, p2)) in lts.succ(p).iter().enumerate() {
            let ok = lts
                .succ(q)
                .iter()
                .filter(|&&(b, _)| b == a)
                .any(|&(_, q2)| self.le(v, p2, q2));
            if !ok {
                return Some(k);
            }
        }
        None
    }

    pub fn equiv(&mut self, v: SimVariant, p: usize, q: usize) -> bool {
        self.le(v, p, q) && self.le(v, q, p)
    }

    /// `p` is related to `q` by a 2-nested simulation.
    pub fn nested_le(&mut self, p: usize, q: usize) -> bool {
        if p == q {
            return true;
        }
        if let Some(&r) = self.nested.get(&(p, q)) {
            return r;
        }
        let r = self.le(SimVariant::Plain, q, p) && self.nested_unmatched(p, q).is_none();
        self.nested.insert((p, q), r);
        r
    }

    pub fn nested_unmatched(&mut self, p: usize, q: usize) -> Option<usize> {
        let lts = self.lts;
        for (k, &(a, p2)) in lts.succ(p).iter().enumerate() {
            let ok = lts
                .succ(q)
                .iter()
                .filter(|&&(b, _)| b == a)
                .any(|&(_, q2)| self.nested_le(p2, q2));
            if !ok {
                return Some(k);
            }
        }
        None
    }

    pub fn nested_equiv(&mut self, p: usize, q: usize) -> bool {
        self.nested_le(p, q) && self.nested_le(q, p)
    }
}
