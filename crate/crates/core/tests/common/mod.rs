#![allow(dead_code)]

use ccs_core::{Action, Alphabet, Term};
use proptest::prelude::*;

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

pub fn action(with_tau: bool) -> impl Strategy<Value = Action> {
    let mut acts = ab().visible();
    if with_tau {
        acts.push(Action::Tau);
    }
    prop::sample::select(acts)
}

/// Closed terms over `{a, b}` with their complements and, optionally, τ and `||`.
pub fn term(with_tau: bool, par: bool, depth: u32) -> impl Strategy<Value = Term> {
    let leaf = Just(Term::nil());
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let prefix = (action(with_tau), inner.clone()).prop_map(|(a, t)| Term::prefix(a, t));
        let sum = (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r));
        if par {
            let p = (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r));
            prop_oneof![3 => prefix, 2 => sum, 1 => p].boxed()
        } else {
            prop_oneof![3 => prefix, 2 => sum].boxed()
        }
    })
}

/// Open terms over the variables `X`, `Y`.
pub fn open_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::nil()), Just(Term::var("X")), Just(Term::var("Y"))];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            (action(true), inner.clone()).prop_map(|(a, t)| Term::prefix(a, t)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r)),
        ]
    })
}
