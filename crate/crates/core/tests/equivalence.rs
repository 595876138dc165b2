mod common;

use ccs_core::equational::normal_form::normal_form_bisim;
use ccs_core::equiv::traces::{denotation, ready_traces};
use ccs_core::equiv::{decorated_traces, spectrum_matrix, strong_bisim, Semantics, TraceKind, ARROWS};
use ccs_core::sos::{Lts, OpRegistry};
use ccs_core::Term;
use common::term;
use proptest::prelude::*;

fn reg() -> OpRegistry {
    OpRegistry::new()
}

/// Pairs that often agree on coarse semantics without being bisimilar.
fn related_pair() -> impl Strategy<Value = (Term, Term)> {
    (term(true, true, 3), term(true, true, 3), common::action(true), 0..3u8).prop_map(|(x, y, a, k)| match k {
        0 => (Term::prefix(a, Term::sum(x.clone(), y.clone())), Term::sum(Term::prefix(a, x), Term::prefix(a, y))),
        1 => (Term::sum(x.clone(), y.clone()), Term::sum(Term::sum(x.clone(), y), Term::prefix(a, x))),
        _ => (Term::par(x.clone(), y.clone()), Term::par(y, x)),
    })
}

proptest! {
    #[test]
    fn normal_forms_decide_bisimilarity(p in term(true, false, 4), q in term(true, false, 4)) {
        let same = normal_form_bisim(&p) == normal_form_bisim(&q);
        prop_assert_eq!(same, strong_bisim(&p, &q, &reg()).unwrap());
    }

    #[test]
    fn a_term_is_bisimilar_to_its_normal_form(p in term(true, false, 5)) {
        prop_assert!(strong_bisim(&p, &normal_form_bisim(&p), &reg()).unwrap());
    }

    #[test]
    fn matrix_respects_every_arrow((p, q) in related_pair()) {
        let m: std::collections::BTreeMap<Semantics, bool> = spectrum_matrix(&p, &q, &reg()).unwrap().into_iter().collect();
        for (fine, coarse) in ARROWS {
            prop_assert!(!m[&fine] || m[&coarse], "{} holds but {} fails for {} and {}", fine, coarse, p, q);
        }
    }

    #[test]
    fn matrix_is_reflexive_and_symmetric(p in term(true, true, 3), q in term(true, true, 3)) {
        prop_assert!(spectrum_matrix(&p, &p, &reg()).unwrap().iter().all(|&(_, e)| e));
        prop_assert_eq!(spectrum_matrix(&p, &q, &reg()).unwrap(), spectrum_matrix(&q, &p, &reg()).unwrap());
    }

    #[test]
    fn trace_semantics_agree_with_denotations((p, q) in related_pair()) {
        let m: std::collections::BTreeMap<Semantics, bool> = spectrum_matrix(&p, &q, &reg()).unwrap().into_iter().collect();
        let pairs = [
            (Semantics::T, TraceKind::T),
            (Semantics::CT, TraceKind::CT),
            (Semantics::F, TraceKind::F),
            (Semantics::R, TraceKind::R),
            (Semantics::FT, TraceKind::FT),
            (Semantics::RT, TraceKind::RT),
        ];
        for (s, k) in pairs {
            let same = decorated_traces(&p, k, &reg()).unwrap() == decorated_traces(&q, k, &reg()).unwrap();
            prop_assert_eq!(m[&s], same, "{} on {} and {}", s, p, q);
        }
    }

    #[test]
    fn bisimilar_terms_have_equal_ready_traces(p in term(true, false, 4)) {
        let nf = normal_form_bisim(&p);
        let (l1, l2) = (Lts::build(&p, &reg()).unwrap(), Lts::build(&nf, &reg()).unwrap());
        let d1 = denotation(&ready_traces(&l1, l1.root()), TraceKind::RT);
        let d2 = denotation(&ready_traces(&l2, l2.root()), TraceKind::RT);
        prop_assert_eq!(d1, d2);
    }

}
