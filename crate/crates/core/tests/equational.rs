mod common;

use ccs_core::equational::fuzz::{sample_substitution, soundness_fuzz, FuzzConfig, FuzzOutcome};
use ccs_core::equational::proof::{check_proof, Proof, Rule};
use ccs_core::equational::prove::{prove_ground, ProofOutcome};
use ccs_core::equational::rewrite::rewrite_step;
use ccs_core::equiv::{equiv, Semantics};
use ccs_core::sos::OpRegistry;
use ccs_core::syntax::{parse_axiom_system, parse_term, Equation};
use ccs_core::systems::{builtin_axioms, System};
use common::{ab, term};
use proptest::prelude::*;

fn eq(line: &str) -> Equation {
    parse_axiom_system(line, "x", &ab()).unwrap().equations()[0].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fuzzing_is_reproducible(seed in any::<u64>()) {
        let e = eq("BAD : a.(X + Y) = a.X + a.Y");
        let cfg = FuzzConfig { samples: 50, seed, ..FuzzConfig::default() };
        let reg = OpRegistry::new();
        let first = soundness_fuzz(&e, Semantics::B, &cfg, &reg).unwrap();
        prop_assert_eq!(&first, &soundness_fuzz(&e, Semantics::B, &cfg, &reg).unwrap());
        // a counterexample can be replayed from its index alone
        if let FuzzOutcome::Counterexample { sample, subst, lhs, rhs } = first {
            prop_assert_eq!(sample_substitution(&e, &cfg, sample), subst.clone());
            prop_assert_eq!(e.instantiate(&subst), (lhs.clone(), rhs.clone()));
            prop_assert!(!equiv(&lhs, &rhs, Semantics::B, &reg).unwrap());
        }
    }

    #[test]
    fn axiom_rewrites_preserve_the_semantics(p in term(true, false, 3), q in term(true, false, 3)) {
        let sys = builtin_axioms("e_rs", &ab()).unwrap();
        let rs = sys.get("RS[a,b]").unwrap().into_owned();
        let t = rs.lhs.substitute(&ccs_core::Substitution::new().with("X", p).with("Y", q).with("Z", ccs_core::Term::nil()));
        let (u, step) = rewrite_step(&t, &rs, false, &[]).unwrap();
        prop_assert_eq!(step.rule, Rule::E4);
        prop_assert!(equiv(&t, &u, Semantics::RS, &OpRegistry::new()).unwrap());
    }

    #[test]
    fn ground_proofs_check_or_come_with_a_witness(p in term(false, true, 3), q in term(false, true, 3)) {
        for s in [Semantics::B, Semantics::T, Semantics::F] {
            match prove_ground(&p, &q, s, &ab()).unwrap() {
                ProofOutcome::Proved { proof } => {
                    let sys = System::for_semantics(s).unwrap().load(&ab()).unwrap();
                    prop_assert_eq!(check_proof(&proof, &sys), Ok(()));
                }
                ProofOutcome::Disproved { verdict } => prop_assert!(verdict.witness.is_some()),
                ProofOutcome::Unknown { reason } => prop_assert!(false, "{}", reason),
            }
        }
    }
}

#[test]
fn tampered_proofs_are_rejected() {
    let t = |s: &str| parse_term(s, &ab()).unwrap();
    let ProofOutcome::Proved { proof } = prove_ground(&t("a.0 || b.0"), &t("b.a.0 + a.b.0"), Semantics::B, &ab()).unwrap() else {
        panic!("expected a proof");
    };
    let sys = System::B.load(&ab()).unwrap();
    let json = proof.to_json();
    assert_eq!(check_proof(&Proof::from_json(&json).unwrap(), &sys), Ok(()));
    let mut bad = proof.clone();
    let i = bad.steps.iter().position(|s| s.rule == Rule::E4).unwrap();
    bad.steps[i].rhs = t("a.0");
    assert_eq!(check_proof(&bad, &sys).unwrap_err().step, i);
    let mut wrong_goal = proof;
    wrong_goal.goal.rhs = t("a.b.0");
    assert!(check_proof(&wrong_goal, &sys).is_err());
}
