//! Ground proofs between closed terms.
//!
//! Bisimilarity: both sides are rewritten with expansion-law instances into
//! `||`-free terms and then into normal forms; a proof exists exactly when the
//! normal forms agree. For the other semantics with a bundled system both
//! sides are reduced to `||`-free terms by equational steps, and the final
//! step between the reduced terms is a semantic check marked as a trusted gap.

use serde::Serialize;

use crate::equiv::{verdict, Semantics, Verdict};
use crate::error::{Error, Result};
use crate::sos::OpRegistry;
use crate::systems::System;
use crate::term::{Alphabet, Term};

use super::eliminate::{eliminate_with, DEFAULT_MOVE_BUDGET};
use super::normal_form::normalise;
use super::proof::{join, Proof};

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum ProofOutcome {
    Proved { proof: Proof },
    Disproved { verdict: Verdict },
    Unknown { reason: String },
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved { .. })
    }
}

pub fn prove_ground(p: &Term, q: &Term, sem: Semantics, alphabet: &Alphabet) -> Result<ProofOutcome> {
    prove_ground_with(p, q, sem, alphabet, DEFAULT_MOVE_BUDGET)
}

pub fn prove_ground_with(p: &Term, q: &Term, sem: Semantics, alphabet: &Alphabet, budget: usize) -> Result<ProofOutcome> {
    for t in [p, q] {
        if !t.is_closed() {
            return Err(Error::OpenTerm(t.to_string()));
        }
    }
    let reg = OpRegistry::new();
    let v = verdict(p, q, sem, &reg)?;
    if !v.equal {
        return Ok(ProofOutcome::Disproved { verdict: v });
    }
    let Some(kind) = System::for_semantics(sem) else {
        return Ok(ProofOutcome::Unknown {
            reason: format!("no bundled axiom system for {sem}"),
        });
    };
    let system = kind.load(alphabet)?;
    let run = |t: &Term| eliminate_with(t, kind, system.clone(), budget);
    let (ep, eq) = match (run(p), run(q)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::StepBudget(n)), _) | (_, Err(Error::StepBudget(n))) => {
            return Ok(ProofOutcome::Unknown {
                reason: format!("elimination exceeded {n} moves"),
            })
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let (mut dp, mut dq) = (ep.derivation, eq.derivation);
    let proof = if kind == System::B {
        normalise(&mut dp, &[], &system)?;
        normalise(&mut dq, &[], &system)?;
        if !dp.end().ac_equal(dq.end()) {
            return Err(Error::Unsupported(format!(
                "bisimilar terms with different normal forms: {} and {}",
                dp.end(),
                dq.end()
            )));
        }
        join(&dp, &dq, &system, None)
    } else if dp.end().ac_equal(dq.end()) {
        join(&dp, &dq, &system, None)
    } else {
        join(&dp, &dq, &system, Some(sem))
    };
    Ok(ProofOutcome::Proved { proof })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equational::proof::{check_proof, TRUSTED_GAP};
    use crate::syntax::parse_term;

    fn abc() -> Alphabet {
        Alphabet::new(["a", "b", "c"]).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &abc()).unwrap()
    }

    fn proved(p: &str, q: &str, s: Semantics) -> Proof {
        match prove_ground(&t(p), &t(q), s, &abc()).unwrap() {
            ProofOutcome::Proved { proof } => {
                let sys = System::for_semantics(s).unwrap().load(&abc()).unwrap();
                assert_eq!(check_proof(&proof, &sys), Ok(()));
                proof
            }
            other => panic!("{p} = {q} under {s}: {other:?}"),
        }
    }

    #[test]
    fn interleaving_is_provable_for_bisimilarity() {
        let pr = proved("a.0 || b.0", "a.b.0 + b.a.0", Semantics::B);
        assert!(pr.trusted_gap.is_none());
    }

    #[test]
    fn distinct_prefixes_are_disproved() {
        match prove_ground(&t("a.0"), &t("b.0"), Semantics::B, &abc()).unwrap() {
            ProofOutcome::Disproved { verdict } => assert!(verdict.witness.is_some()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trace_equal_terms_use_the_trusted_gap() {
        let pr = proved("a.(b.0 + c.0)", "a.b.0 + a.c.0", Semantics::T);
        assert_eq!(pr.trusted_gap.as_deref(), Some(TRUSTED_GAP));
    }

    #[test]
    fn nested_parallel_with_synchronisation() {
        proved("(a.0 || ~a.0) || b.0", "b.(a.0 || ~a.0) + (a.0 || ~a.0 || b.0)", Semantics::B);
    }

    #[test]
    fn semantics_without_axioms_are_unknown() {
        let out = prove_ground(&t("a.0"), &t("a.0 + a.0"), Semantics::PF, &abc()).unwrap();
        assert!(matches!(out, ProofOutcome::Unknown { .. }));
    }
}
