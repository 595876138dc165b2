//! Bisimilarity normal forms of closed `||`-free terms.
//!
//! A normal form is a sorted, duplicate-free sum of prefixes over normal
//! forms, or `0`. Two closed `||`-free terms are bisimilar exactly when their
//! normal forms coincide.

use crate::error::{Error, Result};
use crate::syntax::AxiomSystem;
use crate::term::{Substitution, Term, TermKind};

use super::proof::Derivation;

pub fn normal_form_bisim(p: &Term) -> Term {
    match p.kind() {
        TermKind::Prefix(a, body) => Term::prefix(*a, normal_form_bisim(body)),
        TermKind::Sum(..) => {
            let mut parts: Vec<Term> = p
                .summands()
                .iter()
                .map(normal_form_bisim)
                .flat_map(|s| s.summands())
                .filter(|s| !s.is_nil())
                .collect();
            parts.sort();
            parts.dedup();
            Term::sum_of(parts)
        }
        _ => p.clone(),
    }
}

/// Normalises the subterm at `pos` of the derivation's current term with A0
/// and A3, working bottom-up. Afterwards the subterm is AC-equal to its
/// normal form.
pub fn normalise(d: &mut Derivation, pos: &[usize], system: &AxiomSystem) -> Result<()> {
    let a0 = system.get("A0").ok_or_else(|| Error::UnknownAxiom("A0".into()))?.into_owned();
    let a3 = system.get("A3").ok_or_else(|| Error::UnknownAxiom("A3".into()))?.into_owned();
    go(d, pos.to_vec(), &a0, &a3)
}

fn go(d: &mut Derivation, pos: Vec<usize>, a0: &crate::syntax::Equation, a3: &crate::syntax::Equation) -> Result<()> {
    let t = d.end().subterm(&pos).ok_or_else(|| Error::BadPosition(pos.clone()))?.clone();
    match t.kind() {
        TermKind::Nil | TermKind::Var(_) => Ok(()),
        TermKind::Prefix(..) => go(d, child(&pos, 0), a0, a3),
        TermKind::Sum(..) => {
            go(d, child(&pos, 0), a0, a3)?;
            go(d, child(&pos, 1), a0, a3)?;
            loop {
                let parts = d.end().subterm(&pos).expect("position stays valid").summands();
                if parts.len() < 2 {
                    return Ok(());
                }
                if let Some(i) = parts.iter().position(Term::is_nil) {
                    let rest = Term::sum_of(without(&parts, &[i]));
                    let view = Term::sum(rest.clone(), Term::nil());
                    d.apply(&pos, view, &[], a0, false, Substitution::new().with("X", rest))?;
                    continue;
                }
                let dup = (0..parts.len()).find_map(|i| ((i + 1)..parts.len()).find(|&j| parts[i].ac_equal(&parts[j])).map(|j| (i, j)));
                let Some((i, j)) = dup else {
                    return Ok(());
                };
                let x = parts[i].clone();
                let rest = without(&parts, &[i, j]);
                let pair = Term::sum(x.clone(), x.clone());
                let (view, inner) = if rest.is_empty() {
                    (pair, Vec::new())
                } else {
                    (Term::sum(pair, Term::sum_of(rest)), vec![0])
                };
                d.apply(&pos, view, &inner, a3, false, Substitution::new().with("X", x))?;
            }
        }
        _ => Err(Error::Unsupported(format!("normal forms are defined for ||-free terms, got `{t}`"))),
    }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equational::proof::check_proof;
    use crate::syntax::{parse_axiom_system, parse_term};
    use crate::term::Alphabet;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &ab()).unwrap()
    }

    fn e0() -> AxiomSystem {
        let text = "A0 : X + 0 = X\nA1 : X + Y = Y + X\nA2 : (X + Y) + Z = X + (Y + Z)\nA3 : X + X = X\n";
        parse_axiom_system(text, "e0", &ab()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(normal_form_bisim(&t("a.0 + a.0 + 0")), t("a.0"));
        assert_eq!(normal_form_bisim(&t("b.0 + a.0")), t("a.0 + b.0"));
        assert_eq!(normal_form_bisim(&t("a.(b.0 + b.0)")), t("a.b.0"));
        assert_eq!(normal_form_bisim(&t("0 + 0")), t("0"));
    }

    #[test]
    fn derivation_reaches_the_normal_form() {
        let sys = e0();
        for s in ["a.0 + a.0 + 0", "b.(a.0 + 0) + a.0 + b.a.0", "0 + 0 + a.(0 + 0)", "a.0 + b.0 + a.0 + b.0"] {
            let mut d = Derivation::new(t(s));
            normalise(&mut d, &[], &sys).unwrap();
            assert_eq!(d.end().ac_canonical(), normal_form_bisim(&t(s)), "{s}");
            let pr = d.into_proof(&sys);
            assert_eq!(check_proof(&pr, &sys), Ok(()), "{s}");
        }
    }
}
