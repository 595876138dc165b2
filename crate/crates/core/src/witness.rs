//! Witness families of sound equations and the action-free machinery.
//!
//! Each family comes with a term property that one side has and the other
//! lacks: having a summand equivalent to a fixed target. [`verify_family`]
//! checks soundness and that asymmetry.
//!
//! A term is action-free when it has no transition, reading variables as
//! inert. In plain CCS that means it contains no prefix at all.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::equational::fuzz::{soundness_fuzz, FuzzConfig};
use crate::equational::proof::{Goal, Proof, Rule, Step};
use crate::equiv::{equiv, Semantics};
use crate::error::{Error, Result};
use crate::gen::{sample_rng, TermGen};
use crate::sos::desimone::validate_de_simone;
use crate::sos::{step, DeSimoneRuleSet, OpRegistry};
use crate::syntax::{parse_axiom_system, Equation};
use crate::systems::axiom_text;
use crate::term::{Action, Alphabet, Substitution, Term};

/// `μ^m`: `m` nested prefixes ending in `0`.
pub fn power(mu: Action, m: usize) -> Term {
    (0..m).fold(Term::nil(), |t, _| Term::prefix(mu, t))
}

/// `μ^≤i = μ + μ² + ... + μ^i`; the empty sum `0` when `i = 0`.
pub fn bounded_sum(mu: Action, i: usize) -> Term {
    Term::sum_of((1..=i).map(|m| power(mu, m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyTag {
    Mn,
    In,
    #[serde(rename = "eps")]
    Eps,
    #[serde(rename = "vareps")]
    Vareps,
    #[serde(rename = "eN")]
    EN,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] = [FamilyTag::Mn, FamilyTag::In, FamilyTag::Eps, FamilyTag::Vareps, FamilyTag::EN];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Mn => "Mn",
            FamilyTag::In => "In",
            FamilyTag::Eps => "eps",
            FamilyTag::Vareps => "vareps",
            FamilyTag::EN => "eN",
        }
    }

    /// Smallest valid index.
    pub fn first(self) -> usize {
        match self {
            FamilyTag::Eps | FamilyTag::Vareps => 0,
            _ => 1,
        }
    }

    pub fn needs_rules(self) -> bool {
        matches!(self, FamilyTag::Eps | FamilyTag::Vareps)
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyTag> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Family(format!("unknown family `{s}` (expected Mn, In, eps, vareps or eN)")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessFamily {
    pub tag: FamilyTag,
    pub index: usize,
    pub equation: Equation,
    /// The side property: having a summand equivalent to this term.
    pub target_summand: Option<Term>,
    /// Semantics the equation is claimed sound for; the first one also
    /// decides the summand property.
    pub semantics: Vec<Semantics>,
    #[serde(skip)]
    pub rules: Option<DeSimoneRuleSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl WitnessFamily {
    pub fn registry(&self) -> Result<OpRegistry> {
        match &self.rules {
            Some(rs) => OpRegistry::new().with(rs.clone()),
            None => Ok(OpRegistry::new()),
        }
    }
}

fn var(name: &str) -> Term {
    Term::var(name)
}

/// The two sides of `M_n` over the given `x`, `y` and `z_1 ... z_n`.
fn moller(x: &Term, y: &Term, zs: &[Term]) -> (Term, Term) {
    let xy = Term::sum(x.clone(), y.clone());
    let z = Term::sum_of(zs.iter().cloned());
    let lhs = Term::sum_of(
        std::iter::once(Term::par(xy.clone(), z.clone()))
            .chain(zs.iter().map(|zi| Term::sum(Term::par(x.clone(), zi.clone()), Term::par(y.clone(), zi.clone())))),
    );
    let rhs = Term::sum_of(
        [Term::par(x.clone(), z.clone()), Term::par(y.clone(), z)]
            .into_iter()
            .chain(zs.iter().map(|zi| Term::par(xy.clone(), zi.clone()))),
    );
    (lhs, rhs)
}

fn names(alphabet: &Alphabet, need: usize, tag: FamilyTag) -> Result<Vec<Action>> {
    let v: Vec<Action> = alphabet.name_actions();
    if v.len() < need {
        return Err(Error::Family(format!("{tag} needs {need} distinct action names")));
    }
    Ok(v)
}

/// Builds member `n` of a family. The action `α` of the operator families is
/// the first name of the alphabet; `e_N` uses the first two names as `a`, `b`.
pub fn family(tag: FamilyTag, n: usize, alphabet: &Alphabet, rules: Option<&DeSimoneRuleSet>) -> Result<WitnessFamily> {
    if n < tag.first() {
        return Err(Error::Family(format!("{tag} starts at index {}", tag.first())));
    }
    let f = match (tag.needs_rules(), rules) {
        (true, None) => return Err(Error::Family(format!("{tag} needs a rule set for the operator"))),
        (true, Some(rs)) => {
            let bad = validate_de_simone(rs);
            if !bad.is_empty() {
                return Err(Error::NonDeSimone(bad.iter().map(|v| v.to_string()).collect()));
            }
            Some(rs.clone())
        }
        (false, _) => None,
    };
    let name = format!("{tag}[{n}]");
    let mut note = None;
    let (equation, target, semantics) = match tag {
        FamilyTag::Mn => {
            let zs: Vec<Term> = (1..=n).map(|i| var(&format!("Z{i}"))).collect();
            let (l, r) = moller(&var("X"), &var("Y"), &zs);
            if l.ac_equal(&r) {
                note = Some("degenerate index: the two sides are equal up to commutativity".into());
            }
            (Equation::new(name, l, r), None, vec![Semantics::B, Semantics::RWB])
        }
        FamilyTag::In => {
            let a = names(alphabet, 1, tag)?[0];
            let zs: Vec<Term> = (1..=n).map(|i| power(a, i)).collect();
            let (x, y) = (power(a, 1), power(a, 2));
            let (l, r) = moller(&x, &y, &zs);
            let target = Term::par(Term::sum(x, y), bounded_sum(a, n));
            if n == 1 {
                note = Some("degenerate index: the right-hand side also has the target as a summand".into());
            }
            (Equation::new(name, l, r), Some(target), vec![Semantics::B])
        }
        FamilyTag::Eps | FamilyTag::Vareps => {
            let rs = f.as_ref().expect("checked above");
            let alpha = names(alphabet, 1, tag)?[0];
            let bar = alpha.complement()?;
            let a0 = power(alpha, 1);
            let (arg, rhs) = if tag == FamilyTag::Eps {
                // p_n = Σ ᾱ α^≤i, rhs α p_n + Σ τ α^≤i
                let p = Term::sum_of((0..=n).map(|i| Term::prefix(bar, bounded_sum(alpha, i))));
                let tail = (0..=n).map(|i| Term::prefix(Action::Tau, bounded_sum(alpha, i)));
                (p.clone(), Term::sum_of(std::iter::once(Term::prefix(alpha, p)).chain(tail)))
            } else {
                // q_n = Σ α ᾱ^≤i, rhs α q_n + Σ α (α || ᾱ^≤i)
                let q = Term::sum_of((0..=n).map(|i| Term::prefix(alpha, bounded_sum(bar, i))));
                let tail = (0..=n).map(|i| Term::prefix(alpha, Term::par(a0.clone(), bounded_sum(bar, i))));
                (q.clone(), Term::sum_of(std::iter::once(Term::prefix(alpha, q)).chain(tail)))
            };
            if tag == FamilyTag::Vareps && n == 0 {
                note = Some("degenerate index: f(a, a.0) is bisimilar to the summand a.a.0".into());
            }
            let lhs = Term::op(rs.op, a0, arg);
            (Equation::new(name, lhs.clone(), rhs), Some(lhs), vec![Semantics::B])
        }
        FamilyTag::EN => {
            let v = names(alphabet, 2, tag)?;
            let (a, b) = (v[0], v[1]);
            let a0 = power(a, 1);
            let b_then_a = |i: usize| (0..i).fold(a0.clone(), |t, _| Term::prefix(b, t));
            let p = Term::sum_of((1..=n).map(b_then_a));
            let lhs = Term::par(a0.clone(), p.clone());
            let rhs = Term::sum_of(
                std::iter::once(Term::prefix(a, p)).chain((1..=n).map(|i| Term::prefix(b, Term::par(a0.clone(), b_then_a(i - 1))))),
            );
            if n == 1 {
                note = Some("the asymmetry is only claimed for N >= 2".into());
            }
            (Equation::new(name, lhs.clone(), rhs), Some(lhs), vec![Semantics::PF])
        }
    };
    Ok(WitnessFamily {
        tag,
        index: n,
        equation,
        target_summand: target,
        semantics,
        rules: f,
        note,
    })
}

/// Some summand of `p` is `s`-equivalent to `target`.
pub fn has_summand_equiv(p: &Term, target: &Term, s: Semantics, reg: &OpRegistry) -> Result<bool> {
    for u in p.summands() {
        if equiv(&u, target, s, reg)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub n: usize,
    pub sound: bool,
    pub lhs_summand: Option<bool>,
    pub rhs_summand: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Soundness under every claimed semantics (sampled closing substitutions
/// for open members) and the summand property of both sides.
pub fn verify_family(w: &WitnessFamily, cfg: &FuzzConfig) -> Result<FamilyReport> {
    let reg = w.registry()?;
    let eq = &w.equation;
    let mut sound = true;
    for &s in &w.semantics {
        sound &= if eq.is_closed() {
            equiv(&eq.lhs, &eq.rhs, s, &reg)?
        } else {
            soundness_fuzz(eq, s, cfg, &reg)?.passed()
        };
    }
    let side = |t: &Term| -> Result<Option<bool>> {
        match &w.target_summand {
            Some(target) => Ok(Some(has_summand_equiv(t, target, w.semantics[0], &reg)?)),
            None => Ok(None),
        }
    };
    Ok(FamilyReport {
        family: w.tag.to_string(),
        n: w.index,
        sound,
        lhs_summand: side(&eq.lhs)?,
        rhs_summand: side(&eq.rhs)?,
        note: w.note.clone(),
    })
}

/// No transition, with variables inert.
pub fn is_action_free(t: &Term, reg: &OpRegistry) -> Result<bool> {
    Ok(step(t, reg)?.is_empty())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaZeroReport {
    pub term: Term,
    pub action_free: bool,
    /// `σ0(t) ~B 0`.
    pub sigma_zero_nil: bool,
    /// Actions enabled by `σ(t)` for `σ0` and every sampled `σ`.
    pub common_actions: Vec<Action>,
    pub samples: usize,
    /// The relevant half of the lemma holds for `t`.
    pub holds: bool,
}

/// Checks the two halves of the lemma on `t`: an action-free term is
/// bisimilar to `0` under `σ0`; any other term has an action enabled under
/// `σ0` and under every sampled closing substitution.
pub fn sigma_zero_audit(t: &Term, cfg: &FuzzConfig, reg: &OpRegistry) -> Result<SigmaZeroReport> {
    let action_free = is_action_free(t, reg)?;
    let z = t.sigma_zero();
    let sigma_zero_nil = equiv(&z, &Term::nil(), Semantics::B, reg)?;
    let initials = |u: &Term| -> Result<Vec<Action>> {
        let mut v: Vec<Action> = step(u, reg)?.into_iter().map(|(a, _)| a).collect();
        v.dedup();
        Ok(v)
    };
    let mut common = initials(&z)?;
    let gen = TermGen::new(cfg.alphabet.actions(), cfg.depth);
    let vars = t.free_vars();
    let samples = if vars.is_empty() { 0 } else { cfg.samples };
    for i in 0..samples {
        let mut rng = sample_rng(cfg.seed, i as u64);
        let sigma: Substitution = vars.iter().map(|&x| (x, gen.sample(&mut rng))).collect();
        let here = initials(&t.substitute(&sigma))?;
        common.retain(|a| here.contains(a));
    }
    let holds = if action_free { sigma_zero_nil } else { !common.is_empty() };
    Ok(SigmaZeroReport {
        term: t.clone(),
        action_free,
        sigma_zero_nil,
        common_actions: common,
        samples,
        holds,
    })
}

/// Index of the first step with a side that is not action-free.
pub fn first_non_action_free_step(pr: &Proof, reg: &OpRegistry) -> Result<Option<usize>> {
    for (i, s) in pr.steps.iter().enumerate() {
        if !is_action_free(&s.lhs, reg)? || !is_action_free(&s.rhs, reg)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Every equation in the proof is action-free.
pub fn audit_action_free_proof(pr: &Proof, reg: &OpRegistry) -> Result<bool> {
    Ok(first_non_action_free_step(pr, reg)?.is_none())
}

/// A valid proof of `0 || 0 ≈ 0` from the basic axioms that also derives
/// `a ≈ a` through `a + a`, a detour over terms that are not action-free.
pub fn detour_proof(alphabet: &Alphabet) -> Result<Proof> {
    let sys = parse_axiom_system(axiom_text("e1").expect("bundled"), "e1", alphabet)?;
    let a = power(names(alphabet, 1, FamilyTag::In)?[0], 1);
    let leaf = |axiom: &str, x: Term| -> Result<Step> {
        let eq = sys.get(axiom).ok_or_else(|| Error::UnknownAxiom(axiom.into()))?;
        let sigma = Substitution::new().with("X", x);
        let (lhs, rhs) = eq.instantiate(&sigma);
        Ok(Step {
            rule: Rule::E4,
            axiom: Some(axiom.into()),
            subst: Some(sigma),
            semantics: None,
            position: Vec::new(),
            premises: Vec::new(),
            lhs,
            rhs,
        })
    };
    let s0 = leaf("A3", a.clone())?;
    let s1 = Step {
        rule: Rule::E2,
        axiom: None,
        subst: None,
        semantics: None,
        position: Vec::new(),
        premises: vec![0],
        lhs: s0.rhs.clone(),
        rhs: s0.lhs.clone(),
    };
    let s2 = Step {
        rule: Rule::E3,
        premises: vec![1, 0],
        lhs: a.clone(),
        rhs: a,
        ..s1.clone()
    };
    let s3 = leaf("P0", Term::nil())?;
    Ok(Proof {
        system: "e1".into(),
        alphabet: alphabet.clone(),
        goal: Goal {
            lhs: s3.lhs.clone(),
            rhs: s3.rhs.clone(),
        },
        steps: vec![s0, s1, s2, s3],
        trusted_gap: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub action_free: bool,
    pub rwb_sound: bool,
    /// Sound modulo B on closing substitutions without τ.
    pub b_sound_tau_free: bool,
}

/// Samples the claim that an action-free equation sound modulo RWB is sound
/// modulo B over τ-free processes.
pub fn action_free_transfer(eq: &Equation, cfg: &FuzzConfig, reg: &OpRegistry) -> Result<TransferReport> {
    let action_free = is_action_free(&eq.lhs, reg)? && is_action_free(&eq.rhs, reg)?;
    let rwb_sound = soundness_fuzz(eq, Semantics::RWB, cfg, reg)?.passed();
    let gen = TermGen::new(cfg.alphabet.visible(), cfg.depth);
    let mut b_sound_tau_free = true;
    for i in 0..cfg.samples {
        let mut rng = sample_rng(cfg.seed, i as u64);
        let sigma: Substitution = eq.vars().into_iter().map(|x| (x, gen.sample(&mut rng))).collect();
        let (l, r) = eq.instantiate(&sigma);
        if !equiv(&l, &r, Semantics::B, reg)? {
            b_sound_tau_free = false;
            break;
        }
    }
    Ok(TransferReport {
        action_free,
        rwb_sound,
        b_sound_tau_free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equational::proof::check_proof;
    use crate::syntax::{parse_term, render_term};
    use crate::systems::builtin_rules;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &ab()).unwrap()
    }

    fn cfg() -> FuzzConfig {
        FuzzConfig {
            samples: 100,
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn powers_and_bounded_sums() {
        let a = Action::name("a");
        assert_eq!(power(a, 3), t("a.a.a.0"));
        assert_eq!(bounded_sum(a, 2), t("a.0 + a.a.0"));
        assert_eq!(bounded_sum(a, 0), Term::nil());
    }

    #[test]
    fn first_moller_equation_is_degenerate() {
        let w = family(FamilyTag::Mn, 1, &ab(), None).unwrap();
        assert!(w.equation.lhs.ac_equal(&w.equation.rhs));
        assert!(w.note.is_some());
        assert!(!w.equation.is_closed());
    }

    #[test]
    fn first_future_equation_matches_the_display() {
        let w = family(FamilyTag::EN, 1, &ab(), None).unwrap();
        assert!(w.equation.lhs.ac_equal(&t("a.0 || b.a.0")));
        assert!(w.equation.rhs.ac_equal(&t("a.b.a.0 + b.(a.0 || a.0)")));
    }

    #[test]
    fn eps_at_zero() {
        let rs = builtin_rules("interleave_sync", &ab()).unwrap();
        let w = family(FamilyTag::Eps, 0, &ab(), Some(&rs)).unwrap();
        assert_eq!(render_term(&w.equation.lhs), "f(a.0, ~a.0)");
        assert!(w.equation.rhs.ac_equal(&t("a.~a.0 + tau.0")));
    }

    #[test]
    fn operator_families_need_rules() {
        assert!(matches!(family(FamilyTag::Vareps, 1, &ab(), None), Err(Error::Family(_))));
    }

    #[test]
    fn future_family_report() {
        let w = family(FamilyTag::EN, 2, &ab(), None).unwrap();
        let r = verify_family(&w, &cfg()).unwrap();
        assert_eq!((r.sound, r.lhs_summand, r.rhs_summand), (true, Some(true), Some(false)));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"family":"eN","n":2,"sound":true,"lhs_summand":true,"rhs_summand":false}"#);
    }

    #[test]
    fn moller_instance_is_sound() {
        let w = family(FamilyTag::In, 2, &ab(), None).unwrap();
        let r = verify_family(&w, &cfg()).unwrap();
        assert_eq!((r.sound, r.lhs_summand, r.rhs_summand), (true, Some(true), Some(false)));
    }

    #[test]
    fn vareps_rhs_lacks_the_summand() {
        let rs = builtin_rules("alpha_both", &ab()).unwrap();
        let w = family(FamilyTag::Vareps, 1, &ab(), Some(&rs)).unwrap();
        let r = verify_family(&w, &cfg()).unwrap();
        assert_eq!((r.sound, r.lhs_summand, r.rhs_summand), (true, Some(true), Some(false)));
    }

    #[test]
    fn summands_versus_whole_terms() {
        let reg = OpRegistry::new();
        let target = t("a.0 || b.0");
        assert!(has_summand_equiv(&t("a.0 + (a.0 || b.0)"), &target, Semantics::B, &reg).unwrap());
        assert!(!has_summand_equiv(&t("a.b.0 + b.a.0"), &target, Semantics::B, &reg).unwrap());
        assert!(!has_summand_equiv(&t("a.b.0 + b.a.0"), &target, Semantics::T, &reg).unwrap());
        assert!(equiv(&t("a.b.0 + b.a.0"), &target, Semantics::B, &reg).unwrap());
    }

    #[test]
    fn action_free_examples() {
        let reg = OpRegistry::new();
        assert!(is_action_free(&t("X || (Y + Z)"), &reg).unwrap());
        assert!(!is_action_free(&t("a.0 + X"), &reg).unwrap());
        assert!(!is_action_free(&t("X || a.Y"), &reg).unwrap());
    }

    #[test]
    fn sigma_zero_examples() {
        let reg = OpRegistry::new();
        let r = sigma_zero_audit(&t("X || (Y + Z)"), &cfg(), &reg).unwrap();
        assert!(r.action_free && r.sigma_zero_nil && r.holds);
        let r = sigma_zero_audit(&t("a.X"), &cfg(), &reg).unwrap();
        assert!(!r.action_free && r.holds);
        assert_eq!(r.common_actions, vec![Action::name("a")]);
        assert!(sigma_zero_audit(&Term::nil(), &cfg(), &reg).unwrap().holds);
    }

    #[test]
    fn detour_is_valid_but_rejected() {
        let pr = detour_proof(&ab()).unwrap();
        let sys = parse_axiom_system(axiom_text("e1").unwrap(), "e1", &ab()).unwrap();
        assert_eq!(check_proof(&pr, &sys), Ok(()));
        let reg = OpRegistry::new();
        assert_eq!(first_non_action_free_step(&pr, &reg).unwrap(), Some(0));
        assert!(!audit_action_free_proof(&pr, &reg).unwrap());
    }

    #[test]
    fn moller_transfers_to_bisimilarity() {
        let w = family(FamilyTag::Mn, 2, &ab(), None).unwrap();
        let r = action_free_transfer(&w.equation, &cfg(), &OpRegistry::new()).unwrap();
        assert!(r.action_free && r.rwb_sound && r.b_sound_tau_free);
    }
}
