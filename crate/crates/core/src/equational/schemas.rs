//! Alphabet-dependent axiom schemas: the expansion law and its finite
//! variants, RSP2 and RT.
//!
//! Instances are named after their schema with the chosen actions in
//! brackets; `|` separates the two argument lists, e.g. `EL2[a,~a|tau]`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::{parse_action, Equation, SchemaTag};
use crate::term::{Action, Alphabet, Term};

/// Upper bound on the number of instances a single schema or metavariable
/// line may produce.
pub const DEFAULT_CAP: usize = 100_000;

fn var(prefix: &str, i: usize) -> Term {
    Term::var(&format!("{prefix}{i}"))
}

fn label(acts: &[Action]) -> String {
    acts.iter().map(Action::to_string).collect::<Vec<_>>().join(",")
}

/// `Σ μ_i X_i || Σ ν_j Y_j` expanded into its initial moves. `I` and `J` may
/// repeat actions; either may be empty.
fn expansion(mus: &[Action], nus: &[Action], xs: &[Term], ys: &[Term]) -> (Term, Term) {
    let left = Term::sum_of(mus.iter().zip(xs).map(|(&m, x)| Term::prefix(m, x.clone())));
    let right = Term::sum_of(nus.iter().zip(ys).map(|(&n, y)| Term::prefix(n, y.clone())));
    let mut rhs = Vec::new();
    for (&m, x) in mus.iter().zip(xs) {
        rhs.push(Term::prefix(m, Term::par(x.clone(), right.clone())));
    }
    for (&n, y) in nus.iter().zip(ys) {
        rhs.push(Term::prefix(n, Term::par(left.clone(), y.clone())));
    }
    for (&m, x) in mus.iter().zip(xs) {
        for (&n, y) in nus.iter().zip(ys) {
            if m.complements(n) {
                rhs.push(Term::prefix(Action::Tau, Term::par(x.clone(), y.clone())));
            }
        }
    }
    (Term::par(left, right), Term::sum_of(rhs))
}

/// An instance of the unbounded expansion law over variables `X1.. , Y1..`.
pub fn expansion_instance(mus: &[Action], nus: &[Action]) -> Equation {
    let xs: Vec<Term> = (1..=mus.len()).map(|i| var("X", i)).collect();
    let ys: Vec<Term> = (1..=nus.len()).map(|i| var("Y", i)).collect();
    let (lhs, rhs) = expansion(mus, nus, &xs, &ys);
    Equation::new(format!("EL[{}|{}]", label(mus), label(nus)), lhs, rhs)
}

/// The two-prefix expansion law over `X, Y`: EL1, or EL1τ when `μ = ν̄`.
pub fn el1_instance(mu: Action, nu: Action) -> Equation {
    let (lhs, rhs) = expansion(&[mu], &[nu], &[Term::var("X")], &[Term::var("Y")]);
    let fam = if mu.complements(nu) { "EL1tau" } else { "EL1" };
    Equation::new(format!("{fam}[{mu},{nu}]"), lhs, rhs)
}

fn distinct(acts: &[Action]) -> bool {
    acts.iter().collect::<BTreeSet<_>>().len() == acts.len()
}

/// EL2 for duplicate-free action lists; `None` if an action repeats or a list
/// is empty.
pub fn el2_instance(mus: &[Action], nus: &[Action]) -> Option<Equation> {
    if mus.is_empty() || nus.is_empty() || !distinct(mus) || !distinct(nus) {
        return None;
    }
    let mut eq = expansion_instance(mus, nus);
    eq.name = format!("EL2[{}|{}]", label(mus), label(nus));
    Some(eq)
}

/// `(Σ μ_i X_i) || (νY + νZ + W)` distributed, for duplicate-free `μ_i`.
pub fn rsp2_instance(mus: &[Action], nu: Action) -> Option<Equation> {
    if mus.is_empty() || !distinct(mus) {
        return None;
    }
    let left = Term::sum_of(mus.iter().enumerate().map(|(i, &m)| Term::prefix(m, var("X", i + 1))));
    let (y, z, w) = (Term::var("Y"), Term::var("Z"), Term::var("W"));
    let sum3 = Term::sum_of([Term::prefix(nu, y.clone()), Term::prefix(nu, z.clone()), w.clone()]);
    let lhs = Term::par(left.clone(), sum3.clone());
    let mut rhs = vec![
        Term::par(left.clone(), Term::sum(Term::prefix(nu, y), w.clone())),
        Term::par(left, Term::sum(Term::prefix(nu, z), w)),
    ];
    for (i, &m) in mus.iter().enumerate() {
        rhs.push(Term::prefix(m, Term::par(var("X", i + 1), sum3.clone())));
    }
    Some(Equation::new(
        format!("RSP2[{}|{}]", label(mus), nu),
        lhs,
        Term::sum_of(rhs),
    ))
}

/// `μ(Σ_i (ν_i X_i + ν_i Y_i) + Z) = μ(Σ_i ν_i X_i + Z) + μ(Σ_i ν_i Y_i + Z)`.
pub fn rt_instance(mu: Action, nus: &[Action]) -> Equation {
    let z = Term::var("Z");
    let both = nus
        .iter()
        .enumerate()
        .map(|(i, &n)| Term::sum(Term::prefix(n, var("X", i + 1)), Term::prefix(n, var("Y", i + 1))));
    let lhs = Term::prefix(mu, Term::sum(Term::sum_of(both), z.clone()));
    let side = |v: &str| {
        let s = Term::sum_of(nus.iter().enumerate().map(|(i, &n)| Term::prefix(n, var(v, i + 1))));
        Term::prefix(mu, Term::sum(s, z.clone()))
    };
    let rhs = Term::sum(side("X"), side("Y"));
    Equation::new(format!("RT[{mu}|{}]", label(nus)), lhs, rhs)
}

/// Nonempty subsets of `acts` in a fixed order.
fn subsets(acts: &[Action]) -> Vec<Vec<Action>> {
    (1u32..(1 << acts.len()))
        .map(|mask| {
            acts.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &a)| a)
                .collect()
        })
        .collect()
}

/// Multisets of size `k` over `acts`, as sorted lists.
fn multisets(acts: &[Action], k: usize) -> Vec<Vec<Action>> {
    fn go(acts: &[Action], k: usize, from: usize, cur: &mut Vec<Action>, out: &mut Vec<Vec<Action>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..acts.len() {
            cur.push(acts[i]);
            go(acts, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(acts, k, 0, &mut Vec::new(), &mut out);
    out
}

fn check_cap(tag: SchemaTag, count: usize, cap: usize) -> Result<()> {
    if count > cap {
        return Err(Error::SchemaCap {
            tag: tag.to_string(),
            count,
            cap,
        });
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// The number of instances a tag produces over an alphabet.
pub fn instance_count(tag: SchemaTag, alphabet: &Alphabet) -> usize {
    let n = alphabet.actions().len();
    let subsets = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX).saturating_sub(1);
    match tag {
        SchemaTag::EL => 0,
        SchemaTag::EL1 => n * n,
        SchemaTag::EL2 => subsets.saturating_mul(subsets),
        SchemaTag::RSP2 => subsets.saturating_mul(n),
        SchemaTag::RT => n.saturating_mul(binomial(n + alphabet.len() - 1, alphabet.len())),
    }
}

pub fn instantiate(tag: SchemaTag, alphabet: &Alphabet, cap: usize) -> Result<Vec<Equation>> {
    check_cap(tag, instance_count(tag, alphabet), cap)?;
    let acts = alphabet.actions();
    let out = match tag {
        SchemaTag::EL => Vec::new(),
        SchemaTag::EL1 => acts
            .iter()
            .flat_map(|&m| acts.iter().map(move |&n| el1_instance(m, n)))
            .collect(),
        SchemaTag::EL2 => {
            let subs = subsets(&acts);
            subs.iter()
                .flat_map(|m| subs.iter().filter_map(move |n| el2_instance(m, n)))
                .collect()
        }
        SchemaTag::RSP2 => subsets(&acts)
            .iter()
            .flat_map(|m| acts.iter().filter_map(move |&n| rsp2_instance(m, n)))
            .collect(),
        SchemaTag::RT => {
            let nus = multisets(&acts, alphabet.len());
            acts.iter()
                .flat_map(|&m| nus.iter().map(move |n| rt_instance(m, n)))
                .collect()
        }
    };
    Ok(out)
}

/// All instances of the given tags, in tag order.
pub fn instantiate_schemas(tags: &BTreeSet<SchemaTag>, alphabet: &Alphabet, cap: usize) -> Result<Vec<Equation>> {
    let mut out = Vec::new();
    for &tag in tags {
        out.extend(instantiate(tag, alphabet, cap)?);
    }
    Ok(out)
}

fn parse_list(s: &str, alphabet: &Alphabet) -> Option<Vec<Action>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|a| parse_action(a, alphabet).ok()).collect()
}

/// Rebuilds a schema instance from its name, e.g. `EL[a,a|~a]`.
pub fn instance_by_name(name: &str, alphabet: &Alphabet) -> Option<Equation> {
    let open = name.find('[')?;
    let body = name[open + 1..].strip_suffix(']')?;
    let (fam, args) = (&name[..open], body.split('|').collect::<Vec<_>>());
    let eq = match (fam, args.as_slice()) {
        ("EL", [l, r]) => expansion_instance(&parse_list(l, alphabet)?, &parse_list(r, alphabet)?),
        ("EL1" | "EL1tau", [pair]) => match parse_list(pair, alphabet)?.as_slice() {
            &[m, n] => el1_instance(m, n),
            _ => return None,
        },
        ("EL2", [l, r]) => el2_instance(&parse_list(l, alphabet)?, &parse_list(r, alphabet)?)?,
        ("RSP2", [l, r]) => match parse_list(r, alphabet)?.as_slice() {
            &[n] => rsp2_instance(&parse_list(l, alphabet)?, n)?,
            _ => return None,
        },
        ("RT", [m, r]) => match parse_list(m, alphabet)?.as_slice() {
            &[m] => rt_instance(m, &parse_list(r, alphabet)?),
            _ => return None,
        },
        _ => return None,
    };
    // reject names that do not round-trip, such as `EL1[a,~a]` for an EL1τ instance
    (eq.name == name).then_some(eq)
}
