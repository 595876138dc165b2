//! The bundled axiom systems and rule sets.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::equiv::Semantics;
use crate::error::{Error, Result};
use crate::sos::DeSimoneRuleSet;
use crate::syntax::{parse_axiom_system, parse_rule_set, parse_rule_set_unchecked, AxiomSystem};
use crate::term::Alphabet;

/// Bundled axiom files by name.
pub const AXIOM_FILES: [(&str, &str); 13] = [
    ("e0", include_str!("../data/axioms/e0.ax")),
    ("e1", include_str!("../data/axioms/e1.ax")),
    ("e_b", include_str!("../data/axioms/e_b.ax")),
    ("e_rs", include_str!("../data/axioms/e_rs.ax")),
    ("e_cs", include_str!("../data/axioms/e_cs.ax")),
    ("e_s", include_str!("../data/axioms/e_s.ax")),
    ("e_rt", include_str!("../data/axioms/e_rt.ax")),
    ("e_ft", include_str!("../data/axioms/e_ft.ax")),
    ("e_r", include_str!("../data/axioms/e_r.ax")),
    ("e_f", include_str!("../data/axioms/e_f.ax")),
    ("e_ct", include_str!("../data/axioms/e_ct.ax")),
    ("e_t", include_str!("../data/axioms/e_t.ax")),
    ("pe", include_str!("../data/axioms/pe.ax")),
];

/// Bundled rule files by name: the left-interleaving operator with
/// synchronisation, the operator firing `a` from either side, and a set that
/// lacks synchronisation.
pub const RULE_FILES: [(&str, &str); 3] = [
    ("interleave_sync", include_str!("../data/rules/interleave_sync.rules")),
    ("alpha_both", include_str!("../data/rules/alpha_both.rules")),
    ("broken", include_str!("../data/rules/broken.rules")),
];

pub fn axiom_text(name: &str) -> Option<&'static str> {
    AXIOM_FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn builtin_axioms(name: &str, alphabet: &Alphabet) -> Result<AxiomSystem> {
    let text = axiom_text(name).ok_or_else(|| Error::Unsupported(format!("no bundled axiom system `{name}`")))?;
    parse_axiom_system(text, name, alphabet)
}

pub fn rule_text(name: &str) -> Option<&'static str> {
    RULE_FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// A bundled rule set, validated unless it is the deliberately broken one.
pub fn builtin_rules(name: &str, alphabet: &Alphabet) -> Result<DeSimoneRuleSet> {
    let text = rule_text(name).ok_or_else(|| Error::Unsupported(format!("no bundled rule set `{name}`")))?;
    if name == "broken" {
        parse_rule_set_unchecked(text, alphabet)
    } else {
        parse_rule_set(text, alphabet)
    }
}

/// The axiom systems used to eliminate parallel composition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum System {
    B,
    RS,
    CS,
    S,
    RT,
    FT,
    R,
    F,
    CT,
    T,
}

impl System {
    pub const ALL: [System; 10] = [
        System::B,
        System::RS,
        System::CS,
        System::S,
        System::RT,
        System::FT,
        System::R,
        System::F,
        System::CT,
        System::T,
    ];

    pub fn file(self) -> &'static str {
        match self {
            System::B => "e_b",
            System::RS => "e_rs",
            System::CS => "e_cs",
            System::S => "e_s",
            System::RT => "e_rt",
            System::FT => "e_ft",
            System::R => "e_r",
            System::F => "e_f",
            System::CT => "e_ct",
            System::T => "e_t",
        }
    }

    /// The equivalence the system axiomatises.
    pub fn semantics(self) -> Semantics {
        match self {
            System::B => Semantics::B,
            System::RS => Semantics::RS,
            System::CS => Semantics::CS,
            System::S => Semantics::S,
            System::RT => Semantics::RT,
            System::FT => Semantics::FT,
            System::R => Semantics::R,
            System::F => Semantics::F,
            System::CT => Semantics::CT,
            System::T => Semantics::T,
        }
    }

    pub fn for_semantics(s: Semantics) -> Option<System> {
        System::ALL.into_iter().find(|x| x.semantics() == s)
    }

    pub fn load(self, alphabet: &Alphabet) -> Result<AxiomSystem> {
        builtin_axioms(self.file(), alphabet)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix("E_").unwrap_or(&t);
        Ok(match t {
            "B" | "BISIM" | "B-VIA-EL" | "EL" => System::B,
            "RS" => System::RS,
            "CS" => System::CS,
            "S" => System::S,
            "RT" => System::RT,
            "FT" => System::FT,
            "R" => System::R,
            "F" => System::F,
            "CT" => System::CT,
            "T" => System::T,
            _ => return Err(Error::Unsupported(format!("unknown axiom system `{s}`"))),
        })
    }
}

/// The finest semantics of the bundled systems that contain an axiom family,
/// used to test that family's soundness. Families of the basic systems and the
/// expansion laws are sound for bisimilarity and tested under `B`.
pub fn finest_semantics_for(family: &str) -> Semantics {
    match family {
        "RS" | "RSP1" | "RSP2" => Semantics::RS,
        "CS" | "CSP1" | "CSP2" => Semantics::CS,
        "S" | "SP1" | "SP2" => Semantics::S,
        "RT" | "FP" => Semantics::RT,
        "FT" => Semantics::FT,
        "R" => Semantics::R,
        "F" => Semantics::F,
        "CT" | "CTP" => Semantics::CT,
        "T" | "TP" => Semantics::T,
        _ => Semantics::B,
    }
}
