//! Randomised soundness testing of equations.
//!
//! An equation is sound for a semantics when all its closed instances are
//! equivalent. Sample `i` draws one closed term per variable, in variable
//! order, from the stream `(seed, i)`, so a run is reproducible and each
//! sample can be replayed on its own.

use serde::Serialize;

use crate::equiv::{equiv, Semantics};
use crate::error::Result;
use crate::gen::{sample_rng, TermGen};
use crate::sos::OpRegistry;
use crate::syntax::{AxiomSystem, Equation};
use crate::systems::finest_semantics_for;
use crate::term::{Alphabet, Substitution, Term};

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub alphabet: Alphabet,
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
}

impl Default for FuzzConfig {
    fn default() -> FuzzConfig {
        FuzzConfig {
            alphabet: Alphabet::new(["a", "b"]).expect("valid names"),
            samples: 500,
            depth: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum FuzzOutcome {
    Pass {
        samples: usize,
    },
    Counterexample {
        sample: usize,
        subst: Substitution,
        lhs: Term,
        rhs: Term,
    },
}

impl FuzzOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, FuzzOutcome::Pass { .. })
    }
}

/// The closing substitution of sample `index`.
pub fn sample_substitution(eq: &Equation, cfg: &FuzzConfig, index: usize) -> Substitution {
    let gen = TermGen::new(cfg.alphabet.actions(), cfg.depth);
    let mut rng = sample_rng(cfg.seed, index as u64);
    eq.vars().into_iter().map(|x| (x, gen.sample(&mut rng))).collect()
}

pub fn soundness_fuzz(eq: &Equation, sem: Semantics, cfg: &FuzzConfig, reg: &OpRegistry) -> Result<FuzzOutcome> {
    // a closed equation has a single instance
    let samples = if eq.is_closed() { cfg.samples.min(1) } else { cfg.samples };
    for i in 0..samples {
        let sigma = sample_substitution(eq, cfg, i);
        let (lhs, rhs) = eq.instantiate(&sigma);
        if !equiv(&lhs, &rhs, sem, reg)? {
            return Ok(FuzzOutcome::Counterexample {
                sample: i,
                subst: sigma,
                lhs,
                rhs,
            });
        }
    }
    Ok(FuzzOutcome::Pass { samples })
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub name: String,
    pub semantics: Semantics,
    pub outcome: FuzzOutcome,
}

/// Fuzzes every equation of a system, under `sem` or, when absent, under the
/// finest semantics whose bundled system contains the equation's family.
pub fn fuzz_system(sys: &AxiomSystem, sem: Option<Semantics>, cfg: &FuzzConfig, reg: &OpRegistry) -> Result<Vec<AxiomReport>> {
    sys.equations()
        .iter()
        .map(|eq| {
            let s = sem.unwrap_or_else(|| finest_semantics_for(eq.family()));
            Ok(AxiomReport {
                name: eq.name.clone(),
                semantics: s,
                outcome: soundness_fuzz(eq, s, cfg, reg)?,
            })
        })
        .collect()
}
