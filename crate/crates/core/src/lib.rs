//! A workbench for recursion-free CCS: operational semantics, behavioural
//! equivalences, equational reasoning and witness families.

pub mod equational;
pub mod equiv;
pub mod error;
pub mod gen;
pub mod sos;
pub mod syntax;
pub mod systems;
pub mod term;
pub mod witness;

pub use error::{Error, Result};
pub use term::{Action, Alphabet, Substitution, Term, TermKind};
