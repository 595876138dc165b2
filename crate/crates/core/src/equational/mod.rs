//! Equational logic over the axiom systems.

pub mod schemas;
pub mod proof;
pub mod rewrite;
pub mod normal_form;
pub mod eliminate;
pub mod prove;
pub mod fuzz;
