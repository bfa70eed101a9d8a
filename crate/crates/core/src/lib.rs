//! Random generation of consistent context-free grammars together with
//! positive and negative example sets.

pub mod cnf;
pub mod dot;
pub mod examples;
pub mod feasibility;
pub mod generator;
pub mod grammar;
pub mod negative;
pub mod positive;
