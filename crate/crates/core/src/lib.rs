//! Exact pivot-rule simulation and analysis on LP-oriented simple
//! 3-polytopes: instance modeling, rule execution, exact expected path
//! lengths, worst-case families, certificate machinery, and acyclic
//! unique-sink orientation search.

pub mod analysis;
pub mod cli;
pub mod expectation;
pub mod families;
pub mod model;
pub mod rational;
pub mod rules;
pub mod search;
