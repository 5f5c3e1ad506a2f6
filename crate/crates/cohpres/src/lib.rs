//! Presentations of categories and monoidal categories modulo an equational
//! rewriting system: residuals, critical pairs and cylinders, termination
//! weights, coherence checks, and the quotient, localization and normal-form
//! constructions, with brute-force oracles for small instances.

pub mod core;
pub mod objects;
pub mod residuation;
pub mod critical;
pub mod coherence;
pub mod constructions;
pub mod oracle;
pub mod cli;
