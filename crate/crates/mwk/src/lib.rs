//! Milnor-Witt K-theory of fields: normal forms, quadratic form invariants,
//! and finite truncations of the classified spectra.

pub mod arith;
pub mod field;
pub mod comparison;
pub mod gw;
pub mod mw;
pub mod poset;
pub mod syntax;
pub mod checks;
