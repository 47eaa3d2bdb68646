//! Numerical noncommutative ampleness for bimodule algebras over projective
//! schemes, with exact arithmetic throughout.

pub mod document;
pub mod lattice;
pub mod poly;
pub mod scheme;
pub mod system;
pub mod ampleness;
pub mod gk;
pub mod oracle;
pub mod cli;
