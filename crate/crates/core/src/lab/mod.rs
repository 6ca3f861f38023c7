//! Desk-scale discretisations of the operators.

pub mod fourier;
pub mod grid;
pub mod identities;
pub mod mellin_op;
pub mod norm;
pub mod sections;
