//! Exact-arithmetic calculator for the coefficient tables of hermitian
//! K-theory, algebraic K-theory and higher Witt theory over the integers,
//! finite fields and user-supplied field profiles.
//!
//! The computation runs a slice-by-slice spectral sequence: first pages are
//! built from motivic cohomology tables, the first differential is applied
//! through behavioural rules, collapse is certified cell by cell, and the
//! abutment groups are assembled through extension ladders with a cited
//! override table for the extensions that need external input.

pub mod arith;
pub mod coeffrings;
pub mod exactalg;
pub mod ktables;
pub mod overrides;
pub mod slicedata;
pub mod ssengine;
