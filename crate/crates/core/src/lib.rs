//! Posets of layers of abelian Lie group arrangements.
//!
//! The crate computes posets of layers from integer character vectors, decides
//! (strict) supersolvability through chains of M-ideals and TM-ideals, and
//! evaluates the characteristic polynomial, Poincaré polynomial and
//! lower-central-series ranks attached to such chains.

pub mod affine;
pub mod exactalg;
pub mod families;
pub mod formats;
pub mod invariants;
pub mod layers;
pub mod poly;
pub mod poset;
pub mod ssolv;
