//! Exact computational engine for the negative half of a finite-type
//! quantized enveloping algebra.
//!
//! The crate builds PBW bases and dual PBW bases attached to reduced words of
//! the longest Weyl group element, constructs the canonical basis weight
//! space by weight space through a bar-invariant triangular solve, and
//! computes the transition coefficients from the canonical basis to every
//! PBW basis along two independent routes: direct expansion, and a product
//! formula over crystal chains built from the structure constants of the
//! iterated q-derivations. All arithmetic is exact over Q(q).

pub mod canon;
pub mod error;
pub mod qfield;
pub mod rootdata;
pub mod mixedalg;
pub mod pbw;
pub mod transition;
pub mod uqn;

pub use error::{Error, Result};
