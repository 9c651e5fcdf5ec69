//! Numerical engine for quantum emitters coupled to structured photonic
//! baths at multiple points.
//!
//! The crate builds finite cavity lattices ([`bath`]), attaches emitters with
//! arbitrary multi-point coupling profiles ([`emitters`]), evaluates the
//! single-excitation resolvent and emitter self-energies ([`greens`]), finds
//! bound states in gaps and inside bands ([`boundstates`]), and assembles
//! collective emission rates, coherent couplings, and time evolution
//! ([`dynamics`]).

pub mod bath;
pub mod boundstates;
pub mod dynamics;
pub mod emitters;
pub mod error;
pub mod export;
pub mod greens;
pub mod linalg;
pub mod par;

pub use error::{Error, Result};
