//! Command-line front end for the lattice emitter engine: versioned JSON
//! configs, named scenario geometries, and a regression battery.

pub mod config;
pub mod regress;
pub mod scenario;
