//! Spectral analysis of continuous-time Markov networks on potential energy
//! landscapes.
//!
//! A network is built from a catalog of local minima and the transition states
//! connecting them. Pairwise rates follow the harmonic transition-state law,
//! which satisfies detailed balance with respect to the Gibbs distribution, so
//! the generator is symmetrizable and has a real, nonpositive spectrum.
//!
//! The crate computes:
//!
//! * zero-temperature asymptotics of the low-lying spectrum from the minimum
//!   spanning tree of the saddle costs ([`asymptotics`]),
//! * finite-temperature eigenpairs by Rayleigh quotient iteration seeded from
//!   those asymptotics, continued over a temperature schedule ([`continuation`]),
//! * eigencurrents and their emission-absorption cuts ([`eigencurrent`]),
//! * committor functions, reactive currents and transition rates
//!   ([`committor`]),
//! * supporting machinery: dense reference solver ([`dense`]), catalog file
//!   parsing ([`catalog`]), physical unit conversion ([`units`]),
//!   disconnectivity graphs ([`dgraph`]) and result export ([`export`]).

#![forbid(unsafe_code)]

pub mod asymptotics;
pub mod catalog;
pub mod committor;
pub mod continuation;
pub mod dense;
pub mod dgraph;
pub mod eigencurrent;
mod error;
pub mod export;
pub mod generator;
pub mod mst;
pub mod network;
mod sparse;
pub mod synthetic;
pub mod units;
mod util;

pub use error::{Error, Result};
pub use generator::Generator;
pub use network::Network;

/// Crate version string, stamped into export headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
