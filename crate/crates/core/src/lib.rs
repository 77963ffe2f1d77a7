//! Simulation of a single qubit in a cavity with a parametric (two-photon)
//! drive.
//!
//! The crate builds the driven Jaynes–Cummings Hamiltonian on a truncated
//! Fock space, locates the avoided crossings that the drive opens between
//! dressed states, evolves the system (unitary, ramped drive, or Lindblad
//! with cavity and qubit decay) and analyses the resulting states: reduced
//! and conditional photon states, fidelity to even/odd Fock superpositions,
//! qubit–field concurrence and Wigner functions.
//!
//! [`scenarios`] turns each of these into a reproducible dataset; the
//! `parajc` binary drives them from a config file.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fockspace;
pub mod io;
pub mod linalg;
pub mod model;
pub mod scenarios;
pub mod wigner;

pub use error::{Error, Result};
pub use fockspace::{CompositeSpace, FockSpace, Operator, QuantumState, Qubit, Space};
pub use model::{CrossingLabel, SystemParams};
