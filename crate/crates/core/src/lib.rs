//! Thermal entanglement of two-qubit XYZ models at desk scale.
//!
//! The crate computes Gibbs states of the XYZ exchange Hamiltonian,
//! evaluates five entanglement quantifiers along inverse-temperature
//! sweeps, locates the entangled-to-separable critical point by PPT
//! bisection, classifies the transition order per quantifier, and solves
//! a small semidefinite program for witnessed entanglement with optimal
//! witness tracking along state paths.

pub mod criticality;
pub mod linalg;
pub mod quantifiers;
pub mod quantum;
pub mod statefile;
pub mod witness;

pub mod cli;

#[cfg(test)]
pub(crate) mod test_util;
