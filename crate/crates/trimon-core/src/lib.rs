//! Simulation and analysis toolkit for a three-qubit superconducting circuit
//! with all-to-all longitudinal (cross-Kerr) coupling.
//!
//! The crate is organized around the stages of a desk-scale experiment:
//!
//! - [`circuit`]: derive charging energies, mode frequencies, Kerr couplings,
//!   transition bands and dispersive shifts from circuit inputs, with an
//!   exact-diagonalization oracle ([`spectrum`]) for the truncated circuit
//!   Hamiltonian.
//! - [`gates`]: exact matrix algebra for band-selective conditional rotations,
//!   virtual-Z frame tracking and composite SWAP / transfer sequences.
//! - [`pulse`]: time-domain integration of multi-tone drives on the spin-level
//!   ZZ Hamiltonian with Gaussian-edge flat-top envelopes.
//! - [`readout`]: dispersive joint-readout Monte Carlo with thresholding,
//!   heralding and the population-exchange measurement variant.
//! - [`tomo`]: maximum-likelihood state reconstruction with a Cholesky
//!   parameterization, forced-purity initialization, fidelity and bootstrap.
//! - [`crossing`]: least-squares extraction of inter-device coupling from
//!   avoided-crossing spectroscopy.

pub mod circuit;
pub mod constants;
pub mod crossing;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod optim;
pub mod pulse;
pub mod readout;
pub mod spectrum;
pub mod tomo;

pub use error::CoreError;
