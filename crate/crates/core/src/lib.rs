//! Cat-state swapping between a spin ensemble and a lossy cavity mode.
//!
//! Spins live in the symmetric (Dicke) sector; the field is a truncated Fock
//! space. Dynamics follow the Tavis-Cummings Hamiltonian with optional cavity
//! loss, and states are visualised through field and spin Wigner functions.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod operators;
pub mod output;
pub mod runner;
pub mod states;
pub mod tomography;
pub mod wigner3j;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, Factor, HilbertConfig, StateVector};
