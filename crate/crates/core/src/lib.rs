//! Finite qubit ensembles as simulators of a one-mode continuous quantum system.
//!
//! The collective fluctuation operators `Q_M`, `P_M` of `M` qubits act blockwise on
//! the spin-`j` sectors of a permutation-invariant state. Embedding every sector into
//! the Hermite-function basis turns them into *deformed* ladder operators, and this
//! crate evaluates both sides of the large-`M` limit:
//!
//! * [`fock`]: dense operators on a truncated Hermite basis.
//! * [`spin`]: the `beta` deformation, spin ladders and deformed ladder matrices.
//! * [`states`]: permutation-invariant states, measures, simulating sequences and
//!   Schwartz-operator diagnostics.
//! * [`dynamics`]: quadratic Hamiltonians, their block deformations and flows.
//! * [`moments`]: observables and expectation values on both sides of the limit.
//! * [`convergence`]: sweep harness and numerical certificates for the bound chain.
//!
//! Grid evaluations go through [`exec::Exec`], which fans out over rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod fock;
pub mod kets;
pub mod krylov;
pub mod moments;
pub mod qubits;
pub mod spin;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
