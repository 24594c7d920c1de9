//! Numerical engine for the dynamics of a two-level atom coupled to a single
//! bosonic mode.
//!
//! The crate builds the Rabi Hamiltonian, its Jaynes-Cummings part and the
//! two exactly solvable approximating Hamiltonians H1/H2 obtained by keeping
//! one piece of the transformed counter-rotating coupling, exposes their
//! closed-form eigensystems, and evaluates the excited-state survival
//! probability `P(t)` both analytically and by numerically exact spectral
//! propagation on a truncated Fock space. All closed forms are cross-checked
//! against the dense-matrix route by the [`verify`] suites.
//!
//! Conventions: hbar = 1, time in units of 1/omega, and a spin-major joint
//! basis (`|down,0> ... |down,n_max>, |up,0> ... |up,n_max>`).

extern crate blas_src as _;
extern crate openblas_src as _;

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod models;
pub mod spectra;
pub mod transform;
pub mod verify;

pub use dynamics::{ModelTag, SurvivalSeries, TimeGrid};
pub use error::{Error, Result};
pub use fock::{FieldState, HamiltonianMatrix, JointState, OperatorMatrix, Spin};
pub use models::ModelParams;
pub use spectra::{AhmModel, Branch, EigenLabel, EigenRecord};
