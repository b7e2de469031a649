//! Quasiperiodic cell Bergman kernels, the discrete Floquet transform and the
//! band spectra of Toeplitz operators on doubly periodic planar domains.
//!
//! The domain Ω is the plane minus the lattice translates of a disk obstacle
//! inside the unit cell Q = (0,1)². The crate builds, for each quasimomentum
//! η ∈ [-π,π]²:
//!
//! * elliptic multiplier functions ψ^(ρ) (damped) and ψ_η (phase-twisted)
//!   from truncated Weierstrass-type lattice sums ([`elliptic`], [`multiplier`]);
//! * an orthonormal basis of the approximate quasiperiodic Bergman space
//!   A²_η(ϖ) on the punctured cell, its kernel K_η and projection P_η
//!   ([`bergman`]);
//! * the discrete Floquet transform pair between truncated unions of cells
//!   and η-families of cell functions, and the assembled periodic Bergman
//!   projection ([`floquet`]);
//! * Toeplitz compressions T_{a,η}, Brillouin-zone band sweeps realizing
//!   σ(T_a) = ∪_η σ(T_{a,η}), a truncated-domain Galerkin oracle, and Weyl
//!   near-eigenfunction residual certificates ([`toeplitz`]).
//!
//! Every capability has a runnable demo under `examples/`; the `verify`
//! module re-runs the invariant suites from the CLI.

pub mod artifacts;
pub mod bergman;
pub mod cli;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod floquet;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod multiplier;
pub mod toeplitz;
pub mod verify;

pub use error::{Error, Result};
