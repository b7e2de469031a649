//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by evaluators, builders and sweeps.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation requested at (or within the guard annulus of) a pole.
    #[error("PoleProximity: z = {z} is within {dist:.3e} of a pole (guard {guard:.3e})")]
    PoleProximity { z: Complex64, dist: f64, guard: f64 },

    /// A numeric parameter is outside its admissible range.
    #[error("BadParameter: {0}")]
    BadParameter(String),

    /// The point does not belong to the periodic domain Ω.
    #[error("OutsideDomain: z = {0} is not in the periodic domain")]
    OutsideDomain(Complex64),

    /// The point does not belong to the periodic cell.
    #[error("OutsideCell: z = {0} is not in the periodic cell")]
    OutsideCell(Complex64),

    /// Even the smallest tested quasimomentum fails the multiplier margin.
    #[error("NoPositiveR: smallest tested |eta| = {smallest_eta:.4e} has sup |psi~ - 1| = {sup:.4} > {margin}")]
    NoPositiveR { smallest_eta: f64, sup: f64, margin: f64 },

    /// The principal-branch power is undefined (Re psi~ <= 0 at a cell node).
    #[error("BranchViolation: Re psi~ = {re:.4e} <= 0 at node z = {z}; R = {r} is stale")]
    BranchViolation { z: Complex64, re: f64, r: f64 },

    /// Too few quadrature nodes survive to integrate over the cell.
    #[error("DegenerateCell: {0}")]
    DegenerateCell(String),

    /// Rank filtering removed every candidate basis function.
    #[error("RankCollapse: no candidate survives the relative rank threshold {threshold:.1e}")]
    RankCollapse { threshold: f64 },

    /// Sampled function length does not match the quadrature node count.
    #[error("LengthMismatch: got {got} values, quadrature has {want} nodes")]
    LengthMismatch { got: usize, want: usize },

    /// Two objects were built over different quadratures/grids.
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    /// Unfolding a cell function whose quasiperiodic residual is too large.
    #[error("ResidualTooLarge: boundary residual {residual:.3e} exceeds {limit:.1e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    /// No quasimomentum grid node lies inside the packet window.
    #[error("WindowUnresolved: no grid node lies in B(mu, 1/{n}); refine the eta grid")]
    WindowUnresolved { n: u32 },

    /// Per-node failure rate of a band sweep exceeded the abort threshold.
    #[error("SweepFailureRate: {failed}/{total} eta nodes failed (> {percent}%)")]
    SweepFailureRate { failed: usize, total: usize, percent: u32 },

    /// The truncated-domain Galerkin matrix would exceed the memory guard.
    #[error("OracleTooLarge: matrix dimension {dim} exceeds the guard {guard}")]
    OracleTooLarge { dim: usize, guard: usize },

    /// Dense linear algebra backend failure.
    #[error("Linalg: {0}")]
    Linalg(String),

    /// Configuration parsing or cross-invariant validation failure.
    #[error("Config: {0}")]
    Config(String),

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
