//! Tempered (t-) algebra and calculus.
//!
//! Everything here is parameterized by a [`Temper`] `t`. At `t = 1` every
//! operation collapses to its classical counterpart (`+`, `log`, `exp`,
//! Riemann integration, derivation); the classical case is always taken
//! through an explicit branch so that no formula ever divides by `1 - t`
//! when `t` is within [`CLASSICAL_BAND`] of 1.

mod algebra;
pub mod calculus;
pub mod divergence;

pub use algebra::*;
pub use calculus::{
    adaptive_simpson, t_derivative, t_derivative_default, t_integrate, t_riemann_sum, Partition,
    Quadrature, DEFAULT_QUAD_TOL,
};
pub use divergence::{kl_divergence, tempered_rel_entropy, tsallis_div, ProbVector};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Width of the band around `t = 1` inside which the classical branch is used.
pub const CLASSICAL_BAND: f64 = 1e-12;

/// The deformation parameter `t` of tempered arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Temper(f64);

impl Temper {
    pub const CLASSICAL: Temper = Temper(1.0);

    pub fn new(t: f64) -> Result<Self, TemperedError> {
        if t.is_finite() {
            Ok(Temper(t))
        } else {
            Err(TemperedError::InvalidTemper(t))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - t`, the quantity that appears in every tempered formula.
    #[inline]
    pub fn one_minus(self) -> f64 {
        1.0 - self.0
    }

    /// True when the classical (`t = 1`) branch applies.
    #[inline]
    pub fn is_classical(self) -> bool {
        (1.0 - self.0).abs() < CLASSICAL_BAND
    }
}

impl TryFrom<f64> for Temper {
    type Error = TemperedError;

    fn try_from(t: f64) -> Result<Self, Self::Error> {
        Temper::new(t)
    }
}

impl From<Temper> for f64 {
    fn from(t: Temper) -> f64 {
        t.0
    }
}

impl std::fmt::Display for Temper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TemperedError {
    #[error("temper must be a finite real, got {0}")]
    InvalidTemper(f64),
    #[error("{op}: argument {value} outside the domain")]
    Domain { op: &'static str, value: f64 },
    #[error("{op}: singular denominator 1 + (1 - t) * {value} = 0")]
    Singular { op: &'static str, value: f64 },
    #[error("{op}: floating-point overflow")]
    Overflow { op: &'static str },
    #[error(
        "quadrature did not converge: error estimate {achieved:e} above tolerance {requested:e}"
    )]
    QuadratureDiverged { achieved: f64, requested: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("reference measure vanishes at index {index} where the first one does not")]
    Support { index: usize },
    #[error("invalid probability vector: {0}")]
    InvalidProbVector(String),
}
