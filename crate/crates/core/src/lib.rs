//! Tempered calculus, t-self distortions and the hyperbolic embedding
//! pipeline for boosted decision trees.
//!
//! The crate is organised bottom-up:
//!
//! - [`tempered`]: t-algebra, t-Riemann sums, t-integration and derivation,
//!   the `lift_t = log_t ∘ exp` map and t-additive divergences.
//! - [`geometry`]: Poincaré disk and Lorentz distances and their t-selves.
//! - [`data`], [`trees`], [`boosting`]: log-loss tree induction and
//!   boosting with the logistic loss.
//! - [`mdt`], [`layout`], [`render`]: monotonic decision trees, their
//!   placement in the disk and SVG output.

pub mod tempered;

pub use tempered::{Temper, TemperedError};
pub mod artifact;
pub mod boosting;
pub mod data;
pub mod geometry;
pub mod layout;
pub mod mdt;
pub mod render;
pub mod selftest;
pub mod stats;
pub mod synth;
pub mod trees;
