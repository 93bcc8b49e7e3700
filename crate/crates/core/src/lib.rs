//! Finite-dimensional quantum probability spaces.
//!
//! A quantum probability space here is the full matrix algebra `M_d(C)` with
//! the normalized trace `tau = tr / d`. Self-adjoint matrices play the role of
//! random variables, spectral projections play the role of events, and
//! `tau(e_B(x))` is the probability that `x` lands in `B`.
//!
//! On top of that substrate the crate provides:
//!
//! - [`operator`]: Hermitian operators, spectral resolutions, interval
//!   spectral projections, functional calculus and tensor embeddings.
//! - [`lattice`]: meet and join of projections.
//! - [`measure`]: trace distributions, symmetry, the median, and the
//!   Chebyshev inequality.
//! - [`independence`]: tensor families, the `x (x) 1 - 1 (x) x` doubling and
//!   a randomized weak-full-independence falsifier.
//! - [`joint`]: a common eigenbasis for commuting families.
//! - [`maximal`]: verifiers for the Levy, Ottaviani, Levy-Skorohod and
//!   symmetrization inequalities that build the witness projections and
//!   check every bound they feed.
//! - [`classical`]: discrete random variables embedded as diagonal operators
//!   and an exact enumeration oracle.

#![forbid(unsafe_code)]

pub mod classical;
pub mod config;
pub mod independence;
pub mod joint;
pub mod lattice;
pub mod maximal;
pub mod measure;
pub mod operator;
pub mod report;
pub mod serde_ext;

mod error;

pub use config::{Caps, Tolerances};
pub use error::{Error, Result};
pub use operator::{BorelInterval, HermitianOperator, Projection, SpectralResolution, C64};
pub use report::InequalityReport;
