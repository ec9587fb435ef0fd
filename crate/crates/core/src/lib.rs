//! Affine sieve experiments on orbits of ternary quadratic forms.
//!
//! The crate is organised bottom-up:
//!
//! * [`form`] and [`orbit`]: integral ternary forms, their integral isometries,
//!   Euclidean-ball enumeration of orbits and critical-exponent estimates.
//! * [`modular`]: orbits modulo squarefree `q`, both as points and as projective
//!   lines, and the exact local densities `ω(q)` obtained from either.
//! * [`sieve`]: exponents of distribution, the Diamond–Halberstam–Richert sieve
//!   functions and the resulting saturation bounds `R`.
//! * [`experiments`]: the weighted sequence `a_n(T)` supported on coordinate
//!   function values, its distribution along multiples of `q`, and almost-prime
//!   counts.
//!
//! Inner loops (orbit frontiers, modular closures, factorisation sweeps) run on
//! rayon when the `parallel` feature is enabled; every result is a set or a
//! sorted table, so sequential and parallel runs agree exactly.

pub mod coordinate;
pub mod exec;
pub mod experiments;
pub mod form;
pub mod modular;
pub mod orbit;
pub mod presets;
pub mod sieve;

pub use coordinate::CoordinateFunction;
pub use exec::Execution;
pub use form::{Isometry, Mat3, TernaryForm, Vec3};
pub use orbit::{ClosureMode, EnumerationLimits, OrbitBall, OrbitSpec};

use thiserror::Error;

/// Umbrella error for callers that drive the whole pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Form(#[from] form::FormError),
    #[error(transparent)]
    Orbit(#[from] orbit::OrbitError),
    #[error(transparent)]
    Modular(#[from] modular::ModularError),
    #[error(transparent)]
    Sieve(#[from] sieve::SieveError),
    #[error(transparent)]
    Experiment(#[from] experiments::ExperimentError),
    #[error(transparent)]
    Coordinate(#[from] coordinate::CoordinateError),
}

impl Error {
    /// True when the failure came from a configured resource cap rather than
    /// from invalid input.
    pub fn is_resource_exhaustion(&self) -> bool {
        match self {
            Error::Orbit(e) => e.is_resource_exhaustion(),
            Error::Modular(e) => e.is_resource_exhaustion(),
            Error::Experiment(e) => e.is_resource_exhaustion(),
            _ => false,
        }
    }
}
