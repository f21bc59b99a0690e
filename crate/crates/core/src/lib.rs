//! Fourier–Hermite spectral simulator for the inertial Kuramoto–Sakaguchi–Fokker–Planck
//! equation, together with the diagnostics used to study its relaxation to the
//! phase-homogeneous equilibrium and its overdamped (drift-diffusion) limit.
//!
//! The phase-space density `f(t, θ, ω, ν)` is stored as complex coefficients over
//! Fourier modes in `θ`, orthonormal Hermite functions in `ω` (centred at `ν` and
//! scaled by the noise `σ̃`), and a finite set of weighted natural-frequency nodes.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the crate-root
//! aliases fix the common `f64` instantiation.

// Validation is written as `!(x > 0)` so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod hermite;
pub mod lab;
pub mod limit;
pub mod moments;
pub mod norms;
pub mod params;
pub mod particles;
pub mod random;
pub mod scalar;
pub mod snapshot;
pub mod solver;

pub use equilibrium::{equilibrium, maxwellian, EquilibriumState};
pub use error::{Error, Result};
pub use field::{project, reconstruct, SpectralField};
pub use grid::{build_grid, Grid, NuNode, NuSpec};
pub use moments::{moments, MomentFields};
pub use params::SimParams;
pub use scalar::Real;

/// Complex coefficient type used by every spectral array.
pub type Complex<T> = num_complex::Complex<T>;

pub type Grid64 = Grid<f64>;
pub type Field64 = SpectralField<f64>;
pub type Params64 = SimParams<f64>;
pub type Equilibrium64 = EquilibriumState<f64>;
pub type Moments64 = MomentFields<f64>;
pub type Trajectory64 = solver::Trajectory<f64>;
pub type Sample64 = solver::EnergySample<f64>;
pub type DdState64 = limit::DdState<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = SpectralField<f32>;
pub type Params32 = SimParams<f32>;
