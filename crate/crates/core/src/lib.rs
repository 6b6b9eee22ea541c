//! Numerical toolkit for metasurface optics derived from Maxwell's equations
//! taken in the sense of distributions.
//!
//! The crate covers four connected pieces:
//!
//! - [`geometry`] and [`fields`]: a graph interface `x3 = u(x1, x2)` splitting
//!   space into a lower and an upper medium, plane and phase-modulated waves,
//!   and finite-difference Maxwell residuals away from the interface.
//! - [`weakform`]: distributional divergence and curl paired against smooth
//!   bump test functions by quadrature, the surface-jump decomposition, the
//!   interface jump audit and the continuity residual.
//! - [`snell`] and [`phase`]: the generalized refraction and reflection laws
//!   for an interface carrying a phase discontinuity, ray tracing across it,
//!   and inverse design of the phase from a target refraction map.
//! - [`admissibility`]: the magnetic field and current density that make a
//!   phase-modulated wave an exact Maxwell solution, and the ohmic-current
//!   linearity check.
//!
//! Gaussian units are used throughout. Fields are complex; the physical field
//! is the real part.

pub mod admissibility;
pub mod cli;
pub mod config;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod math;
pub mod output;
pub mod phase;
pub mod quadrature;
pub mod snell;
pub mod weakform;

pub use error::{Error, Result};
pub use fields::{Medium, ModulatedWave};
pub use geometry::{NormalPair, Region, Surface};
pub use math::{CVec3, Mat3, Vec3};
pub use phase::PhaseDiscontinuity;
pub use snell::{Branch, RefractionResult};
