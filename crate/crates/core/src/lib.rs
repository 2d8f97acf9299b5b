//! Calibrated geometry of the Spin(7) Cayley form on R^8.
//!
//! * [`exterior`]: exact and floating exterior algebra over Euclidean R^8.
//! * [`spin7forms`]: the Cayley 4-form, the triple cross product, the printed
//!   coefficient tables and their verifiers.
//! * [`planes`]: pointwise geometry of 4-planes (Cayley / L classification,
//!   L-frames, the tangent-to-normal isomorphism, special plane samplers).
//! * [`defolab`]: discrete deformation laboratory for L-submanifolds of the
//!   flat torus T^8.

pub mod defolab;
mod error;
pub mod exterior;
pub mod planes;
pub mod report;
pub mod rng;
pub mod spin7forms;
pub mod suites;

pub use error::{Error, Result};
pub use exterior::{KForm, MultiIndex, Rational, Scalar, Vec8};
pub use report::{Status, VerificationReport};
