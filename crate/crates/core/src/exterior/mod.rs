//! Exterior algebra over Euclidean R^8 with orientation e^{1..8}.
//!
//! Forms are sparse maps from strictly increasing multi-indices to
//! coefficients. Reordering signs are absorbed into the coefficient when a
//! term is constructed, so two forms are equal iff their maps are equal.

mod form;
mod index;
mod scalar;
mod text;
mod vector;

pub use form::{determinant, KForm};
pub use index::MultiIndex;
pub use scalar::{Rational, Scalar};
pub use text::{parse_form, write_form};
pub use vector::Vec8;
