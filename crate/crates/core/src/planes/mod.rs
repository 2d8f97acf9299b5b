//! Pointwise geometry of 3- and 4-planes in R^8 under Ψ.

mod expansion;
mod frame;
mod io;
mod normal;
mod sampling;

pub use expansion::{psi_expansion_defect, ExpansionDefect};
pub use frame::{build_l_frame, random_l_frame, verify_lemma, LFrame, ZChoice, LEMMA_TOLERANCE};
pub use io::parse_plane_text;
pub use normal::{complement_basis, normal_to_3form_matrix, triple_matrix, Matrix4, TANGENT_TRIPLES};
pub use sampling::{
    restricted_max, sample_hl3_plane, sample_hl3_plane_from, sample_sl_plane, sl_plane_from_unitary,
    SL_PHASE,
};

use serde::{Deserialize, Serialize};

use crate::exterior::{KForm, Vec8};
use crate::rng::gaussian_vec8;
use crate::spin7forms::psi_f64;
use crate::{Error, Result};

/// Tolerance on normalized calibration values for the Cayley / L labels.
pub const CLASSIFY_TOLERANCE: f64 = 1e-9;

/// Spans whose pre-normalization Gram volume falls below this are rejected.
pub const MIN_GRAM_VOLUME: f64 = 1e-8;

/// An oriented k-plane stored as orthonormal rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    rows: Vec<Vec8>,
    gram_volume: f64,
}

impl Plane {
    /// Orthonormalizes `rows` (Gram–Schmidt, orientation preserving).
    pub fn new(rows: Vec<Vec8>) -> Result<Self> {
        if !(3..=4).contains(&rows.len()) {
            return Err(Error::Arity { degree: 4, given: rows.len() });
        }
        if rows.iter().any(|r| r.0.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite);
        }
        let gram: Vec<Vec<f64>> = rows.iter().map(|a| rows.iter().map(|b| a.dot(b)).collect()).collect();
        let gram_volume = crate::exterior::determinant(gram).max(0.0).sqrt();
        if !(gram_volume > MIN_GRAM_VOLUME) {
            return Err(Error::Degenerate(gram_volume));
        }
        let rows = gram_schmidt(&rows).ok_or(Error::Degenerate(gram_volume))?;
        Ok(Plane { rows, gram_volume })
    }

    pub fn rows(&self) -> &[Vec8] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn gram_volume(&self) -> f64 {
        self.gram_volume
    }

    /// Largest component of `x` inside the plane.
    pub fn projection_norm(&self, x: &Vec8) -> f64 {
        self.rows.iter().map(|r| r.dot(x).powi(2)).sum::<f64>().sqrt()
    }

    /// `span(rows) ⊕ span(extra)` as a new plane.
    pub fn extended(&self, extra: &Vec8) -> Result<Plane> {
        let mut rows = self.rows.clone();
        rows.push(extra.clone());
        Plane::new(rows)
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass. `None` if the
/// inputs are numerically dependent.
pub(crate) fn gram_schmidt(vectors: &[Vec8]) -> Option<Vec<Vec8>> {
    let mut out: Vec<Vec8> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                w = w.axpy(-q.dot(&w), q);
            }
        }
        let n = w.norm();
        if !(n > 1e-12 * v.norm().max(1.0)) {
            return None;
        }
        out.push(w.scale(&(1.0 / n)));
    }
    Some(out)
}

/// `K` orthonormal vectors from Gaussian samples.
pub fn random_orthonormal<const K: usize>(rng: &mut impl rand::Rng) -> [Vec8; K] {
    loop {
        let raw: Vec<Vec8> = (0..K).map(|_| gaussian_vec8(rng)).collect();
        if let Some(q) = gram_schmidt(&raw) {
            return std::array::from_fn(|i| q[i].clone());
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Cayley,
    L,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneClass {
    pub label: Label,
    /// `Ψ(ξ)/vol(ξ)` for the plane's own orientation.
    pub value: f64,
    /// True when the Cayley label holds for the opposite orientation.
    pub orientation_reversed: bool,
}

/// `Ψ` on the orthonormalized rows of a 4-plane.
pub fn calibration_value(plane: &Plane) -> Result<f64> {
    calibration_value_with(psi_f64(), plane)
}

pub fn calibration_value_with(form: &KForm<f64>, plane: &Plane) -> Result<f64> {
    if plane.dim() != 4 {
        return Err(Error::Arity { degree: 4, given: plane.dim() });
    }
    form.eval(plane.rows())
}

pub fn classify(plane: &Plane) -> Result<PlaneClass> {
    classify_with(psi_f64(), plane)
}

/// Classifies against an arbitrary calibration 4-form.
pub fn classify_with(form: &KForm<f64>, plane: &Plane) -> Result<PlaneClass> {
    let value = calibration_value_with(form, plane)?;
    let label = if value.abs() <= CLASSIFY_TOLERANCE {
        Label::L
    } else if (value.abs() - 1.0).abs() <= CLASSIFY_TOLERANCE {
        Label::Cayley
    } else {
        Label::Generic
    };
    Ok(PlaneClass { label, value, orientation_reversed: label == Label::Cayley && value < 0.0 })
}
