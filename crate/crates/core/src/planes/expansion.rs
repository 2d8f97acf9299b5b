use serde::{Deserialize, Serialize};

use super::frame::{verify_lemma, LFrame};
use crate::exterior::{KForm, Vec8};
use crate::spin7forms::psi_f64;
use crate::{Error, Result};

/// How far the frame expansion of Ψ is from Ψ itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionDefect {
    /// Largest |coefficient| of `RHS − Ψ` in the standard basis. Depends on
    /// the frame unless the expansion is exact.
    pub max_coefficient: f64,
    /// `‖RHS − Ψ‖` in the form norm; invariant under rotating the frame.
    pub norm: f64,
    pub rhs_norm_squared: f64,
    pub inner_with_psi: f64,
}

fn wedge_all(vectors: &[&Vec8]) -> KForm<f64> {
    vectors.iter().fold(KForm::one(), |acc, v| {
        acc.wedge(&KForm::from_vector(v)).expect("degree <= 8")
    })
}

/// Builds the R-notation expansion of Ψ in the dual coframe of an L-frame,
///
/// ```text
///   u∧v∧w∧R_uvw
/// + (u∧v − w∧R_uvw) ∧ (z∧R_uvz − R_uwz∧R_vwz)
/// + (u∧w + v∧R_uvw) ∧ (z∧R_uwz + R_uvz∧R_vwz)
/// + (u∧R_uvw − v∧w) ∧ (z∧R_vwz − R_uvz∧R_uwz)
/// + z∧R_uvz∧R_uwz∧R_vwz
/// ```
///
/// and measures its distance from Ψ. A nonzero defect is a finding about
/// the expansion, not an error.
pub fn psi_expansion_defect(frame: &LFrame) -> Result<ExpansionDefect> {
    let lemma = verify_lemma(frame);
    if !lemma.passed() {
        let worst = lemma.discrepancies.first().map(|d| d.location.clone()).unwrap_or_default();
        return Err(Error::InvalidFrame(worst));
    }
    let rhs = expansion_rhs(frame);
    let psi = psi_f64();
    let diff = &rhs - psi;
    Ok(ExpansionDefect {
        max_coefficient: diff.max_abs_coeff(),
        norm: diff.inner(&diff).expect("degree 4").sqrt(),
        rhs_norm_squared: rhs.inner(&rhs).expect("degree 4"),
        inner_with_psi: rhs.inner(psi).expect("degree 4"),
    })
}

pub(crate) fn expansion_rhs(frame: &LFrame) -> KForm<f64> {
    let LFrame { u, v, w, z, r_uvw: r1, r_uvz: r2, r_uwz: r3, r_vwz: r4 } = frame;
    let two = |a: &Vec8, b: &Vec8| wedge_all(&[a, b]);
    let bracket = |p: KForm<f64>, q: KForm<f64>, sign: f64| &p + &q.scale(&sign);
    let product = |l: KForm<f64>, r: KForm<f64>| l.wedge(&r).expect("degree 4");

    let mut rhs = wedge_all(&[u, v, w, r1]);
    rhs = &rhs + &product(bracket(two(u, v), two(w, r1), -1.0), bracket(two(z, r2), two(r3, r4), -1.0));
    rhs = &rhs + &product(bracket(two(u, w), two(v, r1), 1.0), bracket(two(z, r3), two(r2, r4), 1.0));
    rhs = &rhs + &product(bracket(two(u, r1), two(v, w), -1.0), bracket(two(z, r4), two(r2, r3), -1.0));
    &rhs + &wedge_all(&[z, r2, r3, r4])
}
