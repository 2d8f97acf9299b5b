use std::sync::OnceLock;

use num::ToPrimitive;

use crate::exterior::{KForm, Rational, Scalar, Vec8};

fn e(indices: &[u8]) -> KForm<Rational> {
    KForm::integer_term(indices, 1).expect("valid blade")
}

/// The Cayley calibration 4-form
///
/// ```text
/// Ψ = e^{1234} + (e^{12} − e^{34}) ∧ (e^{56} − e^{78})
///              + (e^{13} + e^{24}) ∧ (e^{57} + e^{68})
///              + (e^{14} − e^{23}) ∧ (e^{58} − e^{67}) + e^{5678}
/// ```
///
/// built by literally forming the wedge products.
pub fn build_psi() -> KForm<Rational> {
    let pair = |a: &[u8], sa: i64, b: &[u8]| &e(a) + &e(b).scale(&Rational::from_i64(sa));
    let mut psi = e(&[1, 2, 3, 4]);
    let products = [
        (pair(&[1, 2], -1, &[3, 4]), pair(&[5, 6], -1, &[7, 8])),
        (pair(&[1, 3], 1, &[2, 4]), pair(&[5, 7], 1, &[6, 8])),
        (pair(&[1, 4], -1, &[2, 3]), pair(&[5, 8], -1, &[6, 7])),
    ];
    for (left, right) in &products {
        psi = &psi + &left.wedge(right).expect("degree 4");
    }
    &psi + &e(&[5, 6, 7, 8])
}

fn psi_exact() -> &'static KForm<Rational> {
    static PSI: OnceLock<KForm<Rational>> = OnceLock::new();
    PSI.get_or_init(build_psi)
}

/// Ψ in either scalar flavor.
pub fn psi<S: Scalar>() -> KForm<S> {
    psi_exact().map_scalar(|c| S::from_i64(c.to_integer().to_i64().expect("unit coefficient")))
}

pub fn psi_f64() -> &'static KForm<f64> {
    static PSI: OnceLock<KForm<f64>> = OnceLock::new();
    PSI.get_or_init(|| psi_exact().to_float())
}

/// The triple cross product: the unique vector with
/// `⟨τ(u, v, w), z⟩ = Ψ(u, v, w, z)` for every `z`.
pub fn canonical_tau<S: Scalar>(psi: &KForm<S>, u: &Vec8<S>, v: &Vec8<S>, w: &Vec8<S>) -> Vec8<S> {
    let one_form = psi
        .interior(u)
        .and_then(|f| f.interior(v))
        .and_then(|f| f.interior(w))
        .expect("psi has degree 4");
    Vec8(std::array::from_fn(|i| one_form.coeff_of(&[i as u8 + 1])))
}
