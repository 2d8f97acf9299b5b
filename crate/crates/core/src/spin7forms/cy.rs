//! Ψ from a Calabi–Yau structure on C^4 with `z_j = x_{2j-1} + i x_{2j}`.

use rayon::prelude::*;

use super::align::{align_bases, AlignOutcome};
use super::build_psi;
use crate::exterior::{KForm, Rational, Scalar};
use crate::report::{Residual, VerificationReport};
use crate::rng::trial_rng;

/// `ω = Σ_j e^{2j-1} ∧ e^{2j}`.
pub fn kahler_form() -> KForm<Rational> {
    (1..=4u8).fold(KForm::zero(2), |acc, j| {
        &acc + &KForm::integer_term(&[2 * j - 1, 2 * j], 1).expect("valid blade")
    })
}

/// `Ω = dz_1 ∧ dz_2 ∧ dz_3 ∧ dz_4` as `(Re Ω, Im Ω)`.
pub fn holomorphic_volume() -> (KForm<Rational>, KForm<Rational>) {
    let mut re = KForm::<Rational>::one();
    let mut im = KForm::<Rational>::zero(0);
    for j in 1..=4u8 {
        let dx = KForm::integer_term(&[2 * j - 1], 1).expect("valid blade");
        let dy = KForm::integer_term(&[2 * j], 1).expect("valid blade");
        // (re + i im) ∧ (dx + i dy)
        let new_re = &re.wedge(&dx).expect("degree") - &im.wedge(&dy).expect("degree");
        let new_im = &re.wedge(&dy).expect("degree") + &im.wedge(&dx).expect("degree");
        re = new_re;
        im = new_im;
    }
    (re, im)
}

/// `Re Ω + ½ ω∧ω` together with a report of its structural invariants.
///
/// The comass-style defect `|ξ|² − Ψ_CY(ξ)²` is sampled on `trials` random
/// orthonormal quadruples; a calibration must keep it nonnegative.
pub fn build_psi_from_cy(trials: u64, seed: u64) -> (KForm<Rational>, VerificationReport) {
    let omega = kahler_form();
    let (re_omega, _) = holomorphic_volume();
    let half = Rational::new(1.into(), 2.into());
    let psi_cy = &re_omega + &omega.wedge(&omega).expect("degree 4").scale(&half);

    let mut report = VerificationReport::new("calabi-yau-psi").with_seed(seed);
    report.trials = trials;
    let self_dual = psi_cy.hodge_star() == psi_cy;
    if !self_dual {
        report.fail("*psi_cy - psi_cy", 0.0, (&psi_cy.hodge_star() - &psi_cy).max_abs_coeff());
    }
    let norm = psi_cy.inner(&psi_cy).expect("same degree").to_f64();
    if norm != 14.0 {
        report.fail("<psi_cy, psi_cy>", 14.0, norm);
    }
    report.metric("norm_squared", norm);
    report.metric("terms", psi_cy.len() as f64);

    let psi_f = psi_cy.to_float();
    let defects: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let quad = crate::planes::random_orthonormal::<4>(&mut trial_rng(seed, t));
            let v = psi_f.eval(&quad).expect("degree 4");
            1.0 - v * v
        })
        .collect();
    let min = defects.iter().copied().fold(f64::INFINITY, f64::min);
    report.metric("min_comass_defect", if defects.is_empty() { 0.0 } else { min });
    if min < -1e-12 {
        report.fail("min |xi|^2 - psi_cy(xi)^2", 0.0, min);
    }
    report.residual = Residual::from_samples(&defects);

    match align_bases(&psi_cy, &build_psi(), 1_000_000) {
        AlignOutcome::Found { map, .. } => report.note(format!("signed-permutation alignment to Psi: {map}")),
        AlignOutcome::NotFound { explored } => {
            report.note(format!("no signed-permutation alignment to Psi found ({explored} nodes)"))
        }
    }
    (psi_cy, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn half_omega_squared_terms() {
        let omega = kahler_form();
        let half = omega.wedge(&omega).unwrap().scale(&Rational::new(1.into(), 2.into()));
        assert_eq!(half.len(), 6);
        assert_eq!(half.coeff_of(&[1, 2, 3, 4]), q(1));
        assert_eq!(half.coeff_of(&[5, 6, 7, 8]), q(1));
    }

    #[test]
    fn real_part_of_omega() {
        let (re, im) = holomorphic_volume();
        assert_eq!(re.len(), 8);
        assert_eq!(im.len(), 8);
        assert_eq!(re.coeff_of(&[1, 3, 5, 7]), q(1));
        assert_eq!(re.coeff_of(&[2, 4, 5, 7]), q(-1));
        assert_eq!(re.coeff_of(&[2, 4, 6, 8]), q(1));
    }

    #[test]
    fn cy_form_invariants() {
        let (psi_cy, report) = build_psi_from_cy(200, 4);
        assert_eq!(report.status, Status::Pass, "{:?}", report.discrepancies);
        assert_eq!(psi_cy.inner(&psi_cy).unwrap(), q(14));
        assert_eq!(psi_cy.hodge_star(), psi_cy);
        assert_eq!(psi_cy.coeff_of(&[1, 2, 3, 4]), q(1));
    }
}
