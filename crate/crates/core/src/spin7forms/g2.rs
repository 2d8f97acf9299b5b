use super::build_psi;
use crate::exterior::{KForm, Rational, Scalar, Vec8};
use crate::report::{Status, VerificationReport};

/// The split of Ψ along the t = x8 direction into a G2 3-form on R^7.
#[derive(Clone, Debug)]
pub struct G2Split {
    /// The G2 3-form, supported on indices 1..=7.
    pub phi: KForm<Rational>,
    /// `s · φ ∧ e^8 + ⋆₇φ` with the discovered sign `s`.
    pub psi8: KForm<Rational>,
    /// `φ = extract_sign · i_{e8}Ψ`.
    pub extract_sign: i64,
    /// Sign in front of the `φ ∧ dt` term.
    pub dt_sign: i64,
    pub report: VerificationReport,
}

/// Extracts the G2 3-form from Ψ and rebuilds Ψ as `φ∧dt + ⋆₇φ`.
///
/// Neither the orientation of t nor the sign of the extraction is fixed a
/// priori, so all four sign choices are tried and the first exact round
/// trip (preferring `dt_sign = +1`, i.e. the formula as written) is kept.
pub fn build_psi_from_g2() -> G2Split {
    let psi = build_psi();
    let e8 = Vec8::<Rational>::basis(8);
    let dt = KForm::integer_term(&[8], 1).expect("valid blade");
    let contracted = psi.interior(&e8).expect("degree 4");

    let mut report = VerificationReport::new("g2-split");
    report.trials = 4;
    let mut found = None;
    for dt_sign in [1i64, -1] {
        for extract_sign in [1i64, -1] {
            let phi = contracted.scale(&Rational::from_i64(extract_sign));
            let star = phi.hodge_star_7().expect("phi lives on 1..7");
            let psi8 = &phi.wedge(&dt).expect("degree 4").scale(&Rational::from_i64(dt_sign)) + &star;
            if psi8 == psi && found.is_none() {
                found = Some((phi, psi8, extract_sign, dt_sign));
            }
        }
    }

    let (phi, psi8, extract_sign, dt_sign) = match found {
        Some(hit) => hit,
        None => {
            let phi = contracted.clone();
            let psi8 = &phi.wedge(&dt).expect("degree 4") + &phi.hodge_star_7().expect("1..7");
            let residual = (&psi8 - &psi).max_abs_coeff();
            report.fail("psi8 - Psi", 0.0, residual);
            (phi, psi8, 1, 1)
        }
    };
    if report.passed() {
        report.status = if dt_sign == 1 { Status::Pass } else { Status::PassUpToConvention };
        report.convention = Some(format!(
            "t = x8; phi = {}i_(e8) Psi; Psi = {}phi^dt + *7 phi",
            if extract_sign < 0 { "-" } else { "" },
            if dt_sign < 0 { "-" } else { "" },
        ));
    }
    report.metric("phi_terms", phi.len() as f64);
    report.metric("extract_sign", extract_sign as f64);
    report.metric("dt_sign", dt_sign as f64);
    report.metric("reconstruction_defect", (&psi8 - &psi).max_abs_coeff());
    G2Split { phi, psi8, extract_sign, dt_sign, report }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::MultiIndex;

    #[test]
    fn phi_has_seven_terms_on_seven_indices() {
        let split = build_psi_from_g2();
        assert_eq!(split.phi.len(), 7);
        assert!(split.phi.terms().all(|(k, _)| !k.contains(8)));
    }

    #[test]
    fn round_trip_is_exact() {
        let split = build_psi_from_g2();
        assert_eq!(split.report.status, Status::Pass);
        assert_eq!(split.psi8, build_psi());
        assert_eq!(split.extract_sign, -1);
        assert_eq!(split.dt_sign, 1);
    }

    /// The index-8-free part of Ψ is exactly ⋆₇φ.
    #[test]
    fn star_phi_is_the_eight_free_part() {
        let split = build_psi_from_g2();
        let star = split.phi.hodge_star_7().unwrap();
        assert_eq!(star.len(), 7);
        let psi = build_psi();
        for blade in MultiIndex::all_of_degree(4) {
            if !blade.contains(8) {
                assert_eq!(star.coeff(blade), psi.coeff(blade), "{blade}");
            }
        }
    }
}
