//! The Cayley 4-form and the tables derived from it.

mod align;
mod cy;
mod eta;
mod g2;
mod psi;
mod tau;

pub use align::{align_bases, AlignOutcome, SignedPermutation};
pub use cy::{build_psi_from_cy, holomorphic_volume, kahler_form};
pub use eta::{
    build_eta_table, cayley_defect, repair_eta_table, verify_eta_identity, EtaTable,
    ETA_TOLERANCE,
};
pub use g2::{build_psi_from_g2, G2Split};
pub use psi::{build_psi, canonical_tau, psi, psi_f64};
pub use tau::{build_printed_tau, verify_tau_table, verify_tau_table_against, VectorValued3Form};

use crate::exterior::{KForm, Rational, Scalar};

/// Parses a compact signed blade list such as `"e234+e256-e278"` into an
/// exact form with unit coefficients.
pub(crate) fn compact(degree: usize, text: &str) -> KForm<Rational> {
    let mut form = KForm::zero(degree);
    let mut sign = 1i64;
    let mut digits: Vec<u8> = Vec::new();
    let flush = |form: &mut KForm<Rational>, digits: &mut Vec<u8>, sign: i64| {
        if !digits.is_empty() {
            let term = KForm::term(digits, Rational::from_i64(sign)).expect("valid blade");
            *form = &*form + &term;
            digits.clear();
        }
    };
    for c in text.chars() {
        match c {
            '+' | '-' => {
                flush(&mut form, &mut digits, sign);
                sign = if c == '-' { -1 } else { 1 };
            }
            'e' | ' ' => {}
            d => digits.push(d.to_digit(10).expect("digit") as u8),
        }
    }
    flush(&mut form, &mut digits, sign);
    form
}
