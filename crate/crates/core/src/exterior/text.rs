//! Line-oriented text format for forms.
//!
//! ```text
//! # degree 4
//! +1 e^{1234}
//! -1/2 e^{1278}
//! ```
//!
//! Each non-comment line is a signed coefficient followed by a blade. The
//! optional `# degree k` header fixes the degree of an empty form; otherwise
//! it is inferred from the blades, which must all have the same length.
//! Blades may be listed unsorted (`e^{21}`); the reordering sign is folded
//! into the coefficient.

use std::fmt::Write as _;

use super::{KForm, Scalar};
use crate::{Error, Result};

pub fn write_form<S: Scalar>(form: &KForm<S>) -> String {
    let mut out = format!("# degree {}\n", form.degree());
    for (index, coeff) in form.terms() {
        let sign = if coeff.is_negative() { '-' } else { '+' };
        let _ = writeln!(out, "{sign}{} {index}", coeff.abs());
    }
    out
}

pub fn parse_form<S: Scalar>(text: &str) -> Result<KForm<S>> {
    let mut declared: Option<usize> = None;
    let mut terms: Vec<(Vec<u8>, S)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(d) = comment.trim().strip_prefix("degree") {
                let d: usize = d.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad degree header {line:?}"),
                })?;
                if d > 8 {
                    return Err(Error::Parse { line: line_no, msg: format!("degree {d} > 8") });
                }
                declared = Some(d);
            }
            continue;
        }
        let parse_err = |msg: &str| Error::Parse { line: line_no, msg: format!("{msg}: {line:?}") };
        let (coeff_text, blade_text) = line
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| parse_err("expected `<coefficient> e^{...}`"))?;
        let coeff = S::parse_literal(coeff_text.trim()).ok_or_else(|| parse_err("bad coefficient"))?;
        let digits = blade_text
            .strip_prefix("e^{")
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| parse_err("bad blade"))?;
        let indices: Vec<u8> = digits
            .chars()
            .map(|c| c.to_digit(10).filter(|d| (1..=8).contains(d)).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| parse_err("blade indices must be digits 1-8"))?;
        terms.push((indices, coeff));
    }
    let degree = match (declared, terms.first()) {
        (Some(d), _) => d,
        (None, Some((idx, _))) => idx.len(),
        (None, None) => return Err(Error::Parse { line: 0, msg: "empty form without degree header".into() }),
    };
    KForm::from_terms(degree, terms.iter().map(|(i, c)| (i.as_slice(), c.clone())))
}
