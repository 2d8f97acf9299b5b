//! Backtracking search for a signed coordinate permutation carrying one
//! exact 4-form onto another.

use std::fmt;

use serde::{Deserialize, Serialize};

use num::Signed;

use crate::exterior::{KForm, MultiIndex, Rational, Scalar};

/// `e^i ↦ signs[i] · e^{perm[i]}` with 1-based targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub perm: [u8; 8],
    pub signs: [i8; 8],
}

impl SignedPermutation {
    pub fn identity() -> Self {
        SignedPermutation { perm: [1, 2, 3, 4, 5, 6, 7, 8], signs: [1; 8] }
    }

    pub fn apply<S: Scalar>(&self, form: &KForm<S>) -> KForm<S> {
        form.pull_signed_permutation(&self.perm, &self.signs)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = SignedPermutation::identity();
        for i in 0..8 {
            let target = self.perm[i] as usize - 1;
            inv.perm[target] = i as u8 + 1;
            inv.signs[target] = self.signs[i];
        }
        inv
    }

    /// A uniformly random signed permutation.
    pub fn random<R: rand::Rng>(rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut perm = [1u8, 2, 3, 4, 5, 6, 7, 8];
        perm.shuffle(rng);
        let signs = std::array::from_fn(|_| if rng.random::<bool>() { 1 } else { -1 });
        SignedPermutation { perm, signs }
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..8 {
            if i > 0 {
                f.write_str(" ")?;
            }
            let s = if self.signs[i] < 0 { '-' } else { '+' };
            write!(f, "e{}->{}e{}", i + 1, s, self.perm[i])?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlignOutcome {
    Found { map: SignedPermutation, explored: u64 },
    /// No signed permutation found within the budget. This is not a proof
    /// that the forms are inequivalent under SO(8).
    NotFound { explored: u64 },
}

impl AlignOutcome {
    pub fn map(&self) -> Option<SignedPermutation> {
        match self {
            AlignOutcome::Found { map, .. } => Some(*map),
            AlignOutcome::NotFound { .. } => None,
        }
    }
}

struct Search<'a> {
    source: &'a KForm<Rational>,
    target: &'a KForm<Rational>,
    source_profile: [Vec<Rational>; 8],
    target_profile: [Vec<Rational>; 8],
    perm: [u8; 8],
    signs: [i8; 8],
    used: u8,
    explored: u64,
    budget: u64,
}

/// Sorted absolute coefficients of the blades containing each index.
fn profile(form: &KForm<Rational>) -> [Vec<Rational>; 8] {
    std::array::from_fn(|i| {
        let mut v: Vec<Rational> = form
            .terms()
            .filter(|(k, _)| k.contains(i as u8 + 1))
            .map(|(_, c)| c.abs())
            .collect();
        v.sort();
        v
    })
}

impl Search<'_> {
    /// Every 4-subset of the assigned source coordinates that contains
    /// `i` must map to a target blade with the matching signed coefficient.
    fn consistent(&self, i: usize) -> bool {
        let assigned = (1u16 << (i + 1)) - 1;
        let degree = self.source.degree();
        // all subsets of {0..=i} of size `degree` containing i
        let rest = assigned & !(1 << i);
        let mut sub = rest;
        loop {
            if sub.count_ones() as usize == degree - 1 {
                let mask = (sub | 1 << i) as u8;
                let blade = MultiIndex::from_mask(mask);
                let mapped: Vec<u8> = blade.iter().map(|k| self.perm[k as usize - 1]).collect();
                let flips = blade.iter().filter(|&k| self.signs[k as usize - 1] < 0).count();
                let (idx, sign) = MultiIndex::canonicalize(&mapped).expect("valid").expect("injective");
                let negate = (sign < 0) ^ (flips % 2 == 1);
                let c = self.source.coeff(blade);
                let image = if negate { -c } else { c };
                if image != self.target.coeff(idx) {
                    return false;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        true
    }

    fn descend(&mut self, i: usize) -> bool {
        if i == 8 {
            return true;
        }
        for j in 0..8u8 {
            if self.used & (1 << j) != 0 || self.source_profile[i] != self.target_profile[j as usize] {
                continue;
            }
            for s in [1i8, -1] {
                if self.explored >= self.budget {
                    return false;
                }
                self.explored += 1;
                self.perm[i] = j + 1;
                self.signs[i] = s;
                self.used |= 1 << j;
                if (i + 1 < self.source.degree() || self.consistent(i)) && self.descend(i + 1) {
                    return true;
                }
                self.used &= !(1 << j);
            }
        }
        false
    }
}

/// Searches the `8!·2^8` signed coordinate permutations for one mapping
/// `source` onto `target`, assigning coordinates one at a time and pruning
/// as soon as a fully mapped blade disagrees. `budget` caps the number of
/// search nodes. A returned map has been checked exactly.
pub fn align_bases(source: &KForm<Rational>, target: &KForm<Rational>, budget: u64) -> AlignOutcome {
    let mut abs_s: Vec<Rational> = source.terms().map(|(_, c)| c.abs()).collect();
    let mut abs_t: Vec<Rational> = target.terms().map(|(_, c)| c.abs()).collect();
    abs_s.sort();
    abs_t.sort();
    if source.degree() != target.degree() || abs_s != abs_t {
        return AlignOutcome::NotFound { explored: 0 };
    }
    if source.degree() == 0 {
        return if source == target {
            AlignOutcome::Found { map: SignedPermutation::identity(), explored: 0 }
        } else {
            AlignOutcome::NotFound { explored: 0 }
        };
    }
    let source_profile = profile(source);
    let target_profile = profile(target);
    let mut sorted_s = source_profile.clone();
    let mut sorted_t = target_profile.clone();
    sorted_s.sort();
    sorted_t.sort();
    if sorted_s != sorted_t {
        return AlignOutcome::NotFound { explored: 0 };
    }
    let mut search = Search {
        source,
        target,
        source_profile,
        target_profile,
        perm: [0; 8],
        signs: [1; 8],
        used: 0,
        explored: 0,
        budget,
    };
    if search.descend(0) {
        let map = SignedPermutation { perm: search.perm, signs: search.signs };
        if map.apply(source) == *target {
            return AlignOutcome::Found { map, explored: search.explored };
        }
    }
    AlignOutcome::NotFound { explored: search.explored }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::spin7forms::build_psi;

    #[test]
    fn identity_alignment() {
        let psi = build_psi();
        let map = align_bases(&psi, &psi, 1_000_000).map().unwrap();
        assert_eq!(map.apply(&psi), psi);
        assert_eq!(map, SignedPermutation::identity());
    }

    #[test]
    fn recovers_planted_permutations() {
        let psi = build_psi();
        for seed in 0..5 {
            let sigma = SignedPermutation::random(&mut trial_rng(seed, 0));
            let moved = sigma.apply(&psi);
            let found = align_bases(&moved, &psi, 10_000_000).map().expect("alignment");
            assert_eq!(found.apply(&moved), psi);
        }
    }

    #[test]
    fn term_count_prunes_immediately() {
        let psi = build_psi();
        let two = &KForm::integer_term(&[1, 2, 3, 4], 1).unwrap() + &KForm::integer_term(&[5, 6, 7, 8], 1).unwrap();
        assert_eq!(align_bases(&psi, &two, 1_000_000), AlignOutcome::NotFound { explored: 0 });
    }

    #[test]
    fn inverse_undoes_apply() {
        let psi = build_psi();
        let sigma = SignedPermutation::random(&mut trial_rng(3, 1));
        assert_eq!(sigma.inverse().apply(&sigma.apply(&psi)), psi);
    }

    #[test]
    fn any_returned_map_is_exact() {
        let psi = build_psi();
        let neg = psi.scale(&Rational::from_i64(-1));
        if let Some(map) = align_bases(&neg, &psi, 10_000_000).map() {
            assert_eq!(map.apply(&neg), psi);
        }
    }
}
