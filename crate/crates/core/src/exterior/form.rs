use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use super::{MultiIndex, Rational, Scalar, Vec8};
use crate::{Error, Result};

/// A homogeneous degree-`k` form on R^8.
///
/// Coefficients live on strictly increasing multi-indices; zero coefficients
/// are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm<S = f64> {
    degree: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= 8, "degree {degree} exceeds 8");
        KForm { degree, coeffs: BTreeMap::new() }
    }

    /// The constant 0-form `1`.
    pub fn one() -> Self {
        let mut f = Self::zero(0);
        f.coeffs.insert(MultiIndex::EMPTY, S::one());
        f
    }

    /// The volume form `e^{12345678}`.
    pub fn volume() -> Self {
        Self::blade(MultiIndex::FULL, S::one())
    }

    pub fn blade(index: MultiIndex, coeff: S) -> Self {
        let mut f = Self::zero(index.degree());
        f.add_term(index, coeff);
        f
    }

    /// `coeff · e^{i_1} ∧ … ∧ e^{i_k}` for an arbitrary (possibly unsorted
    /// or repeating) index sequence.
    pub fn term(indices: &[u8], coeff: S) -> Result<Self> {
        let mut f = Self::zero(indices.len());
        if let Some((index, sign)) = MultiIndex::canonicalize(indices)? {
            f.add_term(index, if sign < 0 { -coeff } else { coeff });
        }
        Ok(f)
    }

    /// The 1-form metric-dual to `x`.
    pub fn from_vector(x: &Vec8<S>) -> Self {
        let mut f = Self::zero(1);
        for i in 1..=8u8 {
            f.add_term(MultiIndex::from_mask(1 << (i - 1)), x[i as usize - 1].clone());
        }
        f
    }

    /// Builds a form from `(indices, coefficient)` pairs, summing repeats.
    pub fn from_terms<'a, I>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [u8], S)>,
    {
        let mut f = Self::zero(degree);
        for (indices, coeff) in terms {
            if indices.len() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: indices.len() });
            }
            f = &f + &Self::term(indices, coeff)?;
        }
        Ok(f)
    }

    pub(crate) fn add_term(&mut self, index: MultiIndex, coeff: S) {
        debug_assert_eq!(index.degree(), self.degree);
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(index).or_insert_with(S::zero);
        *entry = entry.clone() + coeff;
        if entry.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nonzero blades.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, index: MultiIndex) -> S {
        self.coeffs.get(&index).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient on the blade named by an increasing index list.
    pub fn coeff_of(&self, indices: &[u8]) -> S {
        MultiIndex::new(indices).map(|i| self.coeff(i)).unwrap_or_else(|_| S::zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &S)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(*k, v.clone() * factor.clone());
        }
        out
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        let mut out = KForm::zero(self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(*k, f(v));
        }
        out
    }

    pub fn to_float(&self) -> KForm<f64> {
        self.map_scalar(|c| c.to_f64())
    }

    /// Relabels coordinates: `e^i ↦ sign_i · e^{perm_i}` (1-based targets).
    pub fn pull_signed_permutation(&self, perm: &[u8; 8], signs: &[i8; 8]) -> Self {
        let mut out = Self::zero(self.degree);
        for (k, v) in &self.coeffs {
            let mapped: Vec<u8> = k.iter().map(|i| perm[i as usize - 1]).collect();
            let flips = k.iter().filter(|&i| signs[i as usize - 1] < 0).count();
            let (idx, sign) = MultiIndex::canonicalize(&mapped)
                .expect("valid permutation")
                .expect("permutation is injective");
            let negate = (sign < 0) ^ (flips % 2 == 1);
            out.add_term(idx, if negate { -v.clone() } else { v.clone() });
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.degree + other.degree > 8 {
            return Err(Error::DegreeOverflow { left: self.degree, right: other.degree });
        }
        let mut out = Self::zero(self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some(sign) = a.wedge_sign(*b) {
                    let c = ca.clone() * cb.clone();
                    let merged = MultiIndex::from_mask(a.mask() | b.mask());
                    out.add_term(merged, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Hodge star on R^8: `⋆e^I = sign(I, I^c) e^{I^c}`.
    pub fn hodge_star(&self) -> Self {
        let mut out = Self::zero(8 - self.degree);
        for (k, v) in &self.coeffs {
            let comp = k.complement();
            let sign = k.wedge_sign(comp).expect("complement is disjoint");
            out.add_term(comp, if sign < 0 { -v.clone() } else { v.clone() });
        }
        out
    }

    /// Hodge star inside span{e_1..e_7} with orientation e^{1..7}.
    pub fn hodge_star_7(&self) -> Result<Self> {
        if let Some((k, _)) = self.coeffs.iter().find(|(k, _)| k.contains(8)) {
            return Err(Error::NotSevenDimensional(k.to_string()));
        }
        if self.degree > 7 {
            return Err(Error::NotSevenDimensional(format!("degree {}", self.degree)));
        }
        let mut out = Self::zero(7 - self.degree);
        for (k, v) in &self.coeffs {
            let comp = k.complement_in_seven();
            let sign = k.wedge_sign(comp).expect("complement is disjoint");
            out.add_term(comp, if sign < 0 { -v.clone() } else { v.clone() });
        }
        Ok(out)
    }

    /// Interior product `i_x a`.
    pub fn interior(&self, x: &Vec8<S>) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::InteriorOfScalar);
        }
        let mut out = Self::zero(self.degree - 1);
        for (k, v) in &self.coeffs {
            for (pos, i) in k.iter().enumerate() {
                let xi = &x[i as usize - 1];
                if xi.is_zero() {
                    continue;
                }
                let rest = MultiIndex::from_mask(k.mask() & !(1 << (i - 1)));
                let c = v.clone() * xi.clone();
                out.add_term(rest, if pos % 2 == 1 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `a(x_1, …, x_k)`.
    pub fn eval(&self, xs: &[Vec8<S>]) -> Result<S> {
        if xs.len() != self.degree {
            return Err(Error::Arity { degree: self.degree, given: xs.len() });
        }
        let mut total = S::zero();
        for (k, v) in &self.coeffs {
            let cols: Vec<usize> = k.iter().map(|i| i as usize - 1).collect();
            let minor: Vec<Vec<S>> = xs
                .iter()
                .map(|x| cols.iter().map(|&c| x[c].clone()).collect())
                .collect();
            total = total + v.clone() * determinant(minor);
        }
        Ok(total)
    }

    /// Inner product induced by the Euclidean metric: `Σ_I a_I b_I`.
    pub fn inner(&self, other: &Self) -> Result<S> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(self
            .coeffs
            .iter()
            .filter_map(|(k, a)| other.coeffs.get(k).map(|b| a.clone() * b.clone()))
            .fold(S::zero(), |acc, x| acc + x))
    }

    /// Largest absolute coefficient (0 for the zero form).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl KForm<Rational> {
    pub fn integer_term(indices: &[u8], coeff: i64) -> Result<Self> {
        Self::term(indices, Rational::from_i64(coeff))
    }
}

/// Determinant of a square matrix by Gaussian elimination with max-magnitude pivoting.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(pivot) = pivot else {
            return S::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / p.clone();
            for c in col..n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    det
}

impl<S: Scalar> Add for &KForm<S> {
    type Output = KForm<S>;

    fn add(self, rhs: Self) -> KForm<S> {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, v) in &rhs.coeffs {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &KForm<S> {
    type Output = KForm<S>;

    fn sub(self, rhs: Self) -> KForm<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for &KForm<S> {
    type Output = KForm<S>;

    fn neg(self) -> KForm<S> {
        self.scale(&-S::one())
    }
}
