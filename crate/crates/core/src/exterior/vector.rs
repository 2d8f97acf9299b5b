use std::ops::{Add, Index, IndexMut, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::{Error, Result};

/// A vector in R^8. Index `i` of the array is the coefficient of `e_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec8<S = f64>(pub [S; 8]);

impl<S: Scalar> Vec8<S> {
    pub fn zero() -> Self {
        Vec8(std::array::from_fn(|_| S::zero()))
    }

    /// The standard basis vector `e_i`, `i` in `1..=8`.
    pub fn basis(i: usize) -> Self {
        assert!((1..=8).contains(&i), "basis index {i} out of range");
        let mut v = Self::zero();
        v.0[i - 1] = S::one();
        v
    }

    pub fn dot(&self, other: &Self) -> S {
        self.0
            .iter()
            .zip(&other.0)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_squared(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, factor: &S) -> Self {
        Vec8(std::array::from_fn(|i| self.0[i].clone() * factor.clone()))
    }

    pub fn to_float(&self) -> Vec8<f64> {
        Vec8(std::array::from_fn(|i| self.0[i].to_f64()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl Vec8<f64> {
    pub fn new(components: [f64; 8]) -> Result<Self> {
        if components.iter().all(|c| c.is_finite()) {
            Ok(Vec8(components))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(&(1.0 / n)))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        Vec8(std::array::from_fn(|i| self.0[i] + factor * other.0[i]))
    }

    pub fn to_exact(&self) -> Option<Vec8<super::Rational>> {
        let parts: Option<Vec<_>> = self.0.iter().map(|&c| super::scalar::rational_from_f64(c)).collect();
        let parts = parts?;
        Some(Vec8(std::array::from_fn(|i| parts[i].clone())))
    }
}

impl<S> Index<usize> for Vec8<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S> IndexMut<usize> for Vec8<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

impl<S: Scalar> Add for &Vec8<S> {
    type Output = Vec8<S>;

    fn add(self, rhs: Self) -> Vec8<S> {
        Vec8(std::array::from_fn(|i| self.0[i].clone() + rhs.0[i].clone()))
    }
}

impl<S: Scalar> Sub for &Vec8<S> {
    type Output = Vec8<S>;

    fn sub(self, rhs: Self) -> Vec8<S> {
        Vec8(std::array::from_fn(|i| self.0[i].clone() - rhs.0[i].clone()))
    }
}

impl<S: Scalar> Neg for &Vec8<S> {
    type Output = Vec8<S>;

    fn neg(self) -> Vec8<S> {
        Vec8(std::array::from_fn(|i| -self.0[i].clone()))
    }
}
