//! Trigonometric polynomials on T^4 and forms built from them, with
//! analytic exterior derivatives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{index_sets, DiscreteForm, PeriodicGrid4};
use crate::exterior::Vec8;
use crate::rng::trial_rng;
use crate::Result;

/// `cos_amp · cos(m·θ) + sin_amp · sin(m·θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub frequency: [i64; 4],
    pub cos_amp: f64,
    pub sin_amp: f64,
}

impl TrigTerm {
    fn phase(&self, theta: &[f64; 4]) -> f64 {
        (0..4).map(|a| self.frequency[a] as f64 * theta[a]).sum()
    }

    pub fn eval(&self, theta: &[f64; 4]) -> f64 {
        let (s, c) = self.phase(theta).sin_cos();
        self.cos_amp * c + self.sin_amp * s
    }

    pub fn derivative(&self, axis: usize) -> TrigTerm {
        let m = self.frequency[axis] as f64;
        TrigTerm { frequency: self.frequency, cos_amp: m * self.sin_amp, sin_amp: -m * self.cos_amp }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigFunction {
    pub terms: Vec<TrigTerm>,
}

impl TrigFunction {
    pub fn eval(&self, theta: &[f64; 4]) -> f64 {
        self.terms.iter().map(|t| t.eval(theta)).sum()
    }

    pub fn derivative(&self, axis: usize) -> TrigFunction {
        TrigFunction { terms: self.terms.iter().map(|t| t.derivative(axis)).collect() }
    }

    /// `count` terms with frequencies in `[-max_freq, max_freq]^4` and
    /// amplitudes uniform in `[-amplitude, amplitude]`.
    pub fn random<R: Rng>(rng: &mut R, count: usize, max_freq: i64, amplitude: f64) -> TrigFunction {
        let terms = (0..count)
            .map(|_| TrigTerm {
                frequency: std::array::from_fn(|_| rng.random_range(-max_freq..=max_freq)),
                cos_amp: rng.random_range(-amplitude..=amplitude),
                sin_amp: rng.random_range(-amplitude..=amplitude),
            })
            .collect();
        TrigFunction { terms }
    }
}

/// A form on T^4 whose coefficients over the increasing θ-multi-indices are
/// trigonometric polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigForm {
    pub degree: usize,
    pub components: Vec<TrigFunction>,
}

impl TrigForm {
    pub fn zero(degree: usize) -> Self {
        TrigForm { degree, components: vec![TrigFunction::default(); index_sets(degree).len()] }
    }

    pub fn random(degree: usize, terms: usize, max_freq: i64, amplitude: f64, seed: u64) -> Self {
        let mut rng = trial_rng(seed, 0);
        let components =
            (0..index_sets(degree).len()).map(|_| TrigFunction::random(&mut rng, terms, max_freq, amplitude)).collect();
        TrigForm { degree, components }
    }

    /// Analytic exterior derivative.
    pub fn derivative(&self) -> TrigForm {
        let source = index_sets(self.degree);
        let target = index_sets(self.degree + 1);
        let components = target
            .iter()
            .map(|&mask| {
                let mut terms = Vec::new();
                for a in 0..4 {
                    if mask >> a & 1 == 0 {
                        continue;
                    }
                    let pos = (mask & ((1 << a) - 1)).count_ones();
                    let from = source.iter().position(|&m| m == mask & !(1 << a)).expect("subset");
                    let mut d = self.components[from].derivative(a);
                    if pos % 2 == 1 {
                        for t in &mut d.terms {
                            t.cos_amp = -t.cos_amp;
                            t.sin_amp = -t.sin_amp;
                        }
                    }
                    terms.extend(d.terms);
                }
                TrigFunction { terms }
            })
            .collect();
        TrigForm { degree: self.degree + 1, components }
    }

    pub fn sample(&self, grid: PeriodicGrid4) -> Result<DiscreteForm> {
        DiscreteForm::from_fn(grid, self.degree, |t| self.components.iter().map(|c| c.eval(&t)).collect())
    }
}

/// A vector field on T^4 with values in R^8.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigVectorField {
    pub components: [TrigFunction; 8],
}

impl TrigVectorField {
    pub fn random(terms: usize, max_freq: i64, amplitude: f64, seed: u64) -> Self {
        let mut rng = trial_rng(seed, 0);
        TrigVectorField { components: std::array::from_fn(|_| TrigFunction::random(&mut rng, terms, max_freq, amplitude)) }
    }

    pub fn eval(&self, theta: &[f64; 4]) -> Vec8 {
        Vec8(std::array::from_fn(|i| self.components[i].eval(theta)))
    }
}
