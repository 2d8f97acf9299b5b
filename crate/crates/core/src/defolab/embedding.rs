use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{DiscreteForm, PeriodicGrid4};
use crate::exterior::Vec8;
use crate::planes::Matrix4;
use crate::spin7forms::psi_f64;
use crate::{Error, Result};

/// Fourier amplitudes above this may fold the default immersion.
pub const AMPLITUDE_BOUND: f64 = 0.2;
pub const MAX_FREQUENCY: i64 = 2;
/// Smallest admissible Gram determinant of the Jacobian.
pub const MIN_JACOBIAN_GRAM: f64 = 1e-6;
/// Largest admissible `t · max|V|`.
pub const DISPLACEMENT_BOUND: f64 = 0.5;
pub const NORMAL_TOLERANCE: f64 = 1e-9;

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
    let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

fn psi_terms() -> &'static [([usize; 4], f64)] {
    static TERMS: OnceLock<Vec<([usize; 4], f64)>> = OnceLock::new();
    TERMS.get_or_init(|| {
        psi_f64()
            .terms()
            .map(|(k, c)| {
                let idx: Vec<usize> = k.iter().map(|i| i as usize - 1).collect();
                ([idx[0], idx[1], idx[2], idx[3]], *c)
            })
            .collect()
    })
}

/// `Ψ(x0, x1, x2, x3)` without allocation.
pub fn psi_eval(x: &[Vec8; 4]) -> f64 {
    psi_terms()
        .iter()
        .map(|(idx, c)| c * det4(&std::array::from_fn(|r| std::array::from_fn(|k| x[r].0[idx[k]]))))
        .sum()
}

/// The vector `τ(u, v, w)` dual to `Ψ(u, v, w, ·)`, without allocation.
pub fn tau_eval(u: &Vec8, v: &Vec8, w: &Vec8) -> Vec8 {
    let mut out = [0.0; 8];
    for (idx, c) in psi_terms() {
        for free in 0..4 {
            let cols: Vec<usize> = (0..4).filter(|&k| k != free).map(|k| idx[k]).collect();
            let m = |x: &Vec8| [x.0[cols[0]], x.0[cols[1]], x.0[cols[2]]];
            let (a, b, d) = (m(u), m(v), m(w));
            let det3 = a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0])
                + a[2] * (b[0] * d[1] - b[1] * d[0]);
            let sign = if (3 - free) % 2 == 0 { 1.0 } else { -1.0 };
            out[idx[free]] += sign * c * det3;
        }
    }
    Vec8(out)
}

fn gram_det(x: &[Vec8; 4]) -> f64 {
    det4(&std::array::from_fn(|i| std::array::from_fn(|j| x[i].dot(&x[j]))))
}

/// One Fourier perturbation of a target coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    /// 1-based target coordinate in R^8.
    pub coordinate: usize,
    pub frequency: [i64; 4],
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// `f(θ) = W θ + Σ (c cos(m·θ) + s sin(m·θ)) e_j`, a map T^4 → T^8.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    winding: [[i64; 4]; 8],
    fourier_terms: Vec<FourierTerm>,
}

impl Default for EmbeddingSpec {
    /// `f(θ) = (θ1, θ2, 0, 0, θ3, 0, θ4, 0)`, a flat L-torus.
    fn default() -> Self {
        let mut winding = [[0; 4]; 8];
        for (a, row) in [0, 1, 4, 6].into_iter().enumerate() {
            winding[row][a] = 1;
        }
        EmbeddingSpec { winding, fourier_terms: Vec::new() }
    }
}

impl EmbeddingSpec {
    pub fn new(winding: [[i64; 4]; 8], fourier_terms: Vec<FourierTerm>) -> Result<Self> {
        for t in &fourier_terms {
            if !(1..=8).contains(&t.coordinate) {
                return Err(Error::Config(format!("Fourier coordinate {} outside 1..=8", t.coordinate)));
            }
            if t.frequency.iter().any(|m| m.abs() > MAX_FREQUENCY) {
                return Err(Error::Config(format!("Fourier frequency {:?} exceeds {MAX_FREQUENCY}", t.frequency)));
            }
            if !(t.cos.is_finite() && t.sin.is_finite()) {
                return Err(Error::NonFinite);
            }
            if t.cos.abs() > AMPLITUDE_BOUND || t.sin.abs() > AMPLITUDE_BOUND {
                return Err(Error::Config(format!(
                    "Fourier amplitude ({}, {}) exceeds the bound {AMPLITUDE_BOUND}",
                    t.cos, t.sin
                )));
            }
        }
        Ok(EmbeddingSpec { winding, fourier_terms })
    }

    pub fn with_fourier_terms(terms: Vec<FourierTerm>) -> Result<Self> {
        Self::new(Self::default().winding, terms)
    }

    pub fn winding(&self) -> &[[i64; 4]; 8] {
        &self.winding
    }

    pub fn fourier_terms(&self) -> &[FourierTerm] {
        &self.fourier_terms
    }

    /// True when the Jacobian is constant.
    pub fn is_flat(&self) -> bool {
        self.fourier_terms.iter().all(|t| (t.cos == 0.0 && t.sin == 0.0) || t.frequency == [0; 4])
    }

    /// Analytic partial derivatives `∂_a f(θ)`.
    pub fn jacobian(&self, theta: &[f64; 4]) -> [Vec8; 4] {
        let mut cols: [Vec8; 4] = std::array::from_fn(|a| Vec8(std::array::from_fn(|j| self.winding[j][a] as f64)));
        for t in &self.fourier_terms {
            let phase: f64 = (0..4).map(|a| t.frequency[a] as f64 * theta[a]).sum();
            let (s, c) = phase.sin_cos();
            let dphase = -t.cos * s + t.sin * c;
            for (a, col) in cols.iter_mut().enumerate() {
                col.0[t.coordinate - 1] += t.frequency[a] as f64 * dphase;
            }
        }
        cols
    }

    fn jacobians(&self, grid: PeriodicGrid4) -> Vec<[Vec8; 4]> {
        (0..grid.len()).into_par_iter().map(|p| self.jacobian(&grid.point(p))).collect()
    }
}

fn checked_psi(grid: PeriodicGrid4, p: usize, x: &[Vec8; 4]) -> Result<f64> {
    let g = gram_det(x);
    if !(g > MIN_JACOBIAN_GRAM) {
        return Err(Error::DegenerateImmersion { index: grid.multi_index(p), det: g });
    }
    Ok(psi_eval(x))
}

/// `Ψ(∂1 f, ∂2 f, ∂3 f, ∂4 f)` at every gridpoint.
pub fn pullback_psi(spec: &EmbeddingSpec, grid: PeriodicGrid4) -> Result<DiscreteForm> {
    let values: Result<Vec<f64>> =
        (0..grid.len()).into_par_iter().map(|p| checked_psi(grid, p, &spec.jacobian(&grid.point(p)))).collect();
    DiscreteForm::from_components(grid, 4, vec![values?])
}

/// A displacement field sampled at gridpoints, normal to the embedded torus.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalField {
    grid: PeriodicGrid4,
    values: Vec<Vec8>,
}

impl NormalField {
    /// Checks that each value is normal to the tangent space to within
    /// `NORMAL_TOLERANCE`.
    pub fn new(spec: &EmbeddingSpec, grid: PeriodicGrid4, values: Vec<Vec8>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if values.iter().any(|v| v.0.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite);
        }
        let leak = (0..grid.len())
            .into_par_iter()
            .map(|p| {
                let jac = spec.jacobian(&grid.point(p));
                let basis = super::orthonormalize(&jac).unwrap_or_default();
                basis.iter().map(|q| q.dot(&values[p]).abs()).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        if leak > NORMAL_TOLERANCE {
            return Err(Error::NotNormal(leak));
        }
        Ok(NormalField { grid, values })
    }

    /// Samples `raw` and removes its tangential part at every gridpoint.
    pub fn project(spec: &EmbeddingSpec, grid: PeriodicGrid4, raw: impl Fn([f64; 4]) -> Vec8 + Sync) -> Result<Self> {
        let values: Result<Vec<Vec8>> = (0..grid.len())
            .into_par_iter()
            .map(|p| {
                let theta = grid.point(p);
                let jac = spec.jacobian(&theta);
                let basis = super::orthonormalize(&jac)
                    .ok_or(Error::DegenerateImmersion { index: grid.multi_index(p), det: gram_det(&jac) })?;
                let mut v = raw(theta);
                for _ in 0..2 {
                    v = basis.iter().fold(v, |acc, q| acc.axpy(-q.dot(&acc), q));
                }
                Ok(v)
            })
            .collect();
        Self::new(spec, grid, values?)
    }

    pub fn grid(&self) -> PeriodicGrid4 {
        self.grid
    }

    pub fn values(&self) -> &[Vec8] {
        &self.values
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(Vec8::norm).fold(0.0, f64::max)
    }

    /// Central differences `D_a V` along each axis.
    pub fn derivatives(&self) -> [Vec<Vec8>; 4] {
        std::array::from_fn(|a| self.grid.central_difference(&self.values, a, |f, b, s| (f - b).scale(&s)))
    }
}

/// Precomputed data for evaluating `F(tV)` at several `t`.
pub struct Deformation<'a> {
    grid: PeriodicGrid4,
    jacobians: Vec<[Vec8; 4]>,
    field: &'a NormalField,
    derivatives: [Vec<Vec8>; 4],
}

impl<'a> Deformation<'a> {
    pub fn new(spec: &EmbeddingSpec, field: &'a NormalField) -> Self {
        let grid = field.grid;
        Deformation { grid, jacobians: spec.jacobians(grid), field, derivatives: field.derivatives() }
    }

    /// `Ψ(∂1 f + t D1 V, …, ∂4 f + t D4 V)`: the pullback of Ψ along the
    /// translated embedding `f + tV`.
    pub fn evaluate(&self, t: f64) -> Result<DiscreteForm> {
        let reach = t.abs() * self.field.max_norm();
        if reach > DISPLACEMENT_BOUND {
            return Err(Error::DisplacementTooLarge(reach));
        }
        let values: Result<Vec<f64>> = (0..self.grid.len())
            .into_par_iter()
            .map(|p| {
                let x: [Vec8; 4] = std::array::from_fn(|a| self.jacobians[p][a].axpy(t, &self.derivatives[a][p]));
                checked_psi(self.grid, p, &x)
            })
            .collect();
        DiscreteForm::from_components(self.grid, 4, vec![values?])
    }

    /// `d/dt F(tV)` at `t = 0`, using the same discrete derivatives of V.
    pub fn derivative_at_zero(&self) -> Result<DiscreteForm> {
        let values: Vec<f64> = (0..self.grid.len())
            .into_par_iter()
            .map(|p| {
                (0..4)
                    .map(|a| {
                        let mut x = self.jacobians[p].clone();
                        x[a] = self.derivatives[a][p].clone();
                        psi_eval(&x)
                    })
                    .sum()
            })
            .collect();
        DiscreteForm::from_components(self.grid, 4, vec![values])
    }

    /// Components `ω_{abc} = Ψ(V, ∂_a f, ∂_b f, ∂_c f)` of `(i_V Ψ)|_L`.
    pub fn contracted_form(&self) -> Result<DiscreteForm> {
        let triples = crate::planes::TANGENT_TRIPLES;
        let samples: Vec<[f64; 4]> = (0..self.grid.len())
            .into_par_iter()
            .map(|p| {
                let j = &self.jacobians[p];
                let v = &self.field.values[p];
                triples.map(|[a, b, c]| psi_eval(&[v.clone(), j[a].clone(), j[b].clone(), j[c].clone()]))
            })
            .collect();
        let components = (0..4).map(|c| samples.iter().map(|s| s[c]).collect()).collect();
        DiscreteForm::from_components(self.grid, 3, components)
    }
}

/// `F(tV)` for a single `t`.
pub fn deform(spec: &EmbeddingSpec, field: &NormalField, t: f64) -> Result<DiscreteForm> {
    Deformation::new(spec, field).evaluate(t)
}

/// The matrix of `V ↦ (i_V Ψ)|_L` in coordinate tangents, using the
/// r-quadruple of the orthonormalized tangent frame as normal basis.
pub(crate) fn coordinate_normal_map(jac: &[Vec8; 4]) -> Option<([Vec8; 4], Matrix4)> {
    let q = super::orthonormalize(jac)?;
    let (u, v, w, z) = (&q[0], &q[1], &q[2], &q[3]);
    let normals = [tau_eval(u, v, w), tau_eval(u, v, z), tau_eval(u, w, z), tau_eval(v, w, z)];
    let triples = crate::planes::TANGENT_TRIPLES;
    let m = Matrix4(std::array::from_fn(|t| {
        let [a, b, c] = triples[t];
        std::array::from_fn(|j| psi_eval(&[normals[j].clone(), jac[a].clone(), jac[b].clone(), jac[c].clone()]))
    }));
    Some((normals, m))
}
