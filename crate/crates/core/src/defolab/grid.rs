use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The periodic product grid on T^4 with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicGrid4 {
    n: usize,
}

impl PeriodicGrid4 {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::Config(format!("grid size must be even and at least 8, got {n}")));
        }
        Ok(PeriodicGrid4 { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        std::f64::consts::TAU / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 4] {
        let n = self.n;
        [flat / (n * n * n), flat / (n * n) % n, flat / n % n, flat % n]
    }

    pub fn flat_index(&self, idx: [usize; 4]) -> usize {
        ((idx[0] * self.n + idx[1]) * self.n + idx[2]) * self.n + idx[3]
    }

    pub fn point(&self, flat: usize) -> [f64; 4] {
        self.multi_index(flat).map(|i| i as f64 * self.spacing())
    }

    /// Flat index of the neighbour one step along `axis`, wrapping around.
    pub fn shifted(&self, flat: usize, axis: usize, forward: bool) -> usize {
        let mut idx = self.multi_index(flat);
        idx[axis] = if forward { (idx[axis] + 1) % self.n } else { (idx[axis] + self.n - 1) % self.n };
        self.flat_index(idx)
    }

    /// Second-order central difference of a sampled quantity along `axis`.
    pub fn central_difference<T, F>(&self, values: &[T], axis: usize, sub: F) -> Vec<T>
    where
        T: Send + Sync,
        F: Fn(&T, &T, f64) -> T + Sync,
    {
        let scale = 0.5 / self.spacing();
        (0..self.len())
            .into_par_iter()
            .map(|p| sub(&values[self.shifted(p, axis, true)], &values[self.shifted(p, axis, false)], scale))
            .collect()
    }
}

/// Increasing subsets of `{0, 1, 2, 3}` of size `k` as bitmasks, in
/// lexicographic order of their sorted elements.
pub fn index_sets(k: usize) -> Vec<u8> {
    let mut sets: Vec<u8> = (0u8..16).filter(|m| m.count_ones() as usize == k).collect();
    sets.sort_by_key(|m| (0..4).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>());
    sets
}

fn position_of(sets: &[u8], mask: u8) -> usize {
    sets.iter().position(|&m| m == mask).expect("subset present")
}

/// Which stencil realizes the exterior derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    /// `(dω)_J = Σ_{a∈J} (-1)^{pos(a)} D_a ω_{J∖a}` with central `D_a`.
    Central,
    /// The central stencil with the sign of the axis-`a` term reversed.
    /// Only useful for checking that the convergence study notices.
    FlippedTerm(usize),
}

/// A differential form on the grid: one sampled coefficient array per
/// increasing multi-index in the θ-coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteForm {
    degree: usize,
    grid: PeriodicGrid4,
    components: Vec<Vec<f64>>,
}

impl DiscreteForm {
    pub fn zeros(grid: PeriodicGrid4, degree: usize) -> Result<Self> {
        if degree > 4 {
            return Err(Error::DegreeOverflow { left: degree, right: 0 });
        }
        let count = index_sets(degree).len();
        Ok(DiscreteForm { degree, grid, components: vec![vec![0.0; grid.len()]; count] })
    }

    pub fn from_components(grid: PeriodicGrid4, degree: usize, components: Vec<Vec<f64>>) -> Result<Self> {
        if degree > 4 {
            return Err(Error::DegreeOverflow { left: degree, right: 0 });
        }
        let count = index_sets(degree).len();
        if components.len() != count {
            return Err(Error::Arity { degree, given: components.len() });
        }
        if components.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Config("component length does not match the grid".into()));
        }
        if components.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DiscreteForm { degree, grid, components })
    }

    /// Samples `f(θ)`, which must return one value per component.
    pub fn from_fn(grid: PeriodicGrid4, degree: usize, f: impl Fn([f64; 4]) -> Vec<f64> + Sync) -> Result<Self> {
        let count = index_sets(degree.min(4)).len();
        let samples: Vec<Vec<f64>> = (0..grid.len()).into_par_iter().map(|p| f(grid.point(p))).collect();
        let components = (0..count).map(|c| samples.iter().map(|s| s[c]).collect()).collect();
        Self::from_components(grid, degree, components)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> PeriodicGrid4 {
        self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i]
    }

    pub fn sup_norm(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &DiscreteForm) -> Result<DiscreteForm> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &DiscreteForm) -> Result<DiscreteForm> {
        self.zip(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: f64) -> DiscreteForm {
        let components = self.components.iter().map(|c| c.iter().map(|v| v * factor).collect()).collect();
        DiscreteForm { degree: self.degree, grid: self.grid, components }
    }

    fn zip(&self, other: &DiscreteForm, op: impl Fn(f64, f64) -> f64) -> Result<DiscreteForm> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        if self.grid != other.grid {
            return Err(Error::Config("forms live on different grids".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect())
            .collect();
        Ok(DiscreteForm { degree: self.degree, grid: self.grid, components })
    }

    pub fn exterior_derivative(&self) -> Result<DiscreteForm> {
        self.exterior_derivative_with(Stencil::Central)
    }

    pub fn exterior_derivative_with(&self, stencil: Stencil) -> Result<DiscreteForm> {
        if self.degree >= 4 {
            return Err(Error::DegreeOverflow { left: self.degree, right: 1 });
        }
        let source = index_sets(self.degree);
        let target = index_sets(self.degree + 1);
        let grid = self.grid;
        let diffs: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|axis| {
                self.components.iter().map(|c| grid.central_difference(c, axis, |f, b, s| (f - b) * s)).collect()
            })
            .collect();
        let mut out = vec![vec![0.0; grid.len()]; target.len()];
        for (slot, &mask) in out.iter_mut().zip(&target) {
            for a in 0..4 {
                if mask >> a & 1 == 0 {
                    continue;
                }
                let pos = (mask & ((1 << a) - 1)).count_ones();
                let mut sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                if stencil == Stencil::FlippedTerm(a) {
                    sign = -sign;
                }
                let from = &diffs[a][position_of(&source, mask & !(1 << a))];
                for (o, v) in slot.iter_mut().zip(from) {
                    *o += sign * v;
                }
            }
        }
        Ok(DiscreteForm { degree: self.degree + 1, grid, components: out })
    }
}

/// Sup-norm of the discrete exterior derivative.
pub fn closedness_residual(omega: &DiscreteForm) -> Result<f64> {
    Ok(omega.exterior_derivative()?.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> PeriodicGrid4 {
        PeriodicGrid4::new(8).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(PeriodicGrid4::new(6).is_err());
        assert!(PeriodicGrid4::new(9).is_err());
        assert_eq!(grid().len(), 4096);
    }

    #[test]
    fn index_round_trip_and_wrap() {
        let g = grid();
        for p in [0, 17, 4095] {
            assert_eq!(g.flat_index(g.multi_index(p)), p);
        }
        assert_eq!(g.multi_index(g.shifted(0, 2, false)), [0, 0, 7, 0]);
        assert_eq!(g.multi_index(g.shifted(g.flat_index([7, 0, 0, 0]), 0, true)), [0, 0, 0, 0]);
    }

    #[test]
    fn index_sets_are_lexicographic() {
        assert_eq!(index_sets(3), vec![0b0111, 0b1011, 0b1101, 0b1110]);
        assert_eq!(index_sets(2), vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        assert_eq!(index_sets(4), vec![0b1111]);
    }

    #[test]
    fn constant_three_form_is_closed() {
        let w = DiscreteForm::from_fn(grid(), 3, |_| vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(closedness_residual(&w).unwrap(), 0.0);
    }

    #[test]
    fn top_degree_formula() {
        // ω = sin θ1 dθ^{234}: dω = cos θ1 dθ^{1234}, approximated by sin(h)/h cos θ1
        let g = PeriodicGrid4::new(16).unwrap();
        let w = DiscreteForm::from_fn(g, 3, |t| vec![0.0, 0.0, 0.0, t[0].sin()]).unwrap();
        let d = w.exterior_derivative().unwrap();
        let h = g.spacing();
        assert!((d.sup_norm() - h.sin() / h).abs() < 1e-14);
        // ω = sin θ4 dθ^{123} picks up the sign (-1)^3
        let w = DiscreteForm::from_fn(g, 3, |t| vec![t[3].sin(), 0.0, 0.0, 0.0]).unwrap();
        let d = w.exterior_derivative().unwrap();
        assert!((d.component(0)[0] + h.sin() / h).abs() < 1e-14);
    }

    #[test]
    fn d_squared_vanishes() {
        let g = grid();
        let beta = DiscreteForm::from_fn(g, 2, |t| {
            (0..6).map(|c| ((c + 1) as f64 * t[c % 4] + t[(c + 1) % 4]).sin() + 0.3 * (2.0 * t[(c + 2) % 4]).cos()).collect()
        })
        .unwrap();
        let dd = beta.exterior_derivative().unwrap().exterior_derivative().unwrap();
        assert!(dd.sup_norm() <= 1e-12, "{}", dd.sup_norm());
        let f = DiscreteForm::from_fn(g, 0, |t| vec![(t[0] + 2.0 * t[3]).sin()]).unwrap();
        assert!(f.exterior_derivative().unwrap().exterior_derivative().unwrap().sup_norm() <= 1e-12);
    }

    #[test]
    fn flipped_stencil_differs() {
        let g = grid();
        let w = DiscreteForm::from_fn(g, 3, |t| vec![0.0, 0.0, 0.0, t[0].sin()]).unwrap();
        let good = w.exterior_derivative().unwrap();
        let bad = w.exterior_derivative_with(Stencil::FlippedTerm(0)).unwrap();
        assert!((good.add(&bad).unwrap()).sup_norm() < 1e-15);
    }

    #[test]
    fn degree_checks() {
        let top = DiscreteForm::zeros(grid(), 4).unwrap();
        assert!(top.exterior_derivative().is_err());
        let w = DiscreteForm::zeros(grid(), 3).unwrap();
        assert!(w.sub(&top).is_err());
        assert!(DiscreteForm::from_components(grid(), 3, vec![vec![0.0; 4096]; 3]).is_err());
    }
}
