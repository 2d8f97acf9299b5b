use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embedding::{coordinate_normal_map, Deformation, EmbeddingSpec, NormalField};
use super::grid::{closedness_residual, DiscreteForm, PeriodicGrid4, Stencil};
use super::trig::TrigForm;
use crate::exterior::Vec8;
use crate::{Error, Result};

/// Band for the fitted order of the Richardson-extrapolated difference
/// quotient.
pub const CONVERGENCE_BAND: (f64, f64) = (1.7, 2.3);
/// Smallest fitted order of `|F(tV)|` accepted for a kernel element.
pub const KERNEL_ORDER_MIN: f64 = 1.9;
/// Band for the fitted order of `|F(tV)|` when the target is not closed.
pub const CONTROL_BAND: (f64, f64) = (0.8, 1.2);
/// Sup-norm values at or below this are treated as identically zero.
pub const VANISHING: f64 = 1e-12;
/// Closedness threshold for the discrete kernel test.
pub const CLOSED_TOLERANCE: f64 = 1e-10;
/// Minimum normal-map determinant accepted by the kernel probe.
pub const MIN_NORMAL_MAP_DET: f64 = 1e-6;

/// `t_k = start · ratio^k` for `k = 0..count`.
pub fn geometric_sequence(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

/// Least-squares slope of `log y` against `log t` over entries with
/// `y > VANISHING`; `None` if fewer than two remain.
pub fn fitted_order(t: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t.iter().zip(y).filter(|(_, &v)| v > VANISHING).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// `log2(y_k / y_{k+1})` for consecutive entries of a halving sequence.
pub fn pairwise_orders(t: &[f64], y: &[f64]) -> Vec<Option<f64>> {
    (1..y.len())
        .map(|k| {
            (y[k - 1] > VANISHING && y[k] > VANISHING).then(|| (y[k - 1] / y[k]).ln() / (t[k - 1] / t[k]).ln())
        })
        .collect()
}

/// `d((i_V Ψ)|_L)` with the central stencil.
pub fn linearization(spec: &EmbeddingSpec, field: &NormalField) -> Result<DiscreteForm> {
    linearization_with(spec, field, Stencil::Central)
}

pub fn linearization_with(spec: &EmbeddingSpec, field: &NormalField, stencil: Stencil) -> Result<DiscreteForm> {
    Deformation::new(spec, field).contracted_form()?.exterior_derivative_with(stencil)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub t: Vec<f64>,
    /// `sup |(F(tV) − F(0))/t − d(i_V Ψ)|_L|`.
    pub plain_errors: Vec<f64>,
    /// The same with the Richardson quotient `2D(t/2) − D(t)`.
    pub richardson_errors: Vec<f64>,
    pub plain_order: Option<f64>,
    pub richardson_order: Option<f64>,
    pub richardson_pairwise: Vec<Option<f64>>,
    /// `sup |d/dt F(tV)|_{t=0} − d(i_V Ψ)|_L|`: zero on flat embeddings, of
    /// order h² otherwise.
    pub linearization_floor: f64,
    pub linearization_norm: f64,
    pub passed: bool,
}

/// Compares difference quotients of `F(tV)` with the discrete linearization.
///
/// Passes when the Richardson order lies in [`CONVERGENCE_BAND`], or when
/// every error vanishes.
pub fn convergence_study(
    spec: &EmbeddingSpec,
    field: &NormalField,
    t_sequence: &[f64],
    stencil: Stencil,
) -> Result<ConvergenceStudy> {
    let deformation = Deformation::new(spec, field);
    let base = deformation.evaluate(0.0)?;
    let lin = deformation.contracted_form()?.exterior_derivative_with(stencil)?;
    let quotient = |t: f64| -> Result<DiscreteForm> { Ok(deformation.evaluate(t)?.sub(&base)?.scale(1.0 / t)) };
    let rows: Result<Vec<(f64, f64)>> = t_sequence
        .par_iter()
        .map(|&t| {
            let full = quotient(t)?;
            let half = quotient(t / 2.0)?;
            let richardson = half.scale(2.0).sub(&full)?;
            Ok((full.sub(&lin)?.sup_norm(), richardson.sub(&lin)?.sup_norm()))
        })
        .collect();
    let (plain_errors, richardson_errors): (Vec<f64>, Vec<f64>) = rows?.into_iter().unzip();
    let plain_order = fitted_order(t_sequence, &plain_errors);
    let richardson_order = fitted_order(t_sequence, &richardson_errors);
    let vanishing = richardson_errors.iter().all(|&e| e <= VANISHING);
    let passed = vanishing || richardson_order.is_some_and(|o| (CONVERGENCE_BAND.0..=CONVERGENCE_BAND.1).contains(&o));
    Ok(ConvergenceStudy {
        t: t_sequence.to_vec(),
        richardson_pairwise: pairwise_orders(t_sequence, &richardson_errors),
        plain_errors,
        richardson_errors,
        plain_order,
        richardson_order,
        linearization_floor: deformation.derivative_at_zero()?.sub(&lin)?.sup_norm(),
        linearization_norm: lin.sup_norm(),
        passed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeExpectation {
    /// The target is closed: `F(tV)` should vanish to second order.
    Kernel,
    /// The target is not closed: `F(tV)` should be first order.
    Obstructed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProbe {
    pub expectation: ProbeExpectation,
    pub t: Vec<f64>,
    /// `sup |F(tV)|`.
    pub values: Vec<f64>,
    pub fitted_order: Option<f64>,
    /// Sup-norm of the discrete d of the target 3-form.
    pub closedness_residual: f64,
    /// Sup-norm of the discrete d of `(i_V Ψ)|_L` recomputed from V.
    pub recovered_residual: f64,
    /// Largest `|(i_V Ψ)|_L − ω|` after inverting the normal map.
    pub inversion_error: f64,
    pub min_abs_det: f64,
    pub max_displacement: f64,
    pub passed: bool,
}

/// The closed 3-form `d_h β + Σ harmonic_c · (constant basis 3-form c)`,
/// with `d_h` the discrete derivative so that closedness holds exactly on
/// the grid.
pub fn closed_target(grid: PeriodicGrid4, beta: &TrigForm, harmonic: [f64; 4]) -> Result<DiscreteForm> {
    if beta.degree != 2 {
        return Err(Error::DegreeMismatch { expected: 2, found: beta.degree });
    }
    let exact = beta.sample(grid)?.exterior_derivative()?;
    let constant = DiscreteForm::from_fn(grid, 3, |_| harmonic.to_vec())?;
    exact.add(&constant)
}

/// `sin θ1 dθ^{234}`, whose derivative is `cos θ1 dθ^{1234}`.
pub fn standard_control_target(grid: PeriodicGrid4) -> Result<DiscreteForm> {
    DiscreteForm::from_fn(grid, 3, |t| vec![0.0, 0.0, 0.0, t[0].sin()])
}

/// Builds `V` with `(i_V Ψ)|_L = ω` by inverting the pointwise normal map,
/// using the r-quadruple of the orthonormalized tangent frame as normal
/// basis. Returns the field and the smallest `|det|` met.
pub fn normal_field_for(spec: &EmbeddingSpec, omega: &DiscreteForm) -> Result<(NormalField, f64)> {
    if omega.degree() != 3 {
        return Err(Error::DegreeMismatch { expected: 3, found: omega.degree() });
    }
    let grid = omega.grid();
    let solved: Result<Vec<(Vec8, f64)>> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let jac = spec.jacobian(&grid.point(p));
            let singular = |det| Error::SingularNormalMap { index: grid.multi_index(p), det };
            let (normals, m) = coordinate_normal_map(&jac).ok_or(singular(0.0))?;
            let det = m.det();
            if !(det.abs() > MIN_NORMAL_MAP_DET) {
                return Err(singular(det));
            }
            let inv = m.inverse().ok_or(singular(det))?;
            let c = inv.apply(&std::array::from_fn(|k| omega.component(k)[p]));
            let v = (0..4).fold(Vec8::zero(), |acc, j| acc.axpy(c[j], &normals[j]));
            Ok((v, det.abs()))
        })
        .collect();
    let solved = solved?;
    let min_det = solved.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let field = NormalField::new(spec, grid, solved.into_iter().map(|s| s.0).collect())?;
    Ok((field, min_det))
}

/// Measures the order in `t` of `sup |F(tV)|` for the V realizing `omega`.
pub fn probe_target(
    spec: &EmbeddingSpec,
    omega: &DiscreteForm,
    t_sequence: &[f64],
    expectation: ProbeExpectation,
) -> Result<KernelProbe> {
    let grid = omega.grid();
    let base = super::embedding::pullback_psi(spec, grid)?;
    if base.sup_norm() > VANISHING {
        return Err(Error::Config(format!(
            "kernel probes need an L-embedding; sup |F(0)| = {:e}",
            base.sup_norm()
        )));
    }
    let (field, min_abs_det) = normal_field_for(spec, omega)?;
    let deformation = Deformation::new(spec, &field);
    let recovered = deformation.contracted_form()?;
    let values: Result<Vec<f64>> = t_sequence.par_iter().map(|&t| Ok(deformation.evaluate(t)?.sup_norm())).collect();
    let values = values?;
    let order = fitted_order(t_sequence, &values);
    let closedness = closedness_residual(omega)?;
    let passed = match expectation {
        ProbeExpectation::Kernel => {
            closedness <= CLOSED_TOLERANCE && order.is_none_or(|o| o >= KERNEL_ORDER_MIN)
        }
        ProbeExpectation::Obstructed => {
            closedness > CLOSED_TOLERANCE && order.is_some_and(|o| (CONTROL_BAND.0..=CONTROL_BAND.1).contains(&o))
        }
    };
    Ok(KernelProbe {
        expectation,
        t: t_sequence.to_vec(),
        values,
        fitted_order: order,
        closedness_residual: closedness,
        recovered_residual: closedness_residual(&recovered)?,
        inversion_error: recovered.sub(omega)?.sup_norm(),
        min_abs_det,
        max_displacement: field.max_norm() * t_sequence.iter().fold(0.0f64, |m, t| m.max(t.abs())),
        passed,
    })
}

/// The probe for `ω = d_h β + harmonic`.
pub fn kernel_probe(
    spec: &EmbeddingSpec,
    grid: PeriodicGrid4,
    beta: &TrigForm,
    harmonic: [f64; 4],
    t_sequence: &[f64],
) -> Result<KernelProbe> {
    let omega = closed_target(grid, beta, harmonic)?;
    probe_target(spec, &omega, t_sequence, ProbeExpectation::Kernel)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub n: Vec<usize>,
    /// Closedness residual of the analytic `dβ` sampled on each grid.
    pub residuals: Vec<f64>,
    /// `residual(n) / residual(2n)`.
    pub ratios: Vec<f64>,
    pub passed: bool,
}

/// Samples the analytic derivative of `beta` on grids of size `sizes` and
/// checks that halving h divides the closedness residual by 4 ± 20%.
pub fn refinement_study(beta: &TrigForm, sizes: &[usize]) -> Result<RefinementStudy> {
    let exact = beta.derivative();
    let residuals: Result<Vec<f64>> =
        sizes.iter().map(|&n| closedness_residual(&exact.sample(PeriodicGrid4::new(n)?)?)).collect();
    let residuals = residuals?;
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let passed = !ratios.is_empty() && ratios.iter().all(|r| (3.2..=4.8).contains(r));
    Ok(RefinementStudy { n: sizes.to_vec(), residuals, ratios, passed })
}
