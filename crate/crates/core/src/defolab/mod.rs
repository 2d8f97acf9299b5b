//! A discrete deformation laboratory on the flat torus T^8.
//!
//! An embedding `f: T^4 → T^8` is sampled on a periodic grid. Displacing it
//! by `tV` and pulling back Ψ gives `F(tV)`; its derivative at `t = 0` is
//! `d((i_V Ψ)|_L)`, so V is an infinitesimal L-deformation exactly when the
//! 3-form `(i_V Ψ)|_L` is closed. The studies here measure both facts.

mod config;
mod embedding;
mod grid;
mod study;
mod trig;

pub use config::{
    run_deform, DeformConfig, DeformRun, EmbeddingSection, GridSection, LabeledConvergence, LabeledProbe,
    ProbeSection, RefinementSection, TSection,
};
pub use embedding::{
    deform, psi_eval, pullback_psi, tau_eval, Deformation, EmbeddingSpec, FourierTerm, NormalField, AMPLITUDE_BOUND,
    DISPLACEMENT_BOUND, MAX_FREQUENCY, MIN_JACOBIAN_GRAM, NORMAL_TOLERANCE,
};
pub use grid::{closedness_residual, index_sets, DiscreteForm, PeriodicGrid4, Stencil};
pub use study::{
    closed_target, convergence_study, fitted_order, geometric_sequence, kernel_probe, linearization,
    linearization_with, normal_field_for, pairwise_orders, probe_target, refinement_study, standard_control_target,
    ConvergenceStudy, KernelProbe, ProbeExpectation, RefinementStudy, CLOSED_TOLERANCE, CONTROL_BAND,
    CONVERGENCE_BAND, KERNEL_ORDER_MIN, MIN_NORMAL_MAP_DET, VANISHING,
};
pub use trig::{TrigForm, TrigFunction, TrigTerm, TrigVectorField};

use crate::exterior::Vec8;

fn orthonormalize(jac: &[Vec8; 4]) -> Option<Vec<Vec8>> {
    crate::planes::gram_schmidt(jac)
}
