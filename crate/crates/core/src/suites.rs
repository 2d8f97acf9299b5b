//! Batch verification suites assembled from the module verifiers.

use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::exterior::{KForm, MultiIndex, Rational, Scalar};
use crate::planes::{
    classify, classify_with, normal_to_3form_matrix, psi_expansion_defect, random_l_frame, restricted_max,
    sample_hl3_plane, sample_sl_plane, verify_lemma, LFrame, Label, Matrix4, Plane, LEMMA_TOLERANCE,
};
use crate::report::{Residual, Status, VerificationReport};
use crate::rng::{trial_rng, trial_seed};
use crate::spin7forms::{
    align_bases, build_eta_table, build_psi, build_psi_from_cy, build_psi_from_g2, cayley_defect, holomorphic_volume,
    kahler_form, psi_f64, repair_eta_table, verify_eta_identity, verify_tau_table, AlignOutcome, SignedPermutation,
    ETA_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Forms,
    Tables,
    Lemma,
    Expansion,
    Embeddings,
    All,
}

impl FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Ok(match s {
            "forms" => Suite::Forms,
            "tables" => Suite::Tables,
            "lemma" => Suite::Lemma,
            "expansion" => Suite::Expansion,
            "embeddings" => Suite::Embeddings,
            "all" => Suite::All,
            other => return Err(crate::Error::Config(format!("unknown suite '{other}'"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Overrides every suite's default sample count.
    pub trials: Option<u64>,
    /// Extra frames checked by the lemma suite, e.g. user fixtures.
    pub fixtures: Vec<LFrame>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 1, trials: None, fixtures: Vec::new() }
    }
}

impl SuiteOptions {
    fn trials(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }
}

pub fn run_suite(suite: Suite, options: &SuiteOptions) -> Vec<VerificationReport> {
    match suite {
        Suite::Forms => forms_suite(options),
        Suite::Tables => tables_suite(options),
        Suite::Lemma => lemma_suite(options),
        Suite::Expansion => vec![expansion_report(options.trials(100), options.seed)],
        Suite::Embeddings => embeddings_suite(options),
        Suite::All => [Suite::Forms, Suite::Tables, Suite::Lemma, Suite::Expansion, Suite::Embeddings]
            .into_iter()
            .flat_map(|s| run_suite(s, options))
            .collect(),
    }
}

/// Pass only if every report passes; pass-up-to-convention if any report
/// needed one.
pub fn aggregate_status(reports: &[VerificationReport]) -> Status {
    if reports.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if reports.iter().any(|r| r.status == Status::PassUpToConvention) {
        Status::PassUpToConvention
    } else {
        Status::Pass
    }
}

fn forms_suite(options: &SuiteOptions) -> Vec<VerificationReport> {
    vec![
        psi_identities_report(),
        build_psi_from_g2().report,
        build_psi_from_cy(options.trials(1000), options.seed).1,
        align_report(options.seed),
    ]
}

/// `⋆Ψ = Ψ`, `⟨Ψ, Ψ⟩ = 14`, `Ψ∧Ψ = 14 vol` in exact arithmetic.
pub fn psi_identities_report() -> VerificationReport {
    let psi = build_psi();
    let mut report = VerificationReport::new("psi-identities");
    report.trials = 3;
    let star_defect = (&psi.hodge_star() - &psi).max_abs_coeff();
    if star_defect != 0.0 {
        report.fail("*Psi - Psi", 0.0, star_defect);
    }
    let norm = psi.inner(&psi).expect("same degree");
    if norm != Rational::from_i64(14) {
        report.fail("<Psi, Psi>", 14.0, norm.to_f64());
    }
    let square = psi.wedge(&psi).expect("degree 8");
    let volume = KForm::<Rational>::volume().scale(&Rational::from_i64(14));
    if square != volume {
        report.fail("Psi^Psi - 14 vol", 0.0, (&square - &volume).max_abs_coeff());
    }
    report.metric("terms", psi.len() as f64);
    report.metric("norm_squared", norm.to_f64());
    report.metric("wedge_square_coefficient", square.coeff(MultiIndex::from_mask(0xff)).to_f64());
    report
}

/// Identity alignment plus recovery of a seeded signed permutation.
pub fn align_report(seed: u64) -> VerificationReport {
    let psi = build_psi();
    let mut report = VerificationReport::new("align-round-trip").with_seed(seed);
    report.trials = 2;
    match align_bases(&psi, &psi, 1_000_000) {
        AlignOutcome::Found { map, explored } => {
            report.metric("identity_nodes", explored as f64);
            if map.apply(&psi) != psi {
                report.fail("identity alignment", 0.0, 1.0);
            }
        }
        AlignOutcome::NotFound { .. } => report.fail("identity alignment", 1.0, 0.0),
    }
    let sigma = SignedPermutation::random(&mut trial_rng(seed, 0));
    let moved = sigma.apply(&psi);
    match align_bases(&moved, &psi, 10_000_000) {
        AlignOutcome::Found { map, explored } => {
            report.metric("planted_nodes", explored as f64);
            report.note(format!("planted {sigma}; recovered {map}"));
            if map.apply(&moved) != psi {
                report.fail("planted alignment", 0.0, 1.0);
            }
        }
        AlignOutcome::NotFound { explored } => {
            report.metric("planted_nodes", explored as f64);
            report.fail("planted alignment", 1.0, 0.0);
        }
    }
    report
}

fn tables_suite(options: &SuiteOptions) -> Vec<VerificationReport> {
    let trials = options.trials(10_000);
    vec![
        verify_tau_table(),
        verify_eta_identity(&build_eta_table(), trials, options.seed),
        eta_detector_report(trials, options.seed),
        eta_on_l_frames_report(options.trials(1000), options.seed),
    ]
}

/// Plants a sign flip and a deleted term in the printed η table at seeded
/// positions and checks that verification notices, repair undoes the flip,
/// and the basis phase names the deleted blade.
pub fn eta_detector_report(trials: u64, seed: u64) -> VerificationReport {
    let printed = build_eta_table();
    let mut report = VerificationReport::new("eta-detectors").with_seed(seed);
    report.trials = trials;
    let mut rng = trial_rng(seed, 1);
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
        let c = rng.random_range(0..printed.components.len());
        let blades: Vec<MultiIndex> = printed.components[c].terms().map(|(k, _)| k).collect();
        (c, *blades.choose(rng).expect("nonempty component"))
    };

    let (c, blade) = pick(&mut rng);
    let flipped = printed.with_flipped_sign(c, &blade.indices());
    let flagged = verify_eta_identity(&flipped, trials, seed);
    report.note(format!("flipped {blade} in component {}", c + 1));
    if flagged.passed() {
        report.fail("flip detected", 1.0, 0.0);
    }
    let (repaired, _) = repair_eta_table(&flipped, 64, seed);
    if repaired != printed {
        report.fail("flip repaired exactly", 1.0, 0.0);
    }

    let (c, blade) = pick(&mut rng);
    let deleted = printed.with_deleted_term(c, &blade.indices());
    let flagged = verify_eta_identity(&deleted, trials.min(100), seed);
    report.note(format!("deleted {blade} from component {}", c + 1));
    let target = format!("basis {blade}");
    let localized = flagged.discrepancies.iter().any(|d| d.location == target && d.found.abs() == 1.0);
    if !localized {
        report.fail("deleted blade localized", 1.0, 0.0);
    }
    report
}

/// On orthonormal L-frames the Cayley identity reduces to `Σ η_i² = 1`.
pub fn eta_on_l_frames_report(trials: u64, seed: u64) -> VerificationReport {
    let table = build_eta_table().to_float();
    let psi = psi_f64();
    let mut report = VerificationReport::new("eta-on-l-frames").with_seed(seed);
    report.trials = trials;
    let defects: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let tangent = random_l_frame(seed, i).tangent();
            let eta_sq: f64 = table.components.iter().map(|c| c.eval(&tangent).expect("degree 4").powi(2)).sum();
            (cayley_defect(psi, &table, &tangent), eta_sq - 1.0)
        })
        .collect();
    let worst = defects.iter().map(|d| d.1.abs()).fold(0.0, f64::max);
    report.check("max |sum eta_i^2 - 1|", worst, ETA_TOLERANCE);
    report.residual = Residual::from_samples(&defects.iter().map(|d| d.0).collect::<Vec<_>>());
    report.metric("max_eta_square_defect", worst);
    report
}

fn lemma_suite(options: &SuiteOptions) -> Vec<VerificationReport> {
    let mut reports = vec![lemma_sweep_report(options.trials(1000), options.seed), perturbation_report(options.seed)];
    for (i, f) in options.fixtures.iter().enumerate() {
        let mut r = verify_lemma(f);
        r.identity = format!("l-frame-lemma-fixture-{}", i + 1);
        reports.push(r);
    }
    reports
}

/// Random L-frames must pass (a), (b), (c).
pub fn lemma_sweep_report(trials: u64, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("l-frame-lemma-sweep").with_seed(seed);
    report.trials = trials;
    let results: Vec<VerificationReport> = (0..trials).into_par_iter().map(|i| verify_lemma(&random_l_frame(seed, i))).collect();
    for (name, key) in [("lemma_a", "(a)"), ("lemma_b", "(b)"), ("lemma_c", "(c)")] {
        let worst = results.iter().map(|r| r.metrics[name]).fold(0.0, f64::max);
        report.metric(&format!("max_{name}"), worst);
        report.check(format!("{key} worst frame"), worst, LEMMA_TOLERANCE);
    }
    let failures = results.iter().filter(|r| !r.passed()).count();
    report.metric("failing_frames", failures as f64);
    report.residual = Residual::from_samples(&results.iter().map(|r| r.residual.max).collect::<Vec<_>>());
    report
}

/// Tilting z by 1e-3 towards R_uvw must trip check (b) with a residual
/// within a factor 10 of the tilt.
pub fn perturbation_report(seed: u64) -> VerificationReport {
    let eps = 1e-3;
    let f = random_l_frame(seed, u64::MAX);
    let z = f.z.axpy(eps, &f.r_uvw).normalized().expect("unit");
    let bad = LFrame::from_quadruple_unchecked(f.u.clone(), f.v.clone(), f.w.clone(), z);
    let inner = verify_lemma(&bad);
    let b = inner.metrics["lemma_b"];
    let mut report = VerificationReport::new("l-frame-perturbation").with_seed(seed);
    report.trials = 1;
    report.metric("perturbation", eps);
    report.metric("lemma_b", b);
    if inner.metrics["lemma_b"] <= LEMMA_TOLERANCE {
        report.fail("(b) flags the perturbed frame", eps, b);
    }
    if !(b >= eps / 10.0 && b <= eps * 10.0) {
        report.fail("(b) residual within 10x of perturbation", eps, b);
    }
    report
}

/// The R-notation expansion measured on random L-frames; passes when the
/// frame-invariant defect norm agrees across frames to 1e-8.
pub fn expansion_report(trials: u64, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("frame-expansion").with_seed(seed);
    report.trials = trials;
    let defects: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| psi_expansion_defect(&random_l_frame(seed, i)))
        .collect::<crate::Result<Vec<_>>>()
        .unwrap_or_default();
    if defects.len() as u64 != trials || defects.is_empty() {
        report.fail("expansion computed on every frame", trials as f64, defects.len() as f64);
        return report;
    }
    let norms: Vec<f64> = defects.iter().map(|d| d.norm).collect();
    let (lo, hi) = norms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    report.check("frame-to-frame variation of the defect norm", hi - lo, 1e-8);
    let mean = norms.iter().sum::<f64>() / norms.len() as f64;
    report.metric("defect_norm", mean);
    report.metric("defect_norm_variation", hi - lo);
    let coeff: Vec<f64> = defects.iter().map(|d| d.max_coefficient).collect();
    report.metric("max_coefficient_min", coeff.iter().copied().fold(f64::INFINITY, f64::min));
    report.metric("max_coefficient_max", coeff.iter().copied().fold(0.0, f64::max));
    report.metric("rhs_norm_squared", defects[0].rhs_norm_squared);
    report.metric("inner_with_psi", defects[0].inner_with_psi);
    report.residual = Residual::from_samples(&norms);
    if mean > 1e-8 {
        report.note(format!("the expansion differs from Psi: |RHS - Psi| = {mean:.12}"));
    }
    report
}

fn embeddings_suite(options: &SuiteOptions) -> Vec<VerificationReport> {
    let trials = options.trials(1000);
    vec![
        sl_report(trials, options.seed),
        hl3_report(trials, options.seed),
        normal_map_report(trials, options.seed),
    ]
}

/// Special Lagrangian samples are L-planes of the Calabi–Yau Ψ.
pub fn sl_report(trials: u64, seed: u64) -> VerificationReport {
    let psi_cy = build_psi_from_cy(0, seed).0.to_float();
    let omega = kahler_form().to_float();
    let re = holomorphic_volume().0.to_float();
    let mut report = VerificationReport::new("special-lagrangian-planes").with_seed(seed);
    report.trials = trials;
    let rows: Vec<[f64; 3]> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let p = sample_sl_plane(trial_seed(seed, i));
            let label_ok = classify_with(&psi_cy, &p).map(|c| c.label == Label::L).unwrap_or(false);
            let constraints = restricted_max(&omega, &p).max(restricted_max(&re, &p));
            [restricted_max(&psi_cy, &p), constraints, if label_ok { 0.0 } else { 1.0 }]
        })
        .collect();
    let worst = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, f64::max);
    report.check("max |psi_cy restricted|", worst(0), 1e-12);
    report.check("max |omega restricted|, |Re Omega restricted|", worst(1), 1e-12);
    report.check("planes not labelled L", worst(2), 0.0);
    report.metric("max_psi_cy_restricted", worst(0));
    report.residual = Residual::from_samples(&rows.iter().map(|r| r[0]).collect::<Vec<_>>());
    report
}

/// Lifted 3-planes with `φ| = 0` are L-planes of Ψ.
pub fn hl3_report(trials: u64, seed: u64) -> VerificationReport {
    let phi = build_psi_from_g2().phi.to_float();
    let psi = psi_f64();
    let mut report = VerificationReport::new("lifted-hl3-planes").with_seed(seed);
    report.trials = trials;
    let rows: Vec<Option<(f64, bool)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let p = sample_hl3_plane(&phi, trial_seed(seed, i)).ok()?;
            let lifted = p.extended(&crate::exterior::Vec8::basis(8)).ok()?;
            let value = restricted_max(psi, &lifted);
            Some((value, classify(&lifted).ok()?.label == Label::L))
        })
        .collect();
    let failed = rows.iter().filter(|r| r.is_none()).count();
    let values: Vec<f64> = rows.iter().flatten().map(|r| r.0).collect();
    let worst = values.iter().copied().fold(0.0, f64::max);
    report.check("sampling failures", failed as f64, 0.0);
    report.check("max |Psi restricted|", worst, 1e-12);
    report.check("planes not labelled L", rows.iter().flatten().filter(|r| !r.1).count() as f64, 0.0);
    report.metric("max_psi_restricted", worst);
    report.residual = Residual::from_samples(&values);
    report
}

/// `|det M|` of the normal-to-3-form map: exactly 1 on the coordinate
/// L-plane, recorded across random L-planes.
pub fn normal_map_report(trials: u64, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("normal-to-3form-map").with_seed(seed);
    report.trials = trials;
    let standard = random_frame_matrix(&crate::planes::build_l_frame(
        &crate::exterior::Vec8::basis(1),
        &crate::exterior::Vec8::basis(2),
        &crate::exterior::Vec8::basis(5),
        crate::planes::ZChoice::Given(crate::exterior::Vec8::basis(7)),
    )
    .expect("coordinate L-frame"));
    let det0 = standard.map(|m| m.det().abs()).unwrap_or(0.0);
    report.check("standard plane |det M| - 1", det0 - 1.0, 1e-12);
    report.metric("standard_abs_det", det0);

    let rows: Vec<Option<(f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let m = random_frame_matrix(&random_l_frame(seed, i))?;
            let det = m.det().abs();
            let inverse_error = if det > 1e-6 {
                m.mul(&m.inverse()?).max_abs_diff(&Matrix4::identity())
            } else {
                0.0
            };
            Some((det, inverse_error))
        })
        .collect();
    let failed = rows.iter().filter(|r| r.is_none()).count();
    report.check("matrices not built", failed as f64, 0.0);
    let dets: Vec<f64> = rows.iter().flatten().map(|r| r.0).collect();
    let min = dets.iter().copied().fold(f64::INFINITY, f64::min);
    let max = dets.iter().copied().fold(0.0, f64::max);
    let inv = rows.iter().flatten().map(|r| r.1).fold(0.0, f64::max);
    report.check("max |M M^-1 - I|", inv, 1e-9);
    report.metric("min_abs_det", min);
    report.metric("max_abs_det", max);
    report.metric("planes_below_1e-6", dets.iter().filter(|&&d| d <= 1e-6).count() as f64);
    report.residual = Residual::from_samples(&dets);
    report
}

fn random_frame_matrix(frame: &LFrame) -> Option<Matrix4> {
    let plane = Plane::new(frame.tangent().to_vec()).ok()?;
    normal_to_3form_matrix(&plane, &frame.normals()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteOptions {
        SuiteOptions { seed: 3, trials: Some(50), fixtures: vec![] }
    }

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_passes_on_small_samples() {
        let reports = run_suite(Suite::All, &quick());
        for r in &reports {
            assert!(r.passed(), "{} {:?}", r.identity, r.discrepancies);
        }
        assert_eq!(aggregate_status(&reports), Status::PassUpToConvention);
    }

    #[test]
    fn corrupted_fixture_fails_lemma_suite() {
        let f = random_l_frame(4, 0);
        let mut bad = f.clone();
        bad.r_uvw = bad.r_uvw.axpy(1e-3, &bad.u);
        let options = SuiteOptions { fixtures: vec![bad], ..quick() };
        let reports = run_suite(Suite::Lemma, &options);
        assert_eq!(aggregate_status(&reports), Status::Fail);
    }

    #[test]
    fn expansion_defect_is_recorded() {
        let r = expansion_report(20, 5);
        assert!(r.passed());
        assert!((r.metrics["defect_norm"] - 28f64.sqrt()).abs() < 1e-9);
    }
}
