//! Acceptance suite: one verdict line per criterion, non-zero exit if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use spin7lab::defolab::{
    closed_target, convergence_study, geometric_sequence, kernel_probe, probe_target, standard_control_target,
    EmbeddingSpec, NormalField, PeriodicGrid4, ProbeExpectation, Stencil, TrigForm, TrigVectorField, CONTROL_BAND,
    CONVERGENCE_BAND, KERNEL_ORDER_MIN,
};
use spin7lab::rng::{trial_rng, trial_seed};
use spin7lab::spin7forms::{align_bases, build_eta_table, build_psi, verify_eta_identity, verify_tau_table, SignedPermutation};
use spin7lab::suites::{
    eta_detector_report, expansion_report, hl3_report, lemma_sweep_report, normal_map_report, perturbation_report,
    psi_identities_report, sl_report,
};
use spin7lab::Status;

const SEED: u64 = 20261015;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    let within = budget.is_none_or(|b| elapsed < b);
    let budget_text = budget.map(|b| format!(" (budget {:.1} s)", b.as_secs_f64())).unwrap_or_default();
    verdict(v.passed && within, format!("{}; {:.3} s{}", v.detail, elapsed.as_secs_f64(), budget_text))
}

fn secs(s: f64) -> Option<Duration> {
    Some(Duration::from_secs_f64(s))
}

fn exact_form_identities() -> Verdict {
    timed(secs(1.0), || {
        let r = psi_identities_report();
        verdict(r.passed(), format!("*Psi = Psi, <Psi,Psi> = {}, Psi^Psi = {} vol", r.metrics["norm_squared"], r.metrics["wedge_square_coefficient"]))
    })
}

fn tau_audit() -> Verdict {
    timed(secs(1.0), || {
        let r = verify_tau_table();
        let complete = r.metrics["comparisons"] == 448.0;
        let explained = r.status == Status::PassUpToConvention && r.convention.is_some()
            || r.status == Status::Pass
            || r.discrepancies.len() as f64 == r.metrics["mismatches"];
        verdict(
            complete && explained,
            format!(
                "448 comparisons, {} agree, {} sign-flipped; status {:?}; convention: {}",
                r.metrics["agreeing"],
                r.metrics["sign_flipped"],
                r.status,
                r.convention.clone().unwrap_or_else(|| "none".into())
            ),
        )
    })
}

fn eta_pipeline() -> Verdict {
    timed(secs(10.0), || {
        let printed = verify_eta_identity(&build_eta_table(), 10_000, SEED);
        let both_phases = printed.metrics.contains_key("basis_failures") && printed.trials == 10_000;
        let detectors = eta_detector_report(10_000, SEED);
        verdict(
            both_phases && detectors.passed(),
            format!(
                "printed table verdict {:?} (basis failures {}, random failures {}, max |defect| {:.1e}); detectors: {}",
                printed.status,
                printed.metrics["basis_failures"],
                printed.metrics["random_failures"],
                printed.residual.max,
                detectors.notes.join(", ")
            ),
        )
    })
}

fn lemma_suite() -> Verdict {
    timed(None, || {
        let sweep = lemma_sweep_report(1000, SEED);
        let perturbed = perturbation_report(SEED);
        verdict(
            sweep.passed() && perturbed.passed(),
            format!(
                "1000 frames, worst (a) {:.1e} (b) {:.1e} (c) {:.1e}; perturbed (b) residual {:.3e} for tilt 1e-3",
                sweep.metrics["max_lemma_a"],
                sweep.metrics["max_lemma_b"],
                sweep.metrics["max_lemma_c"],
                perturbed.metrics["lemma_b"]
            ),
        )
    })
}

fn frame_expansion() -> Verdict {
    timed(None, || {
        let r = expansion_report(100, SEED);
        verdict(
            r.passed(),
            format!(
                "|RHS - Psi| = {:.12} on 100 frames, variation {:.1e}; max coefficient ranges {:.3}..{:.3}",
                r.metrics["defect_norm"],
                r.metrics["defect_norm_variation"],
                r.metrics["max_coefficient_min"],
                r.metrics["max_coefficient_max"]
            ),
        )
    })
}

fn embedding_remarks() -> Verdict {
    timed(None, || {
        let sl = sl_report(1000, SEED);
        let hl = hl3_report(1000, SEED);
        verdict(
            sl.passed() && hl.passed(),
            format!(
                "SL max |Psi_CY| = {:.1e}, lifted HL max |Psi| = {:.1e}",
                sl.metrics["max_psi_cy_restricted"], hl.metrics["max_psi_restricted"]
            ),
        )
    })
}

fn t_values() -> Vec<f64> {
    geometric_sequence(0.1, 0.5, 7)
}

fn deformation_linearization() -> Verdict {
    timed(secs(60.0), || {
        let spec = EmbeddingSpec::default();
        let grid = PeriodicGrid4::new(16).expect("grid");
        let mut orders = Vec::new();
        let mut ok = true;
        for i in 0..5 {
            let raw = TrigVectorField::random(2, 2, 0.5, trial_seed(SEED, i));
            let field = NormalField::project(&spec, grid, |t| raw.eval(&t)).expect("normal field");
            let study = convergence_study(&spec, &field, &t_values(), Stencil::Central).expect("study");
            let o = study.richardson_order.unwrap_or(f64::NAN);
            ok &= (CONVERGENCE_BAND.0..=CONVERGENCE_BAND.1).contains(&o);
            orders.push(format!("{o:.3}"));
        }
        verdict(ok, format!("n = 16, Richardson orders [{}]", orders.join(", ")))
    })
}

fn kernel_correspondence() -> Verdict {
    timed(None, || {
        let spec = EmbeddingSpec::default();
        let grid = PeriodicGrid4::new(16).expect("grid");
        let t = t_values();
        let mut kernel = Vec::new();
        let mut ok = true;
        for i in 0..5 {
            let s = trial_seed(SEED ^ 1, i);
            let beta = TrigForm::random(2, 2, 2, 0.1, s);
            let mut rng = trial_rng(s, 1);
            let harmonic: [f64; 4] = std::array::from_fn(|_| 0.2 * spin7lab::rng::gaussian(&mut rng));
            let p = kernel_probe(&spec, grid, &beta, harmonic, &t).expect("kernel probe");
            let o = p.fitted_order.unwrap_or(f64::INFINITY);
            ok &= o >= KERNEL_ORDER_MIN && p.passed;
            kernel.push(format!("{o:.3}"));
        }
        let mut controls = Vec::new();
        let mut targets = vec![standard_control_target(grid).expect("control")];
        for i in 0..2 {
            targets.push(TrigForm::random(3, 2, 2, 0.2, trial_seed(SEED ^ 2, i)).sample(grid).expect("sample"));
        }
        for omega in &targets {
            let p = probe_target(&spec, omega, &t, ProbeExpectation::Obstructed).expect("control probe");
            let o = p.fitted_order.unwrap_or(f64::NAN);
            ok &= (CONTROL_BAND.0..=CONTROL_BAND.1).contains(&o);
            controls.push(format!("{o:.3}"));
        }
        let constant = closed_target(grid, &TrigForm::zero(2), [1.0, 0.0, 0.0, 0.0]).expect("constant");
        let flat = probe_target(&spec, &constant, &t, ProbeExpectation::Kernel).expect("constant probe");
        let worst = flat.values.iter().copied().fold(0.0, f64::max);
        ok &= worst <= 1e-12;
        verdict(
            ok,
            format!("kernel orders [{}], control orders [{}], constant normal max |F| = {worst:.1e}", kernel.join(", "), controls.join(", ")),
        )
    })
}

fn pointwise_isomorphism() -> Verdict {
    timed(None, || {
        let r = normal_map_report(1000, SEED);
        verdict(
            r.passed(),
            format!(
                "standard |det M| = {}, min |det M| over 1000 L-planes = {:.15}",
                r.metrics["standard_abs_det"], r.metrics["min_abs_det"]
            ),
        )
    })
}

fn align_round_trip() -> Verdict {
    timed(None, || {
        let psi = build_psi();
        let start = Instant::now();
        let identity = align_bases(&psi, &psi, 1_000_000).map();
        let identity_time = start.elapsed();
        let sigma = SignedPermutation::random(&mut trial_rng(SEED, 0));
        let moved = sigma.apply(&psi);
        let start = Instant::now();
        let found = align_bases(&moved, &psi, 10_000_000).map();
        let planted_time = start.elapsed();
        let ok = identity.is_some_and(|m| m.apply(&psi) == psi)
            && found.is_some_and(|m| m.apply(&moved) == psi)
            && identity_time < Duration::from_millis(100)
            && planted_time < Duration::from_secs(5);
        verdict(
            ok,
            format!("identity in {:.4} s, planted {sigma} recovered in {:.4} s", identity_time.as_secs_f64(), planted_time.as_secs_f64()),
        )
    })
}

fn run_binary(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_spin7lab")).args(args).output().expect("run spin7lab");
    out.stdout
}

fn determinism() -> Verdict {
    timed(None, || {
        let dir = tempfile::tempdir().expect("tempdir");
        let config = dir.path().join("small.toml");
        std::fs::write(
            &config,
            "seed = 3\n[grid]\nn = 8\n[t_sequence]\nstart = 0.1\nratio = 0.5\ncount = 5\n\
             [convergence]\nprobes = 2\namplitude = 0.5\n[kernel]\nprobes = 2\namplitude = 0.1\n\
             [control]\nprobes = 1\namplitude = 0.2\n",
        )
        .expect("write config");
        let config = config.to_str().expect("utf-8 path");
        let verify = ["verify", "all", "--seed", "11", "--trials", "200", "--no-timestamps"];
        let deform = ["deform", config, "--no-timestamps"];
        let (a, b) = (run_binary(&verify), run_binary(&verify));
        let (c, d) = (run_binary(&deform), run_binary(&deform));
        let ok = !a.is_empty() && a == b && !c.is_empty() && c == d;
        verdict(ok, format!("verify all: {} bytes x2 identical = {}; deform: {} bytes x2 identical = {}", a.len(), a == b, c.len(), c == d))
    })
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("exact form identities", exact_form_identities),
        ("tau table audit", tau_audit),
        ("eta pipeline", eta_pipeline),
        ("lemma suite", lemma_suite),
        ("frame expansion", frame_expansion),
        ("embedding remarks", embedding_remarks),
        ("deformation linearization", deformation_linearization),
        ("kernel and closed 3-forms", kernel_correspondence),
        ("pointwise isomorphism", pointwise_isomorphism),
        ("alignment round trip", align_round_trip),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let mark = if v.passed { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {mark} {name}: {}", i + 1, v.detail);
        if !v.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
