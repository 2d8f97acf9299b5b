use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use spin7lab::defolab::{run_deform, DeformConfig, DeformRun};
use spin7lab::exterior::{parse_form, write_form, KForm, Rational, Vec8};
use spin7lab::planes::{
    build_l_frame, classify, parse_plane_text, psi_expansion_defect, verify_lemma, LFrame, Plane, ZChoice,
    CLASSIFY_TOLERANCE, MIN_GRAM_VOLUME,
};
use spin7lab::spin7forms::{align_bases, AlignOutcome};
use spin7lab::suites::{aggregate_status, run_suite, Suite, SuiteOptions};
use spin7lab::Status;

use crate::manifest::{Document, Exit, RunManifest};
use crate::{Cli, Command};

const DEFAULT_SEED: u64 = 1;

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<Exit, UsageError>;

pub fn run(cli: &Cli) -> Exit {
    let result = match &cli.command {
        Command::Verify { suite, fixture } => verify(cli, suite, fixture),
        Command::Classify { file } => classify_file(cli, file),
        Command::Frame { file, emit_fixture } => frame(cli, file, emit_fixture.as_deref()),
        Command::Deform { config, csv } => deform(cli, config, csv.as_deref()),
        Command::Align { a, b, budget } => align(cli, a, b, *budget),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("spin7lab: {msg}");
            Exit::Usage
        }
    }
}

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(cli: &Cli, manifest: RunManifest, result: T) -> Result<(), UsageError> {
    let doc = Document { manifest, result };
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    if let Some(path) = &cli.report {
        fs::write(path, &text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

fn exit_for(status: Status) -> Exit {
    if status.is_pass() {
        Exit::Pass
    } else {
        Exit::Discrepancy
    }
}

fn verify(cli: &Cli, suite: &str, fixtures: &[PathBuf]) -> Outcome {
    let suite: Suite = suite.parse()?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mut manifest = RunManifest::start(&format!("verify {suite:?}").to_lowercase(), None, Some(seed), !cli.no_timestamps);
    let fixtures = fixtures.iter().map(|p| load_fixture(p)).collect::<Result<Vec<_>, _>>()?;
    let options = SuiteOptions { seed, trials: cli.trials, fixtures };
    let reports = run_suite(suite, &options);
    let status = aggregate_status(&reports);
    manifest.finish(status);
    emit(cli, manifest, reports)?;
    Ok(exit_for(status))
}

fn load_fixture(path: &Path) -> Result<LFrame, UsageError> {
    let rows = parse_plane_text(&read(path)?)?;
    let [u, v, w, z, r_uvw, r_uvz, r_uwz, r_vwz]: [Vec8; 8] = rows
        .try_into()
        .map_err(|r: Vec<Vec8>| UsageError(format!("{}: expected 8 rows, found {}", path.display(), r.len())))?;
    Ok(LFrame { u, v, w, z, r_uvw, r_uvz, r_uwz, r_vwz })
}

fn classify_file(cli: &Cli, file: &Path) -> Outcome {
    let rows = parse_plane_text(&read(file)?)?;
    if rows.len() != 4 {
        return Err(UsageError(format!("{}: expected 4 rows, found {}", file.display(), rows.len())));
    }
    let plane = Plane::new(rows)?;
    let class = classify(&plane)?;
    let mut manifest = RunManifest::start("classify", Some(file.display().to_string()), None, !cli.no_timestamps);
    manifest.finish(Status::Pass);
    let result = json!({
        "label": class.label,
        "value": class.value,
        "orientation_reversed": class.orientation_reversed,
        "gram_volume": plane.gram_volume(),
        "tolerances": { "classify": CLASSIFY_TOLERANCE, "min_gram_volume": MIN_GRAM_VOLUME },
    });
    emit(cli, manifest, result)?;
    Ok(Exit::Pass)
}

fn frame(cli: &Cli, file: &Path, fixture_out: Option<&Path>) -> Outcome {
    let rows = parse_plane_text(&read(file)?)?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let z = match rows.len() {
        3 => ZChoice::Seed(seed),
        4 => ZChoice::Given(rows[3].clone()),
        n => return Err(UsageError(format!("{}: expected 3 or 4 rows, found {n}", file.display()))),
    };
    let frame = build_l_frame(&rows[0], &rows[1], &rows[2], z)?;
    let lemma = verify_lemma(&frame);
    let expansion = psi_expansion_defect(&frame).ok();
    if let Some(path) = fixture_out {
        let text: String = frame
            .vectors()
            .iter()
            .map(|v| v.0.iter().map(|c| format!("{c:e}")).collect::<Vec<_>>().join(" ") + "\n")
            .collect();
        fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    let mut manifest = RunManifest::start("frame", Some(file.display().to_string()), Some(seed), !cli.no_timestamps);
    let status = lemma.status;
    manifest.finish(status);
    let names = ["u", "v", "w", "z", "r_uvw", "r_uvz", "r_uwz", "r_vwz"];
    let vectors: serde_json::Map<String, serde_json::Value> =
        names.iter().zip(frame.vectors()).map(|(n, v)| (n.to_string(), json!(v.0))).collect();
    emit(cli, manifest, json!({ "frame": vectors, "lemma": lemma, "expansion_defect": expansion }))?;
    Ok(exit_for(status))
}

fn deform(cli: &Cli, path: &Path, csv_out: Option<&Path>) -> Outcome {
    let mut config = DeformConfig::parse(&read(path)?)?;
    if let Some(n) = cli.grid_n {
        config.grid.n = n;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    let mut manifest =
        RunManifest::start("deform", Some(path.display().to_string()), Some(config.seed), !cli.no_timestamps);
    let run = run_deform(&config)?;
    if let Some(out) = csv_out {
        write_csv(&run, out)?;
    }
    let status = if run.passed { Status::Pass } else { Status::Fail };
    manifest.finish(status);
    emit(cli, manifest, json!({ "config": config, "run": run }))?;
    Ok(exit_for(status))
}

fn write_csv(run: &DeformRun, path: &Path) -> Result<(), UsageError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["study", "probe", "t", "value", "richardson"])?;
    for c in &run.convergence {
        for (k, t) in c.study.t.iter().enumerate() {
            w.write_record([
                "convergence".to_string(),
                c.probe_seed.to_string(),
                t.to_string(),
                c.study.plain_errors[k].to_string(),
                c.study.richardson_errors[k].to_string(),
            ])?;
        }
    }
    for (name, probes) in [("kernel", &run.kernel), ("control", &run.control)] {
        for p in probes {
            for (t, v) in p.probe.t.iter().zip(&p.probe.values) {
                w.write_record([name.to_string(), p.label.clone(), t.to_string(), v.to_string(), String::new()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn align(cli: &Cli, a: &Path, b: &Path, budget: u64) -> Outcome {
    let load = |p: &Path| -> Result<KForm<Rational>, UsageError> {
        let form = parse_form::<Rational>(&read(p)?).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
        if form.degree() != 4 {
            return Err(UsageError(format!("{}: expected a 4-form, found degree {}", p.display(), form.degree())));
        }
        Ok(form)
    };
    let (fa, fb) = (load(a)?, load(b)?);
    let outcome = align_bases(&fa, &fb, budget);
    let mut manifest =
        RunManifest::start("align", Some(format!("{} {}", a.display(), b.display())), None, !cli.no_timestamps);
    let (status, result) = match outcome {
        AlignOutcome::Found { map, explored } => (
            Status::Pass,
            json!({
                "found": true,
                "map": map.to_string(),
                "perm": map.perm,
                "signs": map.signs,
                "explored": explored,
                "image": write_form(&map.apply(&fa)),
            }),
        ),
        AlignOutcome::NotFound { explored } => (
            Status::Fail,
            json!({
                "found": false,
                "explored": explored,
                "note": "no signed permutation found within the budget; this does not prove the forms inequivalent",
            }),
        ),
    };
    manifest.finish(status);
    emit(cli, manifest, result)?;
    Ok(exit_for(status))
}
