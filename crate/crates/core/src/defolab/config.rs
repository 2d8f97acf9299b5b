//! The TOML experiment file and the batch runner behind it.
//!
//! ```toml
//! seed = 7
//!
//! [grid]
//! n = 16
//!
//! [embedding]                  # optional, defaults to the flat L-torus
//! winding = [[1,0,0,0], [0,1,0,0], [0,0,0,0], [0,0,0,0],
//!            [0,0,1,0], [0,0,0,0], [0,0,0,1], [0,0,0,0]]
//! [[embedding.fourier]]
//! coordinate = 3               # 1-based target coordinate
//! frequency = [1, 0, 0, 0]     # entries in [-2, 2]
//! cos = 0.05                   # amplitudes at most 0.2
//! sin = 0.0
//!
//! [t_sequence]
//! start = 0.1
//! ratio = 0.5
//! count = 7
//!
//! [convergence]
//! probes = 5                   # random normal fields
//! terms = 2                    # Fourier terms per component
//! amplitude = 0.5
//!
//! [kernel]
//! probes = 5                   # random exact targets d_h(beta)
//! terms = 2
//! amplitude = 0.1
//! harmonic = [[1.0, 0.0, 0.0, 0.0]]
//!
//! [control]
//! probes = 2                   # random trig 3-forms, plus sin(θ1) dθ^{234}
//! terms = 2
//! amplitude = 0.2
//!
//! [refinement]
//! sizes = [8, 16, 32]
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embedding::{EmbeddingSpec, FourierTerm, NormalField};
use super::grid::{PeriodicGrid4, Stencil};
use super::study::{
    convergence_study, geometric_sequence, kernel_probe, probe_target, refinement_study, standard_control_target,
    ConvergenceStudy, KernelProbe, ProbeExpectation, RefinementStudy,
};
use super::trig::{TrigForm, TrigTerm, TrigVectorField};
use crate::rng::trial_seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub winding: Option<[[i64; 4]; 8]>,
    #[serde(default)]
    pub fourier: Vec<FourierTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TSection {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub probes: usize,
    #[serde(default = "default_terms")]
    pub terms: usize,
    pub amplitude: f64,
    #[serde(default)]
    pub harmonic: Vec<[f64; 4]>,
}

fn default_terms() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementSection {
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformConfig {
    pub seed: u64,
    pub grid: GridSection,
    pub embedding: Option<EmbeddingSection>,
    pub t_sequence: TSection,
    pub convergence: ProbeSection,
    pub kernel: ProbeSection,
    pub control: ProbeSection,
    pub refinement: Option<RefinementSection>,
}

impl Default for DeformConfig {
    fn default() -> Self {
        DeformConfig {
            seed: 7,
            grid: GridSection { n: 16 },
            embedding: None,
            t_sequence: TSection { start: 0.1, ratio: 0.5, count: 7 },
            convergence: ProbeSection { probes: 5, terms: 2, amplitude: 0.5, harmonic: vec![] },
            kernel: ProbeSection { probes: 5, terms: 2, amplitude: 0.1, harmonic: vec![[1.0, 0.0, 0.0, 0.0]] },
            control: ProbeSection { probes: 2, terms: 2, amplitude: 0.2, harmonic: vec![] },
            refinement: Some(RefinementSection { sizes: vec![8, 16, 32] }),
        }
    }
}

impl DeformConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: DeformConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        PeriodicGrid4::new(self.grid.n)?;
        self.spec()?;
        let t = &self.t_sequence;
        if !(t.start > 0.0 && t.start.is_finite()) || !(t.ratio > 0.0 && t.ratio < 1.0) || t.count < 2 {
            return Err(Error::Config("t_sequence needs start > 0, 0 < ratio < 1 and count >= 2".into()));
        }
        for (name, s) in [("convergence", &self.convergence), ("kernel", &self.kernel), ("control", &self.control)] {
            if !(s.amplitude >= 0.0 && s.amplitude.is_finite()) {
                return Err(Error::Config(format!("{name}.amplitude must be a nonnegative number")));
            }
            if s.harmonic.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        if let Some(r) = &self.refinement {
            for &n in &r.sizes {
                PeriodicGrid4::new(n)?;
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<EmbeddingSpec> {
        match &self.embedding {
            None => Ok(EmbeddingSpec::default()),
            Some(e) => EmbeddingSpec::new(e.winding.unwrap_or(*EmbeddingSpec::default().winding()), e.fourier.clone()),
        }
    }

    pub fn t_values(&self) -> Vec<f64> {
        geometric_sequence(self.t_sequence.start, self.t_sequence.ratio, self.t_sequence.count)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledConvergence {
    pub probe_seed: u64,
    pub study: ConvergenceStudy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledProbe {
    pub label: String,
    pub probe: KernelProbe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformRun {
    pub seed: u64,
    pub grid_n: usize,
    pub t: Vec<f64>,
    pub convergence: Vec<LabeledConvergence>,
    pub kernel: Vec<LabeledProbe>,
    pub control: Vec<LabeledProbe>,
    pub refinement: Option<RefinementStudy>,
    pub passed: bool,
}

/// Runs every batch described by the configuration.
pub fn run_deform(config: &DeformConfig) -> Result<DeformRun> {
    config.validate()?;
    let grid = PeriodicGrid4::new(config.grid.n)?;
    let spec = config.spec()?;
    let t = config.t_values();
    let seed = config.seed;

    let conv = &config.convergence;
    let convergence: Result<Vec<LabeledConvergence>> = (0..conv.probes)
        .into_par_iter()
        .map(|i| {
            let probe_seed = trial_seed(seed, i as u64);
            let raw = TrigVectorField::random(conv.terms, 2, conv.amplitude, probe_seed);
            let field = NormalField::project(&spec, grid, |th| raw.eval(&th))?;
            Ok(LabeledConvergence { probe_seed, study: convergence_study(&spec, &field, &t, Stencil::Central)? })
        })
        .collect();

    let k = &config.kernel;
    let mut kernel_jobs: Vec<(String, TrigForm, [f64; 4])> = (0..k.probes)
        .map(|i| {
            let s = trial_seed(seed ^ 0x6b65_726e, i as u64);
            (format!("exact seed={s}"), TrigForm::random(2, k.terms, 2, k.amplitude, s), [0.0; 4])
        })
        .collect();
    for h in &k.harmonic {
        kernel_jobs.push((format!("harmonic {h:?}"), TrigForm::zero(2), *h));
    }
    let kernel: Result<Vec<LabeledProbe>> = kernel_jobs
        .into_par_iter()
        .map(|(label, beta, h)| Ok(LabeledProbe { label, probe: kernel_probe(&spec, grid, &beta, h, &t)? }))
        .collect();

    let c = &config.control;
    let mut control_jobs = vec![("sin(theta1) dtheta^234".to_string(), standard_control_target(grid)?)];
    for i in 0..c.probes {
        let s = trial_seed(seed ^ 0x636f_6e74, i as u64);
        control_jobs.push((format!("random seed={s}"), TrigForm::random(3, c.terms, 2, c.amplitude, s).sample(grid)?));
    }
    let control: Result<Vec<LabeledProbe>> = control_jobs
        .into_par_iter()
        .map(|(label, omega)| {
            Ok(LabeledProbe { label, probe: probe_target(&spec, &omega, &t, ProbeExpectation::Obstructed)? })
        })
        .collect();

    let refinement = match &config.refinement {
        Some(r) if !r.sizes.is_empty() => {
            let mut beta = TrigForm::zero(2);
            beta.components[5].terms.push(TrigTerm { frequency: [1, 2, 0, 0], cos_amp: 0.0, sin_amp: 1.0 });
            Some(refinement_study(&beta, &r.sizes)?)
        }
        _ => None,
    };

    let (convergence, kernel, control) = (convergence?, kernel?, control?);
    let passed = convergence.iter().all(|c| c.study.passed)
        && kernel.iter().all(|p| p.probe.passed)
        && control.iter().all(|p| p.probe.passed)
        && refinement.as_ref().is_none_or(|r| r.passed);
    Ok(DeformRun { seed, grid_n: grid.n(), t, convergence, kernel, control, refinement, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_example_parses() {
        let doc = include_str!("config.rs");
        let example: String = doc
            .lines()
            .skip_while(|l| !l.starts_with("//! ```toml"))
            .skip(1)
            .take_while(|l| !l.starts_with("//! ```"))
            .map(|l| l.trim_start_matches("//!").trim_start())
            .collect::<Vec<_>>()
            .join("\n");
        let c = DeformConfig::parse(&example).unwrap();
        assert_eq!(c.grid.n, 16);
        assert_eq!(c.spec().unwrap().fourier_terms().len(), 1);
        assert_eq!(c.t_values().len(), 7);
    }

    #[test]
    fn schema_violations() {
        let base = toml::to_string(&DeformConfig::default()).unwrap();
        assert!(DeformConfig::parse(&base).is_ok());
        assert!(DeformConfig::parse(&base.replace("n = 16", "n = 7")).is_err());
        assert!(DeformConfig::parse(&format!("bogus = 1\n{base}")).is_err());
        let loud = format!(
            "{base}\n[embedding]\n[[embedding.fourier]]\ncoordinate = 3\nfrequency = [1,0,0,0]\ncos = 0.5\n"
        );
        assert!(matches!(DeformConfig::parse(&loud), Err(Error::Config(_))));
    }

    #[test]
    fn small_run_passes() {
        let mut c = DeformConfig::default();
        c.grid.n = 8;
        c.convergence.probes = 1;
        c.kernel.probes = 1;
        c.control.probes = 1;
        c.refinement = None;
        let run = run_deform(&c).unwrap();
        assert!(run.passed, "{run:#?}");
        assert_eq!(run.kernel.len(), 2);
        assert_eq!(run.control.len(), 2);
    }
}
