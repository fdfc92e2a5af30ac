//! TOML run configuration. Frequencies are written in MHz (the library works
//! in rad/μs) and fidelity measures by name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DecayConstants, IntegratorOptions};
use crate::error::{Error, Result};
use crate::metrics::FidelityMeasure;
use crate::noise::{
    DistributionKind, DistributionSpec, DopplerForm, MonteCarloOptions, NoiseModel, PhysicalNoiseConfig,
};
use crate::optimize::{CostKind, CostSpec, GaOptions, ParetoOptions, WeightProfile};
use crate::pulses::{mhz, Preset, PulseParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    /// A preset name or `custom`.
    pub preset: String,
    /// Timing for `custom` (μs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self { preset: Preset::Der.name().into(), t1: None, t2: None, width: None }
    }
}

impl PulseConfig {
    pub fn timing(&self) -> Result<[f64; 3]> {
        let given = [self.t1, self.t2, self.width];
        if self.preset == "custom" {
            match given {
                [Some(a), Some(b), Some(c)] => Ok([a, b, c]),
                _ => Err(Error::Config("custom pulse needs t1, t2 and width".into())),
            }
        } else {
            let p = Preset::parse(&self.preset)
                .ok_or_else(|| Error::Config(format!("unknown preset '{}'", self.preset)))?;
            if given.iter().any(Option::is_some) {
                return Err(Error::Config(format!("preset '{}' does not take explicit timing", self.preset)));
            }
            Ok(p.timing())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub omega_p_max_mhz: f64,
    pub omega_c_max_mhz: f64,
    pub delta0_mhz: f64,
    pub blockade_mhz: f64,
    /// Spontaneous decay for `simulate` and `montecarlo`.
    pub decays: bool,
    pub decay: DecayConstants,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            omega_p_max_mhz: 150.0,
            omega_c_max_mhz: 150.0,
            delta0_mhz: 2000.0,
            blockade_mhz: 2000.0,
            decays: false,
            decay: DecayConstants::rubidium(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    pub kind: DistributionKind,
    pub half_width_mhz: f64,
    #[serde(default = "half")]
    pub sigma_fraction: f64,
}

fn half() -> f64 {
    0.5
}

impl DistributionConfig {
    fn spec(&self) -> DistributionSpec {
        DistributionSpec { kind: self.kind, half_width: mhz(self.half_width_mhz), sigma_fraction: self.sigma_fraction }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_delta: Option<DistributionConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_big_delta: Option<DistributionConfig>,
    pub doppler_mk: f64,
    pub doppler_form: DopplerForm,
    pub amplitude: f64,
    pub position_mk: f64,
    pub gamma_z_khz: f64,
    pub interaction_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalNoiseConfig>,
}

impl NoiseConfig {
    pub fn model(&self) -> NoiseModel {
        NoiseModel {
            eps_delta: self.eps_delta.map(|d| d.spec()),
            eps_big_delta: self.eps_big_delta.map(|d| d.spec()),
            doppler_mk: self.doppler_mk,
            doppler_form: self.doppler_form,
            amplitude: self.amplitude,
            position_mk: self.position_mk,
            gamma_z: mhz(self.gamma_z_khz * 1e-3),
            interaction_fraction: self.interaction_fraction,
            physical: self.physical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
    pub measure: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<String>,
    /// Paper-scale sample counts and grids.
    pub paper_scale: bool,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            samples: 50,
            seed: 1,
            measure: FidelityMeasure::default().name(),
            secondary: Some("phase_root".into()),
            paper_scale: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostConfig {
    pub kind: CostKind,
    pub eps0_mhz: f64,
    pub grid: usize,
    pub weights: WeightProfile,
    pub ideal_measure: String,
    pub robust_measure: String,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        let s = CostSpec::default();
        Self {
            kind: s.kind,
            eps0_mhz: 0.8,
            grid: s.grid,
            weights: s.weights,
            ideal_measure: s.ideal_measure.name(),
            robust_measure: s.robust_measure.name(),
            rel_tol: s.integrator.rel_tol,
            abs_tol: s.integrator.abs_tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub from_mhz: f64,
    pub to_mhz: f64,
    pub points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { from_mhz: -1.0, to_mhz: 1.0, points: 21 }
    }
}

impl ScanConfig {
    /// Evenly spaced grid in rad/μs.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points.max(1);
        (0..n)
            .map(|k| {
                let f = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                mhz(self.from_mhz + (self.to_mhz - self.from_mhz) * f)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Complete input of one invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub pulse: PulseConfig,
    pub physics: PhysicsConfig,
    pub noise: NoiseConfig,
    pub sampling: SamplingConfig,
    pub integrator: IntegratorOptions,
    pub scan: ScanConfig,
    pub cost: CostConfig,
    pub ga: GaOptions,
    pub pareto: ParetoOptions,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    /// Desk-scale budgets; see [`RunConfig::apply_paper_scale`].
    fn default() -> Self {
        Self {
            pulse: PulseConfig::default(),
            physics: PhysicsConfig::default(),
            noise: NoiseConfig::default(),
            sampling: SamplingConfig::default(),
            integrator: IntegratorOptions::default(),
            scan: ScanConfig::default(),
            cost: CostConfig::default(),
            ga: GaOptions { population: 32, generations: 30, ..GaOptions::default() },
            pareto: ParetoOptions { population: 32, generations: 20, ..ParetoOptions::default() },
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.pulse_params().map_err(wrap)?;
        self.physics.decay.validate().map_err(wrap)?;
        self.noise.model().validate().map_err(wrap)?;
        self.monte_carlo().map_err(wrap)?;
        self.integrator.validate().map_err(wrap)?;
        self.cost_spec().and_then(|c| c.validate()).map_err(wrap)?;
        self.ga.validate().map_err(wrap)?;
        self.pareto.bounds.validate().map_err(wrap)?;
        if self.sampling.samples == 0 {
            return Err(Error::Config("sampling.samples must be >= 1".into()));
        }
        if self.scan.points == 0 || !(self.scan.from_mhz.is_finite() && self.scan.to_mhz.is_finite()) {
            return Err(Error::Config("scan needs >= 1 point and a finite range".into()));
        }
        Ok(())
    }

    pub fn pulse_params(&self) -> Result<PulseParams> {
        let [t1, t2, width] = self.pulse.timing()?;
        let p = PulseParams {
            t1,
            t2,
            width,
            omega_p_max: mhz(self.physics.omega_p_max_mhz),
            omega_c_max: mhz(self.physics.omega_c_max_mhz),
            delta0: mhz(self.physics.delta0_mhz),
            blockade: mhz(self.physics.blockade_mhz),
        };
        p.validate()?;
        Ok(p)
    }

    /// Pulse with the configured physics and a preset's timing.
    pub fn with_preset(&self, preset: Preset) -> PulseParams {
        let [t1, t2, width] = preset.timing();
        PulseParams { t1, t2, width, ..self.pulse_params().unwrap_or_else(|_| preset.params()) }
    }

    pub fn decay(&self) -> DecayConstants {
        if self.physics.decays {
            self.physics.decay
        } else {
            DecayConstants::none()
        }
    }

    pub fn monte_carlo(&self) -> Result<MonteCarloOptions> {
        Ok(MonteCarloOptions {
            samples: self.sampling.samples,
            seed: self.sampling.seed,
            measure: FidelityMeasure::parse(&self.sampling.measure)?,
            secondary: self.sampling.secondary.as_deref().map(FidelityMeasure::parse).transpose()?,
        })
    }

    pub fn cost_spec(&self) -> Result<CostSpec> {
        let c = &self.cost;
        Ok(CostSpec {
            kind: c.kind,
            eps0: mhz(c.eps0_mhz),
            grid: c.grid,
            weights: c.weights,
            ideal_measure: FidelityMeasure::parse(&c.ideal_measure)?,
            robust_measure: FidelityMeasure::parse(&c.robust_measure)?,
            integrator: IntegratorOptions { rel_tol: c.rel_tol, abs_tol: c.abs_tol, ..self.integrator },
        })
    }

    /// Applies a seed to every stochastic stage.
    pub fn set_seed(&mut self, seed: u64) {
        self.sampling.seed = seed;
        self.ga.seed = seed;
        self.pareto.seed = seed;
    }

    /// Sets a preset by name, clearing custom timing.
    pub fn set_preset(&mut self, name: &str) {
        self.pulse = PulseConfig { preset: name.to_string(), ..PulseConfig::default() };
    }

    /// Paper-size budgets: 500 samples, 20-point Pareto fronts, longer searches.
    pub fn apply_paper_scale(&mut self) {
        self.sampling.paper_scale = true;
        self.sampling.samples = 500;
        self.ga.population = self.ga.population.max(100);
        self.ga.generations = self.ga.generations.max(100);
        self.pareto.population = self.pareto.population.max(100);
        self.pareto.generations = self.pareto.generations.max(80);
    }
}
