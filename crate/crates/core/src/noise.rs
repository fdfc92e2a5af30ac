//! Stochastic error models and the Monte-Carlo averaging harness.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{AtomPlacement, DecayConstants, ErrorSample, IntegratorOptions};
use crate::error::{Error, Result};
use crate::metrics::{gate_fidelity, FidelityMeasure};
use crate::pulses::{omega_c, omega_p, Beam, PulseParams};

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380649e-23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    /// Normal law truncated to `[-ε, ε]`.
    Gaussian,
    Uniform,
    /// Arcsine law on `[-ε, ε]`.
    Ushaped,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] =
        [DistributionKind::Gaussian, DistributionKind::Uniform, DistributionKind::Ushaped];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Gaussian => "gaussian",
            DistributionKind::Uniform => "uniform",
            DistributionKind::Ushaped => "ushaped",
        }
    }

    /// Probability density on `[-1, 1]` (unit half-width), for plotting profiles.
    pub fn density(self, x: f64, sigma_fraction: f64) -> f64 {
        if x.abs() > 1.0 {
            return 0.0;
        }
        match self {
            DistributionKind::Uniform => 0.5,
            DistributionKind::Ushaped => {
                if x.abs() == 1.0 {
                    f64::INFINITY
                } else {
                    1.0 / (PI * (1.0 - x * x).sqrt())
                }
            }
            DistributionKind::Gaussian => {
                let s = sigma_fraction;
                let norm = erf(1.0 / (s * std::f64::consts::SQRT_2));
                (-0.5 * (x / s).powi(2)).exp() / (s * (TAU).sqrt() * norm)
            }
        }
    }
}

// Abramowitz–Stegun 7.1.26; only used to normalize the plotted Gaussian profile.
fn erf(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.3275911 * x.abs());
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t + 0.254829592)
            * t
            * (-x * x).exp();
    y.copysign(x)
}

/// A symmetric bounded error law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    /// Half-width ε of the support.
    pub half_width: f64,
    /// σ/ε for the Gaussian law.
    #[serde(default = "default_sigma_fraction")]
    pub sigma_fraction: f64,
}

fn default_sigma_fraction() -> f64 {
    0.5
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, half_width: f64) -> Self {
        Self { kind, half_width, sigma_fraction: default_sigma_fraction() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half width {} must be finite and >= 0", self.half_width)));
        }
        if self.sigma_fraction.is_nan() || self.sigma_fraction <= 0.0 {
            return Err(Error::InvalidParameter("sigma fraction must be > 0".into()));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e = self.half_width;
        if e == 0.0 {
            return 0.0;
        }
        match self.kind {
            DistributionKind::Uniform => rng.gen_range(-e..=e),
            DistributionKind::Ushaped => e * (PI * (rng.gen::<f64>() - 0.5)).sin(),
            DistributionKind::Gaussian => {
                let n = Normal::new(0.0, self.sigma_fraction * e).expect("positive sigma");
                loop {
                    let x = n.sample(rng);
                    if x.abs() <= e {
                        return x;
                    }
                }
            }
        }
    }
}

/// Physical constants for the thermal, beam and interaction models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalNoiseConfig {
    /// Atomic mass (kg).
    pub mass: f64,
    /// Probe and coupling wavelengths (μm), counterpropagating.
    pub lambda_p: f64,
    pub lambda_c: f64,
    pub probe_beam: Beam,
    pub coupling_beam: Beam,
    /// Trap frequencies (kHz, multiplied by 2π internally).
    pub trap_khz: [f64; 3],
    /// C6 coefficient (GHz·μm⁶).
    pub c6: f64,
    /// Interatomic distance (μm).
    pub r0: f64,
}

impl Default for PhysicalNoiseConfig {
    fn default() -> Self {
        Self {
            mass: 1.44316e-25,
            lambda_p: 0.420,
            lambda_c: 1.013,
            probe_beam: Beam::PROBE,
            coupling_beam: Beam::COUPLING,
            trap_khz: [147.0, 117.0, 35.0],
            c6: 862.69,
            r0: 2.75,
        }
    }
}

impl PhysicalNoiseConfig {
    /// Wavenumbers (1/m).
    pub fn k_p(&self) -> f64 {
        TAU / (self.lambda_p * 1e-6)
    }

    pub fn k_c(&self) -> f64 {
        TAU / (self.lambda_c * 1e-6)
    }

    /// Two-photon wavenumber for counterpropagating beams (1/m).
    pub fn k_eff(&self) -> f64 {
        self.k_p() - self.k_c()
    }

    /// Thermal velocity spread (m/s) at `t_mk` millikelvin.
    pub fn v_rms(&self, t_mk: f64) -> f64 {
        (K_B * t_mk * 1e-3 / self.mass).sqrt()
    }

    /// Thermal position spread `(σx, σy, σz)` in μm.
    pub fn position_sigma(&self, t_mk: f64) -> [f64; 3] {
        let v = self.v_rms(t_mk);
        self.trap_khz.map(|f| v / (TAU * f * 1e3) * 1e6)
    }

    /// `B = C6 / r0⁶` in rad/μs.
    pub fn blockade_from_c6(&self) -> f64 {
        TAU * self.c6 * 1e3 / self.r0.powi(6)
    }

    /// Distance change (nm) that shifts the interaction by `delta_b` (rad/μs): `r0⁷ ΔB / (6 C6)`.
    pub fn delta_r_nm(&self, delta_b: f64) -> f64 {
        let delta_b_ghz = delta_b / TAU * 1e-3;
        self.r0.powi(7) * delta_b_ghz / (6.0 * self.c6) * 1e3
    }
}

fn check_temperature(t_mk: f64) -> Result<()> {
    if !(t_mk >= 0.0 && t_mk.is_finite()) {
        return Err(Error::InvalidParameter(format!("temperature {t_mk} mK must be >= 0")));
    }
    Ok(())
}

/// Doppler shifts of one thermal velocity draw (rad/μs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DopplerShift {
    /// Velocity along the beam axis (m/s).
    pub velocity: f64,
    /// `k_p v`, the intermediate-state shift.
    pub eps_big_delta: f64,
    /// `k_eff v`, the two-photon shift.
    pub eps_delta: f64,
}

impl DopplerShift {
    pub fn from_velocity(v: f64, cfg: &PhysicalNoiseConfig) -> Self {
        Self { velocity: v, eps_big_delta: cfg.k_p() * v * 1e-6, eps_delta: cfg.k_eff() * v * 1e-6 }
    }
}

pub fn sample_doppler<R: Rng + ?Sized>(t_mk: f64, cfg: &PhysicalNoiseConfig, rng: &mut R) -> Result<DopplerShift> {
    check_temperature(t_mk)?;
    let v_rms = cfg.v_rms(t_mk);
    let v = if v_rms == 0.0 { 0.0 } else { Normal::new(0.0, v_rms).expect("finite sigma").sample(rng) };
    Ok(DopplerShift::from_velocity(v, cfg))
}

/// Two-photon detuning error induced by amplitude errors through the ac Stark shift, on `n` points.
/// Returns the `(t, ε_δ(t))` samples and `max |ε_δ|`.
pub fn ac_stark_detuning(eps_p: f64, eps_c: f64, p: &PulseParams, n: usize) -> (Vec<(f64, f64)>, f64) {
    let (a, b) = (p.t_start(), p.t_end());
    let n = n.max(2);
    let curve: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = a + (b - a) * k as f64 / (n - 1) as f64;
            let (wp, wc) = (omega_p(t, p), omega_c(t, p));
            (t, (wp * wp * eps_p - wc * wc * eps_c) / (2.0 * p.delta0))
        })
        .collect();
    let max = curve.iter().map(|(_, e)| e.abs()).fold(0.0, f64::max);
    (curve, max)
}

/// `max_t [(Ωp² + Ωc²) / 2Δ0] · ε_Ω`.
pub fn ac_stark_bound(eps_omega: f64, p: &PulseParams, n: usize) -> f64 {
    let (a, b) = (p.t_start(), p.t_end());
    let n = n.max(2);
    (0..n)
        .map(|k| {
            let t = a + (b - a) * k as f64 / (n - 1) as f64;
            (omega_p(t, p).powi(2) + omega_c(t, p).powi(2)) / (2.0 * p.delta0)
        })
        .fold(0.0, f64::max)
        * eps_omega
}

/// Thermal positions of both atoms and the resulting beam factors.
pub fn sample_positions<R: Rng + ?Sized>(
    t_mk: f64,
    cfg: &PhysicalNoiseConfig,
    rng: &mut R,
) -> Result<[AtomPlacement; 2]> {
    check_temperature(t_mk)?;
    let sigma = cfg.position_sigma(t_mk);
    let mut out = [AtomPlacement::default(); 2];
    for placement in out.iter_mut() {
        let mut pos = [0.0; 3];
        for (x, s) in pos.iter_mut().zip(sigma) {
            if s > 0.0 {
                *x = Normal::new(0.0, s).expect("finite sigma").sample(rng);
            }
        }
        *placement = AtomPlacement {
            position: pos,
            probe_factor: cfg.probe_beam.factor(pos),
            coupling_factor: cfg.coupling_beam.factor(pos),
        };
    }
    Ok(out)
}

/// Independent uniform dephasing rates on `[0, γz]`.
pub fn sample_phase_dephasing<R: Rng + ?Sized>(gamma_z: f64, rng: &mut R) -> Result<(f64, f64)> {
    if gamma_z.is_nan() || gamma_z < 0.0 {
        return Err(Error::InvalidParameter("γz must be >= 0".into()));
    }
    if gamma_z == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok((rng.gen_range(0.0..=gamma_z), rng.gen_range(0.0..=gamma_z)))
}

/// Interaction deviation uniform on `±fraction·B` (rad/μs).
pub fn interaction_deviation<R: Rng + ?Sized>(fraction: f64, blockade: f64, rng: &mut R) -> Result<f64> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("interaction fraction {fraction} outside [0, 1]")));
    }
    let w = fraction * blockade;
    Ok(if w == 0.0 { 0.0 } else { rng.gen_range(-w..=w) })
}

/// How thermal Doppler shifts enter the Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DopplerForm {
    /// Constant level shifts.
    #[default]
    Detuning,
    /// Laser phase ramps `e^{i k v t}`.
    PhaseRamp,
}

/// Applies a Doppler draw to an error sample in the chosen form.
pub fn apply_doppler(e: &mut ErrorSample, d: &DopplerShift, cfg: &PhysicalNoiseConfig, form: DopplerForm) {
    match form {
        DopplerForm::Detuning => {
            e.eps_delta += d.eps_delta;
            e.doppler_intermediate += d.eps_big_delta;
        }
        DopplerForm::PhaseRamp => {
            e.probe_phase_rate += -cfg.k_p() * d.velocity * 1e-6;
            e.coupling_phase_rate += cfg.k_c() * d.velocity * 1e-6;
        }
    }
}

/// Which error channels are active and their bounds. All default to off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    /// Direct two-photon detuning error.
    pub eps_delta: Option<DistributionSpec>,
    /// Static intermediate detuning error, reversed together with Δ0.
    pub eps_big_delta: Option<DistributionSpec>,
    /// Temperature (mK) for Doppler shifts; 0 disables.
    pub doppler_mk: f64,
    pub doppler_form: DopplerForm,
    /// Amplitude error bound ε_Ω; `ε_Ωp`, `ε_Ωc` independent uniform on `±ε_Ω`.
    pub amplitude: f64,
    /// Temperature (mK) for position-dependent Rabi frequencies; 0 disables.
    pub position_mk: f64,
    /// Dephasing bound γz (rad/μs).
    pub gamma_z: f64,
    /// Interaction fluctuation bound ΔB/B.
    pub interaction_fraction: f64,
    pub physical: Option<PhysicalNoiseConfig>,
}

impl NoiseModel {
    pub fn physical(&self) -> PhysicalNoiseConfig {
        self.physical.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        for d in [self.eps_delta, self.eps_big_delta].into_iter().flatten() {
            d.validate()?;
        }
        check_temperature(self.doppler_mk)?;
        check_temperature(self.position_mk)?;
        if !(self.amplitude >= 0.0 && self.gamma_z >= 0.0) {
            return Err(Error::InvalidParameter("noise bounds must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.interaction_fraction) {
            return Err(Error::InvalidParameter("interaction fraction outside [0, 1]".into()));
        }
        Ok(())
    }

    /// True when every draw is the zero error sample.
    pub fn is_quiet(&self) -> bool {
        let silent = |d: Option<DistributionSpec>| d.is_none_or(|d| d.half_width == 0.0);
        silent(self.eps_delta)
            && silent(self.eps_big_delta)
            && self.doppler_mk == 0.0
            && self.amplitude == 0.0
            && self.position_mk == 0.0
            && self.gamma_z == 0.0
            && self.interaction_fraction == 0.0
    }

    /// Draws one error realization. Channels consume the stream in a fixed order.
    pub fn sample<R: Rng + ?Sized>(&self, p: &PulseParams, rng: &mut R) -> Result<ErrorSample> {
        let cfg = self.physical();
        let mut e = ErrorSample::default();
        if let Some(d) = self.eps_delta {
            e.eps_delta = d.sample(rng);
        }
        if let Some(d) = self.eps_big_delta {
            e.eps_big_delta = d.sample(rng);
        }
        if self.doppler_mk > 0.0 {
            let d = sample_doppler(self.doppler_mk, &cfg, rng)?;
            apply_doppler(&mut e, &d, &cfg, self.doppler_form);
        }
        if self.amplitude > 0.0 {
            e.eps_omega_p = rng.gen_range(-self.amplitude..=self.amplitude);
            e.eps_omega_c = rng.gen_range(-self.amplitude..=self.amplitude);
        }
        if self.position_mk > 0.0 {
            e.placements = sample_positions(self.position_mk, &cfg, rng)?;
        }
        if self.gamma_z > 0.0 {
            (e.gamma1, e.gamma2) = sample_phase_dephasing(self.gamma_z, rng)?;
        }
        if self.interaction_fraction > 0.0 {
            e.delta_b = interaction_deviation(self.interaction_fraction, p.blockade, rng)?;
        }
        Ok(e)
    }
}

/// Monte-Carlo run settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloOptions {
    pub samples: usize,
    pub seed: u64,
    /// Figure that is averaged.
    pub measure: FidelityMeasure,
    /// Optional second figure evaluated on the same draws.
    pub secondary: Option<FidelityMeasure>,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self { samples: 50, seed: 1, measure: FidelityMeasure::default(), secondary: None }
    }
}

/// Outcome of one Monte-Carlo sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub sample: ErrorSample,
    pub fidelity: Option<f64>,
    pub fidelity_secondary: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub mean: f64,
    pub stderr: f64,
    pub mean_secondary: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
    pub records: Vec<SampleRecord>,
}

/// Sum with `O(log n)` error growth; the split points depend only on the
/// length, so the result does not depend on evaluation order.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 8 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean and standard error of the mean.
pub fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(x) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = x.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Draws `samples` error realizations from a seeded stream and averages the gate fidelity.
pub fn monte_carlo_fidelity(
    p: &PulseParams,
    model: &NoiseModel,
    decay: &DecayConstants,
    opts: &IntegratorOptions,
    mc: &MonteCarloOptions,
) -> Result<MonteCarloResult> {
    if mc.samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    model.validate()?;
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let mut draws = Vec::with_capacity(mc.samples);
    for _ in 0..mc.samples {
        draws.push(model.sample(p, &mut rng)?);
    }
    let records: Vec<SampleRecord> = draws
        .par_iter()
        .enumerate()
        .map(|(index, e)| {
            let outcome = gate_fidelity(p, e, decay, opts, mc.measure).and_then(|f| {
                let g = mc.secondary.map(|m| gate_fidelity(p, e, decay, opts, m)).transpose()?;
                Ok((f, g))
            });
            match outcome {
                Ok((f, g)) => SampleRecord { index, sample: *e, fidelity: Some(f), fidelity_secondary: g, error: None },
                Err(err) => SampleRecord {
                    index,
                    sample: *e,
                    fidelity: None,
                    fidelity_secondary: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    let ok: Vec<f64> = records.iter().filter_map(|r| r.fidelity).collect();
    let n_failed = records.len() - ok.len();
    if ok.is_empty() {
        return Err(Error::InvalidState("every Monte-Carlo sample failed".into()));
    }
    let (mean, stderr) = mean_stderr(&ok);
    let second: Vec<f64> = records.iter().filter_map(|r| r.fidelity_secondary).collect();
    let mean_secondary =
        (mc.secondary.is_some() && second.len() == ok.len()).then(|| pairwise_sum(&second) / second.len() as f64);
    Ok(MonteCarloResult { mean, stderr, mean_secondary, n_ok: ok.len(), n_failed, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{mhz, Preset};

    #[test]
    fn zero_width_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for k in DistributionKind::ALL {
            assert_eq!(DistributionSpec::new(k, 0.0).sample(&mut rng), 0.0);
        }
    }

    #[test]
    fn support_is_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in DistributionKind::ALL {
            let d = DistributionSpec::new(k, 2.5);
            for _ in 0..10_000 {
                assert!(d.sample(&mut rng).abs() <= 2.5);
            }
        }
    }

    #[test]
    fn k_eff_matches_quoted_value() {
        let k = PhysicalNoiseConfig::default().k_eff();
        assert!((k / 8.76e6 - 1.0).abs() < 5e-3, "{k}");
    }

    #[test]
    fn position_sigma_at_2mk() {
        let s = PhysicalNoiseConfig::default().position_sigma(2.0);
        for (got, want) in s.iter().zip([0.47, 0.60, 1.99]) {
            assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_temperature_is_frozen() {
        let cfg = PhysicalNoiseConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = sample_doppler(0.0, &cfg, &mut rng).unwrap();
        assert_eq!((d.eps_big_delta, d.eps_delta), (0.0, 0.0));
        let pl = sample_positions(0.0, &cfg, &mut rng).unwrap();
        assert_eq!(pl[0], AtomPlacement::default());
        assert!(sample_doppler(-1.0, &cfg, &mut rng).is_err());
    }

    #[test]
    fn doppler_ratio_fixed() {
        let cfg = PhysicalNoiseConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = sample_doppler(1.0, &cfg, &mut rng).unwrap();
            if d.eps_delta != 0.0 {
                assert!((d.eps_big_delta / d.eps_delta - cfg.k_p() / cfg.k_eff()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_r_and_c6_blockade() {
        let cfg = PhysicalNoiseConfig::default();
        let b = mhz(2000.0);
        assert!((cfg.delta_r_nm(0.1 * b) / 45.83 - 1.0).abs() < 0.01);
        assert!((cfg.blockade_from_c6() / b - 1.0).abs() < 0.02);
    }

    #[test]
    fn ac_stark_zero_and_cancelling() {
        let p = Preset::Der.params();
        let (curve, max) = ac_stark_detuning(0.0, 0.0, &p, 50);
        assert_eq!(max, 0.0);
        assert!(curve.iter().all(|(_, e)| *e == 0.0));
    }

    #[test]
    fn quiet_model_detected() {
        let mut m = NoiseModel::default();
        assert!(m.is_quiet());
        m.eps_delta = Some(DistributionSpec::new(DistributionKind::Uniform, 0.0));
        assert!(m.is_quiet());
        m.gamma_z = 0.1;
        assert!(!m.is_quiet());
    }

    #[test]
    fn dephasing_and_interaction_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(sample_phase_dephasing(0.0, &mut rng).unwrap(), (0.0, 0.0));
        for _ in 0..1000 {
            let (a, b) = sample_phase_dephasing(0.3, &mut rng).unwrap();
            assert!((0.0..=0.3).contains(&a) && (0.0..=0.3).contains(&b));
        }
        assert_eq!(interaction_deviation(0.0, 10.0, &mut rng).unwrap(), 0.0);
        assert!(interaction_deviation(1.5, 10.0, &mut rng).is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let x: Vec<f64> = (0..1000).map(|k| (k as f64).sin()).collect();
        assert!((pairwise_sum(&x) - x.iter().sum::<f64>()).abs() < 1e-10);
        let (m, s) = mean_stderr(&[1.0, 1.0, 1.0]);
        assert_eq!((m, s), (1.0, 0.0));
    }

    #[test]
    fn gaussian_density_normalized() {
        let n = 20_000;
        let h = 2.0 / n as f64;
        let total: f64 = (0..n).map(|k| DistributionKind::Gaussian.density(-1.0 + (k as f64 + 0.5) * h, 0.5) * h).sum();
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }
}
