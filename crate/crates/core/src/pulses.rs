//! Double-STIRAP control fields.
//!
//! Units throughout: time in μs, angular frequency in rad/μs. A frequency
//! quoted as `f` MHz enters as `2π·f`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dynamics::ErrorSample;
use crate::error::{Error, Result};
use crate::qla::{Atom, C64};

/// `2π·f` for a frequency `f` in MHz.
pub fn mhz(f: f64) -> f64 {
    TAU * f
}

/// Peak Rabi frequency of both lasers, 2π·150 MHz.
pub const DEFAULT_OMEGA_MAX: f64 = TAU * 150.0;
/// Intermediate-state detuning, 2π·2 GHz.
pub const DEFAULT_DELTA0: f64 = TAU * 2000.0;
/// Blockade shift, 2π·2 GHz.
pub const DEFAULT_BLOCKADE: f64 = TAU * 2000.0;

/// Waveform parameters. `t1`, `t2` and `width` are the optimizable genome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseParams {
    /// Probe pulse center (μs).
    pub t1: f64,
    /// Coupling pulse center (μs).
    pub t2: f64,
    /// Gaussian width ω (μs).
    pub width: f64,
    pub omega_p_max: f64,
    pub omega_c_max: f64,
    pub delta0: f64,
    pub blockade: f64,
}

impl PulseParams {
    /// Timing triple with the fixed amplitudes, detuning and blockade.
    pub fn with_timing(t1: f64, t2: f64, width: f64) -> Self {
        Self {
            t1,
            t2,
            width,
            omega_p_max: DEFAULT_OMEGA_MAX,
            omega_c_max: DEFAULT_OMEGA_MAX,
            delta0: DEFAULT_DELTA0,
            blockade: DEFAULT_BLOCKADE,
        }
    }

    pub fn timing(&self) -> [f64; 3] {
        [self.t1, self.t2, self.width]
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.t1, self.t2, self.width, self.omega_p_max, self.omega_c_max, self.delta0, self.blockade]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite pulse parameter".into()));
        }
        if self.width <= 0.0 {
            return Err(Error::InvalidParameter(format!("width {} must be > 0", self.width)));
        }
        if !(0.0 < self.t1 && self.t1 < self.t2) {
            return Err(Error::InvalidParameter(format!("need 0 < t1 < t2, got t1={} t2={}", self.t1, self.t2)));
        }
        if self.omega_p_max < 0.0 || self.omega_c_max < 0.0 {
            return Err(Error::InvalidParameter("peak Rabi frequencies must be >= 0".into()));
        }
        Ok(())
    }

    /// Tg = 2(t2 + 3ω).
    pub fn gate_time(&self) -> f64 {
        2.0 * (self.t2 + 3.0 * self.width)
    }

    pub fn t_start(&self) -> f64 {
        -0.5 * self.gate_time()
    }

    pub fn t_end(&self) -> f64 {
        0.5 * self.gate_time()
    }
}

/// Published parameter sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Typical-optimal pulse (ideal infidelity only), timing re-derived; see [`Preset::ToPrinted`].
    To,
    /// The typical-optimal triple exactly as printed.
    ToPrinted,
    Der,
    DerIGauss,
    DerIUniform,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::To, Preset::ToPrinted, Preset::Der, Preset::DerIGauss, Preset::DerIUniform];

    pub fn timing(self) -> [f64; 3] {
        match self {
            Preset::To => TO_TIMING,
            Preset::ToPrinted => [0.4444, 0.9027, 0.1587],
            Preset::Der => [0.6664, 0.9260, 0.1666],
            Preset::DerIGauss => [0.6508, 0.9053, 0.1627],
            Preset::DerIUniform => [0.6632, 0.9239, 0.1658],
        }
    }

    pub fn params(self) -> PulseParams {
        let [t1, t2, w] = self.timing();
        PulseParams::with_timing(t1, t2, w)
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::To => "to",
            Preset::ToPrinted => "to_printed",
            Preset::Der => "der",
            Preset::DerIGauss => "der_i_gauss",
            Preset::DerIUniform => "der_i_uniform",
        }
    }

    pub fn parse(s: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Typical-optimal timing used by [`Preset::To`]. `t2` follows from the
/// quoted gate time 2.3259 μs = 2(t2 + 3ω); the printed `t2` is inconsistent
/// with it and does not produce a gate.
pub const TO_TIMING: [f64; 3] = [0.4444, 0.68685, 0.1587];

/// Instantaneous field values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveformSample {
    pub omega_p: C64,
    pub omega_c: C64,
    /// Signed intermediate detuning Δ(t).
    pub delta: f64,
}

fn gauss(t: f64, center: f64, width: f64) -> f64 {
    let x = (t - center) / width;
    (-0.5 * x * x).exp()
}

/// Probe Rabi frequency; the second lobe carries a π phase flip.
pub fn omega_p(t: f64, p: &PulseParams) -> f64 {
    p.omega_p_max * (gauss(t, -p.t1, p.width) - gauss(t, p.t1, p.width))
}

/// Coupling Rabi frequency, even in `t`.
pub fn omega_c(t: f64, p: &PulseParams) -> f64 {
    p.omega_c_max * (gauss(t, -p.t2, p.width) + gauss(t, p.t2, p.width))
}

/// Which half of the gate a time belongs to. The detuning flips sign at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    First,
    Second,
}

impl Half {
    pub fn of(t: f64) -> Half {
        if t < 0.0 {
            Half::First
        } else {
            Half::Second
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Half::First => 1.0,
            Half::Second => -1.0,
        }
    }
}

/// `+(Δ0 + ε_Δ)` before the midpoint, `-(Δ0 + ε_Δ)` from `t = 0` on.
pub fn detuning(t: f64, p: &PulseParams, eps_big_delta: f64) -> f64 {
    Half::of(t).sign() * (p.delta0 + eps_big_delta)
}

/// Unperturbed waveform at `t`.
pub fn waveform(t: f64, p: &PulseParams) -> WaveformSample {
    WaveformSample {
        omega_p: C64::new(omega_p(t, p), 0.0),
        omega_c: C64::new(omega_c(t, p), 0.0),
        delta: detuning(t, p, 0.0),
    }
}

/// Gaussian-beam geometry of one laser (lengths in μm).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Beam {
    pub waist_x: f64,
    pub waist_y: f64,
    pub rayleigh_x: f64,
    pub rayleigh_y: f64,
}

impl Beam {
    /// 420 nm probe beam.
    pub const PROBE: Beam = Beam { waist_x: 7.8, waist_y: 7.8, rayleigh_x: 455.08, rayleigh_y: 455.08 };
    /// 1013 nm coupling beam.
    pub const COUPLING: Beam = Beam { waist_x: 8.3, waist_y: 8.3, rayleigh_x: 213.65, rayleigh_y: 213.65 };

    /// Relative Rabi amplitude at `pos = (x, y, z)`; 1 on the beam axis at focus.
    pub fn factor(&self, pos: [f64; 3]) -> f64 {
        let [x, y, z] = pos;
        let sx = 1.0 + (z / self.rayleigh_x).powi(2);
        let sy = 1.0 + (z / self.rayleigh_y).powi(2);
        let arg = x * x / (self.waist_x * self.waist_x * sx) + y * y / (self.waist_y * self.waist_y * sy);
        (-arg).exp() / (sx * sy).powf(0.25)
    }
}

/// Applies the per-run error modifiers to a waveform sample for one atom:
/// amplitude scaling, then position-dependent beam scaling, then the
/// optional laser-phase ramps `e^{i a t}` (alternate Doppler form).
pub fn apply_modifiers(w: WaveformSample, t: f64, e: &ErrorSample, atom: Atom) -> WaveformSample {
    let placement = &e.placements[atom.index()];
    let mut omega_p = w.omega_p * (1.0 + e.eps_omega_p) * placement.probe_factor;
    let mut omega_c = w.omega_c * (1.0 + e.eps_omega_c) * placement.coupling_factor;
    if e.probe_phase_rate != 0.0 {
        omega_p *= C64::from_polar(1.0, e.probe_phase_rate * t);
    }
    if e.coupling_phase_rate != 0.0 {
        omega_c *= C64::from_polar(1.0, e.coupling_phase_rate * t);
    }
    WaveformSample { omega_p, omega_c, delta: w.delta }
}

/// Rows `(t_us, omega_p, omega_c, delta)` on `n` evenly spaced points across the gate.
pub fn waveform_table(p: &PulseParams, n: usize) -> Vec<[f64; 4]> {
    let (a, b) = (p.t_start(), p.t_end());
    (0..n)
        .map(|k| {
            let t = if n > 1 { a + (b - a) * k as f64 / (n - 1) as f64 } else { a };
            [t, omega_p(t, p), omega_c(t, p), detuning(t, p, 0.0)]
        })
        .collect()
}
