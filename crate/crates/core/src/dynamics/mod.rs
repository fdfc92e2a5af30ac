//! Two-atom Hamiltonian, Lindblad dissipator and master-equation propagation.

mod evolve;
mod hamiltonian;
pub mod ode;
mod sparse;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use evolve::{evolve, evolve_pure, evolve_pure_trajectory, evolve_trajectory, Evolution, PureEvolution};
pub use hamiltonian::{lindblad_rhs, single_atom_h, two_atom_h, FieldFrame, Generator};
pub use sparse::SparseLindblad;

/// Spontaneous-decay rates (1/μs) and branching ratios into `{0, 1, d}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConstants {
    pub gamma_r: f64,
    pub gamma_p: f64,
    /// `b_{r→0}, b_{r→1}, b_{r→d}`.
    pub branching_r: [f64; 3],
    /// `b_{p→0}, b_{p→1}, b_{p→d}`.
    pub branching_p: [f64; 3],
}

impl DecayConstants {
    /// 87Rb values: 375 μs Rydberg lifetime, 0.118 μs intermediate lifetime.
    pub fn rubidium() -> Self {
        Self {
            gamma_r: 1.0 / 375.0,
            gamma_p: 1.0 / 0.118,
            branching_r: [0.059, 0.055, 0.886],
            branching_p: [0.1354, 0.2504, 0.6142],
        }
    }

    pub fn none() -> Self {
        Self { gamma_r: 0.0, gamma_p: 0.0, ..Self::rubidium() }
    }

    pub fn is_zero(&self) -> bool {
        self.gamma_r == 0.0 && self.gamma_p == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_r >= 0.0 && self.gamma_p >= 0.0) {
            return Err(Error::InvalidParameter("decay rates must be >= 0".into()));
        }
        for (name, b) in [("r", self.branching_r), ("p", self.branching_p)] {
            let s: f64 = b.iter().sum();
            if (s - 1.0).abs() > 1e-4 || b.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidParameter(format!("branching ratios from {name} sum to {s}")));
            }
        }
        Ok(())
    }
}

impl Default for DecayConstants {
    fn default() -> Self {
        Self::rubidium()
    }
}

/// Position of one atom and the Rabi scaling it sees from each beam.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomPlacement {
    /// (x, y, z) in μm relative to the beam focus.
    pub position: [f64; 3],
    pub probe_factor: f64,
    pub coupling_factor: f64,
}

impl Default for AtomPlacement {
    fn default() -> Self {
        Self { position: [0.0; 3], probe_factor: 1.0, coupling_factor: 1.0 }
    }
}

/// One quasi-static realization of every error channel, held constant over a gate run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ErrorSample {
    /// Two-photon detuning error ε_δ (rad/μs); enters as `-ε_δ |r><r|`.
    pub eps_delta: f64,
    /// Intermediate detuning error ε_Δ (rad/μs), reversed together with Δ0.
    pub eps_big_delta: f64,
    /// Intermediate-state Doppler shift (rad/μs). Unlike `eps_big_delta` it
    /// keeps its sign when the laser detuning is switched.
    pub doppler_intermediate: f64,
    /// Fractional amplitude errors ε_Ωp, ε_Ωc.
    pub eps_omega_p: f64,
    pub eps_omega_c: f64,
    /// Laser-phase dephasing rates γ1 (|p>↔|1>) and γ2 (|r>↔|p>), rad/μs.
    pub gamma1: f64,
    pub gamma2: f64,
    /// Control and target atom placements.
    pub placements: [AtomPlacement; 2],
    /// Deviation ΔB of the blockade shift (rad/μs).
    pub delta_b: f64,
    /// Laser phase ramp rates: Ωp → Ωp e^{i a t}, Ωc → Ωc e^{i b t}.
    pub probe_phase_rate: f64,
    pub coupling_phase_rate: f64,
}

impl ErrorSample {
    pub fn with_eps_delta(eps_delta: f64) -> Self {
        Self { eps_delta, ..Self::default() }
    }

    pub fn has_dephasing(&self) -> bool {
        self.gamma1 != 0.0 || self.gamma2 != 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let mut vals = vec![
            self.eps_delta,
            self.eps_big_delta,
            self.doppler_intermediate,
            self.eps_omega_p,
            self.eps_omega_c,
            self.gamma1,
            self.gamma2,
            self.delta_b,
            self.probe_phase_rate,
            self.coupling_phase_rate,
        ];
        for p in &self.placements {
            vals.extend_from_slice(&p.position);
            vals.push(p.probe_factor);
            vals.push(p.coupling_factor);
        }
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite error sample field".into()));
        }
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(Error::InvalidParameter("dephasing rates must be >= 0".into()));
        }
        Ok(())
    }
}

/// Integration scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Dormand–Prince 8(5,3) with adaptive steps.
    Adaptive,
    /// Classical RK4 with a fixed step `dt` (μs).
    FixedRk4 { dt: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorOptions {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step (μs); `None` means ω/20.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { method: Method::Adaptive, rel_tol: 1e-9, abs_tol: 1e-11, max_step: None, max_steps: 5_000_000 }
    }
}

impl IntegratorOptions {
    pub fn fixed_rk4(dt: f64) -> Self {
        Self { method: Method::FixedRk4 { dt }, ..Self::default() }
    }

    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be > 0".into()));
        }
        if let Method::FixedRk4 { dt } = self.method {
            if dt.is_nan() || dt <= 0.0 {
                return Err(Error::InvalidParameter("fixed step must be > 0".into()));
            }
        }
        if let Some(h) = self.max_step {
            if h.is_nan() || h <= 0.0 {
                return Err(Error::InvalidParameter("max_step must be > 0".into()));
            }
        }
        Ok(())
    }
}
