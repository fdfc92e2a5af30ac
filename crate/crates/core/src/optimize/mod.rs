//! Robustness costs over the two-photon detuning error and the optimizers
//! that minimize them.

mod ga;
mod pareto;

pub use ga::{ga_minimize, ga_minimize_fn, Bounds, GaOptions, GaRecord, GaResult, Genome};
pub use pareto::{
    crowding_distance, dominates, non_dominated, non_dominated_sort, nsga2, pareto_front, ParetoObjectives,
    ParetoOptions, ParetoPoint, ParetoResult,
};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DecayConstants, ErrorSample, IntegratorOptions};
use crate::error::{Error, Result};
use crate::metrics::{simulate_gate, FidelityConvention, FidelityMeasure, PaperMode};
use crate::pulses::{mhz, PulseParams};

/// Cost assigned to genomes whose evaluation failed.
pub const COST_SENTINEL: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    /// `1 - F(0)`.
    To,
    /// `[1 - F(0)]² + [F_max - F_min]²`.
    Der,
    /// `[1 - F(0)]² + [1 - F̄]²` with weighted mean `F̄`.
    DerI,
}

impl CostKind {
    pub fn name(self) -> &'static str {
        match self {
            CostKind::To => "to",
            CostKind::Der => "der",
            CostKind::DerI => "der_i",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "to" => Ok(CostKind::To),
            "der" => Ok(CostKind::Der),
            "der_i" | "der-i" => Ok(CostKind::DerI),
            _ => Err(Error::InvalidParameter(format!("unknown cost kind '{s}'"))),
        }
    }
}

/// Weight profile over the detuning grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightProfile {
    /// `exp(-ε²/2σ²)` with `σ = ε0/2`.
    Gaussian,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostSpec {
    pub kind: CostKind,
    /// Half-range of the detuning grid (rad/μs).
    pub eps0: f64,
    /// Number of grid points; odd so that 0 is included.
    pub grid: usize,
    pub weights: WeightProfile,
    /// Measure used for the ideal term `1 - F(0)`.
    pub ideal_measure: FidelityMeasure,
    /// Measure used for `F_max - F_min` and `F̄`.
    pub robust_measure: FidelityMeasure,
    pub integrator: IntegratorOptions,
}

impl Default for CostSpec {
    fn default() -> Self {
        Self {
            kind: CostKind::Der,
            eps0: mhz(0.8),
            grid: 9,
            weights: WeightProfile::Gaussian,
            ideal_measure: FidelityMeasure::Phase(FidelityConvention::Root),
            robust_measure: FidelityMeasure::TruthTable(PaperMode::SqrtTrace),
            integrator: IntegratorOptions::with_tolerances(1e-7, 1e-9),
        }
    }
}

impl CostSpec {
    pub fn new(kind: CostKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid == 0 || self.grid.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("grid size {} must be odd", self.grid)));
        }
        if !(self.eps0.is_finite() && self.eps0 >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps0 {} must be finite and >= 0", self.eps0)));
        }
        self.integrator.validate()
    }

    /// Symmetric detuning grid over `[-ε0, ε0]`, containing 0 at its centre.
    pub fn grid_points(&self) -> Vec<f64> {
        if self.grid == 1 {
            return vec![0.0];
        }
        let m = (self.grid / 2) as f64;
        (0..self.grid).map(|k| self.eps0 * (k as f64 - m) / m).collect()
    }

    /// Normalized positive weights matching [`CostSpec::grid_points`].
    pub fn grid_weights(&self) -> Vec<f64> {
        let pts = self.grid_points();
        let raw: Vec<f64> = match self.weights {
            WeightProfile::Uniform => vec![1.0; pts.len()],
            WeightProfile::Gaussian => {
                let sigma = 0.5 * self.eps0;
                pts.iter().map(|&e| if sigma > 0.0 { (-0.5 * (e / sigma).powi(2)).exp() } else { 1.0 }).collect()
            }
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }
}

/// All quantities entering a cost evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub cost: f64,
    /// `1 - F(0)` in the ideal measure.
    pub j1: f64,
    /// `F_max - F_min` (DER, TO) or `1 - F̄` (DER-i) in the robust measure.
    pub j2: f64,
    /// Robust-measure fidelities on the grid; empty for TO.
    pub fidelities: Vec<f64>,
    pub failed: bool,
}

impl CostBreakdown {
    fn sentinel() -> Self {
        Self { cost: COST_SENTINEL, j1: COST_SENTINEL, j2: COST_SENTINEL, fidelities: Vec::new(), failed: true }
    }
}

fn grid_fidelities(spec: &CostSpec, p: &PulseParams) -> Result<(f64, Vec<f64>)> {
    let none = DecayConstants::none();
    let mut ideal = f64::NAN;
    let mut robust = Vec::with_capacity(spec.grid);
    let points = if spec.kind == CostKind::To { vec![0.0] } else { spec.grid_points() };
    for eps in points {
        let r = simulate_gate(p, &ErrorSample::with_eps_delta(eps), &none, &spec.integrator, PaperMode::SqrtTrace)?;
        if eps == 0.0 {
            ideal = r.measure(spec.ideal_measure);
        }
        robust.push(r.measure(spec.robust_measure));
    }
    if robust.iter().chain(std::iter::once(&ideal)).any(|f| !f.is_finite()) {
        return Err(Error::NonFinite(0.0));
    }
    Ok((ideal, robust))
}

/// Evaluates the cost with decays off. Integrator failures give
/// [`COST_SENTINEL`] with `failed` set.
pub fn eval_cost_breakdown(spec: &CostSpec, p: &PulseParams) -> CostBreakdown {
    if spec.validate().is_err() || p.validate().is_err() {
        return CostBreakdown::sentinel();
    }
    let (ideal, fid) = match grid_fidelities(spec, p) {
        Ok(v) => v,
        Err(_) => return CostBreakdown::sentinel(),
    };
    let j1 = 1.0 - ideal;
    let (j2, cost) = match spec.kind {
        CostKind::To => (0.0, j1),
        CostKind::Der => {
            let hi = fid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = fid.iter().copied().fold(f64::INFINITY, f64::min);
            let j2 = hi - lo;
            (j2, j1 * j1 + j2 * j2)
        }
        CostKind::DerI => {
            let mean: f64 = fid.iter().zip(spec.grid_weights()).map(|(f, w)| f * w).sum();
            let j2 = 1.0 - mean;
            (j2, j1 * j1 + j2 * j2)
        }
    };
    CostBreakdown { cost, j1, j2, fidelities: fid, failed: false }
}

/// Scalar cost of `p` under `spec`.
pub fn eval_cost(spec: &CostSpec, p: &PulseParams) -> f64 {
    eval_cost_breakdown(spec, p).cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::Preset;

    #[test]
    fn grid_is_symmetric_with_zero() {
        let s = CostSpec::default();
        let g = s.grid_points();
        assert_eq!(g.len(), 9);
        assert_eq!(g[4], 0.0);
        for k in 0..9 {
            assert!((g[k] + g[8 - k]).abs() < 1e-12);
        }
        assert!((g[8] - mhz(0.8)).abs() < 1e-12);
    }

    #[test]
    fn weights_normalized_and_positive() {
        for w in [WeightProfile::Gaussian, WeightProfile::Uniform] {
            let s = CostSpec { weights: w, ..CostSpec::default() };
            let ws = s.grid_weights();
            assert!((ws.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(ws.iter().all(|&x| x > 0.0));
        }
        let g = CostSpec::default().grid_weights();
        // Edge points sit at 2σ.
        assert!((g[0] / g[4] - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn even_grid_rejected() {
        let s = CostSpec { grid: 8, ..CostSpec::default() };
        assert!(s.validate().is_err());
        let b = eval_cost_breakdown(&s, &Preset::Der.params());
        assert!(b.failed && b.cost == COST_SENTINEL);
    }

    #[test]
    fn to_cost_at_to_pulse() {
        let c = eval_cost(&CostSpec::new(CostKind::To), &Preset::To.params());
        assert!((c - 4e-6).abs() < 1e-4, "{c}");
    }

    #[test]
    fn der_first_term_at_der_pulse() {
        let b = eval_cost_breakdown(&CostSpec::new(CostKind::Der), &Preset::Der.params());
        assert!(!b.failed);
        assert!((b.j1 * b.j1 - 8.4e-6).abs() < 2e-6, "{}", b.j1);
    }

    #[test]
    fn invalid_params_give_sentinel() {
        let mut p = Preset::Der.params();
        p.t1 = 2.0;
        assert_eq!(eval_cost(&CostSpec::default(), &p), COST_SENTINEL);
    }
}
