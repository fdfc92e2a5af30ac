//! Gate characterization: truth table, fidelities and accumulated phases.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, evolve_pure, DecayConstants, ErrorSample, IntegratorOptions};
use crate::error::{Error, Result};
use crate::pulses::PulseParams;
use crate::qla::{idx, inner, DensityMatrix, Level, C64, COMPUTATIONAL, TWO_ATOM_DIM, ZERO};

/// Signs of the target CZ gate on `|00>, |01>, |10>, |11>`.
pub const CZ_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// How the four truth-table entries are combined into one number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PaperMode {
    /// `¼ Σ F_j`.
    #[default]
    Average,
    /// `¼ Σ √F_j`, the trace of the square root of the diagonal truth table.
    SqrtTrace,
    /// `(¼ Σ √F_j)²`.
    SquaredSqrtTrace,
}

impl PaperMode {
    pub const ALL: [PaperMode; 3] = [PaperMode::Average, PaperMode::SqrtTrace, PaperMode::SquaredSqrtTrace];

    pub fn name(self) -> &'static str {
        match self {
            PaperMode::Average => "average",
            PaperMode::SqrtTrace => "sqrt_trace",
            PaperMode::SquaredSqrtTrace => "squared_sqrt_trace",
        }
    }
}

/// Scale on which the superposition-state fidelity is reported.
///
/// `Squared` is the state overlap `<ψtgt|ρ|ψtgt>`. `Root` is its square root,
/// which for a pure output with correct phases equals `¼ Σ √F_j` and is the
/// scale the published fidelities are quoted on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FidelityConvention {
    Squared,
    #[default]
    Root,
}

impl FidelityConvention {
    pub fn apply(self, overlap: f64) -> f64 {
        match self {
            FidelityConvention::Squared => overlap,
            FidelityConvention::Root => overlap.max(0.0).sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FidelityConvention::Squared => "squared",
            FidelityConvention::Root => "root",
        }
    }
}

fn computational_vector(amps: [C64; 4]) -> Vec<C64> {
    let mut v = vec![ZERO; TWO_ATOM_DIM];
    for (b, a) in COMPUTATIONAL.iter().zip(amps) {
        v[b.flat()] = a;
    }
    v
}

/// `½(|00> + |01> + |10> + |11>)`.
pub fn psi_plus() -> Vec<C64> {
    computational_vector([C64::new(0.5, 0.0); 4])
}

/// `Û |ψ+>` with `Û = diag(1, -1, -1, -1)`.
pub fn psi_target() -> Vec<C64> {
    computational_vector(CZ_SIGNS.map(|s| C64::new(0.5 * s, 0.0)))
}

/// `Û |j>` for computational input `j ∈ 0..4`.
pub fn ideal_output(j: usize) -> Vec<C64> {
    let mut amps = [ZERO; 4];
    amps[j] = C64::new(CZ_SIGNS[j], 0.0);
    computational_vector(amps)
}

/// `<ideal|ρ|ideal>`.
pub fn element_fidelity(rho: &DensityMatrix, ideal: &[C64]) -> Result<f64> {
    if ideal.len() != TWO_ATOM_DIM {
        return Err(Error::Dimension(format!("ideal state has {} entries", ideal.len())));
    }
    let n = crate::qla::norm(ideal);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("ideal state has norm {n}")));
    }
    Ok(rho.expectation(ideal))
}

/// Combines the truth-table diagonal into a single fidelity.
pub fn gate_fidelity_paper(f: [f64; 4], mode: PaperMode) -> Result<f64> {
    if f.iter().any(|&x| !(-1e-9..=1.0 + 1e-9).contains(&x)) {
        return Err(Error::InvalidParameter(format!("truth table entries {f:?} outside [0, 1]")));
    }
    let f = f.map(|x| x.clamp(0.0, 1.0));
    let root = 0.25 * f.iter().map(|x| x.sqrt()).sum::<f64>();
    Ok(match mode {
        PaperMode::Average => 0.25 * f.iter().sum::<f64>(),
        PaperMode::SqrtTrace => root,
        PaperMode::SquaredSqrtTrace => root * root,
    })
}

fn decay_free(e: &ErrorSample, d: &DecayConstants) -> bool {
    d.is_zero() && !e.has_dephasing()
}

/// Final state of the `|ψ+>` run, as a vector when no dissipation is present.
#[derive(Clone, Debug)]
pub enum PlusState {
    Pure(Vec<C64>),
    Mixed(DensityMatrix),
}

impl PlusState {
    pub fn overlap(&self, v: &[C64]) -> f64 {
        match self {
            PlusState::Pure(psi) => inner(v, psi).norm_sqr(),
            PlusState::Mixed(rho) => rho.expectation(v),
        }
    }

    /// Coherence `<j|ρ|00>`, proportional to `a_j a_00*`.
    fn coherence(&self, j: usize) -> C64 {
        let z = idx(Level::Zero, Level::Zero);
        match self {
            PlusState::Pure(psi) => psi[j] * psi[z].conj(),
            PlusState::Mixed(rho) => rho.get(j, z),
        }
    }

    /// Phases `(φ01, φ10, φ11)` in `[0, 2π)`, defined by `a_j = |a_j| e^{-iφ_j}` relative to `|00>`.
    pub fn phases(&self) -> [f64; 3] {
        [1, 2, 3].map(|k| (-self.coherence(COMPUTATIONAL[k].flat()).arg()).rem_euclid(TAU))
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            PlusState::Pure(psi) => DensityMatrix::pure(psi).expect("25-dim state"),
            PlusState::Mixed(rho) => rho.clone(),
        }
    }
}

/// Evolves `|ψ+>` through the gate, using the state-vector path when the run is dissipation-free.
pub fn evolve_plus(
    p: &PulseParams,
    e: &ErrorSample,
    d: &DecayConstants,
    opts: &IntegratorOptions,
) -> Result<PlusState> {
    let psi0 = psi_plus();
    if decay_free(e, d) {
        Ok(PlusState::Pure(evolve_pure(p, e, opts, &psi0)?.psi))
    } else {
        let rho0 = DensityMatrix::pure(&psi0)?;
        Ok(PlusState::Mixed(evolve(p, e, d, opts, &rho0)?.rho))
    }
}

/// `<ψtgt|ρ(T)|ψtgt>` for `ρ(-T/2) = |ψ+><ψ+|`.
pub fn gate_fidelity_phase(
    p: &PulseParams,
    e: &ErrorSample,
    d: &DecayConstants,
    opts: &IntegratorOptions,
) -> Result<f64> {
    Ok(evolve_plus(p, e, d, opts)?.overlap(&psi_target()))
}

/// Truth-table diagonal `F_j` for the four computational inputs.
pub fn truth_table(p: &PulseParams, e: &ErrorSample, d: &DecayConstants, opts: &IntegratorOptions) -> Result<[f64; 4]> {
    let states = final_basis_states(p, e, d, opts)?;
    let mut f = [0.0; 4];
    for j in 0..4 {
        f[j] = element_fidelity(&states[j], &ideal_output(j))?;
    }
    Ok(f)
}

fn final_basis_states(
    p: &PulseParams,
    e: &ErrorSample,
    d: &DecayConstants,
    opts: &IntegratorOptions,
) -> Result<[DensityMatrix; 4]> {
    let mut out = Vec::with_capacity(4);
    if decay_free(e, d) {
        let psi = evolve_pure(p, e, opts, &psi_plus())?.psi;
        for b in channel_blocks(&psi) {
            out.push(DensityMatrix::pure(&b)?);
        }
    } else {
        for b in COMPUTATIONAL {
            out.push(evolve(p, e, d, opts, &DensityMatrix::basis(b))?.rho);
        }
    }
    Ok(out.try_into().expect("four channels"))
}

/// Scalar fidelity figure used by costs, scans and ensemble averages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "mode", rename_all = "snake_case")]
pub enum FidelityMeasure {
    /// Phase-sensitive `|ψ+>` overlap on the given scale.
    Phase(FidelityConvention),
    /// Truth-table combination; blind to the accumulated phases.
    TruthTable(PaperMode),
}

impl Default for FidelityMeasure {
    fn default() -> Self {
        FidelityMeasure::TruthTable(PaperMode::SqrtTrace)
    }
}

impl FidelityMeasure {
    pub fn name(self) -> String {
        match self {
            FidelityMeasure::Phase(c) => format!("phase_{}", c.name()),
            FidelityMeasure::TruthTable(m) => format!("truth_table_{}", m.name()),
        }
    }

    /// Parses names produced by [`FidelityMeasure::name`].
    pub fn parse(s: &str) -> Result<Self> {
        let all = [
            FidelityMeasure::Phase(FidelityConvention::Root),
            FidelityMeasure::Phase(FidelityConvention::Squared),
            FidelityMeasure::TruthTable(PaperMode::Average),
            FidelityMeasure::TruthTable(PaperMode::SqrtTrace),
            FidelityMeasure::TruthTable(PaperMode::SquaredSqrtTrace),
        ];
        all.into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown fidelity measure '{s}'")))
    }
}

/// Evaluates one fidelity figure, running only the propagations it needs.
pub fn gate_fidelity(
    p: &PulseParams,
    e: &ErrorSample,
    d: &DecayConstants,
    opts: &IntegratorOptions,
    measure: FidelityMeasure,
) -> Result<f64> {
    match measure {
        FidelityMeasure::Phase(c) => Ok(c.apply(gate_fidelity_phase(p, e, d, opts)?)),
        FidelityMeasure::TruthTable(m) => gate_fidelity_paper(truth_table(p, e, d, opts)?, m),
    }
}

/// Full characterization of one gate run.
#[derive(Clone, Debug)]
pub struct GateResult {
    /// Final states for inputs `|00>, |01>, |10>, |11>`.
    pub final_states: [DensityMatrix; 4],
    /// Truth-table diagonal `F_j = <Û j|ρ_j|Û j>`.
    pub truth_table: [f64; 4],
    pub paper_mode: PaperMode,
    pub fidelity_paper: f64,
    /// Superposition-state overlap `<ψtgt|ρ|ψtgt>`.
    pub fidelity_phase: f64,
    /// `(φ01, φ10, φ11)` in `[0, 2π)`.
    pub phases: [f64; 3],
}

impl GateResult {
    pub fn fidelity(&self, convention: FidelityConvention) -> f64 {
        convention.apply(self.fidelity_phase)
    }

    pub fn fidelity_paper_in(&self, mode: PaperMode) -> f64 {
        gate_fidelity_paper(self.truth_table, mode).unwrap_or(f64::NAN)
    }

    pub fn measure(&self, m: FidelityMeasure) -> f64 {
        match m {
            FidelityMeasure::Phase(c) => self.fidelity(c),
            FidelityMeasure::TruthTable(mode) => self.fidelity_paper_in(mode),
        }
    }

    /// `2φ01 - φ11`, which equals π for a CZ gate.
    pub fn phase_condition(&self) -> f64 {
        2.0 * self.phases[0] - self.phases[2]
    }

    /// Distance of `φ11 - φ01 - φ10` from `-π` modulo 2π.
    pub fn phase_error(&self) -> f64 {
        let x = (self.phases[2] - self.phases[0] - self.phases[1] + PI).rem_euclid(TAU);
        x.min(TAU - x)
    }
}

/// Simulates the gate on all four computational inputs and on `|ψ+>`.
pub fn simulate_gate(
    p: &PulseParams,
    e: &ErrorSample,
    d: &DecayConstants,
    opts: &IntegratorOptions,
    mode: PaperMode,
) -> Result<GateResult> {
    let plus = evolve_plus(p, e, d, opts)?;
    let final_states: [DensityMatrix; 4] = match &plus {
        // Each computational input evolves in its own invariant block, so the
        // ψ+ run already contains all four outputs (amplitudes scaled by ½).
        PlusState::Pure(psi) => {
            let mut out = Vec::with_capacity(4);
            for b in channel_blocks(psi) {
                out.push(DensityMatrix::pure(&b)?);
            }
            out.try_into().expect("four channels")
        }
        PlusState::Mixed(_) => final_basis_states(p, e, d, opts)?,
    };
    let mut truth_table = [0.0; 4];
    for j in 0..4 {
        truth_table[j] = element_fidelity(&final_states[j], &ideal_output(j))?;
    }
    Ok(GateResult {
        fidelity_paper: gate_fidelity_paper(truth_table, mode)?,
        final_states,
        truth_table,
        paper_mode: mode,
        fidelity_phase: plus.overlap(&psi_target()),
        phases: plus.phases(),
    })
}

/// Splits the ψ+ output into the four single-input outputs. The channel of a
/// basis state is fixed by which atoms sit in `|0>` or `|d>` (uncoupled).
fn channel_blocks(psi: &[C64]) -> [Vec<C64>; 4] {
    let mut blocks: [Vec<C64>; 4] = std::array::from_fn(|_| vec![ZERO; TWO_ATOM_DIM]);
    let active = |l: usize| l != Level::Zero.index() && l != Level::D.index();
    for (k, &a) in psi.iter().enumerate() {
        let (c, t) = (k / 5, k % 5);
        let ch = 2 * usize::from(active(c)) + usize::from(active(t));
        blocks[ch][k] = a * 2.0;
    }
    blocks
}

/// One point of an infidelity-versus-ε_δ curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub eps_delta: f64,
    pub infidelity_phase: f64,
    pub infidelity_paper: f64,
}

/// `1 - F(ε_δ)` over a grid of two-photon detuning errors, evaluated in parallel.
pub fn infidelity_scan(
    p: &PulseParams,
    grid: &[f64],
    decay: &DecayConstants,
    opts: &IntegratorOptions,
    convention: FidelityConvention,
    mode: PaperMode,
) -> Result<Vec<ScanPoint>> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("scan grid must be finite".into()));
    }
    grid.par_iter()
        .map(|&eps| {
            let r = simulate_gate(p, &ErrorSample::with_eps_delta(eps), decay, opts, mode)?;
            Ok(ScanPoint {
                eps_delta: eps,
                infidelity_phase: 1.0 - r.fidelity(convention),
                infidelity_paper: 1.0 - r.fidelity_paper,
            })
        })
        .collect()
}
