//! Adiabatic elimination of the intermediate level: dark/bright eigensystem,
//! effective two-level Hamiltonians for the `|01>` and `|11>` channels and
//! their phase accumulation. Serves as an independent check on the full model.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::dynamics::ode::Dop853;
use crate::dynamics::{evolve_pure_trajectory, ErrorSample, IntegratorOptions};
use crate::error::{Error, Result};
use crate::pulses::{omega_c, omega_p, Half, PulseParams};
use crate::qla::{idx, ComplexMatrix, HermEigen, Level, C64, I, ONE, TWO_ATOM_DIM, ZERO};

/// Three-level `{|1>, |p>, |r>}` Hamiltonian with energies `(0, -Δ, -δ)`.
pub fn three_level_h(wp: f64, wc: f64, delta: f64, two_photon: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(3);
    h[(0, 1)] = C64::new(0.5 * wp, 0.0);
    h[(1, 0)] = h[(0, 1)];
    h[(1, 2)] = C64::new(0.5 * wc, 0.0);
    h[(2, 1)] = h[(1, 2)];
    h[(1, 1)] = C64::new(-delta, 0.0);
    h[(2, 2)] = C64::new(-two_photon, 0.0);
    h
}

/// Leading-order dark and bright states of [`three_level_h`] at two-photon resonance.
#[derive(Clone, Debug, PartialEq)]
pub struct DarkBright {
    /// `α = Ωp/Ωc`.
    pub alpha: f64,
    pub dark: [f64; 3],
    pub plus: [f64; 3],
    pub minus: [f64; 3],
    pub lambda_dark: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

pub fn dark_bright(wp: f64, wc: f64, delta0: f64) -> Result<DarkBright> {
    if wc == 0.0 {
        return Err(Error::InvalidParameter("dark state undefined for Ωc = 0".into()));
    }
    if delta0 == 0.0 {
        return Err(Error::InvalidParameter("Δ0 must be nonzero".into()));
    }
    let a = wp / wc;
    let s = (1.0 + a * a).sqrt();
    let e = wc / (2.0 * delta0);
    Ok(DarkBright {
        alpha: a,
        dark: [-1.0 / s, 0.0, a / s],
        plus: normalized([a / s, s * e, 1.0 / s]),
        minus: normalized([-a * e, 1.0, -e]),
        lambda_dark: 0.0,
        lambda_plus: (1.0 + a * a) * wc * wc / (4.0 * delta0),
        lambda_minus: -delta0,
    })
}

/// Exact eigensystem of [`three_level_h`] at two-photon resonance.
pub fn exact_eigen(wp: f64, wc: f64, delta0: f64) -> Result<HermEigen> {
    three_level_h(wp, wc, delta0, 0.0).herm_eig()
}

/// `H = [[g, Ω/2], [Ω/2, g + δ]]` in the `{ground, excited}` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTwoLevel {
    pub rabi: f64,
    pub detuning: f64,
    /// Light shift of the ground state.
    pub ground_shift: f64,
}

impl EffectiveTwoLevel {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(2);
        h[(0, 0)] = C64::new(self.ground_shift, 0.0);
        h[(1, 1)] = C64::new(self.ground_shift + self.detuning, 0.0);
        h[(0, 1)] = C64::new(0.5 * self.rabi, 0.0);
        h[(1, 0)] = h[(0, 1)];
        h
    }
}

/// `|1> ↔ |r>` after eliminating `|p>`; `delta` is the signed intermediate
/// detuning and `delta0` the Rydberg-level energy.
pub fn h_eff_single(wp: f64, wc: f64, delta: f64, delta0: f64) -> EffectiveTwoLevel {
    EffectiveTwoLevel {
        rabi: wp * wc / (2.0 * delta),
        detuning: delta0 + (wc * wc - wp * wp) / (4.0 * delta),
        ground_shift: wp * wp / (4.0 * delta),
    }
}

/// `|11> ↔ (|1r> + |r1>)/√2` after eliminating `|p>` and `|rr>`.
pub fn h_eff_11(wp: f64, wc: f64, delta: f64, delta0: f64, blockade: f64) -> EffectiveTwoLevel {
    let s = h_eff_single(wp, wc, delta, delta0);
    let correction = s.rabi * s.rabi / (delta0 + wc * wc / delta + 2.0 * blockade);
    EffectiveTwoLevel { rabi: SQRT_2 * s.rabi, detuning: s.detuning - correction, ground_shift: 2.0 * s.ground_shift }
}

/// Input channel of the effective model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    /// `|01>` (equivalently `|10>`).
    C01,
    C11,
}

impl Channel {
    pub fn label(self) -> &'static str {
        match self {
            Channel::C01 => "01",
            Channel::C11 => "11",
        }
    }

    fn model(self, t: f64, half: Half, p: &PulseParams, eps_delta: f64) -> EffectiveTwoLevel {
        let (wp, wc) = (omega_p(t, p), omega_c(t, p));
        let delta = half.sign() * p.delta0;
        match self {
            Channel::C01 => h_eff_single(wp, wc, delta, -eps_delta),
            Channel::C11 => h_eff_11(wp, wc, delta, -eps_delta, p.blockade),
        }
    }

    /// Initial two-atom basis state in the full model.
    pub fn initial_index(self) -> usize {
        match self {
            Channel::C01 => idx(Level::Zero, Level::One),
            Channel::C11 => idx(Level::One, Level::One),
        }
    }
}

/// Sample of a channel trajectory: return population and accumulated phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub t: f64,
    pub population: f64,
    /// Continuously unwrapped `φ` with `<init|ψ(t)> = √P e^{-iφ}`.
    pub phase: f64,
}

fn unwrap_phases(t: &[f64], amps: &[C64]) -> Vec<PhasePoint> {
    let mut out: Vec<PhasePoint> = Vec::with_capacity(amps.len());
    for (&t, a) in t.iter().zip(amps) {
        let raw = -a.arg();
        let phase = match out.last() {
            Some(prev) => {
                let d = (raw - prev.phase).rem_euclid(std::f64::consts::TAU);
                let d = if d > std::f64::consts::PI { d - std::f64::consts::TAU } else { d };
                prev.phase + d
            }
            None => raw,
        };
        out.push(PhasePoint { t, population: a.norm_sqr(), phase });
    }
    out
}

fn grid(p: &PulseParams, n: usize) -> Vec<f64> {
    let (a, b) = (p.t_start(), p.t_end());
    let n = n.max(2);
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Integrates the effective two-level model of `channel` and samples it on `n`
/// evenly spaced times across the gate.
pub fn evolve_effective(
    channel: Channel,
    p: &PulseParams,
    eps_delta: f64,
    opts: &IntegratorOptions,
    n: usize,
) -> Result<Vec<PhasePoint>> {
    p.validate()?;
    let times = grid(p, n);
    let solver = Dop853 {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_step: opts.max_step.unwrap_or(p.width / 20.0),
        max_steps: opts.max_steps,
    };
    let mut y = [ONE, ZERO];
    let mut amps = vec![y[0]];
    for w in times.windows(2) {
        for (t0, t1, half) in [(w[0], w[1].min(0.0), Half::First), (w[0].max(0.0), w[1], Half::Second)] {
            if t1 - t0 <= 1e-12 {
                continue;
            }
            let f = |t: f64, x: &[C64], dx: &mut [C64]| {
                let m = channel.model(t, half, p, eps_delta);
                dx[0] = -I * (x[0] * m.ground_shift + x[1] * (0.5 * m.rabi));
                dx[1] = -I * (x[0] * (0.5 * m.rabi) + x[1] * (m.ground_shift + m.detuning));
            };
            solver.integrate(f, t0, t1, &mut y, |_| {})?;
        }
        amps.push(y[0]);
    }
    Ok(unwrap_phases(&times, &amps))
}

/// Same observables from the full two-atom model, for comparison with [`evolve_effective`].
pub fn full_channel_trajectory(
    channel: Channel,
    p: &PulseParams,
    eps_delta: f64,
    opts: &IntegratorOptions,
    n: usize,
) -> Result<Vec<PhasePoint>> {
    let mut psi0 = vec![ZERO; TWO_ATOM_DIM];
    let k = channel.initial_index();
    psi0[k] = ONE;
    let traj = evolve_pure_trajectory(p, &ErrorSample::with_eps_delta(eps_delta), opts, &psi0, n)?;
    let times: Vec<f64> = traj.iter().map(|(t, _)| *t).collect();
    let amps: Vec<C64> = traj.iter().map(|(_, s)| s[k]).collect();
    Ok(unwrap_phases(&times, &amps))
}

/// Population of the symmetric singly-excited state `(|1r> + |r1>)/√2` along a full trajectory.
pub fn chi_overlap(psi: &[C64]) -> f64 {
    ((psi[idx(Level::One, Level::R)] + psi[idx(Level::R, Level::One)]) * FRAC_1_SQRT_2).norm_sqr()
}

/// `∫ λ dt` over the gate for the dark, plus and minus branches of the exact
/// instantaneous eigenvalues, by composite Simpson quadrature on `2m` intervals.
/// Returns `(integrals, integrals of |λ|)`.
pub fn dynamical_phase_integrals(p: &PulseParams, m: usize) -> Result<([f64; 3], [f64; 3])> {
    let n = 2 * m.max(1);
    let (a, b) = (p.t_start(), p.t_end());
    let h = (b - a) / n as f64;
    let mut sum = [0.0; 3];
    let mut abs = [0.0; 3];
    for k in 0..=n {
        let t = a + h * k as f64;
        let delta = Half::of(t).sign() * p.delta0;
        let ev = three_level_h(omega_p(t, p), omega_c(t, p), delta, 0.0).herm_eig()?.values;
        // dark: smallest magnitude; minus: near -Δ; plus: the other one.
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&i, &j| ev[i].abs().total_cmp(&ev[j].abs()));
        let dark = ev[order[0]];
        let (minus, plus) = if (ev[order[2]] + delta).abs() < (ev[order[1]] + delta).abs() {
            (ev[order[2]], ev[order[1]])
        } else {
            (ev[order[1]], ev[order[2]])
        };
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for (i, l) in [dark, plus, minus].into_iter().enumerate() {
            sum[i] += w * l;
            abs[i] += w * l.abs();
        }
    }
    Ok((sum.map(|s| s * h / 3.0), abs.map(|s| s * h / 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{mhz, Preset};

    fn residual(h: &ComplexMatrix, v: [f64; 3], lambda: f64) -> f64 {
        let vc: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        let hv = h.apply(&vc);
        hv.iter().zip(&vc).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn decoupled_dark_state() {
        let d = dark_bright(0.0, mhz(150.0), mhz(2000.0)).unwrap();
        assert_eq!(d.alpha, 0.0);
        assert_eq!(d.dark, [-1.0, 0.0, 0.0]);
        assert_eq!(d.lambda_dark, 0.0);
        assert!(dark_bright(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn dark_state_is_exact_null_vector() {
        let (w, d0) = (mhz(150.0), mhz(2000.0));
        let h = three_level_h(w, w, d0, 0.0);
        let db = dark_bright(w, w, d0).unwrap();
        assert!(residual(&h, db.dark, 0.0) < 1e-12 * h.max_abs());
        let ratio = w / d0;
        assert!(residual(&h, db.plus, db.lambda_plus) / h.max_abs() < 4.0 * ratio * ratio);
    }

    #[test]
    fn eigenvalues_match_exact_solver() {
        let (w, d0) = (mhz(150.0), mhz(2000.0));
        let db = dark_bright(w, w, d0).unwrap();
        let ev = exact_eigen(w, w, d0).unwrap().values;
        assert!((ev[0] - db.lambda_minus).abs() < 0.01 * d0);
        assert!(ev[1].abs() < 1e-9 * d0);
        assert!((ev[2] - db.lambda_plus).abs() < 0.02 * db.lambda_plus);
    }

    #[test]
    fn effective_single_examples() {
        let (w, d0) = (mhz(150.0), mhz(2000.0));
        let s = h_eff_single(w, w, d0, 0.3);
        assert!((s.detuning - 0.3).abs() < 1e-12);
        assert!((s.rabi - mhz(5.625)).abs() < 1e-9);
        let s = h_eff_single(0.0, w, d0, 0.0);
        assert_eq!(s.rabi, 0.0);
        assert!((s.detuning - w * w / (4.0 * d0)).abs() < 1e-12);
    }

    #[test]
    fn effective_11_examples() {
        let (w, d0, b) = (mhz(150.0), mhz(2000.0), mhz(2000.0));
        let s = h_eff_single(w, w, d0, 0.0);
        let e = h_eff_11(w, w, d0, 0.0, b);
        assert!((e.rabi - SQRT_2 * s.rabi).abs() < 1e-12);
        let corr = s.rabi * s.rabi / (w * w / d0 + 2.0 * b);
        assert!(corr < mhz(0.01));
        assert!((s.detuning - e.detuning - corr).abs() < 1e-12);
        let far = h_eff_11(w, w, d0, 0.0, 1e12);
        assert!((far.detuning - s.detuning).abs() < 1e-9);
    }

    #[test]
    fn zero_pulses_do_nothing() {
        let mut p = Preset::Der.params();
        p.omega_p_max = 0.0;
        let traj = evolve_effective(Channel::C11, &p, 0.0, &IntegratorOptions::default(), 5).unwrap();
        let last = traj.last().unwrap();
        assert!((last.population - 1.0).abs() < 1e-12);
        assert!(last.phase.abs() < 1e-12);
    }

    #[test]
    fn dynamical_phase_cancels() {
        let p = Preset::To.params();
        let (s, a) = dynamical_phase_integrals(&p, 2000).unwrap();
        assert!(s[0].abs() < 1e-6);
        for i in 1..3 {
            assert!(s[i].abs() <= 1e-3 * a[i], "branch {i}: {} vs {}", s[i], a[i]);
        }
    }

    #[test]
    fn unwrap_is_continuous() {
        let ts: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let amps: Vec<C64> = ts.iter().map(|&t| C64::from_polar(1.0, -0.3 * t)).collect();
        let u = unwrap_phases(&ts, &amps);
        assert!((u[49].phase - 0.3 * 49.0).abs() < 1e-9);
    }
}
