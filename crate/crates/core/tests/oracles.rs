use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rydberg_cz::dynamics::{evolve, evolve_pure, evolve_trajectory, DecayConstants, ErrorSample, IntegratorOptions};
use rydberg_cz::metrics::{gate_fidelity, psi_plus, FidelityConvention, FidelityMeasure, PaperMode};
use rydberg_cz::noise::{
    apply_doppler, monte_carlo_fidelity, DistributionKind, DistributionSpec, DopplerForm, DopplerShift,
    MonteCarloOptions, NoiseModel, PhysicalNoiseConfig,
};
use rydberg_cz::pulses::{mhz, Preset, PulseParams};
use rydberg_cz::qla::{idx, BasisIndex, DensityMatrix, Level, TWO_ATOM_DIM};

#[test]
fn fixed_step_rk4_matches_adaptive_density_matrix() {
    let p = Preset::To.params();
    let e = ErrorSample::default();
    let rho0 = DensityMatrix::pure(&psi_plus()).unwrap();
    let a = evolve(&p, &e, &DecayConstants::none(), &IntegratorOptions::default(), &rho0).unwrap().rho;
    let psi = evolve_pure(&p, &e, &IntegratorOptions::fixed_rk4(1.25e-5), &psi_plus()).unwrap().psi;
    let mut dev: f64 = 0.0;
    for i in 0..TWO_ATOM_DIM {
        for j in 0..TWO_ATOM_DIM {
            dev = dev.max((a.get(i, j) - psi[i] * psi[j].conj()).norm());
        }
    }
    assert!(dev <= 1e-6, "max entry deviation {dev:e}");
}

#[test]
fn coarse_rk4_damps_fast_nonadiabatic_amplitude() {
    // At ωh ≈ 0.6 for ω ≈ Δ0 the RK4 amplification factor is below one, so
    // coarse fixed steps plateau at a dt-independent offset.
    let p = Preset::To.params();
    let e = ErrorSample::default();
    let reference = evolve_pure(&p, &e, &IntegratorOptions::with_tolerances(1e-12, 1e-14), &psi_plus()).unwrap().psi;
    let dev = |dt| {
        let psi = evolve_pure(&p, &e, &IntegratorOptions::fixed_rk4(dt), &psi_plus()).unwrap().psi;
        psi.iter().zip(&reference).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (dev(5e-5), dev(1.25e-5));
    assert!(coarse > 1e-6 && coarse < 1e-5, "{coarse:e}");
    assert!(fine < 0.2 * coarse, "{fine:e} vs {coarse:e}");
}

#[test]
fn doppler_forms_agree() {
    let cfg = PhysicalNoiseConfig::default();
    let p = Preset::Der.params();
    let opts = IntegratorOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v_rms = cfg.v_rms(1.5);
    for _ in 0..20 {
        let shift = DopplerShift::from_velocity(rng.gen_range(-2.0..2.0) * v_rms, &cfg);
        let fid = |form| {
            let mut e = ErrorSample::default();
            apply_doppler(&mut e, &shift, &cfg, form);
            [
                gate_fidelity(
                    &p,
                    &e,
                    &DecayConstants::none(),
                    &opts,
                    FidelityMeasure::TruthTable(PaperMode::SqrtTrace),
                )
                .unwrap(),
                gate_fidelity(&p, &e, &DecayConstants::none(), &opts, FidelityMeasure::Phase(FidelityConvention::Root))
                    .unwrap(),
            ]
        };
        let (a, b) = (fid(DopplerForm::Detuning), fid(DopplerForm::PhaseRamp));
        for k in 0..2 {
            assert!((a[k] - b[k]).abs() <= 1e-6, "v = {}: {a:?} vs {b:?}", shift.velocity);
        }
    }
}

#[test]
fn rydberg_decay_is_exponential_without_fields() {
    let p = PulseParams { omega_p_max: 0.0, omega_c_max: 0.0, ..Preset::To.params() };
    let d = DecayConstants::rubidium();
    let rho0 = DensityMatrix::basis(BasisIndex::new(Level::R, Level::Zero));
    let rho = evolve(&p, &ErrorSample::default(), &d, &IntegratorOptions::default(), &rho0).unwrap().rho;
    let survive = (-d.gamma_r * p.gate_time()).exp();
    let lost = 1.0 - survive;
    assert!((rho.population(idx(Level::R, Level::Zero)) - survive).abs() < 1e-9);
    assert!((rho.population(idx(Level::Zero, Level::Zero)) - d.branching_r[0] * lost).abs() < 1e-9);
    assert!((rho.population(idx(Level::One, Level::Zero)) - d.branching_r[1] * lost).abs() < 1e-9);
    assert!((rho.population(idx(Level::D, Level::Zero)) - d.branching_r[2] * lost).abs() < 1e-9);
}

#[test]
fn blockade_suppresses_double_excitation() {
    for preset in [Preset::To, Preset::Der] {
        let p = preset.params();
        let rho0 = DensityMatrix::basis(BasisIndex::new(Level::One, Level::One));
        let (_, traj) = evolve_trajectory(
            &p,
            &ErrorSample::default(),
            &DecayConstants::none(),
            &IntegratorOptions::default(),
            &rho0,
            201,
        )
        .unwrap();
        let peak = traj.iter().map(|(_, r)| r.population(idx(Level::R, Level::R))).fold(0.0, f64::max);
        assert!(peak < 1e-2, "{preset:?}: peak |rr> population {peak:e}");
    }
}

#[test]
fn sampler_second_moments() {
    let eps = 1.3;
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (kind, expected) in [(DistributionKind::Uniform, eps * eps / 3.0), (DistributionKind::Ushaped, eps * eps / 2.0)]
    {
        let d = DistributionSpec::new(kind, eps);
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01 * eps, "{kind:?} mean {mean}");
        assert!((m2 / expected - 1.0).abs() < 0.02, "{kind:?}: {m2} vs {expected}");
    }
}

#[test]
fn monte_carlo_error_shrinks_as_inverse_sqrt_n() {
    let p = Preset::To.params();
    let model = NoiseModel {
        eps_delta: Some(DistributionSpec::new(DistributionKind::Uniform, mhz(1.0))),
        ..NoiseModel::default()
    };
    let opts = IntegratorOptions::with_tolerances(1e-7, 1e-9);
    let err = |samples| {
        let mc = MonteCarloOptions { samples, seed: 5, ..MonteCarloOptions::default() };
        monte_carlo_fidelity(&p, &model, &DecayConstants::none(), &opts, &mc).unwrap().stderr
    };
    let (e50, e200, e800) = (err(50), err(200), err(800));
    for (ratio, n) in [(e50 / e200, "50/200"), (e200 / e800, "200/800")] {
        assert!((1.5..2.7).contains(&ratio), "stderr ratio {n} = {ratio}");
    }
}
