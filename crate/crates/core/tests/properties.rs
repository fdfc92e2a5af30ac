use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rydberg_cz::dynamics::{evolve, DecayConstants, ErrorSample, IntegratorOptions};
use rydberg_cz::metrics::{psi_plus, simulate_gate, PaperMode};
use rydberg_cz::noise::{
    monte_carlo_fidelity, DistributionKind, DistributionSpec, MonteCarloOptions, NoiseModel, PhysicalNoiseConfig,
};
use rydberg_cz::optimize::{dominates, non_dominated};
use rydberg_cz::pulses::{mhz, omega_p, Preset, PulseParams};
use rydberg_cz::qla::{BasisIndex, ComplexMatrix, DensityMatrix, C64, TWO_ATOM_DIM};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), dim * dim).prop_map(|v| ComplexMatrix::from_vec(v).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim).prop_map(|m| {
        let d = m.dagger();
        let sum: Vec<C64> = m.as_slice().iter().zip(d.as_slice()).map(|(a, b)| (a + b) * 0.5).collect();
        ComplexMatrix::from_vec(sum).unwrap()
    })
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn pulse() -> impl Strategy<Value = PulseParams> {
    (0.1..0.8f64, 0.05..0.6f64, 0.05..0.3f64).prop_map(|(t1, gap, w)| PulseParams::with_timing(t1, t1 + gap, w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(
        (a, b, c) in prop::sample::select(vec![2usize, 3]).prop_flat_map(|d| (matrix(d), matrix(d), matrix(d)))
    ) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(max_diff(&left, &right) <= 1e-12);
        prop_assert!((a.kron(&b).trace() - a.trace() * b.trace()).norm() <= 1e-12);
    }

    #[test]
    fn flat_index_round_trips(i in 0usize..TWO_ATOM_DIM) {
        let b = BasisIndex::from_flat(i).unwrap();
        prop_assert_eq!(b.flat(), i);
    }

    #[test]
    fn pulse_area_and_duration(p in pulse()) {
        prop_assert!((p.gate_time() - 2.0 * (p.t2 + 3.0 * p.width)).abs() < 1e-12);
        let n = 20_000;
        let (a, b) = (p.t_start(), p.t_end());
        let h = (b - a) / n as f64;
        let mut s = omega_p(a, &p) + omega_p(b, &p);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * omega_p(a + k as f64 * h, &p);
        }
        prop_assert!((s * h / 3.0).abs() < 1e-10);
        for t in [0.1, 0.37, 0.8] {
            let t = t * b;
            prop_assert!((omega_p(t, &p) + omega_p(-t, &p)).abs() < 1e-9 * p.omega_p_max);
        }
    }

    #[test]
    fn sampler_support_and_determinism(
        kind in prop::sample::select(DistributionKind::ALL.to_vec()),
        width in 0.0..20.0f64,
        seed in any::<u64>(),
    ) {
        let d = DistributionSpec::new(kind, width);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200).map(|_| d.sample(&mut rng)).collect::<Vec<_>>()
        };
        let xs = draw(seed);
        prop_assert!(xs.iter().all(|x| x.abs() <= width));
        prop_assert_eq!(xs, draw(seed));
    }

    #[test]
    fn doppler_shifts_are_proportional(t_mk in 0.01..3.0f64, seed in any::<u64>()) {
        let cfg = PhysicalNoiseConfig::default();
        let model = NoiseModel { doppler_mk: t_mk, ..NoiseModel::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Preset::Der.params();
        for _ in 0..50 {
            let e = model.sample(&p, &mut rng).unwrap();
            if e.eps_delta != 0.0 {
                let r = e.doppler_intermediate / e.eps_delta;
                prop_assert!((r - cfg.k_p() / cfg.k_eff()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn front_has_no_dominated_points(objs in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..60)) {
        let objs: Vec<[f64; 2]> = objs.into_iter().map(|(a, b)| [a, b]).collect();
        let front = non_dominated(&objs);
        prop_assert!(!front.is_empty());
        for &i in &front {
            prop_assert!(!objs.iter().any(|o| dominates(*o, objs[i])));
        }
        for (j, o) in objs.iter().enumerate() {
            if !front.contains(&j) {
                prop_assert!(front.iter().any(|&i| dominates(objs[i], *o) || objs[i] == *o));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn herm_eig_reconstructs(m in (1usize..7).prop_flat_map(hermitian)) {
        let eig = m.herm_eig().unwrap();
        let scale = m.frobenius_norm();
        let err = eig.reconstruct().as_slice().iter().zip(m.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-9 * scale, "{err} vs {scale}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn symmetric_errors_keep_phi01_equal_phi10(
        preset in prop::sample::select(vec![Preset::To, Preset::Der, Preset::DerIGauss]),
        eps_delta in -1.0..1.0f64,
        eps_big_delta in -5.0..5.0f64,
        eps_omega in -0.05..0.05f64,
        delta_b in -0.1..0.1f64,
    ) {
        let p = preset.params();
        let e = ErrorSample {
            eps_delta: mhz(eps_delta),
            eps_big_delta: mhz(eps_big_delta),
            eps_omega_p: eps_omega,
            eps_omega_c: -eps_omega,
            delta_b: delta_b * p.blockade,
            ..ErrorSample::default()
        };
        let r = simulate_gate(&p, &e, &DecayConstants::none(), &IntegratorOptions::default(), PaperMode::SqrtTrace).unwrap();
        prop_assert!((r.phases[0] - r.phases[1]).abs() <= 1e-6, "{:?}", r.phases);
        for f in r.truth_table.iter().chain([r.fidelity_phase, r.fidelity_paper].iter()) {
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(f));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn open_evolution_stays_physical(
        eps_delta in -1.0..1.0f64,
        decay_scale in 0.0..20.0f64,
        gamma in 0.0..0.3f64,
        input in 0usize..4,
    ) {
        let p = Preset::Der.params();
        let base = DecayConstants::rubidium();
        let decay = DecayConstants { gamma_r: base.gamma_r * decay_scale, gamma_p: base.gamma_p * decay_scale, ..base };
        let e = ErrorSample { eps_delta: mhz(eps_delta), gamma1: gamma, gamma2: gamma, ..ErrorSample::default() };
        let rho0 = DensityMatrix::basis(rydberg_cz::qla::COMPUTATIONAL[input]);
        let rho = evolve(&p, &e, &decay, &IntegratorOptions::default(), &rho0).unwrap().rho;
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
        prop_assert!(rho.min_eigenvalue().unwrap() >= -1e-8);
        prop_assert!(rho.matrix().hermiticity_defect() <= 1e-10);
    }

    #[test]
    fn closed_evolution_preserves_purity(eps_delta in -1.0..1.0f64, eps_omega in -0.05..0.05f64) {
        let p = Preset::To.params();
        let e = ErrorSample { eps_delta: mhz(eps_delta), eps_omega_p: eps_omega, ..ErrorSample::default() };
        let rho0 = DensityMatrix::pure(&psi_plus()).unwrap();
        let rho = evolve(&p, &e, &DecayConstants::none(), &IntegratorOptions::default(), &rho0).unwrap().rho;
        prop_assert!((rho.purity() - 1.0).abs() <= 1e-7);
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic(seed in any::<u64>()) {
        let p = Preset::Der.params();
        let model = NoiseModel {
            eps_delta: Some(DistributionSpec::new(DistributionKind::Uniform, mhz(0.5))),
            ..NoiseModel::default()
        };
        let mc = MonteCarloOptions { samples: 6, seed, ..MonteCarloOptions::default() };
        let run = || monte_carlo_fidelity(&p, &model, &DecayConstants::none(), &IntegratorOptions::default(), &mc).unwrap();
        let (a, b) = (run(), run());
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        prop_assert_eq!(a.records, b.records);
    }
}
