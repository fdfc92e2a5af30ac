use crate::dynamics::{DecayConstants, ErrorSample};
use crate::pulses::{apply_modifiers, omega_c, omega_p, Half, PulseParams, WaveformSample};
use crate::qla::{idx, ket_bra, Atom, ComplexMatrix, Level, C64, I, LEVELS, TWO_ATOM_DIM, ZERO};

const N: usize = TWO_ATOM_DIM;
const P: usize = 2;
const R: usize = 3;

/// `(row, column, amplitude slot)` of every off-diagonal entry of the two-atom
/// Hamiltonian. Slots `4·atom + k` follow `Ωp/2, Ωp*/2, Ωc/2, Ωc*/2`.
const PURE_TERMS: [(u8, u8, u8); 40] = {
    let couplings = [(P, 1), (1, P), (R, P), (P, R)];
    let mut out = [(0u8, 0u8, 0u8); 40];
    let mut n = 0;
    let mut atom = 0;
    while atom < 2 {
        let mut k = 0;
        while k < 4 {
            let (to, from) = couplings[k];
            let mut other = 0;
            while other < LEVELS {
                let (r, c) = if atom == 0 {
                    (to * LEVELS + other, from * LEVELS + other)
                } else {
                    (other * LEVELS + to, other * LEVELS + from)
                };
                out[n] = (r as u8, c as u8, (atom * 4 + k) as u8);
                n += 1;
                other += 1;
            }
            k += 1;
        }
        atom += 1;
    }
    out
};

/// Field values seen by each atom at one instant, plus the level energies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldFrame {
    /// `(Ωp, Ωc)` for control and target.
    pub omega: [(C64, C64); 2],
    /// Single-atom diagonal energies indexed by level.
    pub energy: [f64; LEVELS],
}

fn waveform_half(t: f64, p: &PulseParams, e: &ErrorSample, half: Half) -> WaveformSample {
    WaveformSample {
        omega_p: C64::new(omega_p(t, p), 0.0),
        omega_c: C64::new(omega_c(t, p), 0.0),
        delta: half.sign() * (p.delta0 + e.eps_big_delta),
    }
}

impl FieldFrame {
    /// Fields at `t` with the detuning sign taken from `half`, so that the
    /// integrator can land exactly on `t = 0` from either side.
    pub fn at(t: f64, half: Half, p: &PulseParams, e: &ErrorSample) -> Self {
        let w = waveform_half(t, p, e, half);
        let c = apply_modifiers(w, t, e, Atom::Control);
        let g = apply_modifiers(w, t, e, Atom::Target);
        let mut energy = [0.0; LEVELS];
        energy[P] = -(w.delta + e.doppler_intermediate);
        energy[R] = -e.eps_delta;
        Self { omega: [(c.omega_p, c.omega_c), (g.omega_p, g.omega_c)], energy }
    }
}

/// Single-atom Hamiltonian for a given frame and atom.
pub fn single_atom_h(frame: &FieldFrame, atom: Atom) -> ComplexMatrix {
    let (wp, wc) = frame.omega[atom.index()];
    let mut h = ComplexMatrix::from_real_diag(&frame.energy);
    h[(P, 1)] = wp * 0.5;
    h[(1, P)] = wp.conj() * 0.5;
    h[(R, P)] = wc * 0.5;
    h[(P, R)] = wc.conj() * 0.5;
    h
}

/// Dense 25×25 two-atom Hamiltonian `H_c ⊗ 1 + 1 ⊗ H_t + (B + ΔB)|rr><rr|`.
pub fn two_atom_h(t: f64, half: Half, p: &PulseParams, e: &ErrorSample) -> ComplexMatrix {
    let frame = FieldFrame::at(t, half, p, e);
    let id = ComplexMatrix::identity(LEVELS);
    let mut h = &single_atom_h(&frame, Atom::Control).kron(&id) + &id.kron(&single_atom_h(&frame, Atom::Target));
    let rr = idx(Level::R, Level::R);
    h[(rr, rr)] += p.blockade + e.delta_b;
    h
}

/// Precomputed generator of the master equation for one parameter set and
/// error sample. Field-independent pieces (blockade, dissipator rates) are
/// tabulated once; fields are evaluated per call.
#[derive(Clone, Debug)]
pub struct Generator {
    pub params: PulseParams,
    pub errors: ErrorSample,
    pub decay: DecayConstants,
    /// Element-wise damping rate of `ρ_ab`.
    kappa: Vec<f64>,
    /// `(source level, destination level, rate)` for population feeding.
    gains: Vec<(usize, usize, f64)>,
    rr_shift: f64,
    dissipative: bool,
}

impl Generator {
    pub fn new(params: PulseParams, errors: ErrorSample, decay: DecayConstants) -> Self {
        let mut gamma = [0.0; LEVELS];
        gamma[P] = decay.gamma_p * decay.branching_p.iter().sum::<f64>();
        gamma[R] = decay.gamma_r * decay.branching_r.iter().sum::<f64>();
        let dest = [Level::Zero.index(), Level::One.index(), Level::D.index()];
        let mut gains = Vec::new();
        for (src, rate, br) in [(P, decay.gamma_p, decay.branching_p), (R, decay.gamma_r, decay.branching_r)] {
            for (d, b) in dest.iter().zip(br) {
                if rate * b != 0.0 {
                    gains.push((src, *d, rate * b));
                }
            }
        }
        // Eigenvalues of the two dephasing operators on each level.
        let mut d1 = [0.0f64; LEVELS];
        d1[1] = -1.0;
        d1[P] = 1.0;
        let mut d2 = [0.0f64; LEVELS];
        d2[P] = -1.0;
        d2[R] = 1.0;
        let (g1, g2) = (errors.gamma1, errors.gamma2);
        let local = |x: usize, y: usize| {
            0.5 * (gamma[x] + gamma[y]) + 0.25 * g1 * (d1[x] - d1[y]).powi(2) + 0.25 * g2 * (d2[x] - d2[y]).powi(2)
        };
        let mut kappa = vec![0.0; N * N];
        for a in 0..N {
            let (ac, at) = (a / LEVELS, a % LEVELS);
            for b in 0..N {
                let (bc, bt) = (b / LEVELS, b % LEVELS);
                kappa[a * N + b] = local(ac, bc) + local(at, bt);
            }
        }
        let dissipative = kappa.iter().any(|&k| k != 0.0);
        Self { params, errors, decay, kappa, gains, rr_shift: params.blockade + errors.delta_b, dissipative }
    }

    /// True when any decay or dephasing channel is active.
    pub fn is_dissipative(&self) -> bool {
        self.dissipative
    }

    pub(crate) fn kappa(&self, a: usize, b: usize) -> f64 {
        self.kappa[a * N + b]
    }

    pub(crate) fn gain_table(&self) -> Vec<(usize, usize, f64)> {
        self.gains.clone()
    }

    pub(crate) fn rr_shift(&self) -> f64 {
        self.rr_shift
    }

    pub fn frame(&self, t: f64, half: Half) -> FieldFrame {
        FieldFrame::at(t, half, &self.params, &self.errors)
    }

    /// `out = H x` for `x` a row-major `25 × cols` block.
    pub fn apply_h(&self, frame: &FieldFrame, x: &[C64], cols: usize, out: &mut [C64]) {
        debug_assert_eq!(x.len(), N * cols);
        let rr = idx(Level::R, Level::R);
        for row in 0..N {
            let e =
                frame.energy[row / LEVELS] + frame.energy[row % LEVELS] + if row == rr { self.rr_shift } else { 0.0 };
            let o = &mut out[row * cols..(row + 1) * cols];
            let xr = &x[row * cols..(row + 1) * cols];
            for k in 0..cols {
                o[k] = xr[k] * e;
            }
        }
        for (atom, stride) in [(0usize, LEVELS), (1usize, 1usize)] {
            let (wp, wc) = frame.omega[atom];
            let couplings = [(P, 1, wp * 0.5), (1, P, wp.conj() * 0.5), (R, P, wc * 0.5), (P, R, wc.conj() * 0.5)];
            for other in 0..LEVELS {
                let base = if atom == 0 { other } else { other * LEVELS };
                for &(to, from, amp) in &couplings {
                    if amp == ZERO {
                        continue;
                    }
                    let (rt, rf) = (base + to * stride, base + from * stride);
                    for k in 0..cols {
                        out[rt * cols + k] += amp * x[rf * cols + k];
                    }
                }
            }
        }
    }

    /// `dψ/dt = -i H ψ`.
    pub fn rhs_pure(&self, t: f64, half: Half, psi: &[C64], dpsi: &mut [C64]) {
        let frame = self.frame(t, half);
        let rr = idx(Level::R, Level::R);
        for (a, (d, x)) in dpsi.iter_mut().zip(psi).enumerate() {
            let e = frame.energy[a / LEVELS] + frame.energy[a % LEVELS] + if a == rr { self.rr_shift } else { 0.0 };
            *d = C64::new(x.im * e, -x.re * e);
        }
        let mut amps = [ZERO; 8];
        for atom in 0..2 {
            let (wp, wc) = frame.omega[atom];
            amps[atom * 4] = -I * wp * 0.5;
            amps[atom * 4 + 1] = -I * wp.conj() * 0.5;
            amps[atom * 4 + 2] = -I * wc * 0.5;
            amps[atom * 4 + 3] = -I * wc.conj() * 0.5;
        }
        for &(to, from, k) in PURE_TERMS.iter() {
            dpsi[to as usize] += amps[k as usize] * psi[from as usize];
        }
    }

    /// `dρ/dt = -i[H, ρ] + D(ρ)`; `scratch` must hold 625 entries.
    pub fn rhs_rho(&self, t: f64, half: Half, rho: &[C64], drho: &mut [C64], scratch: &mut [C64]) {
        let frame = self.frame(t, half);
        self.apply_h(&frame, rho, N, scratch);
        // ρ is Hermitian, so ρH = (Hρ)†.
        for a in 0..N {
            for b in 0..N {
                drho[a * N + b] = -I * (scratch[a * N + b] - scratch[b * N + a].conj());
            }
        }
        if !self.dissipative {
            return;
        }
        for (k, d) in drho.iter_mut().enumerate() {
            *d -= rho[k] * self.kappa[k];
        }
        for &(src, dst, g) in &self.gains {
            for o in 0..LEVELS {
                for o2 in 0..LEVELS {
                    // Control atom jump.
                    drho[(dst * LEVELS + o) * N + dst * LEVELS + o2] +=
                        rho[(src * LEVELS + o) * N + src * LEVELS + o2] * g;
                    // Target atom jump.
                    drho[(o * LEVELS + dst) * N + o2 * LEVELS + dst] +=
                        rho[(o * LEVELS + src) * N + o2 * LEVELS + src] * g;
                }
            }
        }
    }
}

/// Dense Lindblad right-hand side built from explicit jump operators. Slow;
/// used to cross-check [`Generator::rhs_rho`].
pub fn lindblad_rhs(t: f64, half: Half, gen: &Generator, rho: &ComplexMatrix) -> ComplexMatrix {
    let h = two_atom_h(t, half, &gen.params, &gen.errors);
    let mut out = (&h.matmul(rho) - &rho.matmul(&h)).scale(-I);
    let id = ComplexMatrix::identity(LEVELS);
    let mut local_ops = Vec::new();
    let d = &gen.decay;
    for (src, rate, br) in [(Level::P, d.gamma_p, d.branching_p), (Level::R, d.gamma_r, d.branching_r)] {
        for (dst, b) in [Level::Zero, Level::One, Level::D].into_iter().zip(br) {
            local_ops.push(ket_bra(dst, src).scale(C64::new((rate * b).sqrt(), 0.0)));
        }
    }
    let e = &gen.errors;
    local_ops.push(
        (&ket_bra(Level::P, Level::P) - &ket_bra(Level::One, Level::One)).scale(C64::new((e.gamma1 / 2.0).sqrt(), 0.0)),
    );
    local_ops.push(
        (&ket_bra(Level::R, Level::R) - &ket_bra(Level::P, Level::P)).scale(C64::new((e.gamma2 / 2.0).sqrt(), 0.0)),
    );
    for op in &local_ops {
        for l in [op.kron(&id), id.kron(op)] {
            let ld = l.dagger();
            let ldl = ld.matmul(&l);
            let jump = l.matmul(rho).matmul(&ld);
            let anti = &ldl.matmul(rho) + &rho.matmul(&ldl);
            out = &(&out + &jump) - &anti.scale(C64::new(0.5, 0.0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::Preset;
    use crate::qla::DensityMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rho(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(N);
        for v in a.as_mut_slice() {
            *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let m = a.matmul(&a.dagger());
        let tr = m.trace();
        m.scale(tr.inv())
    }

    fn noisy_sample() -> ErrorSample {
        let mut e = ErrorSample {
            eps_delta: 3.1,
            eps_big_delta: -7.0,
            doppler_intermediate: 2.5,
            eps_omega_p: 0.02,
            eps_omega_c: -0.03,
            gamma1: 0.4,
            gamma2: 0.7,
            delta_b: 11.0,
            probe_phase_rate: -1.3,
            coupling_phase_rate: 0.6,
            ..ErrorSample::default()
        };
        e.placements[1].probe_factor = 0.97;
        e.placements[0].coupling_factor = 0.99;
        e
    }

    #[test]
    fn dense_hamiltonian_hermitian() {
        let p = Preset::Der.params();
        for &t in &[-0.8, -0.1, 0.0, 0.3] {
            let h = two_atom_h(t, Half::of(t), &p, &noisy_sample());
            assert!(h.is_hermitian(1e-12));
        }
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let p = Preset::Der.params();
        let e = noisy_sample();
        let gen = Generator::new(p, e, DecayConstants::rubidium());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<C64> = (0..N * 3).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        for &t in &[-0.5, 0.2] {
            let half = Half::of(t);
            let dense = two_atom_h(t, half, &p, &e);
            let mut out = vec![ZERO; N * 3];
            gen.apply_h(&gen.frame(t, half), &x, 3, &mut out);
            for r in 0..N {
                for c in 0..3 {
                    let want: C64 = (0..N).map(|k| dense[(r, k)] * x[k * 3 + c]).sum();
                    assert!((out[r * 3 + c] - want).norm() < 1e-9 * (1.0 + want.norm()));
                }
            }
        }
    }

    #[test]
    fn fast_rhs_matches_jump_operator_form() {
        let p = Preset::Der.params();
        let gen = Generator::new(p, noisy_sample(), DecayConstants::rubidium());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &t in &[-0.7, -0.05, 0.4] {
            let half = Half::of(t);
            let rho = random_rho(&mut rng);
            let want = lindblad_rhs(t, half, &gen, &rho);
            let mut got = vec![ZERO; N * N];
            let mut scratch = vec![ZERO; N * N];
            gen.rhs_rho(t, half, rho.as_slice(), &mut got, &mut scratch);
            let scale = want.max_abs();
            for (g, w) in got.iter().zip(want.as_slice()) {
                assert!((g - w).norm() < 1e-10 * scale, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn rhs_is_trace_free_and_hermitian() {
        let p = Preset::To.params();
        let gen = Generator::new(p, noisy_sample(), DecayConstants::rubidium());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_rho(&mut rng);
        let mut d = vec![ZERO; N * N];
        let mut s = vec![ZERO; N * N];
        gen.rhs_rho(-0.2, Half::First, rho.as_slice(), &mut d, &mut s);
        let dm = ComplexMatrix::from_vec(d).unwrap();
        assert!(dm.trace().norm() < 1e-9 * dm.max_abs());
        assert!(dm.hermiticity_defect() < 1e-9 * dm.max_abs());
    }

    #[test]
    fn rydberg_pair_decay_rate() {
        // Without fields, |rr><rr| decays at 2γr.
        let mut p = Preset::Der.params();
        p.omega_p_max = 0.0;
        p.omega_c_max = 0.0;
        let gen = Generator::new(p, ErrorSample::default(), DecayConstants::rubidium());
        let rr = idx(Level::R, Level::R);
        let rho = DensityMatrix::basis(crate::qla::BasisIndex::new(Level::R, Level::R));
        let mut d = vec![ZERO; N * N];
        let mut s = vec![ZERO; N * N];
        gen.rhs_rho(0.1, Half::Second, rho.matrix().as_slice(), &mut d, &mut s);
        assert!((d[rr * N + rr].re + 2.0 / 375.0).abs() < 1e-14);
        let rd = idx(Level::R, Level::D);
        assert!((d[rd * N + rd].re - 0.886 / 375.0).abs() < 1e-14);
    }

    #[test]
    fn detuning_sign_follows_half() {
        let p = Preset::Der.params();
        let e = ErrorSample::default();
        let a = FieldFrame::at(0.0, Half::First, &p, &e);
        let b = FieldFrame::at(0.0, Half::Second, &p, &e);
        assert_eq!(a.energy[P], -p.delta0);
        assert_eq!(b.energy[P], p.delta0);
    }
}
