use std::collections::BTreeSet;

use crate::dynamics::hamiltonian::Generator;
use crate::pulses::Half;
use crate::qla::{idx, Level, C64, I, LEVELS, TWO_ATOM_DIM, ZERO};

const N: usize = TWO_ATOM_DIM;
const P: usize = 2;
const R: usize = 3;
const UNUSED: u32 = u32::MAX;

/// `(to, from)` level pairs of the single-atom couplings, in the order used by
/// the amplitude table: `Ωp/2`, `Ωp*/2`, `Ωc/2`, `Ωc*/2`.
const COUPLINGS: [(usize, usize); 4] = [(P, 1), (1, P), (R, P), (P, R)];

fn level(a: usize, atom: usize) -> usize {
    if atom == 0 {
        a / LEVELS
    } else {
        a % LEVELS
    }
}

fn with_level(a: usize, atom: usize, l: usize) -> usize {
    if atom == 0 {
        l * LEVELS + a % LEVELS
    } else {
        (a / LEVELS) * LEVELS + l
    }
}

#[derive(Clone, Copy, Debug)]
struct Term {
    dst: u32,
    src: u32,
    /// Index into the 16-entry table of `∓i·amplitude` factors.
    amp: u32,
}

/// Lindblad generator restricted to the density-matrix elements reachable
/// from a given initial support. The dynamics leave `{0}`, `{1, p, r}` and
/// `{d}` invariant per atom up to jumps, so basis inputs stay in small blocks.
#[derive(Clone, Debug)]
pub struct SparseLindblad {
    pairs: Vec<(u8, u8)>,
    transpose: Vec<u32>,
    kappa: Vec<f64>,
    terms: Vec<Term>,
    gains: Vec<(u32, u32, f64)>,
    rr_shift: f64,
}

impl SparseLindblad {
    /// Builds the kernel for elements reachable from the nonzero pattern of
    /// `support` (a row-major 25×25 matrix).
    pub fn new(gen: &Generator, support: &[C64]) -> Self {
        let gains_local = gen.gain_table();
        let mut seen = vec![false; N * N];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for a in 0..N {
            for b in 0..N {
                if (support[a * N + b] != ZERO || support[b * N + a] != ZERO) && !seen[a * N + b] {
                    seen[a * N + b] = true;
                    stack.push((a, b));
                }
            }
        }
        let push = |x: usize, y: usize, seen: &mut Vec<bool>, stack: &mut Vec<(usize, usize)>| {
            if !seen[x * N + y] {
                seen[x * N + y] = true;
                stack.push((x, y));
            }
        };
        while let Some((a, b)) = stack.pop() {
            for atom in 0..2 {
                for &(to, from) in &COUPLINGS {
                    if level(a, atom) == from {
                        push(with_level(a, atom, to), b, &mut seen, &mut stack);
                    }
                    if level(b, atom) == from {
                        push(a, with_level(b, atom, to), &mut seen, &mut stack);
                    }
                }
                for &(src, dst, _) in &gains_local {
                    if level(a, atom) == src && level(b, atom) == src {
                        push(with_level(a, atom, dst), with_level(b, atom, dst), &mut seen, &mut stack);
                    }
                }
            }
        }
        let set: BTreeSet<(usize, usize)> = (0..N * N).filter(|&k| seen[k]).map(|k| (k / N, k % N)).collect();
        let mut pos = vec![UNUSED; N * N];
        let pairs: Vec<(u8, u8)> = set.iter().map(|&(a, b)| (a as u8, b as u8)).collect();
        for (i, &(a, b)) in set.iter().enumerate() {
            pos[a * N + b] = i as u32;
        }
        let transpose = pairs.iter().map(|&(a, b)| pos[b as usize * N + a as usize]).collect();
        let kappa = pairs.iter().map(|&(a, b)| gen.kappa(a as usize, b as usize)).collect();
        let mut terms = Vec::new();
        let mut gains = Vec::new();
        for (i, &(a, b)) in set.iter().enumerate() {
            for atom in 0..2 {
                for (kind, &(to, from)) in COUPLINGS.iter().enumerate() {
                    let amp = (atom * 4 + kind) as u32;
                    // (Hρ)_ab gets H_{a,k} ρ_kb with a at `to`, k at `from`.
                    if level(a, atom) == to {
                        let src = pos[with_level(a, atom, from) * N + b];
                        if src != UNUSED {
                            terms.push(Term { dst: i as u32, src, amp });
                        }
                    }
                    // (ρH)_ab gets ρ_ak H_{k,b} with k at `to`, b at `from`.
                    if level(b, atom) == from {
                        let src = pos[a * N + with_level(b, atom, to)];
                        if src != UNUSED {
                            terms.push(Term { dst: i as u32, src, amp: amp + 8 });
                        }
                    }
                }
                for &(src, dst, g) in &gains_local {
                    if level(a, atom) == dst && level(b, atom) == dst {
                        let s = pos[with_level(a, atom, src) * N + with_level(b, atom, src)];
                        if s != UNUSED {
                            gains.push((i as u32, s, g));
                        }
                    }
                }
            }
        }
        Self { pairs, transpose, kappa, terms, gains, rr_shift: gen.rr_shift() }
    }

    /// Number of retained elements.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Packs a dense 25×25 matrix into the retained elements.
    pub fn gather(&self, dense: &[C64]) -> Vec<C64> {
        self.pairs.iter().map(|&(a, b)| dense[a as usize * N + b as usize]).collect()
    }

    /// Expands packed elements back into a dense 25×25 matrix.
    pub fn scatter(&self, packed: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; N * N];
        for (&(a, b), v) in self.pairs.iter().zip(packed) {
            out[a as usize * N + b as usize] = *v;
        }
        out
    }

    /// Restores exact Hermiticity of a packed matrix.
    pub fn hermitize(&self, y: &mut [C64]) {
        for (i, &j) in self.transpose.iter().enumerate() {
            let j = j as usize;
            if j == i {
                y[i].im = 0.0;
            } else if j > i {
                let m = (y[i] + y[j].conj()) * 0.5;
                y[i] = m;
                y[j] = m.conj();
            }
        }
    }

    /// Packed right-hand side of the master equation.
    pub fn rhs(&self, gen: &Generator, t: f64, half: Half, y: &[C64], dy: &mut [C64]) {
        let frame = gen.frame(t, half);
        let rr = idx(Level::R, Level::R);
        let mut energy = [0.0; N];
        for (a, e) in energy.iter_mut().enumerate() {
            *e = frame.energy[a / LEVELS] + frame.energy[a % LEVELS] + if a == rr { self.rr_shift } else { 0.0 };
        }
        // Entries 0..8 carry -i (from -iHρ), entries 8..16 carry +i (from +iρH).
        let mut amps = [ZERO; 16];
        for atom in 0..2 {
            let (wp, wc) = frame.omega[atom];
            let half = [wp * 0.5, wp.conj() * 0.5, wc * 0.5, wc.conj() * 0.5];
            for (k, h) in half.into_iter().enumerate() {
                amps[atom * 4 + k] = -I * h;
                amps[8 + atom * 4 + k] = I * h;
            }
        }
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            let w = energy[a as usize] - energy[b as usize];
            dy[i] = y[i] * C64::new(-self.kappa[i], -w);
        }
        for term in &self.terms {
            dy[term.dst as usize] += amps[term.amp as usize] * y[term.src as usize];
        }
        for &(dst, src, g) in &self.gains {
            dy[dst as usize] += y[src as usize] * g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{DecayConstants, ErrorSample};
    use crate::pulses::Preset;
    use crate::qla::{BasisIndex, ComplexMatrix, DensityMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy() -> ErrorSample {
        ErrorSample {
            eps_delta: 2.0,
            eps_big_delta: 5.0,
            doppler_intermediate: -1.5,
            gamma1: 0.3,
            gamma2: 0.2,
            delta_b: -4.0,
            probe_phase_rate: 0.7,
            coupling_phase_rate: -0.4,
            ..ErrorSample::default()
        }
    }

    #[test]
    fn full_support_matches_dense_kernel() {
        let gen = Generator::new(Preset::Der.params(), noisy(), DecayConstants::rubidium());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut a = ComplexMatrix::zeros(N);
        for v in a.as_mut_slice() {
            *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let rho = a.matmul(&a.dagger());
        let k = SparseLindblad::new(&gen, rho.as_slice());
        assert_eq!(k.len(), N * N);
        let mut want = vec![ZERO; N * N];
        let mut scratch = vec![ZERO; N * N];
        gen.rhs_rho(-0.3, Half::First, rho.as_slice(), &mut want, &mut scratch);
        let y = k.gather(rho.as_slice());
        let mut dy = vec![ZERO; k.len()];
        k.rhs(&gen, -0.3, Half::First, &y, &mut dy);
        let got = k.scatter(&dy);
        let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-11 * scale);
        }
    }

    #[test]
    fn basis_inputs_use_small_blocks() {
        let gen = Generator::new(Preset::Der.params(), noisy(), DecayConstants::rubidium());
        let size =
            |c, t| SparseLindblad::new(&gen, DensityMatrix::basis(BasisIndex::new(c, t)).matrix().as_slice()).len();
        assert_eq!(size(Level::Zero, Level::Zero), 1);
        assert_eq!(size(Level::Zero, Level::One), 11);
        assert_eq!(size(Level::One, Level::One), 121);
    }
}
