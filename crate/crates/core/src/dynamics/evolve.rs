use crate::dynamics::hamiltonian::Generator;
use crate::dynamics::ode::{rk4_fixed, Dop853, OdeStats};
use crate::dynamics::sparse::SparseLindblad;
use crate::dynamics::{DecayConstants, ErrorSample, IntegratorOptions, Method};
use crate::error::{Error, Result};
use crate::pulses::{Half, PulseParams};
use crate::qla::{hermitize_in_place, ComplexMatrix, DensityMatrix, C64, TWO_ATOM_DIM};

const N: usize = TWO_ATOM_DIM;

/// Final density matrix of a gate run.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub rho: DensityMatrix,
    pub stats: OdeStats,
}

/// Final state vector of a dissipation-free gate run.
#[derive(Clone, Debug)]
pub struct PureEvolution {
    pub psi: Vec<C64>,
    pub stats: OdeStats,
}

fn run_segment<F, P>(
    opts: &IntegratorOptions,
    width: f64,
    f: F,
    t0: f64,
    t1: f64,
    y: &mut [C64],
    post: P,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    P: FnMut(&mut [C64]),
{
    let stats = match opts.method {
        Method::Adaptive => Dop853 {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            max_step: opts.max_step.unwrap_or(width / 20.0),
            max_steps: opts.max_steps,
        }
        .integrate(f, t0, t1, y, post)?,
        Method::FixedRk4 { dt } => rk4_fixed(f, t0, t1, dt, y, post)?,
    };
    if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite(t1));
    }
    Ok(stats)
}

/// Splits `[a, b]` at the detuning switch and tags each piece with its half.
fn pieces(a: f64, b: f64) -> Vec<(f64, f64, Half)> {
    let mut out = Vec::new();
    if a < 0.0 {
        out.push((a, b.min(0.0), Half::First));
    }
    if b > 0.0 {
        out.push((a.max(0.0), b, Half::Second));
    }
    out.retain(|(x, y, _)| y - x > 1e-12);
    out
}

fn sample_times(p: &PulseParams, n: usize) -> Vec<f64> {
    let (a, b) = (p.t_start(), p.t_end());
    let n = n.max(2);
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn check_inputs(p: &PulseParams, e: &ErrorSample, opts: &IntegratorOptions) -> Result<()> {
    p.validate()?;
    e.validate()?;
    opts.validate()
}

struct RhoStepper {
    gen: Generator,
    kernel: SparseLindblad,
    opts: IntegratorOptions,
}

impl RhoStepper {
    fn advance(&mut self, a: f64, b: f64, y: &mut [C64], stats: &mut OdeStats) -> Result<()> {
        for (t0, t1, half) in pieces(a, b) {
            let (gen, kernel) = (&self.gen, &self.kernel);
            let f = |t: f64, x: &[C64], dx: &mut [C64]| kernel.rhs(gen, t, half, x, dx);
            *stats += run_segment(&self.opts, gen.params.width, f, t0, t1, y, |s| kernel.hermitize(s))?;
        }
        Ok(())
    }
}

fn rho_stepper(
    p: &PulseParams,
    e: &ErrorSample,
    decay: &DecayConstants,
    opts: &IntegratorOptions,
    rho0: &DensityMatrix,
) -> Result<RhoStepper> {
    check_inputs(p, e, opts)?;
    decay.validate()?;
    let gen = Generator::new(*p, *e, *decay);
    let kernel = SparseLindblad::new(&gen, rho0.matrix().as_slice());
    Ok(RhoStepper { gen, kernel, opts: *opts })
}

fn unpack(kernel: &SparseLindblad, y: &[C64]) -> Result<DensityMatrix> {
    let mut dense = kernel.scatter(y);
    hermitize_in_place(&mut dense, N);
    DensityMatrix::from_matrix(ComplexMatrix::from_vec(dense)?)
}

/// Propagates `rho0` through the full gate under the Lindblad master equation.
pub fn evolve(
    p: &PulseParams,
    e: &ErrorSample,
    decay: &DecayConstants,
    opts: &IntegratorOptions,
    rho0: &DensityMatrix,
) -> Result<Evolution> {
    let mut st = rho_stepper(p, e, decay, opts, rho0)?;
    let mut y = st.kernel.gather(rho0.matrix().as_slice());
    let mut stats = OdeStats::default();
    st.advance(p.t_start(), p.t_end(), &mut y, &mut stats)?;
    Ok(Evolution { rho: unpack(&st.kernel, &y)?, stats })
}

/// Like [`evolve`], also returning the state at `n` evenly spaced times
/// spanning the gate (both endpoints included).
pub fn evolve_trajectory(
    p: &PulseParams,
    e: &ErrorSample,
    decay: &DecayConstants,
    opts: &IntegratorOptions,
    rho0: &DensityMatrix,
    n: usize,
) -> Result<(Evolution, Vec<(f64, DensityMatrix)>)> {
    let mut st = rho_stepper(p, e, decay, opts, rho0)?;
    let times = sample_times(p, n);
    let mut y = st.kernel.gather(rho0.matrix().as_slice());
    let mut stats = OdeStats::default();
    let mut traj = vec![(times[0], rho0.clone())];
    for w in times.windows(2) {
        st.advance(w[0], w[1], &mut y, &mut stats)?;
        traj.push((w[1], unpack(&st.kernel, &y)?));
    }
    let rho = traj.last().map(|(_, r)| r.clone()).unwrap_or_else(|| rho0.clone());
    Ok((Evolution { rho, stats }, traj))
}

fn pure_generator(p: &PulseParams, e: &ErrorSample, opts: &IntegratorOptions, psi0: &[C64]) -> Result<Generator> {
    check_inputs(p, e, opts)?;
    if e.has_dephasing() {
        return Err(Error::InvalidParameter("state-vector propagation cannot include dephasing".into()));
    }
    if psi0.len() != N {
        return Err(Error::Dimension(format!("state vector has {} entries, expected {N}", psi0.len())));
    }
    Ok(Generator::new(*p, *e, DecayConstants::none()))
}

fn advance_pure(
    gen: &Generator,
    opts: &IntegratorOptions,
    a: f64,
    b: f64,
    y: &mut [C64],
    stats: &mut OdeStats,
) -> Result<()> {
    for (t0, t1, half) in pieces(a, b) {
        let f = |t: f64, x: &[C64], dx: &mut [C64]| gen.rhs_pure(t, half, x, dx);
        *stats += run_segment(opts, gen.params.width, f, t0, t1, y, |_| {})?;
    }
    Ok(())
}

/// Schrödinger propagation of `psi0` with no decay or dephasing. Equivalent
/// to [`evolve`] on `|ψ><ψ|` with [`DecayConstants::none`], at 1/25 the cost.
pub fn evolve_pure(p: &PulseParams, e: &ErrorSample, opts: &IntegratorOptions, psi0: &[C64]) -> Result<PureEvolution> {
    let gen = pure_generator(p, e, opts, psi0)?;
    let mut y = psi0.to_vec();
    let mut stats = OdeStats::default();
    advance_pure(&gen, opts, p.t_start(), p.t_end(), &mut y, &mut stats)?;
    Ok(PureEvolution { psi: y, stats })
}

/// State vector at `n` evenly spaced times spanning the gate.
pub fn evolve_pure_trajectory(
    p: &PulseParams,
    e: &ErrorSample,
    opts: &IntegratorOptions,
    psi0: &[C64],
    n: usize,
) -> Result<Vec<(f64, Vec<C64>)>> {
    let gen = pure_generator(p, e, opts, psi0)?;
    let times = sample_times(p, n);
    let mut y = psi0.to_vec();
    let mut stats = OdeStats::default();
    let mut traj = vec![(times[0], y.clone())];
    for w in times.windows(2) {
        advance_pure(&gen, opts, w[0], w[1], &mut y, &mut stats)?;
        traj.push((w[1], y.clone()));
    }
    Ok(traj)
}
