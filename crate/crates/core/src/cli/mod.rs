//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal error, 2 configuration or argument
//! error, 3 integrator failure, 4 I/O error.

pub mod config;
pub mod output;
pub mod plot;
pub mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use reproduce::{reproduce, Curve, CurvePoint, Figure, FigureReport};

use crate::dynamics::{evolve_pure_trajectory, evolve_trajectory, ErrorSample};
use crate::error::{Error, Result};
use crate::metrics::{infidelity_scan, simulate_gate, FidelityConvention, FidelityMeasure, PaperMode};
use crate::noise::monte_carlo_fidelity;
use crate::optimize::{eval_cost_breakdown, ga_minimize, pareto_front, CostKind, ParetoObjectives};
use crate::pulses::mhz;
use crate::qla::{idx, BasisIndex, DensityMatrix, Level, COMPUTATIONAL, TWO_ATOM_DIM};
use output::{num, OutDir, Table};
use plot::{Plot, Series};

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INTEGRATOR: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Maps a library error onto the documented exit codes.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::InvalidParameter(_) => EXIT_CONFIG,
        e if e.is_integrator_failure() => EXIT_INTEGRATOR,
        _ => EXIT_INTERNAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "rydberg-cz", version, about = "Double-STIRAP Rydberg CZ gate simulator and pulse optimizer")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Pulse preset: to, to_printed, der, der_i_gauss, der_i_uniform.
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Seed for sampling and both optimizers.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte-Carlo samples per point.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, value_name = "K")]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Full sample counts and grids; much slower.
    #[arg(long, global = true)]
    pub paper_scale: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulates one gate and writes gate_result.csv.
    Simulate {
        /// Input state for the return population and trajectory: 00, 01, 10 or 11.
        #[arg(long, default_value = "11")]
        input: String,
        /// Static two-photon detuning error (MHz).
        #[arg(long, default_value_t = 0.0)]
        eps_delta_mhz: f64,
        /// Also write a trajectory with this many time points.
        #[arg(long, value_name = "POINTS")]
        trajectory: Option<usize>,
    },
    /// Infidelity over a grid of detuning errors.
    Scan,
    /// Averages the gate fidelity over the configured noise model.
    Montecarlo,
    /// Genetic minimization of the configured cost.
    Optimize,
    /// Two-objective Pareto search.
    Pareto {
        /// der or der_i; defaults to the configured cost kind.
        #[arg(long)]
        objectives: Option<String>,
    },
    /// Regenerates a figure: 1c, 2, 3, 4, 5, 6, 7, 7a, 7b, 7c or 7d.
    Reproduce { figure: String },
    /// Prints the effective configuration as TOML.
    Config,
}

/// Loads the configuration and applies flag overrides.
pub fn resolve_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("cannot read {}: {io}", path.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    if let Some(p) = &g.preset {
        cfg.set_preset(p);
    }
    if g.paper_scale {
        cfg.apply_paper_scale();
    }
    if let Some(s) = g.seed {
        cfg.set_seed(s);
    }
    if let Some(n) = g.samples {
        cfg.sampling.samples = n;
    }
    if let Some(o) = &g.out {
        cfg.output.dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_input(s: &str) -> Result<BasisIndex> {
    let pos = ["00", "01", "10", "11"].iter().position(|x| *x == s);
    pos.map(|k| COMPUTATIONAL[k]).ok_or_else(|| Error::Config(format!("input must be 00, 01, 10 or 11, got '{s}'")))
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(&cli.global)?;
    if let Some(k) = cli.global.workers {
        if k == 0 {
            return Err(Error::Config("--workers must be >= 1".into()));
        }
        // A pool may already exist when called from a host process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    if cfg.sampling.paper_scale {
        eprintln!("warning: paper scale selected ({} samples per point); runs take hours", cfg.sampling.samples);
    }
    let root = cfg.output.dir.clone();
    match &cli.command {
        Command::Simulate { input, eps_delta_mhz, trajectory } => {
            cmd_simulate(&cfg, parse_input(input)?, *eps_delta_mhz, *trajectory).map(|_| ())
        }
        Command::Scan => cmd_scan(&cfg).map(|_| ()),
        Command::Montecarlo => cmd_montecarlo(&cfg).map(|_| ()),
        Command::Optimize => cmd_optimize(&cfg).map(|_| ()),
        Command::Pareto { objectives } => {
            let obj = match objectives.as_deref() {
                Some("der") => ParetoObjectives::Der,
                Some("der_i") | Some("der-i") => ParetoObjectives::DerI,
                Some(o) => return Err(Error::Config(format!("unknown objectives '{o}'"))),
                None if cfg.cost.kind == CostKind::DerI => ParetoObjectives::DerI,
                None => ParetoObjectives::Der,
            };
            cmd_pareto(&cfg, obj).map(|_| ())
        }
        Command::Reproduce { figure } => {
            let fig = Figure::parse(figure)?;
            let r = reproduce(fig, &cfg, &root)?;
            println!("wrote {}", r.dir.display());
            Ok(())
        }
        Command::Config => {
            print!("{}", cfg.to_toml());
            Ok(())
        }
    }
}

fn phase_pi(x: f64) -> f64 {
    x.rem_euclid(std::f64::consts::TAU) / std::f64::consts::PI
}

/// Simulates the configured gate; returns the output directory.
pub fn cmd_simulate(
    cfg: &RunConfig,
    input: BasisIndex,
    eps_delta_mhz: f64,
    trajectory: Option<usize>,
) -> Result<PathBuf> {
    let p = cfg.pulse_params()?;
    let decay = cfg.decay();
    let e = ErrorSample::with_eps_delta(mhz(eps_delta_mhz));
    let r = simulate_gate(&p, &e, &decay, &cfg.integrator, PaperMode::SqrtTrace)?;
    let channel = COMPUTATIONAL.iter().position(|b| *b == input).expect("computational input");
    let k = input.flat();
    let ret = r.final_states[channel].matrix()[(k, k)].re;
    let mut out = OutDir::create(cfg.output.dir.join("simulate"), "simulate", cfg)?;
    let mut t = Table::new(&[
        "preset",
        "t1",
        "t2",
        "width",
        "eps_delta_mhz",
        "decays",
        "F00",
        "F01",
        "F10",
        "F11",
        "phi01_pi",
        "phi10_pi",
        "phi11_pi",
        "phase_condition_pi",
        "fidelity_phase",
        "fidelity_phase_squared",
        "fidelity_paper",
        "fidelity_paper_average",
        "input",
        "return_population",
    ]);
    let mut row = vec![
        cfg.pulse.preset.clone(),
        num(p.t1),
        num(p.t2),
        num(p.width),
        num(eps_delta_mhz),
        (!decay.is_zero()).to_string(),
    ];
    row.extend(r.truth_table.map(num));
    row.extend(r.phases.map(|x| num(phase_pi(x))));
    row.push(num(r.phase_condition() / std::f64::consts::PI));
    row.push(num(r.fidelity(FidelityConvention::Root)));
    row.push(num(r.fidelity(FidelityConvention::Squared)));
    row.push(num(r.fidelity_paper));
    row.push(num(r.measure(FidelityMeasure::TruthTable(PaperMode::Average))));
    row.push(label_of(input));
    row.push(num(ret));
    t.push(row);
    out.table("gate_result.csv", &t)?;
    println!("pulse {} (t1 {}, t2 {}, width {}) us", cfg.pulse.preset, p.t1, p.t2, p.width);
    println!(
        "truth table  {:.6} {:.6} {:.6} {:.6}",
        r.truth_table[0], r.truth_table[1], r.truth_table[2], r.truth_table[3]
    );
    println!(
        "phases / pi  phi01 {:.5}  phi10 {:.5}  phi11 {:.5}",
        phase_pi(r.phases[0]),
        phase_pi(r.phases[1]),
        phase_pi(r.phases[2])
    );
    println!("fidelity_phase {:.6}", r.fidelity(FidelityConvention::Root));
    println!("fidelity_paper {:.6}", r.fidelity_paper);
    println!("return population of |{}> {:.6}", label_of(input), ret);
    if let Some(n) = trajectory {
        out.table("trajectory.csv", &trajectory_table(cfg, input, &e, n.max(2))?)?;
    }
    out.finish()
}

fn label_of(b: BasisIndex) -> String {
    let pos = COMPUTATIONAL.iter().position(|x| *x == b).unwrap_or(0);
    ["00", "01", "10", "11"][pos].to_string()
}

fn trajectory_table(cfg: &RunConfig, input: BasisIndex, e: &ErrorSample, n: usize) -> Result<Table> {
    let p = cfg.pulse_params()?;
    let decay = cfg.decay();
    let k = input.flat();
    let partners = [idx(Level::One, Level::R), idx(Level::R, Level::One), idx(Level::R, Level::R)];
    let names = ["0", "1", "p", "r", "d"];
    let mut header = vec!["t_us".to_string()];
    for a in 0..TWO_ATOM_DIM {
        header.push(format!("pop_{}{}", names[a / 5], names[a % 5]));
    }
    for q in partners {
        header.push(format!("coh_{}_{}{}", label_of(input), names[q / 5], names[q % 5]));
    }
    let mut t = Table::new(&header);
    let rows: Vec<(f64, DensityMatrix)> = if decay.is_zero() {
        let mut psi0 = vec![crate::qla::ZERO; TWO_ATOM_DIM];
        psi0[k] = crate::qla::ONE;
        evolve_pure_trajectory(&p, e, &cfg.integrator, &psi0, n)?
            .into_iter()
            .map(|(t, psi)| DensityMatrix::pure(&psi).map(|d| (t, d)))
            .collect::<Result<_>>()?
    } else {
        evolve_trajectory(&p, e, &decay, &cfg.integrator, &DensityMatrix::basis(input), n)?.1
    };
    for (time, rho) in rows {
        let m = rho.matrix();
        let mut row = vec![num(time)];
        row.extend((0..TWO_ATOM_DIM).map(|a| num(m[(a, a)].re)));
        row.extend(partners.iter().map(|&q| num(m[(k, q)].norm())));
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_scan(cfg: &RunConfig) -> Result<PathBuf> {
    let p = cfg.pulse_params()?;
    let grid = cfg.scan.grid();
    let pts =
        infidelity_scan(&p, &grid, &cfg.decay(), &cfg.integrator, FidelityConvention::Root, PaperMode::SqrtTrace)?;
    let mut out = OutDir::create(cfg.output.dir.join("scan"), "scan", cfg)?;
    let mut t = Table::new(&["eps_delta_MHz", "infidelity_phase", "infidelity_paper"]);
    for s in &pts {
        t.push(vec![num(s.eps_delta / mhz(1.0)), num(s.infidelity_phase), num(s.infidelity_paper)]);
    }
    out.table("scan.csv", &t)?;
    let plot = Plot::new(format!("{} pulse", cfg.pulse.preset), "eps_delta / 2pi (MHz)", "1 - F")
        .log_y()
        .with(Series::line("truth table", pts.iter().map(|s| (s.eps_delta / mhz(1.0), s.infidelity_paper)).collect()))
        .with(Series::markers("phase", pts.iter().map(|s| (s.eps_delta / mhz(1.0), s.infidelity_phase)).collect()));
    out.text("scan.svg", &plot.render())?;
    out.finish()
}

pub fn cmd_montecarlo(cfg: &RunConfig) -> Result<PathBuf> {
    let p = cfg.pulse_params()?;
    let mc = cfg.monte_carlo()?;
    let r = monte_carlo_fidelity(&p, &cfg.noise.model(), &cfg.decay(), &cfg.integrator, &mc)?;
    let mut out = OutDir::create(cfg.output.dir.join("montecarlo"), "montecarlo", cfg)?;
    let mut s = Table::new(&[
        "measure",
        "mean_fidelity",
        "mean_infidelity",
        "stderr",
        "n_samples",
        "n_failed",
        "mean_secondary",
    ]);
    s.push(vec![
        mc.measure.name(),
        num(r.mean),
        num(1.0 - r.mean),
        num(r.stderr),
        (r.n_ok + r.n_failed).to_string(),
        r.n_failed.to_string(),
        r.mean_secondary.map(num).unwrap_or_default(),
    ]);
    out.table("summary.csv", &s)?;
    let mut t = Table::new(&[
        "index",
        "eps_delta_mhz",
        "eps_big_delta_mhz",
        "doppler_intermediate_mhz",
        "eps_omega_p",
        "eps_omega_c",
        "gamma1_khz",
        "gamma2_khz",
        "delta_b_mhz",
        "probe_factor_c",
        "coupling_factor_c",
        "probe_factor_t",
        "coupling_factor_t",
        "fidelity",
        "fidelity_secondary",
        "error",
    ]);
    let f = mhz(1.0);
    for rec in &r.records {
        let e = &rec.sample;
        t.push(vec![
            rec.index.to_string(),
            num(e.eps_delta / f),
            num(e.eps_big_delta / f),
            num(e.doppler_intermediate / f),
            num(e.eps_omega_p),
            num(e.eps_omega_c),
            num(e.gamma1 / f * 1e3),
            num(e.gamma2 / f * 1e3),
            num(e.delta_b / f),
            num(e.placements[0].probe_factor),
            num(e.placements[0].coupling_factor),
            num(e.placements[1].probe_factor),
            num(e.placements[1].coupling_factor),
            rec.fidelity.map(num).unwrap_or_default(),
            rec.fidelity_secondary.map(num).unwrap_or_default(),
            rec.error.clone().unwrap_or_default(),
        ]);
    }
    out.table("samples.csv", &t)?;
    if r.n_failed > 0 {
        eprintln!("warning: {} of {} samples failed and were excluded", r.n_failed, r.records.len());
    }
    println!("mean fidelity {:.6} ± {:.2e} ({} samples, {} failed)", r.mean, r.stderr, r.n_ok, r.n_failed);
    out.finish()
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<PathBuf> {
    let spec = cfg.cost_spec()?;
    let base = cfg.pulse_params()?;
    let r = ga_minimize(&spec, &base, &cfg.ga)?;
    let mut out = OutDir::create(cfg.output.dir.join("optimize"), "optimize", cfg)?;
    let mut h = Table::new(&["generation", "best_cost", "mean_cost", "best_t1", "best_t2", "best_omega"]);
    for rec in &r.history {
        h.push(vec![
            rec.generation.to_string(),
            num(rec.best_cost),
            num(rec.mean_cost),
            num(rec.best[0]),
            num(rec.best[1]),
            num(rec.best[2]),
        ]);
    }
    out.table("history.csv", &h)?;
    let best = crate::pulses::PulseParams { t1: r.best[0], t2: r.best[1], width: r.best[2], ..base };
    let b = eval_cost_breakdown(&spec, &best);
    let mut t = Table::new(&["kind", "cost", "J1", "J2", "t1", "t2", "omega", "evaluations"]);
    t.push(vec![
        spec.kind.name().into(),
        num(b.cost),
        num(b.j1),
        num(b.j2),
        num(r.best[0]),
        num(r.best[1]),
        num(r.best[2]),
        r.evaluations.to_string(),
    ]);
    out.table("best.csv", &t)?;
    let plot = Plot::new(format!("{} cost", spec.kind.name()), "generation", "cost")
        .log_y()
        .with(Series::line("best", r.history.iter().map(|x| (x.generation as f64, x.best_cost)).collect()))
        .with(Series::line("mean", r.history.iter().map(|x| (x.generation as f64, x.mean_cost)).collect()));
    out.text("history.svg", &plot.render())?;
    out.note(format!("ga options: {:?}", cfg.ga));
    println!(
        "best (t1, t2, omega) = ({:.4}, {:.4}, {:.4}) us, cost {:.3e}, J1 {:.3e}, J2 {:.3e}",
        r.best[0], r.best[1], r.best[2], b.cost, b.j1, b.j2
    );
    out.finish()
}

pub fn cmd_pareto(cfg: &RunConfig, objectives: ParetoObjectives) -> Result<PathBuf> {
    let spec = cfg.cost_spec()?;
    let r = pareto_front(objectives, &spec, &cfg.pulse_params()?, &cfg.pareto)?;
    let mut out = OutDir::create(cfg.output.dir.join("pareto"), "pareto", cfg)?;
    out.table("pareto.csv", &reproduce::pareto_table(&r.front))?;
    let plot = Plot::new("Pareto front", "J1", "J2")
        .log_x()
        .log_y()
        .with(Series::markers(objectives.cost_kind().name(), r.front.iter().map(|p| (p.j1, p.j2)).collect()));
    out.text("pareto.svg", &plot.render())?;
    out.note(format!("{} points from {} evaluations", r.front.len(), r.evaluations));
    println!("{} Pareto points", r.front.len());
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(extra: &[&str]) -> Cli {
        let mut v = vec!["rydberg-cz"];
        v.extend_from_slice(extra);
        Cli::try_parse_from(v).unwrap()
    }

    #[test]
    fn flags_override_config() {
        let cli = args(&["--preset", "to", "--seed", "7", "--samples", "3", "--out", "/tmp/x", "scan"]);
        let cfg = resolve_config(&cli.global).unwrap();
        assert_eq!(cfg.pulse.preset, "to");
        assert_eq!((cfg.sampling.seed, cfg.ga.seed, cfg.pareto.seed), (7, 7, 7));
        assert_eq!(cfg.sampling.samples, 3);
        assert_eq!(cfg.output.dir, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn paper_scale_then_explicit_samples() {
        let cfg = resolve_config(&args(&["--paper-scale", "scan"]).global).unwrap();
        assert_eq!(cfg.sampling.samples, 500);
        let cfg = resolve_config(&args(&["--paper-scale", "--samples", "9", "scan"]).global).unwrap();
        assert_eq!(cfg.sampling.samples, 9);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::TooManySteps { t: 0.0, steps: 1 }), EXIT_INTEGRATOR);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::NotHermitian(1.0)), EXIT_INTERNAL);
    }

    #[test]
    fn bad_preset_and_input_rejected() {
        assert!(resolve_config(&args(&["--preset", "nope", "scan"]).global).is_err());
        assert!(parse_input("12").is_err());
        assert_eq!(parse_input("01").unwrap(), COMPUTATIONAL[1]);
    }

    #[test]
    fn missing_config_file_is_config_error() {
        let e = resolve_config(&args(&["--config", "/nonexistent/x.toml", "scan"]).global).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
    }

    #[test]
    fn simulate_writes_gate_result() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::default();
        cfg.set_preset("to");
        cfg.physics.decays = false;
        cfg.output.dir = dir.path().to_path_buf();
        let out = cmd_simulate(&cfg, COMPUTATIONAL[0], 0.0, Some(5)).unwrap();
        let text = std::fs::read_to_string(out.join("gate_result.csv")).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers().unwrap().clone();
        let row = rdr.records().next().unwrap().unwrap();
        let get = |k: &str| row[headers.iter().position(|h| h == k).unwrap()].parse::<f64>().unwrap();
        assert!(get("fidelity_phase") >= 0.9999);
        assert!((get("return_population") - 1.0).abs() < 1e-9);
        let traj = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
        assert_eq!(traj.lines().count(), 6);
        assert!(out.join("manifest.toml").exists());
    }
}
