//! Figure pipelines: each writes CSV tables, SVG plots and a manifest into
//! its own directory and returns the plotted curves.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::output::{num, OutDir, Table};
use super::plot::{Plot, Series};
use crate::dynamics::{DecayConstants, ErrorSample, IntegratorOptions};
use crate::effective::{evolve_effective, full_channel_trajectory, Channel, PhasePoint};
use crate::error::{Error, Result};
use crate::metrics::{gate_fidelity, infidelity_scan, FidelityConvention, PaperMode};
use crate::noise::{
    ac_stark_bound, monte_carlo_fidelity, DistributionKind, DistributionSpec, MonteCarloOptions, NoiseModel,
};
use crate::optimize::{eval_cost_breakdown, pareto_front, CostKind, CostSpec, ParetoObjectives, ParetoPoint};
use crate::pulses::{mhz, Preset, PulseParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    F1c,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7a,
    F7b,
    F7c,
    F7d,
    /// All four panels of figure 7.
    F7,
}

impl Figure {
    pub const ALL: [Figure; 11] = [
        Figure::F1c,
        Figure::F2,
        Figure::F3,
        Figure::F4,
        Figure::F5,
        Figure::F6,
        Figure::F7a,
        Figure::F7b,
        Figure::F7c,
        Figure::F7d,
        Figure::F7,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::F1c => "1c",
            Figure::F2 => "2",
            Figure::F3 => "3",
            Figure::F4 => "4",
            Figure::F5 => "5",
            Figure::F6 => "6",
            Figure::F7a => "7a",
            Figure::F7b => "7b",
            Figure::F7c => "7c",
            Figure::F7d => "7d",
            Figure::F7 => "7",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure '{s}'; expected one of 1c, 2, 3, 4, 5, 6, 7, 7a-7d")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub n_failed: usize,
    pub y_secondary: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    pub fn max_abs_y(&self) -> f64 {
        self.points.iter().map(|p| p.y.abs()).fold(0.0, f64::max)
    }

    pub fn at(&self, x: f64) -> Option<&CurvePoint> {
        self.points.iter().find(|p| (p.x - x).abs() <= 1e-9 * (1.0 + x.abs()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureReport {
    pub figure: Figure,
    pub dir: PathBuf,
    /// Curves keyed by `panel/series`.
    pub curves: Vec<Curve>,
}

impl FigureReport {
    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

fn pulse(cfg: &RunConfig, preset: Preset) -> PulseParams {
    cfg.with_preset(preset)
}

fn label(preset: Preset) -> &'static str {
    match preset {
        Preset::To | Preset::ToPrinted => "TO",
        Preset::Der => "DER",
        Preset::DerIGauss => "DER-i (Gaussian)",
        Preset::DerIUniform => "DER-i (Uniform)",
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1).max(1) as f64).collect()
}

/// Monte-Carlo settings shared by the points of one panel.
struct Panel {
    decay: DecayConstants,
    opts: IntegratorOptions,
    mc: MonteCarloOptions,
    /// Report `F(0) - F(x)` instead of `1 - F(x)`.
    relative: bool,
}

impl Panel {
    fn new(cfg: &RunConfig, decay: DecayConstants, relative: bool) -> Result<Self> {
        let mut mc = cfg.monte_carlo()?;
        if !decay.is_zero() {
            // Open-system runs of the superposition state cost several basis runs.
            mc.secondary = None;
        }
        Ok(Self { decay, opts: cfg.integrator, mc, relative })
    }

    fn without_secondary(mut self) -> Self {
        self.mc.secondary = None;
        self
    }

    fn curve(&self, name: &str, p: &PulseParams, xs: &[f64], model_at: impl Fn(f64) -> NoiseModel) -> Result<Curve> {
        let clean = ErrorSample::default();
        let f0 = gate_fidelity(p, &clean, &self.decay, &self.opts, self.mc.measure)?;
        let g0 = self.mc.secondary.map(|m| gate_fidelity(p, &clean, &self.decay, &self.opts, m)).transpose()?;
        let (r, r2) = if self.relative { (f0, g0) } else { (1.0, g0.map(|_| 1.0)) };
        let mut points = Vec::with_capacity(xs.len());
        for &x in xs {
            let model = model_at(x);
            let point = if model.is_quiet() {
                CurvePoint {
                    x,
                    y: r - f0,
                    stderr: 0.0,
                    n_samples: self.mc.samples,
                    n_failed: 0,
                    y_secondary: r2.zip(g0).map(|(a, b)| a - b),
                }
            } else {
                let m = monte_carlo_fidelity(p, &model, &self.decay, &self.opts, &self.mc)?;
                CurvePoint {
                    x,
                    y: r - m.mean,
                    stderr: m.stderr,
                    n_samples: m.n_ok + m.n_failed,
                    n_failed: m.n_failed,
                    y_secondary: r2.zip(m.mean_secondary).map(|(a, b)| a - b),
                }
            };
            eprintln!("  {name}: x = {} -> {:.3e} ± {:.1e}", num(x), point.y, point.stderr);
            points.push(point);
        }
        Ok(Curve { label: name.to_string(), points })
    }
}

fn curves_table(curves: &[Curve]) -> Table {
    let mut t = Table::new(&[
        "series",
        "x_value",
        "mean_infidelity",
        "stderr",
        "n_samples",
        "n_failed",
        "mean_infidelity_secondary",
    ]);
    for c in curves {
        for p in &c.points {
            t.push(vec![
                c.label.clone(),
                num(p.x),
                num(p.y),
                num(p.stderr),
                p.n_samples.to_string(),
                p.n_failed.to_string(),
                p.y_secondary.map(num).unwrap_or_default(),
            ]);
        }
    }
    t
}

/// Log-scale plot of `|y|` for each curve.
fn log_plot(title: &str, x_label: &str, y_label: &str, curves: &[Curve], strip: &str) -> Plot {
    let mut plot = Plot::new(title, x_label, y_label).log_y();
    for c in curves {
        let pts = c.points.iter().map(|p| (p.x, p.y.abs())).collect();
        plot = plot.with(Series::line(c.label.trim_start_matches(strip), pts));
    }
    plot
}

fn measure_notes(out: &mut OutDir, panel: &Panel) {
    out.note(format!("measure = {}", panel.mc.measure.name()));
    if let Some(m) = panel.mc.secondary {
        out.note(format!("secondary measure = {}", m.name()));
    }
    out.note(format!("samples per point = {}, seed = {}", panel.mc.samples, panel.mc.seed));
}

/// Runs one figure pipeline, writing into `root/fig<id>`.
pub fn reproduce(fig: Figure, cfg: &RunConfig, root: &Path) -> Result<FigureReport> {
    let dir = root.join(format!("fig{}", fig.id()));
    let mut out = OutDir::create(dir.clone(), &format!("reproduce {}", fig.id()), cfg)?;
    let curves = match fig {
        Figure::F1c => fig1c(cfg, &mut out)?,
        Figure::F2 => fig2(cfg, &mut out)?,
        Figure::F3 => fig3(cfg, &mut out)?,
        Figure::F4 => fig4(cfg, &mut out)?,
        Figure::F5 => fig5(cfg, &mut out)?,
        Figure::F6 => fig6(cfg, &mut out)?,
        Figure::F7a | Figure::F7b | Figure::F7c | Figure::F7d => fig7(&[fig], cfg, &mut out)?,
        Figure::F7 => fig7(&[Figure::F7a, Figure::F7b, Figure::F7c, Figure::F7d], cfg, &mut out)?,
    };
    out.finish()?;
    Ok(FigureReport { figure: fig, dir, curves })
}

fn fig1c(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let grid = cfg.scan.grid();
    let none = DecayConstants::none();
    let mut t = Table::new(&["pulse", "eps_delta_mhz", "infidelity_phase", "infidelity_paper"]);
    let mut curves = Vec::new();
    for preset in [Preset::To, Preset::Der] {
        let pts = infidelity_scan(
            &pulse(cfg, preset),
            &grid,
            &none,
            &cfg.integrator,
            FidelityConvention::Root,
            PaperMode::SqrtTrace,
        )?;
        let mut c = Curve { label: label(preset).into(), points: Vec::new() };
        for s in pts {
            let x = s.eps_delta / mhz(1.0);
            t.push(vec![preset.name().into(), num(x), num(s.infidelity_phase), num(s.infidelity_paper)]);
            c.points.push(CurvePoint {
                x,
                y: s.infidelity_paper,
                stderr: 0.0,
                n_samples: 1,
                n_failed: 0,
                y_secondary: Some(s.infidelity_phase),
            });
        }
        curves.push(c);
    }
    out.table("fig1c.csv", &t)?;
    let mut plot =
        Plot::new("Infidelity vs two-photon detuning error (no decay)", "eps_delta / 2pi (MHz)", "1 - F").log_y();
    for c in &curves {
        plot =
            plot.with(Series::line(format!("{} truth table", c.label), c.points.iter().map(|p| (p.x, p.y)).collect()));
        let phase = c.points.iter().map(|p| (p.x, p.y_secondary.unwrap_or(f64::NAN))).collect();
        plot = plot.with(Series::markers(format!("{} phase", c.label), phase));
    }
    out.text("fig1c.svg", &plot.render())?;
    out.note("infidelity_paper = 1 - truth_table_sqrt_trace; infidelity_phase = 1 - phase_root");
    Ok(curves)
}

fn fig2(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let n = if cfg.sampling.paper_scale { 21 } else { 6 };
    let xs = linspace(0.0, 1.0, n);
    let panel = Panel::new(cfg, DecayConstants::none(), false)?;
    measure_notes(out, &panel);
    let mut all = Vec::new();
    for kind in DistributionKind::ALL {
        let mut curves = Vec::new();
        for preset in [Preset::To, Preset::Der] {
            let name = format!("{}/{}", kind.name(), label(preset));
            curves.push(panel.curve(&name, &pulse(cfg, preset), &xs, |x| NoiseModel {
                eps_delta: Some(DistributionSpec::new(kind, mhz(x))),
                ..NoiseModel::default()
            })?);
        }
        out.table(&format!("fig2_{}.csv", kind.name()), &curves_table(&curves))?;
        let title = format!("{} detuning errors (no decay)", kind.name());
        let plot = log_plot(&title, "eps_delta / 2pi (MHz)", "1 - mean F", &curves, &format!("{}/", kind.name()));
        out.text(&format!("fig2_{}.svg", kind.name()), &plot.render())?;
        all.extend(curves);
    }
    let mut profiles = Table::new(&["x", "gaussian", "uniform", "ushaped"]);
    let m = 200;
    for k in 0..m {
        let x = -1.0 + (k as f64 + 0.5) * 2.0 / m as f64;
        let mut row = vec![num(x)];
        row.extend(DistributionKind::ALL.map(|d| num(d.density(x, 0.5))));
        profiles.push(row);
    }
    out.table("fig2_profiles.csv", &profiles)?;
    out.note("Gaussian law truncated at the half-width with sigma = half-width / 2");
    Ok(all)
}

fn temperatures(cfg: &RunConfig) -> Vec<f64> {
    linspace(0.0, 3.0, if cfg.sampling.paper_scale { 13 } else { 7 })
}

fn fig3(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let ts = temperatures(cfg);
    let presets = [Preset::To, Preset::Der, Preset::DerIGauss];
    let doppler = |t: f64| NoiseModel { doppler_mk: t, ..NoiseModel::default() };
    let a = Panel::new(cfg, DecayConstants::none(), true)?;
    let b = Panel::new(cfg, cfg.physics.decay, false)?;
    measure_notes(out, &a);
    let mut curves_a = Vec::new();
    let mut curves_b = Vec::new();
    for preset in presets {
        curves_a.push(a.curve(&format!("a/{}", label(preset)), &pulse(cfg, preset), &ts, doppler)?);
    }
    for preset in presets {
        curves_b.push(b.curve(&format!("b/{}", label(preset)), &pulse(cfg, preset), &ts, doppler)?);
    }
    out.table("fig3a.csv", &curves_table(&curves_a))?;
    out.table("fig3b.csv", &curves_table(&curves_b))?;
    out.text("fig3a.svg", &log_plot("Doppler dephasing, no decay", "T (mK)", "F(0) - F(T)", &curves_a, "a/").render())?;
    out.text("fig3b.svg", &log_plot("Doppler dephasing with decays", "T (mK)", "1 - F(T)", &curves_b, "b/").render())?;
    out.note("panel a: F(0) - mean F(T) without decay; panel b: 1 - mean F(T) with decays");
    Ok(curves_a.into_iter().chain(curves_b).collect())
}

fn fig4(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let xs = linspace(0.0, 0.05, if cfg.sampling.paper_scale { 11 } else { 6 });
    let panel = Panel::new(cfg, DecayConstants::none(), true)?;
    measure_notes(out, &panel);
    let mut curves = Vec::new();
    for preset in [Preset::To, Preset::Der, Preset::DerIUniform] {
        curves.push(panel.curve(label(preset), &pulse(cfg, preset), &xs, |x| NoiseModel {
            amplitude: x,
            ..NoiseModel::default()
        })?);
    }
    out.table("fig4.csv", &curves_table(&curves))?;
    out.text(
        "fig4.svg",
        &log_plot("Laser amplitude errors (no decay)", "eps_Omega", "F(0) - F", &curves, "").render(),
    )?;
    let der = pulse(cfg, Preset::Der);
    let mut inset = Table::new(&["eps_omega", "eps_delta_max_mhz"]);
    let mut bound = Curve { label: "inset/DER".into(), points: Vec::new() };
    for x in linspace(0.0, 0.05, 11) {
        let y = ac_stark_bound(x, &der, 4001) / mhz(1.0);
        inset.push(vec![num(x), num(y)]);
        bound.points.push(CurvePoint { x, y, stderr: 0.0, n_samples: 1, n_failed: 0, y_secondary: None });
    }
    out.table("fig4_inset.csv", &inset)?;
    let plot = Plot::new("Maximal ac Stark detuning error", "eps_Omega", "eps_delta,max / 2pi (MHz)")
        .with(Series::line("DER", bound.points.iter().map(|p| (p.x, p.y)).collect()));
    out.text("fig4_inset.svg", &plot.render())?;
    curves.push(bound);
    Ok(curves)
}

fn fig5(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let p = pulse(cfg, Preset::To);
    let n = 241;
    let mut runs: Vec<(String, Vec<PhasePoint>)> = Vec::new();
    for ch in [Channel::C01, Channel::C11] {
        runs.push((format!("full/{}", ch.label()), full_channel_trajectory(ch, &p, 0.0, &cfg.integrator, n)?));
        runs.push((format!("effective/{}", ch.label()), evolve_effective(ch, &p, 0.0, &cfg.integrator, n)?));
    }
    let mut t = Table::new(&[
        "t_us",
        "pop_01",
        "phase_01_pi",
        "pop_11",
        "phase_11_pi",
        "eff_pop_01",
        "eff_phase_01_pi",
        "eff_pop_11",
        "eff_phase_11_pi",
    ]);
    let find = |key: &str| &runs.iter().find(|(k, _)| k == key).expect("run present").1;
    let order = ["full/01", "full/11", "effective/01", "effective/11"];
    for k in 0..n {
        let mut row = vec![num(find("full/01")[k].t)];
        for key in order {
            let s = find(key)[k];
            row.push(num(s.population));
            row.push(num(s.phase / PI));
        }
        t.push(row);
    }
    out.table("fig5.csv", &t)?;
    let mut pops = Plot::new("TO pulse: return populations", "t (us)", "population");
    let mut phases = Plot::new("TO pulse: accumulated phases", "t (us)", "phase / pi");
    let mut curves = Vec::new();
    for (key, traj) in &runs {
        let effective = key.starts_with("effective");
        let stride = if effective { 8 } else { 1 };
        let pick = |f: &dyn Fn(&PhasePoint) -> f64| -> Vec<(f64, f64)> {
            traj.iter().step_by(stride).map(|s| (s.t, f(s))).collect()
        };
        let (a, b) = (pick(&|s| s.population), pick(&|s| s.phase / PI));
        if effective {
            pops = pops.with(Series::markers(key.as_str(), a));
            phases = phases.with(Series::markers(key.as_str(), b));
        } else {
            pops = pops.with(Series::line(key.as_str(), a));
            phases = phases.with(Series::line(key.as_str(), b));
        }
        for (suffix, f) in [
            ("population", &(|s: &PhasePoint| s.population) as &dyn Fn(&PhasePoint) -> f64),
            ("phase", &|s: &PhasePoint| s.phase / PI),
        ] {
            curves.push(Curve {
                label: format!("{key}/{suffix}"),
                points: traj
                    .iter()
                    .map(|s| CurvePoint { x: s.t, y: f(s), stderr: 0.0, n_samples: 1, n_failed: 0, y_secondary: None })
                    .collect(),
            });
        }
    }
    out.text("fig5_populations.svg", &pops.render())?;
    out.text("fig5_phases.svg", &phases.render())?;
    let last = |key: &str| find(key).last().expect("non-empty").phase.rem_euclid(2.0 * PI) / PI;
    let (p01, p11) = (last("full/01"), last("full/11"));
    out.note(format!(
        "final phases (units of pi): phi01 = {p01:.5}, phi11 = {p11:.5}, 2 phi01 - phi11 = {:.5}",
        2.0 * p01 - p11
    ));
    Ok(curves)
}

fn pareto_curve(label: &str, front: &[ParetoPoint]) -> Curve {
    Curve {
        label: label.into(),
        points: front
            .iter()
            .map(|p| CurvePoint { x: p.j1, y: p.j2, stderr: 0.0, n_samples: 1, n_failed: 0, y_secondary: None })
            .collect(),
    }
}

pub(crate) fn pareto_table(front: &[ParetoPoint]) -> Table {
    let mut t = Table::new(&["J1", "J2", "t1", "t2", "omega"]);
    for p in front {
        t.push(vec![num(p.j1), num(p.j2), num(p.params[0]), num(p.params[1]), num(p.params[2])]);
    }
    t
}

fn fig6(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let spec = cfg.cost_spec()?;
    let base = cfg.pulse_params()?;
    let mut curves = Vec::new();
    for (panel, objectives, preset) in
        [("a", ParetoObjectives::Der, Preset::Der), ("b", ParetoObjectives::DerI, Preset::DerIGauss)]
    {
        eprintln!("  pareto {panel}: population {}, generations {}", cfg.pareto.population, cfg.pareto.generations);
        let r = pareto_front(objectives, &spec, &base, &cfg.pareto)?;
        out.table(&format!("fig6{panel}.csv"), &pareto_table(&r.front))?;
        let oracle = eval_cost_breakdown(&CostSpec { kind: objectives.cost_kind(), ..spec }, &pulse(cfg, preset));
        let front = pareto_curve(&format!("{panel}/front"), &r.front);
        let plot = Plot::new(
            format!("Pareto front ({})", if objectives.cost_kind() == CostKind::Der { "DER" } else { "DER-i" }),
            "J1 = 1 - F(0)",
            "J2",
        )
        .log_x()
        .log_y()
        .with(Series::markers("front", front.points.iter().map(|p| (p.x, p.y)).collect()))
        .with(Series::markers(format!("{} preset", label(preset)), vec![(oracle.j1, oracle.j2)]));
        out.text(&format!("fig6{panel}.svg"), &plot.render())?;
        out.note(format!("panel {panel}: {} points from {} evaluations", r.front.len(), r.evaluations));
        out.note(format!("panel {panel}: {} preset at J1 = {:.4e}, J2 = {:.4e}", preset.name(), oracle.j1, oracle.j2));
        curves.push(front);
        curves.push(pareto_curve(
            &format!("{panel}/preset"),
            &[ParetoPoint { j1: oracle.j1, j2: oracle.j2, params: preset.timing() }],
        ));
    }
    Ok(curves)
}

type ModelAt = Box<dyn Fn(f64) -> NoiseModel>;

fn fig7(panels: &[Figure], cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<Curve>> {
    let presets = [Preset::To, Preset::Der, Preset::DerIGauss];
    let fine = cfg.sampling.paper_scale;
    let mut all = Vec::new();
    for &fig in panels {
        let base = Panel::new(cfg, DecayConstants::none(), true)?;
        let (xs, x_label, title, model): (Vec<f64>, &str, &str, ModelAt) = match fig {
            Figure::F7a => (
                linspace(0.0, 1.0, if fine { 11 } else { 6 }),
                "eps_Delta / 2pi (MHz)",
                "Intermediate detuning error",
                Box::new(|x| NoiseModel {
                    eps_big_delta: Some(DistributionSpec::new(DistributionKind::Uniform, mhz(x))),
                    ..NoiseModel::default()
                }),
            ),
            Figure::F7b => (
                temperatures(cfg),
                "T (mK)",
                "Position-dependent Rabi frequencies",
                Box::new(|t| NoiseModel { position_mk: t, ..NoiseModel::default() }),
            ),
            Figure::F7c => (
                linspace(0.0, 40.0, if fine { 9 } else { 5 }),
                "gamma_z / 2pi (kHz)",
                "Laser phase noise dephasing",
                Box::new(|k| NoiseModel { gamma_z: mhz(k * 1e-3), ..NoiseModel::default() }),
            ),
            Figure::F7d => (
                linspace(0.0, 0.1, if fine { 11 } else { 6 }),
                "Delta B / B",
                "Interaction fluctuations",
                Box::new(|f| NoiseModel { interaction_fraction: f, ..NoiseModel::default() }),
            ),
            _ => unreachable!("figure 7 panels only"),
        };
        let panel = if fig == Figure::F7c { base.without_secondary() } else { base };
        if all.is_empty() {
            measure_notes(out, &panel);
        }
        let id = fig.id();
        let mut curves = Vec::new();
        for preset in presets {
            curves.push(panel.curve(&format!("{id}/{}", label(preset)), &pulse(cfg, preset), &xs, &model)?);
        }
        out.table(&format!("fig{id}.csv"), &curves_table(&curves))?;
        out.text(
            &format!("fig{id}.svg"),
            &log_plot(title, x_label, "|F(0) - F|", &curves, &format!("{id}/")).render(),
        )?;
        if fig == Figure::F7d {
            let phys = cfg.noise.physical.unwrap_or_default();
            let b = cfg.pulse_params()?.blockade;
            out.note(format!("position deviation at Delta B / B = 0.1: {:.2} nm", phys.delta_r_nm(0.1 * b)));
        }
        all.extend(curves);
    }
    out.note("values are F(0) - mean F without decay; plots show magnitudes");
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::FidelityMeasure;

    #[test]
    fn figure_ids_parse() {
        for f in Figure::ALL {
            assert_eq!(Figure::parse(f.id()).unwrap(), f);
        }
        assert!(matches!(Figure::parse("8"), Err(Error::Config(_))));
    }

    #[test]
    fn fig5_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        let r = reproduce(Figure::F5, &cfg, dir.path()).unwrap();
        for f in ["fig5.csv", "fig5_populations.svg", "fig5_phases.svg", "manifest.toml"] {
            assert!(r.dir.join(f).exists(), "{f}");
        }
        let full = r.curve("full/01/population").unwrap();
        let eff = r.curve("effective/01/population").unwrap();
        let last = |c: &Curve| c.points.last().unwrap().y;
        assert!((last(full) - last(eff)).abs() < 1e-2);
    }

    #[test]
    fn measure_names_in_notes_parse() {
        let p = Panel::new(&RunConfig::default(), DecayConstants::none(), true).unwrap();
        assert_eq!(p.mc.measure, FidelityMeasure::default());
        assert!(Panel::new(&RunConfig::default(), DecayConstants::rubidium(), false).unwrap().mc.secondary.is_none());
    }
}
