use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{eval_cost, CostSpec};
use crate::error::{Error, Result};
use crate::pulses::PulseParams;

/// `(t1, t2, ω)` in μs.
pub type Genome = [f64; 3];

/// Box bounds on the genome; `t1 < t2` is enforced separately.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub t1: (f64, f64),
    pub t2: (f64, f64),
    pub omega: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Self { t1: (0.2, 1.2), t2: (0.5, 1.5), omega: (0.05, 0.4) }
    }
}

impl Bounds {
    pub fn ranges(&self) -> [(f64, f64); 3] {
        [self.t1, self.t2, self.omega]
    }

    pub fn validate(&self) -> Result<()> {
        for (lo, hi) in self.ranges() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter(format!("bad bound [{lo}, {hi}]")));
            }
        }
        if self.t1.0 >= self.t2.1 {
            return Err(Error::InvalidParameter("no genome satisfies t1 < t2".into()));
        }
        Ok(())
    }

    pub fn contains(&self, g: &Genome) -> bool {
        self.ranges().iter().zip(g).all(|(&(lo, hi), &x)| (lo..=hi).contains(&x)) && g[0] < g[1]
    }

    fn clamp(&self, g: &mut Genome) {
        for (x, (lo, hi)) in g.iter_mut().zip(self.ranges()) {
            *x = x.clamp(lo, hi);
        }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> Genome {
        loop {
            let g = self.ranges().map(|(lo, hi)| rng.gen_range(lo..=hi));
            if g[0] < g[1] {
                return g;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaOptions {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each bound span.
    pub mutation_sigma: f64,
    pub elitism: usize,
    pub seed: u64,
    pub bounds: Bounds,
}

impl Default for GaOptions {
    fn default() -> Self {
        Self {
            population: 64,
            generations: 60,
            tournament: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.15,
            mutation_sigma: 0.05,
            elitism: 2,
            seed: 1,
            bounds: Bounds::default(),
        }
    }
}

impl GaOptions {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if self.population < 4 {
            return Err(Error::InvalidParameter("population must be >= 4".into()));
        }
        if self.tournament == 0 || self.elitism >= self.population {
            return Err(Error::InvalidParameter("need tournament >= 1 and elitism < population".into()));
        }
        for r in [self.crossover_rate, self.mutation_rate] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("rate {r} outside [0, 1]")));
            }
        }
        if !(self.mutation_sigma.is_finite() && self.mutation_sigma >= 0.0) {
            return Err(Error::InvalidParameter("mutation sigma must be >= 0".into()));
        }
        Ok(())
    }
}

/// Per-generation summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaRecord {
    pub generation: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
    pub best: Genome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaResult {
    pub best: Genome,
    pub best_cost: f64,
    pub history: Vec<GaRecord>,
    pub evaluations: usize,
}

fn tournament<R: Rng>(costs: &[f64], k: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..costs.len());
    for _ in 1..k {
        let c = rng.gen_range(0..costs.len());
        if costs[c] < costs[best] {
            best = c;
        }
    }
    best
}

/// Blend (BLX-0.5) crossover and Gaussian mutation, retried until the child
/// satisfies `t1 < t2`. Falls back to the first parent.
pub(crate) fn make_child<R: Rng>(a: &Genome, b: &Genome, opts: &GaOptions, rng: &mut R) -> Genome {
    const ALPHA: f64 = 0.5;
    let ranges = opts.bounds.ranges();
    for _ in 0..64 {
        let mut child = *a;
        if rng.gen::<f64>() < opts.crossover_rate {
            for i in 0..3 {
                let (lo, hi) = (a[i].min(b[i]), a[i].max(b[i]));
                let d = hi - lo;
                child[i] = if d > 0.0 { rng.gen_range(lo - ALPHA * d..=hi + ALPHA * d) } else { lo };
            }
        }
        for i in 0..3 {
            if rng.gen::<f64>() < opts.mutation_rate {
                let span = ranges[i].1 - ranges[i].0;
                let n = Normal::new(0.0, (opts.mutation_sigma * span).max(f64::MIN_POSITIVE)).expect("finite sigma");
                child[i] += n.sample(rng);
            }
        }
        opts.bounds.clamp(&mut child);
        if child[0] < child[1] {
            return child;
        }
    }
    *a
}

/// Minimizes an arbitrary cost over the genome box. Costs are evaluated in
/// parallel; the random stream is consumed sequentially, so results do not
/// depend on the thread count.
pub fn ga_minimize_fn<F>(cost: F, opts: &GaOptions) -> Result<GaResult>
where
    F: Fn(&Genome) -> f64 + Sync,
{
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let eval = |g: &[Genome]| -> Vec<f64> {
        g.par_iter()
            .map(|x| {
                let c = cost(x);
                if c.is_nan() {
                    f64::INFINITY
                } else {
                    c
                }
            })
            .collect()
    };
    let mut pop: Vec<Genome> = (0..opts.population).map(|_| opts.bounds.sample(&mut rng)).collect();
    let mut costs = eval(&pop);
    let mut evaluations = pop.len();
    let mut history = Vec::with_capacity(opts.generations + 1);
    let mut best = (pop[0], costs[0]);
    let mut record = |generation: usize, pop: &[Genome], costs: &[f64], best: &mut (Genome, f64)| {
        for (g, &c) in pop.iter().zip(costs) {
            if c < best.1 {
                *best = (*g, c);
            }
        }
        let finite: Vec<f64> = costs.iter().copied().filter(|c| c.is_finite()).collect();
        let mean = if finite.is_empty() { f64::INFINITY } else { finite.iter().sum::<f64>() / finite.len() as f64 };
        history.push(GaRecord { generation, best_cost: best.1, mean_cost: mean, best: best.0 });
    };
    record(0, &pop, &costs, &mut best);
    for generation in 1..=opts.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&i, &j| costs[i].total_cmp(&costs[j]));
        let mut next: Vec<Genome> = order[..opts.elitism].iter().map(|&i| pop[i]).collect();
        let elite_costs: Vec<f64> = order[..opts.elitism].iter().map(|&i| costs[i]).collect();
        let mut children = Vec::with_capacity(opts.population - opts.elitism);
        while children.len() < opts.population - opts.elitism {
            let a = tournament(&costs, opts.tournament, &mut rng);
            let b = tournament(&costs, opts.tournament, &mut rng);
            children.push(make_child(&pop[a], &pop[b], opts, &mut rng));
        }
        let child_costs = eval(&children);
        evaluations += children.len();
        next.extend(children);
        costs = elite_costs;
        costs.extend(child_costs);
        pop = next;
        record(generation, &pop, &costs, &mut best);
    }
    Ok(GaResult { best: best.0, best_cost: best.1, history, evaluations })
}

/// Applies a genome to the fixed amplitudes, detuning and blockade of `base`.
pub(crate) fn with_genome(base: &PulseParams, g: &Genome) -> PulseParams {
    PulseParams { t1: g[0], t2: g[1], width: g[2], ..*base }
}

/// Runs the genetic optimizer on a robustness cost.
pub fn ga_minimize(spec: &CostSpec, base: &PulseParams, opts: &GaOptions) -> Result<GaResult> {
    spec.validate()?;
    ga_minimize_fn(|g| eval_cost(spec, &with_genome(base, g)), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    fn sphere(g: &Genome) -> f64 {
        let c = [0.6, 1.0, 0.2];
        g.iter().zip(c).map(|(x, y)| (x - y).powi(2)).sum()
    }

    #[test]
    fn sphere_optimum_found() {
        let r = ga_minimize_fn(sphere, &GaOptions::default()).unwrap();
        let span = 1.0;
        for (x, y) in r.best.iter().zip([0.6, 1.0, 0.2]) {
            assert!((x - y).abs() < 1e-3 * span, "{:?}", r.best);
        }
    }

    #[test]
    fn best_cost_non_increasing() {
        let opts = GaOptions { generations: 20, population: 16, ..GaOptions::default() };
        let r = ga_minimize_fn(sphere, &opts).unwrap();
        assert_eq!(r.history.len(), 21);
        for w in r.history.windows(2) {
            assert!(w[1].best_cost <= w[0].best_cost);
        }
        assert_eq!(r.evaluations, 16 + 20 * 14);
    }

    #[test]
    fn seeded_runs_identical() {
        let opts = GaOptions { generations: 10, population: 12, seed: 9, ..GaOptions::default() };
        let a = ga_minimize_fn(sphere, &opts).unwrap();
        let b = ga_minimize_fn(sphere, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evaluated_genomes_respect_bounds() {
        let seen = Mutex::new(Vec::new());
        let opts = GaOptions { generations: 15, population: 20, mutation_rate: 0.8, ..GaOptions::default() };
        ga_minimize_fn(
            |g| {
                seen.lock().unwrap().push(*g);
                sphere(g)
            },
            &opts,
        )
        .unwrap();
        let seen = seen.into_inner().unwrap();
        assert!(seen.iter().all(|g| opts.bounds.contains(g)));
    }

    #[test]
    fn invalid_options_rejected() {
        assert!(ga_minimize_fn(sphere, &GaOptions { population: 3, ..GaOptions::default() }).is_err());
        let bad = Bounds { t1: (1.0, 0.5), ..Bounds::default() };
        assert!(ga_minimize_fn(sphere, &GaOptions { bounds: bad, ..GaOptions::default() }).is_err());
    }
}
