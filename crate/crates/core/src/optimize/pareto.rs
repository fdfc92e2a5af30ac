use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ga::{make_child, with_genome, Bounds, GaOptions, Genome};
use super::{eval_cost_breakdown, CostKind, CostSpec};
use crate::error::{Error, Result};
use crate::pulses::PulseParams;

/// Objective pair of the two-objective search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParetoObjectives {
    /// `(1 - F(0), F_max - F_min)`.
    Der,
    /// `(1 - F(0), 1 - F̄)`.
    DerI,
}

impl ParetoObjectives {
    pub fn cost_kind(self) -> CostKind {
        match self {
            ParetoObjectives::Der => CostKind::Der,
            ParetoObjectives::DerI => CostKind::DerI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParetoPoint {
    pub j1: f64,
    pub j2: f64,
    pub params: Genome,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParetoOptions {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub mutation_sigma: f64,
    pub seed: u64,
    pub bounds: Bounds,
    /// Genomes with `j1` above this are treated as infeasible. Excludes
    /// non-gates such as pulses that return every input with no phase.
    pub max_j1: f64,
}

impl Default for ParetoOptions {
    fn default() -> Self {
        Self {
            population: 64,
            generations: 40,
            crossover_rate: 0.9,
            mutation_rate: 0.15,
            mutation_sigma: 0.05,
            seed: 1,
            bounds: Bounds::default(),
            max_j1: 0.05,
        }
    }
}

impl ParetoOptions {
    fn as_ga(&self) -> GaOptions {
        GaOptions {
            population: self.population,
            generations: self.generations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            mutation_sigma: self.mutation_sigma,
            seed: self.seed,
            bounds: self.bounds,
            ..GaOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoResult {
    /// Non-dominated points sorted by ascending `j1`.
    pub front: Vec<ParetoPoint>,
    pub evaluations: usize,
}

/// `a` dominates `b` when it is no worse in both objectives and better in one.
pub fn dominates(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Indices of the non-dominated points; exact duplicates keep their first occurrence.
pub fn non_dominated(objs: &[[f64; 2]]) -> Vec<usize> {
    (0..objs.len())
        .filter(|&i| !objs.iter().enumerate().any(|(j, &o)| dominates(o, objs[i]) || (j < i && o == objs[i])))
        .collect()
}

/// Fast non-dominated sort: successive fronts of indices.
pub fn non_dominated_sort(objs: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    let mut fronts = vec![Vec::new()];
    for i in 0..n {
        for j in 0..n {
            if dominates(objs[i], objs[j]) {
                dominated_by[i].push(j);
            } else if dominates(objs[j], objs[i]) {
                count[i] += 1;
            }
        }
        if count[i] == 0 {
            fronts[0].push(i);
        }
    }
    let mut k = 0;
    while !fronts[k].is_empty() {
        let mut next = Vec::new();
        for &i in &fronts[k] {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        fronts.push(next);
        k += 1;
    }
    fronts.pop();
    fronts
}

/// Crowding distance of each member of `front`, in the same order.
pub fn crowding_distance(objs: &[[f64; 2]], front: &[usize]) -> Vec<f64> {
    let mut dist = vec![0.0; front.len()];
    if front.len() <= 2 {
        return vec![f64::INFINITY; front.len()];
    }
    for m in 0..2 {
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| objs[front[a]][m].total_cmp(&objs[front[b]][m]));
        let lo = objs[front[order[0]]][m];
        let hi = objs[front[*order.last().expect("non-empty")]][m];
        dist[order[0]] = f64::INFINITY;
        dist[*order.last().expect("non-empty")] = f64::INFINITY;
        if hi > lo {
            for w in 1..order.len() - 1 {
                let gap = objs[front[order[w + 1]]][m] - objs[front[order[w - 1]]][m];
                dist[order[w]] += gap / (hi - lo);
            }
        }
    }
    dist
}

#[derive(Clone, Copy, Debug)]
struct Individual {
    genome: Genome,
    obj: [f64; 2],
    /// Constraint violation; 0 when feasible.
    violation: f64,
}

/// Rank and crowding of every individual. Feasible individuals are ranked by
/// non-dominated sorting; infeasible ones follow, ordered by violation.
fn rank_and_crowd(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    let feasible: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].violation == 0.0).collect();
    let objs: Vec<[f64; 2]> = feasible.iter().map(|&i| pop[i].obj).collect();
    let fronts = non_dominated_sort(&objs);
    for (r, front) in fronts.iter().enumerate() {
        for (&k, d) in front.iter().zip(crowding_distance(&objs, front)) {
            rank[feasible[k]] = r;
            crowd[feasible[k]] = d;
        }
    }
    let mut infeasible: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].violation != 0.0).collect();
    infeasible.sort_by(|&a, &b| pop[a].violation.total_cmp(&pop[b].violation));
    for (k, &i) in infeasible.iter().enumerate() {
        rank[i] = fronts.len() + k;
    }
    (rank, crowd)
}

fn better(i: usize, j: usize, rank: &[usize], crowd: &[f64]) -> bool {
    rank[i] < rank[j] || (rank[i] == rank[j] && crowd[i] > crowd[j])
}

/// NSGA-II over the genome box with constrained domination. `f` returns the
/// objectives and a constraint violation (0 when feasible), or `None` for a
/// failed evaluation, which is discarded. Returns the non-dominated set of
/// every feasible genome evaluated, sorted by the first objective.
pub fn nsga2<F>(f: F, opts: &ParetoOptions) -> Result<ParetoResult>
where
    F: Fn(&Genome) -> Option<([f64; 2], f64)> + Sync,
{
    let ga = opts.as_ga();
    ga.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let eval = |gs: Vec<Genome>| -> Vec<Individual> {
        let objs: Vec<Option<([f64; 2], f64)>> = gs.par_iter().map(&f).collect();
        gs.into_iter()
            .zip(objs)
            .filter_map(|(genome, o)| {
                let (obj, violation) = o?;
                (obj.iter().all(|x| x.is_finite()) && violation.is_finite()).then_some(Individual {
                    genome,
                    obj,
                    violation: violation.max(0.0),
                })
            })
            .collect()
    };
    let mut evaluations = 0;
    let mut pop: Vec<Individual> = Vec::new();
    let mut archive: Vec<Individual> = Vec::new();
    for _ in 0..=opts.generations {
        let children: Vec<Genome> = if pop.len() < 2 {
            (0..opts.population).map(|_| opts.bounds.sample(&mut rng)).collect()
        } else {
            let (rank, crowd) = rank_and_crowd(&pop);
            let pick = |rng: &mut ChaCha8Rng| {
                let a = rng.gen_range(0..pop.len());
                let b = rng.gen_range(0..pop.len());
                if better(b, a, &rank, &crowd) {
                    b
                } else {
                    a
                }
            };
            (0..opts.population)
                .map(|_| {
                    let a = pick(&mut rng);
                    let b = pick(&mut rng);
                    make_child(&pop[a].genome, &pop[b].genome, &ga, &mut rng)
                })
                .collect()
        };
        evaluations += children.len();
        let children = eval(children);
        archive.extend(children.iter().filter(|c| c.violation == 0.0).copied());
        let mut union = pop;
        union.extend(children);
        let (rank, crowd) = rank_and_crowd(&union);
        let mut order: Vec<usize> = (0..union.len()).collect();
        order.sort_by(|&a, &b| rank[a].cmp(&rank[b]).then(crowd[b].total_cmp(&crowd[a])));
        pop = order.into_iter().take(opts.population).map(|i| union[i]).collect();
    }
    let objs: Vec<[f64; 2]> = archive.iter().map(|p| p.obj).collect();
    let mut front: Vec<ParetoPoint> = non_dominated(&objs)
        .into_iter()
        .map(|i| ParetoPoint { j1: objs[i][0], j2: objs[i][1], params: archive[i].genome })
        .collect();
    front.sort_by(|a, b| a.j1.total_cmp(&b.j1));
    Ok(ParetoResult { front, evaluations })
}

/// Two-objective search over `(t1, t2, ω)` with the fixed amplitudes of `base`.
pub fn pareto_front(
    objectives: ParetoObjectives,
    spec: &CostSpec,
    base: &PulseParams,
    opts: &ParetoOptions,
) -> Result<ParetoResult> {
    let spec = CostSpec { kind: objectives.cost_kind(), ..*spec };
    spec.validate()?;
    if spec.grid < 3 {
        return Err(Error::InvalidParameter("pareto objectives need a grid of at least 3 points".into()));
    }
    nsga2(
        |g| {
            let b = eval_cost_breakdown(&spec, &with_genome(base, g));
            (!b.failed).then_some(([b.j1, b.j2], (b.j1 - opts.max_j1).max(0.0)))
        },
        opts,
    )
}
