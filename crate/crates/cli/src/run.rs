//! Executes repeated seeded runs of one algorithm on one instance.

use std::time::Instant;

use anyhow::{bail, Result};
use moqubo_core::anneal::run_da;
use moqubo_core::archive::{nondominated_indices, ArchiveEntry};
use moqubo_core::mda::{build_objective_pair, run_mda};
use moqubo_core::metrics::{bounds_from_sets, hypervolume_2d, normalize_points, NormalisationBounds, Point2, REFERENCE_POINT};
use moqubo_core::qap::{
    build_constraint_qubo, build_cost_qubo, decode_solution, normalize_qubo, penalty_weight, qap_cost, Permutation,
    QapInstance, NORMALIZATION_TARGET,
};
use moqubo_core::qubo::{BitVector, QuboMatrix};
use moqubo_core::sbda::{run_sbda, ScalarisationSchedule};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, RunConfig};

/// One point of a reported front: raw objective costs and a permutation
/// (1-based locations) attaining them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrontPoint {
    pub costs: Vec<i64>,
    pub permutation: Vec<usize>,
}

impl FrontPoint {
    pub fn point2(&self) -> Point2 {
        [self.costs[0] as f64, *self.costs.get(1).unwrap_or(&self.costs[0]) as f64]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRecord {
    pub gamma: f64,
    pub alpha: i64,
    pub seed: u64,
    pub feasible: bool,
    pub scalar_energy: i64,
}

/// Per-iteration trace rows, algorithm dependent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunTrace {
    Da(Vec<(f64, i64, f64)>),
    Mda(Vec<(f64, usize, bool)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub wall_time_secs: f64,
    /// Distinct non-dominated feasible cost vectors.
    pub front: Vec<FrontPoint>,
    /// Size of the set the algorithm itself returned.
    pub returned: usize,
    pub infeasible_count: usize,
    pub coupling_builds: usize,
    pub applied_flips: u64,
    pub escapes: Option<u64>,
    pub per_gamma: Option<Vec<GammaRecord>>,
    pub hypervolume: Option<f64>,
    #[serde(skip)]
    pub trace: Option<RunTrace>,
}

/// Objective and constraint QUBOs shared by every run.
#[derive(Debug, Clone)]
pub struct EncodedInstance {
    pub objectives: Vec<QuboMatrix>,
    pub constraint: QuboMatrix,
}

impl EncodedInstance {
    pub fn new(inst: &QapInstance, normalize: bool) -> Result<Self> {
        let objectives = (0..inst.num_objectives())
            .map(|k| {
                let c = build_cost_qubo(inst, k)?;
                if normalize && !c.is_zero() {
                    normalize_qubo(&c, NORMALIZATION_TARGET)
                } else {
                    Ok(c)
                }
            })
            .collect::<moqubo_core::Result<Vec<_>>>()?;
        Ok(Self { objectives, constraint: build_constraint_qubo(inst.n())? })
    }
}

/// Raw costs of every feasible solution, reduced to distinct non-dominated
/// points. Ties keep the lexicographically smallest permutation.
pub fn feasible_front(inst: &QapInstance, solutions: &[&BitVector]) -> Result<(Vec<FrontPoint>, usize)> {
    let mut infeasible = 0;
    let mut points = Vec::new();
    for x in solutions {
        match decode_solution(x, inst.n())? {
            Some(sigma) => points.push(front_point(inst, &sigma)?),
            None => infeasible += 1,
        }
    }
    Ok((reduce_front(points), infeasible))
}

pub fn front_point(inst: &QapInstance, sigma: &Permutation) -> Result<FrontPoint> {
    let costs = (0..inst.num_objectives())
        .map(|k| qap_cost(inst, sigma, k))
        .collect::<moqubo_core::Result<Vec<_>>>()?;
    Ok(FrontPoint { costs, permutation: sigma.to_one_based() })
}

/// Distinct non-dominated cost vectors, sorted by cost.
pub fn reduce_front(mut points: Vec<FrontPoint>) -> Vec<FrontPoint> {
    points.sort();
    points.dedup_by(|b, a| a.costs == b.costs);
    let costs: Vec<Vec<i64>> = points.iter().map(|p| p.costs.clone()).collect();
    let keep = nondominated_indices(&costs);
    keep.into_iter().map(|i| points[i].clone()).collect()
}

/// Executes run `index` of `config`.
pub fn execute_run(
    inst: &QapInstance,
    enc: &EncodedInstance,
    config: &RunConfig,
    index: usize,
    record_trace: bool,
) -> Result<RunRecord> {
    let seed = config.seed_for_run(index);
    let started = Instant::now();
    let g = &enc.constraint;
    let mut record = match config.algorithm {
        Algorithm::Da => {
            let k = config.objective.unwrap_or(1) - 1;
            let Some(cost) = enc.objectives.get(k) else {
                bail!("objective {} requested but the instance has {}", k + 1, enc.objectives.len());
            };
            let q = cost.add_scaled(g, penalty_weight(cost))?;
            let out = run_da(&q, &config.anneal_params(seed), record_trace)?;
            let wall = started.elapsed().as_secs_f64();
            let (front, infeasible_count) = feasible_front(inst, &[&out.best])?;
            RunRecord {
                index,
                seed,
                wall_time_secs: wall,
                front,
                returned: 1,
                infeasible_count,
                coupling_builds: out.coupling_builds,
                applied_flips: out.applied_flips,
                escapes: None,
                per_gamma: None,
                hypervolume: None,
                trace: record_trace.then(|| {
                    RunTrace::Da(out.trace.records.iter().map(|r| (r.temperature, r.best_energy, r.offset)).collect())
                }),
            }
        }
        Algorithm::Sbda => {
            let (r, s) = two_objectives(enc)?;
            let schedule = ScalarisationSchedule::new(config.gammas.clone().unwrap_or_default())?;
            let out = run_sbda(r, s, g, &schedule, &config.anneal_params(seed))?;
            let wall = started.elapsed().as_secs_f64();
            let solutions: Vec<&BitVector> = out.per_gamma.iter().map(|p| &p.solution).collect();
            let (front, infeasible_count) = feasible_front(inst, &solutions)?;
            RunRecord {
                index,
                seed,
                wall_time_secs: wall,
                front,
                returned: out.front.len(),
                infeasible_count,
                coupling_builds: out.coupling_builds,
                applied_flips: 0,
                escapes: None,
                per_gamma: Some(
                    out.per_gamma
                        .iter()
                        .map(|p| GammaRecord {
                            gamma: p.gamma,
                            alpha: p.alpha,
                            seed: p.seed,
                            feasible: p.feasible,
                            scalar_energy: p.scalar_energy,
                        })
                        .collect(),
                ),
                hypervolume: None,
                trace: None,
            }
        }
        Algorithm::Mda => {
            let (r, s) = two_objectives(enc)?;
            let pair = build_objective_pair(r, s, g, penalty_weight(r), penalty_weight(s))?;
            let Some(params) = config.mda_params(seed) else {
                bail!("incomplete multi-objective configuration");
            };
            let out = run_mda(&pair, &params, record_trace)?;
            let wall = started.elapsed().as_secs_f64();
            let solutions: Vec<&BitVector> = out.front.iter().map(|e: &ArchiveEntry| &e.solution).collect();
            let (front, infeasible_count) = feasible_front(inst, &solutions)?;
            RunRecord {
                index,
                seed,
                wall_time_secs: wall,
                front,
                returned: out.front.len(),
                infeasible_count,
                coupling_builds: out.coupling_builds,
                applied_flips: out.applied_flips,
                escapes: Some(out.escapes),
                per_gamma: None,
                hypervolume: None,
                trace: record_trace.then(|| {
                    RunTrace::Mda(out.trace.iter().map(|r| (r.temperature, r.archive_len, r.escaped)).collect())
                }),
            }
        }
    };
    record.front.shrink_to_fit();
    Ok(record)
}

fn two_objectives(enc: &EncodedInstance) -> Result<(&QuboMatrix, &QuboMatrix)> {
    match enc.objectives.as_slice() {
        [r, s] => Ok((r, s)),
        other => bail!("this algorithm needs exactly 2 objectives, the instance has {}", other.len()),
    }
}

/// Every run of a configuration, in run order.
#[derive(Debug, Clone)]
pub struct RunSet {
    pub config: RunConfig,
    pub runs: Vec<RunRecord>,
    pub union_front: Vec<FrontPoint>,
    pub bounds: Option<NormalisationBounds>,
    pub union_hypervolume: Option<f64>,
}

/// Runs all seeds on a pool of `jobs` workers. Output order and content do
/// not depend on `jobs`.
pub fn run_all(
    inst: &QapInstance,
    config: &RunConfig,
    jobs: usize,
    reference: Option<&[Point2]>,
    record_trace: bool,
) -> Result<RunSet> {
    let enc = EncodedInstance::new(inst, config.normalize)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let mut runs: Vec<RunRecord> = pool.install(|| {
        (0..config.runs)
            .into_par_iter()
            .map(|i| execute_run(inst, &enc, config, i, record_trace))
            .collect::<Result<Vec<_>>>()
    })?;

    let union_front = reduce_front(runs.iter().flat_map(|r| r.front.iter().cloned()).collect());
    let mut bounds = None;
    let mut union_hypervolume = None;
    if inst.num_objectives() == 2 {
        let fronts: Vec<Vec<Point2>> = runs.iter().map(|r| r.front.iter().map(FrontPoint::point2).collect()).collect();
        let refs: Vec<&[Point2]> = fronts.iter().map(|f| f.as_slice()).collect();
        if let Ok(b) = bounds_from_sets(&refs, reference) {
            let b = b.widened();
            for (run, pts) in runs.iter_mut().zip(&fronts) {
                run.hypervolume = Some(normalised_hypervolume(pts, &b)?);
            }
            let union: Vec<Point2> = union_front.iter().map(FrontPoint::point2).collect();
            union_hypervolume = Some(normalised_hypervolume(&union, &b)?);
            bounds = Some(b);
        } else {
            for run in runs.iter_mut() {
                run.hypervolume = Some(0.0);
            }
            union_hypervolume = Some(0.0);
        }
    }
    Ok(RunSet { config: config.clone(), runs, union_front, bounds, union_hypervolume })
}

pub fn normalised_hypervolume(points: &[Point2], bounds: &NormalisationBounds) -> Result<f64> {
    let n = normalize_points(points, bounds)?;
    Ok(hypervolume_2d(&n.points, REFERENCE_POINT))
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
