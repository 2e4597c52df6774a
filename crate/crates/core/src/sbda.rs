//! Scalarisation driver: one single-objective anneal per weight on the
//! convex combination of the two objective QUBOs.

use serde::{Deserialize, Serialize};

use crate::anneal::{run_da, AnnealParams};
use crate::archive::{nondominated_filter, ArchiveEntry, EnergyVector};
use crate::error::{Error, Result};
use crate::mda::build_objective_pair;
use crate::qap::penalty_weight;
use crate::qubo::{BitVector, QuboMatrix};

/// Ordered scalarisation weights, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarisationSchedule {
    gammas: Vec<f64>,
}

impl ScalarisationSchedule {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::InvalidParameter("scalarisation schedule is empty".into()));
        }
        if let Some(&g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::WeightOutOfRange(g));
        }
        Ok(Self { gammas })
    }

    /// `steps + 1` evenly spaced weights from 0 to 1.
    pub fn uniform(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Self::new(vec![1.0]);
        }
        Self::new((0..=steps).map(|i| i as f64 / steps as f64).collect())
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

impl Default for ScalarisationSchedule {
    /// `{0.0, 0.1, ..., 1.0}`.
    fn default() -> Self {
        Self::uniform(10).expect("valid default schedule")
    }
}

/// `round(gamma * R + (1 - gamma) * S)` entrywise, constants included.
pub fn aggregate_cost(r: &QuboMatrix, s: &QuboMatrix, gamma: f64) -> Result<QuboMatrix> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::WeightOutOfRange(gamma));
    }
    r.zip_with(s, |a, b| (gamma * a as f64 + (1.0 - gamma) * b as f64).round() as i64)
}

/// Deterministic per-weight seed derived from the run seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(base ^ mix(index))
}

/// Outcome of the anneal for one weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarisedResult {
    pub gamma: f64,
    pub alpha: i64,
    pub seed: u64,
    pub solution: BitVector,
    /// Energy under `C + alpha G`.
    pub scalar_energy: i64,
    /// Constraint energy is zero.
    pub feasible: bool,
    /// Energies under `R + alpha1 G` and `S + alpha2 G`.
    pub objective_energies: EnergyVector,
    /// Energies under `R` and `S` alone.
    pub cost_energies: EnergyVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbdaOutcome {
    /// Non-dominated feasible results, keyed by their objective energies.
    pub front: Vec<ArchiveEntry>,
    pub per_gamma: Vec<ScalarisedResult>,
    pub alpha1: i64,
    pub alpha2: i64,
    /// Coupling matrices built across all weights.
    pub coupling_builds: usize,
}

/// Runs the annealer once per weight in `schedule`.
///
/// The seed in `anneal` is the run seed; weight `i` anneals with
/// `derive_seed(seed, i)`.
pub fn run_sbda(
    r: &QuboMatrix,
    s: &QuboMatrix,
    g: &QuboMatrix,
    schedule: &ScalarisationSchedule,
    anneal: &AnnealParams,
) -> Result<SbdaOutcome> {
    anneal.validate()?;
    for other in [s, g] {
        if other.size() != r.size() {
            return Err(Error::DimensionMismatch { expected: r.size(), actual: other.size() });
        }
    }
    let alpha1 = penalty_weight(r);
    let alpha2 = penalty_weight(s);
    let pair = build_objective_pair(r, s, g, alpha1, alpha2)?;

    let mut per_gamma = Vec::with_capacity(schedule.len());
    let mut coupling_builds = 0;
    for (idx, &gamma) in schedule.gammas().iter().enumerate() {
        let cost = aggregate_cost(r, s, gamma)?;
        let alpha = penalty_weight(&cost);
        let q = cost.add_scaled(g, alpha)?;
        let seed = derive_seed(anneal.seed, idx as u64);
        let out = run_da(&q, &AnnealParams { seed, ..*anneal }, false)?;
        coupling_builds += out.coupling_builds;
        let feasible = g.energy(&out.best)? == 0;
        per_gamma.push(ScalarisedResult {
            gamma,
            alpha,
            seed,
            objective_energies: pair.energies(&out.best)?,
            cost_energies: EnergyVector::new(vec![r.energy(&out.best)?, s.energy(&out.best)?]),
            scalar_energy: out.best_energy,
            feasible,
            solution: out.best,
        });
    }

    let candidates: Vec<ArchiveEntry> = per_gamma
        .iter()
        .filter(|res| res.feasible)
        .map(|res| ArchiveEntry::new(res.solution.clone(), res.objective_energies.clone()))
        .collect();
    Ok(SbdaOutcome {
        front: nondominated_filter(&candidates),
        per_gamma,
        alpha1,
        alpha2,
        coupling_builds,
    })
}
