//! Multi-objective annealer over two penalised QUBOs.
//!
//! Both objectives share one solution vector and one temperature. Each flip
//! is accepted or rejected from its pair of energy deltas through a strict
//! (product) or lenient (maximum) combination of per-objective probabilities.
//! Accepted moves feed a bounded archive; when no flip is accepted the search
//! jumps to a random archive member instead of using an energy offset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anneal::{accept_prob_unchecked, AnnealParams, Cooling};
use crate::archive::{nondominated_filter, Archive, ArchiveEntry, ArchivePolicy, EnergyVector};
use crate::error::{Error, Result};
use crate::qubo::{build_couplings, BitVector, DeltaState, QuboMatrix};

/// How per-objective acceptance probabilities are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcceptanceRule {
    Strict,
    Lenient,
}

impl AcceptanceRule {
    #[inline]
    fn probability(self, de1: f64, de2: f64, temperature: f64) -> f64 {
        let p1 = accept_prob_unchecked(de1, temperature);
        let p2 = accept_prob_unchecked(de2, temperature);
        match self {
            AcceptanceRule::Strict => p1 * p2,
            AcceptanceRule::Lenient => p1.max(p2),
        }
    }
}

/// Product of the per-objective acceptance probabilities.
pub fn strict_probability(de1: f64, de2: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    Ok(AcceptanceRule::Strict.probability(de1, de2, temperature))
}

/// Largest of the per-objective acceptance probabilities.
pub fn lenient_probability(de1: f64, de2: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    Ok(AcceptanceRule::Lenient.probability(de1, de2, temperature))
}

/// The two penalised objective QUBOs `Y = R + a1 G` and `Z = S + a2 G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectivePair {
    pub y: QuboMatrix,
    pub z: QuboMatrix,
}

impl ObjectivePair {
    pub fn new(y: QuboMatrix, z: QuboMatrix) -> Result<Self> {
        if y.size() != z.size() {
            return Err(Error::DimensionMismatch { expected: y.size(), actual: z.size() });
        }
        Ok(Self { y, z })
    }

    pub fn size(&self) -> usize {
        self.y.size()
    }

    /// From-scratch evaluation of both objectives.
    pub fn energies(&self, x: &BitVector) -> Result<EnergyVector> {
        Ok(EnergyVector::new(vec![self.y.energy(x)?, self.z.energy(x)?]))
    }
}

pub fn build_objective_pair(
    r: &QuboMatrix,
    s: &QuboMatrix,
    g: &QuboMatrix,
    alpha1: i64,
    alpha2: i64,
) -> Result<ObjectivePair> {
    ObjectivePair::new(r.add_scaled(g, alpha1)?, s.add_scaled(g, alpha2)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdaParams {
    /// Schedule and seed; `beta` is ignored.
    pub anneal: AnnealParams,
    pub acceptance: AcceptanceRule,
    pub archive_policy: ArchivePolicy,
    pub capacity: usize,
}

impl MdaParams {
    pub fn validate(&self) -> Result<()> {
        self.anneal.validate()?;
        if self.capacity < 1 {
            return Err(Error::InvalidParameter("archive capacity must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdaTraceRecord {
    pub temperature: f64,
    pub archive_len: usize,
    pub escaped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdaOutcome {
    /// Mutually non-dominated archive members, in archive order.
    pub front: Vec<ArchiveEntry>,
    /// The archive as it stood after the last iteration.
    pub archive: Vec<ArchiveEntry>,
    /// Empty unless tracing was requested.
    pub trace: Vec<MdaTraceRecord>,
    pub applied_flips: u64,
    pub escapes: u64,
    pub coupling_builds: usize,
}

/// Runs the multi-objective annealer and returns the non-dominated part of
/// the final archive.
///
/// The random start vector is placed in the archive so an escape always has
/// a target. Random numbers are drawn in a fixed order: start bits, one
/// uniform per variable per iteration, the flip choice, then any draw the
/// archive update or the escape needs.
pub fn run_mda(pair: &ObjectivePair, params: &MdaParams, record_trace: bool) -> Result<MdaOutcome> {
    params.validate()?;
    let m = pair.size();
    let py = build_couplings(&pair.y);
    let pz = build_couplings(&pair.z);
    let objectives = [&py, &pz];
    let mut rng = ChaCha8Rng::seed_from_u64(params.anneal.seed);

    let start = BitVector::from((0..m).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>());
    let mut state = DeltaState::new(start, &objectives)?;
    let mut archive = Archive::new(params.capacity)?;
    archive.seed(ArchiveEntry::new(state.x().clone(), EnergyVector::new(state.energies().to_vec())));

    let mut cooling = Cooling::new(&params.anneal);
    let mut accepted = Vec::with_capacity(m);
    let mut trace = Vec::new();
    let (mut applied_flips, mut escapes) = (0u64, 0u64);

    for _ in 0..params.anneal.i_max {
        let temperature = cooling.step();
        accepted.clear();
        let (d1, d2) = (state.deltas(0), state.deltas(1));
        for i in 0..m {
            let p = params.acceptance.probability(d1[i] as f64, d2[i] as f64, temperature);
            if rng.random::<f64>() < p {
                accepted.push(i);
            }
        }
        let escaped = accepted.is_empty();
        if escaped {
            escapes += 1;
            let pick = rng.random_range(0..archive.len());
            let target = &archive.entries()[pick].solution;
            if target != state.x() {
                state.reset(target.clone(), &objectives)?;
            }
        } else {
            let chosen = accepted[rng.random_range(0..accepted.len())];
            state.apply_flip(chosen, &objectives);
            applied_flips += 1;
            let entry = ArchiveEntry::new(state.x().clone(), EnergyVector::new(state.energies().to_vec()));
            archive.update(params.archive_policy, entry, &mut rng);
        }
        if record_trace {
            trace.push(MdaTraceRecord { temperature, archive_len: archive.len(), escaped });
        }
    }

    let front = nondominated_filter(archive.entries());
    Ok(MdaOutcome {
        front,
        archive: archive.into_entries(),
        trace,
        applied_flips,
        escapes,
        coupling_builds: objectives.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn strict_examples() {
        let t = 2.0;
        assert_eq!(strict_probability(-1.0, 0.0, t).unwrap(), 1.0);
        assert!((strict_probability(t * LN_2, t * LN_2, t).unwrap() - 0.25).abs() < 1e-12);
        assert!((strict_probability(-5.0, t * LN_2, t).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lenient_examples() {
        let t = 7.0;
        assert_eq!(lenient_probability(-1.0, 1e9, t).unwrap(), 1.0);
        assert_eq!(lenient_probability(1e9, 0.0, t).unwrap(), 1.0);
        assert!((lenient_probability(t * LN_2, t * LN_2, t).unwrap() - 0.5).abs() < 1e-12);
        assert!((lenient_probability(t * 4f64.ln(), t * LN_2, t).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probabilities_reject_bad_temperature() {
        assert!(strict_probability(0.0, 0.0, 0.0).is_err());
        assert!(lenient_probability(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn zero_penalty_pair_is_unchanged() {
        let r = QuboMatrix::from_dense(&[vec![1, 2], vec![0, 3]], 4).unwrap();
        let s = QuboMatrix::from_dense(&[vec![-1, 0], vec![5, 0]], 0).unwrap();
        let g = QuboMatrix::from_dense(&[vec![9, 9], vec![9, 9]], 9).unwrap();
        let pair = build_objective_pair(&r, &s, &g, 0, 0).unwrap();
        assert_eq!(pair.y, r);
        assert_eq!(pair.z, s);
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let a = QuboMatrix::zeros(2).unwrap();
        let b = QuboMatrix::zeros(3).unwrap();
        assert!(build_objective_pair(&a, &b, &a, 1, 1).is_err());
        assert!(ObjectivePair::new(a, b).is_err());
    }

    #[test]
    fn capacity_zero_rejected() {
        let params = MdaParams {
            anneal: AnnealParams::defaults_for_size(4, 0),
            acceptance: AcceptanceRule::Strict,
            archive_policy: ArchivePolicy::Explore,
            capacity: 0,
        };
        assert!(params.validate().is_err());
    }
}
