//! Single-objective digital-annealer style solver.
//!
//! Every iteration evaluates all `m` single-flip neighbours at once, tests each
//! one independently against the acceptance probability and applies one of
//! the accepted flips chosen uniformly at random. When nothing is accepted an
//! energy offset grows by `beta`, making worsening moves progressively easier
//! until the search escapes; it drops back to zero on the next applied flip.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{build_couplings, BitVector, DeltaState, QuboMatrix};

pub const DEFAULT_INITIAL_TEMPERATURE: f64 = 1e9;
pub const DEFAULT_FINAL_TEMPERATURE: f64 = 1e4;
pub const DEFAULT_DECAY: f64 = 0.001;

/// Annealing schedule and escape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub i_max: u64,
    pub delta0: f64,
    pub delta_f: f64,
    pub xi: f64,
    pub beta: f64,
    pub seed: u64,
}

impl AnnealParams {
    /// Defaults for a QUBO of dimension `m`: `I_max = 0.25 m^2` (floored,
    /// at least 1) and `beta = delta0 / (0.25 m^2)`.
    pub fn defaults_for_size(m: usize, seed: u64) -> Self {
        let quarter_m2 = 0.25 * (m as f64) * (m as f64);
        Self {
            i_max: (quarter_m2.floor() as u64).max(1),
            delta0: DEFAULT_INITIAL_TEMPERATURE,
            delta_f: DEFAULT_FINAL_TEMPERATURE,
            xi: DEFAULT_DECAY,
            beta: DEFAULT_INITIAL_TEMPERATURE / quarter_m2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.i_max < 1 {
            return bad("i_max must be at least 1".into());
        }
        if !(self.delta_f > 0.0 && self.delta0 >= self.delta_f) {
            return bad(format!(
                "temperatures must satisfy delta0 >= delta_f > 0 (got {} and {})",
                self.delta0, self.delta_f
            ));
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return bad(format!("decay rate must lie in (0, 1), got {}", self.xi));
        }
        if !(self.beta >= 0.0) {
            return bad(format!("offset increase rate must be non-negative, got {}", self.beta));
        }
        Ok(())
    }
}

/// Geometric cooling that stops once the temperature is at or below `delta_f`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cooling {
    current: f64,
    floor: f64,
    factor: f64,
}

impl Cooling {
    pub(crate) fn new(params: &AnnealParams) -> Self {
        Self {
            current: params.delta0,
            floor: params.delta_f,
            factor: 1.0 - params.xi,
        }
    }

    /// Decays once if still above the floor and returns the new temperature.
    pub(crate) fn step(&mut self) -> f64 {
        if self.current > self.floor {
            self.current *= self.factor;
        }
        self.current
    }
}

/// `exp(min(0, -(delta_e - e_offset) / temperature))`.
pub fn acceptance_probability(delta_e: f64, e_offset: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    Ok(accept_prob_unchecked(delta_e - e_offset, temperature))
}

#[inline]
pub(crate) fn accept_prob_unchecked(excess: f64, temperature: f64) -> f64 {
    (-excess / temperature).min(0.0).exp()
}

/// One iteration of a single-objective run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub temperature: f64,
    pub best_energy: i64,
    pub offset: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnealTrace {
    pub records: Vec<TraceRecord>,
}

/// Result of [`run_da`].
#[derive(Debug, Clone, PartialEq)]
pub struct DaOutcome {
    pub best: BitVector,
    pub best_energy: i64,
    /// Empty unless tracing was requested.
    pub trace: AnnealTrace,
    pub applied_flips: u64,
    pub coupling_builds: usize,
}

/// Runs the annealer on `q` starting from a uniformly random vector and
/// returns the lowest-energy vector visited.
///
/// Random numbers are consumed in a fixed order: `m` bits for the start,
/// then per iteration one uniform per variable in index order followed by one
/// draw to pick among accepted flips (only when some were accepted).
pub fn run_da(q: &QuboMatrix, params: &AnnealParams, record_trace: bool) -> Result<DaOutcome> {
    params.validate()?;
    let m = q.size();
    let couplings = build_couplings(q);
    let objectives = [&couplings];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let start = BitVector::from((0..m).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>());
    let mut state = DeltaState::new(start, &objectives)?;
    let mut best = state.x().clone();
    let mut best_energy = state.energy(0);

    let mut cooling = Cooling::new(params);
    let mut offset = 0.0f64;
    let mut accepted = Vec::with_capacity(m);
    let mut trace = AnnealTrace::default();
    let mut applied_flips = 0;
    if record_trace {
        trace.records.reserve(params.i_max as usize);
    }

    for _ in 0..params.i_max {
        let temperature = cooling.step();
        accepted.clear();
        for (i, &delta) in state.deltas(0).iter().enumerate() {
            let p = accept_prob_unchecked(delta as f64 - offset, temperature);
            if rng.random::<f64>() < p {
                accepted.push(i);
            }
        }
        if accepted.is_empty() {
            offset += params.beta;
        } else {
            let chosen = accepted[rng.random_range(0..accepted.len())];
            state.apply_flip(chosen, &objectives);
            applied_flips += 1;
            offset = 0.0;
            if state.energy(0) < best_energy {
                best_energy = state.energy(0);
                best = state.x().clone();
            }
        }
        if record_trace {
            trace.records.push(TraceRecord { temperature, best_energy, offset });
        }
    }

    Ok(DaOutcome {
        best,
        best_energy,
        trace,
        applied_flips,
        coupling_builds: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_clamps_at_one() {
        assert_eq!(acceptance_probability(-5.0, 0.0, 10.0).unwrap(), 1.0);
        assert_eq!(acceptance_probability(7.0, 7.0, 10.0).unwrap(), 1.0);
        assert_eq!(acceptance_probability(3.0, 8.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn probability_analytic_values() {
        let t = 3.5;
        let half = acceptance_probability(t * std::f64::consts::LN_2 + 2.0, 2.0, t).unwrap();
        assert!((half - 0.5).abs() < 1e-12);
        let tiny = acceptance_probability(10.0 * t, 0.0, t).unwrap();
        assert!((tiny - (-10.0f64).exp()).abs() < 1e-15);
        assert!((tiny - 4.54e-5).abs() < 1e-7);
    }

    #[test]
    fn probability_rejects_bad_temperature() {
        assert!(acceptance_probability(1.0, 0.0, 0.0).is_err());
        assert!(acceptance_probability(1.0, 0.0, -2.0).is_err());
        assert!(acceptance_probability(1.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn defaults_follow_problem_size() {
        let p = AnnealParams::defaults_for_size(36, 1);
        assert_eq!(p.i_max, 324);
        assert_eq!(p.delta0, 1e9);
        assert_eq!(p.delta_f, 1e4);
        assert_eq!(p.xi, 0.001);
        assert_eq!(p.beta, 1e9 / 324.0);
        let odd = AnnealParams::defaults_for_size(9, 1);
        assert_eq!(odd.i_max, 20);
        assert_eq!(odd.beta, 1e9 / 20.25);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let base = AnnealParams::defaults_for_size(4, 0);
        for p in [
            AnnealParams { i_max: 0, ..base },
            AnnealParams { delta_f: 0.0, ..base },
            AnnealParams { delta0: 1.0, delta_f: 2.0, ..base },
            AnnealParams { xi: 1.0, ..base },
            AnnealParams { xi: 0.0, ..base },
            AnnealParams { beta: -1.0, ..base },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn cooling_never_undershoots_by_more_than_one_step() {
        let params = AnnealParams {
            i_max: 10,
            delta0: 100.0,
            delta_f: 50.0,
            xi: 0.1,
            beta: 0.0,
            seed: 0,
        };
        let mut c = Cooling::new(&params);
        let temps: Vec<f64> = (0..20).map(|_| c.step()).collect();
        assert!(temps.windows(2).all(|w| w[1] <= w[0]));
        let last = *temps.last().unwrap();
        assert!(last <= 50.0 && last > 50.0 * 0.9);
    }

    #[test]
    fn positive_diagonal_relaxes_to_zero() {
        let rows: Vec<Vec<i64>> = (0..12)
            .map(|i| (0..12).map(|j| if i == j { 5 + i as i64 } else { 0 }).collect())
            .collect();
        let q = QuboMatrix::from_dense(&rows, 4).unwrap();
        for seed in 0..10 {
            let params = AnnealParams {
                i_max: 120,
                delta0: 1.0,
                delta_f: 0.01,
                xi: 0.05,
                beta: 1.0,
                seed,
            };
            let out = run_da(&q, &params, false).unwrap();
            assert_eq!(out.best, BitVector::zeros(12));
            assert_eq!(out.best_energy, 4);
        }
    }
}
