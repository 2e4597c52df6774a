//! Run configuration: flag/file merging and default resolution.
//!
//! Precedence is command-line flag, then config file, then the standard
//! parameter table (initial temperature 1e9, final temperature 1e4, decay
//! 0.001, `0.25 m^2` iterations, offset rate `1e9 / (0.25 m^2)`, archive
//! size `m`, weights 0.0 to 1.0 in steps of 0.1, 20 runs).

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use moqubo_core::anneal::{
    AnnealParams, DEFAULT_DECAY, DEFAULT_FINAL_TEMPERATURE, DEFAULT_INITIAL_TEMPERATURE,
};
use moqubo_core::archive::ArchivePolicy;
use moqubo_core::mda::{AcceptanceRule, MdaParams};
use moqubo_core::sbda::ScalarisationSchedule;
use serde::{Deserialize, Serialize};

pub const DEFAULT_RUNS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Single-objective annealer on one penalised objective.
    Da,
    /// Scalarised runs of the single-objective annealer.
    Sbda,
    /// Multi-objective annealer.
    Mda,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Da => "da",
            Algorithm::Sbda => "sbda",
            Algorithm::Mda => "mda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AcceptanceArg {
    Strict,
    Lenient,
}

impl From<AcceptanceArg> for AcceptanceRule {
    fn from(a: AcceptanceArg) -> Self {
        match a {
            AcceptanceArg::Strict => AcceptanceRule::Strict,
            AcceptanceArg::Lenient => AcceptanceRule::Lenient,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ArchiveArg {
    Explore,
    Exploit,
}

impl From<ArchiveArg> for ArchivePolicy {
    fn from(a: ArchiveArg) -> Self {
        match a {
            ArchiveArg::Explore => ArchivePolicy::Explore,
            ArchiveArg::Exploit => ArchivePolicy::Exploit,
        }
    }
}

/// Every tunable, all optional. Used both for flags and for config files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub algorithm: Option<Algorithm>,
    pub acceptance: Option<AcceptanceArg>,
    pub archive_policy: Option<ArchiveArg>,
    pub normalize: Option<bool>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub i_max: Option<u64>,
    pub delta0: Option<f64>,
    pub delta_f: Option<f64>,
    pub xi: Option<f64>,
    pub beta: Option<f64>,
    pub capacity: Option<usize>,
    pub gammas: Option<Vec<f64>>,
    pub objective: Option<usize>,
    pub cooling_fraction: Option<f64>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }

    /// Fields set in `self` win over those in `fallback`.
    pub fn or(self, fallback: PartialConfig) -> PartialConfig {
        PartialConfig {
            algorithm: self.algorithm.or(fallback.algorithm),
            acceptance: self.acceptance.or(fallback.acceptance),
            archive_policy: self.archive_policy.or(fallback.archive_policy),
            normalize: self.normalize.or(fallback.normalize),
            runs: self.runs.or(fallback.runs),
            seed: self.seed.or(fallback.seed),
            i_max: self.i_max.or(fallback.i_max),
            delta0: self.delta0.or(fallback.delta0),
            delta_f: self.delta_f.or(fallback.delta_f),
            xi: self.xi.or(fallback.xi),
            beta: self.beta.or(fallback.beta),
            capacity: self.capacity.or(fallback.capacity),
            gammas: self.gammas.or(fallback.gammas),
            objective: self.objective.or(fallback.objective),
            cooling_fraction: self.cooling_fraction.or(fallback.cooling_fraction),
        }
    }

    /// Fills every unset field from the defaults for a QUBO of size `m` and
    /// rejects flag combinations that do not apply to the chosen algorithm.
    pub fn resolve(&self, m: usize) -> Result<RunConfig> {
        let algorithm = match self.algorithm {
            Some(a) => a,
            None => bail!("no algorithm selected (use --algo da|sbda|mda)"),
        };
        let mda = algorithm == Algorithm::Mda;
        if !mda {
            if self.acceptance.is_some() {
                bail!("--acceptance only applies to --algo mda");
            }
            if self.archive_policy.is_some() {
                bail!("--archive-policy only applies to --algo mda");
            }
            if self.capacity.is_some() {
                bail!("--capacity only applies to --algo mda");
            }
        } else if self.beta.is_some() {
            bail!("--beta does not apply to --algo mda (it escapes through the archive)");
        }
        if algorithm != Algorithm::Sbda && self.gammas.is_some() {
            bail!("--gammas only applies to --algo sbda");
        }
        if algorithm != Algorithm::Da && self.objective.is_some() {
            bail!("--objective only applies to --algo da");
        }
        if self.xi.is_some() && self.cooling_fraction.is_some() {
            bail!("--xi and --cooling-fraction are mutually exclusive");
        }

        let runs = self.runs.unwrap_or(DEFAULT_RUNS);
        if runs == 0 {
            bail!("--runs must be at least 1");
        }
        let defaults = AnnealParams::defaults_for_size(m, 0);
        let i_max = self.i_max.unwrap_or(defaults.i_max);
        let delta0 = self.delta0.unwrap_or(DEFAULT_INITIAL_TEMPERATURE);
        let delta_f = self.delta_f.unwrap_or(DEFAULT_FINAL_TEMPERATURE);
        let xi = match self.cooling_fraction {
            Some(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    bail!("--cooling-fraction must lie in (0, 1], got {f}");
                }
                decay_reaching_floor(delta0, delta_f, (f * i_max as f64).max(1.0))
            }
            None => self.xi.unwrap_or(DEFAULT_DECAY),
        };
        let beta = if mda { None } else { Some(self.beta.unwrap_or(defaults.beta)) };
        let anneal = AnnealParams {
            i_max,
            delta0,
            delta_f,
            xi,
            beta: beta.unwrap_or(0.0),
            seed: 0,
        };
        anneal.validate()?;

        let gammas = if algorithm == Algorithm::Sbda {
            let schedule = match &self.gammas {
                Some(g) => ScalarisationSchedule::new(g.clone())?,
                None => ScalarisationSchedule::default(),
            };
            Some(schedule.gammas().to_vec())
        } else {
            None
        };
        let capacity = if mda { Some(self.capacity.unwrap_or(m)) } else { None };
        if capacity == Some(0) {
            bail!("--capacity must be at least 1");
        }
        let objective = if algorithm == Algorithm::Da {
            let k = self.objective.unwrap_or(1);
            if k == 0 {
                bail!("--objective is 1-based");
            }
            Some(k)
        } else {
            None
        };

        Ok(RunConfig {
            algorithm,
            acceptance: mda.then(|| self.acceptance.unwrap_or(AcceptanceArg::Strict)),
            archive_policy: mda.then(|| self.archive_policy.unwrap_or(ArchiveArg::Explore)),
            normalize: self.normalize.unwrap_or(false),
            runs,
            base_seed: self.seed.unwrap_or(0),
            i_max,
            delta0,
            delta_f,
            xi,
            beta,
            capacity,
            gammas,
            objective,
        })
    }
}

/// Decay rate that takes `delta0` down to `delta_f` in `iterations` steps.
pub fn decay_reaching_floor(delta0: f64, delta_f: f64, iterations: f64) -> f64 {
    1.0 - (delta_f / delta0).powf(1.0 / iterations)
}

/// Fully resolved configuration of one `run` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub acceptance: Option<AcceptanceArg>,
    pub archive_policy: Option<ArchiveArg>,
    pub normalize: bool,
    pub runs: usize,
    pub base_seed: u64,
    pub i_max: u64,
    pub delta0: f64,
    pub delta_f: f64,
    pub xi: f64,
    pub beta: Option<f64>,
    pub capacity: Option<usize>,
    pub gammas: Option<Vec<f64>>,
    /// 1-based objective optimised by `da`.
    pub objective: Option<usize>,
}

impl RunConfig {
    pub fn seed_for_run(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn anneal_params(&self, seed: u64) -> AnnealParams {
        AnnealParams {
            i_max: self.i_max,
            delta0: self.delta0,
            delta_f: self.delta_f,
            xi: self.xi,
            beta: self.beta.unwrap_or(0.0),
            seed,
        }
    }

    pub fn mda_params(&self, seed: u64) -> Option<MdaParams> {
        Some(MdaParams {
            anneal: self.anneal_params(seed),
            acceptance: self.acceptance?.into(),
            archive_policy: self.archive_policy?.into(),
            capacity: self.capacity?,
        })
    }

    /// Short label such as `mda-strict-explore` or `sbda-norm`.
    pub fn label(&self) -> String {
        let mut parts = vec![self.algorithm.name().to_string()];
        if let Some(a) = self.acceptance {
            parts.push(format!("{a:?}").to_lowercase());
        }
        if let Some(p) = self.archive_policy {
            parts.push(format!("{p:?}").to_lowercase());
        }
        if let Some(k) = self.objective {
            parts.push(format!("obj{k}"));
        }
        if self.normalize {
            parts.push("norm".into());
        }
        parts.join("-")
    }
}
