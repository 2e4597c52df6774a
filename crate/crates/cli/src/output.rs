//! Result directories: writing and validated loading.
//!
//! A `run` directory holds
//!
//! * `instance.dat`: the instance in canonical text form,
//! * `front_runNNN.csv`: one headerless `c1,c2` line per front point,
//! * `union_front.csv`: the non-dominated union over all runs,
//! * `metrics.csv`: per-run hypervolume, front size and timing,
//! * `aggregate.json`: configuration echo, per-run records and summaries,
//! * `trace_runNNN.csv`: per-iteration traces when requested.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use moqubo_core::metrics::{NormalisationBounds, Point2};
use moqubo_core::qap::{decode_solution, encode_permutation, parse_instance, write_instance, Permutation, QapInstance};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::run::{front_point, mean_std, FrontPoint, RunRecord, RunSet, RunTrace};

pub const AGGREGATE_FILE: &str = "aggregate.json";
pub const INSTANCE_FILE: &str = "instance.dat";

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// SHA-256 of the canonical text form, so equal instances match regardless
/// of comments or whitespace in their source files.
pub fn instance_fingerprint(inst: &QapInstance) -> String {
    let unnamed = QapInstance::new("", inst.distances().to_vec(), (0..inst.num_objectives()).map(|k| inst.flow(k).to_vec()).collect(), None)
        .expect("instance already validated");
    hex::encode(Sha256::digest(write_instance(&unnamed).as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub name: String,
    pub n: usize,
    pub objectives: usize,
    pub correlation: Option<f64>,
    pub fingerprint: String,
}

impl InstanceInfo {
    pub fn of(inst: &QapInstance) -> Self {
        Self {
            name: inst.name().to_string(),
            n: inst.n(),
            objectives: inst.num_objectives(),
            correlation: inst.correlation(),
            fingerprint: instance_fingerprint(inst),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub front_size_mean: f64,
    pub front_size_std: f64,
    pub wall_time_mean: f64,
    pub wall_time_std: f64,
    pub hypervolume_mean: Option<f64>,
    pub hypervolume_std: Option<f64>,
    pub infeasible_total: usize,
    pub coupling_builds_per_run: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub version: String,
    pub label: String,
    pub instance: InstanceInfo,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunRecord>,
    pub union_front: Vec<FrontPoint>,
    pub bounds: Option<NormalisationBounds>,
    pub union_hypervolume: Option<f64>,
    pub summary: Summary,
}

impl Aggregate {
    pub fn new(inst: &QapInstance, set: &RunSet) -> Self {
        let sizes: Vec<f64> = set.runs.iter().map(|r| r.front.len() as f64).collect();
        let times: Vec<f64> = set.runs.iter().map(|r| r.wall_time_secs).collect();
        let hvs: Option<Vec<f64>> = set.runs.iter().map(|r| r.hypervolume).collect();
        let (front_size_mean, front_size_std) = mean_std(&sizes);
        let (wall_time_mean, wall_time_std) = mean_std(&times);
        let hv = hvs.map(|h| mean_std(&h));
        Self {
            version: version_string(),
            label: set.config.label(),
            instance: InstanceInfo::of(inst),
            config: set.config.clone(),
            seeds: set.runs.iter().map(|r| r.seed).collect(),
            runs: set.runs.clone(),
            union_front: set.union_front.clone(),
            bounds: set.bounds,
            union_hypervolume: set.union_hypervolume,
            summary: Summary {
                front_size_mean,
                front_size_std,
                wall_time_mean,
                wall_time_std,
                hypervolume_mean: hv.map(|h| h.0),
                hypervolume_std: hv.map(|h| h.1),
                infeasible_total: set.runs.iter().map(|r| r.infeasible_count).sum(),
                coupling_builds_per_run: set.runs.iter().map(|r| r.coupling_builds).collect(),
            },
        }
    }
}

pub fn front_file_name(index: usize) -> String {
    format!("front_run{index:03}.csv")
}

/// Headerless CSV, one point per line, objectives in order.
pub fn front_csv(points: &[FrontPoint]) -> String {
    let mut out = String::new();
    for p in points {
        let cols: Vec<String> = p.costs.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", cols.join(","));
    }
    out
}

/// Like [`front_csv`] with the 1-based permutation as a trailing column.
pub fn front_csv_with_permutations(points: &[FrontPoint]) -> String {
    let mut out = String::new();
    for p in points {
        let cols: Vec<String> = p.costs.iter().map(|c| c.to_string()).collect();
        let perm: Vec<String> = p.permutation.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{},{}", cols.join(","), perm.join(" "));
    }
    out
}

/// Reads the first two numeric columns of a front file.
pub fn read_front_points(path: &Path) -> Result<Vec<Point2>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading front file {}", path.display()))?;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let mut next = || -> Result<f64> {
            let tok = cols.next().with_context(|| format!("{}:{}: expected two columns", path.display(), idx + 1))?;
            tok.parse::<f64>()
                .with_context(|| format!("{}:{}: `{tok}` is not a number", path.display(), idx + 1))
        };
        points.push([next()?, next()?]);
    }
    Ok(points)
}

fn write_trace(dir: &Path, run: &RunRecord) -> Result<()> {
    let Some(trace) = &run.trace else { return Ok(()) };
    let mut out = String::new();
    match trace {
        RunTrace::Da(rows) => {
            out.push_str("iteration,temperature,best_energy,offset\n");
            for (i, (t, e, o)) in rows.iter().enumerate() {
                let _ = writeln!(out, "{},{t},{e},{o}", i + 1);
            }
        }
        RunTrace::Mda(rows) => {
            out.push_str("iteration,temperature,archive_len,escaped\n");
            for (i, (t, a, esc)) in rows.iter().enumerate() {
                let _ = writeln!(out, "{},{t},{a},{}", i + 1, u8::from(*esc));
            }
        }
    }
    fs::write(dir.join(format!("trace_run{:03}.csv", run.index)), out)?;
    Ok(())
}

fn write_gamma_trace(dir: &Path, run: &RunRecord) -> Result<()> {
    let Some(per_gamma) = &run.per_gamma else { return Ok(()) };
    let mut out = String::from("gamma,alpha,seed,feasible,scalar_energy,coupling_builds\n");
    for g in per_gamma {
        let _ = writeln!(out, "{},{},{},{},{},1", g.gamma, g.alpha, g.seed, u8::from(g.feasible), g.scalar_energy);
    }
    fs::write(dir.join(format!("trace_run{:03}.csv", run.index)), out)?;
    Ok(())
}

/// Writes every output file of a run set into `dir`, creating it.
pub fn write_run_set(dir: &Path, inst: &QapInstance, set: &RunSet, with_trace: bool) -> Result<Aggregate> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    fs::write(dir.join(INSTANCE_FILE), write_instance(inst))?;
    for run in &set.runs {
        fs::write(dir.join(front_file_name(run.index)), front_csv(&run.front))?;
        if with_trace {
            write_trace(dir, run)?;
            write_gamma_trace(dir, run)?;
        }
    }
    fs::write(dir.join("union_front.csv"), front_csv(&set.union_front))?;

    let mut metrics = String::from("run,seed,hypervolume,front_size,infeasible_count,coupling_builds,wall_time_secs\n");
    for r in &set.runs {
        let hv = r.hypervolume.map(|h| h.to_string()).unwrap_or_default();
        let _ = writeln!(
            metrics,
            "{},{},{hv},{},{},{},{}",
            r.index,
            r.seed,
            r.front.len(),
            r.infeasible_count,
            r.coupling_builds,
            r.wall_time_secs
        );
    }
    fs::write(dir.join("metrics.csv"), metrics)?;

    let agg = Aggregate::new(inst, set);
    fs::write(dir.join(AGGREGATE_FILE), serde_json::to_string_pretty(&agg)? + "\n")?;
    Ok(agg)
}

/// A result directory whose contents passed re-validation.
#[derive(Debug, Clone)]
pub struct LoadedResult {
    pub dir: PathBuf,
    pub instance: QapInstance,
    pub aggregate: Aggregate,
}

/// Loads a result directory and re-validates every reported point: the
/// permutation must be a bijection that survives encode/decode, its costs
/// must equal a fresh evaluation, and the front CSV must agree with the
/// JSON record.
pub fn load_result_dir(dir: &Path) -> Result<LoadedResult> {
    let inst_text = fs::read_to_string(dir.join(INSTANCE_FILE))
        .with_context(|| format!("reading {}", dir.join(INSTANCE_FILE).display()))?;
    let instance = parse_instance(&inst_text)?;
    let agg_text = fs::read_to_string(dir.join(AGGREGATE_FILE))
        .with_context(|| format!("reading {}", dir.join(AGGREGATE_FILE).display()))?;
    let aggregate: Aggregate = serde_json::from_str(&agg_text)?;
    ensure!(
        aggregate.instance.fingerprint == instance_fingerprint(&instance),
        "{}: instance file does not match the recorded fingerprint",
        dir.display()
    );
    let check = |p: &FrontPoint| -> Result<()> {
        let sigma = Permutation::from_one_based(&p.permutation)?;
        let decoded = decode_solution(&encode_permutation(&sigma), instance.n())?;
        ensure!(decoded.as_ref() == Some(&sigma), "permutation {:?} does not round-trip", p.permutation);
        let fresh = front_point(&instance, &sigma)?;
        ensure!(
            fresh.costs == p.costs,
            "recorded costs {:?} differ from evaluated {:?} for {:?}",
            p.costs,
            fresh.costs,
            p.permutation
        );
        Ok(())
    };
    for run in &aggregate.runs {
        for p in &run.front {
            check(p)?;
        }
        let csv_path = dir.join(front_file_name(run.index));
        let on_disk = fs::read_to_string(&csv_path).with_context(|| format!("reading {}", csv_path.display()))?;
        if on_disk != front_csv(&run.front) {
            bail!("{} disagrees with {}", csv_path.display(), AGGREGATE_FILE);
        }
    }
    for p in &aggregate.union_front {
        check(p)?;
    }
    Ok(LoadedResult { dir: dir.to_path_buf(), instance, aggregate })
}
