//! Side-by-side comparison of result directories on one instance.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use moqubo_core::metrics::{bounds_from_sets, NormalisationBounds, Point2};
use serde::Serialize;

use crate::output::{instance_fingerprint, LoadedResult};
use crate::run::{mean_std, normalised_hypervolume, FrontPoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub name: String,
    pub label: String,
    pub runs: usize,
    pub hypervolumes: Vec<f64>,
    pub front_sizes: Vec<usize>,
    pub wall_times: Vec<f64>,
    pub union_hypervolume: f64,
    pub union_size: usize,
}

impl SetSummary {
    pub fn hypervolume_mean_std(&self) -> (f64, f64) {
        mean_std(&self.hypervolumes)
    }

    pub fn front_size_mean_std(&self) -> (f64, f64) {
        mean_std(&self.front_sizes.iter().map(|&s| s as f64).collect::<Vec<_>>())
    }

    pub fn wall_time_mean_std(&self) -> (f64, f64) {
        mean_std(&self.wall_times)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub bounds: NormalisationBounds,
    pub sets: Vec<SetSummary>,
    pub reference_hypervolume: Option<f64>,
}

fn points(front: &[FrontPoint]) -> Vec<Point2> {
    front.iter().map(FrontPoint::point2).collect()
}

/// Scores every run of every set under one shared normalisation built from
/// all fronts and the optional reference front.
pub fn compare_results(results: &[LoadedResult], reference: Option<&[Point2]>) -> Result<Comparison> {
    if results.len() < 2 {
        bail!("compare needs at least two result directories");
    }
    let fingerprint = instance_fingerprint(&results[0].instance);
    for r in &results[1..] {
        if instance_fingerprint(&r.instance) != fingerprint {
            bail!(
                "{} and {} were produced on different instances",
                results[0].dir.display(),
                r.dir.display()
            );
        }
    }
    if results[0].instance.num_objectives() != 2 {
        bail!("compare needs a bi-objective instance");
    }

    let fronts: Vec<Vec<Vec<Point2>>> = results
        .iter()
        .map(|r| r.aggregate.runs.iter().map(|run| points(&run.front)).collect())
        .collect();
    let all: Vec<&[Point2]> = fronts.iter().flatten().map(Vec::as_slice).collect();
    let bounds = match bounds_from_sets(&all, reference) {
        Ok(b) => b.widened(),
        Err(_) => bail!("no feasible point in any result set and no reference front"),
    };

    let mut sets = Vec::with_capacity(results.len());
    for (r, set_fronts) in results.iter().zip(&fronts) {
        let hypervolumes = set_fronts
            .iter()
            .map(|f| normalised_hypervolume(f, &bounds))
            .collect::<Result<Vec<_>>>()?;
        sets.push(SetSummary {
            name: r.dir.file_name().map_or_else(|| r.dir.display().to_string(), |s| s.to_string_lossy().into_owned()),
            label: r.aggregate.label.clone(),
            runs: r.aggregate.runs.len(),
            hypervolumes,
            front_sizes: r.aggregate.runs.iter().map(|run| run.front.len()).collect(),
            wall_times: r.aggregate.runs.iter().map(|run| run.wall_time_secs).collect(),
            union_hypervolume: normalised_hypervolume(&points(&r.aggregate.union_front), &bounds)?,
            union_size: r.aggregate.union_front.len(),
        });
    }
    let reference_hypervolume = reference.map(|p| normalised_hypervolume(p, &bounds)).transpose()?;
    Ok(Comparison { bounds, sets, reference_hypervolume })
}

/// One row per run: `set,label,run,seed,hypervolume,front_size,wall_time_secs`.
pub fn runs_csv(cmp: &Comparison, results: &[LoadedResult]) -> String {
    let mut out = String::from("set,label,run,seed,hypervolume,front_size,wall_time_secs\n");
    for (s, r) in cmp.sets.iter().zip(results) {
        for (i, run) in r.aggregate.runs.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.name, s.label, run.index, run.seed, s.hypervolumes[i], s.front_sizes[i], s.wall_times[i]
            );
        }
    }
    out
}

pub fn summary_csv(cmp: &Comparison) -> String {
    let mut out = String::from(
        "set,label,runs,hypervolume_mean,hypervolume_std,union_hypervolume,front_size_mean,front_size_std,union_size,wall_time_mean,wall_time_std\n",
    );
    for s in &cmp.sets {
        let (hm, hs) = s.hypervolume_mean_std();
        let (fm, fs) = s.front_size_mean_std();
        let (tm, ts) = s.wall_time_mean_std();
        let _ = writeln!(
            out,
            "{},{},{},{hm},{hs},{},{fm},{fs},{},{tm},{ts}",
            s.name, s.label, s.runs, s.union_hypervolume, s.union_size
        );
    }
    if let Some(h) = cmp.reference_hypervolume {
        let _ = writeln!(out, "reference,reference,0,{h},0,{h},,,,,");
    }
    out
}

/// Human-readable front-size and time tables.
pub fn render_tables(cmp: &Comparison) -> String {
    let width = cmp.sets.iter().map(|s| s.label.len().max(s.name.len())).max().unwrap_or(0).max(8);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>20}  {:>10}  {:>16}  {:>18}", "set", "hypervolume", "union hv", "front size", "time (s)");
    for s in &cmp.sets {
        let (hm, hs) = s.hypervolume_mean_std();
        let (fm, fs) = s.front_size_mean_std();
        let (tm, ts) = s.wall_time_mean_std();
        let _ = writeln!(
            out,
            "{:<width$}  {:>20}  {:>10.4}  {:>16}  {:>18}",
            s.name,
            format!("{hm:.4} ± {hs:.4}"),
            s.union_hypervolume,
            format!("{fm:.2} ± {fs:.2}"),
            format!("{tm:.3} ± {ts:.3}")
        );
    }
    if let Some(h) = cmp.reference_hypervolume {
        let _ = writeln!(out, "{:<width$}  {:>20}  {:>10.4}", "reference", "", h);
    }
    out
}

pub fn write_comparison(dir: &Path, cmp: &Comparison, results: &[LoadedResult]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("compare_runs.csv"), runs_csv(cmp, results))?;
    std::fs::write(dir.join("compare_summary.csv"), summary_csv(cmp))?;
    Ok(())
}
