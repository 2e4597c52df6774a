//! Two-objective hypervolume under the `[1, 2]` normalisation protocol.
//!
//! Energies of every front under comparison are mapped affinely so the
//! shared per-objective minimum becomes 1 and the maximum 2, then the area
//! dominated up to the reference point `(2.1, 2.1)` is measured. A single
//! point at `(1, 1)` therefore scores the maximum `1.1 * 1.1 = 1.21`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

pub const REFERENCE_POINT: Point2 = [2.1, 2.1];
pub const MAX_HYPERVOLUME: f64 = 1.21;

/// Per-objective `(min, max)` mapped to `1` and `2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalisationBounds {
    pub min: Point2,
    pub max: Point2,
}

impl NormalisationBounds {
    pub fn validate(&self) -> Result<()> {
        for k in 0..2 {
            if !(self.max[k] > self.min[k]) {
                return Err(Error::DegenerateBounds { objective: k, min: self.min[k], max: self.max[k] });
            }
        }
        Ok(())
    }

    /// Widens any zero-width objective range to width one so a degenerate
    /// union (e.g. every front is a single shared point) still normalises.
    pub fn widened(mut self) -> Self {
        for k in 0..2 {
            if !(self.max[k] > self.min[k]) {
                self.max[k] = self.min[k] + 1.0;
            }
        }
        self
    }
}

/// Summary of one front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub hypervolume: f64,
    pub front_size: usize,
    pub feasible_fraction: f64,
    pub wall_time_secs: f64,
}

/// Points after normalisation, plus the indices that fell outside `[1, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalisedPoints {
    pub points: Vec<Point2>,
    pub outside: Vec<usize>,
}

/// `v -> 1 + (v - min) / (max - min)` per objective.
pub fn normalize_points(points: &[Point2], bounds: &NormalisationBounds) -> Result<NormalisedPoints> {
    bounds.validate()?;
    let mut outside = Vec::new();
    let mapped = points
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let q = [0, 1].map(|k| 1.0 + (p[k] - bounds.min[k]) / (bounds.max[k] - bounds.min[k]));
            if q.iter().any(|&v| !(1.0..=2.0).contains(&v)) {
                outside.push(idx);
            }
            q
        })
        .collect();
    Ok(NormalisedPoints { points: mapped, outside })
}

/// Componentwise min and max over every supplied set and the optional known
/// Pareto front.
pub fn bounds_from_sets(sets: &[&[Point2]], known: Option<&[Point2]>) -> Result<NormalisationBounds> {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    let mut any = false;
    for p in sets.iter().flat_map(|s| s.iter()).chain(known.into_iter().flatten()) {
        any = true;
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    if !any {
        return Err(Error::EmptyInput);
    }
    Ok(NormalisationBounds { min, max })
}

/// Number of points that do not strictly dominate `reference` and so add no
/// area.
pub fn points_outside_reference(points: &[Point2], reference: Point2) -> usize {
    points.iter().filter(|p| !(p[0] < reference[0] && p[1] < reference[1])).count()
}

/// Area dominated by `points` and bounded by `reference` (minimisation).
///
/// Points that do not dominate the reference contribute nothing. Sweeps the
/// points in increasing first objective, ties broken by the better second
/// objective, adding one rectangle per improvement in the second objective.
pub fn hypervolume_2d(points: &[Point2], reference: Point2) -> f64 {
    let mut inside: Vec<Point2> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    inside.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in inside {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}
